// resopt: command line front end for the reservoir ring optimizer.
//
// Exit codes: 0 success, 1 config or usage error, 2 a seed failed under --strict
// (or any other runtime failure).

#include "resopt/glmy_homology.hpp"
#include "resopt/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace resopt;

namespace {

struct ConfigError : Error {
    using Error::Error;
};

WeightedDigraph load_digraph(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open digraph file " + path);
    return read_edge_list(in);
}

void save(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

// Flags shared by the experiment-shaped subcommands; each overrides the config file.
struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> repeat;
    std::optional<std::string> out_dir;
    std::optional<std::string> dataset;
    std::optional<std::string> init;
    std::optional<std::size_t> nodes;
    bool paper_scale = false;

    void attach(CLI::App* app)
    {
        app->add_option("--config", config, "INI experiment config")->check(CLI::ExistingFile);
        app->add_option("--seed", seed, "seed (base seed for experiments)");
        app->add_option("--repeat", repeat, "number of seeds");
        app->add_option("--out-dir", out_dir, "output directory");
        app->add_option("--dataset", dataset, "mackey_glass | mso | lorenz | narma");
        app->add_option("--init", init, "random | small_world | scale_free");
        app->add_option("--nodes", nodes, "reservoir size");
        app->add_flag("--paper-scale", paper_scale, "N=500, 5000/5000, 20 seeds (slow)");
    }

    ExperimentConfig resolve() const
    {
        ExperimentConfig c;
        try {
            if (!config.empty()) c = read_config_file(config);
            if (dataset) c.dataset.kind = parse_dataset(*dataset);
            if (paper_scale && !c.paper_scale) apply_paper_scale(c);
            if (init) c.reservoir.init = parse_init_method(*init);
            if (nodes) c.reservoir.size = *nodes;
            if (repeat) c.repeat = *repeat;
            if (seed) c.seed_base = *seed;
            if (out_dir) c.out_dir = *out_dir;
            c.validate();
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
        if (c.paper_scale)
            std::cerr << "warning: paper scale runs take minutes per seed (optimization alone is several minutes at N=500)\n";
        return c;
    }
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Reservoir digraph ring optimization via GLMY path homology"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // generate
    Common gen_common;
    std::string gen_out;
    double sparsity = -1;
    auto* gen = app.add_subcommand("generate", "generate a reservoir digraph as an edge list");
    gen_common.attach(gen);
    gen->add_option("--sparsity", sparsity, "random init sparsity");
    gen->add_option("-o,--output", gen_out, "edge list path (stdout when absent)");

    // homology
    std::string hom_in, hom_diagram;
    bool dump_cycles = false;
    std::uint32_t prime = 2;
    auto* hom = app.add_subcommand("homology", "H1 dimension, minimal representatives and 1-PD of a digraph");
    hom->add_option("input", hom_in, "edge list")->required()->check(CLI::ExistingFile);
    hom->add_option("--prime", prime, "coefficient field prime");
    hom->add_flag("--dump-cycles", dump_cycles, "print every minimal representative");
    hom->add_option("--diagram", hom_diagram, "write the 1-PD as CSV");

    // optimize
    std::string opt_in, opt_out, opt_report;
    bool opt_dump = false;
    auto* opt = app.add_subcommand("optimize", "turn H1 representatives into rings by flipping edges");
    opt->add_option("input", opt_in, "edge list")->required()->check(CLI::ExistingFile);
    opt->add_option("-o,--output", opt_out, "optimized edge list")->required();
    opt->add_option("--report", opt_report, "JSON report path (stdout when absent)");
    opt->add_flag("--dump-cycles", opt_dump, "print the representatives in processing order");

    // profile
    Common prof_common;
    auto* prof = app.add_subcommand("profile", "time-delay embedding and Rips 1-PD of a dataset");
    prof_common.attach(prof);

    // run
    Common run_common;
    bool strict = false;
    auto* run = app.add_subcommand("run", "full experiment over seeds");
    run_common.attach(run);
    run->add_flag("--strict", strict, "exit 2 if any seed fails");

    // mc
    Common mc_common;
    std::string mc_in;
    auto* mc = app.add_subcommand("mc", "memory capacity of a reservoir before and after optimization");
    mc_common.attach(mc);
    mc->add_option("--input", mc_in, "edge list (generated from the config when absent)")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*gen) {
            ExperimentConfig c = gen_common.resolve();
            if (sparsity >= 0) c.reservoir.sparsity = sparsity;
            std::ostringstream os;
            write_edge_list(os, build_reservoir(c.reservoir, c.seed_base));
            if (gen_out.empty()) std::cout << os.str();
            else save(gen_out, os.str());
        } else if (*hom) {
            const WeightedDigraph g = load_digraph(hom_in);
            const auto reps = minimal_representatives(g, prime);
            std::cout << "nodes " << g.node_count() << " edges " << g.edge_count() << " h1 " << reps.size() << '\n';
            if (dump_cycles)
                for (const auto& c : reps) std::cout << format_cycle(c) << '\n';
            if (!hom_diagram.empty()) {
                std::ostringstream os;
                write_diagram_csv(os, persistence_diagram_h1(g, {false, prime}));
                save(hom_diagram, os.str());
            }
        } else if (*opt) {
            const WeightedDigraph g = load_digraph(opt_in);
            const auto reps = optimizer_representatives(g);
            if (opt_dump)
                for (const auto& c : reps) std::cerr << format_cycle(c) << '\n';
            const auto [out, report] = optimize_with(g, reps);
            std::ostringstream os;
            write_edge_list(os, out);
            save(opt_out, os.str());
            nlohmann::json j = to_json(report);
            j["om_before"] = orthogonality_measurement(adjacency_matrix(g));
            j["om_after"] = orthogonality_measurement(adjacency_matrix(out));
            if (opt_report.empty()) std::cout << j.dump(2) << '\n';
            else save(opt_report, j.dump(2) + '\n');
        } else if (*prof) {
            const ExperimentConfig c = prof_common.resolve();
            const ProfileResult p = profile_dataset(c.dataset, c.seed_base);
            write_profile(c.out_dir, c.dataset.kind, p);
            std::cout << to_string(c.dataset.kind) << ": " << p.cloud.size() << " points, diameter "
                      << format_double(p.diameter) << ", " << p.diagram.pairs.size() << " pairs";
            if (p.ranking.size() >= 2)
                std::cout << ", top/second persistence " << format_double(p.ranking[0].persistence() / p.ranking[1].persistence());
            std::cout << '\n';
        } else if (*run) {
            const ExperimentConfig c = run_common.resolve();
            const AggregateReport a = run_experiment(c, [](const RunRecord& r) {
                std::cerr << "seed " << r.seed << (r.ok ? " ok" : " failed: " + r.error) << '\n';
            });
            emit_plot_data(a, c.out_dir);
            std::cout << to_json(a).dump(2) << '\n';
            if (strict && a.completed < a.records.size()) return 2;
        } else if (*mc) {
            const ExperimentConfig c = mc_common.resolve();
            const WeightedDigraph g = mc_in.empty() ? build_reservoir(c.reservoir, c.seed_base) : load_digraph(mc_in);
            const WeightedDigraph o = optimize(g).first;
            EsnConfig ec = c.esn;
            ec.reservoir_size = g.node_count();
            ec.seed = c.seed_base;
            nlohmann::json j;
            for (const auto& [name, d] : {std::pair{"before", &g}, std::pair{"after", &o}}) {
                const McResult r = memory_capacity(init_model(ec, scale_to_spectral_radius(*d, ec.lambda_target)),
                                                   mc_stream_seed(c.seed_base), c.mc);
                j[name] = {{"total", r.total}, {"per_delay", r.per_delay}};
            }
            std::cout << j.dump(2) << '\n';
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

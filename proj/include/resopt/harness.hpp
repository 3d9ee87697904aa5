#pragma once

// Experiment orchestration: build a reservoir digraph per seed, optimize it,
// and compare the ESNs built from both digraphs on one dataset.
//
// Everything written to runs.jsonl and summary.json is a function of the
// config and seed base. Wall-clock times go to timings.jsonl only.

#include "digraph.hpp"
#include "esn.hpp"
#include "ring_optimizer.hpp"
#include "tde_ph.hpp"
#include "timeseries.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace resopt {

#ifndef RESOPT_VERSION
#define RESOPT_VERSION "0.0.0"
#endif

inline constexpr const char* kVersion = RESOPT_VERSION;

enum class InitMethod { random, small_world, scale_free };
enum class DatasetKind { mackey_glass, mso, lorenz, narma };

inline std::string to_string(InitMethod m)
{
    switch (m) {
    case InitMethod::random: return "random";
    case InitMethod::small_world: return "small_world";
    case InitMethod::scale_free: return "scale_free";
    }
    return "?";
}

inline std::string to_string(DatasetKind k)
{
    switch (k) {
    case DatasetKind::mackey_glass: return "mackey_glass";
    case DatasetKind::mso: return "mso";
    case DatasetKind::lorenz: return "lorenz";
    case DatasetKind::narma: return "narma";
    }
    return "?";
}

inline InitMethod parse_init_method(const std::string& s)
{
    if (s == "random") return InitMethod::random;
    if (s == "small_world") return InitMethod::small_world;
    if (s == "scale_free") return InitMethod::scale_free;
    throw Error("config: unknown init_method '" + s + "' (random, small_world, scale_free)");
}

inline DatasetKind parse_dataset(const std::string& s)
{
    if (s == "mackey_glass") return DatasetKind::mackey_glass;
    if (s == "mso") return DatasetKind::mso;
    if (s == "lorenz") return DatasetKind::lorenz;
    if (s == "narma") return DatasetKind::narma;
    throw Error("config: unknown dataset '" + s + "' (mackey_glass, mso, lorenz, narma)");
}

struct DatasetSpec {
    DatasetKind kind = DatasetKind::mackey_glass;
    std::size_t train_len = 1000;
    std::size_t test_len = 1000;
    MackeyGlassParams mackey_glass;
    LorenzParams lorenz;
    std::vector<double> mso_alphas = mso_default_alphas();
    std::size_t embed_d = 3;
    std::size_t embed_tau = 5;
    std::size_t subsample = 300;

    bool teacher_forced() const noexcept { return kind == DatasetKind::narma; }
};

struct ReservoirSpec {
    InitMethod init = InitMethod::random;
    std::size_t size = 100;
    // Mean out-degree (1 - sparsity)(N - 1) ~ 5 at N = 100, as 0.99 gives at N = 500.
    double sparsity = 0.95;
    std::size_t ws_k = 10;
    double ws_p = 0.1;
    std::size_t ba_m = 8;
};

struct ExperimentConfig {
    ReservoirSpec reservoir;
    DatasetSpec dataset;
    EsnConfig esn;
    McProtocol mc;
    std::size_t repeat = 10;
    std::uint64_t seed_base = 0;
    std::string out_dir = "results";
    bool paper_scale = false;

    void validate() const
    {
        if (repeat < 1) throw Error("config: repeat must be at least 1");
        if (reservoir.size < 2) throw Error("config: reservoir_size must be at least 2");
        if (dataset.train_len <= esn.washout) throw Error("config: train_len must exceed the ESN washout");
        if (dataset.test_len == 0) throw Error("config: test_len must be positive");
        EsnConfig e = esn;
        e.reservoir_size = reservoir.size;
        e.validate();
    }
};

/// N=500, 5000/5000, 20 seeds, sparsity 0.99, washout 1000 (500 for NARMA).
inline void apply_paper_scale(ExperimentConfig& c)
{
    c.paper_scale = true;
    c.reservoir.size = 500;
    c.reservoir.sparsity = 0.99;
    c.dataset.train_len = 5000;
    c.dataset.test_len = 5000;
    c.repeat = 20;
    c.esn.washout = c.dataset.kind == DatasetKind::narma ? 500 : 1000;
}

// ---------------------------------------------------------------------------
// Config file (INI). Unknown keys are rejected so typos do not pass silently.

inline ExperimentConfig read_config(std::istream& is)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(std::string("config: ") + e.what());
    }
    ExperimentConfig c;
    const std::map<std::string, std::function<void(const std::string&)>> setters = {
        {"experiment.init_method", [&](const std::string& v) { c.reservoir.init = parse_init_method(v); }},
        {"experiment.dataset", [&](const std::string& v) { c.dataset.kind = parse_dataset(v); }},
        {"experiment.reservoir_size", [&](const std::string& v) { c.reservoir.size = std::stoul(v); }},
        {"experiment.repeat", [&](const std::string& v) { c.repeat = std::stoul(v); }},
        {"experiment.seed_base", [&](const std::string& v) { c.seed_base = std::stoull(v); }},
        {"experiment.out_dir", [&](const std::string& v) { c.out_dir = v; }},
        {"experiment.paper_scale", [&](const std::string& v) { c.paper_scale = v == "true" || v == "1"; }},
        {"reservoir.sparsity", [&](const std::string& v) { c.reservoir.sparsity = parse_double(v); }},
        {"reservoir.ws_k", [&](const std::string& v) { c.reservoir.ws_k = std::stoul(v); }},
        {"reservoir.ws_p", [&](const std::string& v) { c.reservoir.ws_p = parse_double(v); }},
        {"reservoir.ba_m", [&](const std::string& v) { c.reservoir.ba_m = std::stoul(v); }},
        {"dataset.train_len", [&](const std::string& v) { c.dataset.train_len = std::stoul(v); }},
        {"dataset.test_len", [&](const std::string& v) { c.dataset.test_len = std::stoul(v); }},
        {"dataset.embed_d", [&](const std::string& v) { c.dataset.embed_d = std::stoul(v); }},
        {"dataset.embed_tau", [&](const std::string& v) { c.dataset.embed_tau = std::stoul(v); }},
        {"dataset.subsample", [&](const std::string& v) { c.dataset.subsample = std::stoul(v); }},
        {"dataset.lorenz_a", [&](const std::string& v) { c.dataset.lorenz.a = parse_double(v); }},
        {"dataset.mackey_glass_tau", [&](const std::string& v) { c.dataset.mackey_glass.tau = parse_double(v); }},
        {"esn.leak_rate", [&](const std::string& v) { c.esn.leak_rate = parse_double(v); }},
        {"esn.lambda_target", [&](const std::string& v) { c.esn.lambda_target = parse_double(v); }},
        {"esn.input_scaling", [&](const std::string& v) { c.esn.input_scaling = parse_double(v); }},
        {"esn.bias_scaling", [&](const std::string& v) { c.esn.bias_scaling = parse_double(v); }},
        {"esn.washout", [&](const std::string& v) { c.esn.washout = std::stoul(v); }},
        {"esn.ridge", [&](const std::string& v) { c.esn.ridge = parse_double(v); }},
        {"mc.washout", [&](const std::string& v) { c.mc.washout = std::stoul(v); }},
        {"mc.train", [&](const std::string& v) { c.mc.train = std::stoul(v); }},
        {"mc.eval", [&](const std::string& v) { c.mc.eval = std::stoul(v); }},
    };
    // paper_scale first, so explicit keys in the file still override it.
    if (auto flag = tree.get_optional<std::string>("experiment.paper_scale"); flag && (*flag == "true" || *flag == "1")) {
        if (auto ds = tree.get_optional<std::string>("experiment.dataset")) c.dataset.kind = parse_dataset(*ds);
        apply_paper_scale(c);
    }
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw Error("config: key '" + section + "' outside a section");
        for (const auto& [key, value] : body) {
            const std::string name = section + "." + key;
            auto it = setters.find(name);
            if (it == setters.end()) throw Error("config: unknown key '" + name + "'");
            try {
                it->second(value.data());
            } catch (const Error&) {
                throw;
            } catch (const std::exception&) {
                throw Error("config: bad value '" + value.data() + "' for " + name);
            }
        }
    }
    c.validate();
    return c;
}

inline ExperimentConfig read_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error("config: cannot open " + path.string());
    return read_config(in);
}

inline nlohmann::json to_json(const ExperimentConfig& c)
{
    nlohmann::json j;
    j["init_method"] = to_string(c.reservoir.init);
    j["reservoir_size"] = c.reservoir.size;
    j["sparsity"] = c.reservoir.sparsity;
    j["ws_k"] = c.reservoir.ws_k;
    j["ws_p"] = c.reservoir.ws_p;
    j["ba_m"] = c.reservoir.ba_m;
    j["dataset"] = to_string(c.dataset.kind);
    j["train_len"] = c.dataset.train_len;
    j["test_len"] = c.dataset.test_len;
    j["lorenz_a"] = c.dataset.lorenz.a;
    j["mackey_glass_tau"] = c.dataset.mackey_glass.tau;
    j["embed_d"] = c.dataset.embed_d;
    j["embed_tau"] = c.dataset.embed_tau;
    j["subsample"] = c.dataset.subsample;
    j["esn"] = to_json(c.esn);
    j["esn"].erase("seed");
    j["mc"] = {{"washout", c.mc.washout}, {"train", c.mc.train}, {"eval", c.mc.eval}, {"kmax_factor", c.mc.kmax_factor}};
    j["repeat"] = c.repeat;
    j["seed_base"] = c.seed_base;
    j["paper_scale"] = c.paper_scale;
    return j;
}

// ---------------------------------------------------------------------------
// Pipeline pieces.

inline WeightedDigraph build_reservoir(const ReservoirSpec& r, std::uint64_t seed)
{
    switch (r.init) {
    case InitMethod::random: return random_sparse(r.size, r.sparsity, seed);
    case InitMethod::small_world: return watts_strogatz(r.size, r.ws_k, r.ws_p, seed);
    case InitMethod::scale_free: return barabasi_albert(r.size, r.ba_m, seed);
    }
    throw Error("build_reservoir: bad init method");
}

/// Normalized input and target series of equal length. Free-running tasks
/// predict the next value (target[t] = input[t+1]); NARMA maps u to y.
struct TaskData {
    std::vector<double> inputs;
    std::vector<double> targets;
};

inline TaskData make_task(const DatasetSpec& d, std::uint64_t seed)
{
    const std::size_t len = d.train_len + d.test_len;
    if (d.kind == DatasetKind::narma) {
        const NarmaSeries s = narma(len, seed);
        return {normalize(s.u).values, normalize(s.y).values};
    }
    Series s;
    switch (d.kind) {
    case DatasetKind::mackey_glass: s = mackey_glass(len + 1, d.mackey_glass); break;
    case DatasetKind::mso: s = mso(len + 1, d.mso_alphas); break;
    case DatasetKind::lorenz: s = lorenz(len + 1, d.lorenz); break;
    case DatasetKind::narma: break;
    }
    const Series n = normalize(s);
    return {{n.values.begin(), n.values.end() - 1}, {n.values.begin() + 1, n.values.end()}};
}

/// Raw (normalized) series used for topology profiling.
inline Series dataset_series(const DatasetSpec& d, std::uint64_t seed)
{
    const std::size_t len = d.train_len + d.test_len;
    switch (d.kind) {
    case DatasetKind::mackey_glass: return normalize(mackey_glass(len, d.mackey_glass));
    case DatasetKind::mso: return normalize(mso(len, d.mso_alphas));
    case DatasetKind::lorenz: return normalize(lorenz(len, d.lorenz));
    case DatasetKind::narma: return normalize(narma(len, seed).y);
    }
    throw Error("dataset_series: bad dataset kind");
}

struct Evaluation {
    double rmse = 0;
    std::size_t divergence = 0;
    std::vector<double> predicted; // test window
};

/// Trains on the first train_len steps and predicts the test window: free
/// running from the final training state, or teacher-forced for NARMA.
inline Evaluation evaluate(EsnModel m, const TaskData& task, const DatasetSpec& d)
{
    const auto tr = static_cast<Eigen::Index>(d.train_len), te = static_cast<Eigen::Index>(d.test_len);
    DenseMatrix train_in(tr, 1), train_out(tr, 1);
    for (Eigen::Index t = 0; t < tr; ++t) {
        train_in(t, 0) = task.inputs[static_cast<std::size_t>(t)];
        train_out(t, 0) = task.targets[static_cast<std::size_t>(t)];
    }
    StateTrajectory traj = collect_states(m, train_in, m.config.washout);
    traj.targets = train_out;
    fit(m, traj);
    const Vector last = traj.states.row(tr - 1).transpose();

    DenseMatrix pred;
    if (d.teacher_forced()) {
        DenseMatrix test_in(te, 1);
        for (Eigen::Index t = 0; t < te; ++t) test_in(t, 0) = task.inputs[static_cast<std::size_t>(tr + t)];
        pred = predict_teacher_forced(m, test_in, last);
    } else {
        pred = free_run_from(m, last, d.test_len);
    }
    Evaluation ev;
    ev.predicted.assign(pred.data(), pred.data() + pred.rows());
    const std::span<const double> actual(task.targets.data() + d.train_len, d.test_len);
    ev.rmse = rmse(ev.predicted, actual);
    ev.divergence = divergence_time(ev.predicted, actual);
    return ev;
}

struct PhaseTimes {
    double build = 0, optimize = 0, mc = 0, train_test = 0;
};

struct RunRecord {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    std::size_t edges = 0;
    double om_before = 0, om_after = 0;
    std::size_t representatives = 0, rings_preexisting = 0, rings_added = 0, cycles_abandoned = 0, flips = 0;
    double mc_before = 0, mc_after = 0;
    double rmse_before = 0, rmse_after = 0;
    std::size_t divergence_before = 0, divergence_after = 0;
    PhaseTimes times;
    std::vector<double> trace_true, trace_before, trace_after; // test window, not persisted in runs.jsonl
};

inline nlohmann::json to_json(const RunRecord& r)
{
    nlohmann::json j;
    j["seed"] = r.seed;
    j["status"] = r.ok ? "ok" : "failed";
    if (!r.ok) {
        j["error"] = r.error;
        return j;
    }
    j["edges"] = r.edges;
    j["om_before"] = r.om_before;
    j["om_after"] = r.om_after;
    j["representatives"] = r.representatives;
    j["rings_preexisting"] = r.rings_preexisting;
    j["rings_added"] = r.rings_added;
    j["cycles_abandoned"] = r.cycles_abandoned;
    j["flips"] = r.flips;
    j["mc_before"] = r.mc_before;
    j["mc_after"] = r.mc_after;
    j["rmse_before"] = r.rmse_before;
    j["rmse_after"] = r.rmse_after;
    j["divergence_before"] = r.divergence_before;
    j["divergence_after"] = r.divergence_after;
    return j;
}

inline RunRecord run_record_from_json(const nlohmann::json& j)
{
    RunRecord r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.ok = j.at("status") == "ok";
    if (!r.ok) {
        r.error = j.value("error", "");
        return r;
    }
    r.edges = j.at("edges");
    r.om_before = j.at("om_before");
    r.om_after = j.at("om_after");
    r.representatives = j.at("representatives");
    r.rings_preexisting = j.at("rings_preexisting");
    r.rings_added = j.at("rings_added");
    r.cycles_abandoned = j.at("cycles_abandoned");
    r.flips = j.at("flips");
    r.mc_before = j.at("mc_before");
    r.mc_after = j.at("mc_after");
    r.rmse_before = j.at("rmse_before");
    r.rmse_after = j.at("rmse_after");
    r.divergence_before = j.at("divergence_before");
    r.divergence_after = j.at("divergence_after");
    return r;
}

/// Seed of the memory-capacity input stream for a run; shared by both phases.
inline std::uint64_t mc_stream_seed(std::uint64_t seed) { return Rng(seed).split(7).seed(); }

/// One seed of the pipeline. Both ESNs share W_in, bias, data and washout;
/// only the digraph behind W_r differs.
inline RunRecord run_seed(const ExperimentConfig& c, std::uint64_t seed)
{
    using clock = std::chrono::steady_clock;
    auto secs = [](clock::time_point a, clock::time_point b) { return std::chrono::duration<double>(b - a).count(); };
    RunRecord r;
    r.seed = seed;
    try {
        auto t0 = clock::now();
        const WeightedDigraph g = build_reservoir(c.reservoir, seed);
        r.edges = g.edge_count();
        r.om_before = orthogonality_measurement(adjacency_matrix(g));
        auto t1 = clock::now();
        const auto [opt, report] = optimize(g);
        if (opt.edge_count() != g.edge_count()) throw Error("optimize changed the edge count");
        r.om_after = orthogonality_measurement(adjacency_matrix(opt));
        r.representatives = report.representatives;
        r.rings_preexisting = report.rings_preexisting;
        r.rings_added = report.rings_added;
        r.cycles_abandoned = report.cycles_abandoned;
        r.flips = report.flips.size();
        auto t2 = clock::now();

        EsnConfig ec = c.esn;
        ec.reservoir_size = c.reservoir.size;
        ec.seed = seed;
        const EsnModel before = init_model(ec, scale_to_spectral_radius(g, ec.lambda_target));
        const EsnModel after = init_model(ec, scale_to_spectral_radius(opt, ec.lambda_target));
        r.mc_before = memory_capacity(before, mc_stream_seed(seed), c.mc).total;
        r.mc_after = memory_capacity(after, mc_stream_seed(seed), c.mc).total;
        auto t3 = clock::now();

        const TaskData task = make_task(c.dataset, seed);
        Evaluation eb = evaluate(before, task, c.dataset);
        Evaluation ea = evaluate(after, task, c.dataset);
        r.rmse_before = eb.rmse;
        r.rmse_after = ea.rmse;
        r.divergence_before = eb.divergence;
        r.divergence_after = ea.divergence;
        r.trace_true.assign(task.targets.begin() + static_cast<std::ptrdiff_t>(c.dataset.train_len), task.targets.end());
        r.trace_before = std::move(eb.predicted);
        r.trace_after = std::move(ea.predicted);
        auto t4 = clock::now();
        r.times = {secs(t0, t1), secs(t1, t2), secs(t2, t3), secs(t3, t4)};
        r.ok = true;
    } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
    }
    return r;
}

// ---------------------------------------------------------------------------
// Aggregation.

struct MetricSummary {
    double mean = 0;
    double sd = 0; // sample standard deviation; 0 for a single record
};

inline MetricSummary summarize(const std::vector<double>& v)
{
    MetricSummary s;
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

/// One-sided sign test: P(at least `wins` successes of `wins + losses`
/// fair coin flips). Ties are dropped by the caller.
inline double sign_test_p(std::size_t wins, std::size_t losses)
{
    const std::size_t n = wins + losses;
    if (n == 0) return 1.0;
    double p = 0, term = std::pow(0.5, static_cast<double>(n)); // C(n,0) / 2^n
    for (std::size_t k = 0; k <= n; ++k) {
        if (k >= wins) p += term;
        term = term * static_cast<double>(n - k) / static_cast<double>(k + 1);
    }
    return std::min(1.0, p);
}

inline const std::vector<std::string>& metric_names()
{
    static const std::vector<std::string> names = {
        "om_before",  "om_after",   "rings_added",       "cycles_abandoned", "flips",
        "mc_before",  "mc_after",   "rmse_before",       "rmse_after",       "divergence_before",
        "divergence_after"};
    return names;
}

inline double metric(const RunRecord& r, const std::string& name)
{
    if (name == "om_before") return r.om_before;
    if (name == "om_after") return r.om_after;
    if (name == "rings_added") return static_cast<double>(r.rings_added);
    if (name == "cycles_abandoned") return static_cast<double>(r.cycles_abandoned);
    if (name == "flips") return static_cast<double>(r.flips);
    if (name == "mc_before") return r.mc_before;
    if (name == "mc_after") return r.mc_after;
    if (name == "rmse_before") return r.rmse_before;
    if (name == "rmse_after") return r.rmse_after;
    if (name == "divergence_before") return static_cast<double>(r.divergence_before);
    if (name == "divergence_after") return static_cast<double>(r.divergence_after);
    throw Error("metric: unknown name " + name);
}

struct AggregateReport {
    ExperimentConfig config;
    std::vector<RunRecord> records;
    std::size_t completed = 0;
    std::map<std::string, MetricSummary> metrics; // over completed records
};

inline AggregateReport aggregate(const ExperimentConfig& c, std::vector<RunRecord> records)
{
    AggregateReport a{c, std::move(records), 0, {}};
    for (const auto& name : metric_names()) {
        std::vector<double> v;
        for (const auto& r : a.records)
            if (r.ok) v.push_back(metric(r, name));
        a.metrics[name] = summarize(v);
    }
    for (const auto& r : a.records) a.completed += r.ok;
    return a;
}

inline nlohmann::json to_json(const AggregateReport& a)
{
    nlohmann::json j;
    j["version"] = kVersion;
    j["config"] = to_json(a.config);
    j["repeat"] = a.config.repeat;
    j["completed"] = a.completed;
    j["failed"] = a.records.size() - a.completed;
    nlohmann::json m = nlohmann::json::object();
    for (const auto& [name, s] : a.metrics) m[name] = {{"mean", s.mean}, {"sd", s.sd}};
    j["metrics"] = m;
    return j;
}

// ---------------------------------------------------------------------------
// Files.

namespace detail {

/// Writes through a temporary file and renames, so readers never see a torn file.
inline void write_file(const std::filesystem::path& path, const std::string& content)
{
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + path.string());
        out << content;
        if (!out) throw Error("cannot write " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

inline void ensure_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw Error("cannot create output directory " + dir.string());
}

} // namespace detail

inline std::string runs_jsonl(const std::vector<RunRecord>& records)
{
    std::string out;
    for (const auto& r : records) out += to_json(r).dump() + '\n';
    return out;
}

inline std::vector<RunRecord> read_runs_jsonl(std::istream& is)
{
    std::vector<RunRecord> records;
    std::string line;
    while (std::getline(is, line))
        if (!line.empty()) records.push_back(run_record_from_json(nlohmann::json::parse(line)));
    return records;
}

/// Runs every seed and writes runs.jsonl, summary.json and timings.jsonl into
/// config.out_dir. `progress` is called after each seed.
inline AggregateReport run_experiment(const ExperimentConfig& c,
                                      const std::function<void(const RunRecord&)>& progress = {})
{
    c.validate();
    const std::filesystem::path dir = c.out_dir;
    detail::ensure_dir(dir);
    std::vector<RunRecord> records;
    std::string timings;
    for (std::size_t i = 0; i < c.repeat; ++i) {
        records.push_back(run_seed(c, c.seed_base + i));
        const RunRecord& r = records.back();
        timings += nlohmann::json{{"seed", r.seed},
                                  {"build_s", r.times.build},
                                  {"optimize_s", r.times.optimize},
                                  {"mc_s", r.times.mc},
                                  {"train_test_s", r.times.train_test}}
                       .dump() +
                   '\n';
        if (progress) progress(r);
    }
    AggregateReport a = aggregate(c, std::move(records));
    detail::write_file(dir / "runs.jsonl", runs_jsonl(a.records));
    detail::write_file(dir / "summary.json", to_json(a).dump(2) + '\n');
    detail::write_file(dir / "timings.jsonl", timings);
    return a;
}

struct ProfileResult {
    PointCloud cloud;
    CloudDiagram diagram;
    std::vector<CloudPair> ranking;
    double diameter = 0;
};

/// Normalize, embed, maxmin-subsample and compute the Rips H1 diagram with
/// max_scale = cloud diameter.
inline ProfileResult profile_dataset(const DatasetSpec& d, std::uint64_t seed)
{
    const Series s = dataset_series(d, seed);
    ProfileResult p;
    p.cloud = subsample_maxmin(time_delay_embed(s.values, d.embed_d, d.embed_tau), d.subsample, seed);
    p.diameter = cloud_diameter(p.cloud);
    p.diagram = rips_persistence_h1(p.cloud, p.diameter);
    p.ranking = persistence_ranking(p.diagram);
    return p;
}

/// cloud_<dataset>.csv, pd_<dataset>.csv and ranking_<dataset>.csv.
inline void write_profile(const std::filesystem::path& dir, DatasetKind kind, const ProfileResult& p)
{
    detail::ensure_dir(dir);
    const std::string name = to_string(kind);
    std::ostringstream cloud, pd, rank;
    write_cloud_csv(cloud, p.cloud);
    write_cloud_diagram_csv(pd, p.diagram);
    rank << "rank,birth,death,persistence\n";
    for (std::size_t i = 0; i < p.ranking.size(); ++i)
        rank << i + 1 << ',' << format_double(p.ranking[i].birth) << ',' << format_double(p.ranking[i].death) << ','
             << format_double(p.ranking[i].persistence()) << '\n';
    detail::write_file(dir / ("cloud_" + name + ".csv"), cloud.str());
    detail::write_file(dir / ("pd_" + name + ".csv"), pd.str());
    detail::write_file(dir / ("ranking_" + name + ".csv"), rank.str());
}

/// trace_<dataset>.csv (first completed seed), mc.csv, rmse.csv and
/// pd_<dataset>.csv for the dataset's topology profile.
inline void emit_plot_data(const AggregateReport& a, const std::filesystem::path& dir)
{
    detail::ensure_dir(dir);
    const std::string ds = to_string(a.config.dataset.kind), init = to_string(a.config.reservoir.init);
    std::ostringstream trace;
    trace << "t,true,pred_before,pred_after\n";
    for (const auto& r : a.records) {
        if (!r.ok) continue;
        for (std::size_t t = 0; t < r.trace_true.size(); ++t)
            trace << t << ',' << format_double(r.trace_true[t]) << ',' << format_double(r.trace_before[t]) << ','
                  << format_double(r.trace_after[t]) << '\n';
        break;
    }
    auto bars = [&](const std::string& stem) {
        std::ostringstream os;
        os << "dataset,init_method,phase,mean,sd\n";
        for (const char* phase : {"before", "after"}) {
            const MetricSummary& s = a.metrics.at(stem + "_" + phase);
            os << ds << ',' << init << ',' << phase << ',' << format_double(s.mean) << ',' << format_double(s.sd) << '\n';
        }
        return os.str();
    };
    detail::write_file(dir / ("trace_" + ds + ".csv"), trace.str());
    detail::write_file(dir / "mc.csv", bars("mc"));
    detail::write_file(dir / "rmse.csv", bars("rmse"));
    std::ostringstream pd;
    write_cloud_diagram_csv(pd, profile_dataset(a.config.dataset, a.config.seed_base).diagram);
    detail::write_file(dir / ("pd_" + ds + ".csv"), pd.str());
}

} // namespace resopt

#pragma once

// Leaky echo state network:
//   x(t+1) = (1 - a) x(t) + a tanh(W_in u(t+1) + W_r x(t) + b)
//   y(t)   = W_out x(t) + c
// Only the readout (W_out, c) is trained, by ridge regression that leaves c
// unpenalized.

#include "common.hpp"
#include "rng.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/QR>

#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace resopt {

struct EsnConfig {
    std::size_t reservoir_size = 100;
    double leak_rate = 0.3;
    double lambda_target = 0.8;
    std::size_t input_dim = 1;
    std::size_t output_dim = 1;
    double input_scaling = 1.0;
    double bias_scaling = 0.0;
    std::size_t washout = 100;
    double ridge = 1e-8;
    std::uint64_t seed = 0;

    void validate() const
    {
        if (reservoir_size == 0) throw Error("esn: reservoir_size must be positive");
        if (!(leak_rate > 0.0 && leak_rate <= 1.0)) throw Error("esn: leak_rate must lie in (0, 1]");
        if (!(lambda_target > 0.0)) throw Error("esn: lambda_target must be positive");
        if (input_dim == 0 || output_dim == 0) throw Error("esn: input_dim and output_dim must be positive");
        if (!(input_scaling > 0.0)) throw Error("esn: input_scaling must be positive");
        if (!(bias_scaling >= 0.0)) throw Error("esn: bias_scaling must be nonnegative");
        if (!(ridge >= 0.0)) throw Error("esn: ridge must be nonnegative");
    }
};

struct Readout {
    DenseMatrix w_out; // M x N
    Vector bias;       // M
};

struct EsnModel {
    EsnConfig config;
    DenseMatrix w_in; // N x L
    DenseMatrix w_r;  // N x N
    Vector bias;      // N
    std::optional<Readout> readout;

    std::size_t size() const noexcept { return config.reservoir_size; }
};

/// Rows are time steps. Rows [0, washout) are excluded from training.
struct StateTrajectory {
    DenseMatrix states;  // T x N
    DenseMatrix inputs;  // T x L
    DenseMatrix targets; // T x M, may be left empty until assigned
    std::size_t washout = 0;
};

/// W_in and bias are drawn from independent streams of config.seed, row-major.
inline EsnModel init_model(const EsnConfig& config, const DenseMatrix& w_r)
{
    config.validate();
    const auto n = static_cast<Eigen::Index>(config.reservoir_size);
    if (w_r.rows() != n || w_r.cols() != n) throw Error("init_model: W_r must be N x N");
    EsnModel m{config, DenseMatrix(n, static_cast<Eigen::Index>(config.input_dim)), w_r, Vector::Zero(n), std::nullopt};
    const Rng root(config.seed);
    Rng in_rng = root.split(0);
    for (Eigen::Index i = 0; i < m.w_in.rows(); ++i)
        for (Eigen::Index j = 0; j < m.w_in.cols(); ++j)
            m.w_in(i, j) = in_rng.uniform(-config.input_scaling, config.input_scaling);
    if (config.bias_scaling > 0.0) {
        Rng bias_rng = root.split(1);
        for (Eigen::Index i = 0; i < n; ++i) m.bias(i) = bias_rng.uniform(-config.bias_scaling, config.bias_scaling);
    }
    return m;
}

inline Vector step(const EsnModel& m, const Vector& x, const Vector& u)
{
    if (x.size() != m.w_r.rows() || u.size() != m.w_in.cols()) throw Error("step: dimension mismatch");
    const double a = m.config.leak_rate;
    const Vector pre = m.w_in * u + m.w_r * x + m.bias;
    return (1.0 - a) * x + a * pre.unaryExpr([](double v) { return std::tanh(v); });
}

/// Runs the reservoir over `inputs` (T x L) from `x0` (zero when absent);
/// row t holds the state after consuming input row t.
inline StateTrajectory collect_states(const EsnModel& m, const DenseMatrix& inputs, std::size_t washout,
                                      const std::optional<Vector>& x0 = std::nullopt)
{
    if (inputs.cols() != m.w_in.cols()) throw Error("collect_states: input dimension mismatch");
    if (static_cast<std::size_t>(inputs.rows()) <= washout) throw Error("collect_states: series shorter than washout");
    StateTrajectory traj{DenseMatrix(inputs.rows(), m.w_r.rows()), inputs, DenseMatrix(), washout};
    Vector x = x0 ? *x0 : Vector::Zero(m.w_r.rows());
    for (Eigen::Index t = 0; t < inputs.rows(); ++t) {
        x = step(m, x, inputs.row(t).transpose());
        traj.states.row(t) = x.transpose();
    }
    return traj;
}

/// Ridge regression over the non-washout rows:
///   min |Y - X W_out^T - 1 c^T|^2 + ridge |W_out|^2,
/// solved as a stacked least-squares problem with column-pivoting QR.
inline Readout train_readout(const StateTrajectory& traj, double ridge)
{
    if (!(ridge >= 0.0)) throw Error("train_readout: ridge must be nonnegative");
    const Eigen::Index n = traj.states.cols();
    const Eigen::Index rows = traj.states.rows() - static_cast<Eigen::Index>(traj.washout);
    if (traj.targets.rows() != traj.states.rows()) throw Error("train_readout: targets missing or misaligned");
    if (rows < n + 1) throw Error("train_readout: need at least N + 1 training rows");
    const Eigen::Index extra = ridge > 0.0 ? n : 0;

    DenseMatrix a = DenseMatrix::Zero(rows + extra, n + 1);
    DenseMatrix b = DenseMatrix::Zero(rows + extra, traj.targets.cols());
    a.topLeftCorner(rows, n) = traj.states.bottomRows(rows);
    a.topRightCorner(rows, 1).setOnes();
    b.topRows(rows) = traj.targets.bottomRows(rows);
    if (extra > 0) a.bottomLeftCorner(n, n).diagonal().setConstant(std::sqrt(ridge));

    Eigen::ColPivHouseholderQR<DenseMatrix> qr(a);
    if (ridge == 0.0 && qr.rank() < n + 1)
        throw Error("train_readout: degenerate least-squares system; use ridge > 0");
    const DenseMatrix sol = qr.solve(b); // (N + 1) x M
    return {sol.topRows(n).transpose(), sol.row(n).transpose()};
}

/// Trains on `traj` and stores the readout in `m`.
inline void fit(EsnModel& m, const StateTrajectory& traj) { m.readout = train_readout(traj, m.config.ridge); }

inline Vector readout_value(const EsnModel& m, const Vector& x)
{
    if (!m.readout) throw Error("esn: model has no trained readout");
    return m.readout->w_out * x + m.readout->bias;
}

/// One output per input row using the true inputs throughout.
inline DenseMatrix predict_teacher_forced(const EsnModel& m, const DenseMatrix& inputs,
                                          const std::optional<Vector>& x0 = std::nullopt)
{
    if (!m.readout) throw Error("predict_teacher_forced: model has no trained readout");
    DenseMatrix out(inputs.rows(), m.readout->w_out.rows());
    Vector x = x0 ? *x0 : Vector::Zero(m.w_r.rows());
    for (Eigen::Index t = 0; t < inputs.rows(); ++t) {
        x = step(m, x, inputs.row(t).transpose());
        out.row(t) = readout_value(m, x).transpose();
    }
    return out;
}

/// Autonomous continuation from state `x`: row 0 is the readout at `x`, and
/// each output is fed back as the next input.
inline DenseMatrix free_run_from(const EsnModel& m, Vector x, std::size_t horizon)
{
    if (!m.readout) throw Error("predict_free_run: model has no trained readout");
    if (m.readout->w_out.rows() != m.w_in.cols()) throw Error("predict_free_run: output must feed back as input");
    DenseMatrix out(static_cast<Eigen::Index>(horizon), m.readout->w_out.rows());
    for (Eigen::Index t = 0; t < out.rows(); ++t) {
        const Vector y = readout_value(m, x);
        out.row(t) = y.transpose();
        if (t + 1 < out.rows()) x = step(m, x, y);
    }
    return out;
}

/// Teacher-forces `prime` from the zero state, then runs free for `horizon`
/// steps; row 0 predicts the value following the last prime row.
inline DenseMatrix predict_free_run(const EsnModel& m, const DenseMatrix& prime, std::size_t horizon)
{
    if (!m.readout) throw Error("predict_free_run: model has no trained readout");
    Vector x = Vector::Zero(m.w_r.rows());
    for (Eigen::Index t = 0; t < prime.rows(); ++t) x = step(m, x, prime.row(t).transpose());
    return free_run_from(m, std::move(x), horizon);
}

inline double rmse(std::span<const double> predicted, std::span<const double> actual)
{
    if (predicted.size() != actual.size()) throw Error("rmse: length mismatch");
    if (predicted.empty()) throw Error("rmse: empty series");
    double s = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) s += (predicted[i] - actual[i]) * (predicted[i] - actual[i]);
    return std::sqrt(s / static_cast<double>(predicted.size()));
}

inline double rmse(const Vector& predicted, const Vector& actual)
{
    return rmse(std::span<const double>(predicted.data(), static_cast<std::size_t>(predicted.size())),
                std::span<const double>(actual.data(), static_cast<std::size_t>(actual.size())));
}

/// Index of the first step with |error| > threshold; the length if none.
inline std::size_t divergence_time(std::span<const double> predicted, std::span<const double> actual,
                                   double threshold = 0.1)
{
    if (predicted.size() != actual.size()) throw Error("divergence_time: length mismatch");
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (std::abs(predicted[i] - actual[i]) > threshold) return i;
    return predicted.size();
}

// ---------------------------------------------------------------------------
// Memory capacity.

struct McProtocol {
    std::size_t washout = 200;
    std::size_t train = 1000;
    std::size_t eval = 1000;
    double kmax_factor = 1.4;
};

struct McResult {
    double total = 0;
    std::vector<double> per_delay; // index k-1 holds MC_k
};

/// MC = sum_k corr^2(u(t-k), y_k(t)) for k = 1..round(1.4 N), with u i.i.d.
/// uniform on [-0.5, 0.5] drawn from `seed` and fed through input column 0.
/// Readouts are fitted on the train window and scored on the eval window; the
/// washout grows to k_max when k_max is larger so every delayed input exists.
inline McResult memory_capacity(const EsnModel& m, std::uint64_t seed, const McProtocol& proto = {})
{
    const auto n = static_cast<Eigen::Index>(m.size());
    const auto k_max = static_cast<std::size_t>(std::llround(proto.kmax_factor * static_cast<double>(n)));
    const std::size_t washout = std::max(proto.washout, k_max);
    const std::size_t total = washout + proto.train + proto.eval;

    Rng rng(seed);
    std::vector<double> u(total);
    for (double& v : u) v = rng.uniform(-0.5, 0.5);
    DenseMatrix inputs = DenseMatrix::Zero(static_cast<Eigen::Index>(total), m.w_in.cols());
    for (std::size_t t = 0; t < total; ++t) inputs(static_cast<Eigen::Index>(t), 0) = u[t];

    StateTrajectory traj = collect_states(m, inputs, 0);
    const auto w = static_cast<Eigen::Index>(washout), tr = static_cast<Eigen::Index>(proto.train),
               ev = static_cast<Eigen::Index>(proto.eval), kk = static_cast<Eigen::Index>(k_max);

    // All delays at once: the train window with target column k-1 = u(t-k).
    StateTrajectory fit_window{traj.states.middleRows(w, tr), inputs.middleRows(w, tr), DenseMatrix(tr, kk), 0};
    for (Eigen::Index t = 0; t < tr; ++t)
        for (Eigen::Index k = 1; k <= kk; ++k) fit_window.targets(t, k - 1) = u[static_cast<std::size_t>(w + t - k)];
    const Readout r = train_readout(fit_window, m.config.ridge);

    const DenseMatrix y = (traj.states.middleRows(w + tr, ev) * r.w_out.transpose()).rowwise() + r.bias.transpose();
    McResult res;
    res.per_delay.resize(k_max, 0.0);
    for (Eigen::Index k = 1; k <= kk; ++k) {
        Vector target(ev);
        for (Eigen::Index t = 0; t < ev; ++t) target(t) = u[static_cast<std::size_t>(w + tr + t - k)];
        const Vector yk = y.col(k - 1);
        const Vector dy = yk.array() - yk.mean();
        const Vector du = target.array() - target.mean();
        const double var_y = dy.squaredNorm() / static_cast<double>(ev);
        const double var_u = du.squaredNorm() / static_cast<double>(ev);
        if (var_y < 1e-12 || var_u == 0.0) continue;
        const double cov = dy.dot(du) / static_cast<double>(ev);
        res.per_delay[static_cast<std::size_t>(k - 1)] = std::min(1.0, cov * cov / (var_u * var_y));
    }
    for (double v : res.per_delay) res.total += v;
    return res;
}

// ---------------------------------------------------------------------------
// Serialization.

namespace detail {

inline nlohmann::json matrix_rows(const DenseMatrix& a)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(a.cols()));
        for (Eigen::Index j = 0; j < a.cols(); ++j) row[static_cast<std::size_t>(j)] = a(i, j);
        rows.push_back(row);
    }
    return rows;
}

inline DenseMatrix matrix_from_rows(const nlohmann::json& rows, Eigen::Index r, Eigen::Index c)
{
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != r) throw Error("esn json: bad matrix shape");
    DenseMatrix a(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) throw Error("esn json: bad matrix shape");
        for (Eigen::Index j = 0; j < c; ++j) a(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    return a;
}

inline nlohmann::json vector_array(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Vector vector_from_array(const nlohmann::json& a, Eigen::Index n)
{
    if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != n) throw Error("esn json: bad vector length");
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = a[static_cast<std::size_t>(i)].get<double>();
    return v;
}

} // namespace detail

inline nlohmann::json to_json(const EsnConfig& c)
{
    return {{"reservoir_size", c.reservoir_size}, {"leak_rate", c.leak_rate},   {"lambda_target", c.lambda_target},
            {"input_dim", c.input_dim},           {"output_dim", c.output_dim}, {"input_scaling", c.input_scaling},
            {"bias_scaling", c.bias_scaling},     {"washout", c.washout},       {"ridge", c.ridge},
            {"seed", c.seed}};
}

inline EsnConfig esn_config_from_json(const nlohmann::json& j)
{
    EsnConfig c;
    c.reservoir_size = j.at("reservoir_size").get<std::size_t>();
    c.leak_rate = j.at("leak_rate").get<double>();
    c.lambda_target = j.at("lambda_target").get<double>();
    c.input_dim = j.at("input_dim").get<std::size_t>();
    c.output_dim = j.at("output_dim").get<std::size_t>();
    c.input_scaling = j.at("input_scaling").get<double>();
    c.bias_scaling = j.at("bias_scaling").get<double>();
    c.washout = j.at("washout").get<std::size_t>();
    c.ridge = j.at("ridge").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.validate();
    return c;
}

inline nlohmann::json to_json(const EsnModel& m)
{
    nlohmann::json j{{"version", "esn-v1"},
                     {"config", to_json(m.config)},
                     {"w_in", detail::matrix_rows(m.w_in)},
                     {"w_r", detail::matrix_rows(m.w_r)},
                     {"bias", detail::vector_array(m.bias)},
                     {"w_out", nullptr},
                     {"out_bias", nullptr}};
    if (m.readout) {
        j["w_out"] = detail::matrix_rows(m.readout->w_out);
        j["out_bias"] = detail::vector_array(m.readout->bias);
    }
    return j;
}

inline EsnModel esn_model_from_json(const nlohmann::json& j)
{
    if (j.value("version", "") != "esn-v1") throw Error("esn json: unsupported version");
    EsnModel m;
    m.config = esn_config_from_json(j.at("config"));
    const auto n = static_cast<Eigen::Index>(m.config.reservoir_size);
    const auto l = static_cast<Eigen::Index>(m.config.input_dim);
    const auto o = static_cast<Eigen::Index>(m.config.output_dim);
    m.w_in = detail::matrix_from_rows(j.at("w_in"), n, l);
    m.w_r = detail::matrix_from_rows(j.at("w_r"), n, n);
    m.bias = detail::vector_from_array(j.at("bias"), n);
    if (!j.at("w_out").is_null())
        m.readout = Readout{detail::matrix_from_rows(j.at("w_out"), o, n), detail::vector_from_array(j.at("out_bias"), o)};
    return m;
}

} // namespace resopt

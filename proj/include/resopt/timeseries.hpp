#pragma once

// Benchmark series: Mackey-Glass (Euler on the delay equation), multiple
// superimposed oscillators, Lorenz (RK4, y component) and NARMA-10.

#include "common.hpp"
#include "rng.hpp"

#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace resopt {

struct Series {
    std::vector<double> values;
    double step = 1.0; // time between consecutive samples

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

namespace detail {

inline void guard(double v, const char* what)
{
    if (!std::isfinite(v) || std::abs(v) > 1e6) throw Error(std::string(what) + ": unstable parameters");
}

} // namespace detail

struct MackeyGlassParams {
    double delta = 0.1;
    double a = 0.2;
    double damping = 0.1;
    double n = 10;
    double tau = 17;
    double history = 1.2;
    std::size_t warmup = 1000;
};

/// y(t+1) = y(t) + delta (a y(t-tau/delta) / (1 + y(t-tau/delta)^n) - damping y(t)),
/// constant history, first `warmup` iterates discarded.
inline Series mackey_glass(std::size_t length, const MackeyGlassParams& p = {})
{
    const double slots = p.tau / p.delta;
    const auto lag = static_cast<std::size_t>(std::llround(slots));
    if (lag == 0 || std::abs(slots - static_cast<double>(lag)) > 1e-9) throw Error("mackey_glass: tau/delta must be a positive integer");
    // Ring buffer of the last lag + 1 values; y(t - lag) sits at the write slot.
    std::vector<double> buf(lag + 1, p.history);
    std::size_t head = 0; // index of y(t)
    double y = p.history;
    Series out{{}, p.delta};
    out.values.reserve(length);
    for (std::size_t i = 0; i < p.warmup + length; ++i) {
        const double lagged = buf[(head + 1) % buf.size()];
        y = y + p.delta * (p.a * lagged / (1.0 + std::pow(lagged, p.n)) - p.damping * y);
        detail::guard(y, "mackey_glass");
        head = (head + 1) % buf.size();
        buf[head] = y;
        if (i >= p.warmup) out.values.push_back(y);
    }
    return out;
}

inline std::vector<double> mso_default_alphas() { return {0.2, 0.311, 0.42, 0.51, 0.63}; }

/// y(t) = sum_i sin(alpha_i t), t = 0, 1, ...
inline Series mso(std::size_t length, const std::vector<double>& alphas = mso_default_alphas())
{
    Series out{std::vector<double>(length, 0.0), 1.0};
    for (std::size_t t = 0; t < length; ++t)
        for (double a : alphas) out.values[t] += std::sin(a * static_cast<double>(t));
    return out;
}

struct LorenzParams {
    double a = 2.5;
    double b = 28;
    double c = 8.0 / 3.0;
    std::array<double, 3> init{1, 1, 1};
    double dt = 0.01;
    std::size_t transient = 1000;
};

using LorenzState = std::array<double, 3>;

inline LorenzState lorenz_derivative(const LorenzState& s, const LorenzParams& p)
{
    return {-p.a * s[0] + p.a * s[1], p.b * s[0] - s[1] - s[0] * s[2], s[0] * s[1] - p.c * s[2]};
}

inline LorenzState lorenz_rk4_step(const LorenzState& s, const LorenzParams& p, double dt)
{
    auto axpy = [](const LorenzState& x, double h, const LorenzState& k) {
        return LorenzState{x[0] + h * k[0], x[1] + h * k[1], x[2] + h * k[2]};
    };
    const LorenzState k1 = lorenz_derivative(s, p);
    const LorenzState k2 = lorenz_derivative(axpy(s, dt / 2, k1), p);
    const LorenzState k3 = lorenz_derivative(axpy(s, dt / 2, k2), p);
    const LorenzState k4 = lorenz_derivative(axpy(s, dt, k3), p);
    LorenzState out;
    for (int i = 0; i < 3; ++i) out[i] = s[i] + dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return out;
}

/// Full states after the transient; row 0 is the state after transient steps.
inline std::vector<LorenzState> lorenz_states(std::size_t length, const LorenzParams& p = {})
{
    if (length == 0) throw Error("lorenz: length must be positive");
    LorenzState s = p.init;
    for (std::size_t i = 0; i < p.transient; ++i) s = lorenz_rk4_step(s, p, p.dt);
    std::vector<LorenzState> out;
    out.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
        for (double v : s)
            if (!std::isfinite(v)) throw Error("lorenz: non-finite state");
        out.push_back(s);
        s = lorenz_rk4_step(s, p, p.dt);
    }
    return out;
}

inline Series lorenz(std::size_t length, const LorenzParams& p = {})
{
    Series out{{}, p.dt};
    for (const auto& s : lorenz_states(length, p)) out.values.push_back(s[1]);
    return out;
}

struct NarmaSeries {
    Series u;
    Series y;
};

/// NARMA-10 with u(t) ~ U[0, 0.5], y(1..10) = 0,
///   y(t+1) = 0.3 y(t) + 0.05 y(t) sum_{i=0..9} y(t-i) + 1.5 u(t-9) u(t) + 0.1.
/// Element k of each series holds time t = k + 1.
inline NarmaSeries narma(std::size_t length, std::uint64_t seed)
{
    if (length <= 10) throw Error("narma: length must exceed 10");
    Rng rng(seed);
    NarmaSeries s{{std::vector<double>(length), 1.0}, {std::vector<double>(length, 0.0), 1.0}};
    for (double& v : s.u.values) v = rng.uniform(0.0, 0.5);
    auto& u = s.u.values;
    auto& y = s.y.values;
    for (std::size_t k = 10; k < length; ++k) { // y at t = k + 1 from t = k
        double window = 0.0;
        for (std::size_t i = 0; i < 10; ++i) window += y[k - 1 - i];
        y[k] = 0.3 * y[k - 1] + 0.05 * y[k - 1] * window + 1.5 * u[k - 10] * u[k - 1] + 0.1;
        detail::guard(y[k], "narma");
    }
    return s;
}

/// Affine map sending min to -0.5 and max to 0.5.
inline Series normalize(const Series& s)
{
    if (s.values.empty()) throw Error("normalize: empty series");
    const auto [lo_it, hi_it] = std::minmax_element(s.values.begin(), s.values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) throw Error("normalize: constant series");
    if (lo == -0.5 && hi == 0.5) return s;
    Series out = s;
    for (double& v : out.values) v = (v - lo) / (hi - lo) - 0.5;
    return out;
}

inline std::pair<Series, Series> split(const Series& s, std::size_t train_len = 5000, std::size_t test_len = 5000)
{
    if (train_len == 0) throw Error("split: train_len must be at least 1");
    if (s.size() < train_len + test_len) throw Error("split: series shorter than train_len + test_len");
    Series train{{s.values.begin(), s.values.begin() + static_cast<std::ptrdiff_t>(train_len)}, s.step};
    Series test{{s.values.begin() + static_cast<std::ptrdiff_t>(train_len),
                 s.values.begin() + static_cast<std::ptrdiff_t>(train_len + test_len)},
                s.step};
    return {std::move(train), std::move(test)};
}

// ---------------------------------------------------------------------------
// CSV.

inline void write_series_csv(std::ostream& os, const Series& s)
{
    os << "value\n";
    for (double v : s.values) os << format_double(v) << '\n';
}

inline void write_narma_csv(std::ostream& os, const NarmaSeries& s)
{
    os << "u,y\n";
    for (std::size_t i = 0; i < s.u.size(); ++i) os << format_double(s.u[i]) << ',' << format_double(s.y[i]) << '\n';
}

inline Series read_series_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != "value") throw Error("series csv: expected header \"value\"");
    Series s;
    while (std::getline(is, line))
        if (!line.empty()) s.values.push_back(parse_double(line));
    return s;
}

} // namespace resopt

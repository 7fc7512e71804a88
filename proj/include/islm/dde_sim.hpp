#pragma once
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "linearization.hpp"
#include "model.hpp"

namespace islm {

/// Initial data on [−τ, 0] for the delayed system.
struct HistorySpec {
    enum class Kind { ConstantEquilibrium, ConstantOffset, Samples };

    Kind kind = Kind::ConstantEquilibrium;
    Vec4 offset{}; ///< (ΔY, Δr, ΔK, ΔM) for Kind::ConstantOffset
    std::vector<double> sample_times;  ///< ascending, must cover [−τ, 0]
    std::vector<Vec4> sample_states;

    static HistorySpec at_equilibrium() { return {}; }

    static HistorySpec constant_offset(double dY, double dr, double dK, double dM) {
        HistorySpec h;
        h.kind = Kind::ConstantOffset;
        h.offset = {dY, dr, dK, dM};
        return h;
    }

    static HistorySpec samples(std::vector<double> times, std::vector<Vec4> states) {
        HistorySpec h;
        h.kind = Kind::Samples;
        h.sample_times = std::move(times);
        h.sample_states = std::move(states);
        return h;
    }
};

/// Dense solution record on the uniform grid t_i = i·dt, i = 0..N.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec4> states;
    double dt = 0.0;
    double tau = 0.0;
};

/// Domain violation during integration; carries everything accepted before
/// the failing step.
class TrajectoryDomainError : public DomainError {
public:
    Trajectory partial;
    TrajectoryDomainError(const std::string& msg, Trajectory partial_traj)
        : DomainError(msg), partial(std::move(partial_traj)) {}
};

namespace detail {

inline bool finite4(const Vec4& x) {
    return std::isfinite(x[0]) && std::isfinite(x[1]) && std::isfinite(x[2]) &&
           std::isfinite(x[3]);
}

/// History value at t ≤ 0 (piecewise-linear for sample tables).
inline Vec4 history_value(const HistorySpec& h, const EquilibriumPoint& eq, double t) {
    const Vec4 base{eq.Y0, eq.r0, eq.K0, eq.M0};
    switch (h.kind) {
        case HistorySpec::Kind::ConstantEquilibrium:
            return base;
        case HistorySpec::Kind::ConstantOffset: {
            Vec4 x = base;
            for (int i = 0; i < 4; ++i) x[i] += h.offset[i];
            return x;
        }
        case HistorySpec::Kind::Samples: {
            const auto& ts = h.sample_times;
            const auto& xs = h.sample_states;
            if (t <= ts.front()) return xs.front();
            if (t >= ts.back()) return xs.back();
            const auto it = std::upper_bound(ts.begin(), ts.end(), t);
            const std::size_t k = static_cast<std::size_t>(it - ts.begin()) - 1;
            const double w = (t - ts[k]) / (ts[k + 1] - ts[k]);
            Vec4 x{};
            for (int i = 0; i < 4; ++i)
                x[i] = (1.0 - w) * xs[k][i] + w * xs[k + 1][i];
            return x;
        }
    }
    return base;
}

/// History slope at t ≤ 0 (zero for constant kinds, segment slope for tables).
inline Vec4 history_slope(const HistorySpec& h, double t) {
    Vec4 m{};
    if (h.kind != HistorySpec::Kind::Samples) return m;
    const auto& ts = h.sample_times;
    const auto& xs = h.sample_states;
    if (t <= ts.front() || t >= ts.back()) return m;
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - ts.begin()) - 1;
    for (int i = 0; i < 4; ++i)
        m[i] = (xs[k + 1][i] - xs[k][i]) / (ts[k + 1] - ts[k]);
    return m;
}

inline void validate_history(const HistorySpec& h, double tau) {
    if (h.kind != HistorySpec::Kind::Samples) return;
    if (h.sample_times.size() != h.sample_states.size() || h.sample_times.size() < 2)
        throw ParameterError("history table needs matching times/states with >= 2 rows");
    for (std::size_t i = 1; i < h.sample_times.size(); ++i)
        if (!(h.sample_times[i] > h.sample_times[i - 1]))
            throw ParameterError("history table times must be strictly increasing");
    if (h.sample_times.front() > -tau + 1e-12 || h.sample_times.back() < -1e-12)
        throw ParameterError("history table must cover [-tau, 0]");
    for (const Vec4& x : h.sample_states)
        if (!finite4(x)) throw ParameterError("history table contains non-finite values");
}

/// Generic method-of-steps RK4 driver. `rhs(x, Y_delayed)` supplies the
/// vector field; delayed values at half-steps come from cubic Hermite
/// interpolation using stored node derivatives.
template <typename Rhs>
Trajectory integrate_dde(const Rhs& rhs, const HistorySpec& history,
                         const EquilibriumPoint& eq, double tau, double t_end,
                         double dt) {
    if (!(tau > 0.0) || !(dt > 0.0) || !(t_end > 0.0))
        throw ParameterError("tau, dt and t_end must be positive");
    const double ratio = tau / dt;
    const auto n = static_cast<std::size_t>(std::llround(ratio));
    if (n == 0 || std::abs(static_cast<double>(n) - ratio) > 1e-9 * std::max(1.0, ratio))
        throw StepError("tau must be an integer multiple of dt");
    validate_history(history, tau);

    const auto N = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    // Node values/derivatives indexed by j + n for grid times j·dt, j ≥ −n.
    std::vector<Vec4> xs(n + N + 1), ms(n + N + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = (static_cast<double>(i) - static_cast<double>(n)) * dt;
        xs[i] = history_value(history, eq, t);
        ms[i] = history_slope(history, t);
        if (!finite4(xs[i]) || !(xs[i][0] > 0.0))
            throw ParameterError("history is not admissible");
    }

    Trajectory traj;
    traj.dt = dt;
    traj.tau = tau;
    traj.times.reserve(N + 1);
    traj.states.reserve(N + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(xs[n]);

    auto partial_error = [&](const std::string& msg) {
        return TrajectoryDomainError(msg, traj);
    };

    // Seed the t = 0 node derivative from the vector field so the first
    // segment interpolates the solution rather than the history extension.
    try {
        ms[n] = rhs(xs[n], xs[0][0]);
    } catch (const DomainError& e) {
        throw partial_error(std::string("domain violation at t = 0: ") + e.what());
    }

    for (std::size_t j = 0; j < N; ++j) {
        const std::size_t i = n + j; // node index of t_j
        const double t = static_cast<double>(j) * dt;
        // Delayed Y at t−τ, t−τ+dt and the value at t−τ+dt/2. Segments that
        // lie in t ≤ 0 evaluate the history directly (the solution has a
        // derivative kink at t = 0); later segments use cubic Hermite with
        // the stored node derivatives.
        const double yd0 = xs[i - n][0];
        const double yd1 = xs[i - n + 1][0];
        const double ydh =
            j < n ? detail::history_value(history, eq,
                                          (static_cast<double>(j) -
                                           static_cast<double>(n) + 0.5) *
                                              dt)[0]
                  : 0.5 * (yd0 + yd1) +
                        dt * (ms[i - n][0] - ms[i - n + 1][0]) / 8.0;
        Vec4 x1{}, k1{}, k2{}, k3{}, k4{};
        try {
            k1 = ms[i]; // rhs(xs[i], yd0), cached from the previous step
            for (int c = 0; c < 4; ++c) x1[c] = xs[i][c] + 0.5 * dt * k1[c];
            k2 = rhs(x1, ydh);
            for (int c = 0; c < 4; ++c) x1[c] = xs[i][c] + 0.5 * dt * k2[c];
            k3 = rhs(x1, ydh);
            for (int c = 0; c < 4; ++c) x1[c] = xs[i][c] + dt * k3[c];
            k4 = rhs(x1, yd1);
            for (int c = 0; c < 4; ++c)
                x1[c] = xs[i][c] + dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            if (!finite4(x1))
                throw DomainError("state became non-finite");
            xs[i + 1] = x1;
            ms[i + 1] = rhs(x1, yd1);
        } catch (const DomainError& e) {
            throw partial_error("domain violation near t = " + std::to_string(t + dt) +
                                ": " + e.what());
        }
        traj.times.push_back(static_cast<double>(j + 1) * dt);
        traj.states.push_back(x1);
    }
    return traj;
}

} // namespace detail

/// Integrates the full nonlinear system by the method of steps (classical
/// RK4, delayed values via cubic Hermite interpolation). Requires τ = n·dt.
inline Trajectory simulate(const ModelParams& p, double tau, const HistorySpec& history,
                           double t_end, double dt) {
    p.validate();
    const EquilibriumPoint eq = compute_equilibrium(p);
    auto rhs = [&p](const Vec4& x, double y_delayed) {
        return vector_field(p, x[0], x[1], x[2], x[3], y_delayed);
    };
    return detail::integrate_dde(rhs, history, eq, tau, t_end, dt);
}

/// Integrates the linearization ẋ = A x(t) + B x(t−τ) about the equilibrium
/// with the same stepper; states are reported as X₀ + x so trajectories are
/// directly comparable with simulate().
inline Trajectory simulate_linear(const ModelParams& p, double tau,
                                  const HistorySpec& history, double t_end, double dt) {
    p.validate();
    const EquilibriumPoint eq = compute_equilibrium(p);
    const TaylorCoeffs tc = taylor_coefficients(p, eq);
    const LinearPair lin = linearize(p, eq, tc);
    const Vec4 base{eq.Y0, eq.r0, eq.K0, eq.M0};
    auto rhs = [&lin, &base](const Vec4& x, double y_delayed) {
        Vec4 dx{};
        for (int i = 0; i < 4; ++i) {
            double s = lin.B[i][0] * (y_delayed - base[0]);
            for (int j = 0; j < 4; ++j) s += lin.A[i][j] * (x[j] - base[j]);
            dx[i] = s;
        }
        return dx;
    };
    return detail::integrate_dde(rhs, history, eq, tau, t_end, dt);
}

/// Envelope verdict for an oscillatory deviation signal.
enum class EnvelopeClass { Decaying, Growing, Sustained };

inline const char* to_string(EnvelopeClass c) {
    switch (c) {
        case EnvelopeClass::Decaying: return "decaying";
        case EnvelopeClass::Growing: return "growing";
        case EnvelopeClass::Sustained: return "sustained";
    }
    return "?";
}

struct EnvelopeResult {
    EnvelopeClass cls;
    double mean_ratio;   ///< geometric mean of successive peak ratios
    std::size_t n_peaks;
    double first_peak, last_peak;
};

/// Strict local maxima of |values| (interior points exceeding both
/// neighbours), returned as (time, height) pairs.
inline std::vector<std::pair<double, double>> envelope_peaks(
    const std::vector<double>& times, const std::vector<double>& values) {
    std::vector<std::pair<double, double>> peaks;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        const double a = std::abs(values[i]);
        if (a > std::abs(values[i - 1]) && a > std::abs(values[i + 1]))
            peaks.emplace_back(times[i], a);
    }
    return peaks;
}

/// Classifies oscillation amplitude growth from the geometric mean of
/// successive |peak| ratios: decaying below 1−tol, growing above 1+tol,
/// sustained otherwise. Needs at least six extrema.
inline EnvelopeResult classify_envelope(const std::vector<double>& times,
                                        const std::vector<double>& values,
                                        double tol = 0.02) {
    const auto peaks = envelope_peaks(times, values);
    if (peaks.size() < 6)
        throw InsufficientDataError("need at least 6 envelope extrema, found " +
                                    std::to_string(peaks.size()));
    double log_sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 1; i < peaks.size(); ++i) {
        if (peaks[i - 1].second <= 0.0 || peaks[i].second <= 0.0) continue;
        log_sum += std::log(peaks[i].second / peaks[i - 1].second);
        ++count;
    }
    if (count == 0)
        throw InsufficientDataError("envelope peaks are degenerate");
    EnvelopeResult r{};
    r.mean_ratio = std::exp(log_sum / static_cast<double>(count));
    r.n_peaks = peaks.size();
    r.first_peak = peaks.front().second;
    r.last_peak = peaks.back().second;
    r.cls = r.mean_ratio < 1.0 - tol   ? EnvelopeClass::Decaying
            : r.mean_ratio > 1.0 + tol ? EnvelopeClass::Growing
                                       : EnvelopeClass::Sustained;
    return r;
}

/// Mean spacing of upward zero crossings (sign change − → + with linear
/// interpolation of the crossing time). Needs at least four crossings.
inline double estimate_period(const std::vector<double>& times,
                              const std::vector<double>& values) {
    std::vector<double> crossings;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i - 1] < 0.0 && values[i] >= 0.0) {
            const double w = values[i - 1] / (values[i - 1] - values[i]);
            crossings.push_back(times[i - 1] + w * (times[i] - times[i - 1]));
        }
    }
    if (crossings.size() < 4)
        throw InsufficientDataError("need at least 4 upward zero crossings, found " +
                                    std::to_string(crossings.size()));
    return (crossings.back() - crossings.front()) /
           static_cast<double>(crossings.size() - 1);
}

/// Deviation of one state component from its equilibrium value.
inline std::vector<double> component_deviation(const Trajectory& traj,
                                               const EquilibriumPoint& eq,
                                               int component) {
    const Vec4 base{eq.Y0, eq.r0, eq.K0, eq.M0};
    std::vector<double> dev(traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i)
        dev[i] = traj.states[i][component] - base[component];
    return dev;
}

inline EnvelopeResult classify_envelope(const Trajectory& traj,
                                        const EquilibriumPoint& eq, int component = 0,
                                        double tol = 0.02) {
    return classify_envelope(traj.times, component_deviation(traj, eq, component), tol);
}

inline double estimate_period(const Trajectory& traj, const EquilibriumPoint& eq,
                              int component = 0) {
    return estimate_period(traj.times, component_deviation(traj, eq, component));
}

} // namespace islm

#pragma once
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "model.hpp"
#include "normal_form.hpp"

namespace islm {

/// Solution of the reduced equation on the center manifold,
///   ż = λ₁ z + g₂₀ z²/2 + g₁₁ z z̄ + g₀₂ z̄²/2 + g₂₁ z² z̄ / 2.
struct ReducedTrajectory {
    std::vector<double> times;
    std::vector<Cplx> z;
    double dt = 0.0;
};

/// Integrates the reduced equation with classical RK4 from z(0) = z0.
/// Throws OverflowError once |z| exceeds 1e6.
inline ReducedTrajectory integrate_reduced(Cplx lambda1, Cplx g20, Cplx g11, Cplx g02,
                                           Cplx g21, Cplx z0, double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw ParameterError("t_end and dt must be positive");
    auto rhs = [&](Cplx z) {
        const Cplx zb = std::conj(z);
        return lambda1 * z + 0.5 * g20 * z * z + g11 * z * zb + 0.5 * g02 * zb * zb +
               0.5 * g21 * z * z * zb;
    };
    const auto N = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    ReducedTrajectory rt;
    rt.dt = dt;
    rt.times.reserve(N + 1);
    rt.z.reserve(N + 1);
    Cplx z = z0;
    rt.times.push_back(0.0);
    rt.z.push_back(z);
    for (std::size_t i = 0; i < N; ++i) {
        const Cplx k1 = rhs(z);
        const Cplx k2 = rhs(z + 0.5 * dt * k1);
        const Cplx k3 = rhs(z + 0.5 * dt * k2);
        const Cplx k4 = rhs(z + dt * k3);
        z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!(std::abs(z) <= 1e6))
            throw OverflowError("reduced solution exceeded |z| = 1e6 at t = " +
                                std::to_string(rt.times.back() + dt));
        rt.times.push_back(static_cast<double>(i + 1) * dt);
        rt.z.push_back(z);
    }
    return rt;
}

/// State waveform recovered from a reduced solution, with the investment and
/// liquidity observables evaluated along it.
struct Waveform {
    std::vector<double> times;
    std::vector<Vec4> states;
    std::vector<double> investment;
    std::vector<double> liquidity;
    double max_imag_residue = 0.0; ///< max |Im X| before discarding, absolute
};

/// Second-order reconstruction at θ = 0:
///   X(t) = X₀ + 2 Re(z v) + Re(w₂₀(0) z²) + w₁₁(0) |z|²
/// (the z̄² term is the conjugate of the z² term, so the sum is real up to
/// rounding; the discarded imaginary part is reported).
inline Waveform reconstruct(const ReducedTrajectory& rt, const ModelParams& p,
                            const EquilibriumPoint& eq, const CenterManifold& cm) {
    const Vec4 base{eq.Y0, eq.r0, eq.K0, eq.M0};
    const CVec4 w20_0 = cm.w20(0.0);
    const CVec4 w11_0 = cm.w11(0.0);
    Waveform w;
    w.times = rt.times;
    w.states.resize(rt.z.size());
    w.investment.resize(rt.z.size());
    w.liquidity.resize(rt.z.size());
    for (std::size_t i = 0; i < rt.z.size(); ++i) {
        const Cplx z = rt.z[i];
        const Cplx zb = std::conj(z);
        Vec4 x{};
        for (int c = 0; c < 4; ++c) {
            const Cplx val = z * cm.v[c] + zb * std::conj(cm.v[c]) +
                             0.5 * w20_0[c] * z * z + w11_0[c] * z * zb +
                             0.5 * std::conj(w20_0[c]) * zb * zb;
            w.max_imag_residue = std::max(w.max_imag_residue, std::abs(val.imag()));
            x[c] = base[c] + val.real();
        }
        w.states[i] = x;
        w.investment[i] = investment(p, x[0], x[1]);
        w.liquidity[i] = liquidity(p, x[0], x[1]);
    }
    return w;
}

} // namespace islm

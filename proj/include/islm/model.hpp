#pragma once
#include <array>
#include <cmath>

#include "errors.hpp"
#include "params.hpp"

namespace islm {

using Vec4 = std::array<double, 4>;

/// Steady state (Y₀, r₀, K₀, M₀) of the model.
struct EquilibriumPoint {
    double Y0; ///< equilibrium income, g/d
    double r0; ///< equilibrium interest rate
    double K0; ///< equilibrium capital stock
    double M0; ///< equilibrium money supply
};

/// Taylor data of the two nonlinearities at the equilibrium, plus the four
/// structural linear entries a₁, b₁, a₄, b₄.
///
/// rho_ij is the coefficient scaling x₁^i x₂^j in the expansion of the
/// investment function Y^{α₁} r^{−α₂} (without the leading factor a);
/// gamma_k are the derivatives of 1/(r−r₂) scaled so that
/// γ₀/(r−r₂) expands as γ₀(γ₁x₂ + γ₂x₂²/2 + γ₃x₂³/6 + ...).
struct TaylorCoeffs {
    double rho10, rho01;
    double rho20, rho11, rho02;
    double rho30, rho21, rho12, rho03;
    double gamma1, gamma2, gamma3;
    double a1; ///< (s−1)d(1−ε) − s + a·ρ₁₀
    double b1; ///< (s−1)dε
    double a4; ///< −d(1−ε)
    double b4; ///< −dε
};

/// Closed-form equilibrium. Throws ParameterError when the implied rate does
/// not clear the liquidity pole (r₀ ≤ r₂) or an intermediate is non-finite.
inline EquilibriumPoint compute_equilibrium(const ModelParams& p) {
    p.validate();
    const double Y0 = p.g / p.d;
    // Income balance forces I₀ = s(1−d)Y₀, hence r₀^{−α₂} = s(1−d)Y₀^{1−α₁}/a.
    const double r0 =
        std::pow(p.s * (1.0 - p.d) / p.a * std::pow(Y0, 1.0 - p.alpha1), -1.0 / p.alpha2);
    const double K0 = p.s * (1.0 - p.d) * Y0 / p.delta;
    if (!std::isfinite(Y0) || !std::isfinite(r0) || !std::isfinite(K0))
        throw ParameterError("equilibrium is not finite for these parameters");
    if (!(r0 > p.r2))
        throw ParameterError("equilibrium rate r0 does not exceed the floor r2");
    const double M0 = p.m * Y0 + p.gamma0 / (r0 - p.r2);
    return {Y0, r0, K0, M0};
}

/// Taylor coefficients of the nonlinearities at the equilibrium.
inline TaylorCoeffs taylor_coefficients(const ModelParams& p, const EquilibriumPoint& eq) {
    const double Y0 = eq.Y0, r0 = eq.r0;
    const double a1e = p.alpha1, a2e = p.alpha2;
    auto ypow = [&](double k) { return std::pow(Y0, a1e - k); };
    auto rpow = [&](double k) { return std::pow(r0, -(a2e + k)); };
    TaylorCoeffs t{};
    t.rho10 = a1e * ypow(1) * rpow(0);
    t.rho01 = -a2e * ypow(0) * rpow(1);
    t.rho20 = a1e * (a1e - 1.0) * ypow(2) * rpow(0);
    t.rho11 = -a1e * a2e * ypow(1) * rpow(1);
    t.rho02 = a2e * (a2e + 1.0) * ypow(0) * rpow(2);
    t.rho30 = a1e * (a1e - 1.0) * (a1e - 2.0) * ypow(3) * rpow(0);
    t.rho21 = -a1e * a2e * (a1e - 1.0) * ypow(2) * rpow(1);
    t.rho12 = a1e * a2e * (a2e + 1.0) * ypow(1) * rpow(2);
    t.rho03 = -a2e * (a2e + 1.0) * (a2e + 2.0) * ypow(0) * rpow(3);
    const double u = r0 - p.r2;
    t.gamma1 = -1.0 / (u * u);
    t.gamma2 = 2.0 / (u * u * u);
    t.gamma3 = -6.0 / (u * u * u * u);
    t.a1 = (p.s - 1.0) * p.d * (1.0 - p.epsilon) - p.s + p.a * t.rho10;
    t.b1 = (p.s - 1.0) * p.d * p.epsilon;
    t.a4 = -p.d * (1.0 - p.epsilon);
    t.b4 = -p.d * p.epsilon;
    return t;
}

/// Full nonlinear right-hand side at state levels (Y, r, K, M) with the
/// delayed income level Y(t−τ). Throws DomainError off the admissible region.
inline Vec4 vector_field(const ModelParams& p, double Y, double r, double K, double M,
                         double delayed_Y) {
    if (!(r > p.r2)) throw DomainError("rate at or below the liquidity floor");
    if (!(Y > 0.0) || !(delayed_Y > 0.0)) throw DomainError("non-positive income");
    const double I = p.a * std::pow(Y, p.alpha1) * std::pow(r, -p.alpha2);
    const double I_tau = p.a * std::pow(delayed_Y, p.alpha1) * std::pow(r, -p.alpha2);
    const double dY = p.alpha * (((p.s - 1.0) * (1.0 - p.epsilon) * p.d - p.s) * Y +
                                 p.d * p.epsilon * (p.s - 1.0) * delayed_Y + I + p.g);
    const double dr = p.beta * (p.m * Y + p.gamma0 / (r - p.r2) - M);
    const double dK = I_tau - p.delta * K;
    const double dM = p.g - p.d * (1.0 - p.epsilon) * Y - p.d * p.epsilon * delayed_Y;
    return {dY, dr, dK, dM};
}

/// Investment observable I(Y, r) = a Y^{α₁} r^{−α₂}.
inline double investment(const ModelParams& p, double Y, double r) {
    return p.a * std::pow(Y, p.alpha1) * std::pow(r, -p.alpha2);
}

/// Liquidity observable L(Y, r) = mY + γ₀/(r−r₂).
inline double liquidity(const ModelParams& p, double Y, double r) {
    return p.m * Y + p.gamma0 / (r - p.r2);
}

} // namespace islm

#pragma once
#include <complex>

#include "linalg.hpp"
#include "model.hpp"

namespace islm {

/// Linearization ẋ(t) = A x(t) + B x(t−τ) + F(x, x_τ) about the equilibrium.
/// B is nonzero only in column 1 (rows 1, 3, 4).
struct LinearPair {
    Mat4 A;
    Mat4 B;
};

/// Coefficients of the characteristic quasi-polynomial
///   Δ(λ, τ) = P(λ) + e^{−λτ} Q(λ),
/// with P(λ) = λ³ + p₂λ² + p₁λ + p₀ and Q(λ) = q₂λ² + q₁λ + q₀
/// (the always-stable factor (λ+δ) removed analytically).
struct CharCoeffs {
    double p2, p1, p0;
    double q2, q1, q0;
};

/// Builds the matrices A and B entry by entry.
inline LinearPair linearize(const ModelParams& p, const EquilibriumPoint&,
                            const TaylorCoeffs& t) {
    Mat4 A{}, B{};
    A[0][0] = p.alpha * t.a1;
    A[0][1] = p.a * p.alpha * t.rho01;
    A[1][0] = p.beta * p.m;
    A[1][1] = p.beta * p.gamma0 * t.gamma1;
    A[1][3] = -p.beta;
    A[2][1] = p.a * t.rho01;
    A[2][2] = -p.delta;
    A[3][0] = t.a4;
    B[0][0] = p.alpha * t.b1;
    B[2][0] = p.a * t.rho10;
    B[3][0] = t.b4;
    return {A, B};
}

/// Characteristic coefficients in the canonical closed forms:
///   p₂ = −(αa₁ + βγ₀γ₁)            q₂ = −αb₁
///   p₁ = αβ(γ₀a₁γ₁ + maρ₀₁)        q₁ = αβγ₀b₁γ₁
///   p₀ = αaβa₄ρ₀₁                  q₀ = αβb₄ρ₀₁
inline CharCoeffs characteristic_coeffs(const ModelParams& p, const TaylorCoeffs& t) {
    CharCoeffs c{};
    c.p2 = -(p.alpha * t.a1 + p.beta * p.gamma0 * t.gamma1);
    c.p1 = p.alpha * p.beta * (p.gamma0 * t.a1 * t.gamma1 + p.m * p.a * t.rho01);
    c.p0 = p.alpha * p.a * p.beta * t.a4 * t.rho01;
    c.q2 = -p.alpha * t.b1;
    c.q1 = p.alpha * p.beta * p.gamma0 * t.b1 * t.gamma1;
    c.q0 = p.alpha * p.beta * t.b4 * t.rho01;
    return c;
}

/// Determinant-consistent variant: expanding det(λI − A − Be^{−λτ}) and
/// removing the (λ+δ) factor yields the canonical forms except that the
/// mixed p₁ term enters with opposite sign and q₀ carries an extra factor a:
///   p₁ = αβ(γ₀a₁γ₁ − maρ₀₁),  q₀ = αaβb₄ρ₀₁.
/// The canonical forms above deviate from this identity; both variants are
/// exposed so the discrepancy is measurable rather than hidden.
inline CharCoeffs characteristic_coeffs_det(const ModelParams& p, const TaylorCoeffs& t) {
    CharCoeffs c = characteristic_coeffs(p, t);
    c.p1 = p.alpha * p.beta * (p.gamma0 * t.a1 * t.gamma1 - p.m * p.a * t.rho01);
    c.q0 = p.alpha * p.a * p.beta * t.b4 * t.rho01;
    return c;
}

inline Cplx eval_P(const CharCoeffs& c, Cplx lambda) {
    return ((lambda + c.p2) * lambda + c.p1) * lambda + c.p0;
}

inline Cplx eval_Q(const CharCoeffs& c, Cplx lambda) {
    return (c.q2 * lambda + c.q1) * lambda + c.q0;
}

/// Δ(λ, τ) = P(λ) + e^{−λτ} Q(λ).
inline Cplx delta_eval(const CharCoeffs& c, Cplx lambda, double tau) {
    return eval_P(c, lambda) + std::exp(-lambda * tau) * eval_Q(c, lambda);
}

/// ∂Δ/∂λ at fixed τ.
inline Cplx delta_dlambda(const CharCoeffs& c, Cplx lambda, double tau) {
    const Cplx Q = eval_Q(c, lambda);
    return (3.0 * lambda + 2.0 * c.p2) * lambda + c.p1 +
           std::exp(-lambda * tau) * (2.0 * c.q2 * lambda + c.q1 - tau * Q);
}

/// det(λI − A − B e^{−λτ}), the full 4×4 characteristic function
/// (equals (λ+δ)·Δ(λ,τ) for the determinant-consistent coefficients).
inline Cplx char_det(const LinearPair& lin, Cplx lambda, double tau) {
    const Cplx E = std::exp(-lambda * tau);
    CMat4 M{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            M[i][j] = (i == j ? lambda : Cplx{0.0}) - lin.A[i][j] - E * lin.B[i][j];
    return det4(M);
}

} // namespace islm

#pragma once
#include <cmath>
#include <complex>
#include <string>

#include "linearization.hpp"
#include "stability.hpp"

namespace islm {

/// Eigenvector pair of the characteristic pencil at a Hopf candidate
/// λ₁ = iω₀: Φ(θ) = v e^{λ₁θ} (right) and Ψ(s) = w e^{λ₁s} (adjoint), with
/// w scaled so that ⟨Ψ, Φ⟩ = 1 under the delay bilinear form.
struct EigenData {
    CVec4 v;          ///< right eigenvector, v₁ = 1
    CVec4 w;          ///< adjoint eigenvector, w₃ = 0, normalized
    Cplx eta;         ///< normalization scalar applied to the raw adjoint row
    Cplx lambda1;     ///< iω₀
    Cplx lambda2;     ///< −iω₀
    double res_v;     ///< ‖(A + Be^{−λ₁τ₀} − λ₁I)v‖
    double res_w;     ///< ‖w̄ᵀ(A + Be^{−λ₁τ₀} − λ₁I)‖·|η| (raw row defect)
    Cplx pair_unit;   ///< ⟨Ψ, Φ⟩ after normalization (≈ 1)
    Cplx pair_cross;  ///< ⟨Ψ, Φ̄⟩ after normalization (≈ 0 at a true root)
};

/// Closed-form center-manifold quadratic data evaluable at any θ ∈ [−τ₀, 0]:
///   w₂₀(θ) = −(g₂₀/λ₁) v e^{λ₁θ} − (ḡ₀₂/3λ₁) v̄ e^{λ₂θ} + E₁ e^{2λ₁θ}
///   w₁₁(θ) =  (g₁₁/λ₁) v e^{λ₁θ} − (ḡ₁₁/λ₁)  v̄ e^{λ₂θ} + E₂
struct CenterManifold {
    Cplx lambda1;
    CVec4 v;
    Cplx g20, g11, g02;
    CVec4 E1, E2;

    CVec4 w20(double theta) const {
        const Cplx e1 = std::exp(lambda1 * theta);
        const Cplx e2 = std::exp(-lambda1 * theta);
        const Cplx e3 = std::exp(2.0 * lambda1 * theta);
        CVec4 out{};
        for (int i = 0; i < 4; ++i)
            out[i] = -g20 / lambda1 * v[i] * e1 -
                     std::conj(g02) / (3.0 * lambda1) * std::conj(v[i]) * e2 +
                     E1[i] * e3;
        return out;
    }

    CVec4 w11(double theta) const {
        const Cplx e1 = std::exp(lambda1 * theta);
        const Cplx e2 = std::exp(-lambda1 * theta);
        CVec4 out{};
        for (int i = 0; i < 4; ++i)
            out[i] = g11 / lambda1 * v[i] * e1 -
                     std::conj(g11) / lambda1 * std::conj(v[i]) * e2 + E2[i];
        return out;
    }
};

/// Direction/stability/period verdict decoded from the signs of μ₂, β₂, T₂.
struct Verdict {
    std::string direction; ///< supercritical / subcritical / degenerate
    std::string orbit;     ///< orbitally stable / orbitally unstable / degenerate
    std::string period;    ///< increasing / decreasing / degenerate
};

inline Verdict verdict_from_signs(double mu2, double beta2, double T2) {
    Verdict v{};
    v.direction = mu2 > 0.0   ? "supercritical"
                  : mu2 < 0.0 ? "subcritical"
                              : "degenerate";
    v.orbit = beta2 < 0.0   ? "orbitally stable"
              : beta2 > 0.0 ? "orbitally unstable"
                            : "degenerate";
    v.period = T2 > 0.0   ? "increasing"
               : T2 < 0.0 ? "decreasing"
                          : "degenerate";
    return v;
}

/// Scalar outputs of the normal-form computation.
struct HopfQuantities {
    Cplx C1;      ///< first Lyapunov-type coefficient C₁(0)
    double mu2;   ///< −Re C₁(0) / Re λ′(τ₀)
    double beta2; ///< 2 Re C₁(0)
    double T2;    ///< −(Im C₁(0) + μ₂ Im λ′(τ₀)) / ω₀
    Verdict verdict;
};

/// C₁(0) = (i/2ω₀)(g₂₀g₁₁ − 2|g₁₁|² − |g₀₂|²/3) + g₂₁/2 and the derived
/// direction/stability/period quantities. Throws DegenerateError when the
/// crossing is non-transversal (|Re λ′| < 1e-14).
inline HopfQuantities hopf_quantities(Cplx g20, Cplx g11, Cplx g02, Cplx g21,
                                      double omega0, Cplx lambda_prime) {
    HopfQuantities h{};
    h.C1 = Cplx(0.0, 1.0) / (2.0 * omega0) *
               (g20 * g11 - 2.0 * std::norm(g11) - std::norm(g02) / 3.0) +
           g21 / 2.0;
    if (std::abs(lambda_prime.real()) < 1e-14)
        throw DegenerateError("non-transversal crossing: Re lambda'(tau0) ~ 0");
    h.mu2 = -h.C1.real() / lambda_prime.real();
    h.beta2 = 2.0 * h.C1.real();
    h.T2 = -(h.C1.imag() + h.mu2 * lambda_prime.imag()) / omega0;
    h.verdict = verdict_from_signs(h.mu2, h.beta2, h.T2);
    return h;
}

namespace detail {

/// Named scalars recovered from the structured entries of (A, B).
struct PencilScalars {
    double beta, beta_g0g1, m;
    double alpha_a_rho01, a_rho01, a_rho10;
    double delta, a4, b4;
};

inline PencilScalars pencil_scalars(const Mat4& A, const Mat4& B) {
    PencilScalars s{};
    s.beta = -A[1][3];
    s.beta_g0g1 = A[1][1];
    s.m = A[1][0] / s.beta;
    s.alpha_a_rho01 = A[0][1];
    s.a_rho01 = A[2][1];
    s.a_rho10 = B[2][0];
    s.delta = -A[2][2];
    s.a4 = A[3][0];
    s.b4 = B[3][0];
    return s;
}

} // namespace detail

/// Right eigenvector v (v₁ = 1) of A + Be^{−λ₁τ₀} at λ₁, from the closed
/// forms; rows 2–4 of the pencil determine v₂, v₄, v₃ in turn.
inline CVec4 right_eigenvector(Cplx lambda1, const Mat4& A, const Mat4& B, double tau0) {
    const auto s = detail::pencil_scalars(A, B);
    const Cplx E = std::exp(-lambda1 * tau0);
    const Cplx den2 = lambda1 * (lambda1 - s.beta_g0g1);
    if (std::abs(den2) < 1e-12 || std::abs(lambda1 + s.delta) < 1e-12)
        throw DegenerateError("vanishing denominator in the eigenvector closed form");
    CVec4 v{};
    v[0] = 1.0;
    v[1] = -s.beta * (s.a4 + s.b4 * E - s.m * lambda1) / den2;
    v[3] = (s.a4 + s.b4 * E) / lambda1;
    v[2] = (s.a_rho10 * E + s.a_rho01 * v[1]) / (lambda1 + s.delta);
    return v;
}

/// Delay bilinear form ⟨Ψ, Φ⟩ for Ψ(s) = w e^{λ_w s}, Φ(θ) = v e^{λ_v θ}:
///   w̄ᵀv + w̄ᵀBv · e^{λ̄_w τ₀} (1 − e^{−(λ̄_w+λ_v)τ₀}) / (λ̄_w+λ_v),
/// with the resonant limit τ₀ e^{λ̄_w τ₀} w̄ᵀBv when λ̄_w + λ_v → 0.
inline Cplx bilinear_form(const CVec4& w, const CVec4& v, Cplx lambda_w, Cplx lambda_v,
                          const Mat4& B, double tau0) {
    Cplx head = 0.0, wBv = 0.0;
    for (int i = 0; i < 4; ++i) {
        head += std::conj(w[i]) * v[i];
        Cplx Bv = 0.0;
        for (int j = 0; j < 4; ++j) Bv += B[i][j] * v[j];
        wBv += std::conj(w[i]) * Bv;
    }
    const Cplx mu = std::conj(lambda_w) + lambda_v;
    const Cplx lead = std::exp(std::conj(lambda_w) * tau0);
    if (std::abs(mu) < 1e-12) return head + tau0 * lead * wBv;
    return head + wBv * lead * (1.0 - std::exp(-mu * tau0)) / mu;
}

/// Adjoint eigenvector w (w₃ = 0) with the closed-form row vector scaled by
/// η so that ⟨Ψ, Φ⟩ = 1; a final renormalization absorbs rounding so the
/// identity holds to machine precision.
inline std::pair<CVec4, Cplx> left_eigenvector(Cplx lambda2, const Mat4& A, const Mat4& B,
                                               double tau0, const CVec4& v) {
    const auto s = detail::pencil_scalars(A, B);
    const Cplx lambda1 = std::conj(lambda2);
    if (std::abs(s.alpha_a_rho01) < 1e-300 || std::abs(lambda1) < 1e-12)
        throw DegenerateError("vanishing denominator in the adjoint closed form");
    // Raw adjoint row u with u₂ = 1: u M = 0 for M = A + Be^{−λ₁τ₀} − λ₁I.
    CVec4 u{};
    u[0] = (lambda1 - s.beta_g0g1) / s.alpha_a_rho01;
    u[1] = 1.0;
    u[2] = 0.0;
    u[3] = -s.beta / lambda1;
    // w̄ = u/η with η the unnormalized pairing; then polish the normalization.
    CVec4 w{};
    for (int i = 0; i < 4; ++i) w[i] = std::conj(u[i]);
    const Cplx eta0 = std::conj(bilinear_form(w, v, lambda1, lambda1, B, tau0));
    for (int i = 0; i < 4; ++i) w[i] /= eta0;
    const Cplx pair = bilinear_form(w, v, lambda1, lambda1, B, tau0);
    for (int i = 0; i < 4; ++i) w[i] /= std::conj(pair);
    return {w, eta0 * std::conj(pair)};
}

/// Quadratic normal-form coefficients and the forcing vectors for the
/// center-manifold solves.
struct QuadraticCoeffs {
    Cplx g20, g11, g02;
    CVec4 F20, F11;
};

/// Assembles F₂₀, F₁₁ componentwise from the second-order Taylor data and
/// projects with w̄. Component 1 carries the current-argument investment
/// nonlinearity, component 2 the liquidity curvature, component 3 the
/// delayed-argument investment nonlinearity; every delayed occurrence of the
/// first coordinate contributes an e^{∓λ₁τ₀} phase per z / z̄.
inline QuadraticCoeffs quadratic_coefficients(const CVec4& v, const CVec4& w,
                                              const TaylorCoeffs& t, const ModelParams& p,
                                              double tau0, Cplx lambda1) {
    const Cplx E = std::exp(-lambda1 * tau0);
    const Cplx Ebar = std::conj(E);
    const Cplx v2 = v[1], v2b = std::conj(v[1]);
    QuadraticCoeffs q{};
    const Cplx F20_1 = p.alpha * p.a * (t.rho20 + 2.0 * t.rho11 * v2 + t.rho02 * v2 * v2);
    const Cplx F11_1 =
        p.alpha * p.a * (t.rho20 + t.rho11 * (v2 + v2b) + t.rho02 * v2 * v2b);
    const Cplx F20_2 = p.beta * p.gamma0 * t.gamma2 * v2 * v2;
    const Cplx F11_2 = p.beta * p.gamma0 * t.gamma2 * v2 * v2b;
    const Cplx F20_3 = p.a * (t.rho20 * E * E + 2.0 * t.rho11 * E * v2 + t.rho02 * v2 * v2);
    const Cplx F11_3 =
        p.a * (t.rho20 + t.rho11 * (E * v2b + Ebar * v2) + t.rho02 * v2 * v2b);
    q.F20 = {F20_1, F20_2, F20_3, 0.0};
    q.F11 = {F11_1, F11_2, F11_3, 0.0};
    const Cplx w1b = std::conj(w[0]), w2b = std::conj(w[1]);
    q.g20 = F20_1 * w1b + F20_2 * w2b;
    q.g11 = F11_1 * w1b + F11_2 * w2b;
    q.g02 = std::conj(F20_1) * w1b + std::conj(F20_2) * w2b; // F₀₂ = conj(F₂₀)
    return q;
}

/// Result of the two center-manifold linear solves.
struct CenterSolves {
    CVec4 E1, E2;
    double E1_residual, E2_residual;
    double E1_cond, E2_cond;
};

/// E₁ = −(A + Be^{−kλ₁τ₀} − 2λ₁I)⁻¹ F₂₀ and E₂ = −(A + B)⁻¹ F₁₁.
/// The delay exponent uses k = 2 (characteristic matrix evaluated at 2λ₁);
/// `alt_exponent` selects the k = 1 variant for diagnostics. Throws
/// SingularSystemError when a pivot-ratio condition estimate exceeds 1e12.
inline CenterSolves center_manifold_solves(const CVec4& F20, const CVec4& F11,
                                           const Mat4& A, const Mat4& B, Cplx lambda1,
                                           double tau0, bool alt_exponent = false) {
    const double k = alt_exponent ? 1.0 : 2.0;
    const Cplx Ek = std::exp(-k * lambda1 * tau0);
    CMat4 M1 = to_complex(A), M2 = to_complex(A);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            M1[i][j] += Ek * B[i][j];
            M2[i][j] += B[i][j];
        }
        M1[i][i] -= 2.0 * lambda1;
    }
    CVec4 rhs1{}, rhs2{};
    for (int i = 0; i < 4; ++i) {
        rhs1[i] = -F20[i];
        rhs2[i] = -F11[i];
    }
    const SolveResult s1 = solve4(M1, rhs1);
    const SolveResult s2 = solve4(M2, rhs2);
    if (s1.cond > 1e12 || s2.cond > 1e12)
        throw SingularSystemError("center-manifold solve is numerically singular");
    CenterSolves out{};
    out.E1 = s1.x;
    out.E2 = s2.x;
    out.E1_cond = s1.cond;
    out.E2_cond = s2.cond;
    CVec4 r1 = mat_vec(M1, s1.x), r2 = mat_vec(M2, s2.x);
    for (int i = 0; i < 4; ++i) {
        r1[i] += F20[i];
        r2[i] += F11[i];
    }
    out.E1_residual = norm(r1);
    out.E2_residual = norm(r2);
    return out;
}

/// Cubic coefficient g₂₁ from the third-order Taylor data and the
/// center-manifold vectors at θ = 0. Only components 1 and 2 of the forcing
/// enter (w₃ = 0 and the fourth equation is linear).
inline Cplx cubic_coefficient(const CVec4& w20_0, const CVec4& w11_0, const CVec4& v,
                              const CVec4& w, const TaylorCoeffs& t, const ModelParams& p,
                              double /*tau0*/, Cplx /*lambda1*/) {
    const Cplx v2 = v[1], v2b = std::conj(v[1]);
    const Cplx w20_1 = w20_0[0], w20_2 = w20_0[1];
    const Cplx w11_1 = w11_0[0], w11_2 = w11_0[1];
    const Cplx F21_1 =
        p.alpha * p.a *
        (t.rho20 * (2.0 * w11_1 + w20_1) +
         t.rho11 * (2.0 * w11_2 + w20_2 + 2.0 * w11_1 * v2 + w20_1 * v2b) +
         t.rho02 * (2.0 * w11_2 * v2 + w20_2 * v2b) +
         (t.rho30 + t.rho21 * (2.0 * v2 + v2b) + t.rho12 * (v2 * v2 + 2.0 * v2 * v2b) +
          t.rho03 * v2 * v2 * v2b));
    const Cplx F21_2 = p.beta * p.gamma0 *
                       (t.gamma2 * (2.0 * w11_2 * v2 + w20_2 * v2b) +
                        t.gamma3 * v2 * v2 * v2b);
    return F21_1 * std::conj(w[0]) + F21_2 * std::conj(w[1]);
}

/// Complete normal-form output at one Hopf candidate.
struct NormalFormData {
    EigenData eig;
    QuadraticCoeffs quad;
    CenterSolves solves;
    CenterManifold cm;
    CVec4 w20_0, w11_0;
    Cplx g21;
    Cplx lambda_prime;
    HopfQuantities main; ///< standard delay exponent e^{−2λ₁τ₀} in the E₁ solve
    HopfQuantities alt;  ///< diagnostic variant with exponent e^{−λ₁τ₀}
    double alt_E1_residual;
};

/// Runs the full normal-form chain at (ω₀, τ₀) for the given linearization.
inline NormalFormData compute_normal_form(const ModelParams& p, const TaylorCoeffs& t,
                                          const LinearPair& lin, double omega0,
                                          double tau0, Cplx lambda_prime) {
    NormalFormData nf{};
    const Cplx lambda1(0.0, omega0);
    nf.lambda_prime = lambda_prime;
    nf.eig.lambda1 = lambda1;
    nf.eig.lambda2 = std::conj(lambda1);
    nf.eig.v = right_eigenvector(lambda1, lin.A, lin.B, tau0);
    auto [w, eta] = left_eigenvector(nf.eig.lambda2, lin.A, lin.B, tau0, nf.eig.v);
    nf.eig.w = w;
    nf.eig.eta = eta;

    // Pencil residuals and pairing diagnostics.
    const Cplx E = std::exp(-lambda1 * tau0);
    CMat4 M{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            M[i][j] = lin.A[i][j] + E * lin.B[i][j] - (i == j ? lambda1 : Cplx{0.0});
    nf.eig.res_v = norm(mat_vec(M, nf.eig.v));
    CVec4 row{};
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) row[j] += std::conj(w[i]) * M[i][j];
    nf.eig.res_w = norm(row) * std::abs(eta);
    nf.eig.pair_unit = bilinear_form(w, nf.eig.v, lambda1, lambda1, lin.B, tau0);
    CVec4 vbar{};
    for (int i = 0; i < 4; ++i) vbar[i] = std::conj(nf.eig.v[i]);
    nf.eig.pair_cross = bilinear_form(w, vbar, lambda1, nf.eig.lambda2, lin.B, tau0);

    nf.quad = quadratic_coefficients(nf.eig.v, w, t, p, tau0, lambda1);
    nf.solves = center_manifold_solves(nf.quad.F20, nf.quad.F11, lin.A, lin.B, lambda1,
                                       tau0, /*alt_exponent=*/false);
    nf.cm = {lambda1, nf.eig.v, nf.quad.g20, nf.quad.g11, nf.quad.g02, nf.solves.E1,
             nf.solves.E2};
    nf.w20_0 = nf.cm.w20(0.0);
    nf.w11_0 = nf.cm.w11(0.0);
    nf.g21 = cubic_coefficient(nf.w20_0, nf.w11_0, nf.eig.v, w, t, p, tau0, lambda1);
    nf.main = hopf_quantities(nf.quad.g20, nf.quad.g11, nf.quad.g02, nf.g21, omega0,
                              lambda_prime);

    // Diagnostic pass with the alternate E₁ delay exponent.
    const CenterSolves alt = center_manifold_solves(nf.quad.F20, nf.quad.F11, lin.A,
                                                    lin.B, lambda1, tau0,
                                                    /*alt_exponent=*/true);
    const CenterManifold cm_alt{lambda1, nf.eig.v, nf.quad.g20, nf.quad.g11, nf.quad.g02,
                                alt.E1, alt.E2};
    const CVec4 w20a = cm_alt.w20(0.0), w11a = cm_alt.w11(0.0);
    const Cplx g21a =
        cubic_coefficient(w20a, w11a, nf.eig.v, w, t, p, tau0, lambda1);
    nf.alt = hopf_quantities(nf.quad.g20, nf.quad.g11, nf.quad.g02, g21a, omega0,
                             lambda_prime);
    nf.alt_E1_residual = alt.E1_residual;
    return nf;
}

} // namespace islm

#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "islm/islm.hpp"

namespace testsup {

inline std::string data_dir() {
#ifdef ISLM_DATA_DIR
    return ISLM_DATA_DIR;
#else
    return "data";
#endif
}

inline double rel_err(double x, double ref) {
    return std::abs(x - ref) / std::max(1e-300, std::abs(ref));
}

inline double rel_err(islm::Cplx x, islm::Cplx ref) {
    return std::abs(x - ref) / std::max(1e-300, std::abs(ref));
}

/// Baseline calibration with a chosen delayed tax share.
inline islm::ModelParams params_eps(double epsilon) {
    islm::ModelParams p{};
    p.a = 0.38;
    p.alpha = 0.96;
    p.beta = 1.0;
    p.alpha1 = 0.5;
    p.alpha2 = 0.83;
    p.gamma0 = 1.0;
    p.r2 = 0.003;
    p.m = 0.005;
    p.d = 0.1;
    p.s = 0.3;
    p.epsilon = epsilon;
    p.delta = 0.2;
    p.g = 50.0;
    return p;
}

// ---------------------------------------------------------------------------
// Truncated bivariate series in (z, z̄) up to total degree 3. Used to derive
// the g-coefficients by generic polynomial composition, independently of the
// hand-derived closed forms in the library.
// ---------------------------------------------------------------------------
struct Poly33 {
    std::array<std::array<islm::Cplx, 4>, 4> c{};

    islm::Cplx& at(int j, int k) { return c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]; }
    islm::Cplx at(int j, int k) const { return c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]; }

    friend Poly33 operator+(const Poly33& a, const Poly33& b) {
        Poly33 r;
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k + j < 4; ++k) r.at(j, k) = a.at(j, k) + b.at(j, k);
        return r;
    }

    friend Poly33 operator*(const Poly33& a, const Poly33& b) {
        Poly33 r;
        for (int j1 = 0; j1 < 4; ++j1)
            for (int k1 = 0; k1 + j1 < 4; ++k1)
                for (int j2 = 0; j2 + j1 < 4; ++j2)
                    for (int k2 = 0; j1 + k1 + j2 + k2 < 4; ++k2)
                        r.at(j1 + j2, k1 + k2) += a.at(j1, k1) * b.at(j2, k2);
        return r;
    }

    friend Poly33 operator*(islm::Cplx s, const Poly33& a) {
        Poly33 r;
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k + j < 4; ++k) r.at(j, k) = s * a.at(j, k);
        return r;
    }
};

/// Series of one state coordinate on the center manifold:
/// x = c_z z + conj(c_z) z̄ + (w20/2) z² + w11 z z̄ + (conj(w20)/2) z̄².
inline Poly33 coordinate_series(islm::Cplx c_z, islm::Cplx w20c, islm::Cplx w11c) {
    Poly33 s;
    s.at(1, 0) = c_z;
    s.at(0, 1) = std::conj(c_z);
    s.at(2, 0) = 0.5 * w20c;
    s.at(1, 1) = w11c;
    s.at(0, 2) = 0.5 * std::conj(w20c);
    return s;
}

/// ρ-nonlinearity beyond linear order, composed as a generic polynomial:
/// ρ20/2 u² + ρ11 u v + ρ02/2 v² + ρ30/6 u³ + ρ21/2 u²v + ρ12/2 uv² + ρ03/6 v³.
inline Poly33 rho_series(const islm::TaylorCoeffs& t, const Poly33& u, const Poly33& v) {
    using islm::Cplx;
    return Cplx(t.rho20 / 2.0) * (u * u) + Cplx(t.rho11) * (u * v) +
           Cplx(t.rho02 / 2.0) * (v * v) + Cplx(t.rho30 / 6.0) * (u * u * u) +
           Cplx(t.rho21 / 2.0) * (u * u * v) + Cplx(t.rho12 / 2.0) * (u * v * v) +
           Cplx(t.rho03 / 6.0) * (v * v * v);
}

/// γ-nonlinearity beyond linear order: γ2/2 v² + γ3/6 v³.
inline Poly33 gamma_series(const islm::TaylorCoeffs& t, const Poly33& v) {
    using islm::Cplx;
    return Cplx(t.gamma2 / 2.0) * (v * v) + Cplx(t.gamma3 / 6.0) * (v * v * v);
}

struct SeriesG {
    islm::Cplx g20, g11, g02, g21;
};

/// Independent derivation of g₂₀, g₁₁, g₀₂, g₂₁: build the coordinate series
/// on the center manifold, push them through the nonlinearities by truncated
/// polynomial arithmetic, project with w̄ and read off the coefficients.
inline SeriesG series_g_oracle(const islm::ModelParams& p, const islm::TaylorCoeffs& t,
                               const islm::NormalFormData& nf, double tau0) {
    using islm::Cplx;
    const Cplx E = std::exp(-nf.eig.lambda1 * tau0);
    const islm::CVec4 w20_tau = nf.cm.w20(-tau0);
    const islm::CVec4 w11_tau = nf.cm.w11(-tau0);
    const Poly33 x1c = coordinate_series(nf.eig.v[0], nf.w20_0[0], nf.w11_0[0]);
    const Poly33 x2c = coordinate_series(nf.eig.v[1], nf.w20_0[1], nf.w11_0[1]);
    const Poly33 x1d = coordinate_series(nf.eig.v[0] * E, w20_tau[0], w11_tau[0]);
    const Poly33 F1 = Cplx(p.alpha * p.a) * rho_series(t, x1c, x2c);
    const Poly33 F2 = Cplx(p.beta * p.gamma0) * gamma_series(t, x2c);
    const Poly33 F3 = Cplx(p.a) * rho_series(t, x1d, x2c);
    const Poly33 G = std::conj(nf.eig.w[0]) * F1 + std::conj(nf.eig.w[1]) * F2 +
                     std::conj(nf.eig.w[2]) * F3;
    SeriesG g{};
    g.g20 = 2.0 * G.at(2, 0);
    g.g11 = G.at(1, 1);
    g.g02 = 2.0 * G.at(0, 2);
    g.g21 = 2.0 * G.at(2, 1);
    return g;
}

// ---------------------------------------------------------------------------
// Finite-difference helpers.
// ---------------------------------------------------------------------------

/// Central-difference Jacobian of the vector field with respect to the
/// current state at (x, y_delayed).
inline islm::Mat4 fd_state_jacobian(const islm::ModelParams& p, const islm::Vec4& x,
                                    double y_delayed, double h = 1e-6) {
    islm::Mat4 J{};
    for (int j = 0; j < 4; ++j) {
        islm::Vec4 xp = x, xm = x;
        const double hj = h * (1.0 + std::abs(x[j]));
        xp[j] += hj;
        xm[j] -= hj;
        const islm::Vec4 fp = islm::vector_field(p, xp[0], xp[1], xp[2], xp[3], y_delayed);
        const islm::Vec4 fm = islm::vector_field(p, xm[0], xm[1], xm[2], xm[3], y_delayed);
        for (int i = 0; i < 4; ++i) J[i][j] = (fp[i] - fm[i]) / (2.0 * hj);
    }
    return J;
}

/// Central-difference derivative of the vector field with respect to the
/// delayed income.
inline islm::Vec4 fd_delayed_column(const islm::ModelParams& p, const islm::Vec4& x,
                                    double y_delayed, double h = 1e-6) {
    const double hd = h * (1.0 + std::abs(y_delayed));
    const islm::Vec4 fp = islm::vector_field(p, x[0], x[1], x[2], x[3], y_delayed + hd);
    const islm::Vec4 fm = islm::vector_field(p, x[0], x[1], x[2], x[3], y_delayed - hd);
    islm::Vec4 col{};
    for (int i = 0; i < 4; ++i) col[i] = (fp[i] - fm[i]) / (2.0 * hd);
    return col;
}

// ---------------------------------------------------------------------------
// Random Hopf-bearing parameter sets (deterministic seed). The crossing pair
// is found on the determinant-consistent coefficients so that (iω₀, τ₀) is a
// genuine root of the matrix pencil.
// ---------------------------------------------------------------------------
struct HopfSet {
    islm::ModelParams p;
    islm::EquilibriumPoint eq;
    islm::TaylorCoeffs t;
    islm::LinearPair lin;
    islm::CharCoeffs c;
    double omega0 = 0.0;
    double tau0 = 0.0;
    islm::Cplx lambda_prime;
};

inline std::vector<HopfSet> random_hopf_sets(std::size_t need = 50,
                                             unsigned seed = 20250814u) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> jitter(0.8, 1.2);
    std::uniform_real_distribution<double> eps_draw(0.5, 0.95);
    const islm::ModelParams base = params_eps(0.8);
    std::vector<HopfSet> sets;
    for (int attempt = 0; attempt < 5000 && sets.size() < need; ++attempt) {
        islm::ModelParams q = base;
        q.a = base.a * jitter(rng);
        q.alpha = base.alpha * jitter(rng);
        q.beta = base.beta * jitter(rng);
        q.alpha1 = base.alpha1 * jitter(rng);
        q.alpha2 = base.alpha2 * jitter(rng);
        q.gamma0 = base.gamma0 * jitter(rng);
        q.r2 = base.r2 * jitter(rng);
        q.m = base.m * jitter(rng);
        q.d = base.d * jitter(rng);
        q.s = base.s * jitter(rng);
        q.delta = base.delta * jitter(rng);
        q.g = base.g * jitter(rng);
        q.epsilon = eps_draw(rng);
        try {
            q.validate();
            HopfSet h{};
            h.p = q;
            h.eq = islm::compute_equilibrium(q);
            h.t = islm::taylor_coefficients(q, h.eq);
            h.lin = islm::linearize(q, h.eq, h.t);
            h.c = islm::characteristic_coeffs_det(q, h.t);
            const islm::FrequencyAnalysis freq = islm::analyze_frequency(h.c, q.epsilon);
            bool found = false;
            for (double w : freq.roots) {
                try {
                    const double tau0 = islm::critical_delay(w, h.c);
                    const islm::Cplx lp = islm::transversality(w, tau0, h.c);
                    if (std::abs(lp.real()) < 1e-10) continue;
                    if (!found || tau0 < h.tau0) {
                        h.omega0 = w;
                        h.tau0 = tau0;
                        h.lambda_prime = lp;
                        found = true;
                    }
                } catch (const islm::Error&) {
                }
            }
            if (found) sets.push_back(h);
        } catch (const islm::Error&) {
        }
    }
    return sets;
}

} // namespace testsup

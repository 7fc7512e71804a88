#pragma once
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "linearization.hpp"

namespace islm {

inline constexpr double pi = 3.14159265358979323846;

enum class HurwitzVerdict { stable, unstable, marginal };

/// Routh–Hurwitz data for the delay-free cubic P(λ) + Q(λ).
/// All three conditions are checked (h1, h2, h3 > 0); h1 and h2 are the two
/// commonly quoted ones, h3 completes the necessary set for a cubic.
struct HurwitzResult {
    double h1; ///< p₂+q₂
    double h2; ///< (p₁+q₁)(p₂+q₂) − (p₀+q₀)
    double h3; ///< p₀+q₀
    HurwitzVerdict verdict;
};

inline HurwitzResult hurwitz_zero_delay(const CharCoeffs& c) {
    HurwitzResult h{};
    h.h1 = c.p2 + c.q2;
    h.h3 = c.p0 + c.q0;
    h.h2 = (c.p1 + c.q1) * h.h1 - h.h3;
    const double tol = 1e-12;
    if (std::abs(h.h1) <= tol || std::abs(h.h2) <= tol || std::abs(h.h3) <= tol)
        h.verdict = HurwitzVerdict::marginal;
    else if (h.h1 > 0.0 && h.h2 > 0.0 && h.h3 > 0.0)
        h.verdict = HurwitzVerdict::stable;
    else
        h.verdict = HurwitzVerdict::unstable;
    return h;
}

/// Analysis of the frequency equation f(ω) = ω⁶ + a_F ω⁴ + b_F ω² + c_F,
/// a cubic in u = ω².
struct FrequencyAnalysis {
    double aF, bF, cF;
    double k;  ///< −a_F/3, the depressed-cubic shift
    double fD; ///< discriminant of the depressed cubic: (f(k)/2)² + (f'(k)/3)³
    std::vector<double> roots; ///< positive ω roots, ascending
    std::string case_label;    ///< root-count case, or "unlisted" off the table
    bool degenerate;           ///< f_D at the case-split boundary (≈0)
};

namespace detail {

/// Real roots of u³ + a u² + b u + c via Cardano plus a two-step Newton
/// polish per root (the closed form is branch-fragile near equal roots).
inline std::vector<double> cubic_real_roots(double a, double b, double c) {
    const double k = -a / 3.0;
    const double fk = ((k + a) * k + b) * k + c;   // value at the shift
    const double fpk = (3.0 * k + 2.0 * a) * k + b; // derivative at the shift
    const double disc = (fk / 2.0) * (fk / 2.0) + std::pow(fpk / 3.0, 3);
    std::vector<double> ys;
    if (disc > 0.0) {
        const double s = std::sqrt(disc);
        ys.push_back(std::cbrt(-fk / 2.0 + s) + std::cbrt(-fk / 2.0 - s));
    } else {
        const double r = std::sqrt(std::max(0.0, -fpk / 3.0));
        if (r == 0.0) {
            ys.push_back(0.0); // triple root of the depressed cubic
        } else {
            double arg = -fk / (2.0 * r * r * r);
            arg = std::clamp(arg, -1.0, 1.0);
            const double th = std::acos(arg);
            for (int j = 0; j < 3; ++j)
                ys.push_back(2.0 * r * std::cos((th - 2.0 * pi * j) / 3.0));
        }
    }
    std::vector<double> us;
    for (double y : ys) {
        double u = y + k;
        for (int it = 0; it < 2; ++it) { // Newton polish
            const double f = ((u + a) * u + b) * u + c;
            const double fp = (3.0 * u + 2.0 * a) * u + b;
            if (fp != 0.0) u -= f / fp;
        }
        us.push_back(u);
    }
    std::sort(us.begin(), us.end());
    return us;
}

inline std::string frequency_case_label(double eps, double aF, double bF, double fD) {
    if (eps > 0.5) {
        if (aF >= 0.0 || bF <= 0.0) return "1(i)";
        if (aF < 0.0 && bF > 0.0 && fD <= 0.0) return "1(ii)";
        return "unlisted";
    }
    if (eps < 0.5) {
        if (aF < 0.0 && bF < 0.0 && fD <= 0.0) return "2";
        return "unlisted";
    }
    if (aF < 0.0 && bF == 0.0) return "3(i)";
    if (aF < 0.0 && bF > 0.0) return "3(ii)";
    if (bF < 0.0) return "3(iii)";
    return "unlisted";
}

} // namespace detail

/// Positive roots of the frequency equation with the root-count case label.
/// Throws DegenerateError when c_F vanishes (ω = 0 sits on the curve).
inline FrequencyAnalysis analyze_frequency(const CharCoeffs& c, double epsilon) {
    FrequencyAnalysis fa{};
    fa.aF = c.p2 * c.p2 - c.q2 * c.q2 - 2.0 * c.p1;
    fa.bF = 2.0 * c.q0 * c.q2 - 2.0 * c.p0 * c.p2 - c.q1 * c.q1 + c.p1 * c.p1;
    fa.cF = c.p0 * c.p0 - c.q0 * c.q0;
    if (std::abs(fa.cF) < 1e-14)
        throw DegenerateError("frequency equation has a root at omega = 0");
    fa.k = -fa.aF / 3.0;
    const double fk = ((fa.k + fa.aF) * fa.k + fa.bF) * fa.k + fa.cF;
    const double fpk = (3.0 * fa.k + 2.0 * fa.aF) * fa.k + fa.bF;
    fa.fD = (fk / 2.0) * (fk / 2.0) + std::pow(fpk / 3.0, 3);
    const double fD_scale = 1.0 + (fk / 2.0) * (fk / 2.0) + std::pow(std::abs(fpk) / 3.0, 3);
    fa.degenerate = std::abs(fa.fD) <= 1e-12 * fD_scale;
    const double scale = std::max(1.0, std::abs(fa.cF));
    for (double u : detail::cubic_real_roots(fa.aF, fa.bF, fa.cF)) {
        if (u <= 0.0) continue;
        const double w = std::sqrt(u);
        const double w2 = w * w;
        const double f = ((w2 + fa.aF) * w2 + fa.bF) * w2 + fa.cF;
        if (std::abs(f) < 1e-9 * scale) fa.roots.push_back(w);
    }
    std::sort(fa.roots.begin(), fa.roots.end());
    fa.case_label = detail::frequency_case_label(epsilon, fa.aF, fa.bF, fa.fD);
    return fa;
}

/// Smallest τ > 0 with Δ(iω₀, τ) = 0 (residual < 1e-9): the arctangent value
/// corrected by multiples of π/ω₀ until both real and imaginary parts of the
/// characteristic equation are satisfied. Throws BranchError when no
/// candidate in (0, 3π/ω₀] passes the residual bound.
inline double critical_delay(double omega0, const CharCoeffs& c) {
    const double w = omega0;
    const double w2 = w * w, w4 = w2 * w2;
    const double N = w * (w4 * c.q2 - w2 * (c.q0 - c.q1 * c.p2 + c.q2 * c.p1) +
                          c.q0 * c.p1 - c.p0 * c.q1);
    const double D = w4 * (c.q1 - c.q2 * c.p2) +
                     w2 * (c.q0 * c.p2 - c.q1 * c.p1 + c.p0 * c.q2) - c.p0 * c.q0;
    const double base = std::atan2(N, D);
    const double tau_max = 3.0 * pi / w;
    double best = -1.0;
    for (int j = -4; j <= 8; ++j) {
        const double tau = (base + j * pi) / w;
        if (tau <= 1e-12 || tau > tau_max + 1e-12) continue;
        if (std::abs(delta_eval(c, Cplx(0.0, w), tau)) < 1e-9)
            if (best < 0.0 || tau < best) best = tau;
    }
    if (best < 0.0)
        throw BranchError("no delay in (0, 3pi/omega0] satisfies the crossing residual");
    return best;
}

/// Closed-form root derivative λ′(τ) = λ Q(λ) e^{−λτ} / D(λ, τ) at the
/// crossing; D is ∂Δ/∂λ. Throws DegenerateError on a (near-)vanishing
/// denominator, which signals a non-transversal crossing.
inline Cplx transversality(double omega0, double tau0, const CharCoeffs& c) {
    const Cplx lambda(0.0, omega0);
    const Cplx den = delta_dlambda(c, lambda, tau0);
    if (std::abs(den) < 1e-12)
        throw DegenerateError("non-transversal crossing: vanishing denominator");
    return lambda * eval_Q(c, lambda) * std::exp(-lambda * tau0) / den;
}

/// Newton iteration on Δ(λ, τ) = 0 from the given seed; converged when
/// |Δ| < 1e-12. Throws NoConvergenceError after 100 iterations.
inline Cplx rightmost_root(const CharCoeffs& c, double tau, Cplx seed) {
    Cplx lambda = seed;
    for (int it = 0; it < 100; ++it) {
        const Cplx f = delta_eval(c, lambda, tau);
        if (std::abs(f) < 1e-12) return lambda;
        const Cplx fp = delta_dlambda(c, lambda, tau);
        if (std::abs(fp) == 0.0) break;
        lambda -= f / fp;
    }
    if (std::abs(delta_eval(c, lambda, tau)) < 1e-12) return lambda;
    throw NoConvergenceError("root iteration did not converge in 100 steps");
}

/// Continuation helper: tracks the root from (tau_from, seed) to tau_to in
/// small steps, re-seeding Newton with the previous root.
inline Cplx continue_root(const CharCoeffs& c, double tau_from, double tau_to, Cplx seed,
                          int steps = 20) {
    Cplx lambda = seed;
    for (int i = 1; i <= steps; ++i) {
        const double tau = tau_from + (tau_to - tau_from) * i / steps;
        lambda = rightmost_root(c, tau, lambda);
    }
    return lambda;
}

/// A detected stability switch.
struct HopfPoint {
    double omega0;
    double tau0;
    Cplx lambda_prime;    ///< λ′(τ₀) from the closed form
    int switch_direction; ///< sign of Re λ′(τ₀)
};

/// Composite linear-stability report for one parameter set.
struct StabilityReport {
    HurwitzResult hurwitz;
    FrequencyAnalysis freq;
    std::vector<HopfPoint> hopf_points; ///< ascending in τ₀
    bool single_switch; ///< delay-free stable and at least one crossing found
    std::string note;
};

/// Runs the full delay-stability chain on the canonical coefficients.
inline StabilityReport stability_report(const ModelParams& p) {
    const EquilibriumPoint eq = compute_equilibrium(p);
    const TaylorCoeffs t = taylor_coefficients(p, eq);
    const CharCoeffs c = characteristic_coeffs(p, t);
    StabilityReport rep{};
    rep.hurwitz = hurwitz_zero_delay(c);
    rep.freq = analyze_frequency(c, p.epsilon);
    for (double w : rep.freq.roots) {
        try {
            const double tau0 = critical_delay(w, c);
            const Cplx lp = transversality(w, tau0, c);
            const int dir = (lp.real() > 0.0) - (lp.real() < 0.0);
            rep.hopf_points.push_back({w, tau0, lp, dir});
        } catch (const Error&) {
            // A root without a resolvable crossing or with a non-transversal
            // crossing is skipped; the remaining roots still report.
        }
    }
    std::sort(rep.hopf_points.begin(), rep.hopf_points.end(),
              [](const HopfPoint& a, const HopfPoint& b) { return a.tau0 < b.tau0; });
    if (rep.hopf_points.empty()) {
        rep.single_switch = false;
        rep.note = "no stability switch";
    } else if (rep.hurwitz.verdict == HurwitzVerdict::stable) {
        rep.single_switch = true;
        rep.note = "one stability switch at the smallest critical delay";
    } else {
        rep.single_switch = false;
        rep.note = "crossings exist but the delay-free system is not stable";
    }
    return rep;
}

} // namespace islm

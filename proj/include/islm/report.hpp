#pragma once
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dde_sim.hpp"
#include "normal_form.hpp"
#include "waveform.hpp"

namespace islm {

/// 17-significant-digit decimal form; round-trips to the same double.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

/// 10-significant-digit rounded form for side-by-side comparison.
inline std::string fmt10(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

inline std::string fmt17(Cplx z) {
    const double im = z.imag();
    return fmt17(z.real()) + (im < 0.0 ? " - " : " + ") + fmt17(std::abs(im)) + "i";
}

inline std::string fmt10(Cplx z) {
    const double im = z.imag();
    return fmt10(z.real()) + (im < 0.0 ? " - " : " + ") + fmt10(std::abs(im)) + "i";
}

inline const char* to_string(HurwitzVerdict v) {
    switch (v) {
        case HurwitzVerdict::stable: return "stable";
        case HurwitzVerdict::unstable: return "unstable";
        case HurwitzVerdict::marginal: return "marginal";
    }
    return "?";
}

/// Everything the analysis chain produces for one parameter set.
struct AnalysisResult {
    ModelParams params;
    EquilibriumPoint eq;
    TaylorCoeffs taylor;
    LinearPair lin;
    CharCoeffs coeffs;     ///< canonical coefficient set
    CharCoeffs coeffs_det; ///< determinant-consistent variant
    StabilityReport stab;  ///< Hurwitz + frequency + crossings (canonical)
    std::vector<HopfPoint> hopf_det; ///< crossings of the variant coefficients
    bool has_hopf = false;
    bool nf_ok = false;
    std::string nf_error;
    NormalFormData nf; ///< normal form at the smallest critical delay
};

/// Runs the full chain: equilibrium → linearization → stability → normal
/// form at the smallest critical delay (when one exists).
inline AnalysisResult analyze(const ModelParams& p) {
    AnalysisResult r{};
    r.params = p;
    p.validate();
    r.eq = compute_equilibrium(p);
    r.taylor = taylor_coefficients(p, r.eq);
    r.lin = linearize(p, r.eq, r.taylor);
    r.coeffs = characteristic_coeffs(p, r.taylor);
    r.coeffs_det = characteristic_coeffs_det(p, r.taylor);
    r.stab = stability_report(p);
    try {
        const FrequencyAnalysis fd = analyze_frequency(r.coeffs_det, p.epsilon);
        for (double w : fd.roots) {
            try {
                const double tau0 = critical_delay(w, r.coeffs_det);
                const Cplx lp = transversality(w, tau0, r.coeffs_det);
                const int dir = (lp.real() > 0.0) - (lp.real() < 0.0);
                r.hopf_det.push_back({w, tau0, lp, dir});
            } catch (const Error&) {
            }
        }
        std::sort(r.hopf_det.begin(), r.hopf_det.end(),
                  [](const HopfPoint& a, const HopfPoint& b) { return a.tau0 < b.tau0; });
    } catch (const Error&) {
    }
    if (!r.stab.hopf_points.empty()) {
        r.has_hopf = true;
        const HopfPoint& h = r.stab.hopf_points.front();
        try {
            r.nf = compute_normal_form(p, r.taylor, r.lin, h.omega0, h.tau0,
                                       h.lambda_prime);
            r.nf_ok = true;
        } catch (const Error& e) {
            r.nf_error = e.what();
        }
    }
    return r;
}

namespace detail {

inline void kv(std::ostream& os, const std::string& key, double v) {
    os << key << " = " << fmt17(v) << "\n";
}

inline void kv(std::ostream& os, const std::string& key, Cplx v) {
    kv(os, key + "_re", v.real());
    kv(os, key + "_im", v.imag());
}

inline void kv(std::ostream& os, const std::string& key, const std::string& v) {
    os << key << " = " << v << "\n";
}

inline void line2(std::ostream& os, const std::string& name, double v) {
    os << "  " << name << " = " << fmt17(v) << "  [" << fmt10(v) << "]\n";
}

inline void line2(std::ostream& os, const std::string& name, Cplx v) {
    os << "  " << name << " = " << fmt17(v) << "  [" << fmt10(v) << "]\n";
}

} // namespace detail

/// Flat key=value rendering of an AnalysisResult; every double printed with
/// 17 significant digits so re-parsing recovers it exactly.
inline std::string render_machine_report(const AnalysisResult& r) {
    std::ostringstream os;
    using detail::kv;
    for (auto key : detail::param_keys) kv(os, std::string("params.") + std::string(key),
                                           get_param(r.params, key));
    kv(os, "eq.Y0", r.eq.Y0);
    kv(os, "eq.r0", r.eq.r0);
    kv(os, "eq.K0", r.eq.K0);
    kv(os, "eq.M0", r.eq.M0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            std::ostringstream key;
            key << "A." << i << j;
            kv(os, key.str(), r.lin.A[i][j]);
        }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            std::ostringstream key;
            key << "B." << i << j;
            kv(os, key.str(), r.lin.B[i][j]);
        }
    kv(os, "coeffs.p2", r.coeffs.p2);
    kv(os, "coeffs.p1", r.coeffs.p1);
    kv(os, "coeffs.p0", r.coeffs.p0);
    kv(os, "coeffs.q2", r.coeffs.q2);
    kv(os, "coeffs.q1", r.coeffs.q1);
    kv(os, "coeffs.q0", r.coeffs.q0);
    kv(os, "coeffs_det.p2", r.coeffs_det.p2);
    kv(os, "coeffs_det.p1", r.coeffs_det.p1);
    kv(os, "coeffs_det.p0", r.coeffs_det.p0);
    kv(os, "coeffs_det.q2", r.coeffs_det.q2);
    kv(os, "coeffs_det.q1", r.coeffs_det.q1);
    kv(os, "coeffs_det.q0", r.coeffs_det.q0);
    kv(os, "hurwitz.h1", r.stab.hurwitz.h1);
    kv(os, "hurwitz.h2", r.stab.hurwitz.h2);
    kv(os, "hurwitz.h3", r.stab.hurwitz.h3);
    kv(os, "hurwitz.verdict", std::string(to_string(r.stab.hurwitz.verdict)));
    kv(os, "freq.aF", r.stab.freq.aF);
    kv(os, "freq.bF", r.stab.freq.bF);
    kv(os, "freq.cF", r.stab.freq.cF);
    kv(os, "freq.k", r.stab.freq.k);
    kv(os, "freq.fD", r.stab.freq.fD);
    kv(os, "freq.case", r.stab.freq.case_label);
    kv(os, "freq.n_roots", static_cast<double>(r.stab.freq.roots.size()));
    for (std::size_t i = 0; i < r.stab.freq.roots.size(); ++i)
        kv(os, "freq.root." + std::to_string(i), r.stab.freq.roots[i]);
    kv(os, "hopf.count", static_cast<double>(r.stab.hopf_points.size()));
    for (std::size_t i = 0; i < r.stab.hopf_points.size(); ++i) {
        const std::string pre = "hopf." + std::to_string(i) + ".";
        kv(os, pre + "omega0", r.stab.hopf_points[i].omega0);
        kv(os, pre + "tau0", r.stab.hopf_points[i].tau0);
        kv(os, pre + "lambda_prime", r.stab.hopf_points[i].lambda_prime);
    }
    kv(os, "hopf_det.count", static_cast<double>(r.hopf_det.size()));
    for (std::size_t i = 0; i < r.hopf_det.size(); ++i) {
        const std::string pre = "hopf_det." + std::to_string(i) + ".";
        kv(os, pre + "omega0", r.hopf_det[i].omega0);
        kv(os, pre + "tau0", r.hopf_det[i].tau0);
        kv(os, pre + "lambda_prime", r.hopf_det[i].lambda_prime);
    }
    kv(os, "nf.ok", std::string(r.nf_ok ? "1" : "0"));
    if (r.nf_ok) {
        kv(os, "nf.omega0", r.nf.eig.lambda1.imag());
        for (int i = 0; i < 4; ++i) kv(os, "nf.v." + std::to_string(i), r.nf.eig.v[i]);
        for (int i = 0; i < 4; ++i) kv(os, "nf.w." + std::to_string(i), r.nf.eig.w[i]);
        kv(os, "nf.eta", r.nf.eig.eta);
        kv(os, "nf.res_v", r.nf.eig.res_v);
        kv(os, "nf.pair_unit", r.nf.eig.pair_unit);
        kv(os, "nf.pair_cross", r.nf.eig.pair_cross);
        kv(os, "nf.g20", r.nf.quad.g20);
        kv(os, "nf.g11", r.nf.quad.g11);
        kv(os, "nf.g02", r.nf.quad.g02);
        kv(os, "nf.g21", r.nf.g21);
        kv(os, "nf.E1_residual", r.nf.solves.E1_residual);
        kv(os, "nf.E2_residual", r.nf.solves.E2_residual);
        kv(os, "nf.C1", r.nf.main.C1);
        kv(os, "nf.mu2", r.nf.main.mu2);
        kv(os, "nf.beta2", r.nf.main.beta2);
        kv(os, "nf.T2", r.nf.main.T2);
        kv(os, "nf.direction", r.nf.main.verdict.direction);
        kv(os, "nf.orbit", r.nf.main.verdict.orbit);
        kv(os, "nf.period", r.nf.main.verdict.period);
        kv(os, "nf.alt.C1", r.nf.alt.C1);
        kv(os, "nf.alt.mu2", r.nf.alt.mu2);
        kv(os, "nf.alt.beta2", r.nf.alt.beta2);
        kv(os, "nf.alt.T2", r.nf.alt.T2);
        kv(os, "nf.alt.E1_residual", r.nf.alt_E1_residual);
    }
    kv(os, "note", r.stab.note);
    return os.str();
}

/// Parses a flat key=value report back into a string map.
inline std::map<std::string, std::string> parse_machine_report(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto pos = line.find(" = ");
        if (pos == std::string::npos) continue;
        out[line.substr(0, pos)] = line.substr(pos + 3);
    }
    return out;
}

inline double machine_value(const std::map<std::string, std::string>& kvs,
                            const std::string& key) {
    const auto it = kvs.find(key);
    if (it == kvs.end()) throw IoError("missing key in machine report: " + key);
    return detail::parse_double(it->second, key);
}

/// Human-readable analysis report: every headline value is printed at full
/// precision with a 10-digit rounding alongside.
inline std::string render_report(const AnalysisResult& r) {
    std::ostringstream os;
    using detail::line2;
    os << "IS-LM model with capital accumulation and investment delay\n";
    os << "===========================================================\n\n";
    os << "parameters\n";
    for (auto key : detail::param_keys)
        os << "  " << key << " = " << fmt17(get_param(r.params, key)) << "\n";
    os << "\nequilibrium\n";
    line2(os, "Y0", r.eq.Y0);
    line2(os, "r0", r.eq.r0);
    line2(os, "K0", r.eq.K0);
    line2(os, "M0", r.eq.M0);
    os << "\nlinearization x'(t) = A x(t) + B x(t - tau)\n";
    for (int i = 0; i < 4; ++i) {
        os << (i == 0 ? "  A = [" : "      [");
        for (int j = 0; j < 4; ++j) os << " " << fmt17(r.lin.A[i][j]);
        os << " ]\n";
    }
    for (int i = 0; i < 4; ++i) {
        os << (i == 0 ? "  B = [" : "      [");
        for (int j = 0; j < 4; ++j) os << " " << fmt17(r.lin.B[i][j]);
        os << " ]\n";
    }
    os << "\ncharacteristic function (lambda + delta) * Delta(lambda, tau),\n";
    os << "Delta = lambda^3 + p2 lambda^2 + p1 lambda + p0"
          " + e^(-lambda tau) (q2 lambda^2 + q1 lambda + q0)\n";
    os << " canonical coefficient set:\n";
    line2(os, "p2", r.coeffs.p2);
    line2(os, "p1", r.coeffs.p1);
    line2(os, "p0", r.coeffs.p0);
    line2(os, "q2", r.coeffs.q2);
    line2(os, "q1", r.coeffs.q1);
    line2(os, "q0", r.coeffs.q0);
    os << " determinant-consistent variant (matches det(lambda I - A - B e^(-lambda tau))):\n";
    line2(os, "p2", r.coeffs_det.p2);
    line2(os, "p1", r.coeffs_det.p1);
    line2(os, "p0", r.coeffs_det.p0);
    line2(os, "q2", r.coeffs_det.q2);
    line2(os, "q1", r.coeffs_det.q1);
    line2(os, "q0", r.coeffs_det.q0);
    os << "\ndelay-free stability (Hurwitz, cubic P + Q)\n";
    line2(os, "h1", r.stab.hurwitz.h1);
    line2(os, "h2", r.stab.hurwitz.h2);
    line2(os, "h3", r.stab.hurwitz.h3);
    os << "  verdict: " << to_string(r.stab.hurwitz.verdict) << "\n";
    os << "\nfrequency equation f(omega) = omega^6 + aF omega^4 + bF omega^2 + cF\n";
    line2(os, "aF", r.stab.freq.aF);
    line2(os, "bF", r.stab.freq.bF);
    line2(os, "cF", r.stab.freq.cF);
    line2(os, "fD", r.stab.freq.fD);
    os << "  root-count case: " << r.stab.freq.case_label << "\n";
    for (std::size_t i = 0; i < r.stab.freq.roots.size(); ++i)
        line2(os, "omega." + std::to_string(i), r.stab.freq.roots[i]);
    os << "\nstability switches (canonical coefficients)\n";
    if (r.stab.hopf_points.empty()) {
        os << "  none\n";
    } else {
        for (const HopfPoint& h : r.stab.hopf_points) {
            line2(os, "omega0", h.omega0);
            line2(os, "tau0", h.tau0);
            line2(os, "lambda'(tau0)", h.lambda_prime);
        }
    }
    if (!r.hopf_det.empty()) {
        os << " switches of the determinant-consistent variant:\n";
        for (const HopfPoint& h : r.hopf_det) {
            line2(os, "omega0", h.omega0);
            line2(os, "tau0", h.tau0);
        }
    }
    os << "  note: " << r.stab.note << "\n";
    if (r.has_hopf && r.nf_ok) {
        os << "\nHopf normal form at the smallest critical delay\n";
        line2(os, "g20", r.nf.quad.g20);
        line2(os, "g11", r.nf.quad.g11);
        line2(os, "g02", r.nf.quad.g02);
        line2(os, "g21", r.nf.g21);
        line2(os, "C1(0)", r.nf.main.C1);
        line2(os, "mu2", r.nf.main.mu2);
        line2(os, "beta2", r.nf.main.beta2);
        line2(os, "T2", r.nf.main.T2);
        os << "  verdict: " << r.nf.main.verdict.direction << " bifurcation; "
           << r.nf.main.verdict.orbit << " periodic solutions; period "
           << r.nf.main.verdict.period << "\n";
        os << " diagnostics:\n";
        line2(os, "<Psi,Phi>", r.nf.eig.pair_unit);
        line2(os, "<Psi,Phibar>", r.nf.eig.pair_cross);
        line2(os, "eigvec residual", r.nf.eig.res_v);
        line2(os, "E1 residual", r.nf.solves.E1_residual);
        line2(os, "E2 residual", r.nf.solves.E2_residual);
        os << " alternate E1 delay-exponent variant:\n";
        line2(os, "C1(0)", r.nf.alt.C1);
        line2(os, "mu2", r.nf.alt.mu2);
        line2(os, "beta2", r.nf.alt.beta2);
        line2(os, "T2", r.nf.alt.T2);
    } else if (r.has_hopf) {
        os << "\nHopf normal form unavailable: " << r.nf_error << "\n";
    }
    return os.str();
}

/// CSV with header `t,Y,r,K,M`, 17 significant digits per field.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,Y,r,K,M\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << fmt17(traj.times[i]);
        for (int c = 0; c < 4; ++c) os << "," << fmt17(traj.states[i][c]);
        os << "\n";
    }
}

/// CSV with header `t,Y,r,K,M,I,L`, 17 significant digits per field.
inline void write_waveform_csv(std::ostream& os, const Waveform& w) {
    os << "t,Y,r,K,M,I,L\n";
    for (std::size_t i = 0; i < w.times.size(); ++i) {
        os << fmt17(w.times[i]);
        for (int c = 0; c < 4; ++c) os << "," << fmt17(w.states[i][c]);
        os << "," << fmt17(w.investment[i]) << "," << fmt17(w.liquidity[i]) << "\n";
    }
}

/// One sweep grid point; rows without a resolvable Hopf point keep `ok`
/// false and render as empty fields.
struct SweepRow {
    double x = 0.0;
    bool ok = false;
    double omega0 = 0.0, tau0 = 0.0, mu2 = 0.0, beta2 = 0.0, T2 = 0.0;
};

/// CSV with header `<x_name>,omega0,tau0,mu2,beta2,T2`.
inline void write_sweep_csv(std::ostream& os, const std::string& x_name,
                            const std::vector<SweepRow>& rows) {
    os << x_name << ",omega0,tau0,mu2,beta2,T2\n";
    for (const SweepRow& r : rows) {
        os << fmt17(r.x) << ",";
        if (r.ok)
            os << fmt17(r.omega0) << "," << fmt17(r.tau0) << "," << fmt17(r.mu2) << ","
               << fmt17(r.beta2) << "," << fmt17(r.T2);
        else
            os << ",,,,";
        os << "\n";
    }
}

} // namespace islm

#pragma once
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace islm {

/// Structural parameters of the delayed IS-LM system.
///
/// All rates/scales are positive; d, s are shares in (0,1); epsilon is the
/// delayed-tax share in [0,1) (epsilon = 0 gives the delay-free system).
struct ModelParams {
    double a;       ///< investment scale
    double alpha;   ///< income adjustment speed α
    double beta;    ///< money-market adjustment speed β
    double alpha1;  ///< investment income-elasticity α₁
    double alpha2;  ///< investment interest-elasticity α₂
    double gamma0;  ///< liquidity scale γ₀
    double r2;      ///< interest floor r₂ (pole of the liquidity function)
    double m;       ///< transaction-liquidity slope
    double d;       ///< average tax rate
    double s;       ///< saving rate
    double epsilon; ///< delayed tax share ε
    double delta;   ///< capital depreciation δ
    double g;       ///< government expenditure

    /// Throws ParameterError on any violated constraint.
    void validate() const {
        auto positive = [](double x, const char* name) {
            if (!(x > 0.0) || !std::isfinite(x))
                throw ParameterError(std::string(name) + " must be positive and finite");
        };
        positive(a, "a");
        positive(alpha, "alpha");
        positive(beta, "beta");
        positive(alpha1, "alpha1");
        positive(alpha2, "alpha2");
        positive(gamma0, "gamma0");
        positive(r2, "r2");
        positive(m, "m");
        positive(delta, "delta");
        positive(g, "g");
        if (!(d > 0.0 && d < 1.0)) throw ParameterError("d must lie in (0,1)");
        if (!(s > 0.0 && s < 1.0)) throw ParameterError("s must lie in (0,1)");
        if (!(epsilon >= 0.0 && epsilon < 1.0))
            throw ParameterError("epsilon must lie in [0,1)");
    }
};

namespace detail {

inline constexpr std::array<std::string_view, 13> param_keys = {
    "a", "alpha", "beta", "alpha1", "alpha2", "gamma0", "r2",
    "m", "d", "s", "epsilon", "delta", "g"};

inline double& param_field(ModelParams& p, std::string_view key) {
    if (key == "a") return p.a;
    if (key == "alpha") return p.alpha;
    if (key == "beta") return p.beta;
    if (key == "alpha1") return p.alpha1;
    if (key == "alpha2") return p.alpha2;
    if (key == "gamma0") return p.gamma0;
    if (key == "r2") return p.r2;
    if (key == "m") return p.m;
    if (key == "d") return p.d;
    if (key == "s") return p.s;
    if (key == "epsilon") return p.epsilon;
    if (key == "delta") return p.delta;
    if (key == "g") return p.g;
    throw ParameterError("unknown parameter key: " + std::string(key));
}

inline double parse_double(std::string_view text, std::string_view what) {
    std::string buf(text);
    char* end = nullptr;
    double value = std::strtod(buf.c_str(), &end);
    if (end == buf.c_str() || *end != '\0' || !std::isfinite(value))
        throw ParameterError("cannot parse value for " + std::string(what) +
                             ": '" + buf + "'");
    return value;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

} // namespace detail

/// Sets one parameter by key ("a", "alpha", ..., "g"); unknown keys throw.
inline void set_param(ModelParams& p, std::string_view key, double value) {
    detail::param_field(p, detail::trim(key)) = value;
}

/// Reads a parameter by key; unknown keys throw.
inline double get_param(const ModelParams& p, std::string_view key) {
    return detail::param_field(const_cast<ModelParams&>(p), detail::trim(key));
}

/// Applies a "key=value" override string.
inline void apply_override(ModelParams& p, std::string_view kv) {
    auto pos = kv.find('=');
    if (pos == std::string_view::npos)
        throw ParameterError("override must have the form key=value: '" +
                             std::string(kv) + "'");
    auto key = detail::trim(kv.substr(0, pos));
    auto val = detail::trim(kv.substr(pos + 1));
    set_param(p, key, detail::parse_double(val, key));
}

/// Parses a flat key=value parameter file. Blank lines and lines starting
/// with '#' are ignored; every key must be known and every one of the 13
/// keys must appear exactly once. The parsed set is validated.
inline ModelParams parse_params(std::istream& in) {
    ModelParams p{};
    std::array<bool, detail::param_keys.size()> seen{};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = detail::trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto pos = sv.find('=');
        if (pos == std::string_view::npos)
            throw ParameterError("line " + std::to_string(lineno) +
                                 ": expected key=value, got '" + std::string(sv) + "'");
        auto key = detail::trim(sv.substr(0, pos));
        auto val = detail::trim(sv.substr(pos + 1));
        std::size_t idx = 0;
        for (; idx < detail::param_keys.size(); ++idx)
            if (detail::param_keys[idx] == key) break;
        if (idx == detail::param_keys.size())
            throw ParameterError("line " + std::to_string(lineno) +
                                 ": unknown parameter key: '" + std::string(key) + "'");
        if (seen[idx])
            throw ParameterError("line " + std::to_string(lineno) +
                                 ": duplicate parameter key: '" + std::string(key) + "'");
        seen[idx] = true;
        set_param(p, key, detail::parse_double(val, key));
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            throw ParameterError("missing parameter key: '" +
                                 std::string(detail::param_keys[i]) + "'");
    p.validate();
    return p;
}

/// File-path convenience overload.
inline ModelParams parse_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open parameter file: " + path);
    return parse_params(in);
}

} // namespace islm

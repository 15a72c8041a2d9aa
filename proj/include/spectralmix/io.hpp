#pragma once

// JSON and CSV serialization for the command-line front end.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spectralmix/cebotarev.hpp"
#include "spectralmix/completion.hpp"
#include "spectralmix/errors.hpp"
#include "spectralmix/potential.hpp"
#include "spectralmix/reconstruct.hpp"
#include "spectralmix/sturm.hpp"
#include "spectralmix/weyl.hpp"

namespace spectralmix::io {

using json = nlohmann::json;

/// Every key of j must be in `allowed`.
inline void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
}

inline const json& member(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing key \"" + key + "\"");
    return j.at(key);
}

template <class T>
T get_as(const json& j, const std::string& where) {
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

inline double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(where + ": expected a finite number");
    return v;
}

inline std::size_t index(const json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(where + ": expected a nonnegative integer");
    return j.get<std::size_t>();
}

inline std::vector<double> numbers(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
    return v;
}

inline std::vector<std::size_t> indices(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array of indices");
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(index(j[i], where + "[" + std::to_string(i) + "]"));
    return v;
}

/// {"1": 0.25, ...} keyed by 1-based index.
inline std::map<std::size_t, double> indexed_numbers(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object keyed by index");
    std::map<std::size_t, double> m;
    for (const auto& [key, value] : j.items()) {
        std::size_t n = 0;
        std::size_t used = 0;
        try {
            n = std::stoul(key, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != key.size() || key.empty()) throw ConfigError(where + ": key \"" + key + "\" is not an index");
        m[n] = number(value, where + "." + key);
    }
    return m;
}

// ---- potentials and boundary conditions ----

inline PotentialSpec potential_from_json(const json& j) {
    const std::string w = "potential";
    require_keys(j, {"kind", "params", "breaks"}, w);
    const std::string kind = get_as<std::string>(member(j, "kind", w), w + ".kind");
    if (kind == "zero") {
        if (j.contains("params") || j.contains("breaks")) throw ConfigError(w + ": kind \"zero\" takes no parameters");
        return PotentialSpec::zero();
    }
    const std::vector<double> params = numbers(member(j, "params", w), w + ".params");
    try {
        if (kind == "cosine" || kind == "grid") {
            if (j.contains("breaks")) throw ConfigError(w + ": \"breaks\" only applies to piecewise_constant");
            return kind == "cosine" ? PotentialSpec::cosine(params) : PotentialSpec::grid(params);
        }
        if (kind == "piecewise_constant") {
            std::vector<double> breaks;
            if (j.contains("breaks")) breaks = numbers(j.at("breaks"), w + ".breaks");
            return PotentialSpec::piecewise_constant(params, breaks);
        }
    } catch (const ParameterError& e) {
        throw ConfigError(w + ": " + e.what());
    }
    throw ConfigError(w + ": unknown kind \"" + kind + "\"");
}

inline json to_json(const PotentialSpec& q) {
    json j{{"kind", std::string(to_string(q.kind()))}, {"params", q.params()}};
    if (q.kind() == PotentialKind::PiecewiseConstant) j["breaks"] = q.partition();
    return j;
}

/// "D" is a zero angle, "N" is pi/2.
inline double letter_angle(char c, const std::string& where) {
    if (c == 'D') return 0.0;
    if (c == 'N') return pi / 2;
    throw ConfigError(where + ": boundary letters must be D or N");
}

/// {"alpha": .., "beta": ..} or a two-letter string such as "DD" or "ND".
inline BoundaryConditions bc_from_json(const json& j, const std::string& w = "bc") {
    BoundaryConditions bc;
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s.size() != 2) throw ConfigError(w + ": expected a two-letter code like \"DD\"");
        bc = {letter_angle(s[0], w), letter_angle(s[1], w)};
    } else {
        require_keys(j, {"alpha", "beta"}, w);
        bc = {number(member(j, "alpha", w), w + ".alpha"), number(member(j, "beta", w), w + ".beta")};
    }
    try {
        bc.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(w + ": " + e.what());
    }
    return bc;
}

/// A triple {"alpha1", "alpha2", "beta"}, or a pair that maps to (alpha - pi/2, alpha, beta).
inline TripleBoundary triple_from_json(const json& j, const std::string& w = "bc") {
    try {
        if (j.is_object() && j.contains("alpha1")) {
            require_keys(j, {"alpha1", "alpha2", "beta"}, w);
            return TripleBoundary::make(number(member(j, "alpha1", w), w + ".alpha1"),
                                        number(member(j, "alpha2", w), w + ".alpha2"),
                                        number(member(j, "beta", w), w + ".beta"));
        }
        return TripleBoundary::from_pair(bc_from_json(j, w));
    } catch (const ParameterError& e) {
        throw ConfigError(w + ": " + e.what());
    }
}

inline json to_json(const BoundaryConditions& bc) { return {{"alpha", bc.alpha}, {"beta", bc.beta}}; }
inline json to_json(const TripleBoundary& t) {
    return {{"alpha1", t.alpha1}, {"alpha2", t.alpha2}, {"beta", t.beta}};
}

// ---- completion ----

inline MixedSpectralData mixed_data_from_json(const json& j) {
    const std::string w = "mixed data";
    require_keys(j, {"spectrum", "bc", "A", "known_zeros", "masses", "anchor", "index_maps", "distinct_beyond",
                     "mode", "options"},
                 w);
    MixedSpectralData d;
    d.spectrum = numbers(member(j, "spectrum", w), "spectrum");
    d.bc = triple_from_json(member(j, "bc", w));
    if (j.contains("A")) d.A = indices(j.at("A"), "A");
    if (j.contains("known_zeros")) d.known_zeros = indexed_numbers(j.at("known_zeros"), "known_zeros");
    if (j.contains("masses")) d.masses = indexed_numbers(j.at("masses"), "masses");
    if (j.contains("anchor")) {
        const json& a = j.at("anchor");
        require_keys(a, {"s", "value"}, "anchor");
        d.anchor = Anchor{index(member(a, "s", "anchor"), "anchor.s"), number(member(a, "value", "anchor"), "anchor.value")};
    }
    if (j.contains("index_maps")) {
        const json& m = j.at("index_maps");
        require_keys(m, {"k", "l"}, "index_maps");
        d.index_maps = IndexMaps{indices(member(m, "k", "index_maps"), "index_maps.k"),
                                 indices(member(m, "l", "index_maps"), "index_maps.l")};
    }
    if (j.contains("distinct_beyond")) d.distinct_beyond = index(j.at("distinct_beyond"), "distinct_beyond");
    try {
        d.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(w + ": " + e.what());
    }
    return d;
}

inline CompletionMode mode_from_json(const json& j) {
    const std::string s = get_as<std::string>(j, "mode");
    if (s == "matching") return CompletionMode::Matching;
    if (s == "anchored") return CompletionMode::Anchored;
    if (s == "absolutely_convergent") return CompletionMode::AbsolutelyConvergent;
    throw ConfigError("mode: expected matching, anchored or absolutely_convergent");
}

inline std::string to_string(CompletionMode m) {
    switch (m) {
        case CompletionMode::Matching: return "matching";
        case CompletionMode::Anchored: return "anchored";
        case CompletionMode::AbsolutelyConvergent: return "absolutely_convergent";
    }
    return "unknown";
}

inline double positive(const json& j, const std::string& where) {
    const double v = number(j, where);
    if (!(v > 0.0)) throw ConfigError(where + ": must be positive");
    return v;
}

/// Overrides of CompletionOptions; tolerances must be positive.
inline void apply_completion_options(const json& j, CompletionOptions& o) {
    const std::string w = "options";
    require_keys(j, {"truncation", "pin", "pin_weight", "tie_weight", "tie_condition", "residual_tol", "parameter_tol",
                     "consistency_tol", "hypothesis_cap", "max_iterations"},
                 w);
    if (j.contains("truncation")) o.truncation = index(j.at("truncation"), w + ".truncation");
    if (j.contains("pin")) {
        const std::string p = get_as<std::string>(j.at("pin"), w + ".pin");
        if (p == "product_identity")
            o.pin = PinMode::ProductIdentity;
        else if (p == "asymptotic_zero")
            o.pin = PinMode::AsymptoticZero;
        else
            throw ConfigError(w + ".pin: expected product_identity or asymptotic_zero");
    }
    if (j.contains("pin_weight")) o.pin_weight = positive(j.at("pin_weight"), w + ".pin_weight");
    if (j.contains("tie_weight")) {
        o.tie_weight = number(j.at("tie_weight"), w + ".tie_weight");
        if (o.tie_weight < 0.0) throw ConfigError(w + ".tie_weight: must be nonnegative");
    }
    if (j.contains("tie_condition")) o.tie_condition = positive(j.at("tie_condition"), w + ".tie_condition");
    if (j.contains("residual_tol")) o.residual_tol = positive(j.at("residual_tol"), w + ".residual_tol");
    if (j.contains("parameter_tol")) o.parameter_tol = positive(j.at("parameter_tol"), w + ".parameter_tol");
    if (j.contains("consistency_tol")) o.consistency_tol = positive(j.at("consistency_tol"), w + ".consistency_tol");
    if (j.contains("hypothesis_cap")) o.hypothesis_cap = index(j.at("hypothesis_cap"), w + ".hypothesis_cap");
    if (j.contains("max_iterations")) {
        const std::size_t n = index(j.at("max_iterations"), w + ".max_iterations");
        if (n < 1) throw ConfigError(w + ".max_iterations: must be at least 1");
        o.lm.max_iterations = static_cast<int>(n);
    }
    if (o.truncation < 1) throw ConfigError(w + ".truncation: must be at least 1");
}

inline json to_json(const cebotarev::HypothesisCheck& c) {
    return {{"verdict", cebotarev::to_string(c.verdict)},
            {"exponent", c.exponent},
            {"last_decade_increment", c.last_decade_increment},
            {"trace", c.trace}};
}

inline json to_json(const cebotarev::HypothesisReport& r) {
    return {{"h1", to_json(r.h1)}, {"h2", to_json(r.h2)}, {"h3", to_json(r.h3)}, {"terms", r.terms}};
}

inline json to_json(const CompletionResult& r) {
    json z = json::object();
    for (std::size_t i = 0; i < r.indices.size(); ++i) z[std::to_string(r.indices[i])] = r.recovered_zeros[i];
    json ci = json::object();
    for (std::size_t i = 0; i < r.indices.size() && i < r.confidence.size(); ++i)
        ci[std::to_string(r.indices[i])] = r.confidence[i];
    json j{{"mode", to_string(r.mode)},
           {"recovered_zeros", z},
           {"confidence", ci},
           {"C", r.C},
           {"offset", r.offset},
           {"residual_norm", r.residual_norm},
           {"condition_number", std::isfinite(r.condition_number) ? json(r.condition_number) : json(nullptr)},
           {"iterations", r.iterations},
           {"rejected_steps", r.rejected_steps},
           {"bracket_violations", r.bracket_violations},
           {"residual_trace", r.residual_trace},
           {"converged", r.converged},
           {"status", r.status},
           {"full_zeros", r.full_zeros}};
    if (r.hypotheses) j["hypotheses"] = to_json(*r.hypotheses);
    return j;
}

// ---- reconstruction ----

struct ReconstructionInput {
    ReconstructionProblem problem;
    ReconstructOptions options;
};

inline ReconstructionInput reconstruction_from_json(const json& j) {
    const std::string w = "reconstruction";
    require_keys(j, {"spectrum1", "spectrum2", "bc", "family", "regularization", "weights1", "weights2", "initial",
                     "max_iterations"},
                 w);
    ReconstructionInput in;
    auto& p = in.problem;
    p.spectrum1 = numbers(member(j, "spectrum1", w), "spectrum1");
    if (j.contains("spectrum2")) p.spectrum2 = numbers(j.at("spectrum2"), "spectrum2");
    p.bc = triple_from_json(member(j, "bc", w));
    p.family = potential_from_json(member(j, "family", w));
    if (j.contains("regularization")) {
        p.regularization = number(j.at("regularization"), "regularization");
        if (p.regularization < 0.0) throw ConfigError("regularization: must be nonnegative");
    }
    if (j.contains("weights1")) in.options.weights1 = numbers(j.at("weights1"), "weights1");
    if (j.contains("weights2")) in.options.weights2 = numbers(j.at("weights2"), "weights2");
    if (j.contains("initial")) in.options.initial = potential_from_json(j.at("initial"));
    if (j.contains("max_iterations")) {
        const std::size_t n = index(j.at("max_iterations"), "max_iterations");
        if (n < 1) throw ConfigError("max_iterations: must be at least 1");
        in.options.lm.max_iterations = static_cast<int>(n);
    }
    try {
        p.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(w + ": " + e.what());
    }
    return in;
}

inline json to_json(const ReconstructionResult& r) {
    json cov = json::array();
    for (Eigen::Index i = 0; i < r.covariance.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < r.covariance.cols(); ++k) row.push_back(r.covariance(i, k));
        cov.push_back(row);
    }
    return {{"fitted", to_json(r.fitted)},
            {"misfit1", r.misfit1},
            {"misfit2", r.misfit2},
            {"residual_norm", r.residual_norm},
            {"max_abs_misfit", r.max_abs_misfit},
            {"covariance", cov},
            {"singular_values", r.singular_values},
            {"condition_number", std::isfinite(r.condition_number) ? json(r.condition_number) : json(nullptr)},
            {"null_direction", r.null_direction},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"status", r.status}};
}

// ---- files ----

inline json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open input file " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in " + path + ": " + e.what());
    }
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file " + path);
    out << text;
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

/// 17 significant digits, enough to round-trip a double.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Plain CSV: a header row, then rows of numbers.
class Csv {
public:
    explicit Csv(std::vector<std::string> header) : cols_(header.size()) {
        for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
        os_ << "\n";
    }
    void row(std::initializer_list<double> values) {
        if (values.size() != cols_) throw Error("CSV row has the wrong number of columns");
        std::size_t i = 0;
        for (double v : values) os_ << (i++ ? "," : "") << fmt(v);
        os_ << "\n";
    }
    std::string str() const { return os_.str(); }
    void save(const std::string& path) const { write_text(path, str()); }

private:
    std::size_t cols_;
    std::ostringstream os_;
};

}  // namespace spectralmix::io

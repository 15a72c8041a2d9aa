#pragma once

// Recovery of missing eigenvalues of the second spectrum from the full first spectrum,
// the known part of the second one and point masses of the spectral measure.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spectralmix/cebotarev.hpp"
#include "spectralmix/errors.hpp"
#include "spectralmix/numerics/levenberg_marquardt.hpp"
#include "spectralmix/numerics/parallel.hpp"
#include "spectralmix/numerics/tail_sum.hpp"
#include "spectralmix/potential.hpp"
#include "spectralmix/sturm.hpp"
#include "spectralmix/weyl.hpp"

namespace spectralmix {

enum class CompletionMode { Matching, Anchored, AbsolutelyConvergent };

/// Extra equation fixing C at finite truncation.
enum class PinMode {
    ProductIdentity,  // C prod a_n/b_n matched against a constant-potential reference (large-|z| limit)
    AsymptoticZero,   // the largest-index unknown zero tied to its asymptotic model value
};

struct Anchor {
    std::size_t s = 1;  // position in the l map
    double value = 0.0;
};

struct IndexMaps {
    std::vector<std::size_t> k, l;
};

struct MixedSpectralData {
    std::vector<double> spectrum;  // a_1..a_N for (alpha2, beta)
    TripleBoundary bc;
    std::vector<std::size_t> A;                      // matching mode index set
    std::map<std::size_t, double> known_zeros;       // b_n of (alpha1, beta)
    std::map<std::size_t, double> masses;            // gamma_n at a_n
    std::optional<Anchor> anchor;                    // non-matching anchored mode
    std::optional<IndexMaps> index_maps;             // non-matching modes
    std::optional<std::size_t> distinct_beyond;      // k_n != l_n for all n beyond this

    std::size_t size() const { return spectrum.size(); }

    void validate() const {
        bc.validate();
        if (spectrum.empty()) throw ParameterError("mixed data needs a nonempty spectrum");
        for (std::size_t i = 1; i < spectrum.size(); ++i)
            if (!(spectrum[i] > spectrum[i - 1])) throw ParameterError("spectrum must be strictly increasing");
        for (const auto& [n, g] : masses) {
            if (n < 1 || n > size()) throw ParameterError("mass index outside the spectrum");
            if (!(g > 0.0)) throw ParameterError("point masses must be positive");
        }
        for (const auto& [n, b] : known_zeros)
            if (n < 1 || n > size()) throw ParameterError("zero index outside the spectrum");
        for (std::size_t n : A)
            if (n < 1 || n > size()) throw ParameterError("index set entry outside the spectrum");
        if (index_maps) {
            if (index_maps->k.size() != index_maps->l.size()) throw ParameterError("index maps differ in length");
            for (std::size_t i = 0; i < index_maps->k.size(); ++i) {
                if (index_maps->k[i] < 1 || index_maps->l[i] < 1 || index_maps->k[i] > size() ||
                    index_maps->l[i] > size())
                    throw ParameterError("index map entry outside the spectrum");
                if (i > 0 && (index_maps->k[i] <= index_maps->k[i - 1] || index_maps->l[i] <= index_maps->l[i - 1]))
                    throw ParameterError("index maps must be strictly increasing");
            }
        }
    }
};

struct CompletionOptions {
    std::size_t truncation = 40;  // number of pairs used; capped by the spectrum length
    PinMode pin = PinMode::ProductIdentity;
    double pin_weight = 1.0;  // weight of the asymptotic tie when it is the pin
    /// asymptotic tie added next to the product identity; it fixes the near-null direction
    /// (a constant added to m) left when almost every zero is unknown. The row is scaled by
    /// this noise level over the estimated relative error of the tie target, capped at 1.
    /// 0 disables. The tie is only used when the untied solve fails or its Jacobian
    /// condition number exceeds tie_condition.
    double tie_weight = 1e-7;
    double tie_condition = 1e4;
    double residual_tol = 1e-8;
    double parameter_tol = 1e-6;
    double consistency_tol = 1e-6;  // over-specified data and stagnated solves
    std::size_t hypothesis_cap = 200;
    numerics::LmOptions lm{200};
    WeylOptions weyl{};
};

struct CompletionResult {
    CompletionMode mode = CompletionMode::Matching;
    std::vector<std::size_t> indices;  // zero indices of the recovered values
    std::vector<double> recovered_zeros;
    std::vector<double> confidence;  // half-widths of local 95% intervals
    double C = 0.0;                  // in the frame shifted by `offset`
    double offset = 0.0;
    double residual_norm = 0.0;
    double condition_number = 1.0;
    int iterations = 0;
    int rejected_steps = 0;
    int bracket_violations = 0;  // trial points outside the interlacing boxes
    std::vector<double> residual_trace;
    bool converged = true;
    std::string status;
    std::optional<cebotarev::HypothesisReport> hypotheses;
    std::vector<double> full_zeros;  // b_1..b_N after completion
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, CompletionResult r) : Error(what), result(std::move(r)) {}
    CompletionResult result;
};

/// Refusal to run a mode whose hypotheses fail.
class RefusalError : public PreconditionError {
public:
    RefusalError(const std::string& what, std::optional<cebotarev::HypothesisReport> r = std::nullopt)
        : PreconditionError(what), report(std::move(r)) {}
    std::optional<cebotarev::HypothesisReport> report;
};

namespace completion {

/// Residue system with its frame, boxes and pin, ready for the solver.
struct Problem {
    std::size_t N = 0;
    TripleBoundary tb;
    ProductOrder order = ProductOrder::ZerosBelowPoles;
    std::vector<double> a;           // poles, unshifted
    std::vector<double> b;           // zeros with unknown slots holding the initial guess
    std::vector<std::size_t> unknown;  // 1-based zero indices solved for
    std::vector<double> lo, hi;      // open boxes for the unknowns
    std::vector<std::size_t> eq;     // pole indices carrying a residue equation
    std::vector<double> gamma;       // masses at eq
    bool identity_pin = true;  // hard row: product identity
    bool tie = false;          // asymptotic tie row present
    bool tie_hard = false;     // the tie is the pin rather than a weak companion
    double tie_weight = 0.0;
    double offset = 0.0;
    double mean_estimate = 0.0;
    // constant-potential reference in the same frame
    ProductRepresentation reference;
    AsymptoticModel zero_guess_model;  // asymptotic model of the zero spectrum at the estimated mean
    WeylOptions weyl;
    mutable int bracket_violations = 0;

    ProductRepresentation representation(const std::vector<double>& zeros, double C) const {
        ProductRepresentation r;
        r.poles = a;
        r.zeros = zeros;
        r.C = C;
        r.order = order;
        r.form = ProductForm::Plain;
        r.pole_model = asymptotic_model(tb.pole_bc(), 0.0).fitted_at(static_cast<double>(N), a.back());
        r.zero_model = asymptotic_model(tb.zero_bc(), 0.0).fitted_at(static_cast<double>(N), zeros.back());
        r.offset = offset;
        return r;
    }

    /// zeros for the transformed unknowns t (logistic inside each box)
    std::vector<double> zeros_for(const Eigen::VectorXd& x) const {
        std::vector<double> z = b;
        for (std::size_t j = 0; j < unknown.size(); ++j) {
            const double s = 1.0 / (1.0 + std::exp(-x[static_cast<Eigen::Index>(j)]));
            const double v = lo[j] + (hi[j] - lo[j]) * s;
            if (!(v > lo[j] && v < hi[j])) {
                ++bracket_violations;
                throw SolverError("iterate left its interlacing box");
            }
            z[unknown[j] - 1] = v;
        }
        return z;
    }

    double dz_dt(const Eigen::VectorXd& x, std::size_t j) const {
        const double s = 1.0 / (1.0 + std::exp(-x[static_cast<Eigen::Index>(j)]));
        return (hi[j] - lo[j]) * s * (1.0 - s);
    }

    Eigen::VectorXd initial_point(const std::vector<double>& zeros, double C) const {
        Eigen::VectorXd x(static_cast<Eigen::Index>(unknown.size() + 1));
        for (std::size_t j = 0; j < unknown.size(); ++j) {
            const double s = (zeros[unknown[j] - 1] - lo[j]) / (hi[j] - lo[j]);
            x[static_cast<Eigen::Index>(j)] = std::log(s / (1.0 - s));
        }
        x[static_cast<Eigen::Index>(unknown.size())] = std::log(C);
        return x;
    }

    /// log C implied by the product identity for the given zeros.
    double identity_log_constant(const std::vector<double>& zeros) const {
        const ProductRepresentation rep = representation(zeros, 1.0);
        double s = std::log(reference.C);
        for (std::size_t n = 1; n <= N; ++n)
            s += std::log(rep.zero(n)) - std::log(rep.pole(n)) + std::log(reference.pole(n)) -
                 std::log(reference.zero(n));
        numerics::TailSumOptions to = weyl.tail;
        s += numerics::tail_sum(
            [&](double n) {
                return std::log(rep.zero_at(n)) - std::log(rep.pole_at(n)) + std::log(reference.pole_at(n)) -
                       std::log(reference.zero_at(n));
            },
            N + 1, to);
        return s;
    }

    /// Asymptotic value of b_n calibrated on the computed pole: a_n plus the modeled gap.
    double tie_target(std::size_t n) const {
        const double x = static_cast<double>(n);
        return a[n - 1] + zero_guess_model.value(x) - asymptotic_model(tb.pole_bc(), mean_estimate).value(x);
    }

    std::size_t equations() const { return eq.size() + (identity_pin ? 1 : 0) + (tie ? 1 : 0); }
    std::size_t hard_rows() const { return eq.size() + (identity_pin ? 1 : 0) + (tie && tie_hard ? 1 : 0); }

    /// Residuals log(|Res(m, a_k)| / gamma_k), then the pin; Jacobian in (t, log C).
    void evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* J) const {
        const std::vector<double> zeros = zeros_for(x);
        const double logC = x[static_cast<Eigen::Index>(unknown.size())];
        const ProductRepresentation rep = representation(zeros, std::exp(logC));
        const auto m = static_cast<Eigen::Index>(equations());
        const auto u = static_cast<Eigen::Index>(unknown.size());
        r.resize(m);
        if (J) J->setZero(m, u + 1);
        std::vector<double> res(eq.size());
        numerics::parallel_for(eq.size(), [&](std::size_t i) { res[i] = weyl::residue_product(rep, eq[i], N, weyl); });
        for (std::size_t i = 0; i < eq.size(); ++i) {
            if (!(res[i] < 0.0)) throw SolverError("residue with the wrong sign");
            const auto row = static_cast<Eigen::Index>(i);
            r[row] = std::log(-res[i] / gamma[i]);
            if (!J) continue;
            const double ak = rep.pole(eq[i]);
            for (std::size_t j = 0; j < unknown.size(); ++j) {
                const double bj = rep.zero(unknown[j]);
                (*J)(row, static_cast<Eigen::Index>(j)) = -ak / (bj * (ak - bj)) * dz_dt(x, j);
            }
            (*J)(row, u) = 1.0;
        }
        // the zero model beyond N is fitted at b_N, so an unknown b_N also moves the tail
        const bool last_unknown = J && !unknown.empty() && unknown.back() == N;
        const std::size_t jl = unknown.size() - 1;
        numerics::TailSumOptions to = weyl.tail;
        if (last_unknown && weyl.tail_correction) {
            for (std::size_t i = 0; i < eq.size(); ++i) {
                const double ak = rep.pole(eq[i]);
                numerics::TailSumOptions ti = to;
                ti.explicit_until = std::max(ti.explicit_until, 2.0 * std::sqrt(std::abs(ak)) + 50.0);
                const double d = numerics::tail_sum(
                    [&](double n) {
                        const double bn = rep.zero_at(n);
                        return -ak / (bn * (ak - bn));
                    },
                    N + 1, ti);
                (*J)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(jl)) += d * dz_dt(x, jl);
            }
        }
        Eigen::Index row = static_cast<Eigen::Index>(eq.size());
        if (identity_pin) {
            r[row] = logC - identity_log_constant(zeros);
            if (J) {
                for (std::size_t j = 0; j < unknown.size(); ++j)
                    (*J)(row, static_cast<Eigen::Index>(j)) = -1.0 / rep.zero(unknown[j]) * dz_dt(x, j);
                (*J)(row, u) = 1.0;
                if (last_unknown) {
                    const double d = numerics::tail_sum([&](double n) { return 1.0 / rep.zero_at(n); }, N + 1, to);
                    (*J)(row, static_cast<Eigen::Index>(jl)) -= d * dz_dt(x, jl);
                }
            }
            ++row;
        }
        if (tie) {
            const std::size_t jmax = unknown.size() - 1;
            const double target = tie_target(unknown[jmax]) + offset;
            const double bj = rep.zero(unknown[jmax]);
            r[row] = tie_weight * std::log(bj / target);
            if (J) (*J)(row, static_cast<Eigen::Index>(jmax)) = tie_weight / bj * dz_dt(x, jmax);
        }
    }
};

namespace detail {

inline ProductRepresentation constant_reference(const TripleBoundary& tb, double mean, std::size_t N, double offset,
                                                const WeylOptions& opt) {
    const PotentialSpec q = PotentialSpec::constant(mean);
    const auto poles = sturm::eigenvalues(q, tb.pole_bc(), N, opt.solver);
    const auto zeros = sturm::eigenvalues(q, tb.zero_bc(), N, opt.solver);
    ProductRepresentation r = make_representation(poles, zeros, tb.order());
    r.offset = offset;
    r.validate();
    r.C = weyl::fit_constant(q, tb, r, N, cplx(0.0, 1.0), opt);
    return r;
}

/// Boxes from strict interlacing with the poles; a_0 and a_{N+1} come from `bottom` and the pole model.
inline void interlacing_box(const std::vector<double>& a, ProductOrder order, std::size_t n, double bottom,
                            const AsymptoticModel& pole_model, double& lo, double& hi) {
    const std::size_t N = a.size();
    auto pole = [&](std::size_t i) {
        if (i == 0) return bottom;
        return i <= N ? a[i - 1] : pole_model.value(static_cast<double>(i));
    };
    if (order == ProductOrder::ZerosBelowPoles) {
        lo = pole(n - 1);
        hi = pole(n);
    } else {
        lo = pole(n);
        hi = pole(n + 1);
    }
}

inline void require_hypothesis_conditions(const MixedSpectralData& d) {
    const TripleBoundary& tb = d.bc;
    if (tb.alpha1 == 0.0 || tb.alpha2 == 0.0) return;
    if (!d.distinct_beyond)
        throw RefusalError("both left angles are nonzero: declare an index beyond which k_n != l_n");
    const auto& mp = *d.index_maps;
    for (std::size_t i = *d.distinct_beyond; i < mp.k.size(); ++i)
        if (mp.k[i] == mp.l[i])
            throw RefusalError("k_n == l_n at n = " + std::to_string(i + 1) + " beyond the declared index");
    const auto kr = cebotarev::infer_rule(mp.k), lr = cebotarev::infer_rule(mp.l);
    if (kr.kind != cebotarev::IndexRuleKind::Explicit && kr.kind == lr.kind && kr.stride == lr.stride &&
        kr.offset == lr.offset && kr.exponent == lr.exponent)
        throw RefusalError("the index maps coincide beyond the data, so k_n != l_n fails eventually");
}

}  // namespace detail

/// Residue system for the given mode.
inline Problem build_problem(const MixedSpectralData& d, CompletionMode mode, const CompletionOptions& opt = {}) {
    d.validate();
    Problem p;
    p.N = std::min(opt.truncation, d.size());
    if (p.N < 4) throw ParameterError("completion needs at least 4 pairs");
    p.tb = d.bc;
    p.order = d.bc.order();
    p.a.assign(d.spectrum.begin(), d.spectrum.begin() + static_cast<std::ptrdiff_t>(p.N));
    p.weyl = opt.weyl;

    std::vector<std::size_t> eq_idx, zero_idx;
    std::set<std::size_t> given;  // zero indices supplied as data
    for (const auto& [n, v] : d.known_zeros)
        if (n <= p.N) given.insert(n);
    if (mode == CompletionMode::Matching) {
        if (d.index_maps) throw ParameterError("matching mode takes an index set, not index maps");
        std::set<std::size_t> A(d.A.begin(), d.A.end());
        for (std::size_t n : A) {
            if (n > p.N) throw ParameterError("index set entry beyond the truncation");
            if (!d.masses.count(n)) throw ParameterError("missing mass for index " + std::to_string(n));
            eq_idx.push_back(n);
            zero_idx.push_back(n);
        }
        for (const auto& [n, g] : d.masses)
            if (!A.count(n)) throw ParameterError("mass supplied outside the index set");
    } else {
        if (!d.index_maps) throw ParameterError("non-matching modes need index maps");
        const auto& mp = *d.index_maps;
        if (mp.k.empty()) throw ParameterError("index maps are empty");
        for (std::size_t i = 0; i < mp.k.size(); ++i) {
            if (mp.k[i] > p.N || mp.l[i] > p.N) throw ParameterError("index map entry beyond the truncation");
            if (!d.masses.count(mp.k[i])) throw ParameterError("missing mass at k index " + std::to_string(mp.k[i]));
            eq_idx.push_back(mp.k[i]);
            zero_idx.push_back(mp.l[i]);
        }
        if (mode == CompletionMode::Anchored) {
            if (!d.anchor) throw ParameterError("anchored mode requires the anchor zero");
            if (d.anchor->s < 1 || d.anchor->s > mp.l.size()) throw ParameterError("anchor position outside the l map");
        }
        detail::require_hypothesis_conditions(d);
    }

    p.b.assign(p.N, 0.0);
    std::set<std::size_t> unknown_set;
    for (std::size_t n : zero_idx)
        if (!given.count(n)) unknown_set.insert(n);
    if (mode == CompletionMode::Anchored) {
        const std::size_t ls = d.index_maps->l[d.anchor->s - 1];
        unknown_set.erase(ls);
        given.insert(ls);
        p.b[ls - 1] = d.anchor->value;
    }
    for (std::size_t n = 1; n <= p.N; ++n) {
        if (unknown_set.count(n)) continue;
        if (mode == CompletionMode::Anchored && n == d.index_maps->l[d.anchor->s - 1]) continue;
        const auto it = d.known_zeros.find(n);
        if (it == d.known_zeros.end()) throw ParameterError("zero " + std::to_string(n) + " is neither given nor solved for");
        p.b[n - 1] = it->second;
    }
    p.unknown.assign(unknown_set.begin(), unknown_set.end());
    p.eq = eq_idx;
    for (std::size_t k : eq_idx) p.gamma.push_back(d.masses.at(k));
    const bool asymptotic = opt.pin == PinMode::AsymptoticZero && !p.unknown.empty();
    p.identity_pin = mode != CompletionMode::Anchored && !asymptotic;
    p.tie_hard = asymptotic && mode != CompletionMode::Anchored;
    p.tie = !p.unknown.empty() && (p.tie_hard || (p.identity_pin && opt.tie_weight > 0.0));
    p.tie_weight = opt.pin_weight;

    // frame: the lowest admissible point of the zero spectrum is mapped to 1
    const double gap = p.a[1] - p.a[0];
    double lowest = p.a[0];
    for (std::size_t n : given) lowest = std::min(lowest, p.b[n - 1]);
    const double bottom = lowest - 2.0 * gap - 1.0;
    p.mean_estimate = sturm::implied_mean(p.a, p.tb.pole_bc());
    const AsymptoticModel pole_model =
        asymptotic_model(p.tb.pole_bc(), 0.0).fitted_at(static_cast<double>(p.N), p.a.back());
    p.zero_guess_model = asymptotic_model(p.tb.zero_bc(), p.mean_estimate);
    p.offset = (p.order == ProductOrder::ZerosBelowPoles ? bottom : lowest) <= 0.0
                   ? 1.0 - (p.order == ProductOrder::ZerosBelowPoles ? bottom : lowest)
                   : 0.0;

    p.reference = detail::constant_reference(p.tb, p.mean_estimate, p.N, p.offset, opt.weyl);
    const double ref_low = std::min(p.reference.poles.front(), p.reference.zeros.front());
    if (ref_low + p.offset <= 0.0) {
        p.offset = 1.0 - ref_low;
        p.reference = detail::constant_reference(p.tb, p.mean_estimate, p.N, p.offset, opt.weyl);
    }

    for (std::size_t n : p.unknown) {
        double lo, hi;
        detail::interlacing_box(p.a, p.order, n, std::min(bottom, -p.offset), pole_model, lo, hi);
        lo = std::max(lo, -p.offset);
        p.lo.push_back(lo);
        p.hi.push_back(hi);
        // initial guess: the reference gap to the pole, kept inside the box
        const double gap_ref = p.reference.zeros[n - 1] - p.reference.poles[n - 1];
        const double w = hi - lo;
        p.b[n - 1] = std::clamp(p.a[n - 1] + gap_ref, lo + 0.05 * w, hi - 0.05 * w);
    }
    // known zeros must sit in their interlacing positions
    for (std::size_t n : given) {
        double lo, hi;
        detail::interlacing_box(p.a, p.order, n, -p.offset, pole_model, lo, hi);
        if (!(p.b[n - 1] > lo && p.b[n - 1] < hi))
            throw ParameterError("known zero " + std::to_string(n) + " violates interlacing with the spectrum");
    }
    if (p.tie && !p.tie_hard) {
        // the pole remainder at the tied index estimates the accuracy of the tie target
        const std::size_t J = p.unknown.back();
        const double target = p.tie_target(J) + p.offset;
        const double remainder = std::abs(p.a[J - 1] - asymptotic_model(p.tb.pole_bc(), p.mean_estimate, J));
        p.tie_weight = std::min(1.0, opt.tie_weight * target / std::max(remainder, 1e-10 * (1.0 + std::abs(p.a[J - 1]))));
    }
    return p;
}

/// Res(G, a_k) = -gamma_k / F(a_k) with F the finite product over pairs outside the equation
/// and unknown index sets, in the natural positivity frame of the data.
inline std::vector<double> target_residues(const MixedSpectralData& d, CompletionMode mode = CompletionMode::Matching,
                                           const CompletionOptions& opt = {}) {
    d.validate();
    const std::size_t N = std::min(opt.truncation, d.size());
    std::set<std::size_t> inside;
    std::vector<std::size_t> eq;
    if (mode == CompletionMode::Matching) {
        inside.insert(d.A.begin(), d.A.end());
        eq.assign(inside.begin(), inside.end());
    } else {
        if (!d.index_maps) throw ParameterError("non-matching modes need index maps");
        inside.insert(d.index_maps->k.begin(), d.index_maps->k.end());
        inside.insert(d.index_maps->l.begin(), d.index_maps->l.end());
        eq = d.index_maps->k;
    }
    std::vector<double> known;
    for (const auto& [n, v] : d.known_zeros) known.push_back(v);
    std::sort(known.begin(), known.end());
    const double off = positivity_offset(d.spectrum, known);
    std::vector<double> out;
    for (std::size_t k : eq) {
        const auto it = d.masses.find(k);
        if (it == d.masses.end()) throw ParameterError("missing mass for index " + std::to_string(k));
        const double ak = d.spectrum[k - 1] + off;
        double F = 1.0;
        for (std::size_t n = 1; n <= N; ++n) {
            if (inside.count(n)) continue;
            const auto z = d.known_zeros.find(n);
            if (z == d.known_zeros.end()) throw ParameterError("zero " + std::to_string(n) + " missing from the data");
            F *= (ak / (z->second + off) - 1.0) / (ak / (d.spectrum[n - 1] + off) - 1.0);
        }
        if (std::abs(F) < 1e-12) throw ConditioningError("known factor vanishes at a_" + std::to_string(k));
        out.push_back(-it->second / F);
    }
    return out;
}

namespace detail {

inline CompletionResult solve(const Problem& p, CompletionMode mode, const CompletionOptions& opt) {
    CompletionResult res;
    res.mode = mode;
    res.indices = p.unknown;
    res.offset = p.offset;

    const double C0 = std::exp(p.identity_log_constant(p.b));
    Eigen::VectorXd x0 = p.initial_point(p.b, C0);
    auto model = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* J) { p.evaluate(x, r, J); };

    numerics::LmOptions lo = opt.lm;
    const std::size_t hard = p.hard_rows();
    const bool square = hard == p.unknown.size() + 1;
    const bool soft = p.tie && !p.tie_hard;
    // overdetermined or softly tied systems cannot reach zero residual, so let them stagnate
    lo.residual_tol = square && !soft ? opt.residual_tol : 0.0;
    const numerics::LmResult lm = numerics::levenberg_marquardt(model, x0, lo);

    const std::vector<double> zeros = p.zeros_for(lm.x);
    res.full_zeros = zeros;
    for (std::size_t n : p.unknown) res.recovered_zeros.push_back(zeros[n - 1]);
    res.C = std::exp(lm.x[static_cast<Eigen::Index>(p.unknown.size())]);
    res.residual_norm = lm.residual.head(static_cast<Eigen::Index>(hard)).norm();
    res.iterations = lm.iterations;
    res.rejected_steps = lm.rejected_steps;
    res.bracket_violations = p.bracket_violations;
    for (double c : lm.cost_trace) res.residual_trace.push_back(std::sqrt(2.0 * c));

    // every accepted iterate must lie strictly inside its box
    for (const auto& x : lm.x_trace) (void)p.zeros_for(x);

    if (lm.jacobian.size() > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(lm.jacobian);
        const auto& sv = svd.singularValues();
        res.condition_number = sv.size() && sv[sv.size() - 1] > 0 ? sv[0] / sv[sv.size() - 1]
                                                                   : std::numeric_limits<double>::infinity();
        const Eigen::MatrixXd JtJ = lm.jacobian.transpose() * lm.jacobian;
        const Eigen::MatrixXd cov = JtJ.completeOrthogonalDecomposition().pseudoInverse();
        const double dof = std::max<double>(1.0, double(lm.residual.size()) - double(lm.x.size()));
        const double sigma = std::max(res.residual_norm / std::sqrt(dof), opt.residual_tol);
        for (std::size_t j = 0; j < p.unknown.size(); ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            res.confidence.push_back(1.96 * sigma * std::sqrt(std::max(cov(jj, jj), 0.0)) * p.dz_dt(lm.x, j));
        }
    }

    if (square)
        res.converged = res.residual_norm <= opt.residual_tol ||
                        (soft && lm.converged && res.residual_norm <= opt.consistency_tol);
    else
        res.converged = lm.converged && res.residual_norm <= opt.consistency_tol;
    res.status = lm.status;
    if (!res.converged) {
        if (!square && lm.converged)
            throw RefusalError("over-specified data are inconsistent: residual " + std::to_string(res.residual_norm));
        throw ConvergenceError("completion did not converge (" + lm.status + "), residual " +
                                   std::to_string(res.residual_norm),
                               res);
    }
    return res;
}

/// Solves untied first; the soft tie is brought in only for a near-singular or failed solve.
inline CompletionResult solve_tied(const Problem& p, CompletionMode mode, const CompletionOptions& opt) {
    if (!p.tie || p.tie_hard) return solve(p, mode, opt);
    Problem untied = p;
    untied.tie = false;
    try {
        CompletionResult r = solve(untied, mode, opt);
        if (r.condition_number <= opt.tie_condition) return r;
    } catch (const ConvergenceError&) {
    }
    return solve(p, mode, opt);
}

}  // namespace detail

inline CompletionResult complete_matching(const MixedSpectralData& d, const CompletionOptions& opt = {}) {
    const Problem p = build_problem(d, CompletionMode::Matching, opt);
    return detail::solve_tied(p, CompletionMode::Matching, opt);
}

/// Hypothesis report for the absolutely convergent mode; zeros at l come from the asymptotic model.
inline cebotarev::HypothesisReport nonmatching_hypotheses(const MixedSpectralData& d, const CompletionOptions& opt = {}) {
    if (!d.index_maps) throw ParameterError("non-matching modes need index maps");
    const auto& mp = *d.index_maps;
    const double mean = sturm::implied_mean(d.spectrum, d.bc.pole_bc());
    const AsymptoticModel zm = asymptotic_model(d.bc.zero_bc(), mean);
    cebotarev::IndexedSubsequences s;
    s.k = mp.k;
    s.l = mp.l;
    for (std::size_t i = 0; i < mp.k.size(); ++i) {
        s.a.push_back(d.spectrum.at(mp.k[i] - 1));
        const auto it = d.known_zeros.find(mp.l[i]);
        s.b.push_back(it != d.known_zeros.end() ? it->second : zm.value(static_cast<double>(mp.l[i])));
    }
    const auto kr = cebotarev::infer_rule(mp.k), lr = cebotarev::infer_rule(mp.l);
    if (kr.kind != cebotarev::IndexRuleKind::Explicit && lr.kind != cebotarev::IndexRuleKind::Explicit) {
        const AsymptoticModel pm = asymptotic_model(d.bc.pole_bc(), 0.0)
                                       .fitted_at(static_cast<double>(d.size()), d.spectrum.back());
        s.extension = cebotarev::IndexedSubsequences::Extension{kr, lr, pm, zm};
    }
    s.validate();
    return cebotarev::check_hypotheses(s, std::max<std::size_t>(opt.hypothesis_cap, 10));
}

inline CompletionResult complete_nonmatching(const MixedSpectralData& d, CompletionMode mode,
                                             const CompletionOptions& opt = {}) {
    if (mode == CompletionMode::Matching) throw ParameterError("complete_nonmatching needs a non-matching mode");
    std::optional<cebotarev::HypothesisReport> rep;
    if (mode == CompletionMode::AbsolutelyConvergent) {
        d.validate();
        rep = nonmatching_hypotheses(d, opt);
        if (rep->h3.verdict == cebotarev::Verdict::False)
            throw RefusalError("product of a_{k_n}/b_{l_n} is not absolutely convergent (numerical verdict)", rep);
    }
    CompletionOptions o = opt;
    o.pin = PinMode::ProductIdentity;
    const Problem p = build_problem(d, mode, o);
    CompletionResult r = detail::solve_tied(p, mode, o);
    r.hypotheses = rep;
    return r;
}

struct VerificationReport {
    std::vector<double> errors;  // recovered minus forward-solved
    double max_abs_error = 0.0;
    double max_rel_error = 0.0;
    bool flagged = false;  // max_abs_error above the threshold
};

/// Compare recovered zeros against the forward spectrum of (alpha1, beta) for the true potential.
inline VerificationReport verify_completion(const CompletionResult& r, const PotentialSpec& q, const TripleBoundary& tb,
                                            double threshold = 1e-3, const SolverOptions& so = {}) {
    VerificationReport v;
    std::size_t nmax = 0;
    for (std::size_t n : r.indices) nmax = std::max(nmax, n);
    if (nmax == 0) return v;
    const auto ref = sturm::eigenvalues(q, tb.zero_bc(), nmax, so);
    for (std::size_t i = 0; i < r.indices.size(); ++i) {
        const double truth = ref[r.indices[i]];
        const double e = r.recovered_zeros[i] - truth;
        v.errors.push_back(e);
        v.max_abs_error = std::max(v.max_abs_error, std::abs(e));
        v.max_rel_error = std::max(v.max_rel_error, std::abs(e) / std::max(std::abs(truth), 1e-300));
    }
    v.flagged = v.max_abs_error > threshold;
    return v;
}

}  // namespace completion
}  // namespace spectralmix

#pragma once

// Partial-fraction normal forms of interlacing products, residue sequences A_{k_n,m},
// and numerical checks of the summability hypotheses used in the non-matching case.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spectralmix/errors.hpp"
#include "spectralmix/sturm.hpp"
#include "spectralmix/weyl.hpp"

namespace spectralmix {

/// c z^2 + d z + e + sum r_n (1/(z - p_n) + 1/p_n), with r_n the plain residue at p_n.
struct CebotarevForm {
    double c = 0.0;
    double d = 0.0;
    double e = 0.0;
    std::vector<double> poles;
    std::vector<double> residues;
    /// set when the pole list truncates an infinite one; enables the tail bound in form_eval
    bool truncated = false;

    void validate() const {
        if (poles.size() != residues.size()) throw ParameterError("form: pole and residue counts differ");
        for (std::size_t i = 0; i < poles.size(); ++i) {
            if (!(poles[i] > 0.0)) throw ParameterError("form: poles must be positive");
            if (i > 0 && !(poles[i] > poles[i - 1])) throw ParameterError("form: poles must be strictly increasing");
        }
    }

    /// c = 0, d >= 0 and all residues negative.
    bool herglotz() const {
        if (c != 0.0 || d < 0.0) return false;
        return std::all_of(residues.begin(), residues.end(), [](double r) { return r < 0.0; });
    }

    /// Coefficients A_n = -r_n of the form sum A_n (1/(p_n - z) - 1/p_n).
    std::vector<double> nonnegative_coefficients() const {
        std::vector<double> A(residues.size());
        for (std::size_t i = 0; i < A.size(); ++i) A[i] = -residues[i];
        return A;
    }

    /// Limit at infinity of the proper part: e + sum r_n / p_n.
    double constant_at_infinity() const {
        double v = e;
        for (std::size_t i = 0; i < poles.size(); ++i) v += residues[i] / poles[i];
        return v;
    }

    /// Partial sums of |r_n| / p_n^2.
    std::vector<double> weighted_partial_sums() const {
        std::vector<double> s(poles.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            acc += std::abs(residues[i]) / (poles[i] * poles[i]);
            s[i] = acc;
        }
        return s;
    }
};

namespace cebotarev {

namespace detail {

inline CebotarevForm finite_product_to_form_reduced(const std::vector<double>& zeros, const std::vector<double>& poles,
                                                    double C, double sign) {
    const std::size_t n = poles.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(poles[i] > 0.0)) throw ParameterError("poles must be positive");
        if (zeros[i] == 0.0) throw ParameterError("zeros must be nonzero");
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && poles[j] == poles[i]) throw DegeneracyError("repeated pole");
            if (zeros[j] == poles[i]) throw DegeneracyError("coincident zero and pole");
        }
    }
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return poles[x] < poles[y]; });

    CebotarevForm f;
    f.e = sign * C;  // value at z = 0
    for (std::size_t i : idx) {
        const double ak = poles[i];
        double r = sign * C * ak * (ak / zeros[i] - 1.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            r *= (ak / zeros[j] - 1.0) / (ak / poles[j] - 1.0);
        }
        f.poles.push_back(ak);
        f.residues.push_back(r);
    }
    return f;
}

}  // namespace detail

/// Exact partial fractions of sign * C * prod (z/b_n - 1)/(z/a_n - 1); sign defaults to -1.
inline CebotarevForm finite_product_to_form(const std::vector<double>& zeros, const std::vector<double>& poles,
                                            double C, double sign = -1.0) {
    if (zeros.size() != poles.size()) throw ParameterError("finite product needs equal zero and pole counts");
    if (!(C > 0.0)) throw ParameterError("product constant must be positive");
    // coincident zero/pole pairs cancel exactly
    std::vector<double> z = zeros, p;
    for (double a : poles) {
        const auto it = std::find(z.begin(), z.end(), a);
        if (it != z.end())
            z.erase(it);
        else
            p.push_back(a);
    }
    if (z.size() != p.size()) throw ParameterError("finite product needs equal zero and pole counts");
    return detail::finite_product_to_form_reduced(z, p, C, sign);
}

struct FormValue {
    cplx value;
    double tail_bound = 0.0;  // bound on the omitted terms, nonzero only for truncated forms
};

inline FormValue form_eval(const CebotarevForm& f, cplx z, double pole_tol = 1e-12) {
    FormValue out{f.c * z * z + f.d * z + f.e, 0.0};
    for (std::size_t i = 0; i < f.poles.size(); ++i) {
        const double p = f.poles[i];
        if (std::abs(z - p) <= pole_tol * (1.0 + p)) throw PoleError("form_eval: z at a pole");
        out.value += f.residues[i] * z / ((z - p) * p);
    }
    if (f.truncated && !f.poles.empty()) {
        // |r_n z / ((z - p_n) p_n)| <= 2|z||r_n|/p_n^2 once p_n > 2|z|; the weighted terms are
        // extrapolated from the last one with n^-2 decay
        const std::size_t N = f.poles.size();
        const double last = std::abs(f.residues.back()) / (f.poles.back() * f.poles.back());
        out.tail_bound = 2.0 * std::abs(z) * last * static_cast<double>(N);
    }
    return out;
}

enum class IndexRuleKind { Explicit, Affine, Power };

/// Rule n -> index used to extend an index map beyond its explicit entries.
struct IndexRule {
    IndexRuleKind kind = IndexRuleKind::Explicit;
    double stride = 1.0, offset = 0.0;  // affine: stride * n + offset
    double exponent = 1.0;              // power: n^exponent

    std::size_t at(std::size_t n) const {
        const double x = static_cast<double>(n);
        switch (kind) {
            case IndexRuleKind::Affine: return static_cast<std::size_t>(std::llround(stride * x + offset));
            case IndexRuleKind::Power: return static_cast<std::size_t>(std::llround(std::pow(x, exponent)));
            case IndexRuleKind::Explicit: break;
        }
        throw ParameterError("explicit index map cannot be extended");
    }
};

/// Affine or integer-power rule reproducing every listed index, if there is one.
inline IndexRule infer_rule(const std::vector<std::size_t>& idx) {
    IndexRule explicit_rule;
    if (idx.size() < 2) return explicit_rule;
    IndexRule aff{IndexRuleKind::Affine, static_cast<double>(idx[1]) - static_cast<double>(idx[0]),
                  2.0 * static_cast<double>(idx[0]) - static_cast<double>(idx[1]), 1.0};
    auto matches = [&](const IndexRule& r) {
        for (std::size_t n = 1; n <= idx.size(); ++n)
            if (r.at(n) != idx[n - 1]) return false;
        return true;
    };
    if (aff.stride >= 1.0 && matches(aff)) return aff;
    for (int p = 2; p <= 4; ++p) {
        IndexRule pw{IndexRuleKind::Power, 1.0, 0.0, static_cast<double>(p)};
        if (matches(pw)) return pw;
    }
    return explicit_rule;
}

/// Index maps {k_n}, {l_n} into two spectra with the selected values a_{k_n}, b_{l_n}.
struct IndexedSubsequences {
    std::vector<std::size_t> k, l;
    std::vector<double> a, b;  // a[n-1] = a_{k_n}, b[n-1] = b_{l_n}

    struct Extension {
        IndexRule k_rule, l_rule;
        AsymptoticModel a_model, b_model;  // values of the full spectra at arbitrary index
    };
    std::optional<Extension> extension;

    std::size_t size() const { return a.size(); }
    bool extendable() const { return extension.has_value(); }

    double a_at(std::size_t n) const {
        if (n <= a.size()) return a[n - 1];
        if (!extension) throw ParameterError("subsequence index beyond data without extension");
        return extension->a_model.value(static_cast<double>(extension->k_rule.at(n)));
    }
    double b_at(std::size_t n) const {
        if (n <= b.size()) return b[n - 1];
        if (!extension) throw ParameterError("subsequence index beyond data without extension");
        return extension->b_model.value(static_cast<double>(extension->l_rule.at(n)));
    }

    void validate() const {
        if (k.size() != l.size() || k.size() != a.size() || a.size() != b.size())
            throw ParameterError("index maps and value lists must have equal length");
        for (std::size_t i = 1; i < k.size(); ++i) {
            if (!(k[i] > k[i - 1]) || !(l[i] > l[i - 1])) throw ParameterError("index maps must be strictly increasing");
            if (!(a[i] > a[i - 1]) || !(b[i] > b[i - 1]))
                throw ParameterError("selected values must be strictly increasing");
        }
    }
};

/// Subsequences of two computed spectra; extension by inferred index rules and the spectra's
/// asymptotic models (refitted at their last computed entries).
inline IndexedSubsequences make_subsequences(const Spectrum& poles, const Spectrum& zeros,
                                             const std::vector<std::size_t>& k, const std::vector<std::size_t>& l) {
    IndexedSubsequences s;
    s.k = k;
    s.l = l;
    for (std::size_t i : k) {
        if (i < 1 || i > poles.size()) throw ParameterError("k index outside the computed spectrum");
        s.a.push_back(poles[i]);
    }
    for (std::size_t i : l) {
        if (i < 1 || i > zeros.size()) throw ParameterError("l index outside the computed spectrum");
        s.b.push_back(zeros[i]);
    }
    const IndexRule kr = infer_rule(k), lr = infer_rule(l);
    if (kr.kind != IndexRuleKind::Explicit && lr.kind != IndexRuleKind::Explicit) {
        s.extension = IndexedSubsequences::Extension{
            kr, lr,
            asymptotic_model(poles.bc, 0.0).fitted_at(static_cast<double>(poles.size()), poles.values.back()),
            asymptotic_model(zeros.bc, 0.0).fitted_at(static_cast<double>(zeros.size()), zeros.values.back())};
    }
    s.validate();
    return s;
}

namespace detail {

/// Factor contributed by pair j to A_{n,.}: (a_j/b_j)(a_n - b_j)/(a_n - a_j).
inline double pair_factor(double an, double aj, double bj) {
    if (an == aj || an == bj) throw DegeneracyError("coincident values in residue product");
    return (aj / bj) * (an - bj) / (an - aj);
}

inline double diagonal_factor(double an, double bn) {
    if (an == bn || bn == 0.0) throw DegeneracyError("coincident values in residue product");
    return (an / bn) * (an - bn);
}

}  // namespace detail

/// A_{k_n,m} for n = 1..m.
inline std::vector<double> residues_partial(const IndexedSubsequences& s, std::size_t m) {
    if (m > s.size() && !s.extendable()) throw ParameterError("truncation beyond the available subsequence");
    std::vector<double> av(m), bv(m);
    for (std::size_t j = 1; j <= m; ++j) {
        av[j - 1] = s.a_at(j);
        bv[j - 1] = s.b_at(j);
    }
    std::vector<double> A(m);
    for (std::size_t n = 0; n < m; ++n) {
        double r = detail::diagonal_factor(av[n], bv[n]);
        for (std::size_t j = 0; j < m; ++j)
            if (j != n) r *= detail::pair_factor(av[n], av[j], bv[j]);
        A[n] = r;
    }
    return A;
}

struct ResidueLimitReport {
    std::vector<double> at_cap;      // A_{k_n,N}
    std::vector<double> limits;      // Aitken extrapolation from m = N/4, N/2, N
    std::vector<double> increments;  // |A_{k_1,m} - A_{k_1,m-1}| for m = 2..N
    std::vector<double> relative_change;  // |A_{k_n,N} - A_{k_n,N/2}| / |A_{k_n,N}|
    bool cauchy = true;                   // judged on the first residue, whose tail is shortest
};

/// A_{k_n,m} for m up to N (n <= N/4 reported), with increments and an extrapolated limit.
inline ResidueLimitReport residues_limit(const IndexedSubsequences& s, std::size_t N,
                                         double divergence_threshold = 1e-2) {
    ResidueLimitReport rep;
    if (N > s.size() && !s.extendable()) N = s.size();
    if (N == 0) return rep;
    std::vector<double> av(N), bv(N);
    for (std::size_t j = 1; j <= N; ++j) {
        av[j - 1] = s.a_at(j);
        bv[j - 1] = s.b_at(j);
    }
    const std::size_t m0 = std::max<std::size_t>(1, N / 4), m1 = std::max<std::size_t>(1, N / 2);
    const std::size_t nrep = std::max<std::size_t>(1, N / 4);
    rep.at_cap.resize(nrep);
    rep.limits.resize(nrep);
    for (std::size_t n = 0; n < nrep; ++n) {
        double r = detail::diagonal_factor(av[n], bv[n]);
        for (std::size_t j = 0; j < n; ++j) r *= detail::pair_factor(av[n], av[j], bv[j]);
        double x0 = r, x1 = r;
        for (std::size_t m = n + 1; m < N; ++m) {
            const double prev = r;
            r *= detail::pair_factor(av[n], av[m], bv[m]);
            if (n == 0) rep.increments.push_back(std::abs(r - prev));
            if (m + 1 == m0) x0 = r;
            if (m + 1 == m1) x1 = r;
        }
        if (n + 1 > m0) x0 = r;
        if (n + 1 > m1) x1 = r;
        const double x2 = r;
        rep.at_cap[n] = x2;
        const double d1 = x1 - x0, d2 = x2 - x1, den = d2 - d1;
        rep.limits[n] = (std::abs(den) > 1e-300 && std::abs(d2) < std::abs(d1)) ? x2 - d2 * d2 / den : x2;
        rep.relative_change.push_back(std::abs(x2 - x1) / std::max(std::abs(x2), 1e-300));
    }
    rep.cauchy = rep.relative_change.front() < divergence_threshold;
    return rep;
}

enum class Verdict { True, False, Inconclusive };

inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::True: return "true";
        case Verdict::False: return "false";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

struct HypothesisCheck {
    Verdict verdict = Verdict::True;
    std::vector<double> trace;  // partial sums (H2, H3) or the difference sums D_m (H1)
    double exponent = 0.0;      // fitted power over the last decade of indices
    double last_decade_increment = 0.0;
};

/// Numerical evidence only: verdicts come from the last decade of a finite computation.
struct HypothesisReport {
    HypothesisCheck h1;  // sum_n |A_{k_n,m} - A_{k_n}| / a_{k_n}^2 bounded in m
    HypothesisCheck h2;  // {A_{k_n} / a_{k_n}^2} summable
    HypothesisCheck h3;  // sum |a_{k_n}/b_{l_n} - 1| finite
    std::size_t terms = 0;
};

namespace detail {

/// Least-squares slope of log|y| against log n over n in [lo, hi] (1-based).
inline double log_slope(const std::vector<double>& y, std::size_t lo, std::size_t hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t n = lo; n <= hi; ++n) {
        const double v = std::abs(y[n - 1]);
        if (!(v > 0.0)) continue;
        const double x = std::log(static_cast<double>(n)), t = std::log(v);
        sx += x;
        sy += t;
        sxx += x * x;
        sxy += x * t;
        ++cnt;
    }
    if (cnt < 2) return 0.0;
    const double den = cnt * sxx - sx * sx;
    return den > 0.0 ? (cnt * sxy - sx * sy) / den : 0.0;
}

inline constexpr double cauchy_threshold = 1e-8;

/// Series verdict from its terms: summable when the last decade adds < 1e-8 or the terms
/// decay faster than n^-1.25; divergent when they decay slower than n^-1.05.
inline HypothesisCheck series_check(const std::vector<double>& terms) {
    HypothesisCheck c;
    double acc = 0.0;
    for (double t : terms) {
        acc += t;
        c.trace.push_back(acc);
    }
    const std::size_t L = terms.size();
    if (L == 0) return c;
    const std::size_t lo = std::max<std::size_t>(1, L / 10);
    c.last_decade_increment = c.trace.back() - (lo > 1 ? c.trace[lo - 2] : 0.0);
    c.exponent = -log_slope(terms, lo, L);
    if (c.last_decade_increment < cauchy_threshold || (L >= 10 && c.exponent > 1.25))
        c.verdict = Verdict::True;
    else if (L >= 10 && c.exponent < 1.05)
        c.verdict = Verdict::False;
    else
        c.verdict = Verdict::Inconclusive;
    return c;
}

/// Boundedness verdict for a sequence: bounded when it does not grow over the last decade.
inline HypothesisCheck bounded_check(std::vector<double> seq) {
    HypothesisCheck c;
    c.trace = std::move(seq);
    const std::size_t L = c.trace.size();
    if (L == 0) return c;
    const std::size_t lo = std::max<std::size_t>(1, L / 10);
    c.last_decade_increment = c.trace.back() - c.trace[lo - 1];
    c.exponent = log_slope(c.trace, lo, L);
    if (c.trace.back() < cauchy_threshold || (L >= 10 && c.exponent < 0.05))
        c.verdict = Verdict::True;
    else if (L >= 10 && c.exponent > 0.25)
        c.verdict = Verdict::False;
    else
        c.verdict = Verdict::Inconclusive;
    return c;
}

}  // namespace detail

/// H1, H2, H3 over n <= N; the limits A_{k_n} are taken at cap 2N when the maps extend.
inline HypothesisReport check_hypotheses(const IndexedSubsequences& s, std::size_t N) {
    if (N < 10) throw ParameterError("check_hypotheses needs N >= 10");
    HypothesisReport rep;
    std::size_t L = s.extendable() ? N : std::min(N, s.size());
    rep.terms = L;
    if (L == 0) return rep;
    const std::size_t cap = s.extendable() ? 2 * N : L;

    std::vector<double> av(cap), bv(cap);
    for (std::size_t j = 1; j <= cap; ++j) {
        av[j - 1] = s.a_at(j);
        bv[j - 1] = s.b_at(j);
    }

    std::vector<double> t3(L);
    for (std::size_t n = 0; n < L; ++n) t3[n] = std::abs(av[n] / bv[n] - 1.0);
    rep.h3 = detail::series_check(t3);

    // limits A_{k_n} from the full cap, Aitken-accelerated as in residues_limit
    std::vector<double> limit(L);
    {
        const std::size_t m0 = std::max<std::size_t>(1, cap / 4), m1 = std::max<std::size_t>(1, cap / 2);
        for (std::size_t n = 0; n < L; ++n) {
            double r = detail::diagonal_factor(av[n], bv[n]);
            double x0 = 0, x1 = 0;
            for (std::size_t j = 0; j < cap; ++j) {
                if (j != n) r *= detail::pair_factor(av[n], av[j], bv[j]);
                if (j + 1 == m0) x0 = r;
                if (j + 1 == m1) x1 = r;
            }
            const double x2 = r, d1 = x1 - x0, d2 = x2 - x1, den = d2 - d1;
            limit[n] = (n + 1 < m0 && std::abs(den) > 1e-300 && std::abs(d2) < std::abs(d1)) ? x2 - d2 * d2 / den : x2;
        }
    }

    std::vector<double> t2(L);
    for (std::size_t n = 0; n < L; ++n) t2[n] = std::abs(limit[n]) / (av[n] * av[n]);
    rep.h2 = detail::series_check(t2);

    // D_m = sum_{n<=m} |A_{k_n,m} - A_{k_n}| / a_{k_n}^2, with A_{k_n,m} updated incrementally
    std::vector<double> cur;
    std::vector<double> D(L);
    for (std::size_t m = 0; m < L; ++m) {
        for (std::size_t n = 0; n < m; ++n) cur[n] *= detail::pair_factor(av[n], av[m], bv[m]);
        double r = detail::diagonal_factor(av[m], bv[m]);
        for (std::size_t j = 0; j < m; ++j) r *= detail::pair_factor(av[m], av[j], bv[j]);
        cur.push_back(r);
        double acc = 0.0;
        for (std::size_t n = 0; n <= m; ++n) acc += std::abs(cur[n] - limit[n]) / (av[n] * av[n]);
        D[m] = acc;
    }
    rep.h1 = detail::bounded_check(std::move(D));
    return rep;
}

/// Strict alternation of poles {a_n} and zeros {b_n} in the given order.
inline bool interlacing_check(const std::vector<double>& poles, const std::vector<double>& zeros,
                              ProductOrder order) {
    if (poles.empty() || zeros.empty()) throw ParameterError("interlacing_check needs nonempty sequences");
    std::vector<double> merged;
    const std::vector<double>& first = order == ProductOrder::ZerosBelowPoles ? zeros : poles;
    const std::vector<double>& second = order == ProductOrder::ZerosBelowPoles ? poles : zeros;
    const std::size_t n = std::min(first.size(), second.size());
    for (std::size_t i = 0; i < n; ++i) {
        merged.push_back(first[i]);
        merged.push_back(second[i]);
    }
    if (first.size() > n) merged.push_back(first[n]);
    for (std::size_t i = 1; i < merged.size(); ++i)
        if (!(merged[i] > merged[i - 1])) return false;
    return true;
}

}  // namespace cebotarev
}  // namespace spectralmix

#pragma once

// Weyl-Titchmarsh m-functions: direct ODE evaluation, Herglotz sum over a spectral measure,
// and the two-spectra product with asymptotic tail correction.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "spectralmix/errors.hpp"
#include "spectralmix/numerics/complex_math.hpp"
#include "spectralmix/numerics/parallel.hpp"
#include "spectralmix/numerics/tail_sum.hpp"
#include "spectralmix/potential.hpp"
#include "spectralmix/sturm.hpp"

namespace spectralmix {

/// Relative position of the zero and pole sequences of a product.
enum class ProductOrder {
    ZerosBelowPoles,  // b_1 < a_1 < b_2 < a_2 < ...
    PolesBelowZeros,  // a_1 < b_1 < a_2 < b_2 < ...
};

struct TripleBoundary {
    double alpha1 = pi / 2;
    double alpha2 = 0.0;
    double beta = 0.0;

    static TripleBoundary make(double alpha1, double alpha2, double beta) {
        TripleBoundary t{alpha1, alpha2, beta};
        t.validate();
        return t;
    }

    /// m_{alpha,beta} as the triple (alpha - pi/2, alpha, beta), first angle reduced mod pi.
    static TripleBoundary from_pair(const BoundaryConditions& bc) {
        bc.validate();
        return make(normalize_angle(bc.alpha - pi / 2), bc.alpha, bc.beta);
    }

    void validate() const {
        for (double a : {alpha1, alpha2, beta})
            if (!(a >= 0.0 && a < pi)) throw ParameterError("boundary angles must lie in [0,pi)");
        if (std::abs(std::sin(alpha2 - alpha1)) <= 1e-12)
            throw ParameterError("invalid boundary triple: sin(alpha2 - alpha1) = 0");
    }

    /// Boundary conditions whose spectrum forms the poles.
    BoundaryConditions pole_bc() const { return {alpha2, beta}; }
    /// Boundary conditions whose spectrum forms the zeros.
    BoundaryConditions zero_bc() const { return {alpha1, beta}; }

    /// The spectrum of the larger angle lies lower.
    ProductOrder order() const {
        return alpha1 > alpha2 ? ProductOrder::ZerosBelowPoles : ProductOrder::PolesBelowZeros;
    }

    bool operator==(const TripleBoundary&) const = default;
};

enum class ProductForm {
    Plain,          // s C prod (z/b_n - 1)/(z/a_n - 1)
    LeadingFactor,  // one factor split off and the remaining pairs shifted by one index
};

struct ProductRepresentation {
    std::vector<double> zeros;  // b_n as computed (unshifted)
    std::vector<double> poles;  // a_n as computed (unshifted)
    double C = 1.0;
    ProductForm form = ProductForm::Plain;
    ProductOrder order = ProductOrder::ZerosBelowPoles;
    AsymptoticModel zero_model;  // used beyond the computed zeros
    AsymptoticModel pole_model;  // used beyond the computed poles
    double offset = 0.0;         // positivity shift added to z and to every zero and pole

    /// Shifted n-th zero and pole (1-based); model values beyond the stored ones.
    double zero(std::size_t n) const {
        return (n <= zeros.size() ? zeros[n - 1] : zero_model.value(static_cast<double>(n))) + offset;
    }
    double pole(std::size_t n) const {
        return (n <= poles.size() ? poles[n - 1] : pole_model.value(static_cast<double>(n))) + offset;
    }
    double zero_at(double n) const { return zero_model.value(n) + offset; }
    double pole_at(double n) const { return pole_model.value(n) + offset; }

    /// +1 or -1 in front of C in the plain form.
    double sign() const { return order == ProductOrder::ZerosBelowPoles ? -1.0 : 1.0; }

    void validate() const {
        if (!(C > 0.0)) throw ParameterError("product constant must be positive");
        for (std::size_t i = 0; i < zeros.size(); ++i) {
            if (!(zero(i + 1) > 0.0)) throw ParameterError("shifted zeros must be positive");
            if (i > 0 && !(zeros[i] > zeros[i - 1])) throw ParameterError("zeros must be strictly increasing");
        }
        for (std::size_t i = 0; i < poles.size(); ++i) {
            if (!(pole(i + 1) > 0.0)) throw ParameterError("shifted poles must be positive");
            if (i > 0 && !(poles[i] > poles[i - 1])) throw ParameterError("poles must be strictly increasing");
        }
    }
};

/// Positivity shift: zero when every point is positive, otherwise the shift moving the
/// lowest point up to `margin`.
inline double positivity_offset(const std::vector<double>& a, const std::vector<double>& b, double margin = 1.0) {
    double lo = std::numeric_limits<double>::infinity();
    if (!a.empty()) lo = std::min(lo, a.front());
    if (!b.empty()) lo = std::min(lo, b.front());
    return lo > 0.0 ? 0.0 : margin - lo;
}

/// Representation with tail models fitted at the last computed entry of each spectrum; C = 1.
inline ProductRepresentation make_representation(const Spectrum& poles, const Spectrum& zeros, ProductOrder order,
                                                 ProductForm form = ProductForm::Plain, double margin = 1.0) {
    if (poles.size() == 0 || zeros.size() == 0) throw ParameterError("product needs nonempty spectra");
    ProductRepresentation r;
    r.poles = poles.values;
    r.zeros = zeros.values;
    r.order = order;
    r.form = form;
    r.pole_model = asymptotic_model(poles.bc, 0.0).fitted_at(static_cast<double>(poles.size()), poles.values.back());
    r.zero_model = asymptotic_model(zeros.bc, 0.0).fitted_at(static_cast<double>(zeros.size()), zeros.values.back());
    r.offset = positivity_offset(r.poles, r.zeros, margin);
    r.validate();
    return r;
}

struct WeylOptions {
    SolverOptions solver{};
    /// relative size of the denominator below which z counts as a pole
    double pole_tol = 1e-10;
    bool tail_correction = true;
    numerics::TailSumOptions tail{};
};

namespace weyl {

/// Terminal data (u(0), u'(0)) of the solution with u(pi) = sin(beta), u'(pi) = -cos(beta),
/// integrated in unit-length chunks with rescaling; only the direction is meaningful.
inline std::array<cplx, 2> backward_solution(const PotentialSpec& q, double beta, cplx z, const SolverOptions& opt) {
    std::array<cplx, 2> y{std::sin(beta), -std::cos(beta)};
    auto rhs = [&](const std::array<cplx, 2>& s, std::array<cplx, 2>& ds, double x) {
        ds[0] = s[1];
        ds[1] = (q(x) - z) * s[0];
    };
    const double h = sturm::max_step_for(q, z);
    const double S = std::sqrt(std::max(std::abs(z - q.mean()), 1.0));
    const auto breaks = q.singular_points();
    double x = pi;
    while (x > 0.0) {
        const double next = std::max(0.0, x - std::min(1.0, 20.0 / std::sqrt(1.0 + std::abs(z))));
        numerics::integrate_pieces(rhs, y, x, next, breaks, h, opt.ode);
        const double norm = std::hypot(std::abs(y[0]), std::abs(y[1]) / S);
        y[0] /= norm;
        y[1] /= norm;
        x = next;
    }
    return y;
}

/// m_{alpha1,alpha2,beta}(z) from its defining solution.
inline cplx m_direct(const PotentialSpec& q, const TripleBoundary& tb, cplx z, const WeylOptions& opt = {}) {
    tb.validate();
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw ParameterError("m_direct: non-finite z");
    const auto y = backward_solution(q, tb.beta, z, opt.solver);
    const double S = std::sqrt(std::max(std::abs(z - q.mean()), 1.0));
    const cplx num = -std::sin(tb.alpha1) * y[1] + std::cos(tb.alpha1) * y[0];
    const cplx den = -std::sin(tb.alpha2) * y[1] + std::cos(tb.alpha2) * y[0];
    // den relative to the solution size, with u' measured in units of S
    const double scale = std::abs(y[0]) + std::abs(y[1]) / S;
    const double rel = std::abs(den) / (scale * (std::abs(std::sin(tb.alpha2)) * S + std::abs(std::cos(tb.alpha2))));
    if (rel < opt.pole_tol)
        throw PoleError("m_direct: z = (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) +
                        ") is within tolerance of a pole");
    return num / (std::sin(tb.alpha2 - tb.alpha1) * den);
}

inline cplx m_direct(const PotentialSpec& q, const BoundaryConditions& bc, cplx z, const WeylOptions& opt = {}) {
    return m_direct(q, TripleBoundary::from_pair(bc), z, opt);
}

struct HerglotzValue {
    cplx value;
    cplx tail;  // contribution of the modeled terms beyond the measure
};

/// a + sum gamma_n [1/(a_n - z) - a_n/(1 + a_n^2)], with modeled tail beyond the last entry.
inline HerglotzValue m_herglotz(const SpectralMeasure& mu, double a, cplx z, const WeylOptions& opt = {}) {
    auto term = [](double an, double g, cplx w) { return g * (1.0 + an * w) / ((an - w) * (1.0 + an * an)); };
    HerglotzValue out{a, 0.0};
    const std::size_t N = mu.size();
    for (std::size_t i = 0; i < N; ++i) {
        if (std::abs(z - mu.eigenvalues[i]) <= opt.pole_tol * (1.0 + std::abs(mu.eigenvalues[i])))
            throw PoleError("m_herglotz: z on the support of the measure");
        out.value += term(mu.eigenvalues[i], mu.masses[i], z);
    }
    if (N == 0 || !opt.tail_correction) return out;

    const AsymptoticModel pm = asymptotic_model(mu.bc, 0.0).fitted_at(static_cast<double>(N), mu.eigenvalues.back());
    const double gN = mu.masses.back();
    const bool dirichlet = mu.bc.alpha == 0.0;
    // gamma_n ~ (2/pi) (n - shift)^2 when alpha = 0 and ~ 2/(pi sin^2 alpha) otherwise,
    // calibrated on the last computed mass
    const double kappa = dirichlet ? gN / pm.leading(static_cast<double>(N)) : gN;
    auto mass = [&](double n) { return dirichlet ? kappa * pm.leading(n) : kappa; };
    numerics::TailSumOptions to = opt.tail;
    to.explicit_until = std::max(to.explicit_until, 2.0 * std::sqrt(std::abs(z)) + 50.0);
    out.tail = numerics::tail_sum([&](double n) { return term(pm.value(n), mass(n), z); }, N + 1, to);
    out.value += out.tail;
    return out;
}

/// log of a factor ratio (w/u - 1)/(w/v - 1) computed as log1p of its distance from 1.
inline cplx log_factor_ratio(cplx w, double u, double v) {
    return numerics::log1p(w * (v - u) / (u * (w - v)));
}

/// Sum over n > N of log[(w/b_n - 1)/(w/a_n - 1)] with model values for both sequences.
/// `zshift` and `pshift` index-shift the pairing (leading-factor forms pair b_{n+1} with a_n).
inline cplx product_log_tail(const ProductRepresentation& rep, cplx w, std::size_t N, double zshift, double pshift,
                             const WeylOptions& opt) {
    numerics::TailSumOptions to = opt.tail;
    to.explicit_until = std::max(to.explicit_until, 2.0 * std::sqrt(std::abs(w)) + 50.0);
    return numerics::tail_sum(
        [&](double n) { return log_factor_ratio(w, rep.zero_at(n + zshift), rep.pole_at(n + pshift)); }, N + 1, to);
}

inline void check_pole(const ProductRepresentation& rep, cplx w, std::size_t upto, const WeylOptions& opt) {
    for (std::size_t n = 1; n <= upto; ++n) {
        const double a = rep.pole(n);
        if (std::abs(w - a) <= opt.pole_tol * (1.0 + a)) throw PoleError("m_product: z at a pole");
    }
}

/// Truncated product with N factor pairs, times the modeled tail when enabled.
inline cplx m_product(const ProductRepresentation& rep, cplx z, std::size_t N, const WeylOptions& opt = {}) {
    if (N < 1) throw ParameterError("truncation must be at least 1");
    const cplx w = z + rep.offset;
    check_pole(rep, w, N + 1, opt);
    cplx p = 1.0;
    cplx tail = 0.0;
    if (rep.form == ProductForm::Plain) {
        p = rep.sign() * rep.C;
        for (std::size_t n = 1; n <= N; ++n) p *= (w / rep.zero(n) - 1.0) / (w / rep.pole(n) - 1.0);
        if (opt.tail_correction) tail = product_log_tail(rep, w, N, 0.0, 0.0, opt);
    } else if (rep.order == ProductOrder::ZerosBelowPoles) {
        p = rep.C * (w / rep.zero(1) - 1.0);
        for (std::size_t n = 1; n <= N; ++n) p *= (w / rep.zero(n + 1) - 1.0) / (w / rep.pole(n) - 1.0);
        if (opt.tail_correction) tail = product_log_tail(rep, w, N, 1.0, 0.0, opt);
    } else {
        p = -rep.C / (w / rep.pole(1) - 1.0);
        for (std::size_t n = 1; n <= N; ++n) p *= (w / rep.zero(n) - 1.0) / (w / rep.pole(n + 1) - 1.0);
        if (opt.tail_correction) tail = product_log_tail(rep, w, N, 0.0, 1.0, opt);
    }
    return p * std::exp(tail);
}

/// C such that m_product(z0) = m_direct(z0) for the given boundary triple.
inline double fit_constant(const PotentialSpec& q, const TripleBoundary& tb, const ProductRepresentation& rep,
                           std::size_t N, cplx z0 = cplx(0.0, 1.0), const WeylOptions& opt = {}) {
    const cplx md = m_direct(q, tb, z0, opt);
    if (std::abs(md) < 1e-14) throw FitError("fit_constant: |m(z0)| too small for a stable fit");
    ProductRepresentation unit = rep;
    unit.C = 1.0;
    const cplx ratio = md / m_product(unit, z0, N, opt);
    if (!(ratio.real() > 0.0)) throw FitError("fit_constant: fitted constant is not positive");
    return ratio.real();
}

/// Residue of the product at its k-th pole (plain pairing, tail corrected).
inline double residue_product(const ProductRepresentation& rep, std::size_t k, std::size_t N,
                              const WeylOptions& opt = {}) {
    if (k < 1 || k > N) throw ParameterError("residue index outside the truncation range");
    const double ak = rep.pole(k);
    double r = rep.sign() * rep.C * ak * (ak / rep.zero(k) - 1.0);
    for (std::size_t n = 1; n <= N; ++n) {
        if (n == k) continue;
        r *= (ak / rep.zero(n) - 1.0) / (ak / rep.pole(n) - 1.0);
    }
    if (opt.tail_correction) r *= std::exp(product_log_tail(rep, cplx(ak, 0.0), N, 0.0, 0.0, opt).real());
    return r;
}

/// Residue estimate (1/2 pi i) times the contour integral of m_direct over a small circle.
inline cplx residue_contour(const PotentialSpec& q, const TripleBoundary& tb, double center, double radius,
                            int points = 64, const WeylOptions& opt = {}) {
    cplx s = 0.0;
    for (int j = 0; j < points; ++j) {
        const cplx e = std::polar(1.0, 2.0 * pi * (j + 0.5) / points);
        s += m_direct(q, tb, center + radius * e, opt) * e;
    }
    return s * radius / static_cast<double>(points);
}

/// Im m(iy)/y at large y: the coefficient of z in the Herglotz representation.
inline double linear_term_estimate(const PotentialSpec& q, const TripleBoundary& tb, double y = 1e6,
                                   const WeylOptions& opt = {}) {
    return m_direct(q, tb, cplx(0.0, y), opt).imag() / y;
}

struct RealAxisPlot {
    std::vector<double> x;
    std::vector<double> m;
    std::vector<double> zero_markers;  // first n_markers of the zero spectrum
    std::vector<double> pole_markers;  // first n_markers of the pole spectrum
};

/// m on a uniform real grid of [x0, x1] with points within `exclusion` of a pole dropped.
inline RealAxisPlot real_axis_plot(const PotentialSpec& q, const TripleBoundary& tb, double x0, double x1,
                                   std::size_t count, double exclusion, std::size_t n_markers,
                                   const WeylOptions& opt = {}) {
    if (count < 2 || !(x1 > x0)) throw ParameterError("plot grid needs count >= 2 and x1 > x0");
    if (!(exclusion >= 0.0)) throw ParameterError("exclusion radius must be nonnegative");
    RealAxisPlot out;
    out.pole_markers = sturm::eigenvalues(q, tb.pole_bc(), std::max<std::size_t>(n_markers, 1), opt.solver).values;
    out.zero_markers = sturm::eigenvalues(q, tb.zero_bc(), std::max<std::size_t>(n_markers, 1), opt.solver).values;
    // poles relevant for exclusion: all below x1 + exclusion
    std::vector<double> poles = out.pole_markers;
    for (std::size_t n = poles.size() + 1; poles.back() < x1 + exclusion; ++n)
        poles.push_back(sturm::eigenvalue(q, tb.pole_bc(), n, opt.solver));
    out.pole_markers.resize(n_markers);
    out.zero_markers.resize(n_markers);

    std::vector<double> xs;
    for (std::size_t j = 0; j < count; ++j) {
        const double x = x0 + (x1 - x0) * static_cast<double>(j) / static_cast<double>(count - 1);
        bool near = false;
        for (double p : poles) near = near || std::abs(x - p) <= exclusion;
        if (!near) xs.push_back(x);
    }
    std::vector<double> ms(xs.size());
    numerics::parallel_for(xs.size(), [&](std::size_t j) { ms[j] = m_direct(q, tb, xs[j], opt).real(); });
    out.x = std::move(xs);
    out.m = std::move(ms);
    return out;
}

}  // namespace weyl
}  // namespace spectralmix

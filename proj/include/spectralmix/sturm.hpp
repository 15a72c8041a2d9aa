#pragma once

// Forward solver for -u'' + q u = z u on (0,pi) with separated boundary conditions
//   u(0) cos(alpha) - u'(0) sin(alpha) = 0,   u(pi) cos(beta) + u'(pi) sin(beta) = 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "spectralmix/errors.hpp"
#include "spectralmix/numerics/ode.hpp"
#include "spectralmix/numerics/parallel.hpp"
#include "spectralmix/potential.hpp"

namespace spectralmix {

using cplx = std::complex<double>;

/// Reduce an angle to [0,pi).
inline double normalize_angle(double a) {
    double r = std::fmod(a, pi);
    if (r < 0) r += pi;
    if (r >= pi) r -= pi;
    return r;
}

struct BoundaryConditions {
    double alpha = 0.0;
    double beta = 0.0;

    static BoundaryConditions make(double alpha, double beta) {
        BoundaryConditions bc{alpha, beta};
        bc.validate();
        return bc;
    }
    void validate() const {
        if (!(alpha >= 0.0 && alpha < pi) || !(beta >= 0.0 && beta < pi))
            throw ParameterError("boundary angles must lie in [0,pi)");
    }
    bool operator==(const BoundaryConditions&) const = default;
};

inline const BoundaryConditions dirichlet_dirichlet{0.0, 0.0};
inline const BoundaryConditions neumann_dirichlet{pi / 2, 0.0};
inline const BoundaryConditions dirichlet_neumann{0.0, pi / 2};
inline const BoundaryConditions neumann_neumann{pi / 2, pi / 2};

/// a_n ~ (n - shift)^2 + constant.
struct AsymptoticModel {
    double shift = 0.0;
    double constant = 0.0;

    double leading(double n) const { return (n - shift) * (n - shift); }
    double value(double n) const { return leading(n) + constant; }

    /// Same leading term, constant refitted so that value(n) == a exactly.
    AsymptoticModel fitted_at(double n, double a) const { return {shift, a - leading(n)}; }
};

inline double cot(double x) { return std::cos(x) / std::sin(x); }

/// Index shift of the leading term: 0 (alpha = beta = 0), 1/2 (exactly one zero), 1 (neither).
inline double leading_shift(const BoundaryConditions& bc) {
    const bool a0 = bc.alpha == 0.0, b0 = bc.beta == 0.0;
    if (a0 && b0) return 0.0;
    if (a0 != b0) return 0.5;
    return 1.0;
}

/// Cotangent correction (2/pi)(cot alpha + cot beta), with zero angles omitted.
inline double cot_correction(const BoundaryConditions& bc) {
    double c = 0.0;
    if (bc.alpha != 0.0) c += cot(bc.alpha);
    if (bc.beta != 0.0) c += cot(bc.beta);
    return 2.0 / pi * c;
}

inline AsymptoticModel asymptotic_model(const BoundaryConditions& bc, double q_mean) {
    return {leading_shift(bc), cot_correction(bc) + q_mean};
}

inline double asymptotic_model(const BoundaryConditions& bc, double q_mean, std::size_t n) {
    return asymptotic_model(bc, q_mean).value(static_cast<double>(n));
}

struct Spectrum {
    std::vector<double> values;  // values[n-1] = a_n
    BoundaryConditions bc;
    std::size_t n_max = 0;
    double offset = 0.0;  // additive constant already applied to values

    double operator[](std::size_t n) const { return values.at(n - 1); }
    std::size_t size() const { return values.size(); }

    Spectrum shifted(double c) const {
        Spectrum s = *this;
        for (double& v : s.values) v += c;
        s.offset += c;
        return s;
    }
};

struct SpectralMeasure {
    std::vector<double> eigenvalues;
    std::vector<double> masses;  // gamma_n = 1 / tau_alpha(a_n)
    BoundaryConditions bc;

    std::size_t size() const { return eigenvalues.size(); }

    /// Partial sums of gamma_n / (1 + a_n^2).
    std::vector<double> poisson_partial_sums() const {
        std::vector<double> s(size());
        double acc = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            acc += masses[i] / (1.0 + eigenvalues[i] * eigenvalues[i]);
            s[i] = acc;
        }
        return s;
    }
};

struct SolverOptions {
    numerics::OdeOptions ode{};
    /// absolute eigenvalue tolerance is rel_tol * (1 + |a|)
    double eigen_rel_tol = 1e-13;
    /// allowed boundary defect of a supplied eigenvalue in norming_constant
    double defect_tol = 1e-6;
    int max_bracket_expansions = 200;
};

namespace sturm {

/// Frequency scale for the Pruefer transform and the step cap.
inline double prufer_scale(const PotentialSpec& q, double z) {
    return std::sqrt(std::max(z - q.mean(), 1.0));
}

inline double max_step_for(const PotentialSpec& q, cplx z) {
    const double k = std::sqrt(1.0 + std::abs(z - q.mean()) + q.deviation_bound());
    return std::min(0.5, 1.0 / k);
}

/// Scaled Pruefer angle at pi: u = r sin(phi), u' = S r cos(phi), u(0) = sin(alpha), u'(0) = cos(alpha).
inline double prufer_angle_at_pi(const PotentialSpec& q, double alpha, double z, double S,
                                 const SolverOptions& opt = {}) {
    std::array<double, 1> phi{std::atan2(S * std::sin(alpha), std::cos(alpha))};
    const double invS = 1.0 / S;
    auto rhs = [&](const std::array<double, 1>& y, std::array<double, 1>& dy, double x) {
        const double s = std::sin(y[0]), c = std::cos(y[0]);
        dy[0] = S * c * c + (z - q(x)) * invS * s * s;
    };
    numerics::integrate_pieces(rhs, phi, 0.0, pi, q.singular_points(), max_step_for(q, z), opt.ode);
    return phi[0];
}

/// Continuous eigenvalue counter: equals n-1 exactly at the n-th eigenvalue and crosses each
/// integer level upward once, so the number of eigenvalues below z is ceil(winding) when positive.
inline double winding(const PotentialSpec& q, const BoundaryConditions& bc, double z,
                      const SolverOptions& opt = {}) {
    const double S = prufer_scale(q, z);
    const double phi = prufer_angle_at_pi(q, bc.alpha, z, S, opt);
    const double target = std::atan2(S * std::sin(bc.beta), -std::cos(bc.beta));
    return (phi - target) / pi;
}

/// Solution of -u'' + q u = z u at x = `to` from data (u, u') at x = `from`.
inline std::pair<cplx, cplx> integrate_ivp(const PotentialSpec& q, cplx z, cplx u0, cplx du0,
                                           double from = 0.0, double to = pi,
                                           const SolverOptions& opt = {}) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !std::isfinite(std::abs(u0)) ||
        !std::isfinite(std::abs(du0)))
        throw ParameterError("integrate_ivp: non-finite input");
    std::array<cplx, 2> y{u0, du0};
    auto rhs = [&](const std::array<cplx, 2>& s, std::array<cplx, 2>& ds, double x) {
        ds[0] = s[1];
        ds[1] = (q(x) - z) * s[0];
    };
    numerics::integrate_pieces(rhs, y, from, to, q.singular_points(), max_step_for(q, z), opt.ode);
    return {y[0], y[1]};
}

/// n-th eigenvalue (1-based) by bracketing the winding level n-1 around the asymptotic model.
inline double eigenvalue(const PotentialSpec& q, const BoundaryConditions& bc, std::size_t n,
                         const SolverOptions& opt = {}) {
    if (n < 1) throw ParameterError("eigenvalue index starts at 1");
    const double level = static_cast<double>(n - 1);
    auto f = [&](double z) { return winding(q, bc, z, opt) - level; };
    const AsymptoticModel model = asymptotic_model(bc, q.mean());
    const double guess = model.value(static_cast<double>(n));
    const double spacing = std::max(1.0, 2.0 * static_cast<double>(n) - 1.0);
    double delta = 0.5 * spacing + q.deviation_bound() + 1.0;
    double centre = guess;
    if (guess - q.mean() > 4.0 * (q.deviation_bound() + 1.0)) {
        // one secant-type correction using dk/dz ~ 1/(2 sqrt(z - mean)) where the model is reliable
        const double e = f(guess);
        const double dz = -e * 2.0 * std::sqrt(guess - q.mean());
        centre = guess + dz;
        delta = std::min(delta, 0.25 * std::abs(dz) + 1e-9 * (1.0 + std::abs(centre)));
    }
    double lo = centre - delta, hi = centre + delta;
    double flo = f(lo), fhi = f(hi);
    int expansions = 0;
    for (double step = 2.0 * delta; flo > 0.0; step *= 2.0) {
        if (++expansions > opt.max_bracket_expansions)
            throw SolverError("failed to bracket eigenvalue " + std::to_string(n) + " from below");
        hi = lo;
        fhi = flo;
        lo -= step;
        flo = f(lo);
    }
    for (double step = 2.0 * delta; fhi < 0.0; step *= 2.0) {
        if (++expansions > opt.max_bracket_expansions)
            throw SolverError("failed to bracket eigenvalue " + std::to_string(n) + " from above");
        lo = hi;
        flo = fhi;
        hi += step;
        fhi = f(hi);
    }
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;

    const double rtol = opt.eigen_rel_tol;
    auto tol = [rtol](double a, double b) { return std::abs(b - a) <= rtol * (1.0 + std::abs(a)); };
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    if (iters >= 200) throw SolverError("eigenvalue " + std::to_string(n) + " refinement did not converge");
    return 0.5 * (a + b);
}

/// First n_max eigenvalues, computed independently per index and checked by winding number.
inline Spectrum eigenvalues(const PotentialSpec& q, const BoundaryConditions& bc, std::size_t n_max,
                            const SolverOptions& opt = {}) {
    bc.validate();
    if (n_max < 1) throw ParameterError("n_max must be at least 1");
    Spectrum s;
    s.bc = bc;
    s.n_max = n_max;
    s.values.assign(n_max, 0.0);
    numerics::parallel_for(n_max, [&](std::size_t i) {
        const double a = eigenvalue(q, bc, i + 1, opt);
        const double w = winding(q, bc, a, opt);
        if (std::abs(w - static_cast<double>(i)) > 1e-6)
            throw SolverError("winding check failed at eigenvalue " + std::to_string(i + 1));
        s.values[i] = a;
    });
    for (std::size_t i = 1; i < n_max; ++i)
        if (!(s.values[i] > s.values[i - 1]))
            throw SolverError("computed spectrum not strictly increasing at index " + std::to_string(i + 1));
    return s;
}

/// tau_alpha(a) = integral of s^2 with s(0) = sin(alpha), s'(0) = cos(alpha); the boundary
/// defect at pi against beta must be below opt.defect_tol.
inline double norming_constant(const PotentialSpec& q, const BoundaryConditions& bc, double a,
                               const SolverOptions& opt = {}) {
    const double S = prufer_scale(q, a);
    // normalize so that (s, s'/S) starts on the unit circle
    const double nu = std::hypot(std::sin(bc.alpha), std::cos(bc.alpha) / S);
    std::array<double, 3> y{std::sin(bc.alpha) / nu, std::cos(bc.alpha) / nu, 0.0};
    auto rhs = [&](const std::array<double, 3>& s, std::array<double, 3>& ds, double x) {
        ds[0] = s[1];
        ds[1] = (q(x) - a) * s[0];
        ds[2] = s[0] * s[0];
    };
    numerics::integrate_pieces(rhs, y, 0.0, pi, q.singular_points(), max_step_for(q, a), opt.ode);
    const double vx = y[0], vy = y[1] / S;
    const double tx = std::sin(bc.beta), ty = -std::cos(bc.beta) / S;
    const double defect = std::abs(vx * ty - vy * tx) / (std::hypot(vx, vy) * std::hypot(tx, ty));
    if (defect > opt.defect_tol)
        throw PreconditionError("norming_constant: z = " + std::to_string(a) +
                                " is not an eigenvalue (boundary defect " + std::to_string(defect) + ")");
    return y[2] * nu * nu;
}

inline SpectralMeasure spectral_measure(const PotentialSpec& q, const BoundaryConditions& bc,
                                        std::size_t n_max, const SolverOptions& opt = {}) {
    const Spectrum s = eigenvalues(q, bc, n_max, opt);
    SpectralMeasure m;
    m.bc = bc;
    m.eigenvalues = s.values;
    m.masses.assign(n_max, 0.0);
    numerics::parallel_for(n_max, [&](std::size_t i) {
        const double tau = norming_constant(q, bc, s.values[i], opt);
        if (!(tau > 0.0)) throw SolverError("non-positive norming constant at index " + std::to_string(i + 1));
        m.masses[i] = 1.0 / tau;
    });
    return m;
}

/// Samples of s (s(0) = sin(alpha), s'(0) = cos(alpha)) at the given increasing nodes in [0,pi].
inline std::vector<double> eigenfunction(const PotentialSpec& q, double alpha, double z,
                                         const std::vector<double>& nodes, const SolverOptions& opt = {}) {
    std::vector<double> out(nodes.size());
    std::array<double, 2> y{std::sin(alpha), std::cos(alpha)};
    auto rhs = [&](const std::array<double, 2>& s, std::array<double, 2>& ds, double x) {
        ds[0] = s[1];
        ds[1] = (q(x) - z) * s[0];
    };
    const double h = max_step_for(q, z);
    const auto breaks = q.singular_points();
    double x = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        numerics::integrate_pieces(rhs, y, x, nodes[j], breaks, h, opt.ode);
        x = nodes[j];
        out[j] = y[0];
    }
    return out;
}

struct AsymptoticsReport {
    std::vector<double> remainders;  // alpha_n = a_n - model(n)
    std::vector<double> envelope;    // max_{m >= n} |alpha_m|
    double first_quartile_max = 0.0;
    double final_quartile_max = 0.0;
    /// final_quartile_max / first_quartile_max (0 when both vanish)
    double decay_ratio = 0.0;
};

inline AsymptoticsReport validate_asymptotics(const Spectrum& s, double q_mean) {
    const AsymptoticModel model = asymptotic_model(s.bc, q_mean + s.offset);
    AsymptoticsReport r;
    const std::size_t n = s.size();
    r.remainders.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.remainders[i] = s.values[i] - model.value(static_cast<double>(i + 1));
    r.envelope.resize(n);
    double env = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        env = std::max(env, std::abs(r.remainders[i]));
        r.envelope[i] = env;
    }
    const std::size_t quart = std::max<std::size_t>(1, n / 4);
    for (std::size_t i = 0; i < quart && i < n; ++i)
        r.first_quartile_max = std::max(r.first_quartile_max, std::abs(r.remainders[i]));
    for (std::size_t i = n - std::min(quart, n); i < n; ++i)
        r.final_quartile_max = std::max(r.final_quartile_max, std::abs(r.remainders[i]));
    if (r.first_quartile_max > 0.0) r.decay_ratio = r.final_quartile_max / r.first_quartile_max;
    return r;
}

/// Estimate of mean(q) from the top of a spectrum, eliminating a c/n^2 remainder by
/// Richardson extrapolation between indices N/2 and N.
inline double implied_mean(const std::vector<double>& values, const BoundaryConditions& bc) {
    if (values.empty()) throw ParameterError("implied_mean needs at least one eigenvalue");
    const AsymptoticModel model = asymptotic_model(bc, 0.0);
    const std::size_t N = values.size();
    const double dN = values[N - 1] - model.value(static_cast<double>(N));
    if (N < 4) return dN;
    const std::size_t M = N / 2;
    const double dM = values[M - 1] - model.value(static_cast<double>(M));
    const double n2 = model.leading(static_cast<double>(N)), m2 = model.leading(static_cast<double>(M));
    return (n2 * dN - m2 * dM) / (n2 - m2);
}

}  // namespace sturm
}  // namespace spectralmix

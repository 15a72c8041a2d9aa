#pragma once

// Least-squares fit of a finite potential family to one or two Dirichlet-type spectra.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spectralmix/errors.hpp"
#include "spectralmix/numerics/levenberg_marquardt.hpp"
#include "spectralmix/numerics/ode.hpp"
#include "spectralmix/numerics/parallel.hpp"
#include "spectralmix/potential.hpp"
#include "spectralmix/sturm.hpp"
#include "spectralmix/weyl.hpp"

namespace spectralmix {

/// spectrum1 belongs to (alpha1, beta) and spectrum2 to (alpha2, beta) of the triple.
/// An empty spectrum2 gives a single-spectrum fit.
struct ReconstructionProblem {
    std::vector<double> spectrum1;
    std::vector<double> spectrum2;
    TripleBoundary bc = TripleBoundary::make(pi / 2, 0.0, 0.0);
    /// family and partition of the fit; its parameters are ignored unless used as the start
    PotentialSpec family = PotentialSpec::cosine(std::vector<double>(5, 0.0));
    /// Tikhonov weight on cosine coefficients k >= 2
    double regularization = 1e-6;

    BoundaryConditions bc1() const { return bc.zero_bc(); }
    BoundaryConditions bc2() const { return bc.pole_bc(); }

    void validate() const {
        bc.validate();
        if (spectrum1.empty()) throw ParameterError("reconstruction needs a first spectrum");
        for (const auto* s : {&spectrum1, &spectrum2}) {
            for (std::size_t i = 0; i < s->size(); ++i) {
                if (!std::isfinite((*s)[i])) throw ParameterError("spectrum values must be finite");
                if (i > 0 && !((*s)[i] > (*s)[i - 1]))
                    throw ParameterError("spectrum must be strictly increasing");
            }
        }
        if (family.parameter_count() > spectrum1.size() + spectrum2.size())
            throw PreconditionError("more parameters (" + std::to_string(family.parameter_count()) +
                                    ") than eigenvalues (" +
                                    std::to_string(spectrum1.size() + spectrum2.size()) + ")");
        if (!(regularization >= 0.0)) throw ParameterError("regularization weight must be nonnegative");
    }
};

struct ReconstructOptions {
    /// per-eigenvalue weights on the squared misfit; empty means 1/(1 + |a_n|)
    std::vector<double> weights1, weights2;
    std::optional<PotentialSpec> initial;
    numerics::LmOptions lm{100};
    /// Jacobian singular values below this times the largest count as rank loss
    double rank_tol = 1e-10;
    SolverOptions solver{};
};

struct ReconstructionResult {
    PotentialSpec fitted = PotentialSpec::zero();
    std::vector<double> misfit1, misfit2;  // a_n(fitted) - target
    double residual_norm = 0.0;            // weighted, regularization included
    double max_abs_misfit = 0.0;
    Eigen::MatrixXd covariance;
    std::vector<double> singular_values;
    double condition_number = 1.0;
    /// right singular vector of the smallest singular value, set on rank loss
    std::vector<double> null_direction;
    int iterations = 0;
    std::vector<double> cost_trace;
    bool converged = false;
    std::string status;
};

class ReconstructionError : public FitError {
public:
    ReconstructionError(const std::string& what, ReconstructionResult r) : FitError(what), result(std::move(r)) {}
    ReconstructionResult result;
};

namespace reconstruct {

struct Sensitivity {
    std::vector<double> nodes;
    std::vector<double> values;  // phi_n^2 / |phi_n|^2
};

/// Composite Simpson weights on a uniform grid of [0,pi] with an odd node count.
inline std::vector<double> simpson_weights(std::size_t m) {
    if (m < 3 || m % 2 == 0) throw ParameterError("Simpson grid needs an odd node count >= 3");
    const double h = pi / static_cast<double>(m - 1);
    std::vector<double> w(m);
    for (std::size_t j = 0; j < m; ++j) w[j] = (j == 0 || j + 1 == m ? 1.0 : (j % 2 ? 4.0 : 2.0)) * h / 3.0;
    return w;
}

inline std::vector<double> uniform_nodes(std::size_t m) {
    std::vector<double> x(m);
    for (std::size_t j = 0; j < m; ++j) x[j] = pi * static_cast<double>(j) / static_cast<double>(m - 1);
    return x;
}

/// d a_n / d q(x) on a uniform grid of m nodes.
inline Sensitivity eigenvalue_sensitivity(const PotentialSpec& q, const BoundaryConditions& bc, std::size_t n,
                                          std::size_t m = 401, const SolverOptions& opt = {}) {
    bc.validate();
    if (m < 2) throw ParameterError("sensitivity grid needs at least 2 nodes");
    const double a = sturm::eigenvalue(q, bc, n, opt);
    const double tau = sturm::norming_constant(q, bc, a, opt);
    Sensitivity s;
    s.nodes = uniform_nodes(m);
    s.values = sturm::eigenfunction(q, bc.alpha, a, s.nodes, opt);
    for (double& v : s.values) v = v * v / tau;
    return s;
}

/// Simpson quadrature of sensitivity times a direction sampled on the same nodes.
inline double directional(const Sensitivity& s, const std::vector<double>& delta) {
    if (delta.size() != s.values.size()) throw ParameterError("direction length does not match the grid");
    const auto w = simpson_weights(s.values.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * s.values[j] * delta[j];
    return acc;
}

/// a_n and its gradient with respect to the family parameters, the integrals of
/// basis_k * s^2 being carried along the eigenfunction integration.
inline std::pair<double, std::vector<double>> eigenvalue_gradient(const PotentialSpec& q, const BoundaryConditions& bc,
                                                                  std::size_t n, const SolverOptions& opt = {}) {
    const double a = sturm::eigenvalue(q, bc, n, opt);
    const std::size_t p = q.parameter_count();
    const double S = sturm::prufer_scale(q, a);
    const double nu = std::hypot(std::sin(bc.alpha), std::cos(bc.alpha) / S);
    std::vector<double> y(3 + p, 0.0);
    y[0] = std::sin(bc.alpha) / nu;
    y[1] = std::cos(bc.alpha) / nu;
    auto rhs = [&](const std::vector<double>& s, std::vector<double>& ds, double x) {
        ds.resize(s.size());
        const double s2 = s[0] * s[0];
        ds[0] = s[1];
        ds[1] = (q(x) - a) * s[0];
        ds[2] = s2;
        for (std::size_t k = 0; k < p; ++k) ds[3 + k] = q.basis(k, x) * s2;
    };
    numerics::integrate_pieces(rhs, y, 0.0, pi, q.singular_points(), sturm::max_step_for(q, a), opt.ode);
    std::vector<double> g(p);
    for (std::size_t k = 0; k < p; ++k) g[k] = y[3 + k] / y[2];
    return {a, std::move(g)};
}

/// q(pi - x); a piecewise-constant partition is mirrored with it.
inline PotentialSpec reflect(const PotentialSpec& q) {
    std::vector<double> c = q.params();
    switch (q.kind()) {
        case PotentialKind::Cosine:
            for (std::size_t k = 1; k < c.size(); k += 2) c[k] = -c[k];
            return q.with_params(std::move(c));
        case PotentialKind::Grid:
            return PotentialSpec::grid(std::vector<double>(c.rbegin(), c.rend()));
        case PotentialKind::PiecewiseConstant: {
            std::vector<double> br;
            for (auto it = q.partition().rbegin(); it != q.partition().rend(); ++it) br.push_back(pi - *it);
            return PotentialSpec::piecewise_constant(std::vector<double>(c.rbegin(), c.rend()), std::move(br));
        }
    }
    return q;
}

/// Family member that is constant at the mean implied by the top of the first spectrum.
inline PotentialSpec default_initial(const ReconstructionProblem& prob) {
    const double mean = sturm::implied_mean(prob.spectrum1, prob.bc1());
    std::vector<double> c(prob.family.parameter_count(), 0.0);
    if (prob.family.kind() == PotentialKind::Cosine)
        c[0] = mean;
    else
        for (double& v : c) v = mean;
    return prob.family.with_params(std::move(c));
}

/// Max |a_n(q) - target_n| over a held-out spectrum.
inline double held_out_error(const PotentialSpec& q, const BoundaryConditions& bc, const std::vector<double>& target,
                             const SolverOptions& opt = {}) {
    if (target.empty()) return 0.0;
    const auto s = sturm::eigenvalues(q, bc, target.size(), opt);
    double e = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) e = std::max(e, std::abs(s.values[i] - target[i]));
    return e;
}

/// Fills the singular values and condition number; true when the smallest is below tol times the largest.
inline bool rank_deficient(const Eigen::MatrixXd& J, double tol, ReconstructionResult& res) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    res.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double smin = sv.size() ? sv[sv.size() - 1] : 0.0;
    res.condition_number = smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
    if (sv.size() > 0 && smin > tol * sv[0]) return false;
    if (sv.size() > 0) {
        const Eigen::VectorXd v = svd.matrixV().col(sv.size() - 1);
        res.null_direction.assign(v.data(), v.data() + v.size());
    }
    return true;
}

inline ReconstructionResult reconstruct(const ReconstructionProblem& prob, const ReconstructOptions& opt = {}) {
    prob.validate();
    const std::size_t n1 = prob.spectrum1.size(), n2 = prob.spectrum2.size();
    const std::size_t p = prob.family.parameter_count();
    auto weights = [](const std::vector<double>& given, const std::vector<double>& target) {
        if (given.empty()) {
            std::vector<double> w;
            for (double a : target) w.push_back(1.0 / (1.0 + std::abs(a)));
            return w;
        }
        if (given.size() != target.size()) throw ParameterError("weight count does not match spectrum length");
        for (double w : given)
            if (!(w > 0.0)) throw ParameterError("weights must be positive");
        return given;
    };
    const std::vector<double> w1 = weights(opt.weights1, prob.spectrum1), w2 = weights(opt.weights2, prob.spectrum2);
    std::vector<std::size_t> reg;
    if (prob.family.kind() == PotentialKind::Cosine && prob.regularization > 0.0)
        for (std::size_t k = 2; k < p; ++k) reg.push_back(k);
    const std::size_t rows = n1 + n2 + reg.size();

    PotentialSpec start = opt.initial ? *opt.initial : default_initial(prob);
    if (start.kind() != prob.family.kind() || start.parameter_count() != p || start.partition() != prob.family.partition())
        throw ParameterError("initial potential is not in the fitted family");

    auto spec_of = [&](const Eigen::VectorXd& x) {
        return prob.family.with_params(std::vector<double>(x.data(), x.data() + x.size()));
    };
    const double lam = std::sqrt(prob.regularization);
    std::vector<double> mis1(n1), mis2(n2);
    auto model = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
        const PotentialSpec q = spec_of(x);
        r.resize(static_cast<Eigen::Index>(rows));
        if (J) J->setZero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
        numerics::parallel_for(n1 + n2, [&](std::size_t i) {
            const bool first = i < n1;
            const std::size_t n = first ? i + 1 : i - n1 + 1;
            const BoundaryConditions bc = first ? prob.bc1() : prob.bc2();
            const double sw = std::sqrt(first ? w1[n - 1] : w2[n - 1]);
            const double target = first ? prob.spectrum1[n - 1] : prob.spectrum2[n - 1];
            const auto ri = static_cast<Eigen::Index>(i);
            if (J) {
                const auto [a, g] = eigenvalue_gradient(q, bc, n, opt.solver);
                r[ri] = sw * (a - target);
                for (std::size_t k = 0; k < p; ++k) (*J)(ri, static_cast<Eigen::Index>(k)) = sw * g[k];
            } else {
                r[ri] = sw * (sturm::eigenvalue(q, bc, n, opt.solver) - target);
            }
        });
        for (std::size_t j = 0; j < reg.size(); ++j) {
            const auto row = static_cast<Eigen::Index>(n1 + n2 + j);
            r[row] = lam * x[static_cast<Eigen::Index>(reg[j])];
            if (J) (*J)(row, static_cast<Eigen::Index>(reg[j])) = lam;
        }
    };

    Eigen::VectorXd x0(static_cast<Eigen::Index>(p));
    for (std::size_t k = 0; k < p; ++k) x0[static_cast<Eigen::Index>(k)] = start.params()[k];
    // refuse up front when the start is already rank deficient; LM would only follow noise there
    {
        Eigen::VectorXd r;
        Eigen::MatrixXd J;
        model(x0, r, &J);
        ReconstructionResult pre;
        pre.fitted = start;
        pre.residual_norm = r.norm();
        pre.status = "rank-deficient start";
        if (rank_deficient(J, opt.rank_tol, pre))
            throw ReconstructionError("rank-deficient Jacobian at the initial potential: condition number " +
                                          std::to_string(pre.condition_number),
                                      pre);
    }
    const numerics::LmResult lm = numerics::levenberg_marquardt(model, x0, opt.lm);

    ReconstructionResult res;
    res.fitted = spec_of(lm.x);
    res.iterations = lm.iterations;
    res.cost_trace = lm.cost_trace;
    res.status = lm.status;
    res.residual_norm = lm.residual.norm();
    for (std::size_t i = 0; i < n1 + n2; ++i) {
        const double sw = std::sqrt(i < n1 ? w1[i] : w2[i - n1]);
        const double m = lm.residual[static_cast<Eigen::Index>(i)] / sw;
        (i < n1 ? mis1[i] : mis2[i - n1]) = m;
        res.max_abs_misfit = std::max(res.max_abs_misfit, std::abs(m));
    }
    res.misfit1 = mis1;
    res.misfit2 = mis2;

    const bool deficient = rank_deficient(lm.jacobian, opt.rank_tol, res);
    const Eigen::MatrixXd JtJ = lm.jacobian.transpose() * lm.jacobian;
    const double dof = std::max<double>(1.0, double(rows) - double(p));
    res.covariance = (lm.residual.squaredNorm() / dof) * JtJ.completeOrthogonalDecomposition().pseudoInverse();
    res.converged = lm.converged;

    if (deficient)
        throw ReconstructionError("rank-deficient Jacobian: condition number " + std::to_string(res.condition_number),
                                  res);
    if (!res.converged)
        throw ReconstructionError("reconstruction did not converge (" + lm.status + "), residual " +
                                      std::to_string(res.residual_norm),
                                  res);
    return res;
}

}  // namespace reconstruct
}  // namespace spectralmix

#pragma once

// Real potentials on (0,pi) in three parameterized families.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spectralmix/errors.hpp"

namespace spectralmix {

inline constexpr double pi = std::numbers::pi;

enum class PotentialKind {
    Grid,               // samples on a uniform grid of [0,pi], linear interpolation
    PiecewiseConstant,  // values on a partition of [0,pi]
    Cosine,             // c_0 + sum_k c_k cos(kx)
};

inline std::string_view to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::Grid: return "grid";
        case PotentialKind::PiecewiseConstant: return "piecewise_constant";
        case PotentialKind::Cosine: return "cosine";
    }
    return "unknown";
}

class PotentialSpec {
public:
    /// q == 0, stored as a one-term cosine series.
    static PotentialSpec zero() { return cosine({0.0}); }
    static PotentialSpec constant(double c) { return cosine({c}); }

    /// coeffs[k] multiplies cos(kx); coeffs[0] is the constant term.
    static PotentialSpec cosine(std::vector<double> coeffs) {
        if (coeffs.empty()) coeffs.push_back(0.0);
        PotentialSpec p(PotentialKind::Cosine);
        p.params_ = std::move(coeffs);
        p.validate();
        return p;
    }

    /// Samples at x_j = j*pi/(M-1), j = 0..M-1, M >= 2.
    static PotentialSpec grid(std::vector<double> samples) {
        PotentialSpec p(PotentialKind::Grid);
        p.params_ = std::move(samples);
        p.validate();
        return p;
    }

    /// Interior break points 0 < t_1 < ... < t_{K-1} < pi and K values.
    /// An empty break list gives a uniform partition of [0,pi] into K cells.
    static PotentialSpec piecewise_constant(std::vector<double> values,
                                            std::vector<double> breaks = {}) {
        PotentialSpec p(PotentialKind::PiecewiseConstant);
        if (breaks.empty() && values.size() > 1) {
            for (std::size_t i = 1; i < values.size(); ++i)
                breaks.push_back(pi * static_cast<double>(i) / static_cast<double>(values.size()));
        }
        p.params_ = std::move(values);
        p.breaks_ = std::move(breaks);
        p.validate();
        return p;
    }

    PotentialKind kind() const { return kind_; }
    const std::vector<double>& params() const { return params_; }
    std::size_t parameter_count() const { return params_.size(); }

    /// Break points of the piecewise-constant family (empty otherwise).
    const std::vector<double>& partition() const { return breaks_; }

    /// Same family and partition with new parameters.
    PotentialSpec with_params(std::vector<double> params) const {
        if (params.size() != params_.size())
            throw ParameterError("parameter count mismatch for potential family");
        PotentialSpec p = *this;
        p.params_ = std::move(params);
        p.validate();
        return p;
    }

    /// Checked evaluation.
    double eval(double x) const {
        if (!(x >= 0.0 && x <= pi))
            throw DomainError("potential evaluated outside [0,pi]: x = " + std::to_string(x));
        return (*this)(x);
    }

    /// Unchecked evaluation used by the integrators; x is clamped to [0,pi].
    double operator()(double x) const {
        x = std::clamp(x, 0.0, pi);
        switch (kind_) {
            case PotentialKind::Cosine: return eval_cosine(x);
            case PotentialKind::Grid: return eval_grid(x);
            case PotentialKind::PiecewiseConstant: return eval_piecewise(x);
        }
        return 0.0;
    }

    /// (1/pi) * integral of q over (0,pi).
    double mean() const {
        switch (kind_) {
            case PotentialKind::Cosine: return params_[0];
            case PotentialKind::Grid: {
                // exact integral of the linear interpolant
                const std::size_t m = params_.size();
                double s = 0.5 * (params_.front() + params_.back());
                for (std::size_t j = 1; j + 1 < m; ++j) s += params_[j];
                return s / static_cast<double>(m - 1);
            }
            case PotentialKind::PiecewiseConstant: {
                double s = 0.0;
                double left = 0.0;
                for (std::size_t i = 0; i < params_.size(); ++i) {
                    const double right = i < breaks_.size() ? breaks_[i] : pi;
                    s += params_[i] * (right - left);
                    left = right;
                }
                return s / pi;
            }
        }
        return 0.0;
    }

    /// q + c.
    PotentialSpec shifted(double c) const {
        PotentialSpec p = *this;
        if (kind_ == PotentialKind::Cosine) {
            p.params_[0] += c;
        } else {
            for (double& v : p.params_) v += c;
        }
        return p;
    }

    /// Upper bound on |q(x) - mean(q)|, used to size integration steps.
    double deviation_bound() const {
        const double m = mean();
        double d = 0.0;
        if (kind_ == PotentialKind::Cosine) {
            for (std::size_t k = 1; k < params_.size(); ++k) d += std::abs(params_[k]);
        } else {
            for (double v : params_) d = std::max(d, std::abs(v - m));
        }
        return d;
    }

    /// Points in (0,pi) where q or q' is discontinuous; integration restarts there.
    std::vector<double> singular_points() const {
        if (kind_ == PotentialKind::PiecewiseConstant) return breaks_;
        if (kind_ == PotentialKind::Grid) {
            std::vector<double> nodes;
            const std::size_t m = params_.size();
            for (std::size_t j = 1; j + 1 < m; ++j)
                nodes.push_back(pi * static_cast<double>(j) / static_cast<double>(m - 1));
            return nodes;
        }
        return {};
    }

    /// Derivative of q(x) with respect to parameter k (all families are linear).
    double basis(std::size_t k, double x) const {
        if (k >= params_.size()) throw ParameterError("basis index out of range");
        x = std::clamp(x, 0.0, pi);
        switch (kind_) {
            case PotentialKind::Cosine: return std::cos(static_cast<double>(k) * x);
            case PotentialKind::Grid: {
                const double h = pi / static_cast<double>(params_.size() - 1);
                const double d = std::abs(x - h * static_cast<double>(k)) / h;
                return d < 1.0 ? 1.0 - d : 0.0;
            }
            case PotentialKind::PiecewiseConstant:
                return cell_of(x) == k ? 1.0 : 0.0;
        }
        return 0.0;
    }

    bool operator==(const PotentialSpec&) const = default;

private:
    explicit PotentialSpec(PotentialKind k) : kind_(k) {}

    void validate() const {
        for (double v : params_)
            if (!std::isfinite(v)) throw ParameterError("potential parameters must be finite");
        switch (kind_) {
            case PotentialKind::Cosine:
                if (params_.empty()) throw ParameterError("cosine series needs at least c_0");
                break;
            case PotentialKind::Grid:
                if (params_.size() < 2) throw ParameterError("grid potential needs at least 2 samples");
                break;
            case PotentialKind::PiecewiseConstant: {
                if (params_.empty()) throw ParameterError("piecewise-constant potential needs a value");
                if (breaks_.size() + 1 != params_.size())
                    throw ParameterError("piecewise-constant potential: need one more value than break points");
                double prev = 0.0;
                for (double t : breaks_) {
                    if (!(t > prev && t < pi))
                        throw ParameterError("break points must be strictly increasing inside (0,pi)");
                    prev = t;
                }
                break;
            }
        }
    }

    double eval_cosine(double x) const {
        // Clenshaw recurrence for sum c_k cos(kx)
        const double c2 = 2.0 * std::cos(x);
        double b1 = 0.0, b2 = 0.0;
        for (std::size_t k = params_.size(); k-- > 1;) {
            const double b0 = params_[k] + c2 * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        return params_[0] + 0.5 * c2 * b1 - b2;
    }

    double eval_grid(double x) const {
        const std::size_t m = params_.size();
        const double h = pi / static_cast<double>(m - 1);
        std::size_t j = std::min(static_cast<std::size_t>(x / h), m - 2);
        const double t = (x - h * static_cast<double>(j)) / h;
        return (1.0 - t) * params_[j] + t * params_[j + 1];
    }

    std::size_t cell_of(double x) const {
        return static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin());
    }

    double eval_piecewise(double x) const { return params_[cell_of(x)]; }

    PotentialKind kind_;
    std::vector<double> params_;
    std::vector<double> breaks_;
};

}  // namespace spectralmix

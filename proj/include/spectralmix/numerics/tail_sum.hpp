#pragma once

// Sums of slowly decaying series sum_{n >= first} f(n) for f defined on a continuum.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include <boost/math/quadrature/gauss.hpp>

namespace spectralmix::numerics {

struct TailSumOptions {
    /// Terms below this index are summed explicitly; Euler-Maclaurin is applied from here.
    double explicit_until = 1000.0;
    int panels = 4;
};

/// sum_{n=first}^{inf} f(n) where f is smooth and decays at least like x^{-2} for x >= M.
/// Terms first..M-1 are summed explicitly; the remainder uses Euler-Maclaurin with the
/// integral mapped onto (0,1] by x = M/t and evaluated with Gauss-Legendre panels.
template <class F>
auto tail_sum(F&& f, std::size_t first, TailSumOptions opt = {}) -> decltype(f(1.0)) {
    using R = decltype(f(1.0));
    const std::size_t m = std::max<std::size_t>(first, static_cast<std::size_t>(std::ceil(opt.explicit_until)));
    R sum{};
    for (std::size_t n = first; n < m; ++n) sum += f(static_cast<double>(n));

    const double M = static_cast<double>(m);
    using Gauss = boost::math::quadrature::gauss<double, 20>;
    const auto& x = Gauss::abscissa();
    const auto& w = Gauss::weights();
    R integral{};
    const double width = 1.0 / opt.panels;
    for (int p = 0; p < opt.panels; ++p) {
        const double c = (p + 0.5) * width, hw = 0.5 * width;
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (double s : {-1.0, 1.0}) {
                const double t = c + s * hw * x[i];
                integral += (w[i] * hw) * f(M / t) * (M / (t * t));
            }
        }
    }
    const double h = 0.25;
    auto g = [&](double k) { return f(M + k * h) - f(M - k * h); };
    const R d1 = (45.0 * g(1) - 9.0 * g(2) + g(3)) / (60.0 * h);
    const R d3 = (-13.0 * g(1) + 8.0 * g(2) - g(3)) / (8.0 * h * h * h);
    const R d5 = (5.0 * g(1) - 4.0 * g(2) + g(3)) / (2.0 * h * h * h * h * h);
    sum += integral + 0.5 * f(M) - d1 / 12.0 + d3 / 720.0 - d5 / 30240.0;
    return sum;
}

}  // namespace spectralmix::numerics

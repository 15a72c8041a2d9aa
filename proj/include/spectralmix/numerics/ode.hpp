#pragma once

// Adaptive integration of small ODE systems across the smooth pieces of a potential.

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "spectralmix/errors.hpp"

namespace spectralmix::numerics {

struct OdeOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
};

/// Integrate y' = sys(y, x) from `from` to `to` (either direction), restarting at every
/// point of `breaks` strictly between the endpoints. Steps never exceed `max_step`.
/// The right-hand side is only sampled inside each piece.
template <class State, class System>
void integrate_pieces(System&& sys, State& y, double from, double to,
                      const std::vector<double>& breaks, double max_step,
                      const OdeOptions& opt = {}) {
    namespace ode = boost::numeric::odeint;
    if (from == to) return;
    std::vector<double> stops;
    const double lo = std::min(from, to), hi = std::max(from, to);
    for (double b : breaks)
        if (b > lo && b < hi) stops.push_back(b);
    if (to > from)
        std::sort(stops.begin(), stops.end());
    else
        std::sort(stops.rbegin(), stops.rend());
    stops.push_back(to);

    auto stepper = ode::make_controlled(opt.abs_tol, opt.rel_tol, max_step,
                                        ode::runge_kutta_fehlberg78<State>());
    double x = from;
    try {
        for (double stop : stops) {
            // integrate forward in s = |x - start|, so backward pieces use dy/ds = -f
            const double len = std::abs(stop - x);
            const double dir = stop > x ? 1.0 : -1.0;
            const double start = x;
            // keep stage abscissae strictly inside the piece so jumps are seen from the correct side
            const double margin = 1e-13 * (1.0 + std::abs(stop));
            const double pl = std::min(x, stop) + margin, ph = std::max(x, stop) - margin;
            auto piece = [&](const State& st, State& ds, double s) {
                sys(st, ds, std::clamp(start + dir * s, pl, ph));
                if (dir < 0)
                    for (auto& v : ds) v = -v;
            };
            ode::integrate_adaptive(stepper, piece, y, 0.0, len, std::min(max_step, 0.5 * len));
            x = stop;
        }
    } catch (const std::exception& e) {
        throw SolverError(std::string("integration failure near x = ") + std::to_string(x) + ": " + e.what());
    }
    for (const auto& v : y) {
        if (!std::isfinite(std::abs(v)))
            throw SolverError("integration failure: non-finite state at x = " + std::to_string(to));
    }
}

}  // namespace spectralmix::numerics

#pragma once

// Subcommands of the spectralmix command-line tool. Exit codes:
//   0 success, 1 self-test failure, 2 configuration error, 3 solver failure,
//   4 refusal (a hypothesis or precondition does not hold), 5 non-convergence.

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spectralmix/cebotarev.hpp"
#include "spectralmix/completion.hpp"
#include "spectralmix/errors.hpp"
#include "spectralmix/io.hpp"
#include "spectralmix/potential.hpp"
#include "spectralmix/reconstruct.hpp"
#include "spectralmix/sturm.hpp"
#include "spectralmix/weyl.hpp"

namespace spectralmix::cli {

using io::json;

enum ExitCode : int { Ok = 0, SelftestFailed = 1, BadConfig = 2, SolverFailure = 3, Refused = 4, NotConverged = 5 };

struct RunConfig {
    std::string subcommand;
    std::string input;
    std::string output = ".";
    std::optional<std::size_t> n_max;
    std::optional<std::size_t> truncation;
    std::optional<double> tol;
    std::string grid;
    std::uint64_t seed = 0;

    void validate() const {
        if (tol && !(*tol > 0.0)) throw ConfigError("--tol must be positive");
        if (n_max && *n_max < 1) throw ConfigError("--n-max must be at least 1");
        if (truncation && *truncation < 1) throw ConfigError("--truncation must be at least 1");
        if (subcommand != "selftest" && input.empty()) throw ConfigError(subcommand + " needs --input");
    }

    std::string path(const std::string& name) const { return (std::filesystem::path(output) / name).string(); }
};

struct GridSpec {
    enum class Kind { Real, Complex, Random, Point } kind = Kind::Real;
    std::vector<double> values;
};

/// real:X0,X1,COUNT | complex:RE0,RE1,NRE,IM0,IM1,NIM | random:COUNT,RE0,RE1,IM0,IM1 | point:RE,IM
inline GridSpec parse_grid(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ConfigError("--grid: expected KIND:VALUES");
    const std::string kind = s.substr(0, colon);
    GridSpec g;
    std::stringstream ss(s.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || !std::isfinite(v)) throw ConfigError("--grid: bad number \"" + item + "\"");
        g.values.push_back(v);
    }
    auto count = [&](std::size_t i) {
        const double c = g.values[i];
        if (!(c >= 1.0) || c != std::floor(c)) throw ConfigError("--grid: counts must be positive integers");
    };
    if (kind == "real") {
        g.kind = GridSpec::Kind::Real;
        if (g.values.size() != 3) throw ConfigError("--grid real: expected X0,X1,COUNT");
        count(2);
        if (g.values[2] < 2 || !(g.values[1] > g.values[0])) throw ConfigError("--grid real: need X1 > X0 and COUNT >= 2");
    } else if (kind == "complex") {
        g.kind = GridSpec::Kind::Complex;
        if (g.values.size() != 6) throw ConfigError("--grid complex: expected RE0,RE1,NRE,IM0,IM1,NIM");
        count(2);
        count(5);
    } else if (kind == "random") {
        g.kind = GridSpec::Kind::Random;
        if (g.values.size() != 5) throw ConfigError("--grid random: expected COUNT,RE0,RE1,IM0,IM1");
        count(0);
        if (!(g.values[2] >= g.values[1]) || !(g.values[4] >= g.values[3]))
            throw ConfigError("--grid random: ranges must be ordered");
    } else if (kind == "point") {
        g.kind = GridSpec::Kind::Point;
        if (g.values.size() != 2) throw ConfigError("--grid point: expected RE,IM");
    } else {
        throw ConfigError("--grid: unknown kind \"" + kind + "\"");
    }
    return g;
}

/// Points of a non-real grid; random grids draw from a generator seeded with `seed`.
inline std::vector<cplx> grid_points(const GridSpec& g, std::uint64_t seed) {
    std::vector<cplx> z;
    const auto& v = g.values;
    auto lin = [](double a, double b, std::size_t n, std::size_t i) {
        return n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    };
    switch (g.kind) {
        case GridSpec::Kind::Complex: {
            const auto nr = static_cast<std::size_t>(v[2]), ni = static_cast<std::size_t>(v[5]);
            for (std::size_t i = 0; i < ni; ++i)
                for (std::size_t r = 0; r < nr; ++r) z.emplace_back(lin(v[0], v[1], nr, r), lin(v[3], v[4], ni, i));
            break;
        }
        case GridSpec::Kind::Random: {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> re(v[1], v[2]), im(v[3], v[4]);
            for (std::size_t i = 0; i < static_cast<std::size_t>(v[0]); ++i) {
                const double x = re(rng);
                z.emplace_back(x, im(rng));
            }
            break;
        }
        case GridSpec::Kind::Point: z.emplace_back(v[0], v[1]); break;
        case GridSpec::Kind::Real: throw ConfigError("real grids are handled by the plot emitter");
    }
    return z;
}

inline SolverOptions solver_options(const RunConfig& cfg) {
    SolverOptions o;
    if (cfg.tol) o.eigen_rel_tol = *cfg.tol;
    return o;
}

// ---- forward ----

inline int cmd_forward(const RunConfig& cfg, std::ostream& out) {
    const json j = io::read_json(cfg.input);
    io::require_keys(j, {"potential", "bc", "n_max"}, "forward input");
    const PotentialSpec q = io::potential_from_json(io::member(j, "potential", "forward input"));
    const BoundaryConditions bc = io::bc_from_json(io::member(j, "bc", "forward input"));
    std::size_t n = j.contains("n_max") ? io::index(j.at("n_max"), "n_max") : 20;
    if (cfg.n_max) n = *cfg.n_max;
    if (n < 1) throw ConfigError("n_max must be at least 1");
    const SolverOptions so = solver_options(cfg);
    const SpectralMeasure mu = sturm::spectral_measure(q, bc, n, so);

    io::Csv spec({"index", "eigenvalue", "norming_constant", "mass"});
    for (std::size_t i = 0; i < n; ++i)
        spec.row({double(i + 1), mu.eigenvalues[i], 1.0 / mu.masses[i], mu.masses[i]});
    spec.save(cfg.path("spectrum.csv"));

    const Spectrum s{mu.eigenvalues, bc, n, 0.0};
    const auto rep = sturm::validate_asymptotics(s, q.mean());
    const AsymptoticModel model = asymptotic_model(bc, q.mean());
    io::Csv asy({"index", "eigenvalue", "model", "remainder", "envelope"});
    for (std::size_t i = 0; i < n; ++i)
        asy.row({double(i + 1), mu.eigenvalues[i], model.value(double(i + 1)), rep.remainders[i], rep.envelope[i]});
    asy.save(cfg.path("asymptotics.csv"));
    out << "forward: " << n << " eigenvalues written to " << cfg.path("spectrum.csv") << "\n";
    return Ok;
}

// ---- mfunc ----

inline int cmd_mfunc(const RunConfig& cfg, std::ostream& out) {
    const json j = io::read_json(cfg.input);
    io::require_keys(j, {"potential", "bc", "exclusion", "n_markers"}, "mfunc input");
    const PotentialSpec q = io::potential_from_json(io::member(j, "potential", "mfunc input"));
    const TripleBoundary tb = io::triple_from_json(io::member(j, "bc", "mfunc input"));
    const double excl = j.contains("exclusion") ? io::number(j.at("exclusion"), "exclusion") : 0.05;
    if (excl < 0.0) throw ConfigError("exclusion: must be nonnegative");
    std::size_t markers = j.contains("n_markers") ? io::index(j.at("n_markers"), "n_markers") : 20;
    if (cfg.n_max) markers = *cfg.n_max;
    if (markers < 1) throw ConfigError("n_markers must be at least 1");
    const GridSpec g = parse_grid(cfg.grid.empty() ? "real:0.01,30,3000" : cfg.grid);
    WeylOptions wo;
    wo.solver = solver_options(cfg);

    std::vector<double> pm, zm;
    if (g.kind == GridSpec::Kind::Real) {
        const auto plot = weyl::real_axis_plot(q, tb, g.values[0], g.values[1], static_cast<std::size_t>(g.values[2]),
                                               excl, markers, wo);
        io::Csv csv({"x", "m"});
        for (std::size_t i = 0; i < plot.x.size(); ++i) csv.row({plot.x[i], plot.m[i]});
        csv.save(cfg.path("mfunc.csv"));
        pm = plot.pole_markers;
        zm = plot.zero_markers;
        out << "mfunc: " << plot.x.size() << " real points\n";
    } else {
        const auto pts = grid_points(g, cfg.seed);
        std::vector<cplx> m(pts.size());
        numerics::parallel_for(pts.size(), [&](std::size_t i) { m[i] = weyl::m_direct(q, tb, pts[i], wo); });
        io::Csv csv({"re_z", "im_z", "re_m", "im_m"});
        for (std::size_t i = 0; i < pts.size(); ++i) csv.row({pts[i].real(), pts[i].imag(), m[i].real(), m[i].imag()});
        csv.save(cfg.path("mfunc.csv"));
        pm = sturm::eigenvalues(q, tb.pole_bc(), markers, wo.solver).values;
        zm = sturm::eigenvalues(q, tb.zero_bc(), markers, wo.solver).values;
        auto show = [](cplx z) {
            return io::fmt(z.real()) + (std::signbit(z.imag()) ? "-" : "+") + io::fmt(std::abs(z.imag())) + "i";
        };
        if (pts.size() == 1)
            out << "m(" << show(pts[0]) << ") = " << show(m[0]) << "\n";
        else
            out << "mfunc: " << pts.size() << " complex points\n";
    }
    for (const auto& [name, vals] : {std::pair{"markers_poles.csv", &pm}, std::pair{"markers_zeros.csv", &zm}}) {
        io::Csv csv({"index", "value"});
        for (std::size_t i = 0; i < vals->size(); ++i) csv.row({double(i + 1), (*vals)[i]});
        csv.save(cfg.path(name));
    }
    return Ok;
}

// ---- complete ----

inline int cmd_complete(const RunConfig& cfg, std::ostream& out) {
    const json j = io::read_json(cfg.input);
    const MixedSpectralData d = io::mixed_data_from_json(j);
    CompletionOptions o;
    if (j.contains("options")) io::apply_completion_options(j.at("options"), o);
    if (cfg.truncation) o.truncation = *cfg.truncation;
    if (cfg.tol) o.residual_tol = *cfg.tol;
    CompletionMode mode = !d.index_maps ? CompletionMode::Matching
                          : d.anchor    ? CompletionMode::Anchored
                                        : CompletionMode::AbsolutelyConvergent;
    if (j.contains("mode")) mode = io::mode_from_json(j.at("mode"));

    try {
        const CompletionResult r =
            mode == CompletionMode::Matching ? completion::complete_matching(d, o) : completion::complete_nonmatching(d, mode, o);
        io::write_json(cfg.path("completion.json"), io::to_json(r));
        out << "complete: " << r.indices.size() << " zeros recovered, residual " << io::fmt(r.residual_norm) << "\n";
        return Ok;
    } catch (const ConvergenceError& e) {
        io::write_json(cfg.path("completion.json"), io::to_json(e.result));
        throw;
    } catch (const RefusalError& e) {
        json rj{{"refused", e.what()}};
        if (e.report) rj["hypotheses"] = io::to_json(*e.report);
        io::write_json(cfg.path("completion.json"), rj);
        throw;
    }
}

// ---- reconstruct ----

inline int cmd_reconstruct(const RunConfig& cfg, std::ostream& out) {
    const io::ReconstructionInput in = io::reconstruction_from_json(io::read_json(cfg.input));
    ReconstructOptions o = in.options;
    o.solver = solver_options(cfg);
    auto save = [&](const ReconstructionResult& r) {
        io::write_json(cfg.path("reconstruction.json"), io::to_json(r));
        io::Csv csv({"iteration", "cost", "residual_norm"});
        for (std::size_t i = 0; i < r.cost_trace.size(); ++i)
            csv.row({double(i), r.cost_trace[i], std::sqrt(2.0 * r.cost_trace[i])});
        csv.save(cfg.path("residual_trace.csv"));
    };
    try {
        const ReconstructionResult r = reconstruct::reconstruct(in.problem, o);
        save(r);
        out << "reconstruct: residual " << io::fmt(r.residual_norm) << " after " << r.iterations << " iterations\n";
        return Ok;
    } catch (const ReconstructionError& e) {
        save(e.result);
        throw;
    }
}

// ---- check-hypotheses ----

/// Either mixed data with index maps, or {"potential", "bc", "k", "l", "n_max"?} solved forward.
inline int cmd_check_hypotheses(const RunConfig& cfg, std::ostream& out) {
    json j = io::read_json(cfg.input);
    const std::size_t cap = cfg.truncation ? *cfg.truncation : 200;
    if (cap < 10) throw ConfigError("check-hypotheses needs a cap (--truncation) of at least 10");
    cebotarev::HypothesisReport rep;
    if (j.contains("spectrum")) {
        const MixedSpectralData d = io::mixed_data_from_json(j);
        if (!d.index_maps) throw ConfigError("check-hypotheses: mixed data need index_maps");
        CompletionOptions o;
        if (j.contains("options")) io::apply_completion_options(j.at("options"), o);
        o.hypothesis_cap = cap;
        rep = completion::nonmatching_hypotheses(d, o);
    } else {
        io::require_keys(j, {"potential", "bc", "k", "l", "n_max"}, "check-hypotheses input");
        const PotentialSpec q = io::potential_from_json(io::member(j, "potential", "check-hypotheses input"));
        const TripleBoundary tb = io::triple_from_json(io::member(j, "bc", "check-hypotheses input"));
        const auto k = io::indices(io::member(j, "k", "check-hypotheses input"), "k");
        const auto l = io::indices(io::member(j, "l", "check-hypotheses input"), "l");
        if (k.empty() || k.size() != l.size()) throw ConfigError("k and l must be nonempty and of equal length");
        std::size_t n = 0;
        for (std::size_t i = 0; i < k.size(); ++i) n = std::max({n, k[i], l[i]});
        if (j.contains("n_max")) n = std::max(n, io::index(j.at("n_max"), "n_max"));
        if (cfg.n_max) n = std::max(n, *cfg.n_max);
        const SolverOptions so = solver_options(cfg);
        const Spectrum poles = sturm::eigenvalues(q, tb.pole_bc(), n, so);
        const Spectrum zeros = sturm::eigenvalues(q, tb.zero_bc(), n, so);
        rep = cebotarev::check_hypotheses(cebotarev::make_subsequences(poles, zeros, k, l), cap);
    }
    io::write_json(cfg.path("hypotheses.json"), io::to_json(rep));
    out << "check-hypotheses: H1 " << cebotarev::to_string(rep.h1.verdict) << ", H2 "
        << cebotarev::to_string(rep.h2.verdict) << ", H3 " << cebotarev::to_string(rep.h3.verdict) << "\n";
    return Ok;
}

// ---- selftest ----

struct SelftestItem {
    std::string name;
    double gap = 0.0;
    double tolerance = 0.0;
    bool pass() const { return gap <= tolerance; }
};

namespace golden {

/// m_{0,0} of the free potential, -sqrt(z) cot(pi sqrt(z)).
inline cplx free_m(cplx z) {
    const cplx w = std::sqrt(z);
    const cplx I(0.0, 1.0);
    // cot through the decaying exponential
    const cplx v = pi * w;
    const cplx e = std::exp(2.0 * I * (v.imag() >= 0 ? v : -v));
    const cplx c = I * (e + 1.0) / (e - 1.0);
    return -w * (v.imag() >= 0 ? c : -c);
}

}  // namespace golden

/// Free-potential golden checks. `truncation` sets the number of product pairs and measure
/// entries; `tol` replaces every tolerance.
inline std::vector<SelftestItem> selftest_items(std::size_t n_max, std::size_t truncation, std::optional<double> tol) {
    std::vector<SelftestItem> items;
    auto add = [&](std::string name, double gap, double t) { items.push_back({std::move(name), gap, tol ? *tol : t}); };
    const PotentialSpec q0 = PotentialSpec::zero();

    const struct {
        const char* name;
        BoundaryConditions bc;
        double shift;
    } cases[] = {{"DD", dirichlet_dirichlet, 0.0}, {"ND", neumann_dirichlet, 0.5}, {"NN", neumann_neumann, 1.0}};
    for (const auto& c : cases) {
        const auto s = sturm::eigenvalues(q0, c.bc, n_max);
        double e = 0.0;
        for (std::size_t n = 1; n <= n_max; ++n) e = std::max(e, std::abs(s[n] - (n - c.shift) * (n - c.shift)));
        add(std::string("spectrum ") + c.name, e, 1e-8);
    }
    {
        const auto dd = sturm::spectral_measure(q0, dirichlet_dirichlet, n_max);
        const auto nd = sturm::spectral_measure(q0, neumann_dirichlet, n_max);
        double e1 = 0.0, e2 = 0.0;
        for (std::size_t i = 0; i < n_max; ++i) {
            const double n = double(i + 1);
            e1 = std::max(e1, std::abs(dd.masses[i] / (2.0 * n * n / pi) - 1.0));
            e2 = std::max(e2, std::abs(nd.masses[i] / (2.0 / pi) - 1.0));
        }
        add("masses DD", e1, 1e-6);
        add("masses ND", e2, 1e-6);
    }

    const TripleBoundary tb = TripleBoundary::from_pair(dirichlet_dirichlet);
    const Spectrum poles = sturm::eigenvalues(q0, tb.pole_bc(), truncation);
    const Spectrum zeros = sturm::eigenvalues(q0, tb.zero_bc(), truncation);
    ProductRepresentation rep = make_representation(poles, zeros, tb.order());
    rep.C = 1.0 / pi;
    const SpectralMeasure mu = sturm::spectral_measure(q0, dirichlet_dirichlet, truncation);
    WeylOptions raw;
    raw.tail_correction = false;
    const double a = weyl::m_direct(q0, tb, cplx(0, 1)).real();
    const cplx probes[] = {{-1, 0}, {0, 1}, {2, 1}, {10, 0.5}, {-5, 3}};
    for (const cplx z : probes) {
        std::ostringstream label;
        label << "(" << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i)";
        const cplx ref = golden::free_m(z);
        const double s = std::abs(ref);
        add("m_direct " + label.str(), std::abs(weyl::m_direct(q0, tb, z) - ref) / s, 1e-6);
        // the bare truncated product, so that the truncation gap is what is measured
        add("m_product " + label.str(), std::abs(weyl::m_product(rep, z, truncation, raw) - ref) / s, 1e-3);
        add("m_herglotz " + label.str(), std::abs(weyl::m_herglotz(mu, a, z).value - ref) / s, 1e-3);
    }

    {
        const std::size_t N = 40;
        const SpectralMeasure m = sturm::spectral_measure(q0, tb.pole_bc(), N);
        const auto b = sturm::eigenvalues(q0, tb.zero_bc(), N).values;
        MixedSpectralData d;
        d.spectrum = m.eigenvalues;
        d.bc = tb;
        d.A = {1};
        d.masses[1] = m.masses[0];
        for (std::size_t n = 2; n <= N; ++n) d.known_zeros[n] = b[n - 1];
        CompletionOptions o;
        o.truncation = N;
        double gap = std::numeric_limits<double>::infinity();
        try {
            gap = std::abs(completion::complete_matching(d, o).recovered_zeros.at(0) - 0.25);
        } catch (const Error&) {
        }
        add("completion A={1}", gap, 1e-4);
    }
    return items;
}

inline int cmd_selftest(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.input.empty()) throw ConfigError("selftest takes no --input");
    const auto items = selftest_items(cfg.n_max.value_or(20), cfg.truncation.value_or(400), cfg.tol);
    bool ok = true;
    std::ostringstream csv;
    csv << "item,gap,tolerance,result\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-28s %12s %10s  %s\n", "item", "gap", "tolerance", "result");
    out << line;
    for (const auto& it : items) {
        ok = ok && it.pass();
        std::snprintf(line, sizeof line, "%-28s %12.3e %10.1e  %s\n", it.name.c_str(), it.gap, it.tolerance,
                      it.pass() ? "pass" : "FAIL");
        out << line;
        csv << '"' << it.name << "\"," << io::fmt(it.gap) << "," << io::fmt(it.tolerance) << ","
            << (it.pass() ? "pass" : "fail") << "\n";
    }
    if (cfg.output != ".") io::write_text(cfg.path("selftest.csv"), csv.str());
    out << (ok ? "selftest: all items pass\n" : "selftest: FAILED\n");
    return ok ? Ok : SelftestFailed;
}

// ---- entry point ----

inline int dispatch(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    if (cfg.subcommand != "selftest" || cfg.output != ".") std::filesystem::create_directories(cfg.output);
    if (cfg.subcommand == "forward") return cmd_forward(cfg, out);
    if (cfg.subcommand == "mfunc") return cmd_mfunc(cfg, out);
    if (cfg.subcommand == "complete") return cmd_complete(cfg, out);
    if (cfg.subcommand == "reconstruct") return cmd_reconstruct(cfg, out);
    if (cfg.subcommand == "check-hypotheses") return cmd_check_hypotheses(cfg, out);
    if (cfg.subcommand == "selftest") return cmd_selftest(cfg, out);
    throw ConfigError("unknown subcommand " + cfg.subcommand);
}

/// Runs with errors mapped to exit codes.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(cfg, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return BadConfig;
    } catch (const ParameterError& e) {
        err << "configuration error: " << e.what() << "\n";
        return BadConfig;
    } catch (const ConvergenceError& e) {
        err << "not converged: " << e.what() << "\n";
        return NotConverged;
    } catch (const PreconditionError& e) {
        err << "refused: " << e.what() << "\n";
        return Refused;
    } catch (const ReconstructionError& e) {
        err << (e.result.null_direction.empty() ? "not converged: " : "solver failure: ") << e.what() << "\n";
        return e.result.null_direction.empty() ? NotConverged : SolverFailure;
    } catch (const Error& e) {
        err << "solver failure: " << e.what() << "\n";
        return SolverFailure;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "configuration error: " << e.what() << "\n";
        return BadConfig;
    }
}

inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"spectralmix: inverse spectral problems from mixed spectral data"};
    RunConfig cfg;
    std::size_t n_max = 0, truncation = 0;
    double tol = 0.0;
    app.add_option("subcommand", cfg.subcommand, "forward | mfunc | complete | reconstruct | check-hypotheses | selftest")
        ->required()
        ->check(CLI::IsMember({"forward", "mfunc", "complete", "reconstruct", "check-hypotheses", "selftest"}));
    app.add_option("--input", cfg.input, "input JSON file");
    app.add_option("--output", cfg.output, "output directory")->capture_default_str();
    auto* o_n = app.add_option("--n-max", n_max, "number of eigenvalues");
    auto* o_t = app.add_option("--truncation", truncation, "truncation or cap");
    auto* o_tol = app.add_option("--tol", tol, "tolerance override");
    app.add_option("--grid", cfg.grid, "real:X0,X1,N | complex:RE0,RE1,NRE,IM0,IM1,NIM | random:N,RE0,RE1,IM0,IM1 | point:RE,IM");
    app.add_option("--seed", cfg.seed, "seed for random grids")->capture_default_str();
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << "configuration error: " << e.what() << "\n";
        return BadConfig;
    }
    if (o_n->count()) cfg.n_max = n_max;
    if (o_t->count()) cfg.truncation = truncation;
    if (o_tol->count()) cfg.tol = tol;
    return run(cfg, out, err);
}

}  // namespace spectralmix::cli

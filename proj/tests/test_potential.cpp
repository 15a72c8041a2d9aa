#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spectralmix/potential.hpp"

using namespace spectralmix;

TEST(PotentialEval, Trivial) {
    EXPECT_EQ(PotentialSpec::zero().eval(1.0), 0.0);
    EXPECT_EQ(PotentialSpec::constant(1.0).eval(0.5), 1.0);
    EXPECT_NEAR(PotentialSpec::cosine({0.0, 2.0}).eval(pi / 3), 1.0, 1e-15);
}

TEST(PotentialEval, OutsideDomainThrows) {
    EXPECT_THROW(PotentialSpec::zero().eval(-0.1), DomainError);
    EXPECT_THROW(PotentialSpec::zero().eval(pi + 1e-9), DomainError);
    EXPECT_NO_THROW(PotentialSpec::zero().eval(pi));
}

TEST(PotentialEval, AgreesWithDefinitionAtRandomPoints) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.0, pi);
    const std::vector<double> c{0.5, -1.2, 0.7, 2.0, -0.3};
    const auto cs = PotentialSpec::cosine(c);
    const std::vector<double> g{1.0, 3.0, -2.0, 0.5};
    const auto gs = PotentialSpec::grid(g);
    const auto ps = PotentialSpec::piecewise_constant({1.0, 2.0, -1.0}, {0.5, 2.0});
    double worst = 0.0;
    for (int i = 0; i < 1000000; ++i) {
        const double x = ux(rng);
        double ref = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) ref += c[k] * std::cos(double(k) * x);
        worst = std::max(worst, std::abs(cs.eval(x) - ref));

        const double h = pi / 3.0;
        const int j = std::min(2, int(x / h));
        const double t = (x - j * h) / h;
        worst = std::max(worst, std::abs(gs.eval(x) - ((1 - t) * g[j] + t * g[j + 1])));

        const double pref = x < 0.5 ? 1.0 : (x < 2.0 ? 2.0 : -1.0);
        worst = std::max(worst, std::abs(ps.eval(x) - pref));
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(PotentialMean, ClosedForms) {
    EXPECT_EQ(PotentialSpec::zero().mean(), 0.0);
    EXPECT_EQ(PotentialSpec::constant(1.0).mean(), 1.0);
    EXPECT_EQ(PotentialSpec::cosine({0.5, 3.0}).mean(), 0.5);
    EXPECT_NEAR(PotentialSpec::piecewise_constant({1.0, 3.0}).mean(), 2.0, 1e-15);
    EXPECT_NEAR(PotentialSpec::piecewise_constant({2.0, 0.0}, {pi / 4}).mean(), 0.5, 1e-15);
}

TEST(PotentialMean, GridOnSmoothData) {
    // q(x) = x: linear data are reproduced exactly by the interpolant
    std::vector<double> v(101);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = pi * double(j) / 100.0;
    EXPECT_NEAR(PotentialSpec::grid(v).mean(), pi / 2, 1e-14);
    // q(x) = cos(x)^2 sampled finely: trapezoid on periodic-like data
    std::vector<double> w(2001);
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double x = pi * double(j) / 2000.0;
        w[j] = std::cos(x) * std::cos(x);
    }
    EXPECT_NEAR(PotentialSpec::grid(w).mean(), 0.5, 1e-10);
}

TEST(PotentialShift, MeanShiftsExactly) {
    const std::vector<PotentialSpec> family{
        PotentialSpec::cosine({0.3, 1.0}),
        PotentialSpec::grid({0.0, 1.0, 4.0}),
        PotentialSpec::piecewise_constant({1.0, -1.0, 2.0}),
    };
    for (const auto& q : family) {
        EXPECT_NEAR(q.shifted(2.5).mean(), q.mean() + 2.5, 1e-14);
        EXPECT_EQ(q.shifted(0.0), q);
    }
    const auto g = PotentialSpec::grid({0.0, 2.0, 7.0, 1.0});
    EXPECT_NEAR(g.shifted(-g.mean()).mean(), 0.0, 1e-14);
}

TEST(PotentialSpecValidation, Rejects) {
    EXPECT_THROW(PotentialSpec::grid({1.0}), ParameterError);
    EXPECT_THROW(PotentialSpec::piecewise_constant({1.0, 2.0}, {4.0}), ParameterError);
    EXPECT_THROW(PotentialSpec::piecewise_constant({1.0, 2.0}, {0.5, 1.0}), ParameterError);
    EXPECT_THROW(PotentialSpec::cosine({std::nan("")}), ParameterError);
}

TEST(PotentialBasis, LinearInParameters) {
    const auto q = PotentialSpec::grid({1.0, -2.0, 0.5, 3.0});
    for (double x : {0.0, 0.3, 1.1, 2.9, pi}) {
        double s = 0.0;
        for (std::size_t k = 0; k < q.parameter_count(); ++k) s += q.params()[k] * q.basis(k, x);
        EXPECT_NEAR(s, q.eval(x), 1e-14);
    }
}

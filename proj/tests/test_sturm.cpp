#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spectralmix/sturm.hpp"

using namespace spectralmix;

TEST(IntegrateIvp, FreeSine) {
    auto [u, du] = sturm::integrate_ivp(PotentialSpec::zero(), 1.0, 0.0, 1.0);
    EXPECT_NEAR(u.real(), 0.0, 1e-10);
    EXPECT_NEAR(du.real(), -1.0, 1e-10);
}

TEST(IntegrateIvp, FreeCosineQuarter) {
    auto [u, du] = sturm::integrate_ivp(PotentialSpec::zero(), 0.25, 1.0, 0.0);
    EXPECT_NEAR(u.real(), 0.0, 1e-10);
    EXPECT_NEAR(du.real(), -0.5, 1e-10);
}

TEST(IntegrateIvp, ConstantReducesToFree) {
    auto [u, du] = sturm::integrate_ivp(PotentialSpec::constant(1.0), 2.0, 0.0, 1.0);
    EXPECT_NEAR(u.real(), 0.0, 1e-10);
    EXPECT_NEAR(du.real(), -1.0, 1e-10);
}

TEST(IntegrateIvp, ComplexMatchesClosedForm) {
    const cplx z(3.0, 2.0);
    auto [u, du] = sturm::integrate_ivp(PotentialSpec::zero(), z, 0.0, 1.0);
    const cplx w = std::sqrt(z);
    EXPECT_LT(std::abs(u - std::sin(w * pi) / w), 1e-10 * std::abs(u));
    EXPECT_LT(std::abs(du - std::cos(w * pi)), 1e-10 * std::abs(du));
}

TEST(Eigenvalues, FreeDirichletDirichlet) {
    const auto s = sturm::eigenvalues(PotentialSpec::zero(), dirichlet_dirichlet, 5);
    for (int n = 1; n <= 5; ++n) EXPECT_NEAR(s[n], oracle::dd_eigenvalue(n), 1e-10);
}

TEST(Eigenvalues, FreeNeumannDirichlet) {
    const auto s = sturm::eigenvalues(PotentialSpec::zero(), neumann_dirichlet, 3);
    EXPECT_NEAR(s[1], 0.25, 1e-10);
    EXPECT_NEAR(s[2], 2.25, 1e-10);
    EXPECT_NEAR(s[3], 6.25, 1e-10);
}

TEST(Eigenvalues, FreeNeumannNeumann) {
    const auto s = sturm::eigenvalues(PotentialSpec::zero(), neumann_neumann, 3);
    EXPECT_NEAR(s[1], 0.0, 1e-10);
    EXPECT_NEAR(s[2], 1.0, 1e-10);
    EXPECT_NEAR(s[3], 4.0, 1e-10);
}

TEST(Eigenvalues, ConstantShift) {
    const auto s = sturm::eigenvalues(PotentialSpec::constant(1.0), dirichlet_dirichlet, 3);
    EXPECT_NEAR(s[1], 2.0, 1e-10);
    EXPECT_NEAR(s[2], 5.0, 1e-10);
    EXPECT_NEAR(s[3], 10.0, 1e-10);
}

TEST(Eigenvalues, ShiftedZeroPotential) {
    const auto s = sturm::eigenvalues(PotentialSpec::zero().shifted(1.0), dirichlet_dirichlet, 3);
    EXPECT_NEAR(s[1], 2.0, 1e-10);
    EXPECT_NEAR(s[2], 5.0, 1e-10);
    EXPECT_NEAR(s[3], 10.0, 1e-10);
}

TEST(Eigenvalues, RejectsZeroCount) {
    EXPECT_THROW(sturm::eigenvalues(PotentialSpec::zero(), dirichlet_dirichlet, 0), ParameterError);
}

TEST(Eigenvalues, RobinMatchesTranscendentalEquation) {
    // q = 0, alpha = beta = pi/4: u = sin(kx + d) with tan d = k. Eigen-equation
    // (k^2 - 1) sin(k pi) = 2 k cos(k pi) checked at the computed roots.
    const BoundaryConditions bc{pi / 4, pi / 4};
    const auto s = sturm::eigenvalues(PotentialSpec::zero(), bc, 8);
    for (std::size_t n = 1; n <= 8; ++n) {
        const double a = s[n];
        ASSERT_GT(a, 0.0);
        const double k = std::sqrt(a);
        EXPECT_NEAR((k * k - 1) * std::sin(k * pi), 2 * k * std::cos(k * pi), 1e-8 * (1 + a));
    }
}

TEST(Eigenvalues, WindingMatchesIndex) {
    const auto q = PotentialSpec::cosine({0.3, 2.0, -1.0});
    const BoundaryConditions bc{1.0, 2.0};
    const auto s = sturm::eigenvalues(q, bc, 30);
    for (std::size_t n = 1; n <= 30; ++n)
        EXPECT_NEAR(sturm::winding(q, bc, s[n]), double(n - 1), 1e-8);
}

TEST(NormingConstant, FreeDirichlet) {
    for (int n = 1; n <= 6; ++n)
        EXPECT_NEAR(sturm::norming_constant(PotentialSpec::zero(), dirichlet_dirichlet, n * n), pi / (2.0 * n * n),
                    1e-10 / (n * n));
}

TEST(NormingConstant, FreeNeumann) {
    for (int n = 1; n <= 6; ++n)
        EXPECT_NEAR(sturm::norming_constant(PotentialSpec::zero(), neumann_dirichlet, (n - 0.5) * (n - 0.5)), pi / 2,
                    1e-10);
}

TEST(NormingConstant, ConstantPotential) {
    const double c = 2.5;
    for (int n = 1; n <= 4; ++n)
        EXPECT_NEAR(sturm::norming_constant(PotentialSpec::constant(c), dirichlet_dirichlet, n * n + c),
                    pi / (2.0 * n * n), 1e-10);
}

TEST(NormingConstant, RejectsNonEigenvalue) {
    EXPECT_THROW(sturm::norming_constant(PotentialSpec::zero(), dirichlet_dirichlet, 2.0), PreconditionError);
}

TEST(SpectralMeasure, FreeDirichlet) {
    const auto m = sturm::spectral_measure(PotentialSpec::zero(), dirichlet_dirichlet, 3);
    for (int n = 1; n <= 3; ++n) {
        EXPECT_NEAR(m.eigenvalues[n - 1], n * n, 1e-10);
        EXPECT_NEAR(m.masses[n - 1], 2.0 * n * n / pi, 1e-9);
    }
}

TEST(SpectralMeasure, FreeNeumann) {
    const auto m = sturm::spectral_measure(PotentialSpec::zero(), neumann_dirichlet, 2);
    EXPECT_NEAR(m.eigenvalues[0], 0.25, 1e-10);
    EXPECT_NEAR(m.eigenvalues[1], 2.25, 1e-10);
    EXPECT_NEAR(m.masses[0], 2.0 / pi, 1e-10);
    EXPECT_NEAR(m.masses[1], 2.0 / pi, 1e-10);
}

TEST(SpectralMeasure, ConstantPotential) {
    const auto m = sturm::spectral_measure(PotentialSpec::constant(1.0), dirichlet_dirichlet, 2);
    EXPECT_NEAR(m.eigenvalues[0], 2.0, 1e-10);
    EXPECT_NEAR(m.eigenvalues[1], 5.0, 1e-10);
    EXPECT_NEAR(m.masses[0], 2.0 / pi, 1e-10);
    EXPECT_NEAR(m.masses[1], 8.0 / pi, 1e-9);
}

TEST(SpectralMeasure, PoissonPartialSumsAreCauchy) {
    const auto m = sturm::spectral_measure(PotentialSpec::cosine({0.0, 1.0}), dirichlet_dirichlet, 40);
    const auto s = m.poisson_partial_sums();
    for (double g : m.masses) EXPECT_GT(g, 0.0);
    EXPECT_LT(s.back() - s[29], 0.02 * s.back());
}

TEST(AsymptoticModel, FourCases) {
    EXPECT_DOUBLE_EQ(asymptotic_model(dirichlet_dirichlet, 0.0, 4), 16.0);
    EXPECT_NEAR(asymptotic_model(neumann_dirichlet, 0.0, 2), 2.25, 1e-15);
    EXPECT_NEAR(asymptotic_model(neumann_neumann, 0.0, 3), 4.0, 1e-15);
    EXPECT_NEAR(asymptotic_model(dirichlet_neumann, 0.5, 2), 2.75, 1e-15);
    const BoundaryConditions robin{1.0, 2.0};
    EXPECT_NEAR(asymptotic_model(robin, 0.1, 3), 4.0 + 2.0 / pi * (1 / std::tan(1.0) + 1 / std::tan(2.0)) + 0.1,
                1e-14);
}

TEST(ValidateAsymptotics, ExactForFreeAndConstant) {
    for (double c : {0.0, 1.7}) {
        const auto q = PotentialSpec::constant(c);
        const auto s = sturm::eigenvalues(q, dirichlet_dirichlet, 20);
        const auto r = sturm::validate_asymptotics(s, q.mean());
        for (double a : r.remainders) EXPECT_LE(std::abs(a), 1e-8);
    }
}

TEST(ValidateAsymptotics, CosineRemainderDecays) {
    const auto q = PotentialSpec::cosine({0.0, 5.0});
    const auto s = sturm::eigenvalues(q, dirichlet_dirichlet, 40);
    const auto r = sturm::validate_asymptotics(s, q.mean());
    EXPECT_LT(r.final_quartile_max, r.first_quartile_max);
    for (std::size_t i = 1; i < r.envelope.size(); ++i) EXPECT_LE(r.envelope[i], r.envelope[i - 1]);
}

TEST(ValidateAsymptotics, RemainderDecaysInAllFourCases) {
    const auto q = PotentialSpec::cosine({0.2, 1.5, 0.5});
    for (const BoundaryConditions& bc : {dirichlet_dirichlet, neumann_dirichlet, dirichlet_neumann, BoundaryConditions{1.0, 2.0}}) {
        const auto s = sturm::eigenvalues(q, bc, 40);
        const auto r = sturm::validate_asymptotics(s, q.mean());
        EXPECT_LT(r.final_quartile_max, r.first_quartile_max);
        EXPECT_LT(r.final_quartile_max, 0.05);
    }
}

TEST(ShiftCovariance, AllFamiliesAllCases) {
    const std::vector<PotentialSpec> family{
        PotentialSpec::cosine({0.3, 1.0, -0.5}),
        PotentialSpec::piecewise_constant({1.0, -2.0, 0.5}),
        PotentialSpec::grid({0.0, 1.0, 3.0, 1.0, -1.0}),
    };
    const std::vector<BoundaryConditions> cases{dirichlet_dirichlet, neumann_dirichlet, dirichlet_neumann,
                                                BoundaryConditions{0.7, 2.2}};
    const double c = 2.75;
    for (const auto& q : family) {
        for (const auto& bc : cases) {
            const auto m0 = sturm::spectral_measure(q, bc, 8);
            const auto m1 = sturm::spectral_measure(q.shifted(c), bc, 8);
            for (std::size_t i = 0; i < 8; ++i) {
                EXPECT_NEAR(m1.eigenvalues[i], m0.eigenvalues[i] + c, 1e-8);
                EXPECT_NEAR(m1.masses[i], m0.masses[i], 1e-8 * std::max(1.0, m0.masses[i]));
            }
        }
    }
}

TEST(Interlacing, DistinctAlphaSameBeta) {
    const auto q = PotentialSpec::cosine({0.0, 3.0, 1.0});
    const double beta = 0.4;
    const auto s1 = sturm::eigenvalues(q, {0.3, beta}, 25);
    const auto s2 = sturm::eigenvalues(q, {2.0, beta}, 25);
    // alpha = 2.0 (> 0.3) puts its spectrum below: b_1 < a_1 < b_2 < ...
    for (std::size_t n = 1; n <= 25; ++n) {
        EXPECT_LT(s2[n], s1[n]);
        if (n < 25) {
            EXPECT_LT(s1[n], s2[n + 1]);
        }
    }
}

TEST(ImpliedMean, CosineRichardson) {
    const auto q = PotentialSpec::cosine({0.8, 2.0});
    const auto s = sturm::eigenvalues(q, dirichlet_dirichlet, 10);
    EXPECT_NEAR(sturm::implied_mean(s.values, dirichlet_dirichlet), 0.8, 1e-3);
}

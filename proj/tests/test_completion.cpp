#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "spectralmix/completion.hpp"

using namespace spectralmix;
using namespace spectralmix::completion;

namespace {

struct Forward {
    std::vector<double> a, b, gamma;
};

Forward forward(const PotentialSpec& q, const BoundaryConditions& bc, std::size_t N) {
    const TripleBoundary tb = TripleBoundary::from_pair(bc);
    Forward f;
    const auto mu = sturm::spectral_measure(q, tb.pole_bc(), N);
    f.a = mu.eigenvalues;
    f.gamma = mu.masses;
    f.b = sturm::eigenvalues(q, tb.zero_bc(), N).values;
    return f;
}

MixedSpectralData matching(const Forward& f, const BoundaryConditions& bc, const std::vector<std::size_t>& A) {
    MixedSpectralData d;
    d.spectrum = f.a;
    d.bc = TripleBoundary::from_pair(bc);
    d.A = A;
    for (std::size_t n = 1; n <= f.a.size(); ++n) {
        if (std::find(A.begin(), A.end(), n) != A.end())
            d.masses[n] = f.gamma[n - 1];
        else
            d.known_zeros[n] = f.b[n - 1];
    }
    return d;
}

MixedSpectralData nonmatching(const Forward& f, const BoundaryConditions& bc, const std::vector<std::size_t>& k,
                              const std::vector<std::size_t>& l) {
    MixedSpectralData d;
    d.spectrum = f.a;
    d.bc = TripleBoundary::from_pair(bc);
    d.index_maps = IndexMaps{k, l};
    for (std::size_t kk : k) d.masses[kk] = f.gamma[kk - 1];
    for (std::size_t n = 1; n <= f.a.size(); ++n)
        if (std::find(l.begin(), l.end(), n) == l.end()) d.known_zeros[n] = f.b[n - 1];
    return d;
}

const Forward& free_dd() {
    static const Forward f = forward(PotentialSpec::zero(), dirichlet_dirichlet, 40);
    return f;
}

const Forward& cosine_dd() {
    static const Forward f = forward(PotentialSpec::cosine({0.0, 2.0}), dirichlet_dirichlet, 40);
    return f;
}

void expect_recovered(const CompletionResult& r, const Forward& f, double tol) {
    ASSERT_EQ(r.indices.size(), r.recovered_zeros.size());
    for (std::size_t i = 0; i < r.indices.size(); ++i)
        EXPECT_NEAR(r.recovered_zeros[i], f.b[r.indices[i] - 1], tol) << "b_" << r.indices[i];
}

}  // namespace

TEST(TargetResidues, MarchenkoLimitIsMinusMass) {
    std::vector<std::size_t> all;
    for (std::size_t n = 1; n <= 40; ++n) all.push_back(n);
    const auto d = matching(free_dd(), dirichlet_dirichlet, all);
    const auto t = target_residues(d);
    for (std::size_t n = 1; n <= 40; ++n) EXPECT_DOUBLE_EQ(t[n - 1], -free_dd().gamma[n - 1]);
}

TEST(TargetResidues, FreeSingleIndexMatchesOnePairResidue) {
    const auto d = matching(free_dd(), dirichlet_dirichlet, {1});
    const auto t = target_residues(d);
    // G = -(1/pi)(z/b_1 - 1)/(z/a_1 - 1): residue -(1/pi) a_1 (a_1/b_1 - 1) = -3/pi
    EXPECT_NEAR(t[0], -3.0 / oracle::pi, 1e-3);
}

TEST(TargetResidues, LinearInMasses) {
    auto d = matching(cosine_dd(), dirichlet_dirichlet, {2, 5});
    const auto t1 = target_residues(d);
    for (auto& [n, g] : d.masses) g *= 2.0;
    const auto t2 = target_residues(d);
    for (std::size_t i = 0; i < t1.size(); ++i) EXPECT_NEAR(t2[i], 2.0 * t1[i], 1e-14 * std::abs(t1[i]));
}

TEST(CompleteMatching, FreeSingleHiddenZero) {
    const auto d = matching(free_dd(), dirichlet_dirichlet, {1});
    const auto r = complete_matching(d);
    ASSERT_EQ(r.recovered_zeros.size(), 1u);
    EXPECT_NEAR(r.recovered_zeros[0], 0.25, 1e-4);
    EXPECT_LE(r.residual_norm, 1e-8);
    EXPECT_EQ(r.confidence.size(), 1u);
    const auto v = verify_completion(r, PotentialSpec::zero(), d.bc);
    EXPECT_LE(v.max_abs_error, 1e-4);
    EXPECT_FALSE(v.flagged);
}

TEST(CompleteMatching, EmptyIndexSetEchoesInput) {
    const auto d = matching(free_dd(), dirichlet_dirichlet, {});
    const auto r = complete_matching(d);
    EXPECT_TRUE(r.recovered_zeros.empty());
    EXPECT_EQ(r.residual_norm, 0.0);
    for (std::size_t n = 1; n <= 40; ++n) EXPECT_EQ(r.full_zeros[n - 1], free_dd().b[n - 1]);
    EXPECT_EQ(verify_completion(r, PotentialSpec::zero(), d.bc).max_abs_error, 0.0);
}

TEST(CompleteMatching, CosineTwoHiddenZeros) {
    const auto d = matching(cosine_dd(), dirichlet_dirichlet, {2, 5});
    const auto r = complete_matching(d);
    expect_recovered(r, cosine_dd(), 1e-3);
    EXPECT_TRUE(r.converged);
}

TEST(CompleteMatching, CosineThreeHiddenZeros) {
    const auto d = matching(cosine_dd(), dirichlet_dirichlet, {1, 3, 7});
    expect_recovered(complete_matching(d), cosine_dd(), 1e-3);
}

TEST(CompleteMatching, MarchenkoLimitRecoversWholeSecondSpectrum) {
    std::vector<std::size_t> all;
    for (std::size_t n = 1; n <= 40; ++n) all.push_back(n);
    const auto d = matching(cosine_dd(), dirichlet_dirichlet, all);
    expect_recovered(complete_matching(d), cosine_dd(), 1e-3);
}

TEST(CompleteMatching, NeumannDirichletPolesBelowZeros) {
    const PotentialSpec q = PotentialSpec::cosine({0.0, 1.0, -0.5});
    const auto f = forward(q, neumann_dirichlet, 40);
    const auto d = matching(f, neumann_dirichlet, {2, 4});
    ASSERT_EQ(d.bc.order(), ProductOrder::PolesBelowZeros);
    expect_recovered(complete_matching(d), f, 1e-3);
}

TEST(CompleteMatching, AsymptoticPinOnFreeData) {
    const auto d = matching(free_dd(), dirichlet_dirichlet, {3});
    CompletionOptions o;
    o.pin = PinMode::AsymptoticZero;
    expect_recovered(complete_matching(d, o), free_dd(), 1e-3);
}

TEST(CompleteMatching, RecoveredValuesStayInsideBoxes) {
    const auto d = matching(cosine_dd(), dirichlet_dirichlet, {1, 3, 7});
    const Problem p = build_problem(d, CompletionMode::Matching);
    const auto r = complete_matching(d);
    for (std::size_t j = 0; j < p.unknown.size(); ++j) {
        EXPECT_GT(r.recovered_zeros[j], p.lo[j]);
        EXPECT_LT(r.recovered_zeros[j], p.hi[j]);
    }
}

TEST(CompletionProblem, ResidualAtTruthIsSmall) {
    const PotentialSpec q = PotentialSpec::cosine({0.0, 2.0});
    const auto d = matching(cosine_dd(), dirichlet_dirichlet, {2, 5});
    const Problem p = build_problem(d, CompletionMode::Matching);
    ProductRepresentation truth = p.representation(cosine_dd().b, 1.0);
    const double C = weyl::fit_constant(q, d.bc, truth, 40);
    const Eigen::VectorXd x = p.initial_point(cosine_dd().b, C);
    Eigen::VectorXd r;
    p.evaluate(x, r, nullptr);
    EXPECT_LT(r.head(static_cast<Eigen::Index>(p.hard_rows())).norm(), 1e-6);
}

TEST(CompletionProblem, ResidualChangesWithEachHiddenZero) {
    const auto d = matching(cosine_dd(), dirichlet_dirichlet, {2, 5});
    const Problem p = build_problem(d, CompletionMode::Matching);
    const auto sol = complete_matching(d);
    Eigen::VectorXd x = p.initial_point(sol.full_zeros, sol.C), r0, r1;
    p.evaluate(x, r0, nullptr);
    for (Eigen::Index j = 0; j < 2; ++j) {
        for (double h : {-1e-3, 1e-3}) {
            Eigen::VectorXd y = x;
            y[j] += h;
            p.evaluate(y, r1, nullptr);
            EXPECT_GT(r1.norm(), r0.norm() + 1e-6) << "unknown " << j << " step " << h;
        }
    }
}

TEST(CompleteMatching, OverSpecifiedConsistentDataAccepted) {
    auto d = matching(cosine_dd(), dirichlet_dirichlet, {2, 5});
    d.known_zeros[2] = cosine_dd().b[1];
    const auto r = complete_matching(d);
    ASSERT_EQ(r.indices, std::vector<std::size_t>{5});
    EXPECT_NEAR(r.recovered_zeros[0], cosine_dd().b[4], 1e-3);
}

TEST(CompleteMatching, OverSpecifiedInconsistentDataRejected) {
    auto d = matching(cosine_dd(), dirichlet_dirichlet, {2, 5});
    d.known_zeros[2] = cosine_dd().b[1];
    d.masses[2] *= 1.5;
    EXPECT_THROW(complete_matching(d), RefusalError);
}

TEST(CompleteMatching, CorruptedMassIsFlagged) {
    auto d = matching(free_dd(), dirichlet_dirichlet, {1});
    d.masses[1] *= 1.5;
    const auto r = complete_matching(d);
    const auto v = verify_completion(r, PotentialSpec::zero(), d.bc);
    EXPECT_GT(v.max_abs_error, 1e-2);
    EXPECT_TRUE(v.flagged);
}

TEST(CompleteMatching, IterationCapRaisesConvergenceError) {
    const auto d = matching(cosine_dd(), dirichlet_dirichlet, {2, 5});
    CompletionOptions o;
    o.lm.max_iterations = 1;
    try {
        complete_matching(d, o);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_FALSE(e.result.converged);
        EXPECT_GE(e.result.residual_trace.size(), 1u);
    }
}

TEST(CompleteMatching, RejectsBadData) {
    auto d = matching(free_dd(), dirichlet_dirichlet, {1});
    d.masses[1] = -1.0;
    EXPECT_THROW(complete_matching(d), ParameterError);
    auto e = matching(free_dd(), dirichlet_dirichlet, {1});
    e.known_zeros.erase(3);
    EXPECT_THROW(complete_matching(e), ParameterError);
    auto g = matching(free_dd(), dirichlet_dirichlet, {1});
    g.known_zeros[3] = 100.0;
    EXPECT_THROW(complete_matching(g), ParameterError);
}

TEST(CompleteNonmatching, AnchoredRecoversTwoZeros) {
    auto d = nonmatching(free_dd(), dirichlet_dirichlet, {1, 2, 3}, {1, 2, 3});
    d.anchor = Anchor{1, free_dd().b[0]};
    const auto r = complete_nonmatching(d, CompletionMode::Anchored);
    ASSERT_EQ(r.indices, (std::vector<std::size_t>{2, 3}));
    expect_recovered(r, free_dd(), 1e-3);
}

TEST(CompleteNonmatching, AnchoredShiftedMaps) {
    auto d = nonmatching(cosine_dd(), dirichlet_dirichlet, {2, 4, 6}, {1, 3, 5});
    d.anchor = Anchor{2, cosine_dd().b[2]};
    const auto r = complete_nonmatching(d, CompletionMode::Anchored);
    ASSERT_EQ(r.indices, (std::vector<std::size_t>{1, 5}));
    expect_recovered(r, cosine_dd(), 1e-3);
}

TEST(CompleteNonmatching, AnchoredWithNoUnknownsHasZeroResidual) {
    auto d = nonmatching(free_dd(), dirichlet_dirichlet, {1}, {1});
    d.anchor = Anchor{1, free_dd().b[0]};
    const auto r = complete_nonmatching(d, CompletionMode::Anchored);
    EXPECT_TRUE(r.recovered_zeros.empty());
    EXPECT_LT(r.residual_norm, 1e-8);
}

TEST(CompleteNonmatching, SparseSquareMapsConvergent) {
    const std::vector<std::size_t> sq{1, 4, 9, 16, 25, 36};
    const auto d = nonmatching(cosine_dd(), dirichlet_dirichlet, sq, sq);
    const auto r = complete_nonmatching(d, CompletionMode::AbsolutelyConvergent);
    ASSERT_TRUE(r.hypotheses.has_value());
    EXPECT_EQ(r.hypotheses->h3.verdict, cebotarev::Verdict::True);
    expect_recovered(r, cosine_dd(), 1e-3);
}

TEST(CompleteNonmatching, HarmonicMapsRefused) {
    std::vector<std::size_t> k;
    for (std::size_t n = 1; n <= 12; ++n) k.push_back(n);
    const auto d = nonmatching(free_dd(), dirichlet_dirichlet, k, k);
    try {
        complete_nonmatching(d, CompletionMode::AbsolutelyConvergent);
        FAIL() << "expected refusal";
    } catch (const RefusalError& e) {
        ASSERT_TRUE(e.report.has_value());
        EXPECT_EQ(e.report->h3.verdict, cebotarev::Verdict::False);
    }
}

TEST(CompleteNonmatching, NonzeroAnglesNeedDistinctIndices) {
    const BoundaryConditions robin = BoundaryConditions::make(pi / 3, 0.0);
    const PotentialSpec q = PotentialSpec::cosine({0.0, 1.0});
    const auto f = forward(q, robin, 40);
    auto d = nonmatching(f, robin, {1, 2, 3}, {1, 2, 3});
    d.anchor = Anchor{1, f.b[0]};
    ASSERT_NE(d.bc.alpha1, 0.0);
    ASSERT_NE(d.bc.alpha2, 0.0);
    EXPECT_THROW(complete_nonmatching(d, CompletionMode::Anchored), RefusalError);
    d.distinct_beyond = 0;
    EXPECT_THROW(complete_nonmatching(d, CompletionMode::Anchored), RefusalError);

    auto e = nonmatching(f, robin, {2, 3, 4}, {1, 2, 3});
    e.anchor = Anchor{1, f.b[0]};
    e.distinct_beyond = 0;
    expect_recovered(complete_nonmatching(e, CompletionMode::Anchored), f, 1e-3);
}

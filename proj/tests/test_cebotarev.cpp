#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spectralmix/cebotarev.hpp"

using namespace spectralmix;
using namespace spectralmix::cebotarev;

namespace {

Spectrum closed_form(const BoundaryConditions& bc, std::size_t n, double (*f)(int)) {
    Spectrum s;
    s.bc = bc;
    s.n_max = n;
    for (std::size_t i = 1; i <= n; ++i) s.values.push_back(f(static_cast<int>(i)));
    return s;
}

double dd(int n) { return oracle::dd_eigenvalue(n); }
double nd(int n) { return oracle::nd_eigenvalue(n); }

std::vector<std::size_t> indices(std::size_t count, std::size_t (*rule)(std::size_t)) {
    std::vector<std::size_t> v;
    for (std::size_t n = 1; n <= count; ++n) v.push_back(rule(n));
    return v;
}

std::size_t identity(std::size_t n) { return n; }
std::size_t twice(std::size_t n) { return 2 * n; }
std::size_t square(std::size_t n) { return n * n; }
std::size_t cube(std::size_t n) { return n * n * n; }

IndexedSubsequences free_subsequences(std::size_t count, std::size_t (*rule)(std::size_t), std::size_t stored) {
    const auto a = closed_form(dirichlet_dirichlet, stored, dd);
    const auto b = closed_form(neumann_dirichlet, stored, nd);
    return make_subsequences(a, b, indices(count, rule), indices(count, rule));
}

cplx finite_product(const std::vector<double>& zeros, const std::vector<double>& poles, double C, cplx z) {
    cplx v = -C;
    for (std::size_t i = 0; i < zeros.size(); ++i) v *= (z / zeros[i] - 1.0) / (z / poles[i] - 1.0);
    return v;
}

/// Residue of the finite product at p by the trapezoid rule on a small circle.
double contour_residue(const std::vector<double>& zeros, const std::vector<double>& poles, double C, double p,
                       double radius) {
    const int M = 256;
    cplx acc = 0.0;
    for (int j = 0; j < M; ++j) {
        const cplx e = std::polar(1.0, 2.0 * oracle::pi * j / M);
        acc += finite_product(zeros, poles, C, p + radius * e) * radius * e;
    }
    return (acc / double(M)).real();
}

}  // namespace

TEST(FiniteProductToForm, SinglePair) {
    const auto f = finite_product_to_form({0.25}, {1.0}, 1.0);
    ASSERT_EQ(f.poles.size(), 1u);
    EXPECT_NEAR(f.residues[0], -3.0, 1e-15);
    EXPECT_NEAR(f.e, -1.0, 1e-15);
    EXPECT_NEAR(f.constant_at_infinity(), -4.0, 1e-15);
    EXPECT_EQ(f.c, 0.0);
    EXPECT_EQ(f.d, 0.0);
    EXPECT_NEAR(form_eval(f, 0.0).value.real(), -1.0, 1e-15);
    EXPECT_TRUE(f.herglotz());
    EXPECT_NEAR(f.nonnegative_coefficients()[0], 3.0, 1e-15);
}

TEST(FiniteProductToForm, CoincidentSetsCancel) {
    const auto f = finite_product_to_form({1.0, 4.0}, {1.0, 4.0}, 2.5);
    EXPECT_TRUE(f.poles.empty());
    EXPECT_NEAR(f.e, -2.5, 1e-15);
}

TEST(FiniteProductToForm, RepeatedPoleIsDegenerate) {
    EXPECT_THROW(finite_product_to_form({0.5, 2.0}, {1.0, 1.0}, 1.0), DegeneracyError);
    EXPECT_THROW(finite_product_to_form({0.5}, {1.0, 2.0}, 1.0), ParameterError);
}

TEST(FiniteProductToForm, RandomInterlacingMatchesProductOnGrid) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> zeros, poles;
        double x = 0.1;
        for (int i = 0; i < 4; ++i) {
            x += 0.2 + u(rng);
            zeros.push_back(x);
            x += 0.2 + u(rng);
            poles.push_back(x);
        }
        const double C = 0.5 + u(rng);
        const auto f = finite_product_to_form(zeros, poles, C);
        EXPECT_TRUE(f.herglotz());
        for (int g = 0; g < 100; ++g) {
            const cplx z(-5.0 + 15.0 * u(rng), -3.0 + 6.0 * u(rng));
            const cplx ref = finite_product(zeros, poles, C, z);
            EXPECT_LT(std::abs(form_eval(f, z).value - ref), 1e-10 * (1.0 + std::abs(ref)));
        }
    }
}

TEST(FormEval, TrivialForms) {
    CebotarevForm f;
    f.e = -1.0;
    f.poles = {1.0};
    f.residues = {-3.0};
    EXPECT_NEAR(form_eval(f, 0.0).value.real(), -1.0, 1e-15);
    CebotarevForm g;
    g.d = 1.0;
    EXPECT_NEAR(form_eval(g, 5.0).value.real(), 5.0, 1e-15);
    EXPECT_EQ(form_eval(g, 5.0).tail_bound, 0.0);
    EXPECT_THROW(form_eval(f, 1.0), PoleError);
}

TEST(FormEval, FreePotentialFirstFourPairsMatchTruncatedProduct) {
    const std::vector<double> zeros{0.25, 2.25, 6.25, 12.25}, poles{1, 4, 9, 16};
    const auto f = finite_product_to_form(zeros, poles, 1.0 / oracle::pi);
    ProductRepresentation rep;
    rep.zeros = zeros;
    rep.poles = poles;
    rep.C = 1.0 / oracle::pi;
    rep.order = ProductOrder::ZerosBelowPoles;
    WeylOptions opt;
    opt.tail_correction = false;
    const cplx mp = weyl::m_product(rep, -2.0, 4, opt);
    EXPECT_NEAR(std::abs(form_eval(f, -2.0).value - mp), 0.0, 1e-10);
}

TEST(FormEval, TruncatedFormReportsTailBound) {
    auto f = finite_product_to_form({0.25, 2.25, 6.25}, {1, 4, 9}, 1.0);
    f.truncated = true;
    EXPECT_GT(form_eval(f, cplx(0, 1)).tail_bound, 0.0);
}

TEST(ResiduesPartial, WorkedValues) {
    IndexedSubsequences one{{1}, {1}, {1.0}, {0.25}, std::nullopt};
    EXPECT_NEAR(residues_partial(one, 1)[0], 3.0, 1e-15);
    IndexedSubsequences two{{1, 2}, {1, 2}, {1.0, 4.0}, {0.25, 2.25}, std::nullopt};
    EXPECT_NEAR(residues_partial(two, 2)[0], 3.0 * (4.0 / 2.25) * (5.0 / 12.0), 1e-14);
    EXPECT_NEAR(residues_partial(two, 2)[0], 20.0 / 9.0, 1e-14);
    IndexedSubsequences bad{{1}, {1}, {1.0}, {1.0}, std::nullopt};
    EXPECT_THROW(residues_partial(bad, 1), DegeneracyError);
}

TEST(ResiduesPartial, PositiveWhenPoleAboveZero) {
    for (double b : {0.1, 0.5, 0.99}) {
        IndexedSubsequences s{{1}, {1}, {1.0}, {b}, std::nullopt};
        EXPECT_GT(residues_partial(s, 1)[0], 0.0);
    }
}

TEST(ResiduesPartial, EqualsResidueOfFiniteProduct) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        IndexedSubsequences s;
        double x = 0.1;
        for (std::size_t i = 1; i <= 6; ++i) {
            x += 0.3 + u(rng);
            s.b.push_back(x);
            x += 0.3 + u(rng);
            s.a.push_back(x);
            s.k.push_back(i);
            s.l.push_back(i);
        }
        const auto A = residues_partial(s, 6);
        for (std::size_t n = 0; n < 6; ++n) {
            // gap to the nearest other zero or pole bounds the contour radius
            double gap = 1e300;
            for (std::size_t j = 0; j < 6; ++j) {
                gap = std::min(gap, std::abs(s.a[n] - s.b[j]));
                if (j != n) gap = std::min(gap, std::abs(s.a[n] - s.a[j]));
            }
            // A = -Res(-prod) = Res(prod)
            const double ref = -contour_residue(s.b, s.a, 1.0, s.a[n], 0.4 * gap);
            EXPECT_NEAR(A[n], ref, 1e-12 * std::abs(ref));
        }
    }
}

TEST(ResiduesLimit, FreeFirstResidueMatchesProductResidue) {
    const auto s = free_subsequences(500, identity, 500);
    const auto rep = residues_limit(s, 500);
    ASSERT_FALSE(rep.limits.empty());
    const auto poles = closed_form(dirichlet_dirichlet, 500, dd);
    const auto zeros = closed_form(neumann_dirichlet, 500, nd);
    const auto prod = make_representation(poles, zeros, ProductOrder::ZerosBelowPoles);
    // the complement factor is 1 for matching index sets, so A_1 = -Res(m, a_1) / C
    const double via_product = -weyl::residue_product(prod, 1, 500) / prod.C;
    EXPECT_NEAR(rep.limits[0], via_product, 1e-3 * via_product);
    EXPECT_NEAR(rep.limits[0], oracle::dd_mass(1) * oracle::pi, 1e-3);
    EXPECT_TRUE(rep.cauchy);
}

TEST(ResiduesLimit, SinglePairIsConstant) {
    IndexedSubsequences one{{1}, {1}, {1.0}, {0.25}, std::nullopt};
    const auto rep = residues_limit(one, 50);
    ASSERT_EQ(rep.at_cap.size(), 1u);
    EXPECT_EQ(rep.at_cap[0], 3.0);
    EXPECT_EQ(rep.limits[0], 3.0);
    EXPECT_TRUE(rep.increments.empty());
}

TEST(ResiduesLimit, SparseMatchingIncrementsDecay) {
    const auto s = free_subsequences(100, twice, 200);
    ASSERT_TRUE(s.extendable());
    const auto rep = residues_limit(s, 400);
    ASSERT_EQ(rep.increments.size(), 399u);
    for (std::size_t m = 50; m + 1 < rep.increments.size(); ++m)
        EXPECT_LT(rep.increments[m], rep.increments[m - 1]) << "m=" << m + 2;
    EXPECT_TRUE(rep.cauchy);
}

TEST(IndexRules, Inference) {
    EXPECT_EQ(infer_rule({1, 2, 3}).kind, IndexRuleKind::Affine);
    EXPECT_EQ(infer_rule({3, 5, 7}).at(10), 21u);
    EXPECT_EQ(infer_rule({1, 4, 9, 16}).kind, IndexRuleKind::Power);
    EXPECT_EQ(infer_rule({1, 4, 9, 16}).at(20), 400u);
    EXPECT_EQ(infer_rule({1, 2, 7}).kind, IndexRuleKind::Explicit);
    EXPECT_THROW(infer_rule({1, 2, 7}).at(4), ParameterError);
}

TEST(CheckHypotheses, MatchingFreeIndicesFailAbsoluteConvergence) {
    const auto s = free_subsequences(400, identity, 400);
    const auto rep = check_hypotheses(s, 400);
    EXPECT_EQ(rep.h3.verdict, Verdict::False);
    // harmonic comparison: the partial sums minus sum 1/n settle to a constant
    std::vector<double> harmonic;
    double h = 0.0;
    for (int n = 1; n <= 400; ++n) harmonic.push_back(h += 1.0 / n);
    EXPECT_NEAR(rep.h3.trace[399] - harmonic[399], rep.h3.trace[199] - harmonic[199], 1e-2);
    EXPECT_GT(rep.h3.trace[399] - rep.h3.trace[199], 0.6);
    EXPECT_EQ(rep.h2.verdict, Verdict::True);
}

TEST(CheckHypotheses, SquareIndicesAreAbsolutelyConvergent) {
    const auto s = free_subsequences(30, square, 900);
    ASSERT_TRUE(s.extendable());
    const auto rep = check_hypotheses(s, 200);
    EXPECT_EQ(rep.h3.verdict, Verdict::True);
    double ref = 0.0;
    for (int n = 1; n <= 200; ++n) ref += 3.0 / (double(n) * n);
    EXPECT_GT(rep.h3.trace.back(), 0.0);
    EXPECT_LT(rep.h3.trace.back(), ref);
}

TEST(CheckHypotheses, EmptySequenceIsTrivial) {
    const IndexedSubsequences empty;
    const auto rep = check_hypotheses(empty, 10);
    EXPECT_EQ(rep.h1.verdict, Verdict::True);
    EXPECT_EQ(rep.h2.verdict, Verdict::True);
    EXPECT_EQ(rep.h3.verdict, Verdict::True);
    EXPECT_THROW(check_hypotheses(empty, 5), ParameterError);
}

TEST(CheckHypotheses, AbsoluteConvergenceImpliesOtherTwo) {
    for (auto rule : {square, cube}) {
        const auto s = free_subsequences(10, rule, 1000);
        const auto rep = check_hypotheses(s, 100);
        ASSERT_EQ(rep.h3.verdict, Verdict::True);
        EXPECT_EQ(rep.h1.verdict, Verdict::True);
        EXPECT_EQ(rep.h2.verdict, Verdict::True);
    }
}

TEST(InterlacingCheck, Examples) {
    EXPECT_TRUE(interlacing_check({1, 4, 9}, {0.25, 2.25, 6.25}, ProductOrder::ZerosBelowPoles));
    EXPECT_FALSE(interlacing_check({1, 4, 9}, {0.25, 2.25, 6.25}, ProductOrder::PolesBelowZeros));
    for (auto o : {ProductOrder::ZerosBelowPoles, ProductOrder::PolesBelowZeros}) {
        EXPECT_FALSE(interlacing_check({1, 4}, {5, 6}, o));
        EXPECT_FALSE(interlacing_check({1, 4, 9}, {1, 4, 9}, o));
    }
    EXPECT_THROW(interlacing_check({}, {1}, ProductOrder::ZerosBelowPoles), ParameterError);
}

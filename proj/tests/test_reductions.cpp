#include <gtest/gtest.h>

#include "ismut/reductions.hpp"

using namespace ismut;
using namespace ismut::reductions;

TEST(Reductions, ExactlyTwoFamilies) {
    const auto cls = classify_B();
    ASSERT_EQ(cls.families.size(), 2u);
    for (const auto& f : cls.families) {
        EXPECT_EQ(f.block_shape, f.gamma == 1 ? "diagonal" : "antidiagonal");
        for (const auto& cc : f.cases) EXPECT_TRUE(cc.invertible);
    }
    for (const auto& cc : cls.all_cases)
        if (cc.gamma.im != 0 || std::abs(cc.gamma.re) != 1) {
            EXPECT_FALSE(cc.invertible);
        }
}

TEST(Reductions, CandidatesSatisfyConstraints) {
    for (int gamma : {1, -1})
        for (int mu : {1, -1})
            for (double th : {0.0, 1.1, -2.0})
                for (int eps : {1, -1}) EXPECT_LT(verify_constraints(make_candidate(eps, gamma, th, mu, 0.7, -1.9)).max(), 1e-12);
}

TEST(Reductions, ConstraintsRejectWrongShape) {
    const auto c = make_candidate(-1, 1, 0.0, 1, 1.0, 1.0);
    EXPECT_GT(verify_constraints(c.B(), -1, 1, 0.0).max(), 0.5);
}

TEST(Reductions, CouplingAndEquation) {
    const auto nls = make_candidate(-1, 1, 0.0, 1, 1.0, 1.0);
    EXPECT_DOUBLE_EQ(nls.coupling_c(), -1.0);
    EXPECT_EQ(induced_equation(nls).name(), "NLS");
    const auto nn = make_candidate(-1, -1, 0.0, 1, 1.0, -1.0);
    EXPECT_DOUBLE_EQ(nn.coupling_c(), 1.0);
    EXPECT_EQ(induced_equation(nn).kind, EquationKind::NonlocalNLS);
}

TEST(Reductions, AppliedReductionMatchesCoupling) {
    const auto c = make_candidate(-1, 1, 0.4, 1, 2.0, 3.0);
    const std::vector<Diag2> Q{{cd(0.1, 0.2), cd(-0.3, 0.05)}};
    const auto R = apply_reduction(Q, c);
    EXPECT_LT(std::abs(R[0][0] - c.coupling_c() * std::conj(Q[0][0])), 1e-14);
    EXPECT_LT(std::abs(R[0][1] - c.coupling_c() * std::conj(Q[0][1])), 1e-14);
}

TEST(Reductions, SymmetricKIsLinearizableForEvenData) {
    BoundaryData bd;
    bd.T = 1.0;
    bd.t = {0.0, 0.5, 1.0};
    bd.G0 = bd.H0 = {{0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}};
    bd.G1 = bd.H1 = {{0.1, -0.1}, {0.2, -0.2}, {0.3, -0.3}};
    EXPECT_LT(check_linearizable(LinearizableK::symmetric(), bd).max(), 1e-15);
    bd.G0[1] = {0.2, 0.25};
    EXPECT_GT(check_linearizable(LinearizableK::symmetric(), bd).max(), 1e-3);
}

#include <gtest/gtest.h>

#include "ismut/algebra.hpp"

using namespace ismut;

namespace {

CMat4 sample4() {
    CMat4 m;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) m(i, j) = cd(std::sin(1.0 + i + 3.0 * j), std::cos(2.0 * i - j)) + (i == j ? 3.0 : 0.0);
    return m;
}

}  // namespace

TEST(Algebra, InverseTimesMatrixIsIdentity) {
    const CMat4 m = sample4();
    EXPECT_LT(max_abs(m * inverse(m) - CMat4::identity()), 1e-13);
    const CMat2 a{{2.0, cd(0, 1)}, {cd(1, 1), 3.0}};
    EXPECT_LT(max_abs(inverse(a) * a - CMat2::identity()), 1e-14);
}

TEST(Algebra, SingularMatrixThrows) {
    const CMat2 s{{1.0, 2.0}, {2.0, 4.0}};
    EXPECT_THROW(inverse(s), SingularMatrixError);
}

TEST(Algebra, DeterminantOfBlockDiagonalFactors) {
    const CMat2 a{{1.0, 2.0}, {cd(0, 1), 3.0}}, b{{cd(2, 1), 0.5}, {1.0, -1.0}};
    EXPECT_LT(std::abs(det(block_diag(a, b)) - det(a) * det(b)), 1e-14);
}

TEST(Algebra, TracelessExponentialIsUnimodular) {
    const CMat2 m{{cd(0.3, 0.2), cd(1.0, -0.5)}, {cd(0.7, 0.1), cd(-0.3, -0.2)}};
    EXPECT_LT(std::abs(det(expm_traceless(m)) - 1.0), 1e-14);
    // small argument: e^m ~ 1 + m
    const CMat2 e = expm_traceless(1e-8 * m);
    EXPECT_LT(max_abs(e - CMat2::identity() - 1e-8 * m), 1e-15);
}

TEST(Algebra, BlocksRoundTrip) {
    const CMat4 m = sample4();
    EXPECT_EQ(max_abs(assemble(blocks(m)) - m), 0.0);
}

TEST(Algebra, ChannelsOfBlockDiagonalMatrix) {
    const CMat2 c0{{1.0, 2.0}, {3.0, 4.0}}, c1{{5.0, 6.0}, {7.0, 8.0}};
    const CMat4 m = from_channels(c0, c1);
    EXPECT_EQ(max_abs(channel(m, 0) - c0), 0.0);
    EXPECT_EQ(max_abs(channel(m, 1) - c1), 0.0);
    EXPECT_EQ(channel_leak(m), 0.0);
}

TEST(Algebra, Conventions) {
    using namespace consts;
    EXPECT_EQ(max_abs(sigma() * sigma() - id2()), 0.0);
    EXPECT_EQ(max_abs(Sigma3() * Sigma3() - id4()), 0.0);
    EXPECT_EQ(max_abs(I3() * I3() - id4()), 0.0);
    EXPECT_EQ(max_abs(Sigma() * Sigma() - id4()), 0.0);
}

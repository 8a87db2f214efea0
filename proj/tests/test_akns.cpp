#include <gtest/gtest.h>

#include "ismut/akns.hpp"

using namespace ismut;

namespace {

LinePotential bump(std::size_t N = 256) {
    return LinePotential::sample(
        20.0, N, [](double x) { return cd(0.3 / std::cosh(x - 0.4), 0.1 * x / std::cosh(x)); },
        [](double x) { return cd(-0.2 / std::cosh(x + 0.2), 0.0); });
}

}  // namespace

TEST(Akns, GridValidation) {
    LinePotential p;
    p.L = 10.0;
    p.q.assign(100, 0.0);
    p.r.assign(100, 0.0);
    EXPECT_THROW(p.validate(), GridError);
    p.q.assign(128, 0.0);
    EXPECT_THROW(p.validate(), GridError);
}

TEST(Akns, MirrorIndex) {
    const LinePotential p = bump();
    for (std::size_t j = 1; j < p.N(); ++j) EXPECT_NEAR(p.x(p.mirror(j)), -p.x(j), 1e-12);
}

TEST(Akns, RefinementIsSpectrallyAccurate) {
    const LinePotential p = bump(256), f = p.refined(4);
    ASSERT_EQ(f.N(), 1024u);
    double err = 0.0;
    for (std::size_t j = 0; j < f.N(); ++j)
        err = std::max(err, std::abs(f.q[j] - cd(0.3 / std::cosh(f.x(j) - 0.4), 0.1 * f.x(j) / std::cosh(f.x(j)))));
    EXPECT_LT(err, 1e-6);
    for (std::size_t j = 0; j < p.N(); ++j) EXPECT_LT(std::abs(f.q[4 * j] - p.q[j]), 1e-13);
}

TEST(Akns, HalfLineEmbeddingFoldsTheLine) {
    const LinePotential p = bump();
    const HalfLinePotential h = embed_halfline_UT(p);
    const std::size_t c = p.N() / 2;  // x = 0
    for (std::size_t j = 0; j <= h.intervals(); ++j) {
        EXPECT_EQ(h.q1[j], p.q[c + j < p.N() ? c + j : 0]);
        EXPECT_EQ(h.q2[j], p.q[c - j]);
        EXPECT_EQ(h.r2[j], p.r[c - j]);
    }
}

TEST(Akns, RedundantLineEmbeddingSignsTheMirror) {
    const LinePotential p = bump();
    const RedundantLinePotential rp = embed_redundant_line(p);
    for (std::size_t j = 0; j < p.N(); ++j) {
        EXPECT_EQ(rp.q1[j], p.q[j]);
        EXPECT_EQ(rp.q2[j], -p.q[p.mirror(j)]);
        EXPECT_EQ(rp.r2[j], -p.r[p.mirror(j)]);
    }
}

TEST(Akns, LaxUIsTracelessAndOffDiagonal) {
    const CMat4 W = assemble_W(Diag2{cd(0.2, 0.1), cd(-0.3)}, Diag2{cd(0.5), cd(0.0, 0.7)});
    const Block4 b = blocks(W);
    EXPECT_EQ(max_abs(b.tl), 0.0);
    EXPECT_EQ(max_abs(b.br), 0.0);
    EXPECT_EQ(b.tr(0, 0), cd(0.2, 0.1));
    EXPECT_EQ(b.bl(1, 1), cd(0.0, 0.7));
}

TEST(Akns, BoundaryDataFromTracesIsSymmetric) {
    BoundaryTraces tr;
    tr.t = {0.0, 0.5, 1.0};
    tr.q = {0.1, 0.1, 0.1};
    tr.qx = {0.0, 0.0, 0.0};
    tr.r = {0.0, 0.0, 0.0};
    tr.rx = {0.0, 0.0, 0.0};
    const BoundaryData bd = extract_boundary_data(tr);
    EXPECT_EQ(bd.samples(), 3u);
    EXPECT_LT(bd.symmetry_residual(), 1e-15);
}

#include <gtest/gtest.h>

#include "ismut/gmres.hpp"
#include "ismut/rh_solver.hpp"

using namespace ismut;
using namespace ismut::rh;

namespace {

LinePotential sech(double A) {
    return LinePotential::sample(
        20.0, 1024, [A](double x) { return cd(A / std::cosh(x - 0.5)) * std::exp(cd(0.0, 0.2 * x)); },
        [A](double x) { return cd(-A / std::cosh(x - 0.5)) * std::exp(cd(0.0, -0.2 * x)); });
}

ContourOptions coarse() { return {1.5, 30.0, 5.0, 0.75, 0.75, 0.75, 0.15}; }

}  // namespace

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
    const GaussLegendre g(16);
    for (int p = 0; p <= 31; ++p) {
        double s = 0.0;
        for (std::size_t i = 0; i < 16; ++i) s += g.w[i] * std::pow(g.x[i], p);
        EXPECT_NEAR(s, p % 2 ? 0.0 : 2.0 / (p + 1), 1e-14) << p;
    }
}

TEST(GaussLegendre, DifferentiatesPolynomials) {
    const GaussLegendre g(16);
    Eigen::VectorXd f(16), df(16);
    for (std::size_t i = 0; i < 16; ++i) {
        f(i) = std::pow(g.x[i], 7) - g.x[i];
        df(i) = 7 * std::pow(g.x[i], 6) - 1;
    }
    EXPECT_LT((g.D * f - df).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Contour, LengthsAndBisection) {
    const Contour c = lens_contour(coarse());
    cd len_real = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c.piece(i) == ArcD1) len_real += c.weight(i);
    // the D1 arc runs from K0 to i K0
    EXPECT_LT(std::abs(len_real - cd(-1.5, 1.5)), 1e-13);
    const Contour b = bisect(c);
    EXPECT_EQ(b.size(), 2 * c.size());
    cd sum_c = 0.0, sum_b = 0.0;
    for (cd w : c.weights()) sum_c += w;
    for (cd w : b.weights()) sum_b += w;
    EXPECT_LT(std::abs(sum_c - sum_b), 1e-12);
}

TEST(Contour, ZeroIsNeverANode) {
    for (const Contour& c : {lens_contour(coarse()), line_contour(coarse())}) {
        double nearest = 1.0;
        for (const cd z : c.nodes()) nearest = std::min(nearest, std::abs(z));
        EXPECT_GT(nearest, 1e-5);
    }
}

TEST(Contour, CauchyPlusOfABoundaryValue) {
    // f(s) = 1 / (s - z0) with z0 below the line: C_+ f = f on the real axis
    const Contour c = line_contour(coarse());
    const cd z0(0.3, -0.8);
    std::vector<cd> f(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) f[i] = 1.0 / (c.node(i) - z0);
    const Eigen::MatrixXcd C = c.cauchy_plus();
    double err = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        cd s = 0.0;
        for (std::size_t m = 0; m < c.size(); ++m) s += C(j, m) * f[m];
        // the truncation at |k| = Kmax costs O(1/Kmax)
        if (std::abs(c.node(j)) < 5.0) err = std::max(err, std::abs(s - f[j]));
    }
    EXPECT_LT(err, 2e-2);
}

TEST(Gmres, SolvesAComplexSystem) {
    const Eigen::Index n = 60;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) A(i, j) += 0.3 * cd(std::sin(i * 1.7 + j), std::cos(i - 2.1 * j)) / double(n);
    Eigen::VectorXcd b(n);
    for (Eigen::Index i = 0; i < n; ++i) b(i) = cd(1.0, i * 0.1);
    const auto r = gmres([&](const Eigen::VectorXcd& v) { return Eigen::VectorXcd(A * v); }, b);
    EXPECT_TRUE(r.converged);
    EXPECT_LT((A * r.x - b).norm() / b.norm(), 1e-12);
}

TEST(RHSolver, IdentityJumpGivesIdentity) {
    const Contour c = line_contour(coarse());
    JumpField J;
    J.J.assign(c.size(), CMat4::identity());
    J.tag.assign(c.size(), JumpTag::Identity);
    for (const auto kind : {SolverKind::Direct, SolverKind::Gmres}) {
        SolveOptions o;
        o.kind = kind;
        const auto s = solve_rh(c, c.cauchy_plus(), J, o);
        for (const auto& m : s.Mplus) EXPECT_EQ(max_abs(m - CMat4::identity()), 0.0);
        EXPECT_EQ(max_abs(reconstruct_potential(s)), 0.0);
    }
}

TEST(RHSolver, JumpFactorizationIdentities) {
    const ContourOptions o = coarse();
    const Contour lens = lens_contour(o);
    const auto ing = lens_data(embed_halfline_UT(sech(0.2).refined(2)), lens);
    const auto chk = check_J2(ing, 1.3, 0.4);
    EXPECT_LT(chk.composed, 1e-12);
    EXPECT_LT(chk.explicit_form, 1e-12);
}

TEST(RHSolver, LineRoundTripAndDeterminant) {
    const LinePotential p = sech(0.1);
    const Contour c = line_contour(coarse());
    const auto ld = line_data(embed_redundant_line(p.refined(4)), c);
    const Eigen::MatrixXcd C = c.cauchy_plus();
    SolveOptions direct, iter;
    direct.kind = SolverKind::Direct;
    iter.kind = SolverKind::Gmres;
    for (double x : {-3.0, 0.0, 2.5}) {
        const auto s = solve_rh(c, C, build_J_line(ld, x, 0.0), direct);
        const auto g = solve_rh(c, C, build_J_line(ld, x, 0.0), iter);
        EXPECT_LT(s.det_residual, 1e-8);
        EXPECT_LT(max_abs(s.M1 - g.M1), 1e-10);
        const Diag2 Q = Q_of(reconstruct_potential(s));
        EXPECT_LT(std::abs(Q[0] - cd(0.1 / std::cosh(x - 0.5)) * std::exp(cd(0.0, 0.2 * x))), 1e-5) << x;
    }
}

TEST(RHSolver, FailuresAreReported) {
    const Contour c = line_contour(coarse());
    const auto ld = line_data(embed_redundant_line(sech(0.1).refined(2)), c);
    const JumpField J = build_J_line(ld, 0.0, 0.0);
    SolveOptions strict;
    strict.tolerance = 1e-30;
    EXPECT_THROW(solve_rh(c, c.cauchy_plus(), J, strict), RHSolveError);
    JumpField short_jump = J;
    short_jump.J.pop_back();
    short_jump.tag.pop_back();
    EXPECT_THROW(solve_rh(c, c.cauchy_plus(), short_jump), std::invalid_argument);
}

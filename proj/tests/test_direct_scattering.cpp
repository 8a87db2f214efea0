#include <gtest/gtest.h>

#include "ismut/direct_scattering.hpp"

using namespace ismut;

namespace {

LinePotential sech(double A, std::size_t N = 512, double L = 15.0) {
    return LinePotential::sample(
        L, N, [A](double x) { return cd(A / std::cosh(x - 0.5)) * std::exp(cd(0.0, 0.2 * x)); },
        [A](double x) { return cd(-0.6 * A / std::cosh(x + 0.3)); });
}

LinePotential zero(std::size_t N = 256) {
    return LinePotential::sample(10.0, N, [](double) { return cd{}; }, [](double) { return cd{}; });
}

std::vector<cd> mixed_points() {
    const SpectralGrid g = SpectralGrid::make(5.0, 8);
    std::vector<cd> ks = g.real_points();
    for (const cd k : g.imag_points()) ks.push_back(k);
    for (const cd k : g.fan) ks.push_back(k);
    return ks;
}

}  // namespace

TEST(DirectScattering, ZeroPotentialGivesIdentityOnTheRealAxis) {
    const auto S = compute_S(embed_halfline_UT(zero()), SpectralGrid::make(5.0, 8).real_points());
    for (const auto& r : S) EXPECT_LT(max_abs(r.M - CMat4::identity()), 1e-12);
    const auto Sl = compute_S_line(embed_redundant_line(zero()), SpectralGrid::make(5.0, 8).real);
    for (const auto& r : Sl) EXPECT_LT(max_abs(r.M - CMat4::identity()), 1e-12);
}

TEST(DirectScattering, OffAxisRecordsMaskTheUnboundedColumn) {
    const auto up = integrate_x(embed_halfline_UT(sech(0.2)), cd(0.5, 1.0));
    EXPECT_FALSE(up.left_valid);
    EXPECT_TRUE(up.right_valid);
    EXPECT_TRUE(std::isnan(up.M(0, 0).real()));
    EXPECT_TRUE(std::isfinite(up.M(0, 2).real()));
    const auto down = integrate_x(embed_halfline_UT(sech(0.2)), cd(0.5, -1.0));
    EXPECT_TRUE(down.left_valid);
    EXPECT_FALSE(down.right_valid);
}

TEST(DirectScattering, UnimodularOnTheSpectralGrid) {
    const LinePotential p = sech(0.3).refined(2);
    const auto S = compute_S(embed_halfline_UT(p), mixed_points());
    EXPECT_LT(det_residual(S), 1e-10);
    EXPECT_LT(block_diagonality_residual(S), 1e-15);
    const auto Sl = compute_S_line(embed_redundant_line(p), SpectralGrid::make(5.0, 8).real);
    EXPECT_LT(det_residual(Sl), 1e-10);
}

TEST(DirectScattering, LinearInSmallAmplitude) {
    const std::vector<cd> ks{0.3, -1.2, cd(0.0, 0.7), cd(0.8, 0.4)};
    const auto S1 = compute_S(embed_halfline_UT(sech(1e-3)), ks);
    const auto S2 = compute_S(embed_halfline_UT(sech(2e-3)), ks);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        CMat4 d1 = S1[i].M - CMat4::identity(), d2 = S2[i].M - CMat4::identity();
        for (auto* m : {&d1, &d2})
            for (auto& v : m->a)
                if (std::isnan(v.real())) v = 0.0;
        ASSERT_GT(max_abs(d1), 1e-5);
        EXPECT_LT(max_abs(d2 - 2.0 * d1) / max_abs(d1), 1e-2);
    }
}

TEST(DirectScattering, RichardsonEstimateTracksRefinement) {
    const LinePotential p = sech(0.3, 256);
    const auto coarse = integrate_x(embed_halfline_UT(p), 2.0, {true});
    const auto fine = integrate_x(embed_halfline_UT(p.refined(8)), 2.0, {true});
    EXPECT_GT(coarse.error_estimate, 0.0);
    EXPECT_LT(fine.error_estimate, coarse.error_estimate);
    EXPECT_LT(max_abs(fine.M - coarse.M), 100.0 * coarse.error_estimate);
}

TEST(DirectScattering, ZeroDetectionThresholdIsEnforced) {
    const auto S = compute_S(embed_halfline_UT(sech(0.3)), {cd(0.0, 0.5)});
    EXPECT_NO_THROW(check_no_zeros(S));
    EXPECT_THROW(check_no_zeros(S, 10.0), DiscreteSpectrumSuspected);
}

TEST(DirectScattering, TimeTransformOfZeroDataIsIdentity) {
    BoundaryData bd;
    bd.T = 1.0;
    for (int i = 0; i <= 20; ++i) {
        bd.t.push_back(i / 20.0);
        bd.G0.push_back({0.0, 0.0});
        bd.G1.push_back({0.0, 0.0});
        bd.H0.push_back({0.0, 0.0});
        bd.H1.push_back({0.0, 0.0});
    }
    for (const auto& r : compute_T(bd, {0.5, cd(0.0, 0.3)})) {
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                if (std::isfinite(r.M(i, j).real())) {
                    EXPECT_LT(std::abs(r.M(i, j) - (i == j ? 1.0 : 0.0)), 1e-14);
                }
    }
}

TEST(DirectScattering, GridIsClosedUnderReflection) {
    const SpectralGrid g = SpectralGrid::make(4.0, 10);
    for (double k : g.real) EXPECT_NE(std::find(g.real.begin(), g.real.end(), -k), g.real.end());
    for (cd k : g.fan) EXPECT_NE(std::find(g.fan.begin(), g.fan.end(), std::conj(k)), g.fan.end());
}

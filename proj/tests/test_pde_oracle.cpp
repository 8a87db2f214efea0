#include <gtest/gtest.h>

#include "ismut/pde_oracle.hpp"

using namespace ismut;

namespace {

oracle::EvolutionConfig config(double T, std::size_t N = 512, double L = 20.0) {
    oracle::EvolutionConfig c;
    c.L = L;
    c.N = N;
    c.dt = 1e-3;
    c.T = T;
    return c;
}

LinePotential seed(double A) {
    return LinePotential::sample(
        20.0, 512, [A](double x) { return cd(A / std::cosh(x - 0.5)) * std::exp(cd(0.0, 0.2 * x)); },
        [](double) { return cd{}; });
}

}  // namespace

TEST(Oracle, LinearLimitMatchesExactGaussianSpreading) {
    // i q_t + q_xx = 0 for a Gaussian: q = (1 + 4 i t)^{-1/2} exp(-x^2 / (1 + 4 i t))
    const double eps = 1e-6, T = 0.5;
    const auto p = LinePotential::sample(
        20.0, 512, [eps](double x) { return cd(eps * std::exp(-x * x)); }, [](double) { return cd{}; });
    const auto traj = oracle::evolve(p, config(T));
    const auto& f = traj.final().field;
    double err = 0.0;
    for (std::size_t j = 0; j < f.N(); ++j) {
        const cd d = 1.0 + 4.0 * I_unit * T;
        err = std::max(err, std::abs(f.q[j] - eps * std::exp(-f.x(j) * f.x(j) / d) / std::sqrt(d)));
    }
    EXPECT_LT(err, 1e-12);
}

TEST(Oracle, QRIntegralIsConserved) {
    const auto traj = oracle::evolve(oracle::specialize(oracle::Kind::Local, -1.0, seed(0.5)), config(1.0));
    for (const cd v : traj.qr_integral) EXPECT_LT(std::abs(v - traj.qr_integral.front()), 1e-8);
}

TEST(Oracle, ReductionsPersist) {
    for (const auto kind : {oracle::Kind::Local, oracle::Kind::Nonlocal}) {
        auto cfg = config(1.0);
        cfg.snapshot_every = 250;
        const auto traj = oracle::evolve(oracle::specialize(kind, -1.0, seed(0.3)), cfg);
        ASSERT_EQ(traj.snapshots.size(), 5u);
        for (const auto& s : traj.snapshots) {
            const auto ref = oracle::specialize(kind, -1.0, s.field);
            for (std::size_t j = 0; j < ref.N(); ++j) EXPECT_LT(std::abs(ref.r[j] - s.field.r[j]), 1e-6);
        }
    }
}

TEST(Oracle, TracesCoverTheTimeGrid) {
    const auto traj = oracle::evolve(seed(0.1), config(0.1));
    EXPECT_EQ(traj.traces.t.size(), 101u);
    EXPECT_DOUBLE_EQ(traj.traces.t.back(), 0.1);
    EXPECT_EQ(traj.traces.q.front(), seed(0.1).q[256]);
}

TEST(Oracle, RejectsBadConfigs) {
    auto c = config(1.0);
    c.N = 500;
    EXPECT_THROW(oracle::evolve(seed(0.1), c), std::invalid_argument);
    c = config(1.0005);
    EXPECT_THROW(oracle::evolve(seed(0.1), c), std::invalid_argument);
}

TEST(Oracle, SpecializeMirrorsForNonlocal) {
    const auto p = oracle::specialize(oracle::Kind::Nonlocal, 1.0, seed(0.4));
    for (std::size_t j = 0; j < p.N(); ++j) EXPECT_EQ(p.r[j], std::conj(p.q[p.mirror(j)]));
}

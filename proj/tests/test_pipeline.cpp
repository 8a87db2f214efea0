#include <gtest/gtest.h>

#include "ismut/pipeline.hpp"

using namespace ismut;
using pipeline::Config;

namespace {

Config quick() {
    Config c;
    c.x_max = 2.0;
    c.times = {0.0, 0.25};
    return c;
}

}  // namespace

TEST(Pipeline, ZeroAmplitudeGivesZeroResiduals) {
    Config c = quick();
    c.amplitude = 0.0;
    std::vector<pipeline::SweepPoint> pts;
    const auto rep = pipeline::run_equivalence(c, &pts);
    EXPECT_EQ(rep.exit_code(), 0) << rep.doc().dump(1);
    EXPECT_EQ(rep.value("equivalence_nodes"), 0.0);
    EXPECT_EQ(rep.value("potential_link"), 0.0);
    for (const auto& p : pts) EXPECT_EQ(std::abs(p.Q_line[0]), 0.0);
}

TEST(Pipeline, EquivalenceOnAShortSweep) {
    const auto rep = pipeline::run_equivalence(quick());
    EXPECT_EQ(rep.exit_code(), 0) << rep.doc().dump(1);
    EXPECT_LT(rep.value("equivalence_nodes"), 1e-5);
    EXPECT_LT(rep.value("reconstruction_vs_oracle"), 1e-4);
}

TEST(Pipeline, GlobalRelationViolationIsStageTagged) {
    Config c = quick();
    c.perturb_G0 = 2.0;
    const auto rep = pipeline::run_equivalence(c);
    EXPECT_EQ(rep.exit_code(), pipeline::kGlobalRelation);
    EXPECT_FALSE(rep.passed("gr1"));
    EXPECT_FALSE(rep.has("equivalence_nodes"));
}

TEST(Pipeline, ReportsAreDeterministic) {
    Config c = quick();
    c.times = {0.0};
    c.x_max = 1.0;
    EXPECT_EQ(pipeline::run_equivalence(c).doc().dump(), pipeline::run_equivalence(c).doc().dump());
}

TEST(Pipeline, ScatterZeroPotentialIsIdentity) {
    Config c;
    c.amplitude = 0.0;
    io::json data;
    const auto rep = pipeline::run_scatter(c, &data);
    EXPECT_EQ(rep.exit_code(), 0);
    for (const auto& rec : data["S_line"]) {
        const CMat4 m = io::matrix_from<4>(rec["S"]);
        EXPECT_LT(max_abs(m - CMat4::identity()), 1e-12);
    }
}

TEST(Pipeline, ReductionAuditBothKinds) {
    for (const char* kind : {"nls", "nonlocal"}) {
        Config c;
        c.kind = kind;
        c.T = 0.25;
        const auto rep = pipeline::run_reduction_audit(c);
        EXPECT_EQ(rep.exit_code(), 0) << kind << rep.doc().dump(1);
    }
    Config g;
    g.kind = "general";
    EXPECT_NE(pipeline::run_reduction_audit(g).exit_code(), 0);
}

TEST(Pipeline, SeededProfilesAreReproducible) {
    Config a;
    a.profile = "random";
    a.seed = 7;
    Config b = a;
    EXPECT_EQ(pipeline::initial_potential(a).q, pipeline::initial_potential(b).q);
    b.seed = 8;
    EXPECT_NE(pipeline::initial_potential(a).q, pipeline::initial_potential(b).q);
}

TEST(Pipeline, InterpolationIsSpectral) {
    const auto p = LinePotential::sample(10.0, 256, [](double x) { return cd(std::exp(-x * x), 0.0); }, [](double) { return cd{}; });
    for (double x : {0.013, 1.37, -2.5}) EXPECT_LT(std::abs(pipeline::interpolate(p.q, p.L, x) - std::exp(-x * x)), 1e-12);
}

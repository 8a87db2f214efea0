// Acceptance run: one line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "ismut/pipeline.hpp"

using namespace ismut;
using pipeline::Config;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

/// |M - 1| over the finite (unmasked) entries.
double identity_departure(const std::vector<ScatteringRecord>& recs) {
    double r = 0.0;
    for (const auto& rec : recs)
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                if (std::isfinite(rec.M(i, j).real())) r = std::max(r, std::abs(rec.M(i, j) - (i == j ? 1.0 : 0.0)));
    return r;
}

std::vector<cd> full_grid(const SpectralGrid& g) {
    std::vector<cd> ks = g.real_points();
    for (const cd k : g.imag_points()) ks.push_back(k);
    for (const cd k : g.fan) ks.push_back(k);
    return ks;
}

oracle::Trajectory evolve(const LinePotential& lp, double T) {
    oracle::EvolutionConfig e;
    e.L = lp.L;
    e.N = lp.N();
    e.dt = 1e-3;
    e.T = T;
    return oracle::evolve(lp, e);
}

Outcome zero_data() {
    Config c;
    c.amplitude = 0.0;
    c.N = 256;
    c.refine = 1;
    const LinePotential lp = pipeline::initial_potential(c);
    const SpectralGrid g = SpectralGrid::make(c.kmax, 10);
    const auto ks = full_grid(g);
    const auto traj = evolve(lp, 0.1);
    const BoundaryData bd = extract_boundary_data(traj.traces);
    const double scat = std::max({identity_departure(compute_S(embed_halfline_UT(lp), ks)),
                                  identity_departure(compute_T(bd, ks)),
                                  identity_departure(compute_S_line(embed_redundant_line(lp), g.real))});
    const rh::Contour lens = rh::lens_contour(c.contour), line = rh::line_contour(c.contour);
    const auto sr = rh::solve_rh(lens, lens.cauchy_plus(),
                                 rh::build_J_quadrants(lens, rh::lens_data(embed_halfline_UT(lp), lens), 1.0, 0.5));
    const auto sl = rh::solve_rh(line, line.cauchy_plus(),
                                 rh::build_J_line(rh::line_data(embed_redundant_line(lp), line), 1.0, 0.5));
    double M = 0.0;
    for (const auto* s : {&sr, &sl})
        for (const auto& m : s->Mplus) M = std::max(M, max_abs(m - CMat4::identity()));
    const double W = std::max(max_abs(rh::reconstruct_potential(sr)), max_abs(rh::reconstruct_potential(sl)));
    return {scat <= 1e-12 && M <= 1e-12 && W <= 1e-12,
            fmt("|S-1|,|T-1|,|Sline-1| %.1e", scat) + fmt("  |M-1| %.1e", M) + fmt("  |W| %.1e", W)};
}

Outcome unimodularity() {
    Config c;
    c.amplitude = 0.3;
    const LinePotential lp = pipeline::initial_potential(c);
    const LinePotential fine = lp.refined(c.refine);
    const SpectralGrid g = SpectralGrid::make(c.kmax, c.n_half);
    const auto ks = full_grid(g);
    const auto traj = evolve(lp, 1.0);
    const double dS = det_residual(compute_S(embed_halfline_UT(fine), ks));
    const double dT = det_residual(compute_T(extract_boundary_data(traj.traces), ks));
    const double dL = det_residual(compute_S_line(embed_redundant_line(fine), g.real));
    const double worst = std::max({dS, dT, dL});
    return {worst < 1e-8, fmt("det S %.1e", dS) + fmt("  det T %.1e", dT) + fmt("  det Sline %.1e", dL) +
                              fmt("  (%g k samples)", static_cast<double>(ks.size()))};
}

Outcome global_relation() {
    Config c;
    c.amplitude = 0.2;
    c.T = 1.0;
    const LinePotential lp = pipeline::initial_potential(c);
    const auto traj = evolve(lp, c.T);
    pipeline::Report ok(c);
    pipeline::detail::global_relation(c, lp, traj.final().field, pipeline::detail::boundary_data(c, traj, ok), ok);
    Config bad_cfg = c;
    bad_cfg.perturb_G0 = 2.0;
    pipeline::Report bad(bad_cfg);
    pipeline::detail::global_relation(c, lp, traj.final().field, pipeline::detail::boundary_data(bad_cfg, traj, bad), bad);
    const double gr = std::max(ok.value("gr1"), ok.value("gr2"));
    const double perturbed = std::max(bad.value("gr1"), bad.value("gr2"));
    return {gr < 5e-6 && perturbed > 1e-2,
            fmt("GR residual %.2e", gr) + fmt("  with 2x G0 %.2e", perturbed) + fmt("  (uncorrected %.2e)", ok.doc()["info"]["gr1_raw"].get<double>())};
}

Outcome embedding_relations() {
    Config c;
    c.amplitude = 0.2;
    const LinePotential lp = pipeline::initial_potential(c);
    const LinePotential fine = lp.refined(c.refine);
    const SpectralGrid g = SpectralGrid::make(c.kmax, c.n_half);
    const double ss = check_relation_SSline(compute_S(embed_halfline_UT(fine), g.real_points()),
                                            compute_S_line(embed_redundant_line(fine), g.real))["relation_SSline"];
    const auto traj = evolve(lp, 1.0);
    const double rt = check_relation_T(compute_T(extract_boundary_data(traj.traces), full_grid(g)))["relation_T"];
    return {ss < 5e-6 && rt < 5e-6, fmt("relation_SSline %.2e", ss) + fmt("  relation_T %.2e", rt)};
}

Outcome equivalence() {
    Config c;  // amplitude 0.1, x in [0, L], t in {0, 0.5}
    const auto rep = pipeline::run_equivalence(c);
    if (rep.doc().contains("error")) return {false, rep.doc()["error"].dump()};
    const double node = rep.value("equivalence_nodes"), pot = rep.value("potential_link");
    const auto n = rep.doc()["info"]["lens_nodes"].get<std::size_t>();
    return {node < 1e-5 && pot < 1e-4 && n >= 1000 && rep.exit_code() == 0,
            fmt("node residual %.2e", node) + fmt("  |Qline - s3 Qred| %.2e", pot) +
                fmt("  vs oracle %.2e", rep.value("reconstruction_vs_oracle")) + fmt("  (%g lens nodes)", double(n))};
}

Outcome round_trip() {
    Config c;
    // uniform panels, no grading: bisection then doubles every panel
    const rh::ContourOptions o{2.0, 30.0, 8.0, 4.0, 1.0, 1.0, 4.0};
    const auto levels = pipeline::line_roundtrip(c, rh::line_contour(o), 3);
    std::string d;
    bool ok = levels.back().error < 1e-4;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        d += fmt("%g nodes: ", double(levels[i].nodes)) + fmt("%.2e", levels[i].error);
        if (i > 0) {
            const double order = std::log2(levels[i - 1].error / levels[i].error);
            ok = ok && order >= 2.0;
            d += fmt(" (order %.1f)", order);
        }
        d += i + 1 < levels.size() ? ", " : "";
    }
    return {ok, d};
}

Outcome classification() {
    Config c;
    io::json data;
    const auto rep = pipeline::run_classify(c, &data);
    bool shapes = data["families"].size() == 2;
    for (const auto& f : data["families"])
        shapes = shapes && f["block_shape"].get<std::string>() == (f["gamma"].get<int>() == 1 ? "diagonal" : "antidiagonal");
    return {rep.exit_code() == 0 && shapes,
            fmt("%g families", double(data["family_count"].get<std::size_t>())) + fmt("  constraint residual %.1e", rep.value("constraints"))};
}

pipeline::Report audit(const char* kind) {
    Config c;
    c.kind = kind;
    c.T = 1.0;
    return pipeline::run_reduction_audit(c);
}

Outcome dichotomy(const pipeline::Report& nls, const pipeline::Report& nn) {
    const double s1 = nls.value("structure");
    const double s2 = std::max({nn.value("structure"), nn.value("alpha_symmetry"), nn.value("alpha_bar_symmetry")});
    return {s1 < 5e-7 && s2 < 5e-7, fmt("NLS structure %.2e", s1) + fmt("  nonlocal structure/alpha %.2e", s2)};
}

Outcome b_symmetry(const pipeline::Report& nls, const pipeline::Report& nn) {
    double w = 0.0;
    for (const auto* r : {&nls, &nn}) w = std::max({w, r->value("b_symmetry_S"), r->value("b_symmetry_T")});
    return {w < 5e-7, fmt("max over S, T and both families %.2e", w)};
}

Outcome oracle_integrity() {
    double drift = 0.0, pers = 0.0;
    for (const char* kind : {"nls", "nonlocal"}) {
        Config c;
        c.kind = kind;
        c.amplitude = 0.3;
        c.T = 1.0;
        const auto rep = pipeline::run_oracle(c);
        drift = std::max(drift, rep.value("qr_conservation"));
        pers = std::max(pers, rep.value("reduction_persistence"));
    }
    return {drift < 1e-8 && pers < 1e-6, fmt("qr drift %.2e", drift) + fmt("  persistence %.2e", pers)};
}

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;
    int failures = 0;
    const auto run = [&](int id, const char* name, double budget, const std::function<Outcome()>& fn) {
        const auto t0 = clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(clock::now() - t0).count();
        const bool pass = o.pass && s < budget;
        failures += !pass;
        std::printf("[%s] %2d %-28s %s  [%.1f s / %.0f s]\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), s, budget);
        std::fflush(stdout);
    };

    run(1, "zero-data sanity", 1, zero_data);
    run(2, "unimodularity", 30, unimodularity);
    run(3, "global relation", 60, global_relation);
    run(4, "embedding relations", 60, embedding_relations);
    run(5, "equivalence", 300, equivalence);
    run(6, "round trip", 120, round_trip);
    run(7, "classification", 1, classification);
    pipeline::Report nls(Config{}), nn(Config{});
    run(8, "scattering dichotomy", 60, [&] {
        nls = audit("nls");
        nn = audit("nonlocal");
        return dichotomy(nls, nn);
    });
    run(9, "B-symmetry of S and T", 60, [&] {
        if (!nls.has("b_symmetry_T")) nls = audit("nls");
        if (!nn.has("b_symmetry_T")) nn = audit("nonlocal");
        return b_symmetry(nls, nn);
    });
    run(10, "oracle integrity", 30, oracle_integrity);

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

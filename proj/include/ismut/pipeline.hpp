#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ismut/akns.hpp"
#include "ismut/direct_scattering.hpp"
#include "ismut/io.hpp"
#include "ismut/pde_oracle.hpp"
#include "ismut/reductions.hpp"
#include "ismut/rh_solver.hpp"
#include "ismut/symmetries.hpp"

namespace ismut::pipeline {

using io::json;

/// Exit codes. A failed check exits with the code of the stage it belongs to.
enum Stage : int {
    kOk = 0,
    kUsage = 2,
    kConfig = 3,
    kOracle = 10,
    kScattering = 11,
    kGlobalRelation = 12,
    kSymmetry = 13,
    kRiemannHilbert = 14,
    kEquivalence = 15,
    kReduction = 16,
    kClassification = 17,
};

struct Tolerances {
    double det = 1e-8;
    double global_relation = 5e-6;
    double relation = 5e-6;
    double boundary_symmetry = 1e-10;
    double rh_residual = 1e-8;
    /// |det M_+ - 1| measures the discretization error of M, like the node comparison
    double rh_det = 1e-5;
    double continuity = 1e-6;
    double equivalence = 1e-5;
    double potential = 1e-4;
    double structure = 5e-7;
    double b_symmetry = 5e-7;
    double conservation = 1e-8;
    double persistence = 1e-6;
    double endpoint = 1e-8;
    double constraints = 1e-12;
};

struct Config {
    std::string scenario = "equivalence";
    // initial data: amplitude sech(x - center) e^{i chirp x}, or a seeded sum of chirped Gaussians
    std::string potential_file;
    std::string profile = "sech";  // sech | random
    std::string kind = "nls";  // nls | nonlocal | general
    double eps = -1.0;
    double amplitude = 0.1;
    double center = 0.5;
    double chirp = 0.2;
    // line grid and evolution
    double L = 20.0;
    std::size_t N = 1024;
    std::size_t refine = 4;
    double dt = 1e-3;
    double T = 0.5;
    // spectral grid for the direct problem
    double kmax = 8.0;
    std::size_t n_half = 40;
    double ray_r0 = 0.05, ray_r1 = 4.0;
    std::size_t ray_n = 16;
    // RH
    rh::ContourOptions contour{1.5, 30.0, 5.0, 0.4, 0.75, 0.75, 0.15};
    double x_max = -1.0;  // negative: L
    double x_step = 1.0;
    std::vector<double> times{0.0, 0.5};
    /// multiply the Dirichlet datum G0 before use (1 = untouched)
    double perturb_G0 = 1.0;
    Tolerances tol;
    std::string out_dir;
    unsigned seed = 0;

    double xmax() const { return x_max < 0 ? L : x_max; }

    json to_json() const {
        const auto& c = contour;
        return {{"scenario", scenario},
                {"potential", {{"file", potential_file}, {"profile", profile}, {"kind", kind}, {"eps", eps}, {"amplitude", amplitude},
                               {"center", center}, {"chirp", chirp}}},
                {"grid", {{"L", L}, {"N", N}, {"refine", refine}}},
                {"evolution", {{"dt", dt}, {"T", T}}},
                {"spectral", {{"kmax", kmax}, {"n_half", n_half}, {"ray_r0", ray_r0}, {"ray_r1", ray_r1}, {"ray_n", ray_n}}},
                {"contour", {{"K0", c.K0}, {"Kmax", c.Kmax}, {"K_active", c.K_active}, {"h_real", c.h_real},
                             {"h_imag", c.h_imag}, {"h_arc", c.h_arc}, {"h_min", c.h_min}}},
                {"sweep", {{"x_max", xmax()}, {"x_step", x_step}, {"times", times}}},
                {"perturb_G0", perturb_G0},
                {"tolerances", {{"det", tol.det}, {"global_relation", tol.global_relation}, {"relation", tol.relation},
                                {"boundary_symmetry", tol.boundary_symmetry}, {"rh_residual", tol.rh_residual}, {"rh_det", tol.rh_det},
                                {"continuity", tol.continuity}, {"equivalence", tol.equivalence},
                                {"potential", tol.potential}, {"structure", tol.structure}, {"b_symmetry", tol.b_symmetry},
                                {"conservation", tol.conservation}, {"persistence", tol.persistence},
                                {"endpoint", tol.endpoint}, {"constraints", tol.constraints}}},
                {"seed", seed}};
    }

    /// Missing keys keep their defaults; unknown keys are rejected.
    static Config from_json(const json& j) {
        Config c;
        const auto known = [](const json& obj, std::initializer_list<const char*> keys, const char* where) {
            for (const auto& [k, _] : obj.items())
                if (std::find_if(keys.begin(), keys.end(), [&](const char* s) { return k == s; }) == keys.end())
                    throw std::invalid_argument(std::string("config: unknown key '") + k + "' in " + where);
        };
        known(j, {"scenario", "potential", "grid", "evolution", "spectral", "contour", "sweep", "perturb_G0", "tolerances", "seed", "out_dir"}, "root");
        c.scenario = j.value("scenario", c.scenario);
        c.out_dir = j.value("out_dir", c.out_dir);
        c.seed = j.value("seed", c.seed);
        c.perturb_G0 = j.value("perturb_G0", c.perturb_G0);
        if (j.contains("potential")) {
            const auto& p = j["potential"];
            known(p, {"file", "profile", "kind", "eps", "amplitude", "center", "chirp"}, "potential");
            c.potential_file = p.value("file", c.potential_file);
            c.profile = p.value("profile", c.profile);
            c.kind = p.value("kind", c.kind);
            c.eps = p.value("eps", c.eps);
            c.amplitude = p.value("amplitude", c.amplitude);
            c.center = p.value("center", c.center);
            c.chirp = p.value("chirp", c.chirp);
        }
        if (j.contains("grid")) {
            const auto& g = j["grid"];
            known(g, {"L", "N", "refine"}, "grid");
            c.L = g.value("L", c.L);
            c.N = g.value("N", c.N);
            c.refine = g.value("refine", c.refine);
        }
        if (j.contains("evolution")) {
            const auto& e = j["evolution"];
            known(e, {"dt", "T"}, "evolution");
            c.dt = e.value("dt", c.dt);
            c.T = e.value("T", c.T);
        }
        if (j.contains("spectral")) {
            const auto& s = j["spectral"];
            known(s, {"kmax", "n_half", "ray_r0", "ray_r1", "ray_n"}, "spectral");
            c.kmax = s.value("kmax", c.kmax);
            c.n_half = s.value("n_half", c.n_half);
            c.ray_r0 = s.value("ray_r0", c.ray_r0);
            c.ray_r1 = s.value("ray_r1", c.ray_r1);
            c.ray_n = s.value("ray_n", c.ray_n);
        }
        if (j.contains("contour")) {
            const auto& s = j["contour"];
            known(s, {"K0", "Kmax", "K_active", "h_real", "h_imag", "h_arc", "h_min"}, "contour");
            auto& o = c.contour;
            o.K0 = s.value("K0", o.K0);
            o.Kmax = s.value("Kmax", o.Kmax);
            o.K_active = s.value("K_active", o.K_active);
            o.h_real = s.value("h_real", o.h_real);
            o.h_imag = s.value("h_imag", o.h_imag);
            o.h_arc = s.value("h_arc", o.h_arc);
            o.h_min = s.value("h_min", o.h_min);
        }
        if (j.contains("sweep")) {
            const auto& s = j["sweep"];
            known(s, {"x_max", "x_step", "times"}, "sweep");
            c.x_max = s.value("x_max", c.x_max);
            c.x_step = s.value("x_step", c.x_step);
            if (s.contains("times")) c.times = s["times"].get<std::vector<double>>();
        }
        if (j.contains("tolerances")) {
            const auto& t = j["tolerances"];
            auto& o = c.tol;
            known(t, {"det", "global_relation", "relation", "boundary_symmetry", "rh_residual", "rh_det", "continuity", "equivalence",
                      "potential", "structure", "b_symmetry", "conservation", "persistence", "endpoint", "constraints"},
                  "tolerances");
            for (auto [name, ptr] : std::initializer_list<std::pair<const char*, double*>>{
                     {"det", &o.det}, {"global_relation", &o.global_relation}, {"relation", &o.relation},
                     {"boundary_symmetry", &o.boundary_symmetry}, {"rh_residual", &o.rh_residual}, {"rh_det", &o.rh_det},
                     {"continuity", &o.continuity}, {"equivalence", &o.equivalence}, {"potential", &o.potential},
                     {"structure", &o.structure}, {"b_symmetry", &o.b_symmetry}, {"conservation", &o.conservation},
                     {"persistence", &o.persistence}, {"endpoint", &o.endpoint}, {"constraints", &o.constraints}})
                *ptr = t.value(name, *ptr);
        }
        c.validate();
        return c;
    }

    void validate() const {
        if (kind != "nls" && kind != "nonlocal" && kind != "general")
            throw std::invalid_argument("config: kind must be nls, nonlocal or general");
        if (profile != "sech" && profile != "random") throw std::invalid_argument("config: profile must be sech or random");
        const json t = to_json()["tolerances"];
        for (const auto& [name, v] : t.items())
            if (!(v.get<double>() > 0.0)) throw std::invalid_argument("config: tolerance '" + name + "' must be positive");
        if (!(x_step > 0.0)) throw std::invalid_argument("config: x_step must be positive");
        if (!(refine >= 1)) throw std::invalid_argument("config: refine must be >= 1");
    }
};

// ---------------------------------------------------------------------------
// Report

class Report {
public:
    explicit Report(const Config& cfg) { doc_["config"] = cfg.to_json(); }

    /// Record a residual; the first failing check fixes the exit code.
    bool check(const std::string& name, double value, double tol, Stage stage) {
        const bool ok = std::isfinite(value) && value < tol;
        doc_["checks"][name] = {{"value", value}, {"tolerance", tol}, {"pass", ok}, {"stage", stage}};
        if (!ok && exit_ == kOk) exit_ = stage;
        return ok;
    }
    void info(const std::string& name, json v) { doc_["info"][name] = std::move(v); }
    void fail(Stage stage, const std::string& what) {
        doc_["error"] = {{"stage", stage}, {"message", what}};
        if (exit_ == kOk) exit_ = stage;
    }

    int exit_code() const { return exit_; }
    const json& doc() const { return doc_; }
    json& doc() { return doc_; }
    bool has(const std::string& name) const { return doc_.contains("checks") && doc_["checks"].contains(name); }
    double value(const std::string& name) const { return doc_["checks"][name]["value"].get<double>(); }
    bool passed(const std::string& name) const { return doc_["checks"][name]["pass"].get<bool>(); }

private:
    json doc_ = json::object();
    int exit_ = kOk;
};

// ---------------------------------------------------------------------------
// Helpers

/// Independent jobs over [0, n); results land in fixed slots so output is deterministic.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t workers = std::min(hw, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline oracle::Kind oracle_kind(const std::string& kind) {
    return kind == "nonlocal" ? oracle::Kind::Nonlocal : oracle::Kind::Local;
}

/// Initial line potential from the config (file or sech profile).
inline LinePotential initial_potential(const Config& c) {
    if (!c.potential_file.empty()) return io::line_potential_from(io::read_json(c.potential_file));
    const double A = c.amplitude, x0 = c.center, v = c.chirp;
    std::function<cd(double)> q = [=](double x) { return cd(A / std::cosh(x - x0)) * std::exp(cd(0.0, v * x)); };
    if (c.profile == "random") {
        std::mt19937_64 gen(c.seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::array<double, 9> p{};
        for (auto& e : p) e = u(gen);
        // three bumps; weights sum to at most A in modulus
        q = [=](double x) {
            cd s{};
            for (int m = 0; m < 3; ++m)
                s += (A / 3.0) * std::abs(p[3 * m]) * std::exp(-(x - 2.0 * p[3 * m + 1]) * (x - 2.0 * p[3 * m + 1])) *
                     std::exp(cd(0.0, 0.5 * p[3 * m + 2] * x));
            return s;
        };
    }
    if (c.kind == "general") {
        const auto r = [=](double x) { return cd(-0.7 * A / std::cosh(x + 0.3)) * std::exp(cd(0.0, -0.2 * x)); };
        return LinePotential::sample(c.L, c.N, q, r);
    }
    const LinePotential base = LinePotential::sample(c.L, c.N, q, [](double) { return cd{}; });
    return oracle::specialize(oracle_kind(c.kind), c.eps, base);
}

inline std::vector<double> sweep_x(const Config& c) {
    std::vector<double> xs;
    const auto n = static_cast<std::size_t>(std::floor(c.xmax() / c.x_step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) xs.push_back(static_cast<double>(i) * c.x_step);
    return xs;
}

/// Evolution config that keeps a snapshot at every requested time.
inline oracle::EvolutionConfig evolution_for(const Config& c, double T) {
    oracle::EvolutionConfig e;
    e.L = c.L;
    e.N = c.N;
    e.dt = c.dt;
    e.T = T;
    long long g = 0;
    for (double t : c.times)
        if (t > 0) g = std::gcd(g, std::llround(t / c.dt));
    e.snapshot_every = g > 0 ? static_cast<std::size_t>(g) : 0;
    return e;
}

/// Spectrally interpolated field value at x (the grid is periodic).
inline cd interpolate(const std::vector<cd>& f, double L, double x) {
    const std::size_t n = f.size();
    std::vector<cd> F = f;
    spectral::FFT fft(n);
    fft.forward(F);
    const auto xi = spectral::wavenumbers(n, 2.0 * L);
    cd s{};
    for (std::size_t j = 0; j < n; ++j) {
        const double ph = xi[j] * (x + L);
        // the Nyquist mode is split evenly between +-xi so the result stays real for real data
        s += j == n / 2 ? F[j] * std::cos(ph) : F[j] * std::exp(I_unit * ph);
    }
    return s / static_cast<double>(n);
}

inline std::vector<cd> ray_points(const Config& c) {
    std::vector<cd> ks;
    for (const double ang : {0.0, M_PI / 8, M_PI / 4, 3 * M_PI / 8, M_PI / 2})
        for (const cd k : ray(ang, c.ray_r0, c.ray_r1, c.ray_n)) {
            ks.push_back(k);
            ks.push_back(std::conj(k));
        }
    return ks;
}

/// Reduction candidate realizing the configured kind: r = eps q* or r(x) = eps q*(-x).
inline reductions::ReductionCandidate candidate_for(const Config& c) {
    // coupling c = eps_B p-/p+ with eps_B = -1
    if (c.kind == "nls") return reductions::make_candidate(-1, 1, 0.0, 1, 1.0, -c.eps);
    if (c.kind == "nonlocal") return reductions::make_candidate(-1, -1, 0.0, 1, 1.0, -c.eps);
    throw std::invalid_argument("reduction candidate needs kind nls or nonlocal");
}

// ---------------------------------------------------------------------------
// Scenarios

/// Direct problem: S on the half line (R, iR, fan), S^line on R, unimodularity.
inline Report run_scatter(const Config& cfg, json* data = nullptr) {
    Report rep(cfg);
    try {
        const LinePotential lp = initial_potential(cfg);
        rep.info("endpoint", lp.endpoint_magnitude());
        const LinePotential fine = lp.refined(cfg.refine);
        const HalfLinePotential hp = embed_halfline_UT(fine);
        const RedundantLinePotential rp = embed_redundant_line(fine);
        const SpectralGrid g = SpectralGrid::make(cfg.kmax, cfg.n_half);
        std::vector<cd> ks = g.real_points();
        for (const cd k : g.imag_points()) ks.push_back(k);
        for (const cd k : g.fan) ks.push_back(k);
        const IntegrationOptions opt{true};
        const auto S = compute_S(hp, ks, opt);
        const auto Sl = compute_S_line(rp, g.real, opt);
        rep.check("det_S", det_residual(S), cfg.tol.det, kScattering);
        rep.check("det_S_line", det_residual(Sl), cfg.tol.det, kScattering);
        rep.check("block_diagonality", std::max(block_diagonality_residual(S), block_diagonality_residual(Sl)), cfg.tol.det,
                  kScattering);
        rep.info("max_error_estimate", std::max(max_error_estimate(S), max_error_estimate(Sl)));
        check_no_zeros(S);
        if (data) *data = {{"S", io::to_json(S)}, {"S_line", io::to_json(Sl)}};
    } catch (const std::exception& e) {
        rep.fail(kScattering, e.what());
    }
    return rep;
}

/// Reference evolution with conservation, decay and reduction-persistence checks.
inline Report run_oracle(const Config& cfg, oracle::Trajectory* out = nullptr) {
    Report rep(cfg);
    try {
        const LinePotential lp = initial_potential(cfg);
        oracle::EvolutionConfig e = evolution_for(cfg, cfg.T);
        if (e.snapshot_every == 0) e.snapshot_every = std::max<std::size_t>(1, e.steps() / 10);
        const auto traj = oracle::evolve(lp, e);
        double drift = 0.0, endpoint = 0.0;
        for (const cd v : traj.qr_integral) drift = std::max(drift, std::abs(v - traj.qr_integral.front()));
        for (const auto& s : traj.snapshots) endpoint = std::max(endpoint, s.field.endpoint_magnitude());
        rep.check("qr_conservation", drift, cfg.tol.conservation, kOracle);
        rep.check("endpoint", endpoint, cfg.tol.endpoint, kOracle);
        if (cfg.kind != "general") {
            double pers = 0.0;
            for (const auto& s : traj.snapshots) {
                const LinePotential ref = oracle::specialize(oracle_kind(cfg.kind), cfg.eps, s.field);
                for (std::size_t j = 0; j < ref.N(); ++j) pers = std::max(pers, std::abs(ref.r[j] - s.field.r[j]));
            }
            rep.check("reduction_persistence", pers, cfg.tol.persistence, kOracle);
        }
        rep.info("steps", traj.config.steps());
        if (out) *out = traj;
    } catch (const std::exception& e) {
        rep.fail(kOracle, e.what());
    }
    return rep;
}

namespace detail {

/// Boundary data from the oracle traces with the configured G0 perturbation.
inline BoundaryData boundary_data(const Config& cfg, const oracle::Trajectory& traj, Report& rep) {
    BoundaryData bd = extract_boundary_data(traj.traces, cfg.tol.boundary_symmetry);
    rep.check("boundary_symmetry", bd.symmetry_residual(), cfg.tol.boundary_symmetry, kSymmetry);
    const auto K = reductions::check_linearizable(reductions::LinearizableK::symmetric(), bd);
    rep.check("linearizable_K", K.max(), cfg.tol.boundary_symmetry, kSymmetry);
    if (cfg.perturb_G0 != 1.0)
        for (auto& g : bd.G0) {
            g[0] *= cfg.perturb_G0;
            g[1] *= cfg.perturb_G0;
        }
    return bd;
}

/// Global relation with the finite-T tail on D1/D4 rays.
inline void global_relation(const Config& cfg, const LinePotential& initial, const LinePotential& final_field,
                            const BoundaryData& bd, Report& rep) {
    const HalfLinePotential h0 = embed_halfline_UT(initial.refined(cfg.refine));
    const HalfLinePotential hT = embed_halfline_UT(final_field.refined(cfg.refine));
    const auto ks = ray_points(cfg);
    const auto S = compute_S(h0, ks), ST = compute_S(hT, ks);
    const auto T = compute_T(bd, ks);
    const auto gr = check_global_relation(S, T, &ST, bd.T, cfg.tol.global_relation);
    rep.info("gr1_raw", gr["gr1_raw"]);
    rep.info("gr2_raw", gr["gr2_raw"]);
    rep.info("time_tail", gr["time_tail"]);
    rep.check("gr1", gr["gr1_corrected"], cfg.tol.global_relation, kGlobalRelation);
    rep.check("gr2", gr["gr2_corrected"], cfg.tol.global_relation, kGlobalRelation);
    // T symmetry on the axes
    const SpectralGrid g = SpectralGrid::make(cfg.ray_r1, cfg.ray_n);
    std::vector<cd> axis = g.real_points();
    for (const cd k : g.imag_points()) axis.push_back(k);
    rep.check("relation_T", check_relation_T(compute_T(bd, axis))["relation_T"], cfg.tol.relation, kSymmetry);
}

}  // namespace detail

struct SweepPoint {
    double x = 0.0, t = 0.0;
    double node_residual = 0.0, continuity = 0.0, potential = 0.0, truth = 0.0;
    double rh_residual = 0.0, det_residual = 0.0;
    Diag2 Q_line{}, Q_red{};
};

/**
 * Half line against line: oracle -> boundary data -> global relation ->
 * embeddings -> S, S^line -> relations -> both RH problems -> deformation ->
 * node and potential comparison over the (x, t) sweep.
 */
inline Report run_equivalence(const Config& cfg, std::vector<SweepPoint>* sweep = nullptr) {
    Report rep(cfg);
    Stage stage = kOracle;
    try {
        const LinePotential lp = initial_potential(cfg);
        const double Tev = *std::max_element(cfg.times.begin(), cfg.times.end());
        oracle::Trajectory traj;
        if (Tev > 0) {
            Config oc = cfg;
            oc.T = Tev;
            traj = oracle::evolve(lp, evolution_for(oc, Tev));
            double drift = 0.0;
            for (const cd v : traj.qr_integral) drift = std::max(drift, std::abs(v - traj.qr_integral.front()));
            rep.check("qr_conservation", drift, cfg.tol.conservation, kOracle);
            stage = kSymmetry;
            const BoundaryData bd = detail::boundary_data(cfg, traj, rep);
            stage = kGlobalRelation;
            detail::global_relation(cfg, lp, traj.final().field, bd, rep);
            if (rep.exit_code() != kOk) return rep;
        }

        stage = kScattering;
        const LinePotential fine = lp.refined(cfg.refine);
        const HalfLinePotential hp = embed_halfline_UT(fine);
        const RedundantLinePotential rp = embed_redundant_line(fine);
        const SpectralGrid g = SpectralGrid::make(cfg.kmax, cfg.n_half);
        const auto S = compute_S(hp, g.real_points());
        const auto Sl = compute_S_line(rp, g.real);
        check_no_zeros(S);
        stage = kSymmetry;
        rep.check("relation_SSline", check_relation_SSline(S, Sl)["relation_SSline"], cfg.tol.relation, kSymmetry);
        const auto idep = check_initial_dependence(S, Sl);
        rep.check("initial_dependence",
                  std::max(idep["tgamma_minus_Gamma"], idep["gamma_minus_tGamma"]), cfg.tol.relation, kSymmetry);

        stage = kRiemannHilbert;
        const rh::Contour lens = rh::lens_contour(cfg.contour);
        const rh::Contour line = rh::line_contour(cfg.contour);
        rep.info("lens_nodes", lens.size());
        rep.info("line_nodes", line.size());
        const auto ing = rh::lens_data(hp, lens);
        const auto ld = rh::line_data(rp, line);
        const Eigen::MatrixXcd Cl = lens.cauchy_plus(), Cn = line.cauchy_plus();

        const auto xs = sweep_x(cfg);
        std::vector<SweepPoint> pts;
        for (double t : cfg.times)
            for (double x : xs) pts.push_back({x, t});
        rh::SolveOptions so;
        so.tolerance = cfg.tol.rh_residual;
        double j2 = 0.0;
        for (double t : cfg.times) {
            const auto c = rh::check_J2(ing, 0.0, t);
            j2 = std::max({j2, c.composed, c.explicit_form});
        }
        rep.check("J2_identity", j2, 1e-10, kRiemannHilbert);

        parallel_for(pts.size(), [&](std::size_t i) {
            SweepPoint& p = pts[i];
            const auto sr = rh::solve_rh(lens, Cl, rh::build_J_quadrants(lens, ing, p.x, p.t), so);
            const auto sl = rh::solve_rh(line, Cn, rh::build_J_line(ld, p.x, p.t), so);
            const auto d = rh::deform_Mred(lens, sr, ing, p.x, p.t);
            const auto eq = rh::check_equivalence(lens, d, line, sl);
            p.node_residual = eq.node_residual;
            p.continuity = d.continuity;
            p.potential = rh::potential_link_residual(sr, sl);
            p.rh_residual = std::max(sr.residual, sl.residual);
            p.det_residual = std::max(sr.det_residual, sl.det_residual);
            p.Q_line = rh::Q_of(rh::reconstruct_potential(sl));
            p.Q_red = rh::Q_of(rh::reconstruct_potential(sr));
            const LinePotential& field = p.t == 0.0 ? lp : traj.at(p.t).field;
            p.truth = std::abs(p.Q_line[0] - interpolate(field.q, field.L, p.x));
        });

        stage = kEquivalence;
        double node = 0, cont = 0, pot = 0, res = 0, det = 0, truth = 0;
        for (const auto& p : pts) {
            node = std::max(node, p.node_residual);
            cont = std::max(cont, p.continuity);
            pot = std::max(pot, p.potential);
            res = std::max(res, p.rh_residual);
            det = std::max(det, p.det_residual);
            truth = std::max(truth, p.truth);
        }
        rep.check("rh_residual", res, cfg.tol.rh_residual, kRiemannHilbert);
        rep.check("rh_det", det, cfg.tol.rh_det, kRiemannHilbert);
        rep.check("continuity_iR", cont, cfg.tol.continuity, kEquivalence);
        rep.check("equivalence_nodes", node, cfg.tol.equivalence, kEquivalence);
        rep.check("potential_link", pot, cfg.tol.potential, kEquivalence);
        rep.check("reconstruction_vs_oracle", truth, cfg.tol.potential, kEquivalence);
        if (sweep) *sweep = pts;
    } catch (const std::exception& e) {
        rep.fail(stage, e.what());
    }
    return rep;
}

/**
 * Half-line UT pipeline on its own: oracle boundary data, global relation and
 * the lens RH reconstruction compared with the oracle on x >= 0.
 */
inline Report run_ut_halfline(const Config& cfg, std::vector<SweepPoint>* sweep = nullptr) {
    Report rep(cfg);
    Stage stage = kOracle;
    try {
        const LinePotential lp = initial_potential(cfg);
        const double Tev = std::max(cfg.T, *std::max_element(cfg.times.begin(), cfg.times.end()));
        Config oc = cfg;
        oc.T = Tev;
        const auto traj = oracle::evolve(lp, evolution_for(oc, Tev));
        stage = kSymmetry;
        const BoundaryData bd = detail::boundary_data(cfg, traj, rep);
        stage = kGlobalRelation;
        detail::global_relation(cfg, lp, traj.final().field, bd, rep);
        if (rep.exit_code() != kOk) return rep;
        stage = kRiemannHilbert;
        const HalfLinePotential hp = embed_halfline_UT(lp.refined(cfg.refine));
        const rh::Contour lens = rh::lens_contour(cfg.contour);
        const auto ing = rh::lens_data(hp, lens);
        const Eigen::MatrixXcd C = lens.cauchy_plus();
        rh::SolveOptions so;
        so.tolerance = cfg.tol.rh_residual;
        std::vector<SweepPoint> pts;
        for (double t : cfg.times)
            for (double x : sweep_x(cfg)) pts.push_back({x, t});
        parallel_for(pts.size(), [&](std::size_t i) {
            SweepPoint& p = pts[i];
            const auto sr = rh::solve_rh(lens, C, rh::build_J_quadrants(lens, ing, p.x, p.t), so);
            p.rh_residual = sr.residual;
            p.Q_red = rh::Q_of(rh::reconstruct_potential(sr));
            const LinePotential& field = p.t == 0.0 ? lp : traj.at(p.t).field;
            p.truth = std::max(std::abs(p.Q_red[0] - interpolate(field.q, field.L, p.x)),
                               std::abs(p.Q_red[1] - interpolate(field.q, field.L, -p.x)));
        });
        double res = 0, truth = 0;
        for (const auto& p : pts) {
            res = std::max(res, p.rh_residual);
            truth = std::max(truth, p.truth);
        }
        rep.check("rh_residual", res, cfg.tol.rh_residual, kRiemannHilbert);
        rep.check("reconstruction_vs_oracle", truth, cfg.tol.potential, kRiemannHilbert);
        if (sweep) *sweep = pts;
    } catch (const std::exception& e) {
        rep.fail(stage, e.what());
    }
    return rep;
}

/// Scalar structure of S^line and the B-symmetry of S and T for the configured reduction.
inline Report run_reduction_audit(const Config& cfg) {
    Report rep(cfg);
    Stage stage = kReduction;
    try {
        const auto cand = candidate_for(cfg);
        rep.info("candidate", io::to_json(cand));
        rep.info("equation", reductions::induced_equation(cand).name());
        rep.check("constraints", reductions::verify_constraints(cand).max(), cfg.tol.constraints, kReduction);
        const LinePotential lp = initial_potential(cfg);
        const LinePotential fine = lp.refined(cfg.refine);
        stage = kScattering;
        const SpectralGrid g = SpectralGrid::make(cfg.kmax, cfg.n_half);
        const auto Sl = compute_S_line(embed_redundant_line(fine), g.real);
        std::vector<cd> ks = g.real_points();
        for (const cd k : g.imag_points()) ks.push_back(k);
        for (const cd k : g.fan) ks.push_back(k);
        const auto S = compute_S(embed_halfline_UT(fine), ks);
        stage = kReduction;
        const auto proj = project_scalar_scattering(Sl, cand);
        rep.check("structure", proj.report["structure"], cfg.tol.structure, kReduction);
        rep.check("mirror_channel", proj.report["mirror_channel"], cfg.tol.structure, kReduction);
        if (cand.gamma == -1) {
            rep.check("alpha_symmetry", proj.report["alpha_symmetry"], cfg.tol.structure, kReduction);
            rep.check("alpha_bar_symmetry", proj.report["alpha_bar_symmetry"], cfg.tol.structure, kReduction);
        }
        rep.info("printed_table_offdiagonal", proj.report["printed_table_offdiagonal"]);
        rep.check("b_symmetry_S", reduction_symmetry_residual(S, cand.B()), cfg.tol.b_symmetry, kReduction);
        if (cfg.T > 0) {
            stage = kOracle;
            const auto traj = oracle::evolve(lp, evolution_for(cfg, cfg.T));
            const BoundaryData bd = extract_boundary_data(traj.traces, cfg.tol.boundary_symmetry);
            const auto T = compute_T(bd, ks);
            stage = kReduction;
            rep.check("b_symmetry_T", reduction_symmetry_residual(T, cand.B()), cfg.tol.b_symmetry, kReduction);
        }
    } catch (const std::exception& e) {
        rep.fail(stage, e.what());
    }
    return rep;
}

/// Families of admissible B with constraint residuals of sample members.
inline Report run_classify(const Config& cfg, json* data = nullptr) {
    Report rep(cfg);
    try {
        const auto cls = reductions::classify_B();
        const json j = io::to_json(cls);
        rep.info("classification", j);
        rep.check("family_count_minus_two", std::abs(static_cast<double>(cls.families.size()) - 2.0), 0.5, kClassification);
        double worst = 0.0;
        for (const auto& f : cls.families)
            for (const auto& cc : f.cases) {
                const int mu = static_cast<int>(cc.mu.re);
                for (const double th : {0.0, 0.7, M_PI})
                    worst = std::max(worst, reductions::verify_constraints(
                                                reductions::make_candidate(-1, f.gamma, th, mu, 1.3, -0.4))
                                                .max());
            }
        rep.check("constraints", worst, cfg.tol.constraints, kClassification);
        if (data) *data = j;
    } catch (const std::exception& e) {
        rep.fail(kClassification, e.what());
    }
    return rep;
}

struct RoundTripLevel {
    std::size_t nodes = 0;
    double error = 0.0;
};

/**
 * scatter -> line RH -> reconstruct at t = 0 against q0, r0 on [-x_span, x_span],
 * on `base` and on `levels - 1` successive panel bisections of it.
 */
inline std::vector<RoundTripLevel> line_roundtrip(const Config& cfg, const rh::Contour& base, std::size_t levels,
                                                  double x_span = 10.0, double x_step = 0.5) {
    const LinePotential lp = initial_potential(cfg);
    const RedundantLinePotential rp = embed_redundant_line(lp.refined(cfg.refine));
    std::vector<double> xs;
    for (double x = -x_span; x <= x_span + 1e-12; x += x_step) xs.push_back(x);
    rh::SolveOptions so;
    so.tolerance = cfg.tol.rh_residual;
    std::vector<RoundTripLevel> out;
    rh::Contour c = base;
    for (std::size_t l = 0; l < levels; ++l) {
        if (l > 0) c = rh::bisect(c);
        const auto ld = rh::line_data(rp, c);
        const Eigen::MatrixXcd C = c.cauchy_plus();
        std::vector<double> err(xs.size());
        parallel_for(xs.size(), [&](std::size_t i) {
            const double x = xs[i];
            const CMat4 W = rh::reconstruct_potential(rh::solve_rh(c, C, rh::build_J_line(ld, x, 0.0), so));
            const Diag2 Q = rh::Q_of(W), R = rh::R_of(W);
            err[i] = std::max({std::abs(Q[0] - interpolate(lp.q, lp.L, x)), std::abs(Q[1] + interpolate(lp.q, lp.L, -x)),
                               std::abs(R[0] - interpolate(lp.r, lp.L, x)), std::abs(R[1] + interpolate(lp.r, lp.L, -x))});
        });
        out.push_back({c.size(), *std::max_element(err.begin(), err.end())});
    }
    return out;
}

/// CSV rows x, t and re/im of each component of Q^line and sigma3 Q^red.
inline io::CsvWriter sweep_csv(const std::vector<SweepPoint>& pts) {
    io::CsvWriter w({"x", "t", "re_Qline_0", "im_Qline_0", "re_Qline_1", "im_Qline_1", "re_s3Qred_0", "im_s3Qred_0",
                     "re_s3Qred_1", "im_s3Qred_1", "node_residual"});
    for (const auto& p : pts)
        w.row({p.x, p.t, p.Q_line[0].real(), p.Q_line[0].imag(), p.Q_line[1].real(), p.Q_line[1].imag(),
               p.Q_red[0].real(), p.Q_red[0].imag(), -p.Q_red[1].real(), -p.Q_red[1].imag(), p.node_residual});
    return w;
}

}  // namespace ismut::pipeline

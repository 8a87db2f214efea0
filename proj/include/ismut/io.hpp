#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ismut/akns.hpp"
#include "ismut/direct_scattering.hpp"
#include "ismut/reductions.hpp"
#include "ismut/rh_solver.hpp"
#include "ismut/symmetries.hpp"

namespace ismut::io {

using json = nlohmann::ordered_json;

inline json to_json(cd z) { return json::array({z.real(), z.imag()}); }

inline cd complex_from(const json& j) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

template <std::size_t N>
json to_json(const CMat<N>& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < N; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < N; ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

template <std::size_t N>
CMat<N> matrix_from(const json& j) {
    CMat<N> m;
    if (!j.is_array() || j.size() != N) throw std::invalid_argument("matrix has wrong row count");
    for (std::size_t r = 0; r < N; ++r) {
        if (j[r].size() != N) throw std::invalid_argument("matrix has wrong column count");
        for (std::size_t c = 0; c < N; ++c) m(r, c) = complex_from(j[r][c]);
    }
    return m;
}

inline json to_json(const std::vector<cd>& v) {
    json a = json::array();
    for (const cd z : v) a.push_back(to_json(z));
    return a;
}

inline std::vector<cd> vector_from(const json& j) {
    std::vector<cd> v;
    for (const auto& e : j) v.push_back(complex_from(e));
    return v;
}

// --- potentials ------------------------------------------------------------

inline json to_json(const LinePotential& p) {
    return {{"grid", {{"L", p.L}, {"N", p.N()}}}, {"fields", {{"q", to_json(p.q)}, {"r", to_json(p.r)}}}};
}

inline LinePotential line_potential_from(const json& j) {
    LinePotential p;
    p.L = j.at("grid").at("L").get<double>();
    p.q = vector_from(j.at("fields").at("q"));
    p.r = vector_from(j.at("fields").at("r"));
    if (p.N() != j.at("grid").at("N").get<std::size_t>()) throw GridError("potential: N does not match field length");
    p.validate();
    return p;
}

inline json to_json(const HalfLinePotential& p) {
    return {{"grid", {{"L", p.L}, {"N", p.intervals()}}},
            {"fields", {{"q1", to_json(p.q1)}, {"q2", to_json(p.q2)}, {"r1", to_json(p.r1)}, {"r2", to_json(p.r2)}}}};
}

inline HalfLinePotential halfline_potential_from(const json& j) {
    HalfLinePotential p;
    p.L = j.at("grid").at("L").get<double>();
    const auto& f = j.at("fields");
    p.q1 = vector_from(f.at("q1"));
    p.q2 = vector_from(f.at("q2"));
    p.r1 = vector_from(f.at("r1"));
    p.r2 = vector_from(f.at("r2"));
    if (p.q1.size() != j.at("grid").at("N").get<std::size_t>() + 1) throw GridError("half-line potential: N mismatch");
    return p;
}

inline json diag_series(const std::vector<Diag2>& v) {
    json a = json::array();
    for (const auto& d : v) a.push_back(json::array({to_json(d[0]), to_json(d[1])}));
    return a;
}

inline std::vector<Diag2> diag_series_from(const json& j) {
    std::vector<Diag2> v;
    for (const auto& e : j) v.push_back({complex_from(e.at(0)), complex_from(e.at(1))});
    return v;
}

inline json to_json(const BoundaryData& b) {
    return {{"grid", {{"T", b.T}, {"N", b.samples()}, {"t", b.t}}},
            {"fields", {{"G0", diag_series(b.G0)}, {"G1", diag_series(b.G1)}, {"H0", diag_series(b.H0)}, {"H1", diag_series(b.H1)}}},
            {"linearizable", b.linearizable}};
}

inline BoundaryData boundary_data_from(const json& j) {
    BoundaryData b;
    b.T = j.at("grid").at("T").get<double>();
    b.t = j.at("grid").at("t").get<std::vector<double>>();
    const auto& f = j.at("fields");
    b.G0 = diag_series_from(f.at("G0"));
    b.G1 = diag_series_from(f.at("G1"));
    b.H0 = diag_series_from(f.at("H0"));
    b.H1 = diag_series_from(f.at("H1"));
    b.linearizable = j.value("linearizable", false);
    return b;
}

// --- scattering, reports, RH -------------------------------------------------

inline json to_json(const std::vector<ScatteringRecord>& recs) {
    json a = json::array();
    for (const auto& r : recs) {
        json m = to_json(r.M);
        // masked columns are NaN, which JSON cannot carry
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t c = 0; c < 4; ++c)
                if (!std::isfinite(r.M(i, c).real())) m[i][c] = nullptr;
        a.push_back({{"k", to_json(r.k)}, {"S", m}, {"error_estimate", r.error_estimate}});
    }
    return a;
}

inline json to_json(const SymmetryReport& rep) {
    json o = json::object();
    for (const auto& [name, e] : rep.entries) {
        json v = {{"residual", e.residual}};
        v["tolerance"] = e.tolerance ? json(*e.tolerance) : json(nullptr);
        v["pass"] = e.pass();
        o[name] = v;
    }
    return o;
}

inline json summary(const rh::RHSolution& s) {
    return {{"nodes", s.nodes.size()},
            {"residual", s.residual},
            {"det_residual", s.det_residual},
            {"tail_departure", s.tail_departure},
            {"iterations", s.iterations},
            {"M1", to_json(s.M1)}};
}

inline json to_json(const reductions::Classification& c) {
    json fams = json::array();
    for (const auto& f : c.families) {
        json cases = json::array();
        for (const auto& cc : f.cases) {
            json basis = json::array();
            for (const auto& B : cc.basis) basis.push_back(to_json(B));
            cases.push_back({{"mu", to_json(cd(static_cast<double>(cc.mu.re), static_cast<double>(cc.mu.im)))},
                             {"block_shape", cc.block_shape},
                             {"parameter_domain", cc.parameter_domain},
                             {"basis", basis}});
        }
        fams.push_back({{"gamma", f.gamma}, {"block_shape", f.block_shape}, {"cases", cases}});
    }
    json probed = json::array();
    for (const auto& cc : c.all_cases)
        probed.push_back({{"gamma", to_json(cd(static_cast<double>(cc.gamma.re), static_cast<double>(cc.gamma.im)))},
                          {"mu", to_json(cd(static_cast<double>(cc.mu.re), static_cast<double>(cc.mu.im)))},
                          {"dimension", cc.basis.size()},
                          {"invertible", cc.invertible},
                          {"block_shape", cc.block_shape}});
    return {{"family_count", c.families.size()}, {"families", fams}, {"probed", probed}};
}

inline json to_json(const reductions::ReductionCandidate& c) {
    return {{"eps_B", c.eps_B},   {"gamma", c.gamma},         {"theta", c.theta},
            {"mu", c.mu},         {"p_plus", to_json(c.p_plus)}, {"p_minus", to_json(c.p_minus)},
            {"B_plus", to_json(c.B_plus)}, {"B_minus", to_json(c.B_minus)}};
}

// --- files -------------------------------------------------------------------

inline json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return json::parse(in);
}

inline void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

/// Plain CSV with a header row; doubles at round-trip precision.
class CsvWriter {
public:
    explicit CsvWriter(const std::vector<std::string>& header) {
        for (std::size_t i = 0; i < header.size(); ++i) ss_ << (i ? "," : "") << header[i];
        ss_ << '\n';
        ss_ << std::setprecision(17);
        cols_ = header.size();
    }
    void row(const std::vector<double>& v) {
        if (v.size() != cols_) throw std::invalid_argument("csv: column count mismatch");
        for (std::size_t i = 0; i < v.size(); ++i) ss_ << (i ? "," : "") << v[i];
        ss_ << '\n';
    }
    std::string str() const { return ss_.str(); }
    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << ss_.str();
    }

private:
    std::ostringstream ss_;
    std::size_t cols_ = 0;
};

}  // namespace ismut::io

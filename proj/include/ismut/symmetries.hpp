#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ismut/algebra.hpp"
#include "ismut/direct_scattering.hpp"
#include "ismut/reductions.hpp"

namespace ismut {

/// Named residuals with tolerances. A missing tolerance means report-only.
struct SymmetryReport {
    struct Entry {
        double residual = 0.0;
        std::optional<double> tolerance;
        bool pass() const { return !tolerance || residual < *tolerance; }
    };
    std::map<std::string, Entry> entries;

    void set(const std::string& name, double residual, std::optional<double> tol = std::nullopt) {
        entries[name] = {residual, tol};
    }
    double operator[](const std::string& name) const { return entries.at(name).residual; }
    bool pass() const {
        for (const auto& [_, e] : entries)
            if (!e.pass()) return false;
        return true;
    }
    void merge(const SymmetryReport& o, const std::string& prefix = "") {
        for (const auto& [n, e] : o.entries) entries[prefix + n] = e;
    }
};

/// Diagonal 2x2 helpers. Every scattering block is diagonal, so the
/// algebra below works entrywise on the two channels.
namespace dg {
inline CMat2 s_conj(const CMat2& m) { return consts::sigma() * m * consts::sigma(); }
inline CMat2 inv(const CMat2& m) { return inverse(m); }
}  // namespace dg

/// Per-k values of the RH jump ingredients. All entries diagonal.
struct JumpIngredients {
    cd k;
    CMat2 gamma, tgamma, Gamma, tGamma, d, td;
};

/// Definitions on a point where every block of S and T is available.
inline JumpIngredients jump_ingredients(const ScatteringRecord& S, const ScatteringRecord& T) {
    if (!(S.left_valid && S.right_valid && T.left_valid && T.right_valid))
        throw std::invalid_argument("jump_ingredients: needs full S and T (axis points)");
    const Block4 s = S.blocks4(), t = T.blocks4();
    JumpIngredients j;
    j.k = S.k;
    const CMat2 &ta = s.tl, &b = s.tr, &tb = s.bl, &a = s.br;
    const CMat2 &tA = t.tl, &B = t.tr, &tB = t.bl, &A = t.br;
    j.d = a * tA - b * tB;
    j.td = ta * A - tb * B;
    j.gamma = b * dg::inv(ta);
    j.tgamma = tb * dg::inv(a);
    j.Gamma = tB * dg::inv(a) * dg::inv(j.d);
    j.tGamma = B * dg::inv(ta) * dg::inv(j.td);
    return j;
}

inline std::vector<JumpIngredients> jump_ingredients(const ScatteringHalfLineS& S, const ScatteringHalfLineT& T) {
    if (S.size() != T.size()) throw std::invalid_argument("jump_ingredients: grids differ");
    std::vector<JumpIngredients> out;
    for (std::size_t i = 0; i < S.size(); ++i) {
        if (std::abs(S[i].k - T[i].k) > 1e-14) throw std::invalid_argument("jump_ingredients: grids differ");
        out.push_back(jump_ingredients(S[i], T[i]));
    }
    return out;
}

/**
 * Boundary-data-free Gamma for linearizable data (T = infinity), from S at k and -k:
 *   Gamma(k)  = -s tb(-k) s a^{-1}(k) [a(k) s ta(-k) s + b(k) s tb(-k) s]^{-1}
 * Needs (a, b) at k and (ta, tb) at -k, i.e. Im k >= 0.
 */
inline CMat2 linearizable_Gamma(const ScatteringRecord& Sk, const ScatteringRecord& Smk) {
    if (!Sk.right_valid || !Smk.left_valid) throw std::invalid_argument("linearizable_Gamma: needs Im k >= 0");
    const Block4 p = Sk.blocks4(), m = Smk.blocks4();
    const CMat2 den = p.br * dg::s_conj(m.tl) + p.tr * dg::s_conj(m.bl);
    return -1.0 * dg::s_conj(m.bl) * dg::inv(p.br) * dg::inv(den);
}

/// tGamma(k) = -s b(-k) s ta^{-1}(k) [ta(k) s a(-k) s + tb(k) s b(-k) s]^{-1}, Im k <= 0.
inline CMat2 linearizable_tGamma(const ScatteringRecord& Sk, const ScatteringRecord& Smk) {
    if (!Sk.left_valid || !Smk.right_valid) throw std::invalid_argument("linearizable_tGamma: needs Im k <= 0");
    const Block4 p = Sk.blocks4(), m = Smk.blocks4();
    const CMat2 den = p.tl * dg::s_conj(m.br) + p.bl * dg::s_conj(m.tr);
    return -1.0 * dg::s_conj(m.tr) * dg::inv(p.tl) * dg::inv(den);
}

/// Ingredients on the real axis with Gamma, tGamma from the linearizable elimination.
inline JumpIngredients linearizable_ingredients(const ScatteringRecord& Sk, const ScatteringRecord& Smk) {
    const Block4 s = Sk.blocks4();
    JumpIngredients j;
    j.k = Sk.k;
    j.gamma = s.tr * dg::inv(s.tl);
    j.tgamma = s.bl * dg::inv(s.br);
    j.Gamma = linearizable_Gamma(Sk, Smk);
    j.tGamma = linearizable_tGamma(Sk, Smk);
    j.d = CMat2::identity() * std::numeric_limits<double>::quiet_NaN();
    j.td = j.d;
    return j;
}

/// rho = b (ta)^{-1}, rho~ = tb a^{-1} of the line data.
struct LineReflection {
    cd k;
    CMat2 rho, trho;
};

inline LineReflection line_reflection(const ScatteringRecord& Sl) {
    const Block4 s = Sl.blocks4();
    return {Sl.k, s.tr * dg::inv(s.tl), s.bl * dg::inv(s.br)};
}

// ---------------------------------------------------------------------------

namespace detail {
inline const ScatteringRecord& find(const std::vector<ScatteringRecord>& v, cd k, const char* what) {
    for (const auto& r : v)
        if (std::abs(r.k - k) <= 1e-12 * std::max(1.0, std::abs(k))) return r;
    throw std::invalid_argument(std::string(what) + ": grid not closed under the required map");
}
}  // namespace detail

/**
 * Global relation on D1 (a B - b A) and D4 (ta tB - tb tA).
 * With boundary data on [0, T] the exact finite-T form carries the
 * x-scattering data at time T:  a B - b A + e^{4ik^2 T} b_T = 0 and
 * ta tB - tb tA + e^{-4ik^2 T} tb_T = 0. Both forms are reported;
 * `gr_corrected` is the one with the tail term.
 */
inline SymmetryReport check_global_relation(const ScatteringHalfLineS& S, const ScatteringHalfLineT& T,
                                            const ScatteringHalfLineS* S_final, double Tmax,
                                            std::optional<double> tol = std::nullopt) {
    SymmetryReport rep;
    double raw1 = 0, raw2 = 0, cor1 = 0, cor2 = 0, tail = 0;
    for (std::size_t i = 0; i < S.size(); ++i) {
        const cd k = S[i].k;
        const Block4 s = S[i].blocks4(), t = T[i].blocks4();
        const bool d1 = k.real() >= 0 && k.imag() >= 0 && S[i].right_valid && T[i].right_valid;
        const bool d4 = k.real() >= 0 && k.imag() <= 0 && S[i].left_valid && T[i].left_valid;
        if (d1) {
            const CMat2 g = s.br * t.tr - s.tr * t.br;
            raw1 = std::max(raw1, max_abs(g));
            if (S_final) {
                const CMat2 tl = std::exp(4.0 * I_unit * k * k * Tmax) * (*S_final)[i].blocks4().tr;
                tail = std::max(tail, max_abs(tl));
                cor1 = std::max(cor1, max_abs(g + tl));
            }
        }
        if (d4) {
            const CMat2 g = s.tl * t.bl - s.bl * t.tl;
            raw2 = std::max(raw2, max_abs(g));
            if (S_final) {
                const CMat2 tl = std::exp(-4.0 * I_unit * k * k * Tmax) * (*S_final)[i].blocks4().bl;
                tail = std::max(tail, max_abs(tl));
                cor2 = std::max(cor2, max_abs(g + tl));
            }
        }
    }
    rep.set("gr1_raw", raw1);
    rep.set("gr2_raw", raw2);
    if (S_final) {
        rep.set("gr1_corrected", cor1, tol);
        rep.set("gr2_corrected", cor2, tol);
        rep.set("time_tail", tail);
    }
    return rep;
}

/// I3 S(k) I3 = Sigma I3 S(-k) I3 Sigma S^line(k) on the real axis.
inline SymmetryReport check_relation_SSline(const ScatteringHalfLineS& S, const ScatteringLine& Sl,
                                            std::optional<double> tol = std::nullopt) {
    const CMat4 I3 = consts::I3(), Sg = consts::Sigma();
    double res = 0.0;
    for (const auto& line : Sl) {
        const auto& sp = detail::find(S, line.k, "relation_SSline");
        const auto& sm = detail::find(S, -line.k, "relation_SSline");
        const CMat4 lhs = I3 * sp.M * I3;
        const CMat4 rhs = Sg * I3 * sm.M * I3 * Sg * line.M;
        res = std::max(res, frobenius(lhs - rhs));
    }
    SymmetryReport rep;
    rep.set("relation_SSline", res, tol);
    return rep;
}

/// T(k) = Sigma3 Sigma T(-k) Sigma Sigma3 on fully valid samples.
inline SymmetryReport check_relation_T(const ScatteringHalfLineT& T, std::optional<double> tol = std::nullopt) {
    const CMat4 K = consts::Sigma3() * consts::Sigma();
    const CMat4 Ki = consts::Sigma() * consts::Sigma3();
    double res = 0.0;
    for (const auto& rec : T) {
        if (!(rec.left_valid && rec.right_valid)) continue;
        const auto& m = detail::find(T, -rec.k, "relation_T");
        res = std::max(res, frobenius(rec.M - K * m.M * Ki));
    }
    SymmetryReport rep;
    rep.set("relation_T", res, tol);
    return rep;
}

/// M^{-1}(k) = B M^dagger(k*) B^{-1} on fully valid samples.
inline double reduction_symmetry_residual(const std::vector<ScatteringRecord>& recs, const CMat4& B) {
    const CMat4 Bi = inverse(B);
    double res = 0.0;
    for (const auto& rec : recs) {
        if (!(rec.left_valid && rec.right_valid)) continue;
        const auto& c = detail::find(recs, std::conj(rec.k), "reduction symmetry");
        res = std::max(res, frobenius(inverse(rec.M) - B * dagger(c.M) * Bi));
    }
    return res;
}

inline SymmetryReport check_reduction_symmetry(const std::vector<ScatteringRecord>& recs,
                                               const reductions::ReductionCandidate& cand,
                                               std::optional<double> tol = std::nullopt,
                                               const std::string& name = "b_symmetry") {
    if (cand.eps_B != -1) throw std::invalid_argument("check_reduction_symmetry: the identity needs eps_B = -1");
    SymmetryReport rep;
    rep.set(name, reduction_symmetry_residual(recs, cand.B()), tol);
    return rep;
}

/**
 * gamma~ - Gamma = s3 rho~^line and gamma - Gamma~ = s3 rho^line on the real axis,
 * with Gamma, Gamma~ from the linearizable elimination.
 */
inline SymmetryReport check_initial_dependence(const ScatteringHalfLineS& S, const ScatteringLine& Sl,
                                               std::optional<double> tol = std::nullopt) {
    const CMat2 s3 = consts::sigma3();
    double r1 = 0, r2 = 0;
    for (const auto& line : Sl) {
        const auto& sp = detail::find(S, line.k, "initial dependence");
        const auto& sm = detail::find(S, -line.k, "initial dependence");
        const JumpIngredients j = linearizable_ingredients(sp, sm);
        const LineReflection lr = line_reflection(line);
        r1 = std::max(r1, max_abs(j.tgamma - j.Gamma - s3 * lr.trho));
        r2 = std::max(r2, max_abs(j.gamma - j.tGamma - s3 * lr.rho));
    }
    SymmetryReport rep;
    rep.set("tgamma_minus_Gamma", r1, tol);
    rep.set("gamma_minus_tGamma", r2, tol);
    return rep;
}

// ---------------------------------------------------------------------------

/// Scalar 2x2 scattering extracted from the redundant line data.
struct ScalarScattering {
    cd k;
    CMat2 S;
};

struct ProjectionResult {
    std::vector<ScalarScattering> scalar;
    SymmetryReport report;
};

/**
 * Structure of S^line under a reduction with coupling c (r = c q* or r(x) = c q*(-x)).
 * Channel 0 of S^line is the scalar problem; channel 1 carries the mirrored copy.
 *   gamma =  1:  ta(k) = a*(k*),  tb(k) = c b*(k*)
 *   gamma = -1:  a(k) = a*(-k*),  ta(k) = ta*(-k*),  tb(k) = c b*(-k*)
 * and in both cases channel 1 = (a(-k), -b(-k), -tb(-k), ta(-k)).
 * Real-axis samples only, closed under k -> -k.
 */
inline ProjectionResult project_scalar_scattering(const ScatteringLine& Sl, const reductions::ReductionCandidate& cand,
                                                  std::optional<double> tol = std::nullopt) {
    ProjectionResult out;
    const double c = cand.coupling_c();
    double structure = 0, mirror = 0, alpha = 0, alpha_bar = 0, literal = 0;
    for (const auto& rec : Sl) {
        const auto& neg = detail::find(Sl, -rec.k, "project_scalar_scattering");
        const Block4 p = rec.blocks4(), m = neg.blocks4();
        const cd ta = p.tl(0, 0), b = p.tr(0, 0), tb = p.bl(0, 0), a = p.br(0, 0);
        const cd ta_m = m.tl(0, 0), b_m = m.tr(0, 0), tb_m = m.bl(0, 0), a_m = m.br(0, 0);
        // mirrored channel
        mirror = std::max({mirror, std::abs(p.tl(1, 1) - a_m), std::abs(p.tr(1, 1) + b_m), std::abs(p.bl(1, 1) + tb_m),
                           std::abs(p.br(1, 1) - ta_m)});
        ScalarScattering ss;
        ss.k = rec.k;
        ss.S = CMat2{{ta, b}, {tb, a}};
        if (cand.gamma == 1) {
            structure = std::max({structure, std::abs(ta - std::conj(a)), std::abs(tb - c * std::conj(b))});
            // table as printed, with -(rho-/rho+) in place of c
            literal = std::max(literal, std::abs(tb + cand.ratio() * std::conj(b)));
        } else {
            structure = std::max(structure, std::abs(tb - c * std::conj(b_m)));
            alpha = std::max(alpha, std::abs(ta - std::conj(ta_m)));
            alpha_bar = std::max(alpha_bar, std::abs(a - std::conj(a_m)));
            // table as printed, with beta-/beta+ in place of c
            literal = std::max(literal, std::abs(tb - cand.ratio() * std::conj(b_m)));
        }
        out.scalar.push_back(ss);
    }
    out.report.set("structure", structure, tol);
    out.report.set("mirror_channel", mirror, tol);
    if (cand.gamma == -1) {
        out.report.set("alpha_symmetry", alpha, tol);
        out.report.set("alpha_bar_symmetry", alpha_bar, tol);
    }
    out.report.set("printed_table_offdiagonal", literal);
    return out;
}

}  // namespace ismut

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ismut/algebra.hpp"
#include "ismut/contour.hpp"
#include "ismut/direct_scattering.hpp"
#include "ismut/gmres.hpp"
#include "ismut/symmetries.hpp"

namespace ismut::rh {

class RHSolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline cd phase(double x, double t, cd k) { return k * x + 2.0 * k * k * t; }

// ---------------------------------------------------------------------------
// Contours

/// Piece labels. Orientation fixes the + side (left of travel).
enum Piece : int {
    RealPosInner = 0,  // 0 -> K0, + side D1
    RealPosOuter,      // K0 -> Kmax, + side upper half plane
    RealNegInner,      // 0 -> -K0, + side D3
    RealNegOuter,      // -K0 -> -Kmax, + side lower half plane
    ImagPos,           // iK0 -> 0, + side D1
    ImagNeg,           // -iK0 -> 0, + side D3
    ArcD1,             // K0 -> iK0 counterclockwise, + side inside
    ArcD4,             // K0 -> -iK0 clockwise, + side outside
    LineReal           // -Kmax -> Kmax, + side upper half plane
};

inline bool is_real_piece(int p) { return p == RealPosInner || p == RealPosOuter || p == RealNegInner || p == RealNegOuter || p == LineReal; }

struct ContourOptions {
    /// lens radius: inside it the half-line solution is used as is, outside the deformed one
    double K0 = 4.0;
    double Kmax = 30.0;
    /// panels of width h_real up to K_active, geometric growth beyond
    double K_active = 10.0;
    double h_real = 0.25;
    double h_imag = 0.5;
    double h_arc = 0.5;
    /// smallest graded panel at junctions; zero is never a node
    double h_min = 2e-3;
};

namespace detail {

/// Breakpoints of [0, Kmax] shared by the lens and the line contours.
inline std::vector<double> real_breakpoints(const ContourOptions& o) {
    if (!(o.K0 > 0.0 && o.K0 < o.K_active && o.K_active <= o.Kmax))
        throw std::invalid_argument("contour: need 0 < K0 < K_active <= Kmax");
    std::vector<double> out = graded_breakpoints(o.K0, o.h_real, o.h_min, true, true);
    const auto mid = graded_breakpoints(o.K_active - o.K0, o.h_real, o.h_min, true, false);
    for (std::size_t i = 1; i < mid.size(); ++i) out.push_back(o.K0 + mid[i]);
    if (o.Kmax > o.K_active) {
        const double h0 = o.h_real;
        // the jump is identity to roundoff out here; widths grow like the distance
        const auto tail = variable_breakpoints(o.Kmax - o.K_active, [h0](double s) { return std::max(2.0 * h0, 2.0 * s); });
        for (std::size_t i = 1; i < tail.size(); ++i) out.push_back(o.K_active + tail[i]);
    }
    return out;
}

}  // namespace detail

/// Real line -Kmax -> Kmax, panels symmetric under k -> -k.
inline Contour line_contour(const ContourOptions& o = {}) {
    const auto b = detail::real_breakpoints(o);
    Contour c;
    for (std::size_t i = b.size() - 1; i > 0; --i) c.add(Panel::segment(-b[i], -b[i - 1], LineReal));
    for (std::size_t i = 0; i + 1 < b.size(); ++i) c.add(Panel::segment(b[i], b[i + 1], LineReal));
    return c;
}

/**
 * R ∪ iR inside |k| < K0, the circle |k| = K0 in D1 and D4, and R outside.
 * Outside the circle the unknown is the deformed solution, whose only jump is on R.
 */
inline Contour lens_contour(const ContourOptions& o = {}) {
    const auto b = detail::real_breakpoints(o);
    Contour c;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        const bool inner = b[i + 1] <= o.K0 + 1e-14;
        c.add(Panel::segment(b[i], b[i + 1], inner ? RealPosInner : RealPosOuter));
        c.add(Panel::segment(-b[i], -b[i + 1], inner ? RealNegInner : RealNegOuter));
    }
    const auto s = graded_breakpoints(o.K0, o.h_imag, o.h_min, true, true);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        c.add(Panel::segment(cd(0.0, s[i + 1]), cd(0.0, s[i]), ImagPos));
        c.add(Panel::segment(cd(0.0, -s[i + 1]), cd(0.0, -s[i]), ImagNeg));
    }
    const auto a = graded_breakpoints(0.5 * M_PI * o.K0, o.h_arc, o.h_min, true, true);
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        c.add(Panel::make_arc(0.0, o.K0, a[i] / o.K0, a[i + 1] / o.K0, ArcD1));
        c.add(Panel::make_arc(0.0, o.K0, -a[i] / o.K0, -a[i + 1] / o.K0, ArcD4));
    }
    return c;
}

// ---------------------------------------------------------------------------
// Jumps

enum class JumpTag { Identity, J1, J2, J3, J4, J2inv, Line };

struct JumpField {
    std::vector<CMat4> J;
    std::vector<JumpTag> tag;
    std::size_t size() const { return J.size(); }
};

inline CMat4 jump_line(const LineReflection& lr, double x, double t) {
    const cd e = std::exp(2.0 * I_unit * phase(x, t, lr.k));
    Block4 b;
    b.tl = CMat2::identity();
    b.tr = -1.0 * lr.rho * (1.0 / e);
    b.bl = lr.trho * e;
    b.br = CMat2::identity() - lr.rho * lr.trho;
    return assemble(b);
}

inline JumpField build_J_line(const std::vector<LineReflection>& data, double x, double t) {
    JumpField f;
    for (const auto& lr : data) {
        f.J.push_back(jump_line(lr, x, t));
        f.tag.push_back(JumpTag::Line);
    }
    return f;
}

inline CMat4 jump_J1(const JumpIngredients& g, double x, double t) {
    const cd e = std::exp(2.0 * I_unit * phase(x, t, g.k));
    return assemble({CMat2::identity(), CMat2::zero(), g.Gamma * e, CMat2::identity()});
}

inline CMat4 jump_J3(const JumpIngredients& g, double x, double t) {
    const cd e = std::exp(-2.0 * I_unit * phase(x, t, g.k));
    return assemble({CMat2::identity(), -1.0 * g.tGamma * e, CMat2::zero(), CMat2::identity()});
}

inline CMat4 jump_J4(const JumpIngredients& g, double x, double t) {
    const cd e = std::exp(2.0 * I_unit * phase(x, t, g.k));
    return assemble({CMat2::identity(), -1.0 * g.gamma * (1.0 / e), g.tgamma * e,
                     CMat2::identity() - g.gamma * g.tgamma});
}

inline CMat4 jump_J2(const JumpIngredients& g, double x, double t) {
    return jump_J3(g, x, t) * inverse(jump_J4(g, x, t)) * jump_J1(g, x, t);
}

/// Closed form of J2^{-1} in terms of gamma - tGamma and tgamma - Gamma.
inline CMat4 jump_J2inv(const JumpIngredients& g, double x, double t) {
    const cd e = std::exp(2.0 * I_unit * phase(x, t, g.k));
    const CMat2 u = g.gamma - g.tGamma, l = g.tgamma - g.Gamma;
    return assemble({CMat2::identity(), -1.0 * u * (1.0 / e), l * e, CMat2::identity() - l * u});
}

inline JumpTag lens_tag(int piece) {
    switch (piece) {
        case RealPosInner: return JumpTag::J4;
        case RealPosOuter: return JumpTag::J2inv;
        case RealNegInner:
        case RealNegOuter: return JumpTag::J2;
        case ImagPos:
        case ArcD1: return JumpTag::J1;
        case ImagNeg:
        case ArcD4: return JumpTag::J3;
        default: return JumpTag::Identity;
    }
}

inline CMat4 jump_by_tag(JumpTag tag, const JumpIngredients& g, double x, double t) {
    switch (tag) {
        case JumpTag::J1: return jump_J1(g, x, t);
        case JumpTag::J2: return jump_J2(g, x, t);
        case JumpTag::J3: return jump_J3(g, x, t);
        case JumpTag::J4: return jump_J4(g, x, t);
        case JumpTag::J2inv: return jump_J2inv(g, x, t);
        default: return CMat4::identity();
    }
}

/// Jumps on the lens contour; ingredients indexed like the contour nodes.
inline JumpField build_J_quadrants(const Contour& c, const std::vector<JumpIngredients>& ing, double x, double t) {
    if (ing.size() != c.size()) throw std::invalid_argument("build_J_quadrants: ingredient count mismatch");
    JumpField f;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const JumpTag tag = lens_tag(c.piece(i));
        CMat4 J = jump_by_tag(tag, ing[i], x, t);
        if (!all_finite(J)) throw RHSolveError("build_J_quadrants: non-finite jump at node " + std::to_string(i));
        f.J.push_back(J);
        f.tag.push_back(tag);
    }
    return f;
}

/// max |J2 (J1^{-1} J4 J3^{-1}) - 1| and max |J2^{-1} explicit - J1^{-1} J4 J3^{-1}| over real-axis ingredients.
struct J2Check {
    double composed = 0.0;
    double explicit_form = 0.0;
};

inline J2Check check_J2(const std::vector<JumpIngredients>& ing, double x, double t) {
    J2Check r;
    for (const auto& g : ing) {
        if (g.k.imag() != 0.0) continue;
        const CMat4 alt = inverse(jump_J1(g, x, t)) * jump_J4(g, x, t) * inverse(jump_J3(g, x, t));
        r.composed = std::max(r.composed, max_abs(jump_J2(g, x, t) * alt - CMat4::identity()));
        r.explicit_form = std::max(r.explicit_form, max_abs(jump_J2inv(g, x, t) - alt));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Spectral data on contour nodes

/// rho, trho of the line problem at every (real) node.
inline std::vector<LineReflection> line_data(const RedundantLinePotential& rp, const Contour& c,
                                             const IntegrationOptions& opt = {}) {
    std::vector<LineReflection> out;
    for (const cd k : c.nodes()) {
        if (k.imag() != 0.0) throw std::invalid_argument("line_data: line contour must be real");
        out.push_back(line_reflection(compute_S_line(rp, k.real(), opt)));
    }
    return out;
}

/**
 * Jump ingredients of the linearizable problem at the lens nodes. Gamma and
 * tGamma come from the elimination through S(-k); unused entries are NaN.
 */
inline std::vector<JumpIngredients> lens_data(const HalfLinePotential& hp, const Contour& c,
                                              const IntegrationOptions& opt = {}) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<JumpIngredients> out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const cd k = c.node(i);
        const int p = c.piece(i);
        const ScatteringRecord Sk = integrate_x(hp, k, opt), Smk = integrate_x(hp, -k, opt);
        JumpIngredients g;
        if (is_real_piece(p)) {
            g = linearizable_ingredients(Sk, Smk);
        } else {
            g.k = k;
            g.gamma = g.tgamma = g.Gamma = g.tGamma = g.d = g.td = CMat2::identity() * nan;
            if (p == ImagPos || p == ArcD1)
                g.Gamma = linearizable_Gamma(Sk, Smk);
            else
                g.tGamma = linearizable_tGamma(Sk, Smk);
        }
        g.k = k;
        out.push_back(g);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Solve

/// Auto: dense LU up to kDirectLimit nodes, GMRES on the same dense system above.
enum class SolverKind { Auto, Direct, Gmres, Neumann };
inline constexpr std::size_t kDirectLimit = 400;

struct SolveOptions {
    SolverKind kind = SolverKind::Auto;
    /// accepted max-node residual of the discrete equation
    double tolerance = 1e-8;
    double iterative_tol = 1e-13;
    std::size_t max_iterations = 2000;
};

/**
 * M = 1 - (1/2 pi i) ∫ f(s) ds / (s - k) with f = M_+ (J - 1), so that
 * M_- = M_+ J. Boundary values stored are M_+ (left side of each panel).
 */
struct RHSolution {
    std::vector<cd> nodes;
    std::vector<cd> weights;
    std::vector<CMat4> Mplus, Mminus, f;
    CMat4 M1;
    /// max-node |M_+ J - M_-| with M_- computed independently from the Cauchy transform
    double residual = 0.0;
    double det_residual = 0.0;
    /// max |M_+ - 1| over the outermost tail panel
    double tail_departure = 0.0;
    std::size_t iterations = 0;

    /// M at a point off the contour (the contour the solution was computed on).
    CMat4 evaluate(const Contour& c, cd z) const { return CMat4::identity() - c.cauchy(f, z, CMat4{}); }
};

namespace detail {

inline Eigen::VectorXcd apply_channel(const Eigen::MatrixXcd& C, const std::vector<CMat2>& dJ, const Eigen::VectorXcd& u) {
    const auto n = static_cast<Eigen::Index>(dJ.size());
    Eigen::MatrixXcd V(n, 2);
    for (Eigen::Index m = 0; m < n; ++m) {
        const CMat2& d = dJ[static_cast<std::size_t>(m)];
        V(m, 0) = u(2 * m) * d(0, 0) + u(2 * m + 1) * d(1, 0);
        V(m, 1) = u(2 * m) * d(0, 1) + u(2 * m + 1) * d(1, 1);
    }
    const Eigen::MatrixXcd CV = C * V;
    Eigen::VectorXcd out = u;
    for (Eigen::Index j = 0; j < n; ++j) {
        out(2 * j) += CV(j, 0);
        out(2 * j + 1) += CV(j, 1);
    }
    return out;
}

}  // namespace detail

inline RHSolution solve_rh(const Contour& c, const Eigen::MatrixXcd& C, const JumpField& jump,
                           const SolveOptions& opt = {}) {
    const std::size_t n = c.size();
    if (jump.size() != n || static_cast<std::size_t>(C.rows()) != n)
        throw std::invalid_argument("solve_rh: sizes of contour, operator and jump differ");
    RHSolution sol;
    sol.nodes = c.nodes();
    sol.weights = c.weights();
    sol.Mplus.assign(n, CMat4::identity());
    const auto N = static_cast<Eigen::Index>(n);

    for (std::size_t ch = 0; ch < 2; ++ch) {
        std::vector<CMat2> dJ(n);
        bool trivial = true;
        for (std::size_t m = 0; m < n; ++m) {
            dJ[m] = channel(jump.J[m], ch) - CMat2::identity();
            if (max_abs(dJ[m]) != 0.0) trivial = false;
        }
        if (trivial) continue;
        Eigen::MatrixXcd U(2 * N, 2);
        Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(2 * N, 2);
        for (Eigen::Index j = 0; j < N; ++j) {
            B(2 * j, 0) = 1.0;
            B(2 * j + 1, 1) = 1.0;
        }
        const SolverKind kind =
            opt.kind == SolverKind::Auto ? (n <= kDirectLimit ? SolverKind::Direct : SolverKind::Gmres) : opt.kind;
        if (kind == SolverKind::Direct) {
            Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(2 * N, 2 * N);
            for (Eigen::Index m = 0; m < N; ++m) {
                const CMat2& d = dJ[static_cast<std::size_t>(m)];
                for (Eigen::Index j = 0; j < N; ++j) {
                    const cd cjm = C(j, m);
                    if (cjm == cd{}) continue;
                    for (Eigen::Index be = 0; be < 2; ++be)
                        for (Eigen::Index al = 0; al < 2; ++al)
                            A(2 * j + be, 2 * m + al) += cjm * d(static_cast<std::size_t>(al), static_cast<std::size_t>(be));
                }
            }
            Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
            U = lu.solve(B);
        } else {
            const auto op = [&](const Eigen::VectorXcd& u) { return detail::apply_channel(C, dJ, u); };
            for (Eigen::Index rhs = 0; rhs < 2; ++rhs) {
                if (kind == SolverKind::Gmres) {
                    const auto r = gmres(op, B.col(rhs), opt.iterative_tol, 80, opt.max_iterations);
                    U.col(rhs) = r.x;
                    sol.iterations += r.iterations;
                } else {
                    // Neumann series u = b - K u, only convergent for small data
                    Eigen::VectorXcd u = B.col(rhs);
                    std::size_t it = 0;
                    for (; it < opt.max_iterations; ++it) {
                        const Eigen::VectorXcd next = B.col(rhs) - (op(u) - u);
                        const double d = (next - u).norm() / std::sqrt(static_cast<double>(2 * N));
                        u = next;
                        if (!std::isfinite(d)) break;
                        if (d < opt.iterative_tol) break;
                    }
                    U.col(rhs) = u;
                    sol.iterations += it;
                }
            }
        }
        for (std::size_t m = 0; m < n; ++m) {
            const auto mi = static_cast<Eigen::Index>(m);
            CMat2 mp{{U(2 * mi, 0), U(2 * mi + 1, 0)}, {U(2 * mi, 1), U(2 * mi + 1, 1)}};
            set_channel(sol.Mplus[m], ch, mp);
        }
    }

    sol.f.resize(n);
    sol.Mminus.resize(n);
    for (std::size_t m = 0; m < n; ++m) sol.f[m] = sol.Mplus[m] * (jump.J[m] - CMat4::identity());
    // M_- = 1 - C_- f = 1 - C_+ f + f, computed without reference to the solve
    Eigen::MatrixXcd F(N, 16);
    for (Eigen::Index m = 0; m < N; ++m)
        for (Eigen::Index e = 0; e < 16; ++e) F(m, e) = sol.f[static_cast<std::size_t>(m)].a[static_cast<std::size_t>(e)];
    const Eigen::MatrixXcd CF = C * F;
    const cd c2pi = 1.0 / (2.0 * M_PI * I_unit);
    double tail_r = 0.0;
    for (const cd z : sol.nodes) tail_r = std::max(tail_r, std::abs(z));
    for (std::size_t m = 0; m < n; ++m) {
        CMat4 Mm = CMat4::identity() + sol.f[m];
        for (std::size_t e = 0; e < 16; ++e) Mm.a[e] -= CF(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(e));
        sol.Mminus[m] = Mm;
        sol.residual = std::max(sol.residual, max_abs(sol.Mplus[m] * jump.J[m] - Mm));
        sol.det_residual = std::max(sol.det_residual, std::abs(det(sol.Mplus[m]) - 1.0));
        sol.M1 += sol.f[m] * (sol.weights[m] * c2pi);
        if (std::abs(sol.nodes[m]) > 0.9 * tail_r)
            sol.tail_departure = std::max(sol.tail_departure, max_abs(sol.Mplus[m] - CMat4::identity()));
    }
    if (!(sol.residual <= opt.tolerance))
        throw RHSolveError("solve_rh: residual " + std::to_string(sol.residual) + " above tolerance");
    return sol;
}

/// W = i [Sigma3, M1] = [[0, Q], [R, 0]].
inline CMat4 reconstruct_potential(const RHSolution& sol) {
    return I_unit * commutator(consts::Sigma3(), sol.M1);
}

inline Diag2 Q_of(const CMat4& W) { return {W(0, 2), W(1, 3)}; }
inline Diag2 R_of(const CMat4& W) { return {W(2, 0), W(3, 1)}; }

// ---------------------------------------------------------------------------
// Deformation and equivalence

/**
 * Deformed half-line solution at the lens nodes: M J1 on the D1 side, M
 * elsewhere (outside the circle the solved unknown already is the deformed one).
 * `continuity` is the iR mismatch between the two sides after deformation.
 */
struct DeformedSolution {
    std::vector<CMat4> values;
    double continuity = 0.0;
};

inline DeformedSolution deform_Mred(const Contour& c, const RHSolution& sol, const std::vector<JumpIngredients>& ing,
                                    double x, double t) {
    DeformedSolution d;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const int p = c.piece(i);
        if (p == RealPosInner || p == ImagPos || p == ArcD1) {
            d.values.push_back(sol.Mplus[i] * jump_J1(ing[i], x, t));
            if (p == ImagPos) d.continuity = std::max(d.continuity, max_abs(d.values.back() - sol.Mminus[i]));
        } else {
            d.values.push_back(sol.Mplus[i]);
            if (p == ImagNeg)
                d.continuity = std::max(d.continuity, max_abs(sol.Mplus[i] - sol.Mminus[i] * inverse(jump_J3(ing[i], x, t))));
        }
    }
    return d;
}

struct EquivalenceResult {
    double node_residual = 0.0;
    double real_residual = 0.0;
    double offaxis_residual = 0.0;
    std::size_t compared = 0;
};

/**
 * sup |M~red - I3 M^line I3| over matching real nodes, and over lens nodes at
 * distance >= r_eval from R where M^line is evaluated off its contour.
 */
inline EquivalenceResult check_equivalence(const Contour& lens, const DeformedSolution& Mt, const Contour& line,
                                           const RHSolution& Ml, double r_eval = 0.5) {
    EquivalenceResult r;
    const CMat4 I3 = consts::I3();
    for (std::size_t i = 0; i < lens.size(); ++i) {
        const cd k = lens.node(i);
        const int p = lens.piece(i);
        double res;
        if (is_real_piece(p)) {
            const std::size_t j = line.find(k, 1e-12 * std::max(1.0, std::abs(k)));
            if (j == line.size()) throw std::invalid_argument("check_equivalence: real nodes do not match");
            const bool lower = (p == RealNegInner || p == RealNegOuter);
            const CMat4& ml = lower ? Ml.Mminus[j] : Ml.Mplus[j];
            res = max_abs(Mt.values[i] - I3 * ml * I3);
            r.real_residual = std::max(r.real_residual, res);
        } else {
            if (std::abs(k.imag()) < r_eval) continue;
            res = max_abs(Mt.values[i] - I3 * Ml.evaluate(line, k) * I3);
            r.offaxis_residual = std::max(r.offaxis_residual, res);
        }
        r.node_residual = std::max(r.node_residual, res);
        ++r.compared;
    }
    return r;
}

/// |Q^line - sigma3 Q^red| at one (x, t).
inline double potential_link_residual(const RHSolution& red, const RHSolution& line) {
    const Diag2 qr = Q_of(reconstruct_potential(red)), ql = Q_of(reconstruct_potential(line));
    const Diag2 rr = R_of(reconstruct_potential(red)), rl = R_of(reconstruct_potential(line));
    return std::max({std::abs(ql[0] - qr[0]), std::abs(ql[1] + qr[1]), std::abs(rl[0] - rr[0]), std::abs(rl[1] + rr[1])});
}

}  // namespace ismut::rh

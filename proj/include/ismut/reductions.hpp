#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "ismut/akns.hpp"
#include "ismut/algebra.hpp"

namespace ismut::reductions {

// ---------------------------------------------------------------------------
// Exact arithmetic used by the classifier.

struct Rational {
    std::int64_t n = 0, d = 1;

    Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1) : n(num), d(den) { normalize(); }

    void normalize() {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        if (n == 0) d = 1;
    }
    bool is_zero() const { return n == 0; }
    double value() const { return static_cast<double>(n) / static_cast<double>(d); }

    friend Rational operator+(Rational a, Rational b) { return {a.n * b.d + b.n * a.d, a.d * b.d}; }
    friend Rational operator-(Rational a, Rational b) { return {a.n * b.d - b.n * a.d, a.d * b.d}; }
    friend Rational operator*(Rational a, Rational b) { return {a.n * b.n, a.d * b.d}; }
    friend Rational operator/(Rational a, Rational b) {
        if (b.n == 0) throw std::domain_error("Rational: division by zero");
        return {a.n * b.d, a.d * b.n};
    }
    friend bool operator==(Rational a, Rational b) { return a.n == b.n && a.d == b.d; }
};

/// Gaussian integer a + i b.
struct GaussInt {
    std::int64_t re = 0, im = 0;
    friend GaussInt operator*(GaussInt x, GaussInt y) {
        return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
    }
    friend bool operator==(GaussInt x, GaussInt y) { return x.re == y.re && x.im == y.im; }
    cd value() const { return {static_cast<double>(re), static_cast<double>(im)}; }
};

using RMatrix = std::vector<std::vector<Rational>>;

/// Basis of the null space of A (rows of equal length) by exact RREF.
inline std::vector<std::vector<Rational>> null_space(RMatrix A, std::size_t ncols) {
    std::vector<int> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < ncols && row < A.size(); ++col) {
        std::size_t piv = row;
        while (piv < A.size() && A[piv][col].is_zero()) ++piv;
        if (piv == A.size()) continue;
        std::swap(A[piv], A[row]);
        const Rational inv = Rational(1) / A[row][col];
        for (auto& v : A[row]) v = v * inv;
        for (std::size_t r = 0; r < A.size(); ++r) {
            if (r == row || A[r][col].is_zero()) continue;
            const Rational f = A[r][col];
            for (std::size_t c = 0; c < ncols; ++c) A[r][c] = A[r][c] - f * A[row][c];
        }
        pivot_col.push_back(static_cast<int>(col));
        ++row;
    }
    std::vector<bool> is_pivot(ncols, false);
    for (int c : pivot_col) is_pivot[static_cast<std::size_t>(c)] = true;
    std::vector<std::vector<Rational>> basis;
    for (std::size_t free = 0; free < ncols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rational> v(ncols, Rational(0));
        v[free] = Rational(1);
        for (std::size_t r = 0; r < pivot_col.size(); ++r) v[static_cast<std::size_t>(pivot_col[r])] = Rational(0) - A[r][free];
        basis.push_back(v);
    }
    return basis;
}

// ---------------------------------------------------------------------------
// Candidates.

struct ReductionCandidate {
    int eps_B = -1;
    int gamma = 1;
    double theta = 0.0;
    int mu = 1;
    /// rho^+- (gamma = 1) or beta^+- (gamma = -1), each carrying its phase
    cd p_plus = 1.0, p_minus = 1.0;
    CMat2 B_plus, B_minus;

    CMat4 B() const { return block_diag(B_plus, B_minus); }
    /// p^- / p^+, real for every valid candidate
    double ratio() const { return (p_minus / p_plus).real(); }
    /// r = c q* (gamma = 1) or r(x) = c q*(-x) (gamma = -1)
    double coupling_c() const { return static_cast<double>(eps_B) * ratio(); }
    /// sigma_s(k) = -k* / eps_B
    cd sigma_s(cd k) const { return -std::conj(k) / static_cast<double>(eps_B); }
};

/**
 * gamma = 1:  B_pm = e^{-i theta/2} rho_pm diag(1, mu), rho real nonzero.
 * gamma = -1: B_pm = e^{-i theta/2} x_pm [[0, 1], [mu, 0]], x real (mu = 1) or imaginary (mu = -1).
 * `p_plus`, `p_minus` are the real magnitudes; phases are applied here.
 */
inline ReductionCandidate make_candidate(int eps_B, int gamma, double theta, int mu, double p_plus, double p_minus) {
    if (eps_B != 1 && eps_B != -1) throw std::invalid_argument("candidate: eps_B must be +-1");
    if (gamma != 1 && gamma != -1) throw std::invalid_argument("candidate: gamma must be +-1");
    if (mu != 1 && mu != -1) throw std::invalid_argument("candidate: mu must be +-1");
    if (p_plus == 0.0 || p_minus == 0.0) throw std::invalid_argument("candidate: parameters must be nonzero");
    ReductionCandidate c;
    c.eps_B = eps_B;
    c.gamma = gamma;
    c.theta = theta;
    c.mu = mu;
    const cd ph = std::polar(1.0, -0.5 * theta);
    if (gamma == 1) {
        c.p_plus = ph * p_plus;
        c.p_minus = ph * p_minus;
        c.B_plus = c.p_plus * diag2(1.0, static_cast<double>(mu));
        c.B_minus = c.p_minus * diag2(1.0, static_cast<double>(mu));
    } else {
        const cd unit = (mu == 1) ? cd(1.0) : I_unit;
        c.p_plus = ph * unit * p_plus;
        c.p_minus = ph * unit * p_minus;
        const CMat2 s{{0.0, 1.0}, {static_cast<double>(mu), 0.0}};
        c.B_plus = c.p_plus * s;
        c.B_minus = c.p_minus * s;
    }
    return c;
}

struct ConstraintResiduals {
    double block_diagonal = 0.0;  // [B, Sigma3]
    double involution = 0.0;      // B^dagger B^{-1} - e^{i theta}
    double tau = 0.0;             // B (1 x s3) - gamma (1 x s3) B
    double u = 0.0;               // B Sigma - mu Sigma B

    double max() const { return std::max({block_diagonal, involution, tau, u}); }
};

inline ConstraintResiduals verify_constraints(const CMat4& B, int gamma, int mu, double theta) {
    ConstraintResiduals r;
    const CMat4 S3 = consts::Sigma3(), T = consts::one_x_sigma3(), Sg = consts::Sigma();
    r.block_diagonal = max_abs(commutator(B, S3));
    try {
        r.involution = max_abs(dagger(B) * inverse(B) - std::polar(1.0, theta) * CMat4::identity());
    } catch (const SingularMatrixError&) {
        r.involution = std::numeric_limits<double>::infinity();
    }
    r.tau = max_abs(B * T - static_cast<double>(gamma) * (T * B));
    r.u = max_abs(B * Sg - static_cast<double>(mu) * (Sg * B));
    return r;
}

inline ConstraintResiduals verify_constraints(const ReductionCandidate& c) {
    return verify_constraints(c.B(), c.gamma, c.mu, c.theta);
}

// ---------------------------------------------------------------------------
// Classification.

/// Solutions for one (gamma, mu) pair of the Hermitian part H, B = e^{-i theta/2} H.
struct ClassCase {
    GaussInt gamma, mu;
    std::vector<CMat4> basis;  // real-span basis of admissible H
    bool invertible = false;   // generic element invertible
    std::string block_shape;   // "diagonal", "antidiagonal", "mixed" or "none"
    std::string parameter_domain;
};

struct Family {
    int gamma = 1;
    std::string block_shape;
    std::vector<ClassCase> cases;  // one per admissible mu
};

struct Classification {
    std::vector<Family> families;
    std::vector<ClassCase> all_cases;  // every (gamma, mu) probed, including rejected ones
};

namespace detail {

// index of the real (part = 0) or imaginary (part = 1) component of H_ij
inline std::size_t var(std::size_t i, std::size_t j, std::size_t part) { return 2 * (4 * i + j) + part; }

/// Append rows for sum_{ij} C_ij H_ij = 0 over every output entry, where the
/// complex-linear map is H -> L H - g H R with integer L, R and Gaussian g.
inline void add_commutation_rows(RMatrix& A, const std::array<std::array<int, 4>, 4>& Lm,
                                 const std::array<std::array<int, 4>, 4>& Rm, GaussInt g) {
    // (H R)_ab - g (L H)_ab ... written as (H R - g L H)
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) {
            // coefficient of H_ij as Gaussian integer
            std::vector<GaussInt> coef(16, GaussInt{0, 0});
            for (std::size_t j = 0; j < 4; ++j) coef[4 * a + j].re += Rm[j][b];
            for (std::size_t i = 0; i < 4; ++i) {
                const GaussInt t = g * GaussInt{Lm[a][i], 0};
                coef[4 * i + b].re -= t.re;
                coef[4 * i + b].im -= t.im;
            }
            std::vector<Rational> re_row(32, Rational(0)), im_row(32, Rational(0));
            for (std::size_t e = 0; e < 16; ++e) {
                const auto [cr, ci] = coef[e];
                // (cr + i ci)(x + i y) = (cr x - ci y) + i (ci x + cr y)
                re_row[2 * e] = Rational(cr);
                re_row[2 * e + 1] = Rational(-ci);
                im_row[2 * e] = Rational(ci);
                im_row[2 * e + 1] = Rational(cr);
            }
            A.push_back(re_row);
            A.push_back(im_row);
        }
}

using IMat4 = std::array<std::array<int, 4>, 4>;

inline IMat4 imat_diag(int a, int b, int c, int d) {
    IMat4 m{};
    m[0][0] = a;
    m[1][1] = b;
    m[2][2] = c;
    m[3][3] = d;
    return m;
}

inline IMat4 imat_Sigma() {
    IMat4 m{};
    m[0][1] = m[1][0] = m[2][3] = m[3][2] = 1;
    return m;
}

inline std::string shape_of(const std::vector<CMat4>& basis) {
    if (basis.empty()) return "none";
    bool diag = true, anti = true;
    for (const auto& b : basis)
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                if (b(i, j) == cd{}) continue;
                if ((i < 2) != (j < 2)) diag = anti = false;  // off-diagonal block entry
                if (i != j) diag = false;
                if ((i % 2) == (j % 2)) anti = false;
            }
    if (diag) return "diagonal";
    if (anti) return "antidiagonal";
    return "mixed";
}

}  // namespace detail

/// Solve the four constraints exactly for one (gamma, mu) pair.
inline ClassCase solve_case(GaussInt gamma, GaussInt mu) {
    using namespace detail;
    RMatrix A;
    const IMat4 I4 = imat_diag(1, 1, 1, 1);
    // [H, Sigma3] = 0 : H S3 - S3 H
    add_commutation_rows(A, imat_diag(1, 1, -1, -1), imat_diag(1, 1, -1, -1), GaussInt{1, 0});
    // H (1 x s3) = gamma (1 x s3) H
    add_commutation_rows(A, imat_diag(1, -1, 1, -1), imat_diag(1, -1, 1, -1), gamma);
    // H Sigma = mu Sigma H
    add_commutation_rows(A, imat_Sigma(), imat_Sigma(), mu);
    (void)I4;
    // Hermiticity: Re H_ij = Re H_ji, Im H_ij = -Im H_ji
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i; j < 4; ++j) {
            std::vector<Rational> r1(32, Rational(0)), r2(32, Rational(0));
            r1[var(i, j, 0)] = r1[var(i, j, 0)] + Rational(1);
            r1[var(j, i, 0)] = r1[var(j, i, 0)] - Rational(1);
            r2[var(i, j, 1)] = r2[var(i, j, 1)] + Rational(1);
            r2[var(j, i, 1)] = r2[var(j, i, 1)] + Rational(1);
            A.push_back(r1);
            A.push_back(r2);
        }
    ClassCase cc;
    cc.gamma = gamma;
    cc.mu = mu;
    for (const auto& v : null_space(A, 32)) {
        CMat4 H;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) H(i, j) = cd(v[var(i, j, 0)].value(), v[var(i, j, 1)].value());
        cc.basis.push_back(H);
    }
    cc.block_shape = detail::shape_of(cc.basis);
    if (!cc.basis.empty()) {
        CMat4 generic;
        double w = 1.0;
        for (const auto& b : cc.basis) {
            generic += w * b;
            w += 0.73;
        }
        cc.invertible = std::abs(det(generic)) > 1e-12;
        bool real = true, imag = true;
        for (const auto& b : cc.basis)
            for (std::size_t i = 0; i < 4; ++i)
                for (std::size_t j = 0; j < 4; ++j) {
                    if ((i < 2) != (j < 2)) continue;
                    if (i == j && b(i, j) != cd{}) imag = false;
                    if (b(i, j).imag() != 0.0) real = false;
                    if (b(i, j).real() != 0.0) imag = false;
                }
        cc.parameter_domain = real ? "real" : (imag ? "imaginary" : "complex");
    }
    return cc;
}

/**
 * Enumerate the admissible B. gamma and mu are probed over the fourth roots
 * of unity; squaring the commutation constraints forces gamma^2 = mu^2 = 1,
 * and the probe confirms that i and -i admit no invertible solution.
 */
inline Classification classify_B() {
    Classification out;
    const std::vector<GaussInt> roots = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& g : roots)
        for (const auto& m : roots) out.all_cases.push_back(solve_case(g, m));
    for (int gamma : {1, -1}) {
        Family fam;
        fam.gamma = gamma;
        for (const auto& cc : out.all_cases) {
            if (!(cc.gamma == GaussInt{gamma, 0}) || cc.mu.im != 0) continue;
            if (!cc.invertible) continue;
            fam.cases.push_back(cc);
        }
        if (fam.cases.empty()) continue;
        fam.block_shape = fam.cases.front().block_shape;
        for (const auto& cc : fam.cases)
            if (cc.block_shape != fam.block_shape) fam.block_shape = "mixed";
        out.families.push_back(fam);
    }
    return out;
}

// ---------------------------------------------------------------------------

/// R = eps_B B_- Q^dagger B_+^{-1} for diagonal Q samples.
inline std::vector<Diag2> apply_reduction(const std::vector<Diag2>& Q, const ReductionCandidate& c) {
    const CMat2 Bpi = inverse(c.B_plus);
    std::vector<Diag2> R(Q.size());
    for (std::size_t i = 0; i < Q.size(); ++i) {
        const CMat2 q = diag2(Q[i][0], Q[i][1]);
        const CMat2 r = static_cast<double>(c.eps_B) * (c.B_minus * dagger(q) * Bpi);
        if (offdiag_magnitude(r) > 1e-12 * std::max(1.0, max_abs(r)))
            throw std::runtime_error("apply_reduction: reduced R is not diagonal");
        R[i] = {r(0, 0), r(1, 1)};
    }
    return R;
}

/// Reduced half-line potential: R from Q by the candidate.
inline HalfLinePotential apply_reduction(const HalfLinePotential& p, const ReductionCandidate& c) {
    std::vector<Diag2> Q(p.q1.size());
    for (std::size_t i = 0; i < Q.size(); ++i) Q[i] = {p.q1[i], p.q2[i]};
    const auto R = apply_reduction(Q, c);
    HalfLinePotential out = p;
    for (std::size_t i = 0; i < Q.size(); ++i) {
        out.r1[i] = R[i][0];
        out.r2[i] = R[i][1];
    }
    return out;
}

enum class EquationKind { NLS, NonlocalNLS };

struct EquationDescriptor {
    EquationKind kind = EquationKind::NLS;
    double coupling = 0.0;  // 2 eps_B p^-/p^+; positive is defocusing
    std::string name() const { return kind == EquationKind::NLS ? "NLS" : "nonlocal-NLS"; }
};

inline EquationDescriptor induced_equation(const ReductionCandidate& c) {
    const cd ratio = c.p_minus / c.p_plus;
    if (std::abs(ratio.imag()) > 1e-12 * std::abs(ratio)) throw std::runtime_error("induced_equation: complex coupling");
    return {c.gamma == 1 ? EquationKind::NLS : EquationKind::NonlocalNLS, 2.0 * c.coupling_c()};
}

/// (s U)(k) = eps_B B U^dagger(sigma_s(k)) B^{-1}
template <class UFn>
CMat4 apply_s(const ReductionCandidate& c, UFn&& U, cd k) {
    const CMat4 B = c.B();
    return static_cast<double>(c.eps_B) * (B * dagger(U(c.sigma_s(k))) * inverse(B));
}

/// U(k) = -ik Sigma3 + W.
inline CMat4 lax_U(const CMat4& W, cd k) { return -I_unit * k * consts::Sigma3() + W; }

// ---------------------------------------------------------------------------

struct LinearizableK {
    CMat2 K1, K4;
    CMat4 K() const { return block_diag(K1, K4); }
    static LinearizableK symmetric() { return {consts::sigma(), -consts::sigma()}; }
};

struct LinearizableResiduals {
    double G0 = 0.0, H0 = 0.0, G1 = 0.0, H1 = 0.0;
    double max() const { return std::max({G0, H0, G1, H1}); }
};

/// Sup over t of G0 K4 + K1 G0, H0 K1 + K4 H0, G1 K4 - K1 G1, H1 K1 - K4 H1.
inline LinearizableResiduals check_linearizable(const LinearizableK& K, const BoundaryData& bd) {
    LinearizableResiduals r;
    for (std::size_t i = 0; i < bd.samples(); ++i) {
        const CMat2 G0 = diag2(bd.G0[i][0], bd.G0[i][1]), G1 = diag2(bd.G1[i][0], bd.G1[i][1]);
        const CMat2 H0 = diag2(bd.H0[i][0], bd.H0[i][1]), H1 = diag2(bd.H1[i][0], bd.H1[i][1]);
        r.G0 = std::max(r.G0, max_abs(G0 * K.K4 + K.K1 * G0));
        r.H0 = std::max(r.H0, max_abs(H0 * K.K1 + K.K4 * H0));
        r.G1 = std::max(r.G1, max_abs(G1 * K.K4 - K.K1 * G1));
        r.H1 = std::max(r.H1, max_abs(H1 * K.K1 - K.K4 * H1));
    }
    return r;
}

}  // namespace ismut::reductions

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ismut/algebra.hpp"
#include "ismut/spectral.hpp"

namespace ismut {

class GridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kDefaultDecayThreshold = 1e-8;

/**
 * Scalar AKNS pair (q, r) sampled on the periodic grid x_j = -L + j dx,
 * j = 0..N-1, dx = 2L/N. The point x = L coincides with x = -L.
 */
struct LinePotential {
    double L = 20.0;
    std::vector<cd> q, r;

    std::size_t N() const { return q.size(); }
    double dx() const { return 2.0 * L / static_cast<double>(N()); }
    double x(std::size_t j) const { return -L + static_cast<double>(j) * dx(); }
    /// Index of -x_j.
    std::size_t mirror(std::size_t j) const { return (N() - j) % N(); }

    void validate() const {
        if (q.size() != r.size()) throw GridError("line potential: q and r lengths differ");
        if (!spectral::is_power_of_two(N())) throw GridError("line potential: N must be a power of two");
        if (!(L > 0.0)) throw GridError("line potential: L must be positive");
    }

    double endpoint_magnitude() const { return std::max(std::abs(q.front()), std::abs(r.front())); }

    static LinePotential sample(double L, std::size_t N, const std::function<cd(double)>& fq,
                                const std::function<cd(double)>& fr) {
        LinePotential p;
        p.L = L;
        p.q.resize(N);
        p.r.resize(N);
        for (std::size_t j = 0; j < N; ++j) {
            const double xj = p.x(j);
            p.q[j] = fq(xj);
            p.r[j] = fr(xj);
        }
        p.validate();
        return p;
    }

    LinePotential refined(std::size_t factor) const {
        LinePotential p;
        p.L = L;
        p.q = spectral::refine(q, factor);
        p.r = spectral::refine(r, factor);
        return p;
    }
};

/// Diagonal (Q, R) on x_j = j L / n, j = 0..n.
struct HalfLinePotential {
    double L = 20.0;
    std::vector<cd> q1, q2, r1, r2;

    std::size_t intervals() const { return q1.size() - 1; }
    double dx() const { return L / static_cast<double>(intervals()); }
    double x(std::size_t j) const { return static_cast<double>(j) * dx(); }
    double endpoint_magnitude() const {
        return std::max({std::abs(q1.back()), std::abs(q2.back()), std::abs(r1.back()), std::abs(r2.back())});
    }
};

/// Q^line = diag(q(x), -q(-x)), R^line likewise, on the periodic line grid.
struct RedundantLinePotential {
    double L = 20.0;
    std::vector<cd> q1, q2, r1, r2;

    std::size_t N() const { return q1.size(); }
    double dx() const { return 2.0 * L / static_cast<double>(N()); }
    double x(std::size_t j) const { return -L + static_cast<double>(j) * dx(); }
};

/// Time traces of a line solution at x = 0.
struct BoundaryTraces {
    std::vector<double> t;
    std::vector<cd> q, qx, r, rx;
};

using Diag2 = std::array<cd, 2>;

struct BoundaryData {
    double T = 0.0;
    std::vector<double> t;
    std::vector<Diag2> G0, G1, H0, H1;
    bool linearizable = false;

    std::size_t samples() const { return t.size(); }

    /// Sup over t of |G0 - s G0 s|, |G1 + s G1 s| and the H analogues (s = sigma).
    double symmetry_residual() const {
        double res = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            // s diag(u, v) s = diag(v, u)
            res = std::max(res, std::abs(G0[i][0] - G0[i][1]));
            res = std::max(res, std::abs(H0[i][0] - H0[i][1]));
            res = std::max(res, std::abs(G1[i][0] + G1[i][1]));
            res = std::max(res, std::abs(H1[i][0] + H1[i][1]));
        }
        return res;
    }
};

inline constexpr double kSymmetryBCTolerance = 1e-10;

// ---------------------------------------------------------------------------

inline CMat4 assemble_W(const Diag2& Q, const Diag2& R) {
    CMat4 w;
    w(0, 2) = Q[0];
    w(1, 3) = Q[1];
    w(2, 0) = R[0];
    w(3, 1) = R[1];
    return w;
}

inline CMat4 assemble_W(const HalfLinePotential& p, std::size_t j) {
    if (j > p.intervals()) throw std::out_of_range("assemble_W: index out of range");
    return assemble_W(Diag2{p.q1[j], p.q2[j]}, Diag2{p.r1[j], p.r2[j]});
}

/// P = 2k W - i W_x Sigma3 - i W^2 Sigma3.
inline CMat4 assemble_P(const CMat4& W, const CMat4& Wx, cd k) {
    const CMat4 S3 = consts::Sigma3();
    return 2.0 * k * W - I_unit * (Wx * S3) - I_unit * (W * W * S3);
}

/// Channel c of P for scalar entries (q, qx, r, rx).
inline CMat2 channel_P(cd q, cd qx, cd r, cd rx, cd k) {
    return CMat2{{-I_unit * q * r, 2.0 * k * q + I_unit * qx}, {2.0 * k * r - I_unit * rx, I_unit * q * r}};
}

/// q1(x) = q(x), q2(x) = q(-x) and likewise for r, on x in [0, L].
inline HalfLinePotential embed_halfline_UT(const LinePotential& lp) {
    lp.validate();
    const std::size_t N = lp.N();
    const std::size_t h = N / 2;
    HalfLinePotential hp;
    hp.L = lp.L;
    hp.q1.resize(h + 1);
    hp.q2.resize(h + 1);
    hp.r1.resize(h + 1);
    hp.r2.resize(h + 1);
    for (std::size_t j = 0; j <= h; ++j) {
        const std::size_t ip = (h + j) % N;
        const std::size_t im = h - j;
        hp.q1[j] = lp.q[ip];
        hp.q2[j] = lp.q[im];
        hp.r1[j] = lp.r[ip];
        hp.r2[j] = lp.r[im];
    }
    return hp;
}

inline RedundantLinePotential embed_redundant_line(const LinePotential& lp) {
    lp.validate();
    const std::size_t N = lp.N();
    RedundantLinePotential rp;
    rp.L = lp.L;
    rp.q1 = lp.q;
    rp.r1 = lp.r;
    rp.q2.resize(N);
    rp.r2.resize(N);
    for (std::size_t j = 0; j < N; ++j) {
        rp.q2[j] = -lp.q[lp.mirror(j)];
        rp.r2[j] = -lp.r[lp.mirror(j)];
    }
    return rp;
}

/**
 * G0 = diag(q, q), G1 = diag(qx, -qx), H0 = diag(r, r), H1 = diag(rx, -rx)
 * from the traces at x = 0. Throws if the symmetry residual exceeds `tol`.
 */
inline BoundaryData extract_boundary_data(const BoundaryTraces& tr, double tol = kSymmetryBCTolerance) {
    const std::size_t n = tr.t.size();
    if (tr.q.size() != n || tr.qx.size() != n || tr.r.size() != n || tr.rx.size() != n)
        throw std::invalid_argument("extract_boundary_data: trace lengths differ");
    BoundaryData bd;
    bd.t = tr.t;
    bd.T = n ? tr.t.back() : 0.0;
    bd.G0.resize(n);
    bd.G1.resize(n);
    bd.H0.resize(n);
    bd.H1.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        bd.G0[i] = {tr.q[i], tr.q[i]};
        bd.G1[i] = {tr.qx[i], -tr.qx[i]};
        bd.H0[i] = {tr.r[i], tr.r[i]};
        bd.H1[i] = {tr.rx[i], -tr.rx[i]};
    }
    const double res = bd.symmetry_residual();
    if (!(res < tol)) throw std::runtime_error("extract_boundary_data: symmetry residual " + std::to_string(res));
    bd.linearizable = true;
    return bd;
}

}  // namespace ismut

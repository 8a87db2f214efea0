#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace ismut::rh {

struct GmresResult {
    Eigen::VectorXcd x;
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Restarted GMRES(m) with modified Gram-Schmidt and Givens rotations.
template <class Op>
GmresResult gmres(Op&& A, const Eigen::VectorXcd& b, double tol = 1e-13, std::size_t restart = 80,
                  std::size_t max_iter = 2000) {
    using Vec = Eigen::VectorXcd;
    const Eigen::Index n = b.size();
    GmresResult out;
    out.x = Vec::Zero(n);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        out.converged = true;
        return out;
    }
    std::size_t total = 0;
    while (total < max_iter) {
        Vec r = b - A(out.x);
        double beta = r.norm();
        out.relative_residual = beta / bnorm;
        if (out.relative_residual < tol) {
            out.converged = true;
            break;
        }
        const auto m = static_cast<Eigen::Index>(restart);
        std::vector<Vec> V;
        V.push_back(r / beta);
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
        std::vector<std::complex<double>> cs(m), sn(m);
        Vec g = Vec::Zero(m + 1);
        g(0) = beta;
        Eigen::Index j = 0;
        for (; j < m && total < max_iter; ++j, ++total) {
            Vec w = A(V[j]);
            for (Eigen::Index i = 0; i <= j; ++i) {
                H(i, j) = V[i].dot(w);
                w -= H(i, j) * V[i];
            }
            H(j + 1, j) = w.norm();
            for (Eigen::Index i = 0; i < j; ++i) {
                const auto t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
                H(i + 1, j) = -std::conj(sn[i]) * H(i, j) + std::conj(cs[i]) * H(i + 1, j);
                H(i, j) = t;
            }
            const double a = std::abs(H(j, j)), bb = std::abs(H(j + 1, j));
            const double rho = std::hypot(a, bb);
            if (rho == 0.0) break;
            cs[j] = H(j, j) / rho;
            sn[j] = H(j + 1, j) / rho;
            cs[j] = std::conj(cs[j]);
            sn[j] = std::conj(sn[j]);
            H(j, j) = rho;
            H(j + 1, j) = 0.0;
            g(j + 1) = -std::conj(sn[j]) * g(j);
            g(j) = cs[j] * g(j);
            out.relative_residual = std::abs(g(j + 1)) / bnorm;
            if (out.relative_residual < tol) {
                ++j;
                ++total;
                break;
            }
            const double hn = w.norm();
            if (hn == 0.0) {
                ++j;
                ++total;
                break;
            }
            V.push_back(w / hn);
        }
        const Eigen::Index k = j;
        if (k == 0) break;
        Vec y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
        for (Eigen::Index i = 0; i < k; ++i) out.x += y(i) * V[i];
    }
    const Vec r = b - A(out.x);
    out.relative_residual = r.norm() / bnorm;
    out.converged = out.relative_residual < std::max(tol, 1e-12) * 10;
    out.iterations = total;
    return out;
}

}  // namespace ismut::rh

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ismut/algebra.hpp"

namespace ismut::rh {

/// Gauss-Legendre rule on [-1, 1] with its spectral differentiation matrix.
struct GaussLegendre {
    std::vector<double> x, w;
    Eigen::MatrixXd D;

    explicit GaussLegendre(std::size_t n) : x(n), w(n), D(n, n) {
        std::vector<double> dp(n);
        for (std::size_t i = 0; i < n; ++i) {
            double z = std::cos(M_PI * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
            double p1 = 0, p2 = 0, pp = 0;
            for (int it = 0; it < 100; ++it) {
                p1 = 1.0;
                p2 = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
                }
                pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
                const double dz = p1 / pp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            x[n - 1 - i] = z;
            w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
            dp[n - 1 - i] = pp;
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    (i == j) ? x[i] / (1.0 - x[i] * x[i]) : dp[i] / (dp[j] * (x[i] - x[j]));
    }
};

/// Straight segment a -> b or circular arc centre + R e^{i theta}, theta_a -> theta_b.
struct Panel {
    bool arc = false;
    cd a, b;
    cd centre;
    double radius = 0.0, theta_a = 0.0, theta_b = 0.0;
    int piece = 0;

    static Panel segment(cd a, cd b, int piece) {
        Panel p;
        p.a = a;
        p.b = b;
        p.piece = piece;
        return p;
    }
    static Panel make_arc(cd centre, double radius, double ta, double tb, int piece) {
        Panel p;
        p.arc = true;
        p.centre = centre;
        p.radius = radius;
        p.theta_a = ta;
        p.theta_b = tb;
        p.a = centre + std::polar(radius, ta);
        p.b = centre + std::polar(radius, tb);
        p.piece = piece;
        return p;
    }

    cd point(double tau) const {
        if (!arc) return 0.5 * (a + b) + 0.5 * (b - a) * tau;
        const double th = 0.5 * (theta_a + theta_b) + 0.5 * (theta_b - theta_a) * tau;
        return centre + std::polar(radius, th);
    }
    cd dpoint(double tau) const {
        if (!arc) return 0.5 * (b - a);
        const double th = 0.5 * (theta_a + theta_b) + 0.5 * (theta_b - theta_a) * tau;
        return I_unit * std::polar(radius, th) * (0.5 * (theta_b - theta_a));
    }

    /// Integral of ds / (s - z) along the panel; principal value when z lies on it.
    cd log_integral(cd z, bool on_panel) const {
        const double re = std::log(std::abs(b - z) / std::abs(a - z));
        if (on_panel) return {re, arc ? 0.5 * (theta_b - theta_a) : 0.0};
        if (!arc) return {re, std::arg((b - z) / (a - z))};
        // accumulate the swept angle over short chords
        constexpr int sub = 256;
        double ang = 0.0;
        cd prev = a - z;
        for (int s = 1; s <= sub; ++s) {
            const double th = theta_a + (theta_b - theta_a) * static_cast<double>(s) / sub;
            const cd cur = centre + std::polar(radius, th) - z;
            ang += std::arg(cur / prev);
            prev = cur;
        }
        return {re, ang};
    }
};

/**
 * Panels with their Gauss-Legendre nodes. Weights are complex (ds along the
 * oriented curve); the + side of every panel is on its left.
 */
class Contour {
public:
    static constexpr std::size_t kOrder = 16;

    Contour() : gl_(kOrder) {}

    void add(const Panel& p) {
        const std::size_t base = z_.size();
        panels_.push_back(p);
        start_.push_back(base);
        for (std::size_t i = 0; i < kOrder; ++i) {
            z_.push_back(p.point(gl_.x[i]));
            w_.push_back(gl_.w[i] * p.dpoint(gl_.x[i]));
            piece_.push_back(p.piece);
            panel_of_.push_back(panels_.size() - 1);
        }
    }

    std::size_t size() const { return z_.size(); }
    std::size_t panels() const { return panels_.size(); }
    cd node(std::size_t i) const { return z_[i]; }
    cd weight(std::size_t i) const { return w_[i]; }
    int piece(std::size_t i) const { return piece_[i]; }
    const std::vector<cd>& nodes() const { return z_; }
    const std::vector<cd>& weights() const { return w_; }
    const Panel& panel(std::size_t p) const { return panels_[p]; }
    std::size_t panel_of(std::size_t i) const { return panel_of_[i]; }

    /// Nearest node index to z, or size() if none within tol.
    std::size_t find(cd z, double tol = 1e-10) const {
        for (std::size_t i = 0; i < z_.size(); ++i)
            if (std::abs(z_[i] - z) < tol) return i;
        return z_.size();
    }

    /// Minimum distance from z to any panel, sampled.
    double distance(cd z) const {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& p : panels_)
            for (int s = 0; s <= 64; ++s) d = std::min(d, std::abs(p.point(-1.0 + s / 32.0) - z));
        return d;
    }

    /**
     * Matrix of the + boundary value of the Cauchy transform at the nodes:
     * (C_+ f)(z_j) = sum_m C(j, m) f_m, with global singularity subtraction.
     */
    Eigen::MatrixXcd cauchy_plus() const {
        const std::size_t n = z_.size();
        const cd c2pi = 1.0 / (2.0 * M_PI * I_unit);
        Eigen::MatrixXcd C(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> vander;
        for (std::size_t p = 0; p < panels_.size(); ++p) vander.emplace_back(vandermonde_t(p));
        for (std::size_t j = 0; j < n; ++j) {
            const auto J = static_cast<Eigen::Index>(j);
            cd L{}, diag_sum{};
            for (std::size_t p = 0; p < panels_.size(); ++p) {
                const std::size_t s0 = start_[p];
                const cd tau = to_local(p, z_[j]);
                const bool near = p != panel_of_[j] && std::abs(tau) < kNearRadius;
                if (near) {
                    // product integration: exact for polynomial densities on this panel
                    const Eigen::VectorXcd wh = vander[p].solve(moments(p, tau, z_[j]));
                    for (std::size_t l = 0; l < kOrder; ++l)
                        C(J, static_cast<Eigen::Index>(s0 + l)) = c2pi * wh(static_cast<Eigen::Index>(l));
                    continue;
                }
                L += panels_[p].log_integral(z_[j], p == panel_of_[j]);
                for (std::size_t l = 0; l < kOrder; ++l) {
                    const std::size_t m = s0 + l;
                    if (m == j) continue;
                    const cd v = w_[m] / (z_[m] - z_[j]);
                    C(J, static_cast<Eigen::Index>(m)) = c2pi * v;
                    diag_sum += v;
                }
            }
            C(J, J) = 0.5 + c2pi * (L - diag_sum);
            // w_j f'(z_j) through the panel differentiation matrix
            const std::size_t p = panel_of_[j];
            const std::size_t i = j - start_[p];
            for (std::size_t l = 0; l < kOrder; ++l)
                C(J, static_cast<Eigen::Index>(start_[p] + l)) +=
                    c2pi * gl_.w[i] * gl_.D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
        }
        return C;
    }

    /// Cauchy integral (1/2 pi i) ∫ f ds / (s - z) for z off the contour, with near-panel correction.
    template <class Value>
    Value cauchy(const std::vector<Value>& f, cd z, Value zero) const {
        Value s = zero;
        for (std::size_t p = 0; p < panels_.size(); ++p) {
            const cd tau = to_local(p, z);
            if (std::abs(tau) < kNearRadius) {
                const Eigen::VectorXcd wh = Eigen::PartialPivLU<Eigen::MatrixXcd>(vandermonde_t(p)).solve(moments(p, tau, z));
                for (std::size_t l = 0; l < kOrder; ++l) s += f[start_[p] + l] * wh(static_cast<Eigen::Index>(l));
            } else {
                for (std::size_t l = 0; l < kOrder; ++l) {
                    const std::size_t m = start_[p] + l;
                    s += f[m] * (w_[m] / (z_[m] - z));
                }
            }
        }
        return s * (1.0 / (2.0 * M_PI * I_unit));
    }

    /// Targets closer than this (in panel-local units) get product integration.
    static constexpr double kNearRadius = 2.0;

private:
    /// Local coordinate: the panel chord maps to [-1, 1].
    cd to_local(std::size_t p, cd z) const {
        const Panel& P = panels_[p];
        return (z - 0.5 * (P.a + P.b)) / (0.5 * (P.b - P.a));
    }

    Eigen::MatrixXcd vandermonde_t(std::size_t p) const {
        const auto n = static_cast<Eigen::Index>(kOrder);
        Eigen::MatrixXcd V(n, n);
        for (Eigen::Index m = 0; m < n; ++m) {
            const cd t = to_local(p, z_[start_[p] + static_cast<std::size_t>(m)]);
            cd pw = 1.0;
            for (Eigen::Index k = 0; k < n; ++k) {
                V(k, m) = pw;
                pw *= t;
            }
        }
        return V;
    }

    /// ∫ tau^k / (tau - tau0) dtau along the mapped panel, k < kOrder.
    Eigen::VectorXcd moments(std::size_t p, cd tau0, cd z) const {
        const auto n = static_cast<Eigen::Index>(kOrder);
        Eigen::VectorXcd mu(n);
        // the log integral is invariant under the affine map
        mu(0) = panels_[p].log_integral(z, false);
        for (Eigen::Index k = 1; k < n; ++k) {
            const double kk = static_cast<double>(k);
            const double ends = (1.0 - std::pow(-1.0, kk)) / kk;
            mu(k) = tau0 * mu(k - 1) + ends;
        }
        return mu;
    }

    GaussLegendre gl_;
    std::vector<Panel> panels_;
    std::vector<std::size_t> start_;
    std::vector<cd> z_, w_;
    std::vector<int> piece_;
    std::vector<std::size_t> panel_of_;
};

/// Every panel split at its parameter midpoint: twice the nodes, same geometry.
inline Contour bisect(const Contour& c) {
    Contour out;
    for (std::size_t p = 0; p < c.panels(); ++p) {
        const Panel& P = c.panel(p);
        if (P.arc) {
            const double tm = 0.5 * (P.theta_a + P.theta_b);
            out.add(Panel::make_arc(P.centre, P.radius, P.theta_a, tm, P.piece));
            out.add(Panel::make_arc(P.centre, P.radius, tm, P.theta_b, P.piece));
        } else {
            const cd m = 0.5 * (P.a + P.b);
            out.add(Panel::segment(P.a, m, P.piece));
            out.add(Panel::segment(m, P.b, P.piece));
        }
    }
    return out;
}

/**
 * Breakpoints of [0, len]: geometric grading (ratio 1/2) from h_min up to
 * h_max at the flagged ends, uniform panels of at most h_max in between.
 */
inline std::vector<double> graded_breakpoints(double len, double h_max, double h_min, bool grade_start,
                                              bool grade_end) {
    std::vector<double> left{0.0}, right{len};
    double lo = 0.0, hi = len;
    if (grade_start) {
        double h = h_min;
        while (h < h_max && lo + h < hi - h) {
            lo += h;
            left.push_back(lo);
            h *= 2.0;
        }
    }
    if (grade_end) {
        double h = h_min;
        while (h < h_max && hi - h > lo + h) {
            hi -= h;
            right.push_back(hi);
            h *= 2.0;
        }
    }
    const double mid = hi - lo;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(mid / h_max - 1e-12)));
    std::vector<double> out = left;
    for (std::size_t i = 1; i < n; ++i) out.push_back(lo + mid * static_cast<double>(i) / static_cast<double>(n));
    for (auto it = right.rbegin(); it != right.rend(); ++it) out.push_back(*it);
    return out;
}

/// Breakpoints on [0, len] where the panel width follows `width(s)`, used for tails.
template <class F>
std::vector<double> variable_breakpoints(double len, F&& width) {
    std::vector<double> out{0.0};
    double s = 0.0;
    while (s < len - 1e-12) {
        const double h = std::min(width(s), len - s);
        s += (len - s - h < 0.25 * h) ? (len - s) : h;
        out.push_back(s);
    }
    return out;
}

}  // namespace ismut::rh

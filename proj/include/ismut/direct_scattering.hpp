#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ismut/akns.hpp"
#include "ismut/algebra.hpp"

namespace ismut {

class ScatteringError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a(k) or d(k) is too close to singular somewhere on the grid.
class DiscreteSpectrumSuspected : public ScatteringError {
public:
    DiscreteSpectrumSuspected(const std::string& what, cd k, double value)
        : ScatteringError(what), k_(k), value_(value) {}
    cd k() const { return k_; }
    double value() const { return value_; }

private:
    cd k_;
    double value_;
};

inline constexpr double kZeroDetectionThreshold = 1e-4;
inline constexpr double kDefaultPuncture = 1e-3;

namespace detail {

inline const double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Which columns of the normalized solution stay bounded for the given lambda.
struct ColumnMask {
    bool first = true;
    bool second = true;
};

inline ColumnMask mask_for(cd lambda) {
    const double tol = 1e-12 * std::max(1.0, std::abs(lambda));
    if (lambda.imag() > tol) return {false, true};
    if (lambda.imag() < -tol) return {true, false};
    return {true, true};
}

/**
 * Backward fourth-order Magnus sweep for mu' + i lam [s3, mu] = V mu on a
 * uniform grid with spacing h, from mu(n h) = 1 down to mu(0).
 * `V(j)` returns the channel potential at sample j. Samples are taken in
 * triples (j, j + s, j + 2s) so `stride` = 2 gives the coarse Richardson pass.
 */
template <class Sampler>
CMat2 magnus_sweep(std::size_t n, double h, cd lambda, Sampler&& V, std::size_t stride = 1) {
    if (n % (2 * stride) != 0) throw std::invalid_argument("magnus_sweep: interval count not divisible by step");
    const ColumnMask mask = mask_for(lambda);
    const double H = 2.0 * h * static_cast<double>(stride);
    const CMat2 lam_s3 = CMat2::diagonal({-I_unit * lambda, I_unit * lambda});
    const cd e_first = std::exp(-I_unit * lambda * H);
    const cd e_second = std::exp(I_unit * lambda * H);
    CMat2 mu = CMat2::identity();
    if (!mask.first) mu(0, 0) = mu(1, 0) = 0.0;
    if (!mask.second) mu(0, 1) = mu(1, 1) = 0.0;
    CMat2 A1 = lam_s3 + V(n);
    for (std::size_t j = n; j > 0; j -= 2 * stride) {
        const CMat2 Am = lam_s3 + V(j - stride);
        const CMat2 A0 = lam_s3 + V(j - 2 * stride);
        const CMat2 B0 = (H / 6.0) * (A0 + 4.0 * Am + A1);
        const CMat2 B1 = (H / 12.0) * (A1 - A0);
        const CMat2 Om = B0 + commutator(B1, B0);
        mu = expm_traceless(-Om) * mu;
        for (std::size_t i = 0; i < 2; ++i) {
            mu(i, 0) = mask.first ? mu(i, 0) * e_first : 0.0;
            mu(i, 1) = mask.second ? mu(i, 1) * e_second : 0.0;
        }
        A1 = A0;
    }
    if (!mask.first) mu(0, 0) = mu(1, 0) = kNaN;
    if (!mask.second) mu(0, 1) = mu(1, 1) = kNaN;
    return mu;
}

inline CMat2 xpot(cd q, cd r) { return CMat2{{0.0, q}, {r, 0.0}}; }

}  // namespace detail

struct IntegrationOptions {
    /// run the coarse pass and report |fine - coarse| / 15
    bool richardson = false;
};

/// One spectral sample: the 4x4 matrix plus which block columns are meaningful.
struct ScatteringRecord {
    cd k;
    CMat4 M;
    bool left_valid = true;   // block column (top-left, bottom-left)
    bool right_valid = true;  // block column (top-right, bottom-right)
    double error_estimate = 0.0;

    Block4 blocks4() const { return blocks(M); }
};

namespace detail {

inline ScatteringRecord assemble_record(cd k, cd lambda, const CMat2& c0, const CMat2& c1, double err) {
    ScatteringRecord rec;
    rec.k = k;
    rec.M = from_channels(c0, c1);
    const ColumnMask m = mask_for(lambda);
    rec.left_valid = m.first;
    rec.right_valid = m.second;
    rec.error_estimate = err;
    return rec;
}

inline double diff_valid(const CMat2& a, const CMat2& b) {
    double s = 0.0;
    for (const auto i : {0, 1})
        for (const auto j : {0, 1}) {
            const cd d = a(i, j) - b(i, j);
            if (std::isfinite(d.real()) && std::isfinite(d.imag())) s = std::max(s, std::abs(d));
        }
    return s;
}

template <class Sampler>
CMat2 sweep_with_estimate(std::size_t n, double h, cd lambda, Sampler&& V, bool richardson, double& err) {
    CMat2 fine = magnus_sweep(n, h, lambda, V, 1);
    if (richardson && n % 4 == 0) {
        const CMat2 coarse = magnus_sweep(n, h, lambda, V, 2);
        err = std::max(err, diff_valid(fine, coarse) / 15.0);
    }
    return fine;
}

}  // namespace detail

/**
 * S(k) = mu_3(0, k): x-part integrated from x = L (identity) to x = 0.
 * Off the real axis only the bounded block column is returned; the other
 * is filled with NaN and flagged invalid.
 */
inline ScatteringRecord integrate_x(const HalfLinePotential& p, cd k, const IntegrationOptions& opt = {}) {
    const std::size_t n = p.intervals();
    double err = 0.0;
    const auto V0 = [&](std::size_t j) { return detail::xpot(p.q1[j], p.r1[j]); };
    const auto V1 = [&](std::size_t j) { return detail::xpot(p.q2[j], p.r2[j]); };
    const CMat2 c0 = detail::sweep_with_estimate(n, p.dx(), k, V0, opt.richardson, err);
    const CMat2 c1 = detail::sweep_with_estimate(n, p.dx(), k, V1, opt.richardson, err);
    auto rec = detail::assemble_record(k, k, c0, c1, err);
    if (!all_finite(channel(rec.M, 0)) && rec.left_valid && rec.right_valid)
        throw ScatteringError("integrate_x: non-finite values");
    return rec;
}

/// T(k) = mu_1(0, k): t-part at x = 0 integrated from t = T (identity) to t = 0.
inline ScatteringRecord integrate_t(const BoundaryData& bd, cd k, const IntegrationOptions& opt = {}) {
    const std::size_t n = bd.samples() - 1;
    if (n < 2) throw std::invalid_argument("integrate_t: need at least three time samples");
    const double h = bd.T / static_cast<double>(n);
    const cd lambda = 2.0 * k * k;
    double err = 0.0;
    CMat2 ch[2];
    for (std::size_t c = 0; c < 2; ++c) {
        const auto V = [&](std::size_t j) {
            return channel_P(bd.G0[j][c], bd.G1[j][c], bd.H0[j][c], bd.H1[j][c], k);
        };
        ch[c] = detail::sweep_with_estimate(n, h, lambda, V, opt.richardson, err);
    }
    return detail::assemble_record(k, lambda, ch[0], ch[1], err);
}

/**
 * S^line(k) = lim_{x -> -inf} e^{ikx S3} Psi_+(x, k) e^{-ikx S3}, real k only.
 * Psi_+ is integrated from +L to -L across the periodic grid.
 */
inline ScatteringRecord compute_S_line(const RedundantLinePotential& rp, double k, const IntegrationOptions& opt = {}) {
    const std::size_t N = rp.N();
    double err = 0.0;
    const auto at = [N](const std::vector<cd>& v, std::size_t j) { return v[j % N]; };
    const auto V0 = [&](std::size_t j) { return detail::xpot(at(rp.q1, j), at(rp.r1, j)); };
    const auto V1 = [&](std::size_t j) { return detail::xpot(at(rp.q2, j), at(rp.r2, j)); };
    CMat2 c0 = detail::sweep_with_estimate(N, rp.dx(), cd(k), V0, opt.richardson, err);
    CMat2 c1 = detail::sweep_with_estimate(N, rp.dx(), cd(k), V1, opt.richardson, err);
    const cd e = std::exp(-2.0 * I_unit * k * rp.L);
    for (CMat2* c : {&c0, &c1}) {
        (*c)(0, 1) *= e;
        (*c)(1, 0) /= e;
    }
    return detail::assemble_record(cd(k), cd(k), c0, c1, err);
}

// ---------------------------------------------------------------------------

enum class Quadrant { RealAxis, ImagAxis, D1, D2, D3, D4 };

inline Quadrant classify(cd k) {
    if (k.imag() == 0.0) return Quadrant::RealAxis;
    if (k.real() == 0.0) return Quadrant::ImagAxis;
    if (k.real() > 0.0) return k.imag() > 0.0 ? Quadrant::D1 : Quadrant::D4;
    return k.imag() > 0.0 ? Quadrant::D2 : Quadrant::D3;
}

/**
 * Sample points on R and iR (symmetric, punctured at 0) plus an off-axis fan.
 * Every list is closed under k -> -k and k -> k*.
 */
struct SpectralGrid {
    std::vector<double> real;  // includes both signs
    std::vector<double> imag;  // imaginary parts of the iR samples
    std::vector<cd> fan;       // off-axis points, all four quadrants

    static SpectralGrid make(double kmax, std::size_t n_half, double puncture = kDefaultPuncture,
                             double fan_radius = 1.0, std::size_t fan_rays = 3) {
        SpectralGrid g;
        std::vector<double> pos;
        for (std::size_t i = 0; i < n_half; ++i) {
            const double s = (n_half == 1) ? 1.0 : static_cast<double>(i) / static_cast<double>(n_half - 1);
            pos.push_back(puncture + (kmax - puncture) * s);
        }
        for (auto it = pos.rbegin(); it != pos.rend(); ++it) g.real.push_back(-*it);
        for (double p : pos) g.real.push_back(p);
        g.imag = g.real;
        for (std::size_t r = 1; r <= fan_rays; ++r) {
            const double th = 0.5 * M_PI * static_cast<double>(r) / static_cast<double>(fan_rays + 1);
            const cd z = std::polar(fan_radius, th);
            for (const cd w : {z, -z, std::conj(z), -std::conj(z)}) g.fan.push_back(w);
        }
        return g;
    }

    std::vector<cd> real_points() const {
        std::vector<cd> out;
        for (double k : real) out.emplace_back(k, 0.0);
        return out;
    }
    std::vector<cd> imag_points() const {
        std::vector<cd> out;
        for (double s : imag) out.emplace_back(0.0, s);
        return out;
    }
};

/// Samples along the ray arg k = angle, radii in [r0, r1].
inline std::vector<cd> ray(double angle, double r0, double r1, std::size_t n) {
    std::vector<cd> out;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = (n == 1) ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        out.push_back(std::polar(r0 + (r1 - r0) * s, angle));
    }
    return out;
}

using ScatteringHalfLineS = std::vector<ScatteringRecord>;
using ScatteringHalfLineT = std::vector<ScatteringRecord>;
using ScatteringLine = std::vector<ScatteringRecord>;

inline ScatteringHalfLineS compute_S(const HalfLinePotential& p, const std::vector<cd>& ks,
                                     const IntegrationOptions& opt = {}) {
    ScatteringHalfLineS out;
    out.reserve(ks.size());
    for (const cd k : ks) out.push_back(integrate_x(p, k, opt));
    return out;
}

inline ScatteringHalfLineT compute_T(const BoundaryData& bd, const std::vector<cd>& ks,
                                     const IntegrationOptions& opt = {}) {
    ScatteringHalfLineT out;
    out.reserve(ks.size());
    for (const cd k : ks) out.push_back(integrate_t(bd, k, opt));
    return out;
}

inline ScatteringLine compute_S_line(const RedundantLinePotential& rp, const std::vector<double>& ks,
                                     const IntegrationOptions& opt = {}) {
    ScatteringLine out;
    out.reserve(ks.size());
    for (const double k : ks) out.push_back(compute_S_line(rp, k, opt));
    return out;
}

/// Sup over fully valid records of |det M - 1|.
inline double det_residual(const std::vector<ScatteringRecord>& recs) {
    double r = 0.0;
    for (const auto& rec : recs)
        if (rec.left_valid && rec.right_valid) r = std::max(r, std::abs(det(rec.M) - 1.0));
    return r;
}

/// Largest off-diagonal entry of any 2x2 block (the block structure check).
inline double block_diagonality_residual(const std::vector<ScatteringRecord>& recs) {
    double r = 0.0;
    for (const auto& rec : recs) {
        CMat4 m = rec.M;
        for (auto& v : m.a)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) v = 0.0;
        r = std::max(r, channel_leak(m));
    }
    return r;
}

inline double max_error_estimate(const std::vector<ScatteringRecord>& recs) {
    double r = 0.0;
    for (const auto& rec : recs) r = std::max(r, rec.error_estimate);
    return r;
}

/// Throws DiscreteSpectrumSuspected if |det a| or |det a~| drops below the threshold.
inline void check_no_zeros(const ScatteringHalfLineS& S, double threshold = kZeroDetectionThreshold) {
    for (const auto& rec : S) {
        const Block4 b = rec.blocks4();
        if (rec.right_valid) {
            const double v = std::abs(det(b.br));
            if (v < threshold) throw DiscreteSpectrumSuspected("|det a(k)| below threshold", rec.k, v);
        }
        if (rec.left_valid) {
            const double v = std::abs(det(b.tl));
            if (v < threshold) throw DiscreteSpectrumSuspected("|det a~(k)| below threshold", rec.k, v);
        }
    }
}

}  // namespace ismut

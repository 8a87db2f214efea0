#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <algorithm>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ismut {

using cd = std::complex<double>;
inline constexpr cd I_unit{0.0, 1.0};

/// Raised when an inversion meets a matrix whose condition estimate exceeds the bound.
class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(const std::string& what, double condition)
        : std::runtime_error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

inline constexpr double kDefaultConditionBound = 1e12;

/**
 * Fixed-size square complex matrix, row-major, value semantics.
 *
 * Only N = 2 and N = 4 are used by the library; the template keeps the
 * kernels identical for both sizes.
 */
template <std::size_t N>
struct CMat {
    std::array<cd, N * N> a{};

    static constexpr std::size_t size = N;

    constexpr CMat() = default;
    CMat(std::initializer_list<std::initializer_list<cd>> rows) {
        std::size_t i = 0;
        for (const auto& row : rows) {
            std::size_t j = 0;
            for (const auto& v : row) {
                a[i * N + j] = v;
                ++j;
            }
            ++i;
        }
    }

    static CMat identity() {
        CMat m;
        for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
        return m;
    }
    static CMat zero() { return CMat{}; }
    static CMat diagonal(const std::array<cd, N>& d) {
        CMat m;
        for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
        return m;
    }
    /// Unit matrix with a single 1 at (i, j), zero-based.
    static CMat unit(std::size_t i, std::size_t j) {
        CMat m;
        m(i, j) = 1.0;
        return m;
    }

    cd& operator()(std::size_t i, std::size_t j) { return a[i * N + j]; }
    const cd& operator()(std::size_t i, std::size_t j) const { return a[i * N + j]; }

    CMat& operator+=(const CMat& o) {
        for (std::size_t k = 0; k < N * N; ++k) a[k] += o.a[k];
        return *this;
    }
    CMat& operator-=(const CMat& o) {
        for (std::size_t k = 0; k < N * N; ++k) a[k] -= o.a[k];
        return *this;
    }
    CMat& operator*=(cd s) {
        for (auto& v : a) v *= s;
        return *this;
    }

    friend CMat operator+(CMat l, const CMat& r) { return l += r; }
    friend CMat operator-(CMat l, const CMat& r) { return l -= r; }
    friend CMat operator-(CMat m) {
        for (auto& v : m.a) v = -v;
        return m;
    }
    friend CMat operator*(CMat m, cd s) { return m *= s; }
    friend CMat operator*(cd s, CMat m) { return m *= s; }
    friend CMat operator*(const CMat& l, const CMat& r) {
        CMat out;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t k = 0; k < N; ++k) {
                const cd lik = l(i, k);
                if (lik == cd{}) continue;
                for (std::size_t j = 0; j < N; ++j) out(i, j) += lik * r(k, j);
            }
        return out;
    }
    friend bool operator==(const CMat& l, const CMat& r) { return l.a == r.a; }
};

using CMat2 = CMat<2>;
using CMat4 = CMat<4>;

template <std::size_t N>
CMat<N> dagger(const CMat<N>& m) {
    CMat<N> out;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) out(i, j) = std::conj(m(j, i));
    return out;
}

template <std::size_t N>
CMat<N> conj(const CMat<N>& m) {
    CMat<N> out;
    for (std::size_t k = 0; k < N * N; ++k) out.a[k] = std::conj(m.a[k]);
    return out;
}

template <std::size_t N>
CMat<N> commutator(const CMat<N>& x, const CMat<N>& y) {
    return x * y - y * x;
}

template <std::size_t N>
double frobenius(const CMat<N>& m) {
    double s = 0.0;
    for (const auto& v : m.a) s += std::norm(v);
    return std::sqrt(s);
}

template <std::size_t N>
double max_abs(const CMat<N>& m) {
    double s = 0.0;
    for (const auto& v : m.a) s = std::max(s, std::abs(v));
    return s;
}

template <std::size_t N>
bool all_finite(const CMat<N>& m) {
    for (const auto& v : m.a)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

template <std::size_t N>
cd trace(const CMat<N>& m) {
    cd t{};
    for (std::size_t i = 0; i < N; ++i) t += m(i, i);
    return t;
}

inline cd det(const CMat2& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

inline cd det(const CMat4& m) {
    Eigen::Matrix4cd e;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) e(i, j) = m(i, j);
    return e.determinant();
}

/// Ratio of largest to smallest singular value (infinity when singular).
inline double condition_estimate(const CMat2& m) {
    // singular values of a 2x2 from the invariants of m^dagger m
    const double fro2 = std::norm(m(0, 0)) + std::norm(m(0, 1)) + std::norm(m(1, 0)) + std::norm(m(1, 1));
    const double d = std::abs(det(m));
    const double disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4.0 * d * d));
    const double s_max2 = 0.5 * (fro2 + disc);
    const double s_min2 = (s_max2 > 0.0) ? d * d / s_max2 : 0.0;
    if (s_min2 <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(s_max2 / s_min2);
}

inline double condition_estimate(const CMat4& m) {
    Eigen::Matrix4cd e;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) e(i, j) = m(i, j);
    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(e);
    const auto& s = svd.singularValues();
    if (s(3) <= 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / s(3);
}

inline CMat2 inverse(const CMat2& m, double bound = kDefaultConditionBound) {
    const double c = condition_estimate(m);
    if (!(c < bound)) throw SingularMatrixError("2x2 inversion: condition estimate above bound", c);
    const cd d = det(m);
    return CMat2{{m(1, 1) / d, -m(0, 1) / d}, {-m(1, 0) / d, m(0, 0) / d}};
}

inline CMat4 inverse(const CMat4& m, double bound = kDefaultConditionBound) {
    Eigen::Matrix4cd e;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) e(i, j) = m(i, j);
    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double c = s(3) > 0.0 ? s(0) / s(3) : std::numeric_limits<double>::infinity();
    if (!(c < bound)) throw SingularMatrixError("4x4 inversion: condition estimate above bound", c);
    const Eigen::Matrix4cd inv = e.partialPivLu().inverse();
    CMat4 out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out(i, j) = inv(i, j);
    return out;
}

/// exp of a traceless 2x2 matrix: cosh(l) 1 + sinh(l)/l m with l^2 = -det m.
inline CMat2 expm_traceless(const CMat2& m) {
    const cd l2 = -det(m);
    const cd l = std::sqrt(l2);
    cd ch, shc;
    if (std::abs(l) < 1e-4) {
        // series to O(l^8)
        ch = 1.0 + l2 / 2.0 + l2 * l2 / 24.0 + l2 * l2 * l2 / 720.0;
        shc = 1.0 + l2 / 6.0 + l2 * l2 / 120.0 + l2 * l2 * l2 / 5040.0;
    } else {
        ch = std::cosh(l);
        shc = std::sinh(l) / l;
    }
    CMat2 out = m * shc;
    out(0, 0) += ch;
    out(1, 1) += ch;
    return out;
}

// ---------------------------------------------------------------------------
// Block structure. Index layout: top-left block {0,1}, bottom-right {2,3}.

struct Block4 {
    CMat2 tl, tr, bl, br;
};

inline Block4 blocks(const CMat4& m) {
    Block4 b;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            b.tl(i, j) = m(i, j);
            b.tr(i, j) = m(i, j + 2);
            b.bl(i, j) = m(i + 2, j);
            b.br(i, j) = m(i + 2, j + 2);
        }
    return b;
}

inline CMat4 assemble(const Block4& b) {
    CMat4 m;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            m(i, j) = b.tl(i, j);
            m(i, j + 2) = b.tr(i, j);
            m(i + 2, j) = b.bl(i, j);
            m(i + 2, j + 2) = b.br(i, j);
        }
    return m;
}

inline CMat4 block_diag(const CMat2& top, const CMat2& bottom) {
    return assemble(Block4{top, CMat2::zero(), CMat2::zero(), bottom});
}

inline CMat4 block_offdiag(const CMat2& top_right, const CMat2& bottom_left) {
    return assemble(Block4{CMat2::zero(), top_right, bottom_left, CMat2::zero()});
}

inline CMat2 diag2(cd d0, cd d1) { return CMat2::diagonal({d0, d1}); }

/// Largest off-diagonal magnitude of a 2x2 block (zero for diagonal blocks).
inline double offdiag_magnitude(const CMat2& m) { return std::max(std::abs(m(0, 1)), std::abs(m(1, 0))); }

// ---------------------------------------------------------------------------
// Channel view. The 4x4 objects built from diagonal Q, R never couple index
// c with anything but c + 2, so they are direct sums of two 2x2 problems.

inline CMat2 channel(const CMat4& m, std::size_t c) {
    return CMat2{{m(c, c), m(c, c + 2)}, {m(c + 2, c), m(c + 2, c + 2)}};
}

inline void set_channel(CMat4& m, std::size_t c, const CMat2& v) {
    m(c, c) = v(0, 0);
    m(c, c + 2) = v(0, 1);
    m(c + 2, c) = v(1, 0);
    m(c + 2, c + 2) = v(1, 1);
}

inline CMat4 from_channels(const CMat2& c0, const CMat2& c1) {
    CMat4 m;
    set_channel(m, 0, c0);
    set_channel(m, 1, c1);
    return m;
}

/// Size of the entries that couple the two channels.
inline double channel_leak(const CMat4& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            if ((i % 2) != (j % 2)) s = std::max(s, std::abs(m(i, j)));
    return s;
}

// ---------------------------------------------------------------------------
// Constant matrices shared by every module.

namespace consts {

inline CMat2 sigma3() { return diag2(1.0, -1.0); }
inline CMat2 sigma() { return CMat2{{0.0, 1.0}, {1.0, 0.0}}; }
inline CMat2 id2() { return CMat2::identity(); }
inline CMat4 id4() { return CMat4::identity(); }
/// diag(1_2, -1_2)
inline CMat4 Sigma3() { return CMat4::diagonal({1.0, 1.0, -1.0, -1.0}); }
/// 1_2 (x) sigma: swaps the two entries inside each block
inline CMat4 Sigma() { return block_diag(sigma(), sigma()); }
/// diag(sigma3, 1_2)
inline CMat4 I3() { return CMat4::diagonal({1.0, -1.0, 1.0, 1.0}); }
/// 1_2 (x) sigma3
inline CMat4 one_x_sigma3() { return CMat4::diagonal({1.0, -1.0, 1.0, -1.0}); }

}  // namespace consts

}  // namespace ismut

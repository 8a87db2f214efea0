#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include "ismut/algebra.hpp"

namespace ismut::spectral {

inline bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

/// Owning FFTW plan pair for one transform length. Not copyable.
class FFT {
public:
    explicit FFT(std::size_t n) : n_(n) {
        buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        fwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    FFT(const FFT&) = delete;
    FFT& operator=(const FFT&) = delete;
    ~FFT() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }

    std::size_t size() const { return n_; }

    /// Unnormalized forward transform, in place.
    void forward(std::vector<cd>& v) { run(v, fwd_, 1.0); }
    /// Inverse transform including the 1/n factor, in place.
    void backward(std::vector<cd>& v) { run(v, bwd_, 1.0 / static_cast<double>(n_)); }

private:
    void run(std::vector<cd>& v, fftw_plan p, double scale) {
        if (v.size() != n_) throw std::invalid_argument("FFT: length mismatch");
        for (std::size_t i = 0; i < n_; ++i) {
            buf_[i][0] = v[i].real();
            buf_[i][1] = v[i].imag();
        }
        fftw_execute(p);
        for (std::size_t i = 0; i < n_; ++i) v[i] = cd(buf_[i][0], buf_[i][1]) * scale;
    }

    std::size_t n_;
    fftw_complex* buf_ = nullptr;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

/// Angular wavenumbers of an n-point periodic grid of period `period`, FFT ordering.
inline std::vector<double> wavenumbers(std::size_t n, double period) {
    std::vector<double> xi(n);
    const double base = 2.0 * M_PI / period;
    for (std::size_t j = 0; j < n; ++j) {
        const long m = (j < n / 2) ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
        xi[j] = base * static_cast<double>(m);
    }
    return xi;
}

/// Spectral derivative of periodic samples. The Nyquist mode is zeroed.
inline std::vector<cd> derivative(const std::vector<cd>& f, double period) {
    const std::size_t n = f.size();
    FFT fft(n);
    std::vector<cd> v = f;
    fft.forward(v);
    const auto xi = wavenumbers(n, period);
    for (std::size_t j = 0; j < n; ++j) v[j] *= cd(0.0, xi[j]);
    v[n / 2] = 0.0;
    fft.backward(v);
    return v;
}

/**
 * Trigonometric interpolation onto a grid `factor` times finer.
 * Sample i of the input lands on sample factor*i of the output.
 */
inline std::vector<cd> refine(const std::vector<cd>& f, std::size_t factor) {
    const std::size_t n = f.size();
    if (factor <= 1) return f;
    const std::size_t m = n * factor;
    FFT small(n), big(m);
    std::vector<cd> v = f;
    small.forward(v);
    std::vector<cd> w(m, cd{});
    for (std::size_t j = 0; j < n / 2; ++j) w[j] = v[j];
    for (std::size_t j = n / 2 + 1; j < n; ++j) w[m - n + j] = v[j];
    // split the Nyquist coefficient symmetrically
    w[n / 2] = 0.5 * v[n / 2];
    w[m - n / 2] = 0.5 * v[n / 2];
    for (auto& c : w) c *= static_cast<double>(factor);
    big.backward(w);
    return w;
}

}  // namespace ismut::spectral

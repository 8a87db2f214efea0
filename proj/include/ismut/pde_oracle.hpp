#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ismut/akns.hpp"
#include "ismut/spectral.hpp"

namespace ismut::oracle {

struct EvolutionConfig {
    double L = 20.0;
    std::size_t N = 512;
    double dt = 1e-3;
    double T = 1.0;
    bool dealias = false;
    /// bound on dt (pi N / 2L)^2; the linear substep is exact so this only guards silly inputs
    double stability_bound = 50.0;
    /// abort when the sup norm exceeds this multiple of the initial one
    double growth_bound = 1e3;
    /// keep a full snapshot every `snapshot_every` steps (0 keeps only t = 0 and t = T)
    std::size_t snapshot_every = 0;

    std::size_t steps() const { return static_cast<std::size_t>(std::llround(T / dt)); }

    void validate() const {
        if (!spectral::is_power_of_two(N)) throw std::invalid_argument("oracle: N must be a power of two");
        if (!(dt > 0.0) || !(T >= 0.0) || !(L > 0.0)) throw std::invalid_argument("oracle: bad dt, T or L");
        const double kmax = M_PI * static_cast<double>(N) / (2.0 * L);
        if (dt * kmax * kmax > stability_bound) throw std::invalid_argument("oracle: dt above stability bound");
        if (std::abs(static_cast<double>(steps()) * dt - T) > 1e-9 * std::max(1.0, T))
            throw std::invalid_argument("oracle: T must be an integer multiple of dt");
    }
};

struct Snapshot {
    double t = 0.0;
    LinePotential field;
};

struct Trajectory {
    EvolutionConfig config;
    std::vector<Snapshot> snapshots;
    BoundaryTraces traces;
    /// integral of q r dx per step
    std::vector<cd> qr_integral;

    const Snapshot& final() const { return snapshots.back(); }
    const Snapshot& at(double t) const {
        for (const auto& s : snapshots)
            if (std::abs(s.t - t) < 1e-9) return s;
        throw std::out_of_range("trajectory: no snapshot at requested time");
    }
};

class InstabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline cd integral_qr(const LinePotential& p) {
    cd s{};
    for (std::size_t j = 0; j < p.N(); ++j) s += p.q[j] * p.r[j];
    return s * p.dx();
}

inline double mass(const std::vector<cd>& q, double dx) {
    double s = 0.0;
    for (const auto& v : q) s += std::norm(v);
    return s * dx;
}

/**
 * Strang splitting for i q_t + q_xx = 2 q r q, -i r_t + r_xx = 2 r q r.
 * The nonlinear flow keeps P = q r fixed pointwise, so it is applied exactly.
 */
class Stepper {
public:
    Stepper(std::size_t N, double L, double dt, bool dealias = false)
        : fft_(N), xi_(spectral::wavenumbers(N, 2.0 * L)), dt_(dt) {
        half_q_.resize(N);
        half_r_.resize(N);
        for (std::size_t j = 0; j < N; ++j) {
            const double ph = xi_[j] * xi_[j] * 0.5 * dt;
            half_q_[j] = std::polar(1.0, -ph);
            half_r_[j] = std::polar(1.0, ph);
        }
        if (dealias) {
            const double cut = (2.0 / 3.0) * xi_[N / 2 - 1];
            for (std::size_t j = 0; j < N; ++j)
                if (std::abs(xi_[j]) > cut) half_q_[j] = half_r_[j] = 0.0;
        }
    }

    void linear_half(std::vector<cd>& q, std::vector<cd>& r) {
        fft_.forward(q);
        fft_.forward(r);
        for (std::size_t j = 0; j < q.size(); ++j) {
            q[j] *= half_q_[j];
            r[j] *= half_r_[j];
        }
        fft_.backward(q);
        fft_.backward(r);
    }

    void nonlinear(std::vector<cd>& q, std::vector<cd>& r) const {
        for (std::size_t j = 0; j < q.size(); ++j) {
            const cd P = q[j] * r[j];
            const cd ph = 2.0 * I_unit * P * dt_;
            q[j] *= std::exp(-ph);
            r[j] *= std::exp(ph);
        }
    }

    void step(std::vector<cd>& q, std::vector<cd>& r) {
        linear_half(q, r);
        nonlinear(q, r);
        linear_half(q, r);
    }

private:
    spectral::FFT fft_;
    std::vector<double> xi_;
    std::vector<cd> half_q_, half_r_;
    double dt_;
};

/// One Strang step on a line potential.
inline void step(LinePotential& p, double dt) {
    Stepper s(p.N(), p.L, dt);
    s.step(p.q, p.r);
}

inline void record_traces(const LinePotential& p, double t, BoundaryTraces& tr) {
    const std::size_t i0 = p.N() / 2;  // x = 0
    const auto dq = spectral::derivative(p.q, 2.0 * p.L);
    const auto dr = spectral::derivative(p.r, 2.0 * p.L);
    tr.t.push_back(t);
    tr.q.push_back(p.q[i0]);
    tr.qx.push_back(dq[i0]);
    tr.r.push_back(p.r[i0]);
    tr.rx.push_back(dr[i0]);
}

inline double sup_norm(const std::vector<cd>& v) {
    double s = 0.0;
    for (const auto& c : v) s = std::max(s, std::abs(c));
    return s;
}

inline Trajectory evolve(const LinePotential& initial, const EvolutionConfig& cfg) {
    cfg.validate();
    if (initial.N() != cfg.N || std::abs(initial.L - cfg.L) > 1e-12)
        throw std::invalid_argument("oracle: initial data grid does not match config");
    Trajectory traj;
    traj.config = cfg;
    LinePotential p = initial;
    Stepper stepper(cfg.N, cfg.L, cfg.dt, cfg.dealias);
    const double base = std::max({sup_norm(p.q), sup_norm(p.r), 1e-300});
    const std::size_t n = cfg.steps();
    traj.snapshots.push_back({0.0, p});
    record_traces(p, 0.0, traj.traces);
    traj.qr_integral.push_back(integral_qr(p));
    for (std::size_t s = 1; s <= n; ++s) {
        stepper.step(p.q, p.r);
        const double t = static_cast<double>(s) * cfg.dt;
        const double g = std::max(sup_norm(p.q), sup_norm(p.r));
        if (!std::isfinite(g) || g > cfg.growth_bound * base)
            throw InstabilityError("oracle: norm growth at t = " + std::to_string(t));
        record_traces(p, t, traj.traces);
        traj.qr_integral.push_back(integral_qr(p));
        if (s == n || (cfg.snapshot_every && s % cfg.snapshot_every == 0)) traj.snapshots.push_back({t, p});
    }
    return traj;
}

enum class Kind { Local, Nonlocal };

/// r0 = eps q0* (local) or r0(x) = eps q0*(-x) (nonlocal).
inline LinePotential specialize(Kind kind, double eps, const LinePotential& q0) {
    LinePotential p = q0;
    for (std::size_t j = 0; j < p.N(); ++j) {
        const std::size_t src = (kind == Kind::Local) ? j : p.mirror(j);
        p.r[j] = eps * std::conj(q0.q[src]);
    }
    return p;
}

}  // namespace ismut::oracle

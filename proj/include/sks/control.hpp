#pragma once

// Constructive reachability: given a start y and a target u~, link them by
// the straight path u_bar(s) = y + (s/t)(u~ - y), solve the linear parabolic
// problem
//   d v_bar/ds + (nu A^2 - A + a) v_bar = a u_bar(s) - B(u_bar(s)),
//   v_bar(0) = y,
// and read off the driving profile z_bar = u_bar - v_bar (z_bar(0) = 0).
// Replaying the shifted dynamics with z := z_bar must reproduce the target;
// the report carries the endpoint error of that replay.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sks/dynamics.hpp"
#include "sks/field.hpp"

namespace sks {

namespace detail {

// (y - 1 + e^{-y}) / y^2, the second weight of the exponential-trapezoid
// rule; series near 0 to dodge cancellation.
inline double phi2(double y) {
    if (std::abs(y) < 1e-3)
        return 0.5 - y / 6.0 + y * y / 24.0 - y * y * y / 120.0;
    return (y - 1.0 + std::exp(-y)) / (y * y);
}

}  // namespace detail

struct ControlReport {
    std::vector<SpectralField> z_bar;   // driving profile at every step time, z_bar[0] = 0
    SpectralField endpoint;             // replayed u(t)
    double endpoint_error = 0.0;        // |u_replay(t) - u_target|
    double endpoint_rel_error = 0.0;    // relative to |u_target| (absolute when target is 0)
};

// `refine` > 1 integrates the synthesis problem with that many
// exponential-trapezoid substeps per dt, making z_bar an accurate sample of
// the continuous control; refine == 1 reuses the replay discretization
// exactly (self-consistent reconstruction).
inline ControlReport synthesize_control(const SpectralField& y, const SpectralField& u_target,
                                        const Integrator& integ, int refine = 1) {
    const SimConfig& cfg = integ.config();
    const double t_horizon = cfg.T;
    if (!(t_horizon > 0.0)) throw std::invalid_argument("synthesize_control: horizon must be > 0");
    if (refine < 1) throw std::invalid_argument("synthesize_control: refine must be >= 1");
    if (y.pairs() != cfg.K || u_target.pairs() != cfg.K)
        throw std::invalid_argument("synthesize_control: resolution mismatch with config");

    const std::uint64_t n = cfg.steps();
    const WavenumberTable& tab = integ.table();
    const double L = integ.domain().period_L;
    const double a = integ.domain().shift_a;
    const SpectralField dir = u_target - y;

    const auto u_bar = [&](double s) {
        SpectralField u = y;
        u += (s / t_horizon) * SpectralField(dir);
        return u;
    };
    const auto rhs = [&](double s) {
        const SpectralField ub = u_bar(s);
        SpectralField f = a * SpectralField(ub);
        f -= bilinear_B(ub, tab, L);
        return f;
    };

    ControlReport rep;
    rep.z_bar.reserve(n + 1);
    rep.z_bar.push_back(SpectralField(cfg.K));  // z_bar(0) = 0

    SpectralField v_bar = y;
    if (refine == 1) {
        // same exponential-Euler recurrence as the replay step
        for (std::uint64_t i = 0; i < n; ++i) {
            const double s0 = static_cast<double>(i) * cfg.dt;
            v_bar = integ.step_v_given_z(v_bar, rep.z_bar.back(), i);
            rep.z_bar.push_back(u_bar(s0 + cfg.dt) - v_bar);
        }
    } else {
        const double h = cfg.dt / refine;
        std::vector<double> dec(2 * static_cast<std::size_t>(cfg.K));
        std::vector<double> w1(dec.size()), w2(dec.size());
        for (int j = 1; j <= 2 * cfg.K; ++j) {
            const double ka = integ.kappa_a(j);
            dec[j - 1] = std::exp(-ka * h);
            w1[j - 1] = h * phi1(ka * h);
            w2[j - 1] = h * detail::phi2(ka * h);
        }
        SpectralField f0 = rhs(0.0);
        for (std::uint64_t i = 0; i < n; ++i) {
            for (int r = 0; r < refine; ++r) {
                const double s1 = static_cast<double>(i) * cfg.dt + (r + 1) * h;
                const SpectralField f1 = rhs(s1);
                for (int j = 1; j <= 2 * cfg.K; ++j) {
                    const double df = f1.coeff(j) - f0.coeff(j);
                    v_bar.coeff(j) = dec[j - 1] * v_bar.coeff(j) + w1[j - 1] * f0.coeff(j) +
                                     w2[j - 1] * df;
                }
                f0 = f1;
            }
            rep.z_bar.push_back(u_bar(static_cast<double>(i + 1) * cfg.dt) - v_bar);
        }
    }

    // verification replay: drive the shifted equation with z := z_bar
    SpectralField v = y;
    for (std::uint64_t i = 0; i < n; ++i) v = integ.step_v_given_z(v, rep.z_bar[i], i);
    rep.endpoint = v + rep.z_bar[n];
    rep.endpoint_error = (rep.endpoint - u_target).norm_h();
    const double scale = u_target.norm_h();
    rep.endpoint_rel_error = (scale > 0.0) ? rep.endpoint_error / scale : rep.endpoint_error;
    return rep;
}

}  // namespace sks

#pragma once

// Monte-Carlo gradient of the Markov semigroup: the directional derivative
// D P_t phi(y) . h is represented as
//   (1/t) E[ phi(u(t;y)) int_0^t <(GG*)^{-1/2} U(s), dw~(s)> ]
// with U the tangent process and w~ the rotated cylindrical process whose
// increments are (GG*)^{-1/2} G dw -- the same standard normals that drive
// the trajectory. For diagonal GG* the weight is a per-mode division by g_j.
//
// A common-random-number central finite difference of P_t phi is provided as
// the independent cross-check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "sks/dynamics.hpp"
#include "sks/field.hpp"

namespace sks {

struct MonteCarloEstimate {
    double value = 0.0;
    double stderr_estimate = 0.0;
    std::uint64_t n_samples = 0;
};

namespace detail {

inline MonteCarloEstimate reduce_samples(const std::vector<double>& samples) {
    MonteCarloEstimate est;
    est.n_samples = samples.size();
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    var /= static_cast<double>(samples.size() - 1);
    est.value = mean;
    est.stderr_estimate = std::sqrt(var / static_cast<double>(samples.size()));
    return est;
}

// Deterministic fan-out: samples are indexed by trajectory, merged by index.
inline std::vector<double> parallel_samples(std::uint64_t n,
                                            const std::function<double(std::uint64_t)>& sample,
                                            int threads) {
    std::vector<double> out(n);
    if (threads <= 1) {
        for (std::uint64_t i = 0; i < n; ++i) out[i] = sample(i);
        return out;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w]() {
            for (std::uint64_t i = static_cast<std::uint64_t>(w); i < n;
                 i += static_cast<std::uint64_t>(threads))
                out[i] = sample(i);
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace detail

// Bismut-Elworthy-Li estimate of D P_t phi(y) . h for the cutoff system
// (cutoff_R > 0 in the config) or the linear system (nonlinearity == false).
inline MonteCarloEstimate bel_gradient(
    const SpectralField& y, const SpectralField& h,
    const std::function<double(const SpectralField&)>& phi, const Integrator& integ,
    const CounterRng& rng, std::uint64_t n_samples, bool nonlinearity = true,
    std::uint64_t trajectory_base = 0, int threads = 1) {
    const SimConfig& cfg = integ.config();
    if (nonlinearity && !(cfg.cutoff_R > 0.0))
        throw std::invalid_argument("bel_gradient: the nonlinear estimator needs an active cutoff");
    if (!integ.noise().invertible_on_modes())
        throw std::invalid_argument("bel_gradient: GG* must be invertible on the retained modes");
    if (n_samples < 2) throw std::invalid_argument("bel_gradient: need at least 2 samples");

    const double t = cfg.T;
    const std::uint64_t n_steps = cfg.steps();
    const int m = cfg.noise_substeps;
    const double root_h = std::sqrt(cfg.dt / m);
    const double R = cfg.cutoff_R;

    const auto one_sample = [&](std::uint64_t s) {
        RngStream stream(rng, trajectory_base + s);
        SpectralField u = y;
        SpectralField U = h;
        double weight = 0.0;
        for (std::uint64_t i = 0; i < n_steps; ++i) {
            // weight increment: sum_k U_k(t_i)/g_k * dbeta~_k, where dbeta~_k
            // is the normalized driving increment of mode k
            for (int j = 1; j <= 2 * cfg.K; ++j) {
                const double g = integ.noise().amplitude(j);
                double xi = 0.0;
                for (int sub = 0; sub < m; ++sub) {
                    const std::uint64_t si =
                        i * static_cast<std::uint64_t>(m) + static_cast<std::uint64_t>(sub);
                    int lane = j;
                    double sign = 1.0;
                    if (integ.noise().shift_iso()) {
                        lane = (j % 2 == 1) ? j + 1 : j - 1;
                        sign = (j % 2 == 0) ? -1.0 : 1.0;
                    }
                    xi += sign * stream.normal(si, static_cast<std::uint32_t>(lane));
                }
                weight += (U.coeff(j) / g) * root_h * xi;
            }
            if (nonlinearity) {
                const SpectralField u_next = integ.cutoff_step(u, stream, i, R);
                U = integ.tangent_step(U, u, R, i);
                u = u_next;
            } else {
                u = integ.step_u(u, stream, i, 0.0);
                for (int j = 1; j <= 2 * cfg.K; ++j)
                    U.coeff(j) *= std::exp(-integ.kappa(j) * cfg.dt);
            }
        }
        return phi(u) * weight / t;
    };

    return detail::reduce_samples(detail::parallel_samples(n_samples, one_sample, threads));
}

// Common-random-number central finite difference
// [phi(u(t; y+eps h)) - phi(u(t; y-eps h))] / (2 eps), averaged over samples.
inline MonteCarloEstimate finite_difference_gradient(
    const SpectralField& y, const SpectralField& h,
    const std::function<double(const SpectralField&)>& phi, const Integrator& integ,
    const CounterRng& rng, std::uint64_t n_samples, double eps, bool nonlinearity = true,
    std::uint64_t trajectory_base = 0, int threads = 1) {
    const SimConfig& cfg = integ.config();
    const std::uint64_t n_steps = cfg.steps();
    const double R = cfg.cutoff_R;

    const auto one_sample = [&](std::uint64_t s) {
        RngStream stream(rng, trajectory_base + s);
        SpectralField up = y + eps * SpectralField(h);
        SpectralField um = y - eps * SpectralField(h);
        for (std::uint64_t i = 0; i < n_steps; ++i) {
            if (nonlinearity) {
                up = integ.cutoff_step(up, stream, i, R);
                um = integ.cutoff_step(um, stream, i, R);
            } else {
                up = integ.step_u(up, stream, i, 0.0);
                um = integ.step_u(um, stream, i, 0.0);
            }
        }
        return (phi(up) - phi(um)) / (2.0 * eps);
    };

    return detail::reduce_samples(detail::parallel_samples(n_samples, one_sample, threads));
}

}  // namespace sks

#pragma once

// Exact simulation and closed-form moments of the linear stochastic equation
// for z_a: per mode, dz_j + mu_j z_j dt = g_j dbeta with
// mu_j = nu lambda_j^2 - lambda_j + a > 0. The transition law is Gaussian
// with mean e^{-mu dt} z_j and variance g_j^2 (1 - e^{-2 mu dt}) / (2 mu),
// so the chain sampled on the time grid has exactly the law of z_a.

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sks/field.hpp"
#include "sks/noise.hpp"
#include "sks/rng.hpp"

namespace sks {

// (1 - e^{-y}) / y, continuous through y = 0. expm1 keeps it cancellation-free.
inline double phi1(double y) {
    if (y == 0.0) return 1.0;
    return -std::expm1(-y) / y;
}

struct OUModeParams {
    std::vector<double> mu;  // decay rates, flat index, all > 0
    std::vector<double> g;   // noise amplitudes, flat index

    OUModeParams() = default;
    OUModeParams(const DomainSpec& spec, const WavenumberTable& tab, const NoiseOperator& noise) {
        mu.resize(tab.lambdas.size());
        g.resize(tab.lambdas.size());
        for (std::size_t i = 0; i < tab.lambdas.size(); ++i) {
            const double lam = tab.lambdas[i];
            mu[i] = spec.nu * lam * lam - lam + spec.shift_a;
            g[i] = noise.amplitude(static_cast<int>(i) + 1);
        }
        for (double m : mu)
            if (!(m > 0.0))
                throw std::invalid_argument("OUModeParams: nu*lambda^2 - lambda + a must be > 0 "
                                            "(need a > 1/(4 nu))");
    }

    int pairs() const { return static_cast<int>(mu.size() / 2); }
};

inline double ou_stationary_variance(int j, const OUModeParams& p) {
    const double m = p.mu.at(static_cast<std::size_t>(j - 1));
    const double g = p.g.at(static_cast<std::size_t>(j - 1));
    if (!(m > 0.0)) throw std::invalid_argument("ou_stationary_variance: mu must be > 0");
    return g * g / (2.0 * m);
}

inline double ou_stationary_moment(const OUModeParams& p) {
    double s = 0.0;
    for (int j = 1; j <= 2 * p.pairs(); ++j) s += ou_stationary_variance(j, p);
    return s;
}

// One exact transition step. shift_iso mirrors the noise operator: the
// normal drawn for lane j drives the partner mode, with the sign of L.
inline SpectralField ou_step_exact(const SpectralField& z, double dt, const OUModeParams& p,
                                   const RngStream& stream, std::uint64_t step, bool shift_iso = false,
                                   std::uint32_t draw = 0) {
    if (!(dt > 0.0)) throw std::invalid_argument("ou_step_exact: dt must be > 0");
    if (2 * z.pairs() > static_cast<int>(p.mu.size()))
        throw std::invalid_argument("ou_step_exact: resolution exceeds parameters");
    SpectralField out(z.pairs());
    for (int j = 1; j <= z.size(); ++j) {
        const double mu = p.mu[static_cast<std::size_t>(j - 1)];
        const double g = p.g[static_cast<std::size_t>(j - 1)];
        const double decay = std::exp(-mu * dt);
        const double sd = g * std::sqrt(dt * phi1(2.0 * mu * dt));
        // partner lane under L: 2k-1 <-> 2k, with sign - on the sine source
        int lane = j;
        double sign = 1.0;
        if (shift_iso) {
            lane = (j % 2 == 1) ? j + 1 : j - 1;
            sign = (j % 2 == 0) ? -1.0 : 1.0;
        }
        out.coeff(j) = decay * z.coeff(j) +
                       sign * sd * stream.normal(step, static_cast<std::uint32_t>(lane), draw);
    }
    return out;
}

// Closed-form mean field and D(A^alpha) second moment of the deviation at
// time t from initial data zeta.
inline std::pair<SpectralField, double> ou_moments(const SpectralField& zeta, double t,
                                                   const OUModeParams& p, double weight_alpha,
                                                   const WavenumberTable& tab) {
    if (t < 0.0) throw std::invalid_argument("ou_moments: t must be >= 0");
    SpectralField mean(zeta.pairs());
    double second = 0.0;
    for (int j = 1; j <= zeta.size(); ++j) {
        const double mu = p.mu[static_cast<std::size_t>(j - 1)];
        const double g = p.g[static_cast<std::size_t>(j - 1)];
        const double lam = tab.lambdas[static_cast<std::size_t>(j - 1)];
        mean.coeff(j) = std::exp(-mu * t) * zeta.coeff(j);
        const double w = (weight_alpha == 0.0) ? 1.0 : std::pow(lam, 2.0 * weight_alpha);
        second += w * g * g * t * phi1(2.0 * mu * t);
    }
    return {mean, second};
}

}  // namespace sks

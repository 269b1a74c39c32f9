#pragma once

// Time integration of the stochastic Kuramoto-Sivashinsky dynamics.
//
// Scheme: exponential Euler. The stiff linear part nu A^2 - A (plus the
// stabilization shift a for the v/z split) is treated exactly per mode, the
// quadratic term enters through the integrating factor
// Phi(dt) = dt phi1(kappa dt), and the noise enters as the exact per-mode
// Gaussian law of the stochastic convolution over the step.
//
// Noise increments are built from `noise_substeps` sub-increments on a fixed
// micro grid, so runs at dt and dt/2 can share one Brownian path exactly
// (conv increment over a step = decay-weighted sum of sub-increments).

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sks/field.hpp"
#include "sks/noise.hpp"
#include "sks/ou.hpp"
#include "sks/rng.hpp"
#include "sks/spectral.hpp"
#include "sks/transform.hpp"

namespace sks {

enum class Scheme { direct_u, v_plus_z };

struct SimConfig {
    int K = 64;
    double dt = 1e-3;
    double T = 1.0;
    Scheme scheme = Scheme::direct_u;
    double cutoff_R = 0.0;  // <= 0: no cutoff
    std::uint64_t seed = 0;
    int record_stride = 1;
    int noise_substeps = 1;

    void validate() const {
        if (K < 1) throw std::invalid_argument("SimConfig: K must be >= 1");
        if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be > 0");
        if (!(T >= dt)) throw std::invalid_argument("SimConfig: T must be >= dt");
        if (record_stride < 1) throw std::invalid_argument("SimConfig: record_stride must be >= 1");
        if (noise_substeps < 1) throw std::invalid_argument("SimConfig: noise_substeps must be >= 1");
    }

    std::uint64_t steps() const { return static_cast<std::uint64_t>(std::llround(T / dt)); }
};

struct BlowUpError : std::runtime_error {
    BlowUpError(std::uint64_t step_index, double time)
        : std::runtime_error("trajectory blow-up at step " + std::to_string(step_index) +
                             " (t = " + std::to_string(time) + ")"),
          step(step_index),
          t(time) {}
    std::uint64_t step;
    double t;
};

// C^1 cutoff: 1 on (-inf, R], 0 on [R+1, inf), cubic smoothstep in between.
inline double theta_R(double s, double R) {
    if (s <= R) return 1.0;
    if (s >= R + 1.0) return 0.0;
    const double x = s - R;
    return 1.0 - x * x * (3.0 - 2.0 * x);
}

inline double theta_R_prime(double s, double R) {
    if (s <= R || s >= R + 1.0) return 0.0;
    const double x = s - R;
    return -6.0 * x * (1.0 - x);
}

class Integrator {
  public:
    Integrator(const DomainSpec& spec, const NoiseOperator& noise, const SimConfig& config)
        : spec_(spec), noise_(noise), config_(config), tab_(config.K, spec.period_L) {
        config_.validate();
        if (noise_.pairs() < config_.K)
            throw std::invalid_argument("Integrator: noise operator resolution below K");
        const int n = 2 * config_.K;
        kappa_.resize(n);
        kappa_a_.resize(n);
        for (int i = 0; i < n; ++i) {
            const double lam = tab_.lambdas[static_cast<std::size_t>(i)];
            kappa_[i] = spec_.nu * lam * lam - lam;
            kappa_a_[i] = kappa_[i] + spec_.shift_a;
        }
        const double h = config_.dt / config_.noise_substeps;
        decay_.resize(n);
        phi_.resize(n);
        decay_a_.resize(n);
        phi_a_.resize(n);
        sub_decay_.resize(n);
        sub_sd_.resize(n);
        sub_decay_a_.resize(n);
        sub_sd_a_.resize(n);
        for (int i = 0; i < n; ++i) {
            decay_[i] = std::exp(-kappa_[i] * config_.dt);
            phi_[i] = config_.dt * phi1(kappa_[i] * config_.dt);
            decay_a_[i] = std::exp(-kappa_a_[i] * config_.dt);
            phi_a_[i] = config_.dt * phi1(kappa_a_[i] * config_.dt);
            const double g = noise_.amplitude(i + 1);
            sub_decay_[i] = std::exp(-kappa_[i] * h);
            sub_sd_[i] = g * std::sqrt(h * phi1(2.0 * kappa_[i] * h));
            sub_decay_a_[i] = std::exp(-kappa_a_[i] * h);
            sub_sd_a_[i] = g * std::sqrt(h * phi1(2.0 * kappa_a_[i] * h));
        }
    }

    const SimConfig& config() const { return config_; }
    const WavenumberTable& table() const { return tab_; }
    const DomainSpec& domain() const { return spec_; }
    const NoiseOperator& noise() const { return noise_; }

    // Exact stochastic convolution increment int e^{-kappa (dt - s)} G dw over
    // step `step`, assembled from the substep micro grid. `shifted` selects
    // the kappa + a rates (for the z dynamics).
    SpectralField conv_increment(const RngStream& stream, std::uint64_t step, bool shifted) const {
        SpectralField eta(config_.K);
        const auto& dec = shifted ? sub_decay_a_ : sub_decay_;
        const auto& sd = shifted ? sub_sd_a_ : sub_sd_;
        const int m = config_.noise_substeps;
        for (int i = 0; i < m; ++i) {
            const std::uint64_t sub = step * static_cast<std::uint64_t>(m) + static_cast<std::uint64_t>(i);
            for (int j = 1; j <= 2 * config_.K; ++j) {
                int lane = j;
                double sign = 1.0;
                if (noise_.shift_iso()) {
                    lane = (j % 2 == 1) ? j + 1 : j - 1;
                    sign = (j % 2 == 0) ? -1.0 : 1.0;
                }
                const std::size_t idx = static_cast<std::size_t>(j - 1);
                eta.coeff(j) = dec[idx] * eta.coeff(j) +
                               sign * sd[idx] * stream.normal(sub, static_cast<std::uint32_t>(lane));
            }
        }
        return eta;
    }

    // Raw increment G (w(t+dt) - w(t)) on the same Brownian path (for the
    // weak-form bookkeeping; O(dt^{3/2}) from the convolution increment).
    SpectralField raw_increment(const RngStream& stream, std::uint64_t step) const {
        SpectralField dw(config_.K);
        const int m = config_.noise_substeps;
        const double root_h = std::sqrt(config_.dt / m);
        for (int i = 0; i < m; ++i) {
            const std::uint64_t sub = step * static_cast<std::uint64_t>(m) + static_cast<std::uint64_t>(i);
            for (int j = 1; j <= 2 * config_.K; ++j) {
                int lane = j;
                double sign = 1.0;
                if (noise_.shift_iso()) {
                    lane = (j % 2 == 1) ? j + 1 : j - 1;
                    sign = (j % 2 == 0) ? -1.0 : 1.0;
                }
                dw.coeff(j) += sign * noise_.amplitude(j) * root_h *
                               stream.normal(sub, static_cast<std::uint32_t>(lane));
            }
        }
        return dw;
    }

    // One exponential-Euler step of the full equation
    // du + [nu A^2 u - A u + theta * B(u)] dt = G dw.
    // `theta_weight` is 1 for the plain dynamics, theta_R(|u|^2) for the
    // cutoff system, 0 to suppress the nonlinearity.
    SpectralField step_u(const SpectralField& u, const RngStream& stream, std::uint64_t step,
                         double theta_weight = 1.0, bool with_noise = true) const {
        SpectralField out(config_.K);
        SpectralField bu(config_.K);
        if (theta_weight != 0.0) bu = bilinear_B(u, tab_, spec_.period_L);
        for (int j = 1; j <= 2 * config_.K; ++j) {
            const std::size_t i = static_cast<std::size_t>(j - 1);
            out.coeff(j) = decay_[i] * u.coeff(j) - theta_weight * phi_[i] * bu.coeff(j);
        }
        if (with_noise) out += conv_increment(stream, step, false);
        check_finite(out, step);
        return out;
    }

    SpectralField cutoff_step(const SpectralField& u, const RngStream& stream, std::uint64_t step,
                              double R) const {
        if (R < 1.0) throw std::invalid_argument("cutoff_step: R must be >= 1");
        const double h2 = u.norm_h() * u.norm_h();
        return step_u(u, stream, step, theta_R(h2, R), true);
    }

    // One step of the v/z split: z by the exact OU transition, v by
    // exponential Euler on dv/dt + (nu A^2 - A + a) v = a u - B(u) with
    // u = v + z (the a v term moved to the stabilized left side).
    void step_v_plus_z(SpectralField& v, SpectralField& z, const RngStream& stream,
                       std::uint64_t step) const {
        const SpectralField u = v + z;
        const SpectralField bu = bilinear_B(u, tab_, spec_.period_L);
        for (int j = 1; j <= 2 * config_.K; ++j) {
            const std::size_t i = static_cast<std::size_t>(j - 1);
            v.coeff(j) = decay_a_[i] * v.coeff(j) +
                         phi_a_[i] * (spec_.shift_a * u.coeff(j) - bu.coeff(j));
        }
        // z: exact transition mean plus the exact convolution increment
        for (int j = 1; j <= 2 * config_.K; ++j)
            z.coeff(j) = decay_a_[static_cast<std::size_t>(j - 1)] * z.coeff(j);
        z += conv_increment(stream, step, true);
        check_finite(v, step);
        check_finite(z, step);
    }

    // Deterministic v step of the shifted equation driven by a prescribed
    // z path value (control replay / synthesis share this discretization).
    SpectralField step_v_given_z(const SpectralField& v, const SpectralField& z,
                                 std::uint64_t step) const {
        const SpectralField u = v + z;
        const SpectralField bu = bilinear_B(u, tab_, spec_.period_L);
        SpectralField out(config_.K);
        for (int j = 1; j <= 2 * config_.K; ++j) {
            const std::size_t i = static_cast<std::size_t>(j - 1);
            out.coeff(j) = decay_a_[i] * v.coeff(j) +
                           phi_a_[i] * (spec_.shift_a * u.coeff(j) - bu.coeff(j));
        }
        check_finite(out, step);
        return out;
    }

    // Tangent (variational) step along a driving state u of the cutoff
    // system; R <= 0 means no cutoff (theta = 1, theta' = 0). Additive noise
    // has zero derivative, so the tangent equation is noise-free.
    SpectralField tangent_step(const SpectralField& U, const SpectralField& u, double R,
                               std::uint64_t step) const {
        const double h2 = u.norm_h() * u.norm_h();
        const double th = (R > 0.0) ? theta_R(h2, R) : 1.0;
        const double thp = (R > 0.0) ? theta_R_prime(h2, R) : 0.0;
        SpectralField drift(config_.K);
        if (th != 0.0) {
            drift = bilinear_B(u, U, tab_, spec_.period_L) + bilinear_B(U, u, tab_, spec_.period_L);
            drift *= th;
        }
        if (thp != 0.0) {
            SpectralField bu = bilinear_B(u, tab_, spec_.period_L);
            bu *= 2.0 * thp * dot(u, U);
            drift += bu;
        }
        SpectralField out(config_.K);
        for (int j = 1; j <= 2 * config_.K; ++j) {
            const std::size_t i = static_cast<std::size_t>(j - 1);
            out.coeff(j) = decay_[i] * U.coeff(j) - phi_[i] * drift.coeff(j);
        }
        check_finite(out, step);
        return out;
    }

    double kappa(int j) const { return kappa_.at(static_cast<std::size_t>(j - 1)); }
    double kappa_a(int j) const { return kappa_a_.at(static_cast<std::size_t>(j - 1)); }

  private:
    void check_finite(const SpectralField& f, std::uint64_t step) const {
        if (!f.finite()) throw BlowUpError(step, static_cast<double>(step) * config_.dt);
    }

    DomainSpec spec_;
    NoiseOperator noise_;
    SimConfig config_;
    WavenumberTable tab_;
    std::vector<double> kappa_, kappa_a_;
    std::vector<double> decay_, phi_, decay_a_, phi_a_;
    std::vector<double> sub_decay_, sub_sd_, sub_decay_a_, sub_sd_a_;
};

// Soft monitor for the discrete energy inequality along v/z trajectories:
// rate of |v|^2 plus nu |Av|^2 dt against C1 (1+|z|^2)|v|^2 + a^2 |z|^2 + C1 |z|^4.
struct EnergyMonitor {
    double C1 = 50.0;
    std::uint64_t checks = 0;
    std::uint64_t violations = 0;
    std::uint64_t first_violation_step = 0;

    void observe(const Integrator& integ, const SpectralField& v_before, const SpectralField& v_after,
                 const SpectralField& z_before, std::uint64_t step) {
        const double dt = integ.config().dt;
        const double a = integ.domain().shift_a;
        const double v0 = v_before.norm_h(), v1 = v_after.norm_h(), zn = z_before.norm_h();
        const double av = sobolev_norm(v_after, 1.0, integ.table());
        const double lhs = (v1 * v1 - v0 * v0) / dt + integ.domain().nu * av * av;
        const double rhs = C1 * (1.0 + zn * zn) * v0 * v0 + a * a * zn * zn + C1 * zn * zn * zn * zn;
        ++checks;
        if (lhs > rhs) {
            if (violations == 0) first_violation_step = step;
            ++violations;
        }
    }
};

// Residual of the weak-form identity for test mode h = e_j at the end of a
// recorded trajectory, using the same left-endpoint quadrature as the
// scheme. states[i] is u(i dt), i = 0..n; raw_noise[i] is G dw over step i.
inline double weak_form_residual(const std::vector<SpectralField>& states,
                                 const std::vector<SpectralField>& raw_noise, int j,
                                 const Integrator& integ) {
    if (states.empty()) throw std::invalid_argument("weak_form_residual: empty trajectory");
    const std::size_t n = states.size() - 1;
    if (raw_noise.size() < n) throw std::invalid_argument("weak_form_residual: missing noise record");
    const double dt = integ.config().dt;
    const SpectralField h = basis_field(integ.config().K, j);
    double lin = 0.0, nonlin = 0.0, gw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        lin += dt * integ.kappa(j) * states[i].coeff(j);
        nonlin += dt * trilinear_b(states[i], h, states[i], integ.table(), integ.domain().period_L);
        gw += raw_noise[i].coeff(j);
    }
    return states[n].coeff(j) + lin - 0.5 * nonlin - states[0].coeff(j) - gw;
}

struct DependenceReport {
    double sup_diff = 0.0;
    double final_diff = 0.0;
    double log_slope = 0.0;  // fitted exponent of the difference envelope
    std::vector<double> times;
    std::vector<double> diffs;
};

// Two trajectories with the same config and the same noise stream; reports
// the growth of their pathwise difference.
inline DependenceReport continuous_dependence_run(const SpectralField& y1, const SpectralField& y2,
                                                  const Integrator& integ, const RngStream& stream) {
    SpectralField u1 = y1, u2 = y2;
    DependenceReport rep;
    const std::uint64_t n = integ.config().steps();
    const int stride = integ.config().record_stride;
    for (std::uint64_t i = 0; i < n; ++i) {
        u1 = integ.step_u(u1, stream, i);
        u2 = integ.step_u(u2, stream, i);
        const double d = (u1 - u2).norm_h();
        rep.sup_diff = std::max(rep.sup_diff, d);
        if ((i + 1) % static_cast<std::uint64_t>(stride) == 0 || i + 1 == n) {
            rep.times.push_back(static_cast<double>(i + 1) * integ.config().dt);
            rep.diffs.push_back(d);
        }
    }
    rep.final_diff = rep.diffs.empty() ? 0.0 : rep.diffs.back();
    // least-squares slope of log(diff) vs t over the records with diff > 0
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < rep.diffs.size(); ++i) {
        if (rep.diffs[i] <= 0.0) continue;
        const double x = rep.times[i], yv = std::log(rep.diffs[i]);
        sx += x; sy += yv; sxx += x * x; sxy += x * yv;
        ++m;
    }
    if (m >= 2 && sxx * m - sx * sx > 0.0)
        rep.log_slope = (sxy * m - sx * sy) / (sxx * m - sx * sx);
    return rep;
}

}  // namespace sks

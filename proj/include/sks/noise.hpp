#pragma once

// Covariance operators G = L A^gamma for the additive noise, admissibility
// rules for the Hilbert-Schmidt conditions, and generation of spectral
// Wiener increments. L is either the identity or the pairwise shift
// isomorphism L e_j = (-1)^j e_{j + (-1)^{j+1}} (sine/cosine partner swap
// with sign), which leaves G G* = diag(g_j^2) unchanged.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sks/field.hpp"
#include "sks/rng.hpp"

namespace sks {

// Sum_j lambda_j^{2(gamma-1)} < infinity iff 4(gamma-1) < -1 iff gamma < 3/4,
// since lambda_j grows like j^2.
inline bool admissible_ipotG(double gamma) { return gamma < 0.75; }

// Sum_j lambda_j^{2(alpha+gamma-1)} < infinity iff alpha < 3/4 - gamma.
inline bool admissible_ipoalfa(double gamma, double alpha) { return alpha < 0.75 - gamma; }

// Regularity window for initial data, depending on gamma:
//   gamma >= -1        -> state space H (no extra window)
//   -2 <= gamma < -1   -> 1 <= alpha < 3/4 - gamma
//   gamma < -2         -> -1-gamma <= alpha < 3/4 - gamma
struct RegularityWindow {
    bool applies = false;  // false when the H-theory already covers gamma
    double alpha_min = 0.0;
    double alpha_max = 0.0;  // exclusive
};

inline RegularityWindow regularity_window(double gamma) {
    RegularityWindow w;
    if (gamma >= -1.0) return w;
    w.applies = true;
    w.alpha_min = (gamma >= -2.0) ? 1.0 : -1.0 - gamma;
    w.alpha_max = 0.75 - gamma;
    return w;
}

class NoiseOperator {
  public:
    // Power-law amplitudes g_j = lambda_j^gamma.
    static NoiseOperator power_law(double gamma, const WavenumberTable& tab, bool shift_iso) {
        NoiseOperator g;
        g.gamma_ = gamma;
        g.shift_iso_ = shift_iso;
        g.power_law_ = true;
        g.amplitude_.resize(tab.lambdas.size());
        for (std::size_t j = 0; j < tab.lambdas.size(); ++j)
            g.amplitude_[j] = std::pow(tab.lambdas[j], gamma);
        return g;
    }

    // Amplitude profile g_j = lambda_j^{1/2} (1 + lambda_j)^{1/2}; fails the
    // Hilbert-Schmidt condition (every weighted term is >= 1).
    static NoiseOperator uso_profile(const WavenumberTable& tab, bool shift_iso) {
        NoiseOperator g;
        g.gamma_ = 0.5;
        g.shift_iso_ = shift_iso;
        g.power_law_ = false;
        g.amplitude_.resize(tab.lambdas.size());
        for (std::size_t j = 0; j < tab.lambdas.size(); ++j)
            g.amplitude_[j] = std::sqrt(tab.lambdas[j] * (1.0 + tab.lambdas[j]));
        return g;
    }

    static NoiseOperator custom(std::vector<double> amplitudes, bool shift_iso) {
        if (amplitudes.empty() || amplitudes.size() % 2 != 0)
            throw std::invalid_argument("NoiseOperator: amplitude vector must have even length");
        NoiseOperator g;
        g.shift_iso_ = shift_iso;
        g.power_law_ = false;
        g.amplitude_ = std::move(amplitudes);
        return g;
    }

    static NoiseOperator zero(int K) { return custom(std::vector<double>(2 * static_cast<std::size_t>(K), 0.0), false); }

    double gamma() const { return gamma_; }
    bool shift_iso() const { return shift_iso_; }
    bool is_power_law() const { return power_law_; }
    int pairs() const { return static_cast<int>(amplitude_.size() / 2); }
    double amplitude(int j) const { return amplitude_.at(static_cast<std::size_t>(j - 1)); }
    const std::vector<double>& amplitudes() const { return amplitude_; }

    bool admissible() const {
        if (power_law_) return admissible_ipotG(gamma_);
        // Non-power-law profiles are classified by partial-sum growth: decide
        // divergent when truncated tail terms fail to decay summably.
        return false;
    }

    bool invertible_on_modes() const {
        for (double g : amplitude_)
            if (g == 0.0) return false;
        return true;
    }

    // Truncated Hilbert-Schmidt weight sum_{j <= 2 n_pairs} lambda_j^{2(alpha-1)} g_j^2.
    double hs_partial_sum(double weight_alpha, int n_pairs, const WavenumberTable& tab) const {
        if (n_pairs < 1) throw std::invalid_argument("hs_partial_sum: n_pairs must be >= 1");
        if (2 * n_pairs > static_cast<int>(amplitude_.size()))
            throw std::invalid_argument("hs_partial_sum: n_pairs exceeds resolution");
        double s = 0.0;
        for (int j = 1; j <= 2 * n_pairs; ++j) {
            const double lam = tab.lambdas.at(static_cast<std::size_t>(j - 1));
            s += std::pow(lam, 2.0 * (weight_alpha - 1.0)) * amplitude(j) * amplitude(j);
        }
        return s;
    }

    // The shift isomorphism as an operator on fields: an H-isometry.
    SpectralField apply_shift_iso(const SpectralField& u) const {
        SpectralField out(u.pairs());
        for (int k = 1; k <= u.pairs(); ++k) {
            // L e_{2k-1} = -e_{2k}, L e_{2k} = +e_{2k-1}
            out.cosine(k) = -u.sine(k);
            out.sine(k) = u.cosine(k);
        }
        return out;
    }

    // G dw over a step of length dt: amplify iid N(0, dt) mode increments by
    // g_j, then apply L when the shift isomorphism is selected.
    SpectralField sample_increment(double dt, const RngStream& stream, std::uint64_t step, int K,
                                   std::uint32_t draw = 0) const {
        if (!(dt > 0.0)) throw std::invalid_argument("sample_increment: dt must be > 0");
        if (K > pairs()) throw std::invalid_argument("sample_increment: resolution exceeds operator");
        SpectralField amplified(K);
        const double root_dt = std::sqrt(dt);
        for (int j = 1; j <= 2 * K; ++j)
            amplified.coeff(j) = amplitude(j) * root_dt *
                                 stream.normal(step, static_cast<std::uint32_t>(j), draw);
        return shift_iso_ ? apply_shift_iso(amplified) : amplified;
    }

  private:
    NoiseOperator() = default;

    double gamma_ = 0.0;
    bool shift_iso_ = false;
    bool power_law_ = false;
    std::vector<double> amplitude_;
};

}  // namespace sks

#pragma once

// Diagonal spectral operators: powers of A, Sobolev norms on the D(A^alpha)
// scale, semigroup factors and the x-derivative.

#include <cmath>
#include <stdexcept>

#include "sks/field.hpp"

namespace sks {

// A^alpha u = sum_j lambda_j^alpha u_j e_j.
inline SpectralField apply_power(const SpectralField& u, double alpha, const WavenumberTable& tab) {
    if (tab.pairs() != u.pairs()) throw std::invalid_argument("apply_power: table resolution mismatch");
    if (alpha == 0.0) return u;
    SpectralField out = u;
    for (int i = 0; i < u.size(); ++i)
        out.data()[i] = std::pow(tab.lambdas[static_cast<std::size_t>(i)], alpha) * u.data()[i];
    return out;
}

// |A^alpha u| = sqrt(sum_j lambda_j^{2 alpha} u_j^2); alpha = 0 is the H-norm.
inline double sobolev_norm(const SpectralField& u, double alpha, const WavenumberTable& tab) {
    if (tab.pairs() != u.pairs()) throw std::invalid_argument("sobolev_norm: table resolution mismatch");
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        const double w = (alpha == 0.0) ? 1.0 : std::pow(tab.lambdas[static_cast<std::size_t>(i)], 2.0 * alpha);
        s += w * u.data()[i] * u.data()[i];
    }
    return std::sqrt(s);
}

// d/dx on the basis: sine_k -> +sqrt(lambda_k) cosine_k, cosine_k -> -sqrt(lambda_k) sine_k.
inline SpectralField derivative(const SpectralField& u, const WavenumberTable& tab) {
    if (tab.pairs() != u.pairs()) throw std::invalid_argument("derivative: table resolution mismatch");
    SpectralField out(u.pairs());
    for (int k = 1; k <= u.pairs(); ++k) {
        const double w = tab.sqrt_lambdas[2 * static_cast<std::size_t>(k) - 1];
        out.cosine(k) = w * u.sine(k);
        out.sine(k) = -w * u.cosine(k);
    }
    return out;
}

// exp(-(nu*lambda^2 - lambda [+ a]) t) for one eigenvalue. Without the shift
// the factor exceeds 1 on linearly unstable long modes (nu*lambda < 1).
inline double semigroup_factor_lambda(double lambda, double t, const DomainSpec& spec, bool include_shift) {
    if (t < 0.0) throw std::invalid_argument("semigroup_factor: t must be >= 0");
    const double mu = spec.nu * lambda * lambda - lambda + (include_shift ? spec.shift_a : 0.0);
    return std::exp(-mu * t);
}

inline double semigroup_factor(int j, double t, const DomainSpec& spec, const WavenumberTable& tab,
                               bool include_shift) {
    return semigroup_factor_lambda(tab.lambdas.at(static_cast<std::size_t>(j - 1)), t, spec, include_shift);
}

}  // namespace sks

#pragma once

// Zero-mean periodic fields on [-L/2, L/2] as real spectral coefficient
// vectors over the relabelled sine/cosine basis:
//   e_{2k-1}(x) = sqrt(2/L) sin(2*pi*k*x/L),
//   e_{2k}(x)   = sqrt(2/L) cos(2*pi*k*x/L),   k = 1, 2, ...
// Both members of pair k share the eigenvalue lambda = 4*pi^2*k^2/L^2 of
// A = -d^2/dx^2. The constant mode is excluded, so every represented
// function has zero spatial mean.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace sks {

struct DomainSpec {
    double period_L = 2.0 * std::numbers::pi;
    double nu = 1.0;
    double shift_a = 0.5;  // stabilization shift; OU dynamics need a > 1/(4 nu)

    DomainSpec() = default;
    DomainSpec(double L, double nu_, double a) : period_L(L), nu(nu_), shift_a(a) {
        if (!(period_L > 0.0)) throw std::invalid_argument("DomainSpec: period_L must be > 0");
        if (!(nu > 0.0)) throw std::invalid_argument("DomainSpec: nu must be > 0");
        if (shift_a < 0.0) throw std::invalid_argument("DomainSpec: shift_a must be >= 0");
    }

    // a > 1/(4 nu) makes nu*l^2 - l + a > 0 for every real l > 0.
    bool shift_stabilizes() const { return shift_a > 1.0 / (4.0 * nu); }
};

// lambda_k = 4 pi^2 k^2 / L^2 for wavenumber index k >= 1.
inline double eigenvalue(int k, double L) {
    if (k < 1) throw std::invalid_argument("eigenvalue: wavenumber index must be >= 1");
    if (!(L > 0.0)) throw std::invalid_argument("eigenvalue: period must be > 0");
    const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / L;
    return w * w;
}

// Eigenvalues on the relabelled (flat) index: lambda_{2k-1} = lambda_{2k}.
struct WavenumberTable {
    std::vector<double> lambdas;       // length 2K
    std::vector<double> sqrt_lambdas;  // differentiation factors 2 pi k / L

    WavenumberTable() = default;
    WavenumberTable(int K, double L) {
        if (K < 1) throw std::invalid_argument("WavenumberTable: K must be >= 1");
        lambdas.resize(2 * static_cast<std::size_t>(K));
        sqrt_lambdas.resize(lambdas.size());
        for (int k = 1; k <= K; ++k) {
            const double lam = eigenvalue(k, L);
            lambdas[2 * k - 2] = lam;
            lambdas[2 * k - 1] = lam;
            const double sq = std::sqrt(lam);
            sqrt_lambdas[2 * k - 2] = sq;
            sqrt_lambdas[2 * k - 1] = sq;
        }
    }

    int pairs() const { return static_cast<int>(lambdas.size() / 2); }
};

class SpectralField {
  public:
    SpectralField() = default;
    explicit SpectralField(int K) : coeffs_(2 * check_pairs(K), 0.0) {}
    SpectralField(int K, std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.size() != 2 * static_cast<std::size_t>(check_pairs(K)))
            throw std::invalid_argument("SpectralField: coefficient vector must have length 2K");
    }

    int pairs() const { return static_cast<int>(coeffs_.size() / 2); }
    int size() const { return static_cast<int>(coeffs_.size()); }

    // Flat 1-based access matching the relabelled basis index j.
    double coeff(int j) const { return coeffs_.at(static_cast<std::size_t>(j - 1)); }
    double& coeff(int j) { return coeffs_.at(static_cast<std::size_t>(j - 1)); }

    // Pair access: sine/cosine coefficient of wavenumber k.
    double sine(int k) const { return coeffs_[2 * static_cast<std::size_t>(k) - 2]; }
    double& sine(int k) { return coeffs_[2 * static_cast<std::size_t>(k) - 2]; }
    double cosine(int k) const { return coeffs_[2 * static_cast<std::size_t>(k) - 1]; }
    double& cosine(int k) { return coeffs_[2 * static_cast<std::size_t>(k) - 1]; }

    const std::vector<double>& data() const { return coeffs_; }
    std::vector<double>& data() { return coeffs_; }

    bool finite() const {
        for (double c : coeffs_)
            if (!std::isfinite(c)) return false;
        return true;
    }

    double norm_h() const {
        double s = 0.0;
        for (double c : coeffs_) s += c * c;
        return std::sqrt(s);
    }

    // Physical-space evaluation by direct basis summation (for oracles and
    // point observables; the production nonlinearity uses the FFT path).
    double evaluate(double x, double L) const {
        const double root = std::sqrt(2.0 / L);
        double s = 0.0;
        for (int k = 1; k <= pairs(); ++k) {
            const double th = 2.0 * std::numbers::pi * k * x / L;
            s += root * (sine(k) * std::sin(th) + cosine(k) * std::cos(th));
        }
        return s;
    }

    SpectralField& operator+=(const SpectralField& o) {
        require_same(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        require_same(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        return *this;
    }
    SpectralField& operator*=(double s) {
        for (double& c : coeffs_) c *= s;
        return *this;
    }

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

    void require_same(const SpectralField& o) const {
        if (o.coeffs_.size() != coeffs_.size())
            throw std::invalid_argument("SpectralField: resolution mismatch (" +
                                        std::to_string(pairs()) + " vs " +
                                        std::to_string(o.pairs()) + " pairs)");
    }

  private:
    static int check_pairs(int K) {
        if (K < 1) throw std::invalid_argument("SpectralField: pair count must be >= 1");
        return K;
    }

    std::vector<double> coeffs_;
};

inline double dot(const SpectralField& a, const SpectralField& b) {
    a.require_same(b);
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
    return s;
}

// Unit coefficient on flat basis index j.
inline SpectralField basis_field(int K, int j) {
    SpectralField f(K);
    f.coeff(j) = 1.0;
    return f;
}

// Projection onto the first K_out pairs (Galerkin truncation Pi_n, n = 2 K_out).
inline SpectralField project(const SpectralField& u, int K_out) {
    if (K_out > u.pairs()) throw std::invalid_argument("project: cannot extend resolution");
    SpectralField out(K_out);
    for (int i = 0; i < out.size(); ++i) out.data()[i] = u.data()[i];
    return out;
}

// Embedding into K_out >= K pairs, padding with zeros.
inline SpectralField embed(const SpectralField& u, int K_out) {
    if (K_out < u.pairs()) throw std::invalid_argument("embed: cannot truncate");
    SpectralField out(K_out);
    for (int i = 0; i < u.size(); ++i) out.data()[i] = u.data()[i];
    return out;
}

}  // namespace sks

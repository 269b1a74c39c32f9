#pragma once

// Dealiased pseudospectral evaluation of the quadratic nonlinearity
// B(u, v) = Pi(u v_x): synthesis of u and v_x on a collocation grid of
// M > 3K points, pointwise product, analysis back to spectral pairs.
// The mean of the product is never formed (only k >= 1 modes are read),
// so the result lies in H by construction.

#include <fftw3.h>

#include <map>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "sks/field.hpp"
#include "sks/spectral.hpp"

namespace sks {

namespace detail {

// FFTW plans and buffers for one grid size. Instances are not thread-safe;
// callers go through the thread_local cache below.
class TransformWorkspace {
  public:
    explicit TransformWorkspace(int grid_points) : m_(grid_points) {
        const int nc = m_ / 2 + 1;
        real_ = fftw_alloc_real(static_cast<std::size_t>(m_));
        real2_ = fftw_alloc_real(static_cast<std::size_t>(m_));
        spec_ = fftw_alloc_complex(static_cast<std::size_t>(nc));
        c2r_ = fftw_plan_dft_c2r_1d(m_, spec_, real_, FFTW_ESTIMATE);
        r2c_ = fftw_plan_dft_r2c_1d(m_, real_, spec_, FFTW_ESTIMATE);
        if (!c2r_ || !r2c_) throw std::runtime_error("TransformWorkspace: FFTW plan creation failed");
    }

    ~TransformWorkspace() {
        fftw_destroy_plan(c2r_);
        fftw_destroy_plan(r2c_);
        fftw_free(real_);
        fftw_free(real2_);
        fftw_free(spec_);
    }

    TransformWorkspace(const TransformWorkspace&) = delete;
    TransformWorkspace& operator=(const TransformWorkspace&) = delete;

    int grid_points() const { return m_; }

    // Values on x_m = -L/2 + m L/M. The grid offset shows up as the (-1)^k
    // phase relative to the plain DFT convention.
    void synthesize(const SpectralField& u, double L, double* out) {
        const int nc = m_ / 2 + 1;
        const double amp = 0.5 * std::sqrt(2.0 / L);
        for (int i = 0; i < nc; ++i) spec_[i][0] = spec_[i][1] = 0.0;
        for (int k = 1; k <= u.pairs(); ++k) {
            const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
            spec_[k][0] = sgn * amp * u.cosine(k);
            spec_[k][1] = -sgn * amp * u.sine(k);
        }
        fftw_execute_dft_c2r(c2r_, spec_, out);
    }

    // Spectral pairs of grid values by exact trapezoid quadrature.
    SpectralField analyze(const double* values, double L, int K_out) {
        for (int m = 0; m < m_; ++m) real_[m] = values[m];
        fftw_execute_dft_r2c(r2c_, real_, spec_);
        SpectralField out(K_out);
        const double scale = std::sqrt(2.0 / L) * (L / static_cast<double>(m_));
        for (int k = 1; k <= K_out; ++k) {
            const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
            out.cosine(k) = sgn * scale * spec_[k][0];
            out.sine(k) = -sgn * scale * spec_[k][1];
        }
        return out;
    }

    double* buffer_a() { return real_; }
    double* buffer_b() { return real2_; }

  private:
    int m_;
    double* real_;
    double* real2_;
    fftw_complex* spec_;
    fftw_plan c2r_;
    fftw_plan r2c_;
};

inline int dealiased_grid(int K) {
    int m = 8;
    while (m < 3 * K + 1) m *= 2;
    return m;
}

inline TransformWorkspace& workspace(int grid_points) {
    thread_local std::map<int, std::unique_ptr<TransformWorkspace>> cache;
    auto& slot = cache[grid_points];
    if (!slot) slot = std::make_unique<TransformWorkspace>(grid_points);
    return *slot;
}

}  // namespace detail

// Pi_{K_out} B(u, v) = projection of u v_x, alias-free.
inline SpectralField bilinear_B(const SpectralField& u, const SpectralField& v,
                                const WavenumberTable& tab, double L, int K_out) {
    u.require_same(v);
    if (tab.pairs() != u.pairs()) throw std::invalid_argument("bilinear_B: table resolution mismatch");
    if (K_out < 1 || K_out > u.pairs()) throw std::invalid_argument("bilinear_B: K_out out of range");
    auto& ws = detail::workspace(detail::dealiased_grid(u.pairs()));
    const SpectralField vx = derivative(v, tab);
    ws.synthesize(u, L, ws.buffer_a());
    ws.synthesize(vx, L, ws.buffer_b());
    const int m = ws.grid_points();
    for (int i = 0; i < m; ++i) ws.buffer_a()[i] *= ws.buffer_b()[i];
    return ws.analyze(ws.buffer_a(), L, K_out);
}

inline SpectralField bilinear_B(const SpectralField& u, const SpectralField& v,
                                const WavenumberTable& tab, double L) {
    return bilinear_B(u, v, tab, L, u.pairs());
}

// B(u) = B(u, u).
inline SpectralField bilinear_B(const SpectralField& u, const WavenumberTable& tab, double L) {
    return bilinear_B(u, u, tab, L, u.pairs());
}

// b(u, v, w) = <B(u, v), w> = int u v_x w dx, alias-free. Satisfies the
// integration-by-parts identities b(u,u,u) = 0 and
// b(u1,u2,u2) = -1/2 b(u2,u1,u2) to roundoff.
inline double trilinear_b(const SpectralField& u, const SpectralField& v, const SpectralField& w,
                          const WavenumberTable& tab, double L) {
    u.require_same(w);
    return dot(bilinear_B(u, v, tab, L, w.pairs()), w);
}

}  // namespace sks

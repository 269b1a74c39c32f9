#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sks/field.hpp"
#include "sks/spectral.hpp"
#include "sks/transform.hpp"

using namespace sks;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("eigenvalues follow 4 pi^2 k^2 / L^2") {
    CHECK(eigenvalue(1, 2.0 * kPi) == Catch::Approx(1.0).margin(1e-15));
    CHECK(eigenvalue(3, 2.0 * kPi) == Catch::Approx(9.0).margin(1e-14));
    CHECK(eigenvalue(1, 4.0) == Catch::Approx(4.0 * kPi * kPi / 16.0).epsilon(1e-14));
    CHECK_THROWS(eigenvalue(0, 1.0));
    CHECK_THROWS(eigenvalue(1, -1.0));

    const WavenumberTable tab(4, 2.0 * kPi);
    CHECK(tab.lambdas[0] == tab.lambdas[1]);
    CHECK(tab.lambdas[2] == Catch::Approx(4.0));
    CHECK(tab.sqrt_lambdas[5] == Catch::Approx(3.0));
}

TEST_CASE("basis is orthonormal under the L2 inner product") {
    const double L = 5.0;
    for (int i = 1; i <= 6; ++i) {
        for (int j = i; j <= 6; ++j) {
            const double ip = oracle::periodic_integral(
                [&](double x) { return oracle::basis_eval(i, x, L) * oracle::basis_eval(j, x, L); },
                L, 128);
            CHECK(ip == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-13));
        }
    }
}

TEST_CASE("evaluate matches the basis expansion and Parseval holds") {
    const double L = 7.5;
    const int K = 12;
    const WavenumberTable tab(K, L);
    const SpectralField u = oracle::random_field(K, 11);

    double direct = 0.0;
    const double x = 0.37 * L;
    for (int j = 1; j <= 2 * K; ++j) direct += u.coeff(j) * oracle::basis_eval(j, x - L, L);
    CHECK(u.evaluate(x - L, L) == Catch::Approx(direct).margin(1e-13));

    const double l2 = oracle::periodic_integral(
        [&](double xx) { const double v = u.evaluate(xx, L); return v * v; }, L, 256);
    CHECK(std::sqrt(l2) == Catch::Approx(u.norm_h()).epsilon(1e-12));
}

TEST_CASE("derivative maps pairs with the +/- sqrt(lambda) convention") {
    const double L = 2.0 * kPi;
    const int K = 8;
    const WavenumberTable tab(K, L);
    for (int k = 1; k <= K; ++k) {
        SpectralField s(K);
        s.sine(k) = 1.0;
        const SpectralField ds = derivative(s, tab);
        CHECK(ds.cosine(k) == Catch::Approx(std::sqrt(tab.lambdas[2 * k - 1])));
        CHECK(ds.sine(k) == 0.0);

        SpectralField c(K);
        c.cosine(k) = 1.0;
        const SpectralField dc = derivative(c, tab);
        CHECK(dc.sine(k) == Catch::Approx(-std::sqrt(tab.lambdas[2 * k - 1])));
        CHECK(dc.cosine(k) == 0.0);
    }
    // cross-check against pointwise differentiation by quadrature
    const SpectralField u = oracle::random_field(K, 3);
    const SpectralField du = derivative(u, tab);
    const double h = 1e-6;
    for (double x : {0.3, 1.1, -2.0}) {
        const double fd = (u.evaluate(x + h, L) - u.evaluate(x - h, L)) / (2.0 * h);
        CHECK(du.evaluate(x, L) == Catch::Approx(fd).margin(1e-5));
    }
}

TEST_CASE("apply_power and sobolev_norm agree with direct weighting") {
    const int K = 10;
    const double L = 3.0;
    const WavenumberTable tab(K, L);
    const SpectralField u = oracle::random_field(K, 5);
    const SpectralField au = apply_power(u, 0.5, tab);
    double s = 0.0;
    for (int j = 1; j <= 2 * K; ++j) {
        CHECK(au.coeff(j) == Catch::Approx(std::sqrt(tab.lambdas[j - 1]) * u.coeff(j)));
        s += tab.lambdas[j - 1] * u.coeff(j) * u.coeff(j);
    }
    CHECK(sobolev_norm(u, 0.5, tab) == Catch::Approx(std::sqrt(s)).epsilon(1e-14));
    CHECK(sobolev_norm(u, 0.0, tab) == Catch::Approx(u.norm_h()).epsilon(1e-14));
    CHECK(au.norm_h() == Catch::Approx(sobolev_norm(u, 0.5, tab)).epsilon(1e-14));
}

TEST_CASE("Poincare inequality on the discrete scale") {
    const int K = 16;
    const double L = 2.0 * kPi;  // lambda_1 = 1
    const WavenumberTable tab(K, L);
    for (std::uint64_t tag = 0; tag < 20; ++tag) {
        const SpectralField u = oracle::random_field(K, 100 + tag);
        CHECK(u.norm_h() <= sobolev_norm(u, 0.5, tab) * (1.0 + 1e-12));
        CHECK(sobolev_norm(u, 0.5, tab) <= sobolev_norm(u, 1.0, tab) * (1.0 + 1e-12));
    }
}

TEST_CASE("semigroup factor: unshifted growth on long modes, shifted decay") {
    const WavenumberTable tab(4, 50.0);
    const DomainSpec spec(50.0, 1.0, 0.5);
    // lambda_1 = 4 pi^2 / 2500 << 1: nu lambda^2 - lambda < 0, factor > 1
    CHECK(semigroup_factor(1, 1.0, spec, tab, false) > 1.0);
    CHECK(semigroup_factor(1, 1.0, spec, tab, true) < 1.0);
    // at L = 2 pi, lambda_1 = 1 and kappa_1 = 0
    const WavenumberTable tab2(4, 2.0 * kPi);
    const DomainSpec spec2(2.0 * kPi, 1.0, 0.5);
    CHECK(semigroup_factor(1, 3.0, spec2, tab2, false) == Catch::Approx(1.0));
    CHECK(semigroup_factor(1, 3.0, spec2, tab2, true) == Catch::Approx(std::exp(-1.5)));
    CHECK_THROWS(semigroup_factor_lambda(1.0, -1.0, spec2, false));
}

TEST_CASE("pseudospectral B matches the quadrature oracle") {
    const double L = 2.0 * kPi;
    for (int K : {4, 8, 16}) {
        const WavenumberTable tab(K, L);
        for (std::uint64_t tag = 0; tag < 5; ++tag) {
            const SpectralField u = oracle::random_field(K, 200 + tag);
            const SpectralField v = oracle::random_field(K, 300 + tag);
            const SpectralField fast = bilinear_B(u, v, tab, L);
            const SpectralField slow = oracle::bilinear_full(u, v, L, tab);
            const double scale = u.norm_h() * v.norm_h() + 1e-30;
            CHECK((fast - slow).norm_h() / scale < 1e-12);
        }
    }
}

TEST_CASE("B(e1, e1) closed form at L = 2 pi") {
    const int K = 4;
    const double L = 2.0 * kPi;
    const WavenumberTable tab(K, L);
    // e1 e1' = (1/pi) sin x cos x = (1/(2 pi)) sin 2x -> coefficient 1/(2 sqrt(pi)) on sine_2
    const SpectralField b = bilinear_B(basis_field(K, 1), tab, L);
    CHECK(b.sine(2) == Catch::Approx(1.0 / (2.0 * std::sqrt(kPi))).epsilon(1e-13));
    double rest = 0.0;
    for (int j = 1; j <= 2 * K; ++j)
        if (j != 3) rest += std::abs(b.coeff(j));
    CHECK(rest < 1e-13);
}

TEST_CASE("trilinear form identities (cancellation structure)") {
    const double L = 9.0;
    const int K = 12;
    const WavenumberTable tab(K, L);
    for (std::uint64_t tag = 0; tag < 20; ++tag) {
        const SpectralField u = oracle::random_field(K, 400 + tag);
        const SpectralField v = oracle::random_field(K, 500 + tag);
        const SpectralField w = oracle::random_field(K, 600 + tag);
        const double scale = u.norm_h() * v.norm_h() * w.norm_h();
        // b(u,u,u) = 0
        CHECK(std::abs(trilinear_b(u, u, u, tab, L)) / (u.norm_h() * u.norm_h() * u.norm_h()) <
              1e-12);
        // b(u,v,v) = -1/2 b(v,u,v)
        CHECK(std::abs(trilinear_b(u, v, v, tab, L) + 0.5 * trilinear_b(v, u, v, tab, L)) /
                  (u.norm_h() * v.norm_h() * v.norm_h()) < 1e-12);
        // b(u,v,w) + b(u,w,v) + b(v,u,w) = 0
        CHECK(std::abs(trilinear_b(u, v, w, tab, L) + trilinear_b(u, w, v, tab, L) +
                       trilinear_b(v, u, w, tab, L)) / scale < 1e-12);
        // and the quadrature value agrees
        CHECK(trilinear_b(u, v, w, tab, L) ==
              Catch::Approx(oracle::trilinear(u, v, w, L, tab)).margin(1e-11 * scale));
    }
}

TEST_CASE("projection removes aliasing: B lands in the retained span") {
    const double L = 2.0 * kPi;
    const int K = 8;
    const WavenumberTable tab(K, L);
    // product of top modes has wavenumbers up to 2K; the K_out = K result must
    // equal the oracle projection, not a folded-back alias
    SpectralField u(K);
    u.sine(K) = 1.0;
    u.cosine(K - 1) = 1.0;
    const SpectralField fast = bilinear_B(u, u, tab, L);
    const SpectralField slow = oracle::bilinear_full(u, u, L, tab);
    CHECK((fast - slow).norm_h() < 1e-12);
}

TEST_CASE("smoothing bound sup lambda^{2 beta} e^{-lambda^2 t} t^beta = (beta/e)^beta") {
    for (double beta : {0.25, 0.5, 1.0}) {
        const double bound = std::pow(beta / std::numbers::e, beta);
        double sup = 0.0;
        const WavenumberTable tab(64, 2.0 * kPi);
        for (int j = 1; j <= 128; ++j) {
            const double lam = tab.lambdas[j - 1];
            // the per-lambda maximizer is t* = beta / lambda^2
            const double tstar = beta / (lam * lam);
            for (double f : {0.25, 0.5, 1.0, 2.0, 4.0}) {
                const double t = tstar * f;
                sup = std::max(sup, std::pow(lam, 2.0 * beta) * std::exp(-lam * lam * t) *
                                        std::pow(t, beta));
            }
        }
        CHECK(sup <= bound + 1e-12);
        CHECK(sup > 0.99 * bound);
    }
}

TEST_CASE("project and embed round trip") {
    const SpectralField u = oracle::random_field(8, 900);
    const SpectralField big = embed(u, 16);
    CHECK(big.coeff(17) == 0.0);
    const SpectralField back = project(big, 8);
    for (int j = 1; j <= 16; ++j) CHECK(back.coeff(j) == u.coeff(j));
    CHECK_THROWS(project(u, 12));
    CHECK_THROWS(embed(u, 4));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dissipwave/analysis.hpp"
#include "dissipwave/oracle.hpp"
#include "dissipwave/symbols.hpp"

using namespace dissipwave;

namespace {

const double e = std::exp(1.0);

// Composite Simpson rule, independent of the Gauss weights in the table.
template <typename F>
double simpson(F f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int k = 1; k < panels; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("mu_pm examples and Vieta identities") {
    auto [p0, m0] = mu_pm(0.0);
    CHECK(p0 == std::complex<double>(0.0, 0.0));
    CHECK(m0 == std::complex<double>(-1.0, 0.0));

    auto [pb, mb] = mu_pm(0.25);
    CHECK(pb == std::complex<double>(-0.5, 0.0));
    CHECK(mb == std::complex<double>(-0.5, 0.0));

    auto [ph, mh] = mu_pm(0.5);
    CHECK(std::abs(ph - std::complex<double>(-0.5, 0.5)) < 1e-15);
    CHECK(std::abs(mh - std::complex<double>(-0.5, -0.5)) < 1e-15);

    for (double xi_sq : {0.0, 1e-9, 0.01, 0.2, 0.25, 0.3, 1.0, 7.5, 1e4}) {
        CAPTURE(xi_sq);
        auto [p, m] = mu_pm(xi_sq);
        CHECK(std::abs(p + m + 1.0) <= 1e-14);
        CHECK(std::abs(p * m - xi_sq) <= 1e-14 * std::max(1.0, xi_sq));
        if (xi_sq <= 0.25) {
            CHECK(p.imag() == 0.0);
            CHECK(m.imag() == 0.0);
        } else {
            CHECK(p.real() == -0.5);
            CHECK(p == std::conj(m));
        }
    }
    CHECK(mu_0(0.0) == std::complex<double>(1.0, 0.0));
    CHECK(std::abs(mu_0(0.5) - std::complex<double>(0.0, 1.0)) < 1e-15);
}

TEST_CASE("green_hat closed-form examples") {
    CHECK(green_hat(0.0, 1.0) == doctest::Approx(1.0 - 1.0 / e).epsilon(1e-14));
    CHECK(green_hat(0.25, 2.0) == doctest::Approx(2.0 / e).epsilon(1e-14));
    CHECK(green_hat_dt(0.0, 1.0) == doctest::Approx(1.0 / e).epsilon(1e-14));
    for (double xi_sq : {0.0, 0.1, 0.25, 0.7, 100.0}) {
        CHECK(green_hat(xi_sq, 0.0) == 0.0);
        CHECK(green_hat_dt(xi_sq, 0.0) == 1.0);
    }
    CHECK_THROWS(green_hat(0.1, -1.0));
    CHECK_THROWS(green_hat_dt(0.1, -1.0));
}

TEST_CASE("green_hat agrees with the mode ODE oracle on the 32 x 32 sweep") {
    double worst = 0.0;
    for (int i = 0; i < 32; ++i) {
        const double xi_sq = 4.0 * i / 31;
        for (int j = 0; j < 32; ++j) {
            const double t = 10.0 * j / 31;
            const auto ode = oracle::mode_ode(xi_sq, t, 1e-12);
            worst = std::max(worst, std::abs(green_hat(xi_sq, t) - ode.value));
            worst = std::max(worst, std::abs(green_hat_dt(xi_sq, t) - ode.derivative));
        }
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("mode ODE residual by central differences") {
    const double h = 1e-4;
    double worst = 0.0;
    for (double xi_sq : {0.0, 0.05, 0.2499, 0.25, 0.2501, 0.6, 3.0}) {
        for (double t : {0.3, 1.0, 4.0, 9.0}) {
            const double g1 = (green_hat(xi_sq, t + h) - green_hat(xi_sq, t - h)) / (2 * h);
            const double g2 = (green_hat_dt(xi_sq, t + h) - green_hat_dt(xi_sq, t - h)) / (2 * h);
            worst = std::max(worst, std::abs(g2 + g1 + xi_sq * green_hat(xi_sq, t)));
            CHECK(std::abs(g1 - green_hat_dt(xi_sq, t)) < 1e-8);
        }
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("continuity across the branch point") {
    for (int k = 0; k <= 100; ++k) {
        const double t = 0.5 * k;
        const double limit = t * std::exp(-t / 2);
        CHECK(std::abs(green_hat(0.25 + 1e-10, t) - limit) <= 1e-8);
        CHECK(std::abs(green_hat(0.25 - 1e-10, t) - limit) <= 1e-8);
        CHECK(std::abs(green_hat(0.25, t) - limit) <= 1e-15);
        const double dlimit = (1.0 - t / 2) * std::exp(-t / 2);
        CHECK(std::abs(green_hat_dt(0.25 + 1e-10, t) - dlimit) <= 1e-8);
        CHECK(std::abs(green_hat_dt(0.25 - 1e-10, t) - dlimit) <= 1e-8);
    }
}

TEST_CASE("symbol tables on grids of each dimension") {
    for (int n = 1; n <= 3; ++n) {
        for (int points : {16, 32, 64}) {
            if (n == 3 && points == 64) continue;
            const Grid grid = make_grid(n, points, 1.0 + points / 16.0);
            for (double step : {0.0, 0.05, 0.7}) {
                const SymbolTable t = build_symbol_table(grid, step);
                REQUIRE(t.g.size() == grid.size());
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    CHECK(std::isfinite(t.g[i]));
                    CHECK(std::abs(t.gtt[i] + t.gt[i] + t.xi_sq[i] * t.g[i]) <= 1e-12);
                    CHECK(std::abs(t.g[i]) <= 1.0 + step);
                    CHECK(std::abs(t.gt[i]) <= 1.0 + step);
                    if (step == 0.0) {
                        CHECK(t.g[i] == 0.0);
                        CHECK(t.gt[i] == 1.0);
                    }
                }
            }
        }
    }
    CHECK_THROWS(build_symbol_table(make_grid(1, 16, 1.0), -0.1));
}

TEST_CASE("Duhamel weights match an independent quadrature") {
    const Grid grid = make_grid(1, 32, 2.0);
    const double D = 0.3;
    const SymbolTable t = build_symbol_table(grid, D);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double xi = t.xi_sq[i];
        auto w0 = [&](double s) { return 1.0 - s / D; };
        auto w1 = [&](double s) { return s / D; };
        const double du0 = simpson([&](double s) { return green_hat(xi, D - s) * w0(s); }, 0.0, D, 2000);
        const double du1 = simpson([&](double s) { return green_hat(xi, D - s) * w1(s); }, 0.0, D, 2000);
        const double dv0 = simpson([&](double s) { return green_hat_dt(xi, D - s) * w0(s); }, 0.0, D, 2000);
        const double dv1 = simpson([&](double s) { return green_hat_dt(xi, D - s) * w1(s); }, 0.0, D, 2000);
        // 8-point Gauss-Legendre resolves a few oscillations per step, not many.
        const double tol = std::sqrt(xi) * D <= 2.0 ? 1e-12 : 1e-6 * D;
        CAPTURE(xi);
        CHECK(std::abs(t.du0[i] - du0) <= tol);
        CHECK(std::abs(t.du1[i] - du1) <= tol);
        CHECK(std::abs(t.dv0[i] - dv0) <= tol);
        CHECK(std::abs(t.dv1[i] - dv1) <= tol);
    }
}

TEST_CASE("cutoff partition") {
    const CutoffSpec narrow{0.125, 2.0};
    CHECK(cutoff(1, 0.0, narrow) == 1.0);
    CHECK(cutoff(2, 0.0, narrow) == 0.0);
    CHECK(cutoff(3, 0.0, narrow) == 0.0);
    CHECK(cutoff(1, 0.3, narrow) == 0.0);
    CHECK(cutoff(3, 2.5, narrow) == 1.0);
    CHECK(cutoff(1, 0.12, narrow) == 1.0);
    CHECK(cutoff(3, 0.99, narrow) == 0.0);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> radius(0.0, 3.0);
    for (const CutoffSpec& spec : {narrow, CutoffSpec{}}) {
        for (int k = 0; k < 1000; ++k) {
            const double r = radius(rng);
            double sum = 0.0;
            for (int band = 1; band <= 3; ++band) {
                const double c = cutoff(band, r, spec);
                CHECK(c >= 0.0);
                CHECK(c <= 1.0);
                sum += c;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-15);
        }
    }

    CHECK_THROWS_AS(validate(CutoffSpec{0.5, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(CutoffSpec{-0.1, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(cutoff(1, 0.1, CutoffSpec{0.5, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(cutoff(4, 0.1, narrow), std::invalid_argument);
}

TEST_CASE("smooth step") {
    CHECK(smooth_step(-1.0) == 0.0);
    CHECK(smooth_step(0.0) == 0.0);
    CHECK(smooth_step(1.0) == 1.0);
    CHECK(smooth_step(2.0) == 1.0);
    CHECK(smooth_step(0.5) == doctest::Approx(0.5));
    double prev = 0.0;
    for (int k = 1; k < 100; ++k) {
        const double s = k / 100.0;
        CHECK(smooth_step(s) >= prev);
        CHECK(smooth_step(s) + smooth_step(1.0 - s) == doctest::Approx(1.0).epsilon(1e-14));
        prev = smooth_step(s);
    }
}

TEST_CASE("green bands: resolution checks and decomposition") {
    const CutoffSpec spec{};
    const Grid coarse = make_grid(1, 64, 10.0);
    CHECK_THROWS(green_band_spectral(1, coarse, 1.0, spec));
    CHECK_THROWS(green_band_spectral(1, make_grid(1, 4096, 200.0), 0.0, spec));
    CHECK(modes_in_interval(coarse, 0.0, 1.0) == 3);

    const Grid grid = make_grid(1, 1024, 100.0);
    const double t = 3.0;
    SpectralField sum = green_band_spectral(1, grid, t, spec);
    sum += green_band_spectral(2, grid, t, spec);
    sum += green_band_spectral(3, grid, t, spec);
    const SpectralField g2 = green_band_spectral(2, grid, t, spec);
    double worst = 0.0, scale = 0.0;
    const double norm = std::pow(grid.points_per_dim() / (2 * grid.half_width()), 1);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double expected = norm * green_hat(grid.frequency(static_cast<int>(k)) *
                                                     grid.frequency(static_cast<int>(k)), t);
        worst = std::max(worst, std::abs(std::abs(sum[k]) - std::abs(expected)));
        scale = std::max(scale, std::abs(expected));
    }
    CHECK(worst <= 1e-12 * scale);
    CHECK(std::abs(std::abs(g2[0])) == 0.0);
}

TEST_CASE("low band kernel: decay slope and refinement stability") {
    const CutoffSpec spec{};
    const Grid grid = make_grid(1, 4096, 200.0);
    Series sup, dsup;
    for (double t : {10.0, 20.0, 40.0, 80.0}) {
        const SpectralField g1 = green_band_spectral(1, grid, t, spec);
        sup.emplace_back(t, lp_norm(inverse_transform(g1), INFINITY));
        dsup.emplace_back(t, lp_norm(inverse_transform(spectral_derivative(g1, {1, 0, 0})), INFINITY));
    }
    CHECK(fit_decay_rate(sup, 10, 80, 3).slope == doctest::Approx(-0.5).epsilon(0.2));
    CHECK(std::abs(fit_decay_rate(dsup, 10, 80, 3).slope + 1.0) <= 0.1);

    auto weighted = [&](const Grid& g) {
        const Field g1 = green_band(1, g, 10.0, spec);
        double best = 0.0;
        for (int k = 0; k < g.points_per_dim(); ++k) {
            const double x = g.coordinate(k);
            best = std::max(best, std::abs(g1[k]) * std::pow(1.0 + x * x / 11.0, 2));
        }
        return best * std::sqrt(10.0);
    };
    const double base = weighted(grid);
    CHECK(std::isfinite(base));
    CHECK(std::abs(weighted(make_grid(1, 8192, 200.0)) / base - 1.0) <= 0.05);
    CHECK(std::abs(weighted(make_grid(1, 8192, 400.0)) / base - 1.0) <= 0.05);
}

TEST_CASE("middle band decays exponentially") {
    const Grid grid = make_grid(1, 4096, 200.0);
    Series sup;
    for (double t = 5.0; t <= 40.0; t += 5.0) sup.emplace_back(t, lp_norm(green_band(2, grid, t, CutoffSpec{}), INFINITY));
    const AffineFit fit = fit_log_affine(sup, 5, 40);
    CHECK(fit.slope < -0.05);
    CHECK(fit.r_squared >= 0.99);
}

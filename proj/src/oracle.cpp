#include "dissipwave/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace dissipwave::oracle {

namespace {

using State = std::array<double, 2>;

State mode_rhs(const State& y, double xi_sq) { return {y[1], -y[1] - xi_sq * y[0]}; }

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b* (difference between the 5th and embedded 4th order weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

OdeResult integrate(double xi_sq, double t, double tol) {
    OdeResult result{0.0, 1.0, 0.0, 0};
    if (t == 0.0) return result;

    State y{0.0, 1.0};
    double time = 0.0;
    double h = std::min(t, 0.01);
    const double h_min = 1e-14 * std::max(1.0, t);
    State k1 = mode_rhs(y, xi_sq);

    while (time < t) {
        if (h < h_min) throw std::runtime_error("mode_ode: step size underflow");
        const bool last = time + h >= t;
        if (last) h = t - time;

        auto stage = [&](double w1, double w2, double w3, double w4, double w5, const State& s1,
                         const State& s2, const State& s3, const State& s4, const State& s5) {
            State out;
            for (int i = 0; i < 2; ++i)
                out[i] = y[i] + h * (w1 * s1[i] + w2 * s2[i] + w3 * s3[i] + w4 * s4[i] + w5 * s5[i]);
            return mode_rhs(out, xi_sq);
        };
        const State zero{0.0, 0.0};
        const State k2 = stage(a21, 0, 0, 0, 0, k1, zero, zero, zero, zero);
        const State k3 = stage(a31, a32, 0, 0, 0, k1, k2, zero, zero, zero);
        const State k4 = stage(a41, a42, a43, 0, 0, k1, k2, k3, zero, zero);
        const State k5 = stage(a51, a52, a53, a54, 0, k1, k2, k3, k4, zero);
        State y6;
        for (int i = 0; i < 2; ++i)
            y6[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const State k6 = mode_rhs(y6, xi_sq);
        State next;
        for (int i = 0; i < 2; ++i)
            next[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        const State k7 = mode_rhs(next, xi_sq);

        double ratio = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double e = h * std::abs(e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                          e6 * k6[i] + e7 * k7[i]);
            const double scale = tol * (h / t) * (1.0 + std::max(std::abs(y[i]), std::abs(next[i])));
            ratio = std::max(ratio, e / scale);
        }

        if (ratio <= 1.0) {
            time = last ? t : time + h;
            y = next;
            k1 = k7;
            ++result.steps;
        }
        const double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
        if (!(last && ratio <= 1.0)) h *= factor;
    }

    result.value = y[0];
    result.derivative = y[1];
    return result;
}

}  // namespace

OdeResult mode_ode(double xi_sq, double t, double tol) {
    if (xi_sq < 0.0) throw std::invalid_argument("mode_ode: xi_sq must be nonnegative");
    if (t < 0.0) throw std::invalid_argument("mode_ode: t must be nonnegative");
    if (!(tol >= 1e-12)) throw std::invalid_argument("mode_ode: tol must be >= 1e-12");

    const OdeResult coarse = integrate(xi_sq, t, tol);
    OdeResult fine = integrate(xi_sq, t, tol / 16.0);
    fine.est_error = std::max(std::abs(fine.value - coarse.value), std::abs(fine.derivative - coarse.derivative));
    fine.steps += coarse.steps;
    return fine;
}

std::pair<Field, Field> dalembert(const Field& h, double t) {
    const Grid& grid = h.grid();
    if (grid.n_dims() != 1) throw std::invalid_argument("dalembert: one-dimensional grids only");
    if (!(t > 0.0)) throw std::invalid_argument("dalembert: t must be positive");
    if (!(t < 0.5 * grid.half_width()))
        throw std::invalid_argument("dalembert: t must stay below L/2 (wrap-around)");

    const int n = grid.points_per_dim();
    const int half = n / 2;
    const double step = grid.frequency_step();
    const double x0 = grid.coordinate(0);

    // c_j = sum_m h_m exp(-i xi_j (x_m - x0)), j = 0..N/2.
    std::vector<std::complex<double>> c(half + 1);
    for (int j = 0; j <= half; ++j) {
        const std::complex<double> w = std::polar(1.0, -2.0 * std::numbers::pi * j / n);
        std::complex<double> rot(1.0, 0.0), acc(0.0, 0.0);
        for (int m = 0; m < n; ++m) {
            acc += h[m] * rot;
            rot *= w;
        }
        c[j] = acc / static_cast<double>(n);
    }

    // Real trigonometric interpolant and the periodic part of its antiderivative
    // at an arbitrary point y.
    auto evaluate = [&](double y) {
        const double phase = step * (y - x0);
        const std::complex<double> w = std::polar(1.0, phase);
        std::complex<double> rot = w;
        double value = c[0].real();
        double anti = 0.0;
        for (int j = 1; j < half; ++j) {
            const double xi = step * j;
            value += 2.0 * (c[j] * rot).real();
            anti += 2.0 * (c[j] * rot / std::complex<double>(0.0, xi)).real();
            rot *= w;
        }
        const double xi_n = step * half;
        value += c[half].real() * std::cos(xi_n * (y - x0));
        anti += c[half].real() * std::sin(xi_n * (y - x0)) / xi_n;
        return std::pair<double, double>{value, anti};
    };

    std::vector<double> integral(n), average(n);
    for (int m = 0; m < n; ++m) {
        const double x = grid.coordinate(m);
        const auto [hp, ap] = evaluate(x + t);
        const auto [hm, am] = evaluate(x - t);
        integral[m] = 0.5 * (2.0 * t * c[0].real() + ap - am);
        average[m] = 0.5 * (hp + hm);
    }
    return {Field(grid, std::move(integral)), Field(grid, std::move(average))};
}

Field heat_reference(const Field& g, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("heat_reference: t must be positive");
    SpectralField f = forward_transform(g);
    const auto xi_sq = g.grid().squared_frequencies();
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= std::exp(-xi_sq[i] * t);
    return inverse_transform(f);
}

}  // namespace dissipwave::oracle

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <optional>

#include "dissipwave/oracle.hpp"
#include "dissipwave/solver.hpp"
#include "support.hpp"

using namespace dissipwave;
using testing::max_abs;
using testing::max_diff;
using testing::sample;

namespace {

Field gauss(const Grid& g, double amp, double width, double shift = 0.0) {
    return sample(g, [&](double x, double y, double z) {
        const double r2 = (x - shift) * (x - shift) + y * y + z * z;
        return amp * std::exp(-r2 / (2 * width * width));
    });
}

SolverConfig config_for(Integrator integrator, double dt, double t_final, int theta = 3,
                        Nonlinearity kind = Nonlinearity::absorbing) {
    SolverConfig c;
    c.theta = theta;
    c.dt = dt;
    c.t_final = t_final;
    c.integrator = integrator;
    c.nonlinearity = kind;
    c.dealias = true;
    c.delta_bar = 0.9;
    return c;
}

SolverState run_to_end(const Field& u0, const Field& u1, const SolverConfig& c) {
    return solve(u0, u1, c).final_state;
}

double observed_order(Integrator integrator, double dt) {
    const Grid g = make_grid(1, 256, 20.0);
    const Field u0 = gauss(g, 0.5, 1.0), u1 = gauss(g, 0.2, 1.5, 1.0);
    const double T = 1.0;
    const SolverState ref = run_to_end(u0, u1, config_for(integrator, dt / 16, T));
    const SolverState coarse = run_to_end(u0, u1, config_for(integrator, dt, T));
    const SolverState fine = run_to_end(u0, u1, config_for(integrator, dt / 2, T));
    const double e1 = max_diff(time_derivative(coarse, 0), time_derivative(ref, 0));
    const double e2 = max_diff(time_derivative(fine, 0), time_derivative(ref, 0));
    return std::log2(e1 / e2);
}

}  // namespace

TEST_CASE("enum parsing") {
    CHECK(parse_nonlinearity("absorbing") == Nonlinearity::absorbing);
    CHECK(parse_nonlinearity("source") == Nonlinearity::source);
    CHECK(parse_nonlinearity("none") == Nonlinearity::none);
    CHECK(parse_integrator("reference_rk4") == Integrator::reference_rk4);
    CHECK(parse_integrator("exponential_duhamel") == Integrator::exponential_duhamel);
    CHECK(to_string(Integrator::reference_rk4) == "reference_rk4");
    CHECK_THROWS_AS(parse_nonlinearity("cubic"), std::invalid_argument);
    CHECK_THROWS_AS(parse_integrator("euler"), std::invalid_argument);
}

TEST_CASE("config validation") {
    SolverConfig c = config_for(Integrator::reference_rk4, 0.1, 1.0);
    CHECK_NOTHROW(validate(c));
    auto bad = [&](auto mutate) {
        SolverConfig d = c;
        mutate(d);
        CHECK_THROWS_AS(validate(d), std::invalid_argument);
    };
    bad([](SolverConfig& d) { d.dt = 0.0; });
    bad([](SolverConfig& d) { d.dt = 2.0; });
    bad([](SolverConfig& d) { d.t_final = 1.05; });
    bad([](SolverConfig& d) { d.theta = 0; });
    bad([](SolverConfig& d) { d.delta_bar = 1.0; });
    bad([](SolverConfig& d) { d.snapshot_times = {0.25}; });
    bad([](SolverConfig& d) { d.snapshot_times = {1.5}; });
}

TEST_CASE("linear_solution trivial cases") {
    const Grid g = make_grid(1, 64, 8.0);
    const auto [u, v] = linear_solution(Field(g), Field(g), 3.0);
    CHECK(max_abs(u) == 0.0);
    CHECK(max_abs(v) == 0.0);

    const Field u0 = testing::random_field(g, 1), u1 = testing::random_field(g, 2);
    const auto [a, b] = linear_solution(u0, u1, 0.0);
    CHECK(max_diff(a, u0) <= 1e-12);
    CHECK(max_diff(b, u1) <= 1e-12);

    CHECK_THROWS(linear_solution(u0, Field(make_grid(1, 32, 8.0)), 1.0));
    CHECK_THROWS(linear_solution(u0, u1, -1.0));
}

TEST_CASE("linear_solution agrees with the per-mode ODE oracle") {
    const Grid g = make_grid(1, 256, 20.0);
    const Field u0 = gauss(g, 1.0, 1.0), u1 = gauss(g, -0.3, 2.0);
    const double t = 3.0;
    const SpectralField a = forward_transform(u0), b = forward_transform(u1);
    SpectralField u_hat(g), v_hat(g);
    std::map<double, oracle::OdeResult> cache;
    const auto xi_sq = g.squared_frequencies();
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto it = cache.find(xi_sq[i]);
        if (it == cache.end()) it = cache.emplace(xi_sq[i], oracle::mode_ode(xi_sq[i], t, 1e-12)).first;
        const double G = it->second.value, Gt = it->second.derivative;
        const double Gtt = -Gt - xi_sq[i] * G;
        u_hat[i] = G * (a[i] + b[i]) + Gt * a[i];
        v_hat[i] = Gt * (a[i] + b[i]) + Gtt * a[i];
    }
    const auto [u, v] = linear_solution(u0, u1, t);
    CHECK(max_diff(u, inverse_transform(u_hat)) <= 1e-8);
    CHECK(max_diff(v, inverse_transform(v_hat)) <= 1e-8);
}

TEST_CASE("propagator semigroup") {
    for (double xi_sq : {0.0, 0.1, 0.25, 0.26, 2.0, 50.0}) {
        for (auto [d1, d2] : {std::pair{0.1, 0.3}, std::pair{0.5, 0.5}, std::pair{1.7, 0.2}}) {
            const auto p = propagator(xi_sq, d1), q = propagator(xi_sq, d2), r = propagator(xi_sq, d1 + d2);
            const std::array<double, 4> pq = {p[0] * q[0] + p[1] * q[2], p[0] * q[1] + p[1] * q[3],
                                              p[2] * q[0] + p[3] * q[2], p[2] * q[1] + p[3] * q[3]};
            for (int k = 0; k < 4; ++k) CHECK(std::abs(pq[k] - r[k]) <= 1e-10);
        }
    }
}

TEST_CASE("linear_step: semigroup, composition, zero state") {
    const Grid g = make_grid(1, 256, 20.0);
    const Field u0 = gauss(g, 1.0, 1.0), u1 = gauss(g, 0.5, 1.0, 2.0);
    const SolverState s0 = make_state(u0, u1, 3, Nonlinearity::none);
    const SymbolTable t1 = build_symbol_table(g, 0.25), t2 = build_symbol_table(g, 0.5);

    const SolverState two = linear_step(linear_step(s0, t1), t1);
    const SolverState one = linear_step(s0, t2);
    CHECK(max_diff(two.u_hat, one.u_hat) <= 1e-10);
    CHECK(max_diff(two.v_hat, one.v_hat) <= 1e-10);
    CHECK(two.time == 0.5);

    SolverState s = s0;
    for (int k = 0; k < 40; ++k) s = linear_step(s, t1);
    const auto [u, v] = linear_solution(u0, u1, 10.0);
    CHECK(max_diff(time_derivative(s, 0), u) <= 1e-9);
    CHECK(max_diff(time_derivative(s, 1), v) <= 1e-9);

    const SolverState z = linear_step(make_state(Field(g), Field(g), 3), t1);
    CHECK(max_abs(time_derivative(z, 0)) == 0.0);
    CHECK(max_abs(time_derivative(z, 1)) == 0.0);

    CHECK_THROWS(linear_step(s0, build_symbol_table(make_grid(1, 128, 20.0), 0.25)));
}

TEST_CASE("linear_solution is linear, parity preserving and translation equivariant") {
    const Grid g = make_grid(1, 128, 16.0);
    const Field a0 = gauss(g, 1.0, 1.0), a1 = gauss(g, 0.3, 0.7, 1.0);
    const Field b0 = gauss(g, -0.4, 2.0, -2.0), b1 = gauss(g, 0.2, 1.0);
    std::vector<double> c0(g.size()), c1(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        c0[i] = 2.0 * a0[i] - 3.0 * b0[i];
        c1[i] = 2.0 * a1[i] - 3.0 * b1[i];
    }
    const auto [ua, va] = linear_solution(a0, a1, 2.5);
    const auto [ub, vb] = linear_solution(b0, b1, 2.5);
    const auto [uc, vc] = linear_solution(Field(g, c0), Field(g, c1), 2.5);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        worst = std::max(worst, std::abs(uc[i] - 2.0 * ua[i] + 3.0 * ub[i]));
        worst = std::max(worst, std::abs(vc[i] - 2.0 * va[i] + 3.0 * vb[i]));
    }
    CHECK(worst <= 1e-12);

    // Even data on a symmetric grid: x_k and x_{N-k} are mirror images.
    const auto [ue, ve] = linear_solution(gauss(g, 1.0, 1.0), gauss(g, 0.5, 2.0), 4.0);
    double asym = 0.0;
    for (int k = 1; k < 128; ++k) asym = std::max(asym, std::abs(ue[k] - ue[128 - k]));
    CHECK(asym <= 1e-14);

    const auto [us, vs] = linear_solution(cyclic_shift(a0, 7), cyclic_shift(a1, 7), 2.5);
    CHECK(max_diff(us, cyclic_shift(ua, 7)) <= 1e-12);
    CHECK(max_diff(vs, cyclic_shift(va, 7)) <= 1e-12);
}

TEST_CASE("pointwise nonlinearity") {
    const Grid g = make_grid(1, 16, 1.0);
    CHECK(max_abs(apply_nonlinearity(Field(g), 3)) == 0.0);
    const Field twos(g, std::vector<double>(16, 2.0)), minus(g, std::vector<double>(16, -1.0));
    CHECK(max_diff(apply_nonlinearity(twos, 3), Field(g, std::vector<double>(16, -16.0))) == 0.0);
    CHECK(max_diff(apply_nonlinearity(minus, 2), Field(g, std::vector<double>(16, 1.0))) == 0.0);
    const Field r = testing::random_field(g, 3);
    for (int theta = 1; theta <= 4; ++theta) {
        const Field f = apply_nonlinearity(r, theta);
        std::vector<double> neg(16);
        for (int k = 0; k < 16; ++k) neg[k] = -r[k];
        const Field fn = apply_nonlinearity(Field(g, neg), theta);
        for (int k = 0; k < 16; ++k) {
            CHECK(fn[k] == -f[k]);
            CHECK(f[k] * r[k] <= 0.0);
            CHECK(std::abs(f[k]) == doctest::Approx(std::pow(std::abs(r[k]), theta + 1)));
        }
        const Field s = nonlinear_term(r, theta, Nonlinearity::source);
        for (int k = 0; k < 16; ++k) CHECK(s[k] == -f[k]);
        CHECK(max_abs(nonlinear_term(r, theta, Nonlinearity::none)) == 0.0);
    }
}

TEST_CASE("dealiased nonlinearity drops the upper third of the spectrum") {
    const Grid g = make_grid(1, 64, 4.0);
    const SpectralField u = forward_transform(testing::random_field(g, 8));
    const SpectralField f = nonlinear_spectral(u, 3, Nonlinearity::absorbing, true);
    for (int k = 0; k < 64; ++k)
        if (std::abs(g.lattice_index(k)) > 64 / 3) CHECK(std::abs(f[k]) == 0.0);
    const SpectralField raw = nonlinear_spectral(u, 3, Nonlinearity::absorbing, false);
    CHECK(max_diff(inverse_transform(raw), apply_nonlinearity(inverse_transform(u), 3)) <= 1e-12);
}

TEST_CASE("semilinear step: zero state and tiny data") {
    const Grid g = make_grid(1, 128, 16.0);
    for (Integrator integ : {Integrator::reference_rk4, Integrator::exponential_duhamel}) {
        // Small enough that the explicit step's own linear truncation error stays below the bar.
        const SolverConfig c = config_for(integ, 0.005, 1.0, 1);
        const SymbolTable table = build_symbol_table(g, c.dt);
        const SolverState z = step_semilinear(make_state(Field(g), Field(g), 1), c, table);
        CHECK(max_abs(time_derivative(z, 0)) == 0.0);

        const SolverState tiny = make_state(gauss(g, 1e-8, 1.0), Field(g), 1);
        const SolverState a = step_semilinear(tiny, c, table);
        const SolverState b = linear_step(tiny, table);
        CHECK(max_diff(time_derivative(a, 0), time_derivative(b, 0)) <= 1e-20);

        SolverConfig wrong = c;
        wrong.dt = 0.01;
        CHECK_THROWS_AS(step_semilinear(tiny, wrong, table), std::invalid_argument);
    }
}

TEST_CASE("observed temporal order") {
    CHECK(observed_order(Integrator::reference_rk4, 0.1) >= 3.5);
    CHECK(observed_order(Integrator::exponential_duhamel, 0.1) >= 1.8);
}

TEST_CASE("integrators agree on a smooth problem") {
    const Grid g = make_grid(1, 256, 20.0);
    const Field u0 = gauss(g, 0.5, 1.0), u1 = Field(g);
    const SolverState a = run_to_end(u0, u1, config_for(Integrator::reference_rk4, 0.01, 2.0));
    const SolverState b = run_to_end(u0, u1, config_for(Integrator::exponential_duhamel, 0.01, 2.0));
    CHECK(max_diff(time_derivative(a, 0), time_derivative(b, 0)) <= 1e-5);
}

TEST_CASE("instability guard reports the failure time") {
    const Grid g = make_grid(1, 128, 16.0);
    SolverConfig c = config_for(Integrator::reference_rk4, 0.01, 5.0, 3, Nonlinearity::source);
    c.delta_bar = 0.5;
    try {
        solve(gauss(g, 2.0, 1.0), Field(g), c);
        FAIL("expected InstabilityError");
    } catch (const InstabilityError& e) {
        CHECK(e.time() > 0.0);
        CHECK(e.time() <= 5.0);
        CHECK(e.sup_norm() > 5.0);
    }
}

TEST_CASE("solve: observers, snapshots and determinism") {
    const Grid g = make_grid(1, 128, 16.0);
    SolverConfig c = config_for(Integrator::exponential_duhamel, 0.1, 2.0);
    c.snapshot_times = {0.0, 0.5, 2.0, 1.0};
    std::vector<double> step_times, snap_times;
    Observers obs;
    obs.on_step = [&](const SolverState& s) { step_times.push_back(s.time); };
    obs.on_snapshot = [&](const SolverState& s) { snap_times.push_back(s.time); };
    const RunRecord r = solve(gauss(g, 0.3, 1.0), Field(g), c, obs);
    CHECK(r.steps == 20);
    CHECK(step_times.size() == 21);
    CHECK(snap_times == std::vector<double>{0.0, 0.5, 1.0, 2.0});
    for (std::size_t k = 1; k < step_times.size(); ++k) CHECK(step_times[k] > step_times[k - 1]);

    const RunRecord again = solve(gauss(g, 0.3, 1.0), Field(g), c);
    CHECK(max_diff(r.final_state.u_hat, again.final_state.u_hat) == 0.0);
    CHECK(hermitian_defect(r.final_state.u_hat) <= 1e-12);
}

TEST_CASE("time derivatives") {
    const Grid g = make_grid(1, 64, 8.0);
    const SolverState z = make_state(Field(g), Field(g), 3);
    for (int h = 0; h <= 2; ++h) CHECK(max_abs(time_derivative(z, h)) == 0.0);
    CHECK_THROWS_AS(time_derivative(z, 3), std::invalid_argument);

    // Single mode, linear: u_tt = -xi^2 u - v.
    const double xi = 3 * g.frequency_step();
    const Field mode = sample(g, [&](double x, double, double) { return std::cos(xi * x); });
    const auto [u, v] = linear_solution(mode, Field(g), 0.7);
    const SolverState s = make_state(u, v, 3, Nonlinearity::none);
    std::vector<double> expected(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) expected[i] = -xi * xi * u[i] - v[i];
    CHECK(max_diff(time_derivative(s, 2), Field(g, expected)) <= 1e-10);
}

TEST_CASE("second time derivative matches differences of u_t") {
    const Grid g = make_grid(1, 256, 20.0);
    SolverConfig c = config_for(Integrator::reference_rk4, 1e-3, 1.002, 3);
    c.dealias = false;
    c.snapshot_times = {0.999, 1.0, 1.001};
    std::vector<Field> v;
    std::optional<Field> acc;
    Observers obs;
    obs.on_snapshot = [&](const SolverState& s) {
        v.push_back(time_derivative(s, 1));
        if (v.size() == 2) acc = time_derivative(s, 2);
    };
    solve(gauss(g, 0.8, 1.0), gauss(g, 0.3, 1.0), c, obs);
    REQUIRE(v.size() == 3);
    std::vector<double> fd(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) fd[i] = (v[2][i] - v[0][i]) / 2e-3;
    CHECK(max_diff(*acc, Field(g, fd)) <= 1e-4);
}

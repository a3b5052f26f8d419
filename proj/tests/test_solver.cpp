#include <doctest.h>

#include <cmath>
#include <sstream>

#include "delayev/solver.hpp"
#include "delayev/trajectory_io.hpp"
#include "test_helpers.hpp"

using namespace delayev;

TEST_CASE("picard: vanishing Duhamel integrand reproduces the semigroup") {
    ScalarParams p;
    p.a = 1.0;
    p.u0 = 1.0;
    p.channels = {testutil::closed_form_channel(0.0)};
    auto built = build_scalar(p);
    auto report = picard_solve(built.system, 2.0, 0.01, 1e-12, 16);
    CHECK(report.converged);
    CHECK(report.iterations == 1); // one sweep past the initial iterate
    for (std::size_t k = 0; k < report.trajectory.size(); ++k) {
        const double expect = std::exp(-report.trajectory.time(k));
        CHECK(std::abs(report.trajectory.state(k)(0) - expect) <= 1e-10);
    }
}

TEST_CASE("picard agrees with the method-of-steps oracle on a scalar DDE") {
    auto built = testutil::scalar_constant_kernel(1.0, 0.2, 0.3);
    const double t_end = 5.0, dt = 1e-3;
    auto picard = picard_solve(built.system, t_end, dt, 1e-12, 64);
    REQUIRE(picard.converged);
    auto steps = steps_solve(built.system, t_end, dt);
    double sup = 0.0;
    for (std::size_t k = 0; k < steps.size(); ++k)
        sup = std::max(sup,
                       (picard.trajectory.state(k) - steps.state(k)).cwiseAbs().maxCoeff());
    CHECK(sup <= 1e-4);
}

TEST_CASE("picard with zero delay matches the classical ODE reference") {
    // u' = -u + 0.2 u(t) + 0.1 sin(u); the history pins B U(0) = u0.
    ScalarParams p;
    p.a = 1.0;
    p.u0 = 1.0;
    ChannelConfig cc;
    cc.delay = testutil::constant_entry(0.0);
    cc.c = 0.0;
    cc.kernel = testutil::constant_entry(0.2);
    cc.history = testutil::constant_entry(1.0); // = B u0
    cc.b = 1.0;
    p.channels = {cc};
    p.f.kind = "sine";
    p.f.scale = 0.1;
    auto built = build_scalar(p);

    const double t_end = 5.0, dt = 1e-3;
    auto picard = picard_solve(built.system, t_end, dt, 1e-12, 64);
    REQUIRE(picard.converged);
    auto ode = ode_reference(built.system, t_end, dt);
    double sup = 0.0;
    for (std::size_t k = 0; k < ode.size(); ++k)
        sup = std::max(sup,
                       (picard.trajectory.state(k) - ode.state(k)).cwiseAbs().maxCoeff());
    CHECK(sup <= 1e-5);
}

TEST_CASE("first delay interval has an explicit variation-of-constants form") {
    // u' = -u + 0.2 u(t-1), g == 1 on [-1, 0], u0 = 1: on [0, 1]
    // u(t) = e^{-t} + 0.2 (1 - e^{-t}).
    auto built = testutil::scalar_constant_kernel(1.0, 0.2, 1.0);
    const double dt = 1e-3;
    auto steps = steps_solve(built.system, 1.0, dt);
    auto picard = picard_solve(built.system, 1.0, dt, 1e-12, 64);
    REQUIRE(picard.converged);
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const double t = steps.time(k);
        const double exact = std::exp(-t) + 0.2 * (1.0 - std::exp(-t));
        CHECK(std::abs(steps.state(k)(0) - exact) <= 1e-8);
        CHECK(std::abs(picard.trajectory.state(k)(0) - exact) <= 1e-6);
    }
}

TEST_CASE("steps_solve: zero-channel systems reduce to plain RK4") {
    ScalarParams p;
    p.a = 1.0;
    p.u0 = 1.0;
    auto built = build_scalar(p);
    auto steps = steps_solve(built.system, 3.0, 1e-2);
    auto ode = ode_reference(built.system, 3.0, 1e-2);
    for (std::size_t k = 0; k < steps.size(); ++k)
        CHECK(std::abs(steps.state(k)(0) - ode.state(k)(0)) <= 1e-10);
}

TEST_CASE("steps_solve refuses vanishing delays") {
    auto built = testutil::scalar_constant_kernel(1.0, 0.2, 0.05);
    CHECK_THROWS_WITH_AS(steps_solve(built.system, 1.0, 0.01),
                         doctest::Contains("delay too small"), DomainError);
}

TEST_CASE("ode_reference") {
    SUBCASE("pure decay") {
        ScalarParams p;
        p.a = 1.0;
        p.u0 = 1.0;
        auto built = build_scalar(p);
        auto traj = ode_reference(built.system, 4.0, 1e-3);
        for (std::size_t k = 0; k < traj.size(); ++k)
            CHECK(std::abs(traj.norm(k) - std::exp(-traj.time(k))) <= 1e-9);
    }
    SUBCASE("zero-delay feedback shifts the effective rate") {
        ScalarParams p;
        p.a = 1.0;
        p.u0 = 1.0;
        ChannelConfig cc;
        cc.delay = testutil::constant_entry(0.0);
        cc.kernel = testutil::constant_entry(0.5);
        cc.history = testutil::constant_entry(1.0);
        p.channels = {cc};
        auto built = build_scalar(p);
        auto traj = ode_reference(built.system, 4.0, 1e-3);
        for (std::size_t k = 0; k < traj.size(); ++k)
            CHECK(std::abs(traj.state(k)(0) - std::exp(-0.5 * traj.time(k))) <= 1e-9);
    }
    SUBCASE("fourth-order convergence") {
        ScalarParams p;
        p.a = 1.0;
        p.u0 = 1.0;
        p.f.kind = "sine";
        p.f.scale = 0.4;
        auto built = build_scalar(p);
        auto fine = ode_reference(built.system, 2.0, 1e-4); // near-exact reference
        auto coarse = ode_reference(built.system, 2.0, 4e-2);
        auto half = ode_reference(built.system, 2.0, 2e-2);
        const double e_coarse =
            std::abs(coarse.states().back()(0) - fine.states().back()(0));
        const double e_half =
            std::abs(half.states().back()(0) - fine.states().back()(0));
        CHECK(e_coarse / e_half == doctest::Approx(16.0).epsilon(0.35));
    }
    SUBCASE("nonzero delay is a misuse error") {
        auto built = testutil::scalar_constant_kernel(1.0, 0.2, 0.3);
        CHECK_THROWS_AS(ode_reference(built.system, 1.0, 0.01), DomainError);
    }
}

TEST_CASE("verify_envelope") {
    SUBCASE("the zero solution passes with the envelope as the margin") {
        ScalarParams p;
        p.u0 = 0.0;
        p.channels = {testutil::closed_form_channel(0.4, 0.5, 0.0)};
        auto built = build_scalar(p);
        auto rep = build_certificate_report(built.system);
        REQUIRE(rep.passed.decay);
        auto solve = picard_solve(built.system, 5.0, 0.01, 1e-12, 32);
        auto env = verify_envelope(solve, rep);
        CHECK(env.passed);
        // norm == 0, so the worst margin is the smallest envelope value.
        CHECK(env.worst_margin == doctest::Approx(decay_envelope(rep, 5.0)).epsilon(1e-12));
    }
    SUBCASE("artificially doubled states violate a thin envelope") {
        auto built = testutil::scalar_closed_form();
        auto rep = build_certificate_report(built.system);
        REQUIRE(rep.passed.decay);
        auto solve = picard_solve(built.system, 10.0, 0.01, 1e-12, 64);
        CHECK(verify_envelope(solve, rep).passed);
        // Scale the trajectory so it pokes above alpha_tilde e^{1-(omega-L)t}.
        const double blow = 4.0 * std::exp(1.0) * rep.alpha_tilde;
        std::vector<Eigen::VectorXd> doubled;
        for (const auto& u : solve.trajectory.states())
            doubled.push_back(blow * u);
        SolveReport fake = solve;
        fake.trajectory = Trajectory(built.system.space, solve.trajectory.grid(), doubled);
        auto env = verify_envelope(fake, rep);
        CHECK(!env.passed);
        CHECK(env.worst_margin < 0.0);
    }
    SUBCASE("requires a passed decay certificate") {
        auto failing = testutil::scalar_closed_form(4.0);
        auto rep = build_certificate_report(failing.system);
        auto solve = picard_solve(failing.system, 1.0, 0.01, 1e-10, 64);
        CHECK_THROWS_AS(verify_envelope(solve, rep), CertificateError);
    }
}

TEST_CASE("fit_decay_rate") {
    auto s1 = make_euclidean_space(1);
    SUBCASE("exact exponential") {
        std::vector<double> grid;
        std::vector<Eigen::VectorXd> states;
        for (int k = 0; k <= 100; ++k) {
            grid.push_back(0.05 * k);
            states.push_back(Eigen::VectorXd::Constant(1, std::exp(-2.0 * 0.05 * k)));
        }
        Trajectory traj(s1, grid, states);
        auto [rate, intercept] = fit_decay_rate(traj, 1.0, 5.0);
        CHECK(rate == doctest::Approx(-2.0).epsilon(1e-9));
        CHECK(intercept == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("constant norms give rate 0") {
        std::vector<double> grid;
        std::vector<Eigen::VectorXd> states;
        for (int k = 0; k <= 10; ++k) {
            grid.push_back(0.5 * k);
            states.push_back(Eigen::VectorXd::Constant(1, 3.0));
        }
        Trajectory traj(s1, grid, states);
        CHECK(fit_decay_rate(traj, 0.0, 5.0).first ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("zero norm in the window is degenerate") {
        Trajectory traj(s1, {0.0, 1.0, 2.0},
                        {Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1),
                         Eigen::VectorXd::Ones(1)});
        CHECK_THROWS_WITH_AS(fit_decay_rate(traj, 0.0, 2.0),
                             doctest::Contains("degenerate"), DomainError);
    }
}

TEST_CASE("observed Picard contraction stays below the certified constant") {
    auto built = testutil::scalar_closed_form(0.4, "sine", 0.2);
    auto rep = build_certificate_report(built.system);
    REQUIRE(rep.contraction_constant.has_value());
    PicardOptions opts;
    opts.tol = 1e-13;
    opts.max_iter = 80;
    auto solve = picard_solve(built.system, 10.0, 0.01, opts);
    REQUIRE(solve.converged);
    REQUIRE(solve.residual_history.size() >= 3);
    for (std::size_t m = 1; m < solve.residual_history.size(); ++m) {
        if (solve.residual_history[m - 1] < 1e-300)
            break;
        const double ratio = solve.residual_history[m] / solve.residual_history[m - 1];
        CHECK(ratio <= *rep.contraction_constant + 0.05);
    }
}

TEST_CASE("grid refinement gains second order against the steps oracle") {
    auto built = testutil::scalar_constant_kernel(1.0, 0.2, 0.3);
    auto sup_err = [&](double dt) {
        auto picard = picard_solve(built.system, 5.0, dt, 1e-12, 64);
        auto steps = steps_solve(built.system, 5.0, dt);
        double sup = 0.0;
        for (std::size_t k = 0; k < steps.size(); ++k)
            sup = std::max(sup, (picard.trajectory.state(k) - steps.state(k))
                                    .cwiseAbs()
                                    .maxCoeff());
        return sup;
    };
    const double e1 = sup_err(2e-3);
    const double e2 = sup_err(1e-3);
    const double ratio = e1 / e2;
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
}

TEST_CASE("uniqueness: both initial iterates converge to the same trajectory") {
    auto built = testutil::scalar_closed_form(0.4, "sine", 0.2);
    const double tol = 1e-10;
    PicardOptions semigroup_start;
    semigroup_start.tol = tol;
    semigroup_start.max_iter = 80;
    PicardOptions constant_start = semigroup_start;
    constant_start.constant_initial_iterate = true;
    auto a = picard_solve(built.system, 8.0, 0.01, semigroup_start);
    auto b = picard_solve(built.system, 8.0, 0.01, constant_start);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    // Agreement in the solver's own omega'-weighted sup norm.
    CHECK(a.omega_prime_used == b.omega_prime_used);
    double sup = 0.0;
    for (std::size_t k = 0; k < a.trajectory.size(); ++k) {
        const double d = built.system.space->norm(a.trajectory.state(k) -
                                                  b.trajectory.state(k));
        sup = std::max(sup, std::exp(-a.omega_prime_used * a.trajectory.time(k)) * d);
    }
    CHECK(sup <= 10.0 * tol);
}

TEST_CASE("causality: halving the horizon reproduces the prefix bit-for-bit") {
    auto built = testutil::scalar_closed_form(0.4, "sine", 0.2);
    PicardOptions opts;
    opts.tol = 0.0; // run exactly max_iter sweeps
    opts.max_iter = 6;
    opts.throw_on_failure = false;
    auto full = picard_solve(built.system, 2.0, 0.01, opts);
    auto half = picard_solve(built.system, 1.0, 0.01, opts);
    for (std::size_t k = 0; k < half.trajectory.size(); ++k) {
        CHECK(half.trajectory.time(k) == full.trajectory.time(k));
        CHECK(half.trajectory.state(k)(0) == full.trajectory.state(k)(0));
    }
}

TEST_CASE("picard preconditions and non-convergence") {
    auto built = testutil::scalar_closed_form();
    CHECK_THROWS_AS(picard_solve(built.system, 1.0, 0.3, 1e-8, 8), ConfigError);
    try {
        picard_solve(built.system, 10.0, 0.01, 0.0, 2);
        FAIL("expected PicardNonConvergence");
    } catch (const PicardNonConvergence& e) {
        CHECK(e.report.iterations == 2);
        CHECK(!e.report.converged);
        CHECK(e.report.residual_history.size() == 2);
        CHECK(e.residual_history == e.report.residual_history);
    }
}

TEST_CASE("trajectory CSV format") {
    auto built = testutil::scalar_closed_form();
    auto rep = build_certificate_report(built.system);
    auto solve = picard_solve(built.system, 1.0, 0.25, 1e-10, 32);
    std::ostringstream with_env;
    write_trajectory_csv(with_env, solve.trajectory,
                         EnvelopeColumn{rep.alpha_tilde, rep.envelope_rate});
    std::istringstream in(with_env.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,norm_H,envelope,component_0");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        ++rows;
    CHECK(rows == 5);

    std::ostringstream no_env;
    write_trajectory_csv(no_env, solve.trajectory);
    std::istringstream in2(no_env.str());
    std::getline(in2, header);
    CHECK(header == "t,norm_H,component_0");

    // 17 significant digits round-trip.
    std::getline(in2, line);
    const auto first_comma = line.find(',');
    const auto second_comma = line.find(',', first_comma + 1);
    const double norm0 =
        std::stod(line.substr(first_comma + 1, second_comma - first_comma - 1));
    CHECK(norm0 == solve.trajectory.norm(0));
}

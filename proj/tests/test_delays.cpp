#include <doctest.h>

#include <cmath>
#include <random>

#include "delayev/catalog.hpp"
#include "delayev/quadrature.hpp"
#include "test_helpers.hpp"

using namespace delayev;

namespace {

DelayChannel bare_channel(const CatalogEntry& delay_entry, double c,
                          const CatalogEntry& kernel_entry) {
    DelayChannel ch;
    ch.delay = make_delay(delay_entry, c);
    ch.kernel = make_kernel(kernel_entry);
    ch.op_matrix = Eigen::MatrixXd::Identity(1, 1);
    ch.op_norm_b = 1.0;
    ch.history = HistorySegment::from_callback(
        ch.delay.tau0, 1, [](double) { return Eigen::VectorXd::Zero(1); });
    ch.index = 0;
    return ch;
}

/// Independent bisection oracle for s - tau(s) = z on a supplied bracket.
double invert_oracle(const std::function<double(double)>& tau, double z, double lo,
                     double hi) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((mid - tau(mid)) < z ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("phi: constant, zero, and proportional delays") {
    auto ch_const = bare_channel(testutil::constant_entry(0.7), 0.0,
                                 testutil::constant_entry(0.0));
    CHECK(phi(ch_const, 2.0) == doctest::Approx(1.3).epsilon(1e-14));

    auto ch_zero = bare_channel(testutil::constant_entry(0.0), 0.0,
                                testutil::constant_entry(0.0));
    CHECK(phi(ch_zero, 1.5) == 1.5); // zero delays are allowed

    auto ch_lin = bare_channel(testutil::linear_entry(0.0, 0.5), 0.5,
                               testutil::constant_entry(0.0));
    CHECK(phi(ch_lin, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("phi_inverse: closed forms") {
    auto ch_const = bare_channel(testutil::constant_entry(0.7), 0.0,
                                 testutil::constant_entry(0.0));
    for (double z : {-0.6, 0.0, 1.0, 5.0})
        CHECK(phi_inverse(ch_const, z) == doctest::Approx(z + 0.7).epsilon(1e-9));

    auto ch_lin = bare_channel(testutil::linear_entry(0.0, 0.5), 0.5,
                               testutil::constant_entry(0.0));
    for (double z : {0.1, 0.5, 2.0})
        CHECK(phi_inverse(ch_lin, z) == doctest::Approx(2.0 * z).epsilon(1e-9));
}

TEST_CASE("phi_inverse: sinusoidal delay against the bisection oracle") {
    auto ch = bare_channel(testutil::sinusoidal_entry(0.3, 0.2, 1.0), 0.2,
                           testutil::constant_entry(0.0));
    const double got = phi_inverse(ch, 1.0, 1e-12);
    CHECK(got == doctest::Approx(1.4994917815672708).epsilon(1e-10));
    const auto tau = [](double s) { return 0.3 + 0.2 * std::sin(s); };
    CHECK(got == doctest::Approx(invert_oracle(tau, 1.0, 1.0, 2.0)).epsilon(1e-10));
}

TEST_CASE("phi_inverse round trip and monotonicity") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> zs(-0.2, 8.0);
    std::vector<DelayChannel> channels;
    channels.push_back(bare_channel(testutil::constant_entry(0.4), 0.0,
                                    testutil::constant_entry(0.0)));
    channels.push_back(bare_channel(testutil::linear_entry(0.3, 0.2), 0.2,
                                    testutil::constant_entry(0.0)));
    channels.push_back(bare_channel(testutil::sinusoidal_entry(0.5, 0.3, 2.0), 0.6,
                                    testutil::constant_entry(0.0)));
    for (const auto& ch : channels) {
        std::vector<double> pts;
        for (int trial = 0; trial < 100; ++trial)
            pts.push_back(zs(rng));
        std::sort(pts.begin(), pts.end());
        double prev_s = -std::numeric_limits<double>::infinity();
        for (double z : pts) {
            const double tol = 1e-10 * (1.0 + std::abs(z));
            const double s = phi_inverse(ch, z, tol);
            CHECK(std::abs(phi(ch, s) - z) <= tol);
            CHECK(s > prev_s - 1e-9);
            prev_s = s;
        }
    }
}

TEST_CASE("phi_inverse: a delay violating c < 1 fails the bracket expansion") {
    // tau(t) = t declared with c = 0.9: phi is constant, no root exists.
    auto ch = bare_channel(testutil::linear_entry(0.0, 1.0), 0.9,
                           testutil::constant_entry(0.0));
    CHECK_THROWS_AS(phi_inverse(ch, 1.0, 1e-10), ConvergenceError);
}

TEST_CASE("effective_weight") {
    SUBCASE("constant kernel, no slope") {
        auto ch = bare_channel(testutil::constant_entry(0.3), 0.0,
                               testutil::constant_entry(0.8));
        for (double z : {-0.2, 0.0, 1.0, 4.0})
            CHECK(effective_weight(ch, z) == doctest::Approx(0.8).epsilon(1e-12));
    }
    SUBCASE("exponential kernel composed with a constant delay") {
        auto ch = bare_channel(testutil::constant_entry(0.5), 0.0,
                               testutil::exp_kernel_entry(1.0, 1.0));
        for (double z : {0.0, 0.7, 2.0})
            CHECK(effective_weight(ch, z) ==
                  doctest::Approx(std::exp(-(z + 0.5))).epsilon(1e-9));
    }
    SUBCASE("exponential kernel with tau = t/2: weight 2 e^{-2z}") {
        auto ch = bare_channel(testutil::linear_entry(0.0, 0.5), 0.5,
                               testutil::exp_kernel_entry(1.0, 1.0));
        for (double z : {0.1, 0.9, 3.0})
            CHECK(effective_weight(ch, z) ==
                  doctest::Approx(2.0 * std::exp(-2.0 * z)).epsilon(1e-9));
    }
    SUBCASE("nonnegative everywhere") {
        auto ch = bare_channel(testutil::sinusoidal_entry(0.4, 0.2, 1.5), 0.4,
                               testutil::sinusoidal_entry(0.0, 1.0, 3.0));
        std::mt19937 rng(4);
        std::uniform_real_distribution<double> zs(0.0, 6.0);
        for (int trial = 0; trial < 100; ++trial)
            CHECK(effective_weight(ch, zs(rng)) >= 0.0);
    }
}

TEST_CASE("family_tau_star") {
    DelayFamily fam;
    for (double t0 : {0.1, 0.5, 0.3})
        fam.channels.push_back(bare_channel(testutil::constant_entry(t0), 0.0,
                                            testutil::constant_entry(0.0)));
    CHECK(family_tau_star(fam) == 0.5);

    DelayFamily zero;
    zero.channels.push_back(bare_channel(testutil::constant_entry(0.0), 0.0,
                                         testutil::constant_entry(0.0)));
    CHECK(family_tau_star(zero) == 0.0);

    DelayFamily tail;
    tail.channels.push_back(bare_channel(testutil::constant_entry(0.1), 0.0,
                                         testutil::constant_entry(0.0)));
    tail.tail_sup = 0.7;
    CHECK(family_tau_star(tail) == 0.7);

    tail.tail_sup = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(family_tau_star(tail), UnsupportedError);
}

TEST_CASE("delay validation catches declared-but-violated bounds") {
    SUBCASE("slope above the declared c") {
        auto d = make_delay(testutil::linear_entry(0.0, 0.5), 0.1);
        CHECK_THROWS_AS(d.validate(4.0), ConfigError);
    }
    SUBCASE("negative delay values") {
        auto d = make_delay(testutil::linear_entry(0.2, -0.5), 0.0);
        CHECK_THROWS_AS(d.validate(4.0), ConfigError);
    }
    SUBCASE("valid sinusoidal delay passes") {
        auto d = make_delay(testutil::sinusoidal_entry(0.3, 0.2, 1.0), 0.21);
        CHECK_NOTHROW(d.validate(10.0));
    }
}

TEST_CASE("kernel tails") {
    auto kc = make_kernel(testutil::exp_kernel_entry(0.4, 1.0));
    REQUIRE(kc.has_tail());
    const double cut = kc.tail_cutoff(1e-12);
    CHECK(kc.l1_tail(cut) <= 1e-12 * (1.0 + 1e-6));
    CHECK(cut <= 28.0);

    CatalogEntry poly;
    poly.kind = "poly_decay_kernel";
    poly.params["k0"] = 1.0;
    poly.params["p"] = 2.0;
    auto kp = make_kernel(poly);
    REQUIRE(kp.has_tail());
    CHECK(kp.l1_tail(3.0) == doctest::Approx(0.25).epsilon(1e-12));

    auto kconst = make_kernel(testutil::constant_entry(0.2));
    CHECK(!kconst.has_tail());
    auto kzero = make_kernel(testutil::constant_entry(0.0));
    CHECK(kzero.has_tail());
    CHECK(kzero.l1_tail(0.0) == 0.0);

    CatalogEntry table;
    table.kind = "piecewise_table";
    table.times = {0.0, 1.0, 2.0};
    table.values = {1.0, -1.0, 0.0};
    auto kt = make_kernel(table);
    REQUIRE(kt.has_tail());
    // |k| integrates to 1/4 + 1/4 on [0,1] (sign change at 1/2) and 1/2 on [1,2].
    CHECK(kt.l1_tail(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(kt.l1_tail(1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(kt.l1_tail(2.5) == 0.0);
    CHECK(kt.k(3.0) == 0.0);
}

TEST_CASE("family validation") {
    auto space = make_euclidean_space(1);
    SUBCASE("declared operator bound below the computed norm") {
        DelayFamily fam;
        auto ch = bare_channel(testutil::constant_entry(0.1), 0.0,
                               testutil::constant_entry(0.0));
        ch.op_matrix = Eigen::MatrixXd::Constant(1, 1, 2.0);
        ch.op_norm_b = 1.0;
        fam.channels.push_back(ch);
        CHECK_THROWS_AS(fam.validate(*space), ConfigError);
    }
    SUBCASE("non-integrable kernel") {
        DelayFamily fam;
        auto ch = bare_channel(testutil::constant_entry(0.1), 0.0,
                               testutil::constant_entry(0.0));
        ch.kernel.k = [](double t) { return 1.0 / std::max(t, 1e-300); };
        ch.kernel.l1_tail = nullptr;
        fam.channels.push_back(ch);
        CHECK_THROWS_AS(fam.validate(*space), ConfigError);
    }
    SUBCASE("well-formed family passes") {
        DelayFamily fam;
        fam.channels.push_back(bare_channel(testutil::constant_entry(0.3), 0.0,
                                            testutil::exp_kernel_entry(0.4, 1.0)));
        CHECK_NOTHROW(fam.validate(*space));
    }
}

TEST_CASE("adaptive quadrature error budget") {
    auto res = integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0, 1e-13,
                                  1e-12);
    CHECK(res.value == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

    auto sine = integrate_adaptive([](double x) { return std::sin(x); }, 0.0,
                                   3.141592653589793, 1e-13, 1e-12);
    CHECK(std::abs(sine.value - 2.0) <= std::max(sine.error, 1e-12));

    CHECK_THROWS_AS(integrate_adaptive([](double x) { return 1.0 / std::max(x, 1e-300); },
                                       0.0, 1.0, 1e-12, 1e-12, 64),
                    ToleranceError);
}

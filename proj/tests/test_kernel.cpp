#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hprbm/kernel.hpp"
#include "helpers.hpp"

using namespace hprbm;
using Catch::Matchers::WithinAbs;

namespace {

// closed-form 1/t coefficients of log G~ at +-infinity
complex tail_coefficient(const WhitenedModel& m, double alpha, int sign) {
    const complex i{0.0, 1.0};
    const double s = sign >= 0 ? 1.0 : -1.0;
    const complex num = (m.r_plus - m.r_minus) * (m.mu2 - s * i * m.mu1);
    const complex den = (i * m.r_minus - s) * (i * m.r_plus - s);
    return i * (2.0 * (alpha - 1.0) + num / den);
}

} // namespace

TEST_CASE("kernel symbols at simple points") {
    WhitenedModel m = symmetric_model();
    CHECK_THAT(std::abs(kernel_K(m, 0.0, 0.0)), WithinAbs(0.0, 1e-15));
    CHECK_THAT(kernel_K(m, 1.0, 1.0).real(), WithinAbs(0.0, 1e-15)); // 1 + 0 - 1
    CHECK_THAT(kernel_k(m, Side::plus, 2.0, 3.0).real(), WithinAbs(1.0, 1e-15));
    CHECK_THAT(kernel_k(m, Side::minus, 2.0, 3.0).real(), WithinAbs(5.0, 1e-15));
}

TEST_CASE("roots of K in y") {
    auto g = testutil::rng(21);
    for (int it = 0; it < 200; ++it) {
        WhitenedModel m = testutil::random_recurrent(g);
        const double t = testutil::uniform(g, -50.0, 50.0);
        const complex x{0.0, t};
        RootsY r = roots_Y(m, x);

        // K(x, Y_pm(x)) = 0 and the Vieta identities
        CHECK(std::abs(kernel_K(m, x, r.plus)) < 1e-9 * (1 + std::norm(r.plus)));
        CHECK(std::abs(kernel_K(m, x, r.minus)) < 1e-9 * (1 + std::norm(r.minus)));
        CHECK(std::abs(r.plus + r.minus + 2.0 * m.mu2) < 1e-10);
        CHECK(std::abs(r.plus * r.minus - (x * x + 2.0 * m.mu1 * x)) <
              1e-9 * (1 + std::abs(x * x)));

        // branch selection: Re Y_-(it) <= 0 <= Re Y_+(it)
        CHECK(r.minus.real() <= 1e-12);
        CHECK(r.plus.real() >= -1e-12);
    }
}

TEST_CASE("square root decomposition oracle for the discriminant") {
    // sqrt(mu2^2 + t^2 - 2 i mu1 t) = u(t) + i v(t) with explicit u, v
    auto g = testutil::rng(22);
    for (int it = 0; it < 200; ++it) {
        WhitenedModel m = testutil::random_recurrent(g);
        const double t = testutil::uniform(g, -30.0, 30.0);
        const double A = m.mu2 * m.mu2 + t * t;
        const double B2 = 4.0 * m.mu1 * m.mu1 * t * t;
        const double root = std::sqrt(A * A + B2);
        const double u = std::sqrt((A + root) / 2.0);
        double v = std::sqrt(std::max(0.0, (-A + root) / 2.0));
        if (m.mu1 * t > 0) v = -v;

        const complex s = std::sqrt(discriminant(m, complex{0.0, t}));
        CHECK_THAT(s.real(), WithinAbs(u, 1e-10 * (1 + u)));
        CHECK_THAT(s.imag(), WithinAbs(v, 1e-10 * (1 + std::abs(v))));
        CHECK(u >= std::abs(m.mu2) - 1e-12);
    }
}

TEST_CASE("coefficient G: value at zero, limits, symmetry") {
    auto g = testutil::rng(23);
    for (int it = 0; it < 100; ++it) {
        WhitenedModel m = testutil::random_recurrent(g);

        const complex g0 = coefficient_G(m, 0.0);
        CHECK_THAT(g0.imag(), WithinAbs(0.0, 1e-14));
        CHECK(g0.real() > 0.0);
        // the 0/0 guard agrees with the direct quotient just off zero
        CHECK(std::abs(coefficient_G(m, 1e-7) - g0) < 1e-5 * std::abs(g0));

        // hermitian: G(-t) = conj G(t)
        for (double t : {0.3, 1.7, 12.0, 400.0}) {
            CHECK(std::abs(coefficient_G(m, -t) - std::conj(coefficient_G(m, t))) < 1e-13);
        }

        // approach to the closed-form limits
        CHECK(std::abs(coefficient_G(m, 1e9) - coefficient_G_limit(m, +1)) < 1e-7);
        CHECK(std::abs(coefficient_G(m, -1e9) - coefficient_G_limit(m, -1)) < 1e-7);

        // G never touches the closed negative real axis
        for (double t = -80.0; t <= 80.0; t += 0.37) {
            const complex gt = coefficient_G(m, t);
            REQUIRE(std::abs(gt) > 1e-12);
            const bool on_cut = gt.real() < 0.0 && std::abs(gt.imag()) < 1e-12;
            REQUIRE_FALSE(on_cut);
        }
    }
}

TEST_CASE("eps_alpha endpoints and winding") {
    const double alpha = 0.37;
    CHECK(std::abs(eps_alpha(alpha, -INFINITY) - complex{1.0, 0.0}) < 1e-15);
    const complex at_inf = std::exp(complex{0.0, 2 * pi * (alpha - 1.0)});
    CHECK(std::abs(eps_alpha(alpha, INFINITY) - at_inf) < 1e-15);

    std::vector<complex> s;
    s.push_back(eps_alpha(alpha, -INFINITY));
    for (double t = -300.0; t <= 300.0; t += 0.25) s.push_back(eps_alpha(alpha, t));
    s.push_back(eps_alpha(alpha, INFINITY));
    CHECK_THAT(numeric_index(s), WithinAbs(-(1.0 - alpha), 1e-4));
}

TEST_CASE("index of G equals 1 - alpha, index of G~ vanishes") {
    auto g = testutil::rng(24);
    for (int it = 0; it < 25; ++it) {
        WhitenedModel m = testutil::random_recurrent(g);
        const double alpha = geometry(m).alpha;
        auto grid = detail::sinh_grid(1e4, 4096);
        CHECK_THAT(index_of_G(m, grid), WithinAbs(1.0 - alpha, 1e-8));

        std::vector<complex> s;
        s.reserve(grid.size() + 2);
        s.push_back(coefficient_G_limit(m, -1) * eps_alpha(alpha, -INFINITY));
        for (double t : grid) s.push_back(coefficient_G_tilde(m, alpha, t));
        s.push_back(coefficient_G_limit(m, +1) * eps_alpha(alpha, INFINITY));
        CHECK_THAT(numeric_index(s), WithinAbs(0.0, 1e-8));
    }
    // the closed-form symmetric value
    CHECK_THAT(index_of_G(symmetric_model(), detail::sinh_grid(1e4, 2048)),
               WithinAbs(0.5, 1e-9));
}

TEST_CASE("numeric_index rejects under-resolved curves") {
    // two samples a quarter turn + eps apart
    std::vector<complex> s{complex{1.0, 0.0}, std::polar(1.0, 1.8), std::polar(1.0, 3.6)};
    REQUIRE_THROWS_AS(numeric_index(s), UnwrapFailure);
    std::vector<complex> z{complex{1.0, 0.0}, complex{0.0, 0.0}};
    REQUIRE_THROWS_AS(numeric_index(z), DomainMismatch);
}

TEST_CASE("log table: symmetric case is the constant -i pi/2") {
    WhitenedModel m = symmetric_model();
    LogGtildeTable tab = build_log_table(m, 0.5, 1024, 1e4);
    for (std::size_t j = 0; j < tab.grid.size(); j += 37) {
        CHECK(std::abs(tab.values[j] - complex{0.0, -pi / 2}) < 1e-12);
    }
    CHECK(std::abs(tab.limit_value - complex{0.0, -pi / 2}) < 1e-12);
    CHECK(std::abs(tab.c_plus) < 1e-10);
    CHECK(std::abs(tab.c_minus) < 1e-10);
}

TEST_CASE("log table invariants on random models") {
    auto g = testutil::rng(25);
    for (int it = 0; it < 15; ++it) {
        WhitenedModel m = testutil::random_recurrent(g);
        const Geometry geo = geometry(m);
        LogGtildeTable tab = build_log_table(m, geo);

        REQUIRE(tab.grid.size() == tab.values.size());
        // anchor: principal argument at t = 0
        const std::size_t mid = tab.grid.size() / 2;
        REQUIRE(tab.grid[mid] == 0.0);
        CHECK_THAT(tab.values[mid].imag(), WithinAbs(pi * (geo.alpha - 1.0), 1e-12));

        for (std::size_t j = 0; j < tab.grid.size(); j += 11) {
            // real part is the log-magnitude, branch only moves Im
            const complex gt = coefficient_G_tilde(m, geo.alpha, tab.grid[j]);
            CHECK_THAT(tab.values[j].real(), WithinAbs(std::log(std::abs(gt)), 1e-12));
            if (j > 0) {
                CHECK(std::abs(tab.values[j].imag() - tab.values[j - 1].imag()) < pi);
            }
        }

        // endpoint limit: closed form, principal branch (no extra winding)
        const complex glim = coefficient_G_limit(m, -1);
        CHECK(std::abs(tab.limit_value - std::log(glim)) < 1e-9);

        // fitted tail coefficients against the closed form
        const complex cp = tail_coefficient(m, geo.alpha, +1);
        const complex cm = tail_coefficient(m, geo.alpha, -1);
        CHECK(std::abs(tab.c_plus - cp) < 2e-3 * (1 + std::abs(cp)));
        CHECK(std::abs(tab.c_minus - cm) < 2e-3 * (1 + std::abs(cm)));

        // direct check of the expansion h(t) ~ -C/t at a deep tail point
        const double t = 0.71 * tab.truncation();
        const complex h = log_gtilde_at(tab, t) - tab.limit_value;
        CHECK(std::abs(h * t + cp) < 2e-3 * (1 + std::abs(cp)));
    }
}

TEST_CASE("pointwise log G~ follows the table branch") {
    auto g = testutil::rng(26);
    WhitenedModel m = testutil::random_recurrent(g);
    const Geometry geo = geometry(m);
    LogGtildeTable tab = build_log_table(m, geo, 512, 1e3);

    for (std::size_t j = 0; j < tab.grid.size(); j += 7) {
        CHECK(std::abs(log_gtilde_at(tab, tab.grid[j]) - tab.values[j]) < 1e-12);
    }
    // between nodes the exponential returns exactly G~
    for (double t : {0.123, -4.56, 77.7, -301.0}) {
        const complex lg = log_gtilde_at(tab, t);
        const complex gt = coefficient_G_tilde(m, geo.alpha, t);
        CHECK(std::abs(std::exp(lg) - gt) < 1e-12 * (1 + std::abs(gt)));
    }
}

TEST_CASE("log table input validation") {
    WhitenedModel m = symmetric_model();
    REQUIRE_THROWS_AS(build_log_table(m, 0.5, 32, 1e4), DomainMismatch);
    REQUIRE_THROWS_AS(build_log_table(m, 0.5, 1024, 50.0), DomainMismatch);
}

#include <catch2/catch_amalgamated.hpp>

#include "hprbm/model.hpp"
#include "helpers.hpp"

using namespace hprbm;

TEST_CASE("validate accepts the reference models") {
    ModelParams p; // identity covariance, mu = (0,-1), normal reflections
    REQUIRE_NOTHROW(validate(p));

    p.s11 = 2.0;
    p.s12 = 1.0;
    p.s22 = 1.0;
    REQUIRE_NOTHROW(validate(p));
}

TEST_CASE("validate rejects bad covariance") {
    ModelParams p;
    p.s11 = 1.0;
    p.s12 = 2.0;
    p.s22 = 1.0; // det = -3
    REQUIRE_THROWS_AS(validate(p), NotPositiveDefinite);

    p = ModelParams{};
    p.s11 = 0.0;
    REQUIRE_THROWS_AS(validate(p), NotPositiveDefinite);

    p = ModelParams{};
    p.s11 = -1.0;
    REQUIRE_THROWS_AS(validate(p), NotPositiveDefinite);
}

TEST_CASE("validate rejects non-recurrent drift/reflection data") {
    ModelParams p;
    p.mu2 = 0.0; // needs mu2 < 0
    REQUIRE_THROWS_AS(validate(p), NotRecurrent);

    p = ModelParams{};
    p.mu2 = 1.0;
    REQUIRE_THROWS_AS(validate(p), NotRecurrent);

    // boundary case r_plus == mu1/mu2 is excluded (strict inequality)
    p = ModelParams{};
    p.mu1 = 0.5;
    p.mu2 = -1.0;
    p.r_plus = -0.5;
    p.r_minus = 1.0;
    REQUIRE_THROWS_AS(validate(p), NotRecurrent);

    // slopes on the wrong side of the drift direction
    p.r_plus = 0.2;
    REQUIRE_THROWS_AS(validate(p), NotRecurrent);
}

TEST_CASE("whitening matches the worked examples") {
    ModelParams p;
    p.s11 = 2.0;
    p.s12 = 1.0;
    p.s22 = 1.0;
    WhitenedModel w = whiten(p);
    CHECK_THAT(w.t11, Catch::Matchers::WithinAbs(1.0, 1e-14));
    CHECK_THAT(w.t12, Catch::Matchers::WithinAbs(-1.0, 1e-14));
    CHECK_THAT(w.t22, Catch::Matchers::WithinAbs(1.0, 1e-14));

    ModelParams q;
    q.s11 = 4.0;
    q.s12 = 0.0;
    q.s22 = 1.0;
    WhitenedModel w2 = whiten(q);
    CHECK_THAT(w2.t11, Catch::Matchers::WithinAbs(0.5, 1e-14));
    CHECK_THAT(w2.t12, Catch::Matchers::WithinAbs(0.0, 1e-14));
    CHECK_THAT(w2.t22, Catch::Matchers::WithinAbs(1.0, 1e-14));
    CHECK_THAT(w2.jacobian, Catch::Matchers::WithinAbs(0.5, 1e-14));
}

TEST_CASE("whitening produces the unique unit-covariance upper map") {
    auto g = testutil::rng(11);
    for (int it = 0; it < 200; ++it) {
        ModelParams p = testutil::random_full_model(g);
        WhitenedModel w = whiten(p);

        // oracle: T Sigma T^t must be the identity, T upper triangular with
        // positive diagonal (that characterizes it uniquely)
        const double a = w.t11, b = w.t12, d = w.t22;
        REQUIRE(a > 0.0);
        REQUIRE(d > 0.0);
        const double m11 = a * a * p.s11 + 2 * a * b * p.s12 + b * b * p.s22;
        const double m12 = a * d * p.s12 + b * d * p.s22;
        const double m22 = d * d * p.s22;
        CHECK_THAT(m11, Catch::Matchers::WithinAbs(1.0, 1e-12));
        CHECK_THAT(m12, Catch::Matchers::WithinAbs(0.0, 1e-12));
        CHECK_THAT(m22, Catch::Matchers::WithinAbs(1.0, 1e-12));

        const double det = p.s11 * p.s22 - p.s12 * p.s12;
        CHECK_THAT(w.jacobian * std::sqrt(det), Catch::Matchers::WithinAbs(1.0, 1e-12));

        // recurrence survives the coordinate change
        REQUIRE(w.mu2 < 0.0);
        REQUIRE(w.r_plus < w.mu1 / w.mu2);
        REQUIRE(w.mu1 / w.mu2 < w.r_minus);

        // a whitened model re-validates with identity covariance
        ModelParams pw;
        pw.mu1 = w.mu1;
        pw.mu2 = w.mu2;
        pw.r_plus = w.r_plus;
        pw.r_minus = w.r_minus;
        REQUIRE_NOTHROW(validate(pw));
    }
}

TEST_CASE("geometry of the symmetric model") {
    Geometry g = geometry(symmetric_model());
    CHECK_THAT(g.alpha, Catch::Matchers::WithinAbs(0.5, 1e-15));
    CHECK_THAT(g.delta_plus, Catch::Matchers::WithinAbs(3 * pi / 4, 1e-15));
    CHECK_THAT(g.delta_minus, Catch::Matchers::WithinAbs(3 * pi / 4, 1e-15));
    CHECK_THAT(g.r_star_plus, Catch::Matchers::WithinAbs(-1.0, 1e-15));
    CHECK_THAT(g.r_star_minus, Catch::Matchers::WithinAbs(1.0, 1e-15));
}

TEST_CASE("geometry invariants on random models") {
    auto g = testutil::rng(12);
    for (int it = 0; it < 300; ++it) {
        WhitenedModel m = testutil::random_recurrent(g);
        Geometry geo = geometry(m);
        REQUIRE(geo.alpha > 0.0);
        REQUIRE(geo.alpha < 1.0);
        REQUIRE(geo.delta_plus > 0.0);
        REQUIRE(geo.delta_plus < pi);
        REQUIRE(geo.delta_minus > 0.0);
        REQUIRE(geo.delta_minus < pi);
        // the two expressions for alpha agree
        CHECK_THAT((geo.delta_plus + geo.delta_minus - pi) / pi,
                   Catch::Matchers::WithinAbs(geo.alpha, 1e-13));
        // the critical directions are orthogonal: r*_+ r*_- = -1
        CHECK_THAT(geo.r_star_plus * geo.r_star_minus,
                   Catch::Matchers::WithinAbs(-1.0, 1e-12));
        REQUIRE(geo.r_star_plus < 0.0);
        REQUIRE(geo.r_star_minus > 0.0);
    }
}

TEST_CASE("density point mapping") {
    ModelParams p;
    p.s11 = 2.0;
    p.s12 = 1.0;
    p.s22 = 1.0;
    // T = [[1,-1],[0,1]]: (u,v) -> (u - v, v), factor 1
    MappedPoint mp = map_density_point(p, 1.5, 0.5);
    CHECK_THAT(mp.u, Catch::Matchers::WithinAbs(1.0, 1e-14));
    CHECK_THAT(mp.v, Catch::Matchers::WithinAbs(0.5, 1e-14));
    CHECK_THAT(mp.factor, Catch::Matchers::WithinAbs(1.0, 1e-14));

    REQUIRE_THROWS_AS(map_density_point(p, 0.0, -0.1), NegativeHeight);

    // identity covariance leaves the point alone
    ModelParams id;
    MappedPoint mp2 = map_density_point(id, -0.7, 2.0);
    CHECK_THAT(mp2.u, Catch::Matchers::WithinAbs(-0.7, 1e-14));
    CHECK_THAT(mp2.v, Catch::Matchers::WithinAbs(2.0, 1e-14));
    CHECK_THAT(mp2.factor, Catch::Matchers::WithinAbs(1.0, 1e-14));
}

TEST_CASE("mirroring swaps the boundary sides") {
    auto g = testutil::rng(13);
    for (int it = 0; it < 100; ++it) {
        WhitenedModel m = testutil::random_recurrent(g);
        WhitenedModel r = mirrored(m);
        REQUIRE_NOTHROW(validate(ModelParams{1, 0, 1, r.mu1, r.mu2, r.r_plus, r.r_minus}));
        // involution
        WhitenedModel rr = mirrored(r);
        CHECK(rr.mu1 == m.mu1);
        CHECK(rr.r_plus == m.r_plus);
        CHECK(rr.r_minus == m.r_minus);
        // the opening angle is reflection invariant
        CHECK_THAT(geometry(r).alpha, Catch::Matchers::WithinAbs(geometry(m).alpha, 1e-13));
    }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hprbm/density.hpp"
#include "hprbm/simulate.hpp"
#include "helpers.hpp"

using namespace hprbm;

TEST_CASE("identical seeds give identical runs") {
    SimConfig cfg;
    cfg.n_steps = 300'000;
    cfg.burn_in = 50'000;
    cfg.seed = 99;
    const SimResult a = run_simulation(symmetric_model(), cfg);
    const SimResult b = run_simulation(symmetric_model(), cfg);
    REQUIRE(a.cell_mass == b.cell_mass);
    REQUIRE(a.strip_density == b.strip_density);
    CHECK(a.local_time_plus == b.local_time_plus);
    CHECK(a.mean_height == b.mean_height);
    CHECK(a.n_effective == b.n_effective);

    SimConfig other = cfg;
    other.seed = 100;
    const SimResult c = run_simulation(symmetric_model(), other);
    CHECK(a.cell_mass != c.cell_mass);
}

TEST_CASE("configuration guards") {
    SimConfig cfg;
    cfg.step = 0.02;
    REQUIRE_THROWS_AS(cfg.validate(), DomainMismatch);
    cfg.step = 1e-3;
    cfg.burn_in = cfg.n_steps;
    REQUIRE_THROWS_AS(cfg.validate(), DomainMismatch);
    cfg.burn_in = 1000;
    cfg.strip = 0.01; // thinner than sqrt(step)
    REQUIRE_THROWS_AS(cfg.validate(), DomainMismatch);
    cfg.strip = 0.05;
    REQUIRE_NOTHROW(cfg.validate());

    HistogramSpec spec;
    spec.nu = 0;
    REQUIRE_THROWS_AS(spec.validate(), DomainMismatch);
}

TEST_CASE("reflection pushes balance the downward drift") {
    SimConfig cfg;
    cfg.n_steps = 4'000'000;
    cfg.burn_in = 400'000;
    cfg.seed = 7;
    const SimResult res = run_simulation(symmetric_model(), cfg);

    // total local time per unit time converges to -mu2, split by the masses
    const double total = res.local_time_plus + res.local_time_minus;
    CHECK(total == Catch::Approx(1.0).epsilon(0.05));
    CHECK(res.local_time_plus == Catch::Approx(0.5).epsilon(0.1));
    CHECK(res.local_time_minus == Catch::Approx(0.5).epsilon(0.1));
    // the projected chain sits below the true mean height by the known
    // boundary-layer offset 0.5826 sqrt(h)
    const double offset = 0.5826 * std::sqrt(cfg.step);
    CHECK(res.mean_height == Catch::Approx(0.5 - offset).margin(0.018));
    CHECK(res.recorded_steps == 3'600'000);

    auto g = testutil::rng(71);
    const WhitenedModel m = testutil::random_recurrent(g);
    SimConfig rcfg;
    rcfg.n_steps = 2'000'000;
    rcfg.burn_in = 200'000;
    rcfg.seed = 8;
    HistogramSpec wide;
    wide.u_lo = -8.0;
    wide.u_hi = 8.0;
    wide.v_hi = 6.0;
    const SimResult rres = run_simulation(m, rcfg, wide);
    const double rtotal = rres.local_time_plus + rres.local_time_minus;
    CHECK(rtotal == Catch::Approx(-m.mu2).epsilon(0.08));
    const auto [mass_plus, mass_minus] = boundary_masses(m);
    CHECK(rres.local_time_plus == Catch::Approx(mass_plus).epsilon(0.15));
    CHECK(rres.local_time_minus == Catch::Approx(mass_minus).epsilon(0.15));
    CHECK(rres.mean_height == Catch::Approx(-0.5 / m.mu2 - offset).epsilon(0.06));
}

TEST_CASE("occupation histogram matches the reference density") {
    SimConfig cfg;
    cfg.n_steps = 10'000'000;
    cfg.burn_in = 1'000'000;
    cfg.seed = 104729;
    HistogramSpec spec;
    const SimResult res = run_simulation(symmetric_model(), cfg, spec);

    double mass = 0.0;
    for (const double c : res.cell_mass) mass += c;
    CHECK(std::abs(mass - 1.0) < 1e-12);
    CHECK(res.n_effective < res.recorded_steps);

    const std::vector<double> predicted = predicted_cell_mass(
        spec, [](double u, double v) { return symmetric_interior_density(u, v); },
        cfg.effective_strip());
    const DiscrepancyReport rep = compare_histogram(res.cell_mass, res.cell_se, predicted);
    CHECK(rep.cells == spec.nu * spec.nv);
    CHECK(rep.flagged < rep.cells / 10);
    // the only cells no batch reaches are far-tail ones of negligible mass
    CHECK(rep.unseen < rep.cells / 4);
    CHECK(rep.unseen_mass < 0.005);

    // per-cell noise at this run length swamps a fine-grid L1, so aggregate
    // 2x2 blocks before asking for agreement in the mean
    HistogramSpec coarse = spec;
    coarse.nu = spec.nu / 2;
    coarse.nv = spec.nv / 2;
    std::vector<double> coarse_obs(static_cast<std::size_t>(coarse.nu) * coarse.nv, 0.0);
    for (int i = 0; i < spec.nv; ++i) {
        for (int j = 0; j < spec.nu; ++j) {
            coarse_obs[static_cast<std::size_t>(i / 2) * coarse.nu + j / 2] +=
                res.cell_mass[static_cast<std::size_t>(i) * spec.nu + j];
        }
    }
    const std::vector<double> coarse_pred = predicted_cell_mass(
        coarse, [](double u, double v) { return symmetric_interior_density(u, v); },
        cfg.effective_strip());
    double l1 = 0.0;
    for (std::size_t k = 0; k < coarse_obs.size(); ++k) {
        l1 += std::abs(coarse_obs[k] - coarse_pred[k]);
    }
    CHECK(l1 < 0.05);

    // a mismatched model must be flagged loudly
    std::vector<double> wrong = predicted;
    for (double& p : wrong) p *= 1.3;
    const DiscrepancyReport bad = compare_histogram(res.cell_mass, res.cell_se, wrong);
    CHECK(bad.flagged > rep.cells / 8);
    CHECK(bad.l1 > 0.25);

    wrong.pop_back();
    REQUIRE_THROWS_AS(compare_histogram(res.cell_mass, res.cell_se, wrong), GridMismatch);

    // at the minimal width the strip reads high by a stable factor: the
    // projected chain parks mass at y = 0 and piles up just above it
    const double dub = (spec.u_hi - spec.u_lo) / spec.boundary_bins;
    for (int b = 0; b < spec.boundary_bins; ++b) {
        const double uc = spec.u_lo + (b + 0.5) * dub;
        if (std::abs(uc) < 0.3 || std::abs(uc) > 1.0) continue;
        const double ratio = res.strip_density[b] / symmetric_interior_density(uc, 0.0);
        CHECK(ratio > 1.25);
        CHECK(ratio < 1.9);
    }

    // a strip several times wider dilutes the layer; compare against the
    // strip average of the density instead of the trace
    SimConfig wide_strip = cfg;
    wide_strip.n_steps = 4'000'000;
    wide_strip.burn_in = 400'000;
    wide_strip.seed = 21;
    wide_strip.strip = 0.2;
    const SimResult res2 = run_simulation(symmetric_model(), wide_strip, spec);
    auto strip_avg = [&](double u) {
        const double e = wide_strip.strip;
        double acc = 0.0;
        for (int k = 0; k < 8; ++k) {
            const double v = 0.5 * e * (1.0 + detail::gl8_x[k]);
            acc += 0.5 * detail::gl8_w[k] * symmetric_interior_density(u, v);
        }
        return acc;
    };
    const std::vector<double> pred2 = predicted_strip(spec, strip_avg);
    for (int b = 0; b < spec.boundary_bins; ++b) {
        const double uc = spec.u_lo + (b + 0.5) * dub;
        if (std::abs(uc) < 0.3) continue;
        CHECK(std::abs(res2.strip_density[b] - pred2[b]) < 0.04 + 0.12 * pred2[b]);
    }
}

TEST_CASE("refining the step sharpens the vertical marginal") {
    HistogramSpec spec;
    spec.u_lo = -30.0;
    spec.u_hi = 30.0;
    spec.nu = 60;
    spec.v_hi = 8.0;
    spec.nv = 160;
    spec.boundary_bins = 60;

    double prev = 1.0;
    for (const double h : {4e-3, 2e-3, 1e-3}) {
        SimConfig cfg;
        cfg.step = h;
        cfg.n_steps = static_cast<std::uint64_t>(12'000.0 / h / 0.9);
        cfg.burn_in = cfg.n_steps / 10;
        cfg.seed = 13;
        const SimResult res = run_simulation(symmetric_model(), cfg, spec);
        const double sup = testutil::marginal_kolmogorov(res, -1.0);
        CHECK(sup < prev);
        prev = sup;
    }
    CHECK(prev < 0.05);
}

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hprbm/errors.hpp"
#include "hprbm/kernel.hpp"
#include "hprbm/model.hpp"

namespace hprbm {

struct SimConfig {
    double step = 1e-3;
    std::uint64_t n_steps = 1'000'000;
    std::uint64_t burn_in = 100'000;
    std::uint64_t seed = 1;
    double strip = 0.0; // boundary strip width; 0 means sqrt(step)

    double effective_strip() const { return strip > 0.0 ? strip : std::sqrt(step); }

    void validate() const {
        if (!(step > 0.0) || step > 0.01) {
            throw DomainMismatch("step size must lie in (0, 0.01]");
        }
        if (burn_in >= n_steps) throw DomainMismatch("burn-in must be shorter than the run");
        if (effective_strip() < std::sqrt(step) * (1.0 - 1e-12)) {
            throw DomainMismatch("boundary strip cannot be thinner than sqrt(step)");
        }
    }
};

struct HistogramSpec {
    double u_lo = -4.0;
    double u_hi = 4.0;
    double v_hi = 4.0;
    int nu = 40;
    int nv = 20;
    int boundary_bins = 80; // strip bins across [u_lo, u_hi]

    void validate() const {
        if (nu <= 0 || nv <= 0 || boundary_bins <= 0 || !(u_hi > u_lo) || !(v_hi > 0.0)) {
            throw DomainMismatch("histogram layout out of range");
        }
    }
};

struct SimResult {
    SimConfig config;
    HistogramSpec spec;
    // interior histogram over states with y >= strip, normalized to mass 1;
    // the strip itself is reported separately below
    std::vector<double> cell_mass;
    std::vector<double> cell_se;
    std::vector<double> strip_density; // boundary trace estimate pi(u, 0)
    std::vector<double> strip_se;
    double local_time_plus = 0.0; // reflection push rate per unit time, each side
    double local_time_minus = 0.0;
    double local_time_plus_se = 0.0;
    double local_time_minus_se = 0.0;
    double mean_height = 0.0;
    std::uint64_t recorded_steps = 0;
    std::uint64_t n_effective = 0; // states that entered the interior histogram
};

// Euler scheme with projection to the boundary: a proposed point below the
// axis is pushed back along the reflection direction of the side its
// horizontal coordinate landed on, which accrues local time.  The projected
// chain parks an O(sqrt(h)) fraction of its mass at y = 0 exactly, so the
// strip histogram absorbs everything below the strip width and the interior
// histogram only counts states above it.  Statistical errors come from batch
// means over 32 consecutive blocks.
inline SimResult run_simulation(const WhitenedModel& m, const SimConfig& cfg,
                                const HistogramSpec& spec = {}) {
    cfg.validate();
    spec.validate();

    constexpr int kBatches = 32;
    const std::uint64_t batch_len = (cfg.n_steps - cfg.burn_in) / kBatches;
    if (batch_len == 0) throw DomainMismatch("run too short for batch statistics");
    const std::uint64_t recorded = batch_len * kBatches;

    const double h = cfg.step;
    const double sh = std::sqrt(h);
    const double eps = cfg.effective_strip();
    const double du = (spec.u_hi - spec.u_lo) / spec.nu;
    const double dv = spec.v_hi / spec.nv;
    const double dub = (spec.u_hi - spec.u_lo) / spec.boundary_bins;
    const int n_cells = spec.nu * spec.nv;

    std::mt19937_64 rng(cfg.seed);
    auto unit = [&rng]() {
        return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
    };

    double x = 0.0;
    double y = -0.5 / m.mu2;

    std::vector<double> batch_cells(static_cast<std::size_t>(kBatches) * n_cells, 0.0);
    std::vector<double> batch_strip(static_cast<std::size_t>(kBatches) * spec.boundary_bins,
                                    0.0);
    std::vector<double> batch_push_plus(kBatches, 0.0), batch_push_minus(kBatches, 0.0);
    std::vector<std::uint32_t> cell_count(n_cells, 0);
    std::vector<std::uint32_t> strip_count(spec.boundary_bins, 0);
    double push_plus = 0.0, push_minus = 0.0, height_sum = 0.0;
    std::uint64_t n_effective = 0;

    // each batch's cells are normalized to unit mass, so the folded histogram
    // is too; the strip keeps plain occupancy units
    auto flush_batch = [&](int b) {
        double batch_total = 0.0;
        for (const std::uint32_t c : cell_count) batch_total += c;
        for (int c = 0; c < n_cells; ++c) {
            batch_cells[static_cast<std::size_t>(b) * n_cells + c] =
                batch_total > 0.0 ? static_cast<double>(cell_count[c]) / batch_total : 0.0;
        }
        for (int s = 0; s < spec.boundary_bins; ++s) {
            batch_strip[static_cast<std::size_t>(b) * spec.boundary_bins + s] =
                static_cast<double>(strip_count[s]) /
                (static_cast<double>(batch_len) * eps * dub);
        }
        std::fill(cell_count.begin(), cell_count.end(), 0u);
        std::fill(strip_count.begin(), strip_count.end(), 0u);
    };

    const std::uint64_t total = cfg.burn_in + recorded;
    int batch = -1;
    for (std::uint64_t step = 0; step < total; ++step) {
        const double u1 = unit(), u2 = unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        x += m.mu1 * h + sh * radius * std::cos(2.0 * pi * u2);
        y += m.mu2 * h + sh * radius * std::sin(2.0 * pi * u2);
        double push = 0.0;
        bool plus_side = true;
        if (y < 0.0) {
            push = -y;
            plus_side = x >= 0.0;
            x += (plus_side ? m.r_plus : m.r_minus) * push;
            y = 0.0;
        }
        if (step < cfg.burn_in) continue;

        const std::uint64_t rec = step - cfg.burn_in;
        if (rec % batch_len == 0) {
            if (batch >= 0) flush_batch(batch);
            ++batch;
        }
        if (push > 0.0) {
            (plus_side ? push_plus : push_minus) += push;
            if (plus_side) {
                batch_push_plus[batch] += push;
            } else {
                batch_push_minus[batch] += push;
            }
        }
        height_sum += y;
        if (x >= spec.u_lo && x < spec.u_hi) {
            if (y >= eps && y < spec.v_hi) {
                const int j = std::min(static_cast<int>((x - spec.u_lo) / du), spec.nu - 1);
                const int i = std::min(static_cast<int>(y / dv), spec.nv - 1);
                ++cell_count[i * spec.nu + j];
                ++n_effective;
            } else if (y < eps) {
                const int b = static_cast<int>((x - spec.u_lo) / dub);
                ++strip_count[std::min(b, spec.boundary_bins - 1)];
            }
        }
    }
    flush_batch(batch);

    auto fold = [&](const std::vector<double>& batches, int width, std::vector<double>& mean,
                    std::vector<double>& se) {
        mean.assign(width, 0.0);
        se.assign(width, 0.0);
        for (int b = 0; b < kBatches; ++b) {
            for (int c = 0; c < width; ++c) {
                mean[c] += batches[static_cast<std::size_t>(b) * width + c];
            }
        }
        for (double& v : mean) v /= kBatches;
        for (int b = 0; b < kBatches; ++b) {
            for (int c = 0; c < width; ++c) {
                const double d = batches[static_cast<std::size_t>(b) * width + c] - mean[c];
                se[c] += d * d;
            }
        }
        for (double& v : se) v = std::sqrt(v / (kBatches - 1.0) / kBatches);
    };

    SimResult out;
    out.config = cfg;
    out.spec = spec;
    out.recorded_steps = recorded;
    out.n_effective = n_effective;
    fold(batch_cells, n_cells, out.cell_mass, out.cell_se);
    fold(batch_strip, spec.boundary_bins, out.strip_density, out.strip_se);

    const double time_per_batch = static_cast<double>(batch_len) * h;
    std::vector<double> tmp_mean, tmp_se;
    for (double& v : batch_push_plus) v /= time_per_batch;
    for (double& v : batch_push_minus) v /= time_per_batch;
    fold(batch_push_plus, 1, tmp_mean, tmp_se);
    out.local_time_plus = tmp_mean[0];
    out.local_time_plus_se = tmp_se[0];
    fold(batch_push_minus, 1, tmp_mean, tmp_se);
    out.local_time_minus = tmp_mean[0];
    out.local_time_minus_se = tmp_se[0];
    out.mean_height = height_sum / static_cast<double>(recorded);
    return out;
}

struct DiscrepancyReport {
    double sup_abs = 0.0;
    double l1 = 0.0;
    int flagged = 0;      // entries further than three standard errors from prediction
    int unseen = 0;       // entries no batch ever visited (no dispersion estimate)
    double unseen_mass = 0.0; // predicted mass sitting on unseen entries
    int cells = 0;
};

// The three-sigma test only makes sense where the batch spread is observable.
// Far-tail cells are reached in rare clumps of correlated steps, so a run can
// easily record nothing there even when the predicted mass is worth dozens of
// raw counts; such cells are tallied as unseen instead of flagged and their
// predicted mass is reported so the caller can judge whether it is tail dust.
inline DiscrepancyReport compare_histogram(const std::vector<double>& observed,
                                           const std::vector<double>& se,
                                           const std::vector<double>& predicted) {
    if (observed.size() != predicted.size() || se.size() != observed.size()) {
        throw GridMismatch("histogram comparison needs matching layouts");
    }
    DiscrepancyReport rep;
    rep.cells = static_cast<int>(observed.size());
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double d = std::abs(observed[i] - predicted[i]);
        rep.sup_abs = std::max(rep.sup_abs, d);
        rep.l1 += d;
        if (se[i] > 0.0) {
            if (d > 3.0 * se[i]) ++rep.flagged;
        } else if (observed[i] == 0.0 && predicted[i] > 0.0) {
            ++rep.unseen;
            rep.unseen_mass += predicted[i];
        }
    }
    return rep;
}

// cell occupation probabilities implied by a density, via a 2x2 product
// Gauss rule per cell; clipped below v_floor and normalized to unit mass the
// same way the simulator normalizes its interior histogram
template <class Density>
std::vector<double> predicted_cell_mass(const HistogramSpec& spec, Density&& f,
                                        double v_floor = 0.0) {
    const double gx = 0.5773502691896257;
    const double du = (spec.u_hi - spec.u_lo) / spec.nu;
    const double dv = spec.v_hi / spec.nv;
    std::vector<double> mass(static_cast<std::size_t>(spec.nu) * spec.nv, 0.0);
    double total = 0.0;
    for (int i = 0; i < spec.nv; ++i) {
        const double vlo = std::max(i * dv, v_floor);
        const double vhi = (i + 1) * dv;
        if (vhi <= vlo) continue;
        const double vc = 0.5 * (vlo + vhi), hv = 0.5 * (vhi - vlo);
        for (int j = 0; j < spec.nu; ++j) {
            const double uc = spec.u_lo + (j + 0.5) * du;
            double acc = 0.0;
            for (int a = -1; a <= 1; a += 2) {
                for (int b = -1; b <= 1; b += 2) {
                    acc += f(uc + 0.5 * a * gx * du, vc + b * gx * hv);
                }
            }
            const double cell = 0.5 * acc * du * hv;
            mass[static_cast<std::size_t>(i) * spec.nu + j] = cell;
            total += cell;
        }
    }
    if (total > 0.0) {
        for (double& v : mass) v /= total;
    }
    return mass;
}

// boundary trace values implied by a line density, bin-averaged with a
// two-point Gauss rule
template <class LineDensity>
std::vector<double> predicted_strip(const HistogramSpec& spec, LineDensity&& f) {
    const double gx = 0.5773502691896257;
    const double dub = (spec.u_hi - spec.u_lo) / spec.boundary_bins;
    std::vector<double> vals(spec.boundary_bins, 0.0);
    for (int b = 0; b < spec.boundary_bins; ++b) {
        const double uc = spec.u_lo + (b + 0.5) * dub;
        vals[b] = 0.5 * (f(uc - 0.5 * gx * dub) + f(uc + 0.5 * gx * dub));
    }
    return vals;
}

} // namespace hprbm

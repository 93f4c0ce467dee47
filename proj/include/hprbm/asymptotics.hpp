#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "hprbm/errors.hpp"
#include "hprbm/kernel.hpp"
#include "hprbm/model.hpp"

namespace hprbm {

// Decay regime of one lateral density pi_s(u) ~ c |u|^{-kappa} e^{-gamma |u|}.
// The rate is set by whichever singularity of the continued transform lies
// closest to the axis: a square-root branch point (subcritical, kappa = 3/2),
// a simple pole (supercritical, kappa = 0), or their collision (critical,
// kappa = 1/2).
enum class TailRegime { subcritical, critical, supercritical };

struct TailReport {
    Side side = Side::plus;
    TailRegime regime = TailRegime::subcritical;
    double gamma = 0.0;        // exponential decay rate
    double kappa = 0.0;        // algebraic correction exponent
    double branch_point = 0.0; // branch point of the kernel root
    double pole = 0.0;         // zero of the boundary coefficient
    double r_star = 0.0;       // slope at which the two singularities merge
};

inline const char* to_string(TailRegime r) {
    switch (r) {
        case TailRegime::subcritical: return "subcritical";
        case TailRegime::critical: return "critical";
        default: return "supercritical";
    }
}

namespace detail {

inline TailReport plus_tail(const WhitenedModel& m) {
    TailReport rep;
    rep.side = Side::plus;
    rep.branch_point = std::sqrt(m.mu1 * m.mu1 + m.mu2 * m.mu2) - m.mu1;
    rep.pole = 2.0 * (m.r_plus * m.mu2 - m.mu1) / (1.0 + m.r_plus * m.r_plus);
    rep.r_star = geometry(m).r_star_plus;

    if (std::abs(m.r_plus - rep.r_star) <= 1e-9 * (1.0 + std::abs(rep.r_star))) {
        rep.regime = TailRegime::critical;
        rep.gamma = m.mu2 / m.r_plus;
        rep.kappa = 0.5;
    } else if (m.r_plus < rep.r_star) {
        // the coefficient zero sits on the second sheet; the branch point rules
        rep.regime = TailRegime::subcritical;
        rep.gamma = rep.branch_point;
        rep.kappa = 1.5;
    } else {
        rep.regime = TailRegime::supercritical;
        rep.gamma = rep.pole;
        rep.kappa = 0.0;
    }
    return rep;
}

} // namespace detail

inline TailReport tail_report(const WhitenedModel& m, Side side) {
    if (side == Side::plus) return detail::plus_tail(m);
    TailReport rep = detail::plus_tail(mirrored(m));
    rep.side = Side::minus;
    rep.r_star = -rep.r_star; // back to the original orientation
    return rep;
}

// Angular factor of the density near the origin: along the ray at angle
// theta from the boundary, pi ~ C r^{-alpha} sin(delta_plus - alpha theta).
inline double origin_profile(const Geometry& geom, double theta) {
    if (theta < 0.0 || theta > pi) {
        throw DomainMismatch("origin profile angle must lie in [0, pi]");
    }
    return std::sin(geom.delta_plus - geom.alpha * theta);
}

struct TailFit {
    double gamma = 0.0;
    double kappa = 0.0;
    double log_c = 0.0;
    double residual = 0.0; // rms misfit of log density
};

// Least-squares fit of log p = log_c - kappa log u - gamma u on positive
// samples.  Refuses data sets too short or too narrow to separate the
// algebraic factor from the exponential one.
inline TailFit fit_tail(const std::vector<double>& us, const std::vector<double>& ps) {
    if (us.size() != ps.size()) throw GridMismatch("tail fit inputs differ in length");
    if (us.size() < 20) throw InsufficientRange("tail fit needs at least 20 samples");
    double lo = us.front(), hi = us.front();
    for (double u : us) {
        if (u <= 0.0) throw InsufficientRange("tail fit abscissae must be positive");
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    if (hi < 4.0 * lo) {
        throw InsufficientRange("tail fit needs a span of at least a factor of 4");
    }

    double a[3][3] = {};
    double b[3] = {};
    for (std::size_t i = 0; i < us.size(); ++i) {
        if (!(ps[i] > 1e-300)) {
            throw InsufficientRange("tail fit sample is not positive");
        }
        const double f[3] = {1.0, -std::log(us[i]), -us[i]};
        const double y = std::log(ps[i]);
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) a[r][c] += f[r] * f[c];
            b[r] += f[r] * y;
        }
    }

    // gaussian elimination with partial pivoting on the 3x3 normal system
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(a[perm[r]][col]) > std::abs(a[perm[best]][col])) best = r;
        }
        std::swap(perm[col], perm[best]);
        const double piv = a[perm[col]][col];
        if (std::abs(piv) < 1e-300) throw InsufficientRange("tail fit system is singular");
        for (int r = col + 1; r < 3; ++r) {
            const double w = a[perm[r]][col] / piv;
            for (int c = col; c < 3; ++c) a[perm[r]][c] -= w * a[perm[col]][c];
            b[perm[r]] -= w * b[perm[col]];
        }
    }
    double x[3];
    for (int col = 2; col >= 0; --col) {
        double s = b[perm[col]];
        for (int c = col + 1; c < 3; ++c) s -= a[perm[col]][c] * x[c];
        x[col] = s / a[perm[col]][col];
    }

    double ss = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i) {
        const double r = std::log(ps[i]) - (x[0] - x[1] * std::log(us[i]) - x[2] * us[i]);
        ss += r * r;
    }
    return {x[2], x[1], x[0], std::sqrt(ss / static_cast<double>(us.size()))};
}

} // namespace hprbm

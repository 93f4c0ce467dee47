#pragma once

#include <cmath>
#include <sstream>

#include "hprbm/common.hpp"
#include "hprbm/errors.hpp"

namespace hprbm {

// Problem data as given: covariance, drift, and the two reflection slopes.
// Reflection vectors are R_± = (r_±, 1)^t, so trajectories hitting the
// boundary from the ± side are pushed back along (r_±, 1).
struct ModelParams {
    double s11 = 1.0, s12 = 0.0, s22 = 1.0; // covariance entries (symmetric)
    double mu1 = 0.0, mu2 = -1.0;
    double r_plus = -1.0, r_minus = 1.0;
};

// Same model after the linear change of coordinates that turns the
// covariance into the identity. `t11..t22` is the upper-triangular map,
// `jacobian` its determinant (= 1/sqrt(det Sigma)).
struct WhitenedModel {
    double mu1 = 0.0, mu2 = -1.0;
    double r_plus = -1.0, r_minus = 1.0;
    double t11 = 1.0, t12 = 0.0, t22 = 1.0;
    double jacobian = 1.0;
};

// Derived angular quantities of a whitened model.
struct Geometry {
    double alpha = 0.5;        // (arctan r_- - arctan r_+)/pi, in (0,1)
    double delta_plus = 0.0;   // pi/2 - arctan r_+
    double delta_minus = 0.0;  // pi/2 + arctan r_-
    double r_star_plus = 0.0;  // rho - sqrt(rho^2+1), rho = mu1/mu2
    double r_star_minus = 0.0; // rho + sqrt(rho^2+1)
};

namespace detail {
inline void check_recurrence(double mu1, double mu2, double rp, double rm) {
    if (!(mu2 < 0.0)) {
        std::ostringstream os;
        os << "not positively recurrent: mu2 = " << mu2 << " must be negative";
        throw NotRecurrent(os.str());
    }
    const double rho = mu1 / mu2 + 0.0; // folds the negative zero of mu1 = 0
    if (!(rp < rho && rho < rm)) {
        std::ostringstream os;
        os << "not positively recurrent: need r_plus < mu1/mu2 < r_minus, got "
           << rp << " < " << rho << " < " << rm;
        throw NotRecurrent(os.str());
    }
}
} // namespace detail

// Validates SPD covariance (leading principal minors, tolerance 1e-12) and
// the strict drift/reflection recurrence condition.
inline void validate(const ModelParams& p) {
    const double det = p.s11 * p.s22 - p.s12 * p.s12;
    if (!(p.s11 > 1e-12) || !(det > 1e-12)) {
        std::ostringstream os;
        os << "covariance not positive definite: s11 = " << p.s11
           << ", det = " << det;
        throw NotPositiveDefinite(os.str());
    }
    detail::check_recurrence(p.mu1, p.mu2, p.r_plus, p.r_minus);
}

// Unique upper-triangular T with T Sigma T^t = I that maps the half-plane
// to itself: T = [[s22, -s12], [0, sqrt(det)]] / sqrt(s22 det).
inline WhitenedModel whiten(const ModelParams& p) {
    validate(p);
    const double det = p.s11 * p.s22 - p.s12 * p.s12;
    const double denom = std::sqrt(p.s22 * det);
    WhitenedModel w;
    w.t11 = p.s22 / denom;
    w.t12 = -p.s12 / denom + 0.0; // a diagonal sigma gives plain zero, not -0
    w.t22 = std::sqrt(det) / denom; // = 1/sqrt(s22)
    w.jacobian = w.t11 * w.t22;     // = 1/sqrt(det)
    w.mu1 = w.t11 * p.mu1 + w.t12 * p.mu2;
    w.mu2 = w.t22 * p.mu2;
    // image of (r, 1) under T, renormalized to second component 1
    w.r_plus = (w.t11 * p.r_plus + w.t12) / w.t22;
    w.r_minus = (w.t11 * p.r_minus + w.t12) / w.t22;
    detail::check_recurrence(w.mu1, w.mu2, w.r_plus, w.r_minus);
    return w;
}

inline Geometry geometry(const WhitenedModel& m) {
    detail::check_recurrence(m.mu1, m.mu2, m.r_plus, m.r_minus);
    Geometry g;
    g.alpha = (std::atan(m.r_minus) - std::atan(m.r_plus)) / pi;
    g.delta_plus = pi / 2 - std::atan(m.r_plus);
    g.delta_minus = pi / 2 + std::atan(m.r_minus);
    const double rho = m.mu1 / m.mu2;
    const double s = std::sqrt(rho * rho + 1.0);
    g.r_star_plus = rho - s;
    g.r_star_minus = rho + s;
    return g;
}

// Pulls an original-coordinates point back through the whitening map and
// returns the density scale factor: pi(u, v) = factor * pi~(point).
struct MappedPoint {
    double u = 0.0, v = 0.0;
    double factor = 1.0;
};

inline MappedPoint map_density_point(const ModelParams& p, double u, double v) {
    if (v < 0.0) {
        std::ostringstream os;
        os << "point below the boundary: v = " << v;
        throw NegativeHeight(os.str());
    }
    validate(p);
    const double det = p.s11 * p.s22 - p.s12 * p.s12;
    MappedPoint out;
    out.u = (p.s22 * u - p.s12 * v) / std::sqrt(p.s22 * det);
    out.v = v / std::sqrt(p.s22);
    out.factor = 1.0 / std::sqrt(det);
    return out;
}

// Reflection u -> -u of the whitened model: swaps the roles of the two
// boundary sides. Minus-side tail machinery runs plus-side code on this.
inline WhitenedModel mirrored(const WhitenedModel& m) {
    WhitenedModel r = m;
    r.mu1 = -m.mu1;
    r.r_plus = -m.r_minus;
    r.r_minus = -m.r_plus;
    return r;
}

// A model that is already in whitened coordinates (identity covariance).
inline WhitenedModel standard_model(double mu1, double mu2, double rp, double rm) {
    detail::check_recurrence(mu1, mu2, rp, rm);
    WhitenedModel w;
    w.mu1 = mu1;
    w.mu2 = mu2;
    w.r_plus = rp;
    w.r_minus = rm;
    return w;
}

// The closed-form test case: standard normal covariance, drift (0, -1),
// normal reflection on both sides.
inline WhitenedModel symmetric_model() { return standard_model(0.0, -1.0, -1.0, 1.0); }

} // namespace hprbm

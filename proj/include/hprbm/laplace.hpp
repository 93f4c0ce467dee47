#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include "hprbm/cauchy.hpp"
#include "hprbm/errors.hpp"
#include "hprbm/kernel.hpp"
#include "hprbm/model.hpp"

namespace hprbm {

struct LateralPair {
    complex plus;
    complex minus;
};

// Values of the two boundary transforms at the origin, fixed by the drift:
//   phi_plus(0) + phi_minus(0)          = -mu2
//   r_plus phi_plus(0) + r_minus phi_minus(0) = -mu1
inline std::pair<double, double> boundary_masses(const WhitenedModel& m) {
    const double span = m.r_minus - m.r_plus;
    return {(m.mu1 - m.mu2 * m.r_minus) / span, -(m.mu1 - m.mu2 * m.r_plus) / span};
}

// Precomputed factorization data for one model.  The boundary transforms are
//
//   phi_+(x) = lambda e^{+i pi (1-alpha)} (z+i)^{-(1-alpha)} exp(F(z)),
//   phi_-(x) = lambda e^{-i pi (1-alpha)} (z-i)^{-(1-alpha)} exp(F(z)),
//
// with z = -ix, F the Cauchy transform of log G~ and lambda > 0 pinned by the
// boundary masses.  phi_+ lives on Re x <= 0, phi_- on Re x >= 0; they share
// the imaginary axis, where their ratio is G.
struct LateralTransformEngine {
    WhitenedModel model;
    Geometry geom;
    LogGtildeTable table;
    QuadratureConfig quad;
    double lambda = 0.0;
    double phi0_plus = 0.0;
    double phi0_minus = 0.0;
};

namespace detail {

inline complex branch_power(const Geometry& geom, complex w) {
    return std::exp(-(1.0 - geom.alpha) * std::log(w));
}

inline complex side_phase(const Geometry& geom, Side side) {
    const double a = pi * (1.0 - geom.alpha);
    return std::exp(complex{0.0, side == Side::plus ? a : -a});
}

} // namespace detail

// Both transforms at x = it, sharing one principal-value integral.
inline LateralPair phi_pair_on_axis(const LateralTransformEngine& eng, double t) {
    const complex pv = cauchy_pv(eng.table, t, eng.quad);
    const complex lg = log_gtilde_at(eng.table, t);
    const complex common = eng.lambda * std::exp(pv);
    LateralPair out;
    out.plus = common * detail::side_phase(eng.geom, Side::plus) *
               detail::branch_power(eng.geom, complex{t, 1.0}) * std::exp(0.5 * lg);
    out.minus = common * detail::side_phase(eng.geom, Side::minus) *
                detail::branch_power(eng.geom, complex{t, -1.0}) * std::exp(-0.5 * lg);
    return out;
}

// One boundary transform on its natural closed half-plane.
inline complex phi_lateral(const LateralTransformEngine& eng, Side side, complex x) {
    if (std::abs(x.real()) < 1e-10) {
        const LateralPair p = phi_pair_on_axis(eng, x.imag());
        return side == Side::plus ? p.plus : p.minus;
    }
    if (side == Side::plus && x.real() > 0.0) {
        throw WrongHalfPlane("phi_plus is only defined for Re x <= 0");
    }
    if (side == Side::minus && x.real() < 0.0) {
        throw WrongHalfPlane("phi_minus is only defined for Re x >= 0");
    }
    const complex z{x.imag(), -x.real()};
    const complex f = cauchy_offaxis(eng.table, z, eng.quad);
    const complex shift = side == Side::plus ? complex{0.0, 1.0} : complex{0.0, -1.0};
    return eng.lambda * detail::side_phase(eng.geom, side) *
           detail::branch_power(eng.geom, z + shift) * std::exp(f);
}

// Analytic continuation across the imaginary axis through the boundary
// relation   k_+(x, Y^-(x)) phi_+(x) + k_-(x, Y^-(x)) phi_-(x) = 0,
// valid up to the first zero of the coefficient in front of the target side
// (the pole of the continued transform) or the branch point of Y^-.
inline complex phi_continued(const LateralTransformEngine& eng, Side side, complex x) {
    const bool native =
        side == Side::plus ? x.real() <= 0.0 : x.real() >= 0.0;
    if (native) return phi_lateral(eng, side, x);

    const complex ym = roots_Y(eng.model, x).minus;
    const Side other = side == Side::plus ? Side::minus : Side::plus;
    const complex den = kernel_k(eng.model, side, x, ym);
    if (std::abs(den) < 1e-12 * (1.0 + std::abs(x) + std::abs(ym))) {
        throw KernelZero("continued transform evaluated at its pole");
    }
    return -kernel_k(eng.model, other, x, ym) / den * phi_lateral(eng, other, x);
}

// Transform of the interior density in u only: integral of pi(u,v) e^{itu} du
// at fixed height v.  The v-dependence solves out of the kernel relation as a
// pure exponential with rate Y^+(it).
inline complex partial_transform(const LateralTransformEngine& eng, double t, double v) {
    if (v < 0.0) throw NegativeHeight("partial transform requested below the boundary");
    const LateralPair p = phi_pair_on_axis(eng, t);
    const complex yp = roots_Y(eng.model, complex{0.0, t}).plus;
    return 2.0 * (p.plus + p.minus) * std::exp(-yp * v);
}

// Full bivariate transform on the imaginary axis.  The generic expression
// -(k_+ phi_+ + k_- phi_-)/K degenerates to 0/0 as y approaches Y^-; there we
// switch to the reduced form, which divides by y - Y^+ only.  y = Y^+ is a
// genuine pole.
inline complex phi_bivariate(const LateralTransformEngine& eng, complex x, complex y) {
    if (std::abs(x.real()) > 1e-10) {
        throw WrongHalfPlane("bivariate transform is evaluated on the imaginary axis");
    }
    const double t = x.imag();
    const LateralPair p = phi_pair_on_axis(eng, t);
    const RootsY roots = roots_Y(eng.model, complex{0.0, t});
    const double scale = 1.0 + std::abs(y) + std::abs(roots.plus);

    if (std::abs(y - roots.plus) < 1e-9 * scale) {
        throw KernelZero("bivariate transform evaluated at its pole in y");
    }
    if (std::abs(y - roots.minus) < 1e-6 * scale) {
        return 2.0 * (p.plus + p.minus) / (roots.plus - y);
    }
    const complex num = kernel_k(eng.model, Side::plus, x, y) * p.plus +
                        kernel_k(eng.model, Side::minus, x, y) * p.minus;
    return -num / kernel_K(eng.model, x, y);
}

inline LateralTransformEngine build_engine(const WhitenedModel& m,
                                           const QuadratureConfig& cfg = {}) {
    cfg.validate();
    LateralTransformEngine eng;
    eng.model = m;
    eng.geom = geometry(m);
    eng.table = build_log_table(m, eng.geom, cfg.n_points, cfg.truncation);
    eng.quad = cfg;

    const auto [mass_plus, mass_minus] = boundary_masses(m);
    eng.phi0_plus = mass_plus;
    eng.phi0_minus = mass_minus;

    // At t = 0 the branch factors collapse to sqrt(G(0)), which is real and
    // positive, so the principal value there determines lambda directly.
    const complex pv0 = cauchy_pv(eng.table, 0.0, cfg);
    const double g0 = coefficient_G(m, 0.0).real();
    const complex raw = mass_plus / (std::sqrt(g0) * std::exp(pv0));
    if (!std::isfinite(raw.real()) || raw.real() <= 0.0 ||
        std::abs(raw.imag()) > 64.0 * cfg.rel_tol * std::abs(raw)) {
        throw NormalizationMismatch("normalizing constant is not a positive real");
    }
    eng.lambda = raw.real();

    // Independent consistency probe: the transforms of a real measure must be
    // hermitian, which exercises the grid symmetry and branch bookkeeping.
    const double probe = 1.7;
    const complex a = phi_pair_on_axis(eng, probe).plus;
    const complex b = phi_pair_on_axis(eng, -probe).plus;
    if (std::abs(a - std::conj(b)) > 1e-6 * (1.0 + std::abs(a))) {
        throw NormalizationMismatch("boundary transform lost hermitian symmetry");
    }
    return eng;
}

} // namespace hprbm

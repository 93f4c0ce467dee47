#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "hprbm/common.hpp"
#include "hprbm/errors.hpp"
#include "hprbm/kernel.hpp"

namespace hprbm {

// Settings shared by the Cauchy-transform and inversion quadratures.
struct QuadratureConfig {
    std::size_t n_points = 4096; // log G~ table nodes
    double truncation = 1e4;     // table half-width T
    double pv_window = 1e-8;     // |Im z| below this counts as "on the axis"
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;

    void validate() const {
        if (n_points < 64) throw DomainMismatch("quadrature needs n_points >= 64");
        if (!(truncation >= 1e2)) throw DomainMismatch("quadrature needs truncation >= 1e2");
        if (!(pv_window > 0.0) || !(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw DomainMismatch("quadrature tolerances must be positive");
    }
};

namespace detail {

// 8-point Gauss-Legendre rule on [-1, 1]
inline constexpr double gl8_x[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498, 0.5255324099163290,
    0.7966664774136267, 0.9602898564975363};
inline constexpr double gl8_w[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

// panel boundaries: every 4th table node (endpoints always included)
inline std::vector<double> panels_from_grid(const std::vector<double>& grid) {
    std::vector<double> p;
    p.reserve(grid.size() / 4 + 2);
    for (std::size_t j = 0; j < grid.size(); j += 4) p.push_back(grid[j]);
    if (p.back() != grid.back()) p.push_back(grid.back());
    return p;
}

template <typename F>
complex stencil_deriv(F&& f, double t, double scale) {
    const double h = 5e-4 * (1.0 + std::abs(t) / 8.0) * scale;
    return (f(t - 2 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2 * h)) / (12.0 * h);
}

// closed-form integral of the fitted tails -c_pm / tau over |tau| > T
inline complex tail_integral(complex cplus, complex cminus, complex z, double T) {
    if (std::abs(z) < 1e-6 * T) {
        return -(cplus + cminus) / T - (cplus - cminus) * z / (2.0 * T * T);
    }
    return (cplus / z) * log1p_c(-z / T) - (cminus / z) * log1p_c(z / T);
}

} // namespace detail

// F(z) = sign(Im z) L_inf/2 + (1/2 i pi) int h(tau)/(tau - z) dtau for
// h = f - L_inf, where f is the unwrapped log G~ (or any sampled symbol
// with the same 1/tau tail structure). The integrand is evaluated
// pointwise; the pole is removed by first-order subtraction at
// t0 = Re z (windowed, with exact moment integrals), so accuracy is
// uniform in the distance to the axis.
template <typename F>
complex cauchy_offaxis_with(const std::vector<double>& grid, F&& f, complex linf,
                            complex cplus, complex cminus, complex z,
                            const QuadratureConfig& cfg) {
    if (std::abs(z.imag()) < cfg.pv_window) {
        std::ostringstream os;
        os << "|Im z| = " << std::abs(z.imag()) << " is below the axis window "
           << cfg.pv_window << "; use the principal-value form";
        throw OnRealAxis(os.str());
    }
    const double T = grid.back();
    const double t0 = std::clamp(z.real(), 0.95 * grid.front(), 0.95 * T);
    const complex h0 = f(t0) - linf;

    const std::vector<double> panels = detail::panels_from_grid(grid);

    // first-order subtraction window: generous relative to the local panel
    // width so the pole region is always covered by exact moments
    const bool near_axis = std::abs(z.imag()) < 2.0;
    complex h1{0.0, 0.0};
    double wa = 0.0, wb = 0.0;
    if (near_axis) {
        const std::size_t pj = std::min<std::size_t>(
            panels.size() - 2,
            std::upper_bound(panels.begin(), panels.end(), t0) - panels.begin() - 1);
        const double local = panels[pj + 1] - panels[pj];
        const double r = std::max(1.5, 2.5 * local);
        h1 = detail::stencil_deriv(f, t0, 1.0);
        wa = std::max(grid.front(), t0 - r);
        wb = std::min(T, t0 + r);
    }
    complex sum{0.0, 0.0};
    for (std::size_t p = 0; p + 1 < panels.size(); ++p) {
        const double a = panels[p], b = panels[p + 1];
        const bool in_window = near_axis && a >= wa - 1e-12 && b <= wb + 1e-12;
        const double xm = 0.5 * (a + b), xr = 0.5 * (b - a);
        complex acc{0.0, 0.0};
        for (int q = 0; q < 8; ++q) {
            const double tau = xm + xr * detail::gl8_x[q];
            complex num = f(tau) - linf - h0;
            if (in_window) num -= h1 * (tau - t0);
            acc += detail::gl8_w[q] * num / (tau - z);
        }
        sum += xr * acc;
    }

    // exact moments of the subtracted terms
    const complex I0 = std::log(T - z) - std::log(-T - z);
    sum += h0 * I0;
    if (near_axis) {
        // the union of panels flagged above, so the moment matches exactly
        double ua = wb, ub = wa;
        for (std::size_t p = 0; p + 1 < panels.size(); ++p) {
            if (panels[p] >= wa - 1e-12 && panels[p + 1] <= wb + 1e-12) {
                ua = std::min(ua, panels[p]);
                ub = std::max(ub, panels[p + 1]);
            }
        }
        if (ua < ub) {
            const complex M1 = (ub - ua) + (z - t0) * (std::log(ub - z) - std::log(ua - z));
            sum += h1 * M1;
        }
    }
    sum += detail::tail_integral(cplus, cminus, z, T);

    const double sigma = z.imag() > 0.0 ? 1.0 : -1.0;
    return sigma * linf / 2.0 + sum / complex{0.0, 2.0 * pi};
}

// (1/2 i pi) p.v. int f(tau)/(tau - t) dtau with the symmetric truncation
// at infinity; the constant L_inf part cancels exactly in that limit and
// is handled in closed form together with the 1/tau tails.
template <typename F>
complex cauchy_pv_with(const std::vector<double>& grid, F&& f, complex linf,
                       complex cplus, complex cminus, double t,
                       const QuadratureConfig& cfg) {
    (void)cfg;
    const double T = grid.back();
    if (!(std::abs(t) <= 0.98 * T)) {
        std::ostringstream os;
        os << "principal value point t = " << t << " outside the safe table range "
           << 0.98 * T;
        throw DomainMismatch(os.str());
    }
    const complex ht = f(t) - linf;
    bool deriv_ready = false;
    complex deriv{0.0, 0.0};

    const std::vector<double> panels = detail::panels_from_grid(grid);
    complex sum{0.0, 0.0};
    for (std::size_t p = 0; p + 1 < panels.size(); ++p) {
        const double a = panels[p], b = panels[p + 1];
        const double xm = 0.5 * (a + b), xr = 0.5 * (b - a);
        complex acc{0.0, 0.0};
        for (int q = 0; q < 8; ++q) {
            const double tau = xm + xr * detail::gl8_x[q];
            const double d = tau - t;
            if (std::abs(d) < 1e-11 * (1.0 + std::abs(tau))) {
                if (!deriv_ready) {
                    deriv = detail::stencil_deriv(f, t, 1.0);
                    deriv_ready = true;
                }
                acc += detail::gl8_w[q] * deriv;
            } else {
                acc += detail::gl8_w[q] * (f(tau) - linf - ht) / d;
            }
        }
        sum += xr * acc;
    }
    sum += ht * std::log((T - t) / (T + t));
    sum += detail::tail_integral(cplus, cminus, complex{t, 0.0}, T);
    return sum / complex{0.0, 2.0 * pi};
}

inline complex cauchy_offaxis(const LogGtildeTable& tab, complex z,
                              const QuadratureConfig& cfg) {
    return cauchy_offaxis_with(
        tab.grid, [&tab](double tau) { return log_gtilde_at(tab, tau); },
        tab.limit_value, tab.c_plus, tab.c_minus, z, cfg);
}

inline complex cauchy_pv(const LogGtildeTable& tab, double t, const QuadratureConfig& cfg) {
    return cauchy_pv_with(
        tab.grid, [&tab](double tau) { return log_gtilde_at(tab, tau); },
        tab.limit_value, tab.c_plus, tab.c_minus, t, cfg);
}

} // namespace hprbm

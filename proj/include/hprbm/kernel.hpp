#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "hprbm/common.hpp"
#include "hprbm/errors.hpp"
#include "hprbm/model.hpp"

namespace hprbm {

enum class Side { plus, minus };

inline double slope(const WhitenedModel& m, Side s) {
    return s == Side::plus ? m.r_plus : m.r_minus;
}

// K(x,y) = (x^2+y^2)/2 + mu1 x + mu2 y, the symbol of the generator.
inline complex kernel_K(const WhitenedModel& m, complex x, complex y) {
    return 0.5 * (x * x + y * y) + m.mu1 * x + m.mu2 * y;
}

// k_pm(x,y) = r_pm x + y, the symbols of the boundary generators.
inline complex kernel_k(const WhitenedModel& m, Side s, complex x, complex y) {
    return slope(m, s) * x + y;
}

// Roots in y of K(x, y) = 0: Y_pm(x) = -mu2 +- sqrt(mu2^2 - 2 mu1 x - x^2),
// principal square root. On the imaginary axis Re Y_- <= 0 <= Re Y_+.
struct RootsY {
    complex plus;
    complex minus;
};

inline complex discriminant(const WhitenedModel& m, complex x) {
    return m.mu2 * m.mu2 - 2.0 * m.mu1 * x - x * x;
}

inline RootsY roots_Y(const WhitenedModel& m, complex x) {
    const complex s = std::sqrt(discriminant(m, x));
    return {-m.mu2 + s, -m.mu2 - s};
}

// G(t) = -(r_- it - mu2 - sqrt(D)) / (r_+ it - mu2 - sqrt(D)) with
// D = mu2^2 - 2 i mu1 t + t^2. Near t = 0 the quotient is evaluated by its
// limit -(mu1 - r_- mu2)/(mu1 - r_+ mu2) to avoid 0/0 noise.
inline complex coefficient_G(const WhitenedModel& m, double t) {
    if (std::abs(t) < 1e-8) {
        return complex{-(m.mu1 - m.r_minus * m.mu2) / (m.mu1 - m.r_plus * m.mu2), 0.0};
    }
    const complex it{0.0, t};
    const complex s = std::sqrt(discriminant(m, it));
    return -(m.r_minus * it - m.mu2 - s) / (m.r_plus * it - m.mu2 - s);
}

// Limits G(+-inf) = -(r_- +- i)/(r_+ +- i).
inline complex coefficient_G_limit(const WhitenedModel& m, int sign) {
    const complex i{0.0, 1.0};
    if (sign >= 0) return -(m.r_minus + i) / (m.r_plus + i);
    return -(m.r_minus - i) / (m.r_plus - i);
}

// eps_alpha(t) = exp(i(alpha-1)(2 arctan t + pi)); winds by -(1-alpha) and
// tends to 1 at -inf. Compensates the index of G so G~ = eps_alpha G can be
// log-split without winding.
inline complex eps_alpha(double alpha, double t) {
    return std::exp(complex{0.0, (alpha - 1.0) * (2.0 * std::atan(t) + pi)});
}

inline complex coefficient_G_tilde(const WhitenedModel& m, double alpha, double t) {
    return eps_alpha(alpha, t) * coefficient_G(m, t);
}

// ---------------------------------------------------------------------------
// Continuous determination of log G~ along the real line.
//
// The table stores the unwrapped values on a sinh-graded symmetric grid. It
// also remembers the endpoint limit L_inf (closed form, the branch matched
// to the unwrapping) and the fitted 1/t tail coefficients of
// h(t) = log G~(t) - L_inf, which the Cauchy-integral layer integrates in
// closed form beyond the truncation.
// ---------------------------------------------------------------------------
struct LogGtildeTable {
    WhitenedModel model;
    double alpha = 0.5;
    std::vector<double> grid;     // strictly increasing, symmetric, contains 0
    std::vector<complex> values;  // unwrapped log G~ at the grid nodes
    complex limit_value{0.0, 0.0}; // L_inf = log G~(+-inf)
    complex c_plus{0.0, 0.0};     // h(t) ~ -c_plus/t,  t -> +inf
    complex c_minus{0.0, 0.0};    // h(t) ~ -c_minus/t, t -> -inf

    double truncation() const { return grid.back(); }
};

namespace detail {

// Symmetric grid on [-T, T], dense near 0, geometric towards the ends:
// t_k = T sinh(a k/K)/sinh(a). n is the total node count (made odd so that
// 0 is a node).
inline std::vector<double> sinh_grid(double T, std::size_t n) {
    const std::size_t K = std::max<std::size_t>(32, n / 2);
    const double a = 12.0;
    std::vector<double> g;
    g.reserve(2 * K + 1);
    const double s = std::sinh(a);
    for (std::size_t k = K; k > 0; --k) g.push_back(-T * std::sinh(a * double(k) / double(K)) / s);
    g.push_back(0.0);
    for (std::size_t k = 1; k <= K; ++k) g.push_back(T * std::sinh(a * double(k) / double(K)) / s);
    return g;
}

// Least squares fit of w(t) ~ -C + D/t on (t_j, w_j); returns C.
inline complex fit_inverse_tail(const std::vector<double>& t, const std::vector<complex>& w) {
    double s00 = 0.0, s01 = 0.0, s11 = 0.0;
    complex b0{0.0, 0.0}, b1{0.0, 0.0};
    for (std::size_t j = 0; j < t.size(); ++j) {
        const double u = 1.0 / t[j];
        s00 += 1.0;
        s01 += u;
        s11 += u * u;
        b0 += w[j];
        b1 += u * w[j];
    }
    const double det = s00 * s11 - s01 * s01;
    // coefficients of w = p + q/t; C = -p
    const complex p = (b0 * s11 - b1 * s01) / det;
    return -p;
}

} // namespace detail

// Builds the unwrapped log G~ table. Anchored at t = 0 where the argument
// of G~(0) is principal (it equals pi(alpha-1), inside (-pi, 0)); unwraps
// outward and then shifts by a multiple of 2 pi i so the -T endpoint agrees
// with the closed-form limit, which pins the same determination as
// eps_alpha(-inf) = 1.
inline LogGtildeTable build_log_table(const WhitenedModel& m, double alpha,
                                      std::size_t n_points, double truncation) {
    if (n_points < 64) throw DomainMismatch("log table needs at least 64 points");
    if (truncation < 1e2) throw DomainMismatch("log table truncation must be >= 1e2");

    LogGtildeTable tab;
    tab.model = m;
    tab.alpha = alpha;
    tab.grid = detail::sinh_grid(truncation, n_points);
    const std::size_t n = tab.grid.size();
    tab.values.resize(n);

    const std::size_t mid = n / 2; // grid[mid] == 0
    const complex g0 = coefficient_G(m, 0.0);
    tab.values[mid] = complex{std::log(std::abs(g0)), pi * (alpha - 1.0)};

    auto unwrap_step = [&](std::size_t from, std::size_t to) {
        const complex g = coefficient_G_tilde(m, alpha, tab.grid[to]);
        const double mag = std::log(std::abs(g));
        double arg = std::arg(g);
        const double prev = tab.values[from].imag();
        arg += 2.0 * pi * std::round((prev - arg) / (2.0 * pi));
        if (std::abs(arg - prev) > pi / 2) {
            std::ostringstream os;
            os << "phase jump " << std::abs(arg - prev) << " rad between t = "
               << tab.grid[from] << " and t = " << tab.grid[to]
               << " exceeds pi/2; refine the grid";
            throw UnwrapFailure(os.str());
        }
        tab.values[to] = complex{mag, arg};
    };
    for (std::size_t k = mid; k + 1 < n; ++k) unwrap_step(k, k + 1);
    for (std::size_t k = mid; k > 0; --k) unwrap_step(k, k - 1);

    // endpoint limit; branch matched to the unwrapped value at -T
    const complex glim = coefficient_G_limit(m, -1);
    complex linf{std::log(std::abs(glim)), std::arg(glim)};
    const double shift =
        2.0 * pi * std::round((tab.values.front().imag() - linf.imag()) / (2.0 * pi));
    linf += complex{0.0, shift};
    tab.limit_value = linf;

    // fit the 1/t tail of h = log G~ - L_inf on the outer decade of each side
    std::vector<double> ts;
    std::vector<complex> ws;
    for (std::size_t j = 0; j < n; ++j) {
        const double t = tab.grid[j];
        if (t >= truncation / 10.0) {
            ts.push_back(t);
            ws.push_back((tab.values[j] - linf) * t);
        }
    }
    tab.c_plus = detail::fit_inverse_tail(ts, ws);
    ts.clear();
    ws.clear();
    for (std::size_t j = 0; j < n; ++j) {
        const double t = tab.grid[j];
        if (t <= -truncation / 10.0) {
            ts.push_back(t);
            ws.push_back((tab.values[j] - linf) * t);
        }
    }
    tab.c_minus = detail::fit_inverse_tail(ts, ws);

    // the truncated ends must already sit on the limit up to the 1/t tail
    const double tail_tol =
        std::max(1e-10, 4.0 * std::max(std::abs(tab.c_plus), std::abs(tab.c_minus)) / truncation);
    if (std::abs(tab.values.front() - linf) > tail_tol ||
        std::abs(tab.values.back() - linf) > tail_tol) {
        std::ostringstream os;
        os << "log G~ does not settle on its limit at +-T: |dev| = "
           << std::abs(tab.values.front() - linf) << " / "
           << std::abs(tab.values.back() - linf) << ", tol " << tail_tol;
        throw UnwrapFailure(os.str());
    }
    return tab;
}

inline LogGtildeTable build_log_table(const WhitenedModel& m, const Geometry& g,
                                      std::size_t n_points = 4096, double truncation = 1e4) {
    return build_log_table(m, g.alpha, n_points, truncation);
}

// Pointwise log G~ with the branch snapped to the table's determination.
// Exact in magnitude and in argument modulo the unwrapping, which is what
// the downstream quadratures need.
inline complex log_gtilde_at(const LogGtildeTable& tab, double t) {
    const complex g = coefficient_G_tilde(tab.model, tab.alpha, t);
    double im = std::arg(g);
    // interpolate the table's imaginary part to pick the right 2 pi branch
    const auto& gr = tab.grid;
    double ref;
    if (t <= gr.front()) {
        ref = tab.values.front().imag();
    } else if (t >= gr.back()) {
        ref = tab.values.back().imag();
    } else {
        const std::size_t hi =
            std::upper_bound(gr.begin(), gr.end(), t) - gr.begin();
        const std::size_t lo = hi - 1;
        const double w = (t - gr[lo]) / (gr[hi] - gr[lo]);
        ref = (1.0 - w) * tab.values[lo].imag() + w * tab.values[hi].imag();
    }
    im += 2.0 * pi * std::round((ref - im) / (2.0 * pi));
    return complex{std::log(std::abs(g)), im};
}

// d/dt log G~ via a 5-point stencil on the snapped branch.
inline complex log_gtilde_deriv(const LogGtildeTable& tab, double t) {
    const double h = 5e-4 * (1.0 + std::abs(t) / 8.0);
    const complex f1 = log_gtilde_at(tab, t - 2.0 * h);
    const complex f2 = log_gtilde_at(tab, t - h);
    const complex f3 = log_gtilde_at(tab, t + h);
    const complex f4 = log_gtilde_at(tab, t + 2.0 * h);
    return (f1 - 8.0 * f2 + 8.0 * f3 - f4) / (12.0 * h);
}

// Winding number (argument variation / 2 pi) of a sampled nonvanishing
// curve. The samples should include the endpoint limits when the curve is
// meant to be closed at infinity.
inline double numeric_index(const std::vector<complex>& samples) {
    if (samples.size() < 2) throw DomainMismatch("numeric_index needs at least 2 samples");
    double prev = std::arg(samples.front());
    double total = 0.0;
    for (std::size_t j = 1; j < samples.size(); ++j) {
        if (std::abs(samples[j]) == 0.0) throw DomainMismatch("numeric_index: sample vanishes");
        double a = std::arg(samples[j]);
        double d = a - prev;
        d -= 2.0 * pi * std::round(d / (2.0 * pi));
        if (std::abs(d) > pi / 2) {
            std::ostringstream os;
            os << "argument jump " << std::abs(d) << " rad at sample " << j
               << " exceeds pi/2; refine the sampling";
            throw UnwrapFailure(os.str());
        }
        total += d;
        prev = a;
    }
    return total / (2.0 * pi);
}

// Index of G over the closed line (endpoints at +-inf included).
inline double index_of_G(const WhitenedModel& m, const std::vector<double>& grid) {
    std::vector<complex> s;
    s.reserve(grid.size() + 2);
    s.push_back(coefficient_G_limit(m, -1));
    for (double t : grid) s.push_back(coefficient_G(m, t));
    s.push_back(coefficient_G_limit(m, +1));
    return numeric_index(s);
}

} // namespace hprbm

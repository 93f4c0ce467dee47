#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "hprbm/asymptotics.hpp"
#include "hprbm/laplace.hpp"

namespace hprbm {

struct InversionConfig {
    int n_nodes = 3072;           // interior time grid
    double v_min = 0.05;          // smallest height the interior grid must resolve
    int boundary_nodes = 4096;    // lateral density time grid
    double boundary_t_max = 2500.0;
    double contour_cut = 3.0;     // |u| beyond which the lateral inversion shifts
    int contour_nodes = 1536;
    double contour_t_max = 1500.0;

    void validate() const {
        if (n_nodes < 256 || boundary_nodes < 256 || contour_nodes < 128) {
            throw DomainMismatch("inversion grids need at least a few hundred nodes");
        }
        if (!(v_min > 0.0) || !(contour_cut >= 1.0) || !(boundary_t_max > 10.0) ||
            !(contour_t_max > 10.0)) {
            throw DomainMismatch("inversion configuration out of range");
        }
    }
};

namespace detail {

// positive half of a symmetric integration line: sampled slow factor plus a
// five-point stencil past the endpoint for the truncation correction
struct HalfLine {
    std::vector<double> t;       // ascending, t[0] = 0
    std::vector<complex> a;      // A(t_k)
    std::array<complex, 5> edge; // A(tmax + (k-2) h)
    double edge_h = 1.0;
    double tmax = 0.0;

    complex edge_a() const { return edge[2]; }
    complex edge_a1() const {
        return (-edge[4] + 8.0 * edge[3] - 8.0 * edge[1] + edge[0]) / (12.0 * edge_h);
    }
    complex edge_a2() const {
        return (-edge[4] + 16.0 * edge[3] - 30.0 * edge[2] + 16.0 * edge[1] - edge[0]) /
               (12.0 * edge_h * edge_h);
    }
};

template <class Sampler>
HalfLine make_half_line(double tmax, int n, Sampler&& sample) {
    HalfLine line;
    line.tmax = tmax;
    const std::vector<double> full = sinh_grid(tmax, n);
    const std::size_t mid = full.size() / 2;
    line.t.assign(full.begin() + static_cast<std::ptrdiff_t>(mid), full.end());
    line.a.resize(line.t.size());
    parallel_for(line.t.size(), [&](std::size_t k) { line.a[k] = sample(line.t[k]); });
    line.edge_h = std::max(0.5, 1e-3 * tmax);
    for (int k = 0; k < 5; ++k) line.edge[k] = sample(tmax + (k - 2) * line.edge_h);
    return line;
}

// variant sampling two slow factors at once, for integrands that share their
// expensive part
template <class PairSampler>
std::pair<HalfLine, HalfLine> make_half_line2(double tmax, int n, PairSampler&& sample) {
    HalfLine first, second;
    first.tmax = second.tmax = tmax;
    const std::vector<double> full = sinh_grid(tmax, n);
    const std::size_t mid = full.size() / 2;
    first.t.assign(full.begin() + static_cast<std::ptrdiff_t>(mid), full.end());
    second.t = first.t;
    first.a.resize(first.t.size());
    second.a.resize(first.t.size());
    parallel_for(first.t.size(), [&](std::size_t k) {
        const auto [a, b] = sample(first.t[k]);
        first.a[k] = a;
        second.a[k] = b;
    });
    first.edge_h = second.edge_h = std::max(0.5, 1e-3 * tmax);
    for (int k = 0; k < 5; ++k) {
        const auto [a, b] = sample(tmax + (k - 2) * first.edge_h);
        first.edge[k] = a;
        second.edge[k] = b;
    }
    return {std::move(first), std::move(second)};
}

// product integration of A(t) e^{w(t)} over the sampled half line, with the
// exponent interpolated linearly on each panel (exact for the oscillatory
// part) and the slow factor interpolated linearly as well
template <class ExponentAt>
complex filon_half(const HalfLine& line, ExponentAt&& w_at) {
    complex acc{0.0, 0.0};
    complex w_prev = w_at(std::size_t{0});
    complex e_prev = std::exp(w_prev);
    for (std::size_t k = 0; k + 1 < line.t.size(); ++k) {
        const complex w_next = w_at(k + 1);
        const complex q = w_next - w_prev;
        const double dt = line.t[k + 1] - line.t[k];
        acc += dt * e_prev * (line.a[k] * phi1(q) + (line.a[k + 1] - line.a[k]) * phi2(q));
        w_prev = w_next;
        e_prev = std::exp(w_next);
    }
    return acc;
}

// three-term integration-by-parts estimate of the truncated upper tail
//   int_T^inf A(t) e^{g(t)} dt  ~  -e^{g(T)} (H0 - H1 + H2),
// H0 = A/g', H_{k+1} = H_k'/g', with the slow factor's derivatives taken from
// the endpoint stencil and the exponent's from closed forms
inline complex ibp_tail(const HalfLine& line, complex g0, complex g1, complex g2,
                        complex g3) {
    const complex a0 = line.edge_a(), a1 = line.edge_a1(), a2 = line.edge_a2();
    const complex h0 = a0 / g1;
    const complex h0p = a1 / g1 - a0 * g2 / (g1 * g1);
    const complex h0pp = a2 / g1 - 2.0 * a1 * g2 / (g1 * g1) - a0 * g3 / (g1 * g1) +
                         2.0 * a0 * g2 * g2 / (g1 * g1 * g1);
    const complex h1 = h0p / g1;
    const complex h1p = h0pp / g1 - h0p * g2 / (g1 * g1);
    const complex h2 = h1p / g1;
    return -std::exp(g0) * (h0 - h1 + h2);
}

// derivatives of Y^+(it) with respect to t; the discriminant has positive
// real part along the axis, so the principal square root is smooth here
struct RootDerivatives {
    complex y, d1, d2, d3;
};

inline RootDerivatives root_derivatives(const WhitenedModel& m, double t) {
    const complex delta{m.mu2 * m.mu2 + t * t, -2.0 * m.mu1 * t};
    const complex s = std::sqrt(delta);
    const complex tm{t, -m.mu1};
    const double norm2 = m.mu1 * m.mu1 + m.mu2 * m.mu2;
    RootDerivatives out;
    out.y = -m.mu2 + s;
    out.d1 = tm / s;
    out.d2 = norm2 / (delta * s);
    out.d3 = -3.0 * norm2 * tm / (delta * delta * s);
    return out;
}

} // namespace detail

// closed forms for the reference model (zero horizontal drift, unit downward
// drift, slopes -1 and 1), used as a cross-validation target everywhere
inline double symmetric_interior_density(double u, double v) {
    if (v < 0.0) throw NegativeHeight("interior density requested below the boundary");
    const double r = std::hypot(u, v);
    if (r < 1e-12) throw OriginSingular("density diverges at the origin");
    return std::sqrt(r + v) / (std::sqrt(pi) * r) * std::exp(-r - v);
}

inline double symmetric_polar_density(double r, double theta) {
    if (theta < 0.0 || theta > pi) throw DomainMismatch("polar angle must lie in [0, pi]");
    if (r < 1e-12) throw OriginSingular("density diverges at the origin");
    const double c = std::cos(0.5 * theta - 0.25 * pi);
    return std::sqrt(2.0 / (pi * r)) * c * std::exp(-2.0 * r * c * c);
}

inline double symmetric_boundary_density(double u) {
    const double a = std::abs(u);
    if (a < 1e-12) throw OriginSingular("lateral density diverges at the origin");
    return std::exp(-a) / (2.0 * std::sqrt(pi * a));
}

// marginal of the height coordinate; integrating the kernel relation at t = 0
// collapses it to an exponential law independent of the reflection slopes
inline double vertical_marginal(const WhitenedModel& m, double v) {
    if (v < 0.0) throw NegativeHeight("marginal requested below the boundary");
    return -2.0 * m.mu2 * std::exp(2.0 * m.mu2 * v);
}

// Inverts the partial transform to interior density values.  All points share
// one sampling of the lateral transforms along the axis; each evaluation then
// costs one pass over that grid.
class InteriorInverter {
  public:
    explicit InteriorInverter(const LateralTransformEngine& eng, InversionConfig cfg = {})
        : eng_(eng), cfg_(cfg) {
        cfg_.validate();
        tmax_ = std::min(0.92 * eng_.table.truncation(),
                         std::max(48.0, 36.0 / cfg_.v_min));
        line_ = detail::make_half_line(tmax_, cfg_.n_nodes, [this](double t) {
            const LateralPair p = phi_pair_on_axis(eng_, t);
            return 2.0 * (p.plus + p.minus);
        });
        y_.resize(line_.t.size());
        for (std::size_t k = 0; k < line_.t.size(); ++k) {
            y_[k] = roots_Y(eng_.model, complex{0.0, line_.t[k]}).plus;
        }
    }

    const LateralTransformEngine& engine() const { return eng_; }
    double t_max() const { return tmax_; }
    double v_min() const { return cfg_.v_min; }

    double density(double u, double v) const {
        if (v <= 0.0) throw NegativeHeight("interior density needs v > 0");
        if (v < cfg_.v_min * (1.0 - 1e-12)) {
            throw DomainMismatch("height below the resolution this inverter was built for");
        }
        const complex acc = detail::filon_half(line_, [&](std::size_t k) {
            return -y_[k] * v - complex{0.0, line_.t[k] * u};
        });
        const auto rd = detail::root_derivatives(eng_.model, tmax_);
        const complex tail = detail::ibp_tail(
            line_, -rd.y * v - complex{0.0, tmax_ * u}, -rd.d1 * v - complex{0.0, u},
            -rd.d2 * v, -rd.d3 * v);
        return (acc.real() + tail.real()) / pi;
    }

  private:
    LateralTransformEngine eng_;
    InversionConfig cfg_;
    double tmax_ = 0.0;
    detail::HalfLine line_;
    std::vector<complex> y_;
};

// Inverts the lateral transforms to the two boundary densities.  Near the
// origin the inversion runs along the axis; past the cut it moves onto a
// vertical contour at three quarters of the decay rate, which turns the
// oscillatory integral into an exponentially small one.
class BoundaryInverter {
  public:
    explicit BoundaryInverter(const LateralTransformEngine& eng, InversionConfig cfg = {})
        : eng_(eng), cfg_(cfg) {
        cfg_.validate();
        const double tb = std::min(cfg_.boundary_t_max, 0.92 * eng_.table.truncation());
        // one principal-value integral per node feeds both sides
        auto [lp, lm] = detail::make_half_line2(tb, cfg_.boundary_nodes, [this](double t) {
            const LateralPair p = phi_pair_on_axis(eng_, t);
            return std::pair{p.plus, p.minus};
        });
        pair_line_plus_ = std::move(lp);
        pair_line_minus_ = std::move(lm);
    }

    const LateralTransformEngine& engine() const { return eng_; }

    double density(Side side, double u) {
        if (std::abs(u) < 1e-3) {
            throw OriginSingular("lateral density is singular at the origin");
        }
        if (side == Side::plus && u < 0.0) return 0.0;
        if (side == Side::minus && u > 0.0) return 0.0;
        if (std::abs(u) <= cfg_.contour_cut) {
            return axis_eval(side == Side::plus ? pair_line_plus_ : pair_line_minus_, u);
        }
        return contour_eval(side, std::abs(u));
    }

    // interior density trace on the boundary line, pi(u, 0) = 2 (pi_+ + pi_-)
    double line_density(double u) {
        return 2.0 * (density(Side::plus, u) + density(Side::minus, u));
    }

  private:
    struct Contour {
        double c = 0.0;
        detail::HalfLine line;
    };

    double axis_eval(const detail::HalfLine& line, double u) const {
        const complex acc = detail::filon_half(line, [&](std::size_t k) {
            return complex{0.0, -line.t[k] * u};
        });
        const complex tail = detail::ibp_tail(line, complex{0.0, -line.tmax * u},
                                              complex{0.0, -u}, {0.0, 0.0}, {0.0, 0.0});
        return (acc.real() + tail.real()) / pi;
    }

    const Contour& ensure_contour(Side side) {
        std::optional<Contour>& slot = side == Side::plus ? contour_plus_ : contour_minus_;
        if (!slot) {
            const LateralTransformEngine* eng = &eng_;
            if (side == Side::minus) {
                if (!mirror_) mirror_ = build_engine(mirrored(eng_.model), eng_.quad);
                eng = &*mirror_;
            }
            Contour ct;
            ct.c = 0.75 * tail_report(eng->model, Side::plus).gamma;
            const double tc = std::min(cfg_.contour_t_max, 0.9 * eng->table.truncation());
            ct.line = detail::make_half_line(tc, cfg_.contour_nodes, [&](double t) {
                return phi_continued(*eng, Side::plus, complex{ct.c, t});
            });
            slot = std::move(ct);
        }
        return *slot;
    }

    // shifted inversion for the plus side of the given engine at u > 0
    double contour_eval(Side side, double u) {
        const Contour& ct = ensure_contour(side);
        const complex acc = detail::filon_half(ct.line, [&](std::size_t k) {
            return complex{0.0, -ct.line.t[k] * u};
        });
        const complex tail = detail::ibp_tail(ct.line, complex{0.0, -ct.line.tmax * u},
                                              complex{0.0, -u}, {0.0, 0.0}, {0.0, 0.0});
        return std::exp(-ct.c * u) * (acc.real() + tail.real()) / pi;
    }

    LateralTransformEngine eng_;
    InversionConfig cfg_;
    detail::HalfLine pair_line_plus_;
    detail::HalfLine pair_line_minus_;
    std::optional<LateralTransformEngine> mirror_;
    std::optional<Contour> contour_plus_;
    std::optional<Contour> contour_minus_;
};

// integrates the inverted interior density across u at fixed height, for
// cross-checking against the closed-form marginal
inline double marginal_by_integration(const InteriorInverter& inv, double v) {
    const WhitenedModel& m = inv.engine().model;
    double total = 0.0;
    for (Side side : {Side::plus, Side::minus}) {
        const double rate = tail_report(m, side).gamma;
        const double limit = 38.0 / rate;
        const double sgn = side == Side::plus ? 1.0 : -1.0;
        double lo = 0.0, width = 0.25;
        while (lo < limit) {
            const double hi = std::min(limit, lo + width);
            for (int i = 0; i < 8; ++i) {
                const double mid = 0.5 * (lo + hi) + 0.5 * (hi - lo) * detail::gl8_x[i];
                total += 0.5 * (hi - lo) * detail::gl8_w[i] * inv.density(sgn * mid, v);
            }
            lo = hi;
            width *= 1.6;
        }
    }
    return total;
}

struct DensityGrid {
    std::vector<double> us;
    std::vector<double> vs;
    std::vector<double> values; // row-major over vs, then us
};

inline DensityGrid fill_grid(const InteriorInverter& inv, std::vector<double> us,
                             std::vector<double> vs) {
    DensityGrid grid{std::move(us), std::move(vs), {}};
    grid.values.assign(grid.us.size() * grid.vs.size(), 0.0);
    parallel_for(grid.values.size(), [&](std::size_t idx) {
        const std::size_t i = idx / grid.us.size();
        const std::size_t j = idx % grid.us.size();
        double val = inv.density(grid.us[j], grid.vs[i]);
        if (val < 0.0 && val > -1e-8) val = 0.0; // quadrature noise around zero
        grid.values[idx] = val;
    });
    return grid;
}

} // namespace hprbm

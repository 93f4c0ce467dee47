#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace hprbm {

using complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// complex log1p; the std overload set only covers reals.
inline complex log1p_c(complex w) {
    if (std::abs(w) < 1e-4) {
        // log(1+w) = w - w^2/2 + w^3/3 - w^4/4, truncation ~ |w|^5 < 1e-20
        return w * (1.0 - w * (0.5 - w * (1.0 / 3.0 - w * 0.25)));
    }
    return std::log(1.0 + w);
}

// (e^q - 1)/q and int_0^1 s e^{qs} ds, stable near q = 0. Used by the
// product-integration rules for oscillatory/decaying inversion integrals.
inline complex phi1(complex q) {
    if (std::abs(q) < 1e-4) {
        return 1.0 + q * (0.5 + q * (1.0 / 6.0 + q * (1.0 / 24.0 + q / 120.0)));
    }
    return (std::exp(q) - 1.0) / q;
}

inline complex phi2(complex q) {
    if (std::abs(q) < 1e-3) {
        // (e^q (q-1) + 1)/q^2 = 1/2 + q/3 + q^2/8 + q^3/30 + q^4/144
        return 0.5 + q * (1.0 / 3.0 + q * (0.125 + q * (1.0 / 30.0 + q / 144.0)));
    }
    return (std::exp(q) * (q - 1.0) + 1.0) / (q * q);
}

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct Mat2 {
    // row-major: [[a, b], [c, d]]
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    double det() const { return a * d - b * c; }
};

inline std::size_t thread_cap() {
    std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HALFPLANE_RBM_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) hw = std::min<std::size_t>(hw, static_cast<std::size_t>(v));
    }
    return hw;
}

// Chunked parallel map over [0, n). Honors HALFPLANE_RBM_THREADS; falls back
// to a plain loop when only one thread is allowed (the common case here).
template <typename F>
void parallel_for(std::size_t n, F&& body) {
    const std::size_t nthreads = std::min(thread_cap(), n == 0 ? std::size_t{1} : n);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    const std::size_t chunk = (n + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace hprbm

#pragma once

///
/// Small numerical kernels shared across the library: fixed and adaptive
/// Gauss-Legendre quadrature, an adaptive Dormand-Prince 5(4) scalar ODE
/// integrator, a piecewise-cubic Hermite table with exact segment integrals,
/// monotone (Fritsch-Carlson) slope estimation, bisection, and a tiny
/// deterministic RNG for randomized checks.
///
/// Everything here is header-only and allocation-light; the heavy lifting in
/// the library (profiles, integral-condition verdicts, counterexamples) is
/// built on these primitives.
///

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "barrierlab/errors.hpp"

namespace barrierlab::num {

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// 20-point Gauss-Legendre rule on [a, b]. Exact for polynomials up to degree
/// 39; for the smooth integrands used here a single panel is usually at
/// machine accuracy already.
template <class F>
double gauss20(F&& f, double a, double b) {
    static constexpr double xs[10] = {
        0.07652652113349733, 0.22778585114164507, 0.37370608871541955,
        0.51086700195082710, 0.63605368072651503, 0.74633190646015079,
        0.83911697182221882, 0.91223442825132591, 0.96397192727791379,
        0.99312859918509492};
    static constexpr double ws[10] = {
        0.15275338713072585, 0.14917298647260375, 0.14209610931838205,
        0.13168863844917663, 0.11819453196151842, 0.10193011981724044,
        0.08327674157670475, 0.06267204833410907, 0.04060142980038694,
        0.01761400713915212};
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 10; ++i) {
        acc += ws[i] * (f(mid + half * xs[i]) + f(mid - half * xs[i]));
    }
    return acc * half;
}

namespace detail {
template <class F>
double adaptive_gauss_rec(F& f, double a, double b, double whole, double tol,
                          int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gauss20(f, a, mid);
    const double right = gauss20(f, mid, b);
    const double err = std::abs(left + right - whole);
    // The relative floor keeps huge-but-smooth integrands (band integrals of
    // t^{-k}) from recursing forever chasing an absolute tolerance.
    if (err <= tol + 5e-15 * (std::abs(left) + std::abs(right)) || depth >= 48) {
        return left + right;
    }
    return adaptive_gauss_rec(f, a, mid, left, 0.5 * tol, depth + 1) +
           adaptive_gauss_rec(f, mid, b, right, 0.5 * tol, depth + 1);
}
} // namespace detail

/// Adaptive bisected Gauss-Legendre integration of a proper integral.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-13) {
    if (!(a <= b)) throw DomainError("integrate: reversed interval");
    if (a == b) return 0.0;
    const double whole = gauss20(f, a, b);
    return detail::adaptive_gauss_rec(f, a, b, whole, abs_tol, 0);
}

// ---------------------------------------------------------------------------
// Adaptive Dormand-Prince 5(4) for scalar autonomous-friendly ODEs
// ---------------------------------------------------------------------------

struct OdePoint {
    double t;
    double y;
};

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-14;
    double max_step = std::numeric_limits<double>::infinity();
    /// Integration stops (with the end point pinned by step bisection) as
    /// soon as y leaves [y_min, y_max].
    double y_min = -std::numeric_limits<double>::infinity();
    double y_max = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 2'000'000;
};

enum class OdeStop { ReachedEnd, HitFloor, HitCeiling };

struct OdeResult {
    std::vector<OdePoint> points; ///< accepted steps, including both ends
    OdeStop stop = OdeStop::ReachedEnd;
};

/// Integrate y' = f(t, y) from (t0, y0) to t1 > t0 with the classic
/// Dormand-Prince embedded pair and a PI-free step controller. The accepted
/// step points are returned; callers that need dense output fit a Hermite
/// table through them using the exact slopes f(t_i, y_i).
template <class F>
OdeResult integrate_ode(F&& f, double t0, double y0, double t1,
                        const OdeOptions& opt = {}) {
    if (!(t1 > t0)) throw DomainError("integrate_ode: need t1 > t0");
    OdeResult out;
    out.points.push_back({t0, y0});

    double t = t0;
    double y = y0;
    double k1 = f(t, y);
    // No lower floor on the first step: decay profiles with huge start values
    // have boundary layers many orders below the interval length.
    double h = std::min({opt.max_step, (t1 - t0) / 16.0,
                         0.1 * (std::abs(y) * opt.rtol + opt.atol) /
                             (std::abs(k1) + 1e-300)});
    h = std::max(h, 1e-290);

    std::size_t steps = 0;
    while (t < t1) {
        if (++steps > opt.max_steps)
            throw IntegrationError("integrate_ode: step budget exhausted");
        h = std::min(h, t1 - t);
        if (t + h == t) throw IntegrationError("integrate_ode: step size underflow");

        const double k2 = f(t + h / 5.0, y + h * (k1 / 5.0));
        const double k3 = f(t + 3.0 * h / 10.0, y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
        const double k4 = f(t + 4.0 * h / 5.0,
                            y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
        const double k5 = f(t + 8.0 * h / 9.0,
                            y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                     64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
        const double k6 = f(t + h, y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                            46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                            5103.0 / 18656.0 * k5));
        const double y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 +
                                   125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5 +
                                   11.0 / 84.0 * k6);
        const double k7 = f(t + h, y5);
        const double y4 = y + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 +
                                   393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5 +
                                   187.0 / 2100.0 * k6 + 1.0 / 40.0 * k7);

        const double scale = opt.atol + opt.rtol * std::max(std::abs(y), std::abs(y5));
        const double err = std::abs(y5 - y4) / scale;

        if (err <= 1.0) {
            // Accepted. Pin boundary-crossing steps by shrinking h instead of
            // interpolating: cheap and keeps the table monotone.
            if (y5 < opt.y_min || y5 > opt.y_max) {
                double lo = 0.0, hi = h;
                const bool ceiling = y5 > opt.y_max;
                for (int it = 0; it < 80 && (hi - lo) > 1e-15 * h; ++it) {
                    const double hm = 0.5 * (lo + hi);
                    // One cheap RK4 substep for the probe; accuracy of the
                    // crossing location is not contract-relevant.
                    const double m1 = k1;
                    const double m2 = f(t + hm / 2, y + hm / 2 * m1);
                    const double m3 = f(t + hm / 2, y + hm / 2 * m2);
                    const double m4 = f(t + hm, y + hm * m3);
                    const double yp = y + hm / 6 * (m1 + 2 * m2 + 2 * m3 + m4);
                    const bool out_of_range = ceiling ? yp > opt.y_max : yp < opt.y_min;
                    (out_of_range ? hi : lo) = hm;
                }
                const double hc = lo;
                const double m1 = k1;
                const double m2 = f(t + hc / 2, y + hc / 2 * m1);
                const double m3 = f(t + hc / 2, y + hc / 2 * m2);
                const double m4 = f(t + hc, y + hc * m3);
                y = y + hc / 6 * (m1 + 2 * m2 + 2 * m3 + m4);
                t = t + hc;
                out.points.push_back({t, y});
                out.stop = ceiling ? OdeStop::HitCeiling : OdeStop::HitFloor;
                return out;
            }
            t += h;
            y = y5;
            k1 = k7; // first-same-as-last
            out.points.push_back({t, y});
        }
        const double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(grow, 0.2, 5.0);
        h = std::min(h, opt.max_step);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Piecewise-cubic Hermite table
// ---------------------------------------------------------------------------

/// A sampled function stored as (t_i, y_i, y'_i) with cubic Hermite segments.
/// Segment integrals are closed-form, so the cumulative integral of the
/// interpolant is exact (to roundoff) — important for barrier boundary
/// increments and counterexample integrals.
class HermiteTable {
public:
    HermiteTable() = default;
    HermiteTable(std::vector<double> t, std::vector<double> y, std::vector<double> d)
        : t_(std::move(t)), y_(std::move(y)), d_(std::move(d)) {
        if (t_.size() < 2 || t_.size() != y_.size() || t_.size() != d_.size())
            throw DomainError("HermiteTable: inconsistent arrays");
        for (std::size_t i = 1; i < t_.size(); ++i)
            if (!(t_[i] > t_[i - 1]))
                throw DomainError("HermiteTable: abscissae not increasing");
        prefix_.resize(t_.size(), 0.0);
        for (std::size_t i = 1; i < t_.size(); ++i)
            prefix_[i] = prefix_[i - 1] + segment_integral(i - 1, 1.0);
    }

    double t_min() const { return t_.front(); }
    double t_max() const { return t_.back(); }
    std::size_t size() const { return t_.size(); }
    const std::vector<double>& abscissae() const { return t_; }
    const std::vector<double>& values() const { return y_; }
    const std::vector<double>& slopes() const { return d_; }

    double value(double t) const {
        const auto [i, s, h] = locate(t);
        const double s2 = s * s, s3 = s2 * s;
        return y_[i] * (2 * s3 - 3 * s2 + 1) + d_[i] * h * (s3 - 2 * s2 + s) +
               y_[i + 1] * (-2 * s3 + 3 * s2) + d_[i + 1] * h * (s3 - s2);
    }

    double derivative(double t) const {
        const auto [i, s, h] = locate(t);
        const double s2 = s * s;
        return (6 * s2 - 6 * s) * (y_[i] - y_[i + 1]) / h +
               d_[i] * (3 * s2 - 4 * s + 1) + d_[i + 1] * (3 * s2 - 2 * s);
    }

    /// Exact integral of the interpolant from t_min to t.
    double integral_to(double t) const {
        const auto [i, s, h] = locate(t);
        (void)h;
        return prefix_[i] + segment_integral(i, s);
    }

    double integral(double a, double b) const { return integral_to(b) - integral_to(a); }

private:
    std::tuple<std::size_t, double, double> locate(double t) const {
        if (!(t >= t_.front() - 1e-12 && t <= t_.back() + 1e-12))
            throw DomainError("HermiteTable: abscissa outside table range");
        t = std::clamp(t, t_.front(), t_.back());
        const auto it = std::upper_bound(t_.begin(), t_.end(), t);
        std::size_t i = static_cast<std::size_t>(std::distance(t_.begin(), it));
        i = std::clamp<std::size_t>(i, 1, t_.size() - 1) - 1;
        const double h = t_[i + 1] - t_[i];
        return {i, (t - t_[i]) / h, h};
    }

    /// ∫ over the first fraction s of segment i, closed form for the cubic.
    double segment_integral(std::size_t i, double s) const {
        const double h = t_[i + 1] - t_[i];
        const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
        return y_[i] * h * (0.5 * s4 - s3 + s) +
               d_[i] * h * h * (0.25 * s4 - 2.0 / 3.0 * s3 + 0.5 * s2) +
               y_[i + 1] * h * (-0.5 * s4 + s3) +
               d_[i + 1] * h * h * (0.25 * s4 - s3 / 3.0);
    }

    std::vector<double> t_, y_, d_, prefix_;
};

/// Fritsch-Carlson monotone slopes for PCHIP interpolation of tabulated data.
inline std::vector<double> monotone_slopes(const std::vector<double>& t,
                                           const std::vector<double>& y) {
    const std::size_t n = t.size();
    if (n < 2) throw DomainError("monotone_slopes: need at least two nodes");
    std::vector<double> delta(n - 1), m(n);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y[i + 1] - y[i]) / (t[i + 1] - t[i]);
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            m[i] = 0.0;
        } else {
            const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
            const double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // Clamp the one-sided end slopes so the end segments stay monotone.
    if (n >= 3) {
        for (std::size_t e : {std::size_t{0}, n - 1}) {
            const double d = e == 0 ? delta[0] : delta[n - 2];
            if (m[e] * d <= 0.0)
                m[e] = 0.0;
            else if (std::abs(m[e]) > 3.0 * std::abs(d))
                m[e] = 3.0 * d;
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Root finding & misc
// ---------------------------------------------------------------------------

/// Bisection for a monotone-sign-change function; returns the midpoint of the
/// final bracket.
template <class F>
double bisect(F&& f, double lo, double hi, double x_tol, int max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) throw DomainError("bisect: endpoints do not bracket a root");
    for (int i = 0; i < max_iter && (hi - lo) > x_tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

inline double rel_diff(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

/// SplitMix64: tiny, fully deterministic, platform-independent generator for
/// the randomized acceptance configurations.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

} // namespace barrierlab::num

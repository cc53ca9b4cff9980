#include "barrierlab/counterexamples.hpp"

#include <cmath>
#include <sstream>

namespace barrierlab {

namespace {

/// ∫₀^h dt/φ(t) for an Osgood-convergent φ. The integrand is singular (but
/// integrable) at 0, so the interval is split into dyadic bands from h
/// downward; band contributions decay geometrically and the loop stops at the
/// machine-level tail.
double time_from_zero(const GrowthFunction& phi, double h) {
    if (h <= 0.0) return 0.0;
    double sum = 0.0;
    double hi = h;
    for (int j = 0; j < 1100; ++j) {
        const double lo = 0.5 * hi;
        const double term =
            num::gauss20([&](double t) { return 1.0 / eval_phi(phi, t); }, lo, hi);
        sum += term;
        if (j >= 8 && term <= 1e-17 * sum) break;
        if (lo < 1e-300) break;
        hi = lo;
    }
    return sum;
}

/// ∫_{a}^{b} dt/φ(t) with 0 < a < b (no singularity inside).
double time_between(const GrowthFunction& phi, double a, double b) {
    if (b <= a) return 0.0;
    return num::integrate([&](double t) { return 1.0 / eval_phi(phi, t); }, a, b);
}

} // namespace

double CounterexampleFunction::x_min() const {
    if (kind == CounterexampleKind::GradientBlowup) return 0.0;
    return extension == ExtensionKind::EvenReflection ? -3.0 : -1.0;
}

double CounterexampleFunction::x_max() const { return samples.t_max(); }

double CounterexampleFunction::value(double x) const {
    if (kind == CounterexampleKind::GradientBlowup) {
        if (x < 0.0 || x > samples.t_max() + 1e-12)
            throw OutOfDomain("counterexample: abscissa outside [0, eps]");
        return samples.value(x);
    }
    if (!(x > x_min()) || x > samples.t_max() + 1e-12)
        throw OutOfDomain("counterexample: abscissa outside the interval");
    if (x > 0.0) return samples.value(x);
    if (x > -2.0 || extension == ExtensionKind::None) return 1.0;
    return samples.value(-2.0 - x);
}

double CounterexampleFunction::derivative(double x) const {
    if (kind == CounterexampleKind::GradientBlowup) {
        if (x < 0.0 || x > samples.t_max() + 1e-12)
            throw OutOfDomain("counterexample: abscissa outside [0, eps]");
        return samples.derivative(x);
    }
    if (!(x > x_min()) || x > samples.t_max() + 1e-12)
        throw OutOfDomain("counterexample: abscissa outside the interval");
    if (x > 0.0) return samples.derivative(x);
    if (x > -2.0 || extension == ExtensionKind::None) return 0.0;
    return -samples.derivative(-2.0 - x);
}

CounterexampleFunction build_smap_counterexample(const GrowthFunction& phi,
                                                bool extend) {
    if (check_integral_condition(phi, IntegralCondition::Osgood).holds())
        throw NotACounterexample(
            "build_smap_counterexample: the small-slope integral of this growth "
            "diverges, the zero slope profile is forced and the maximum principle "
            "holds");

    constexpr int kNodes = 1000; // table cells on [0, 1]
    std::vector<double> xs(kNodes + 1), hs(kNodes + 1), hslopes(kNodes + 1);
    xs[0] = 0.0;
    hs[0] = 0.0;
    hslopes[0] = eval_phi(phi, 0.0); // = 0 for every admissible φ

    double h_prev = 0.0;
    for (int i = 1; i <= kNodes; ++i) {
        const double x_i = static_cast<double>(i) / kNodes;
        const double dx = 1.0 / kNodes;
        // Incremental time from the previous node keeps each quadrature short;
        // only the first node pays for the singular tail at 0.
        const auto inc_time = [&](double h) {
            return i == 1 ? time_from_zero(phi, h) : time_between(phi, h_prev, h);
        };
        // Bracket the next slope level by doubling an initial guess derived
        // from the slope ODE h′ = φ(h).
        double step = std::max(eval_phi(phi, h_prev) * dx, 1e-12);
        double hi = h_prev + step;
        while (inc_time(hi) < dx) {
            step *= 2.0;
            hi = h_prev + step;
            if (hi > 1e15)
                throw IntegrationError(
                    "build_smap_counterexample: slope level exceeded the "
                    "representable search range");
        }
        const double h_i = num::bisect([&](double h) { return inc_time(h) - dx; },
                                       h_prev, hi, 1e-12);
        xs[static_cast<std::size_t>(i)] = x_i;
        hs[static_cast<std::size_t>(i)] = h_i;
        hslopes[static_cast<std::size_t>(i)] = eval_phi(phi, h_i);
        h_prev = h_i;
    }

    // Integrate the slope table exactly (piecewise-cubic closed form) to get
    // the plateau function values, then re-table with the exact slopes −h.
    const num::HermiteTable htab(xs, hs, hslopes);
    std::vector<double> values(kNodes + 1), slopes(kNodes + 1);
    for (int i = 0; i <= kNodes; ++i) {
        const auto u = static_cast<std::size_t>(i);
        values[u] = 1.0 - htab.integral_to(xs[u]);
        slopes[u] = -hs[u];
    }

    CounterexampleFunction c;
    c.kind = CounterexampleKind::SmapViolator;
    c.phi = phi;
    c.samples = num::HermiteTable(std::move(xs), std::move(values), std::move(slopes));
    c.extension = extend ? ExtensionKind::EvenReflection : ExtensionKind::None;
    return c;
}

CounterexampleFunction build_gradient_blowup(const GrowthFunction& phi, double nu,
                                             double eps) {
    if (!(nu > 0.0) || !(nu <= 1e15))
        throw DomainError("build_gradient_blowup: start slope must be in (0, 1e15]");
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw DomainError("build_gradient_blowup: interval length must be positive");
    if (check_phi_B(phi, eps).holds())
        throw NotACounterexample(
            "build_gradient_blowup: the decay-profile condition holds for this "
            "growth, so boundary gradients stay bounded");

    // Walk the decay profile f′ = −φ(f) in logarithmic levels; per-band time
    // and ramp-mass integrals are single Gauss panels at machine accuracy.
    constexpr double kDu = 5e-4;
    constexpr double kUFloor = -690.0;
    const auto band_time = [&](double a, double b) {
        return num::gauss20(
            [&](double v) {
                const double g = std::exp(v);
                return g / eval_phi(phi, g);
            },
            a, b);
    };
    const auto band_mass = [&](double a, double b) {
        return num::gauss20(
            [&](double v) {
                const double g = std::exp(v);
                return g * (g / eval_phi(phi, g));
            },
            a, b);
    };

    std::vector<double> xs{0.0}, Fs{0.0}, fs{nu};
    double u = std::log(nu);
    double x = 0.0;
    double F = 0.0;
    while (true) {
        const double u_next = std::max(u - kDu, kUFloor);
        const double dt = band_time(u_next, u);
        if (x + dt >= eps) {
            const double need = eps - x;
            double cut = u;
            if (need > 0.0)
                cut = num::bisect([&](double b) { return band_time(b, u) - need; },
                                  u_next, u, 1e-13);
            F += band_mass(cut, u);
            xs.push_back(eps);
            Fs.push_back(F);
            fs.push_back(std::exp(cut));
            break;
        }
        x += dt;
        F += band_mass(u_next, u);
        u = u_next;
        xs.push_back(x);
        Fs.push_back(F);
        fs.push_back(std::exp(u));
        if (u <= kUFloor) {
            // The profile has decayed below the representable range; its
            // remaining contribution to the ramp is below roundoff.
            xs.push_back(eps);
            Fs.push_back(F);
            fs.push_back(0.0);
            break;
        }
    }

    CounterexampleFunction c;
    c.kind = CounterexampleKind::GradientBlowup;
    c.phi = phi;
    c.nu = nu;
    c.eps = eps;
    c.samples = num::HermiteTable(std::move(xs), std::move(Fs), std::move(fs));
    return c;
}

double ode_residual(const CounterexampleFunction& c, const std::vector<double>& grid,
                    double step) {
    if (!(step > 0.0) || !std::isfinite(step))
        throw DomainError("ode_residual: step must be positive");

    std::vector<double> kinks;
    if (c.kind == CounterexampleKind::SmapViolator) {
        kinks.push_back(0.0);
        if (c.extension == ExtensionKind::EvenReflection) kinks.push_back(-2.0);
    }

    double worst = 0.0;
    for (double x : grid) {
        for (double kink : kinks) {
            if (std::abs(x - kink) < 1e-3) {
                std::ostringstream msg;
                msg << "ode_residual: grid point " << x
                    << " inside the guard band of the kink at " << kink;
                throw KinkPoint(msg.str());
            }
        }
        if (!(x - step > c.x_min()) || !(x + step <= c.x_max() + 1e-12))
            throw DomainError("ode_residual: stencil leaves the interval");
        const double vm = c.value(x - step);
        const double v0 = c.value(x);
        const double vp = c.value(x + step);
        const double second = (vp - 2.0 * v0 + vm) / (step * step);
        const double first = (vp - vm) / (2.0 * step);
        worst = std::max(worst, std::abs(second + eval_phi(c.phi, std::abs(first))));
    }
    return worst;
}

} // namespace barrierlab

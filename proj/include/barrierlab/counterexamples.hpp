#pragma once

///
/// Explicit one-dimensional functions that witness the *necessity* of the two
/// growth conditions:
///
///   * the plateau function H: solves H″ + φ(|H′|) = 0 classically, equals 1
///     on an interior interval yet is nonconstant — the strong maximum
///     principle fails once ∫₀¹ dt/φ converges;
///   * the steep ramp F: F(x) = ∫₀ˣ f with f′ = −φ(f), f(0) = ν, whose slope
///     at 0 is exactly ν — the boundary gradient bound fails once the
///     decay-profile condition does.
///
/// Both are tabulated densely enough that a central-difference residual of
/// the ODE stays below 10⁻⁵ on guarded grids.
///

#include <vector>

#include "barrierlab/nonlinearity.hpp"

namespace barrierlab {

enum class CounterexampleKind { SmapViolator, GradientBlowup };

/// How the tabulated core is continued to the left.
enum class ExtensionKind {
    None,
    /// Even reflection of the plateau function in the line x = −1, extending
    /// its interval from (−1, 1] to (−3, 1]. The junction is C¹ (both
    /// one-sided derivatives vanish on the plateau).
    EvenReflection,
};

struct CounterexampleFunction {
    CounterexampleKind kind = CounterexampleKind::SmapViolator;
    GrowthFunction phi;
    double nu = 0.0;  ///< start slope (ramp family only)
    double eps = 0.0; ///< ramp interval length
    /// Dense sample table of the nontrivial part: x ∈ [0, 1] for the plateau
    /// function (the plateau itself is analytic: identically 1), x ∈ [0, eps]
    /// for the ramp.
    num::HermiteTable samples;
    ExtensionKind extension = ExtensionKind::None;

    double x_min() const; ///< open left end of the interval
    double x_max() const; ///< closed right end

    double value(double x) const;
    double derivative(double x) const;
};

/// Build the plateau function H for an Osgood-convergent φ:
/// H ≡ 1 on (−1, 0], H(x) = 1 − ∫₀ˣ h with the slope magnitude h recovered by
/// inverting x = ∫₀^h dt/φ(t) node by node (monotone bisection, tolerance
/// 10⁻¹² per node). With `extend`, H is continued evenly across x = −1.
CounterexampleFunction build_smap_counterexample(const GrowthFunction& phi,
                                                bool extend = false);

/// Build the ramp F for a φ that fails the decay-profile condition at `eps`:
/// F(x) = ∫₀ˣ f, f′ = −φ(f), f(0) = ν. The start slope ν is recorded exactly
/// as the table slope at 0.
CounterexampleFunction build_gradient_blowup(const GrowthFunction& phi, double nu,
                                             double eps);

/// Max absolute central-difference residual of the defining ODE,
/// |Δ²c + φ(|Δc|)|, over the grid. Grid points within 10⁻³ of a kink of the
/// piecewise definition (x = 0, and x = −2 for the even extension) are
/// refused with KinkPoint; stencils must stay inside the interval.
double ode_residual(const CounterexampleFunction& c, const std::vector<double>& grid,
                    double step = 1e-3);

} // namespace barrierlab

#pragma once

///
/// Finite-difference solver for the variable-exponent model equation
///
///     −∇·(|∇u|^{p(x)−2} ∇u) = a·|u|^{q(x)−2} u + f   in Ω,    u = g on ∂Ω,
///
/// on embedded-boundary grids, together with the exact radial reference
/// profiles used as oracles and an ordering check between two solves with
/// comparable data.
///
/// Discretization: edge-midpoint flux form. Each edge carries the weight
/// w = (|∇u|² + eps_reg²)^{(p−2)/2} evaluated at its midpoint; arms cut by
/// the boundary contribute to the diagonal and the right-hand side only
/// (ghost values eliminated through the Dirichlet data), which keeps the
/// linear systems symmetric M-matrices amenable to conjugate gradients.
/// The nonlinear weight/lower-order coupling is resolved by damped Picard
/// iteration.
///

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "barrierlab/errors.hpp"
#include "barrierlab/geometry.hpp"

namespace barrierlab {

/// Coefficients of the model equation: the variable exponent p(x) with its
/// declared bounds and Lipschitz constant, the lower-order exponent q(x),
/// and the coefficient a.
struct ExponentField {
    std::function<double(Vec2)> p; ///< variable exponent, 1 < p⁻ ≤ p ≤ p⁺
    std::function<double(Vec2)> q; ///< lower-order exponent, q ≥ 2
    double a = 0.0;                ///< lower-order coefficient

    double p_min = 2.0;       ///< declared lower bound for p
    double p_max = 2.0;       ///< declared upper bound for p
    double q_min = 2.0;       ///< declared lower bound for q
    double q_max = 2.0;       ///< declared upper bound for q
    double p_lipschitz = 0.0; ///< declared Lipschitz constant of p

    /// Spatially constant exponents.
    static ExponentField constant(double p_const, double q_const = 2.0,
                                  double a = 0.0);
};

/// Iteration controls for the damped Picard / conjugate-gradient solver.
struct SolverConfig {
    double eps_reg = 1e-8;   ///< gradient regularization in the weights
    double tolerance = 1e-6; ///< nonlinear residual target (max norm)
    int max_picard = 80;     ///< outer iteration cap
    double damping = 0.7;    ///< Picard damping factor in (0, 1]
    double lin_tol = 1e-13;  ///< relative tolerance of the inner linear solves
};

/// Convergence record of a solve. The monotonicity flag is raised when a > 0
/// exceeds the estimated smallest eigenvalue of the frozen linear operator
/// (uniqueness of the discrete problem is then in doubt; the solve still
/// runs with the lower-order term lagged).
struct SolveInfo {
    int iterations = 0;
    int linear_iterations = 0;
    double final_residual = 0.0;
    std::vector<double> residual_history;
    std::vector<double> energy_history;
    bool monotonicity_warning = false;
    std::string warning;
};

/// Nodal values over a full grid. Nodes inside the domain hold computed (or
/// sampled) values; exterior nodes hold the Dirichlet data transported from
/// their boundary projection, so the stored array is a usable closure of the
/// discrete solution.
class GridFunction {
public:
    GridFunction(std::shared_ptr<const Grid> grid, std::vector<double> values,
                 std::function<double(Vec2)> boundary);

    const Grid& grid() const { return *grid_; }
    std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
    double h() const { return grid_->h; }

    double value(int i, int j) const {
        return values_[static_cast<std::size_t>(grid_->index(i, j))];
    }
    double operator[](int idx) const {
        return values_[static_cast<std::size_t>(idx)];
    }
    const std::vector<double>& values() const { return values_; }

    /// The imposed Dirichlet data, evaluable anywhere on the boundary.
    double boundary(const Vec2& x) const { return boundary_(x); }
    const std::function<double(Vec2)>& boundary_data() const { return boundary_; }

    /// Bilinear interpolation from the nodal values.
    double sample(const Vec2& x) const;

    double max_abs() const;

private:
    std::shared_ptr<const Grid> grid_;
    std::vector<double> values_;
    std::function<double(Vec2)> boundary_;
};

/// Evaluate fn at every node of the grid (boundary data = fn itself). The
/// resulting GridFunction carries exact samples, so it feeds truncation and
/// verification studies without a solve.
GridFunction sample_function(std::shared_ptr<const Grid> grid,
                             std::function<double(Vec2)> fn);

/// Solve the model equation with Dirichlet data `bdry` and source `f_src`.
/// Throws NonConvergence (with residual history in the exception) if the
/// Picard iteration stagnates above tolerance.
GridFunction solve(std::shared_ptr<const Grid> grid, const ExponentField& exp,
                   std::function<double(Vec2)> bdry,
                   std::function<double(Vec2)> f_src,
                   const SolverConfig& cfg = {}, SolveInfo* info = nullptr);

/// Max norm over interior (non-boundary-adjacent) nodes of the discrete
/// operator applied to u minus the right-hand side, with weights rebuilt from
/// u itself. Boundary-adjacent rows use shortened arms whose algebraic form
/// is not pointwise consistent, so the truncation metric excludes them.
double residual_norm(const GridFunction& u, const ExponentField& exp,
                     std::function<double(Vec2)> f_src);

/// Exact p-harmonic radial profile in the plane on [r_in, r_out] matched to
/// the given boundary values: logarithmic for p = 2, a power of the radius
/// with exponent (p−2)/(p−1) otherwise. Returns a callable of the radius.
std::function<double(double)> radial_reference(double p_const, double r_in,
                                               double r_out, double inner_val,
                                               double outer_val);

/// One side of an ordering comparison: the equation data for a solve on a
/// shared grid.
struct ProblemSpec {
    ExponentField exp;
    std::function<double(Vec2)> boundary;
    std::function<double(Vec2)> source;
};

/// Result of the discrete comparison check: the minimum of (v − u) over
/// inside nodes against the discretization allowance 10·h².
struct OrderingReport {
    bool pass = false;
    double min_gap = 0.0;   ///< min over inside nodes of v − u
    double allowance = 0.0; ///< 10·h²
    Vec2 witness{0.0, 0.0}; ///< where the minimum was attained
    double h = 0.0;
};

/// Solve both problems on the grid and report min(v − u). Requires a < 0,
/// identical exponents, and ordered data (f ≤ f′, g ≤ g′); violations throw
/// HypothesisError.
OrderingReport check_weak_comparison(std::shared_ptr<const Grid> grid,
                                     const ProblemSpec& u_spec,
                                     const ProblemSpec& v_spec,
                                     const SolverConfig& cfg = {});

} // namespace barrierlab

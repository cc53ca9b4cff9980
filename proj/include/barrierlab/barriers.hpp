#pragma once

///
/// Radial sub/supersolution barriers on annuli.
///
/// Four profile-based kinds share the construction pattern: a radial profile
/// solving g' = Cφ(g) (increasing, start μ) or f' = -Cφ(f) (decreasing,
/// start ν) is integrated into an annular radial function whose analytic
/// Hessian has one radial eigenvalue ±Cφ(profile)/r and n−1 tangential
/// eigenvalues ±profile/|x−y|. Strictness against the Pucci-type structure
/// bounds is then a one-dimensional scan over radii.
///
/// The fifth kind is the exponential barrier for the variable-exponent model
/// operator, certified by a closed-form inequality in its parameters instead
/// of a profile ODE.
///

#include <optional>
#include <utility>
#include <vector>

#include "barrierlab/nonlinearity.hpp"
#include "barrierlab/spectral.hpp"

namespace barrierlab {

/// Ellipticity pair, dimension, growth bound φ, and (optionally) the
/// zeroth-order bound γ with its domination constant: everything the barrier
/// constructions and strictness margins depend on.
struct StructureBounds {
    EllipticityPair ell;
    int n;
    GrowthFunction phi;
    std::optional<GrowthFunction> gamma;
    double Cstar = 0.0;

    StructureBounds(EllipticityPair ell_, int n_, GrowthFunction phi_);
    /// With the zeroth-order term: requires γ(t) ≤ Cstar·φ(t) on (0, 1],
    /// checked on a logarithmic sample grid.
    StructureBounds(EllipticityPair ell_, int n_, GrowthFunction phi_,
                    GrowthFunction gamma_, double Cstar_);
};

enum class ProfileKind { G, F };

/// Dense solution table of g' = Cφ(g) (kind G) or f' = -Cφ(f) (kind F) on
/// [0, t_max], with the boundary increment m = ∫₀^{min(1,t_max)} g dt resp.
/// ∫₀^{t_max} f dt. Nodes are spaced so that the interpolant's midpoint
/// residual stays below 10⁻⁸ relative to Cφ(profile).
struct BarrierProfile {
    ProfileKind kind;
    GrowthFunction phi;
    double C = 1.0;
    double initial = 1.0; ///< μ for G, ν for F
    double t_max = 1.0;
    bool truncated = false; ///< existence/positivity cut before the request
    num::HermiteTable table;
    double m = 0.0;

    double value(double t) const { return table.value(t); }
    /// Analytic slope ±Cφ(value(t)); exact at nodes by construction.
    double slope(double t) const;
    double integral_to(double t) const { return table.integral_to(t); }
};

enum class BarrierKind {
    SubAnnulus,         ///< ≤ 0, strict subsolution; 0 inner / −m·r outer
    PositiveSubAnnulus, ///< ∈ [0, m·r], subsolution with zeroth-order term
    NegatedSub,         ///< −SubAnnulus: supersolution, 0 inner / +m·r outer
    GrowingSuper,       ///< supersolution, 0 inner / +m·r at radius k·r
    ExpSuper            ///< exponential supersolution, 0 inner / M outer
};

/// A constructed radial barrier on the annulus B(center, k·r) \ B̄(center, r).
/// Immutable after construction and safe to share across threads.
struct RadialBarrier {
    BarrierKind kind = BarrierKind::SubAnnulus;
    std::vector<double> center;
    int n = 2;
    double r = 1.0;
    double r_star = 1.0;
    double k = 2.0;      ///< outer radius factor (2 except for GrowingSuper)
    double m = 0.0;      ///< boundary increment
    double offset = 0.0; ///< constant shift added to all values
    double grad_low = 0.0, grad_high = 0.0; ///< achieved |gradient| range
    std::optional<BarrierProfile> profile;  ///< absent for ExpSuper

    // Exponential-kind parameters: value = offset + amp·(e^{−μ} − e^{−μρ²/r²}).
    double exp_M = 0.0;
    double exp_mu = 0.0;
    double exp_amp = 0.0;
    double crux_value = 0.0; ///< certification expression at the chosen μ
};

/// Profile constant large enough that the strictness margins close for every
/// radius in (0, r_star]: 2(r* + Λ(n−1))/λ, or with the zeroth-order term
/// max(4(r* + Λ(n−1))/λ, 2 r* C*/λ) so half the Pucci term absorbs γ.
double choose_C(const StructureBounds& bounds, double r_star);

/// Integrate a barrier profile. G profiles that blow past the representable
/// range with an Osgood-convergent φ throw ProfileBlowup; other existence
/// cuts shorten t_max to 0.9· the reachable horizon and mark `truncated`.
BarrierProfile solve_profile(const StructureBounds& bounds, double C, double initial,
                             ProfileKind kind, double t_max_request);

/// Construct a barrier of the requested kind with boundary increment m ≤ M
/// (sub kinds, start-value halving) or m ≥ M (GrowingSuper, start-value
/// doubling). `offset` shifts all values by a nonnegative constant without
/// affecting the certified margins.
RadialBarrier build_barrier(const StructureBounds& bounds, std::vector<double> y,
                            double r, double r_star, BarrierKind kind, double M,
                            double offset = 0.0);

struct BarrierValue {
    double value;
    std::vector<double> gradient;
    SymmetricMatrix hessian;
};

/// Analytic value, gradient, and Hessian at a point strictly inside the
/// barrier's annulus.
BarrierValue eval_barrier(const RadialBarrier& b, const std::vector<double>& x);

/// Analytic (inner, outer) boundary values, offset included.
std::pair<double, double> boundary_values(const RadialBarrier& b);

struct MarginStation {
    double radius;
    double margin; ///< in units of φ(profile value) at that radius
};

struct StrictnessReport {
    bool subsolution_side = false; ///< margins must be < 0 (else > 0)
    double worst_margin = 0.0;
    double worst_radius = 0.0;
    std::vector<MarginStation> stations;
};

/// Evaluate the structure-condition margin — φ(|∇v|) + 𝒫⁺(D²v) (+ γ(v⁺)) on
/// the subsolution side, −φ(|∇v|) + 𝒫⁻(D²v) on the supersolution side — at
/// `grid_density` radial stations and certify its strict sign. Stations are
/// scanned in parallel up to the BARRIERLAB_THREADS budget.
StrictnessReport verify_strictness(const RadialBarrier& b, const StructureBounds& bounds,
                                   int grid_density = 10000);

/// Certification expression for the exponential barrier; the barrier is a
/// strict supersolution of the variable-exponent model problem when ≤ 0.
double exp_barrier_crux(double mu, double p_minus, double p_plus, double q_minus,
                        double q_plus, double grad_p_norm, int n, double M, double r,
                        double a);

/// Build the exponential supersolution for the variable-exponent problem:
/// value 0 on the inner sphere, M on the outer, with the smallest doubling-
/// schedule μ whose certification expression is nonpositive. Returns the
/// barrier and the chosen μ.
std::pair<RadialBarrier, double> build_exp_barrier(double p_minus, double p_plus,
                                                   double q_minus, double q_plus,
                                                   double grad_p_norm, int n, double M,
                                                   double r, double a);

} // namespace barrierlab

#pragma once

///
/// Empirical checks of the qualitative theory on solved or sampled fields:
/// the strong maximum principle, the boundary slope (Hopf) property,
/// comparability of a vanishing solution with the boundary distance, the
/// bounded ratio of two such solutions, and ordering against constructed
/// radial barriers.
///
/// Every check returns a VerificationReport; a pass verdict always carries
/// the measured quantity that certifies it. Checks never mutate their
/// inputs.
///

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "barrierlab/barriers.hpp"
#include "barrierlab/geometry.hpp"
#include "barrierlab/solver.hpp"

namespace barrierlab {

struct VerificationReport {
    std::string check;
    bool pass = false;
    double c_low = 0.0;  ///< lower constant (comparability / quotient checks)
    double c_high = 0.0; ///< upper constant
    double margin = 0.0; ///< signed margin certifying the verdict
    double measured = 0.0; ///< headline measured quantity
    Vec2 witness{0.0, 0.0}; ///< where the verdict was decided
    double band_radius = 0.0;
    double h = 0.0;
    std::string detail;
};

/// Maximum-principle check on plain sample arrays: fails when a positive
/// maximum (within rel. 10⁻¹²) is attained at a node marked interior, unless
/// the whole array is constant within `constant_tol`. This is the geometry-
/// free core shared by grid fields and one-dimensional counterexample scans.
VerificationReport check_smap_samples(const std::vector<double>& values,
                                      const std::vector<char>& interior,
                                      double constant_tol);

/// Strong-maximum-principle check over the discrete closure of u (inside
/// nodes plus their exterior neighbors). Constant branch tolerance 10·h².
VerificationReport check_smap(const GridFunction& u);

/// Boundary slope check at w along the inward direction v: one-sided
/// difference quotients at s ∈ {4h, 8h, 16h} must all clear a positive floor
/// (minimum form) or all fall below its negative (maximum form). Reports the
/// Richardson-extrapolated slope.
VerificationReport check_hopf_slope(const GridFunction& u, const Domain& d,
                                    const Vec2& w, const Vec2& v);

/// Ratio u/d over the band {d_lo < dist < d_hi} ∩ B(w, 2·d_hi) (defaults
/// d_lo = r, d_hi = 3r, i.e. the band Γ with its 6r ball), restricted to
/// nodes with dist ≥ 4h. c_high = max u/d, c_low = 1/min(u/d).
VerificationReport distance_comparability(
    const GridFunction& u, const Domain& d, const Vec2& w, double r,
    std::optional<std::array<double, 2>> d_window = std::nullopt);

/// The (dist, u/dist) pairs behind distance_comparability, for scatter
/// exports.
std::vector<std::array<double, 2>> band_scatter(
    const GridFunction& u, const Domain& d, const Vec2& w, double r,
    std::optional<std::array<double, 2>> d_window = std::nullopt);

/// Quotient u/v over Ω ∩ B(w, r) at nodes with dist ≥ 4h; passes when the
/// quotient range lies within [1/c_cap, c_cap]. Both fields must be positive
/// there and vanish on the boundary portion ∂Ω ∩ B(w, 6r).
VerificationReport boundary_harnack_quotient(const GridFunction& u,
                                             const GridFunction& v,
                                             const Domain& d, const Vec2& w,
                                             double r, double c_cap = 10.0);

/// Ordering of a grid field against a radial barrier over a radial region
/// (default: the barrier's whole open annulus). The caller warrants the
/// barrier is strict (verify_strictness); this check first enforces the
/// ordering on the region's relative boundary (rim values sampled through
/// radial projection, allowance 10·h², violation → HypothesisError), then
/// requires a strict gap of the correct sign at every region node.
VerificationReport compare_with_barrier(
    const GridFunction& u, const RadialBarrier& b,
    std::optional<std::array<double, 2>> region = std::nullopt);

/// Refinement stability of the measured constants: both c_low and c_high
/// agree within the relative tolerance between two reports.
bool ratios_stable(const VerificationReport& coarse,
                   const VerificationReport& fine, double rel_tol = 0.2);

} // namespace barrierlab

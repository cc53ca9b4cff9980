#pragma once

///
/// Growth functions φ (and minorants γ) together with the integral conditions
/// that govern the whole laboratory:
///
///   * the Osgood condition        ∫₀¹ dt/φ(t) = ∞,
///   * the Keller–Osserman tail    ∫₁^∞ dt/φ(t) = ∞,
///   * the decay-profile condition I(ν) = ∫₀^ε f dt → ∞ as ν → ∞,
///     where f solves f′ = −φ(f), f(0) = ν.
///
/// Improper integrals are decided numerically with a dyadic-band rule (see
/// check_integral_condition); the decay-profile condition is decided on a
/// doubling schedule of start values with plateau detection.
///

#include <string>
#include <vector>

#include "barrierlab/numerics.hpp"

namespace barrierlab {

enum class PhiKind { PowerLaw, VarExpLog, Tabulated };

/// A strictly increasing growth function on [0, ∞).
///
/// Kinds
///   PowerLaw(k, scale): scale·t^k. Exponents k ≥ 1 are the pure powers; for
///     k ∈ (0, 1) the function is the truncated variant scale·t^k on [0,1]
///     continued linearly by scale·t beyond 1, which keeps φ(t) ≥ t when
///     scale ≥ 1 and is the shape used by the Osgood counterexample.
///   VarExpLog(C): C·(|log t| + 1)·t, the log-corrected growth attached to
///     the variable-exponent model problem.
///   Tabulated: monotone-cubic (PCHIP) interpolation of a strictly
///     increasing sample table; evaluation outside the table range refuses
///     rather than extrapolates.
class GrowthFunction {
public:
    /// Default-constructs the identity power law φ(t) = t.
    GrowthFunction() = default;

    static GrowthFunction power_law(double exponent, double scale = 1.0);
    static GrowthFunction var_exp_log(double scale);
    static GrowthFunction tabulated(std::vector<double> ts, std::vector<double> vs,
                                    std::string label = "tabulated");

    double operator()(double t) const;

    PhiKind kind() const { return kind_; }
    const std::string& description() const { return desc_; }

    /// PowerLaw parameters (DomainError for other kinds).
    double power_exponent() const;
    double scale() const;

    /// Tabulated range (DomainError for other kinds).
    double table_min() const;
    double table_max() const;
    const num::HermiteTable& table() const;

private:
    PhiKind kind_ = PhiKind::PowerLaw;
    double k_ = 1.0;
    double scale_ = 1.0;
    num::HermiteTable table_;
    std::string desc_;
};

/// Checked evaluation: rejects NaN/negative arguments with DomainError.
double eval_phi(const GrowthFunction& phi, double t);

enum class IntegralCondition { Osgood, KellerOsserman, PhiB };

/// One diagnostic sample of the decision procedure: a dyadic band (or a start
/// value ν for the decay-profile condition), its contribution, and the
/// running sum (resp. I(ν)).
struct TracePoint {
    double where;
    double contribution;
    double partial_sum;
};

/// Outcome of an integral-condition check. "Divergent" doubles as "Holds"
/// for the decay-profile condition; a convergent verdict always carries a
/// finite limit estimate and an error bound for it.
struct ConditionVerdict {
    IntegralCondition condition = IntegralCondition::Osgood;
    bool divergent = false;
    double limit = std::numeric_limits<double>::infinity();
    double limit_error = 0.0;
    std::vector<TracePoint> trace;

    bool holds() const { return divergent; }
    bool convergent() const { return !divergent; }
};

/// Decide ∫₀¹ dt/φ (Osgood) or ∫₁^∞ dt/φ (KellerOsserman) with the dyadic
/// band rule: contributions are accumulated band by band; a run of 40
/// consecutive bands each contributing at least half of the run's first band,
/// or a partial sum beyond 10⁶, declares divergence; contributions that fall
/// to the machine-level tail declare convergence, with the limit obtained by
/// geometric tail extrapolation. `tolerance` bounds the quadrature error of
/// a convergent limit.
ConditionVerdict check_integral_condition(const GrowthFunction& phi,
                                          IntegralCondition which,
                                          double tolerance = 1e-12);

/// Decide whether I(ν) = ∫₀^ε f dt, f′ = −φ(f), f(0) = ν, is unbounded in ν.
/// Walks `nu_schedule` (default: doubling from 1 up to `cap`): Holds as soon
/// as I(ν) passes the divergence threshold 10³, or when the schedule is
/// exhausted without a certified plateau; Fails with the extrapolated plateau
/// value when increments decay geometrically.
ConditionVerdict check_phi_B(const GrowthFunction& phi, double eps,
                             std::vector<double> nu_schedule = {},
                             double cap = 1e12);

/// Closed-form I(ν) = ∫₀^ε f dt for the pure power φ(s) = s^k:
///   ν(1 − e^{−ε})                                  (k = 1)
///   log(1 + εν)                                    (k = 2)
///   (ν^{2−k} − ((k−1)ε + ν^{1−k})^{(2−k)/(1−k)})/(2−k)   otherwise.
/// Serves as the oracle for check_phi_B.
double power_law_closed_form(double k, double eps, double nu);

/// The decaying profile itself for φ(s) = s^k: f(t) = ν e^{−t} when k = 1,
/// f(t) = ((k−1)t + ν^{1−k})^{1/(1−k)} when k > 1.
double power_law_profile(double k, double nu, double t);

} // namespace barrierlab

#include "barrierlab/nonlinearity.hpp"

#include <cmath>

namespace barrierlab {

// ===========================================================================
// GrowthFunction
// ===========================================================================

GrowthFunction GrowthFunction::power_law(double exponent, double scale) {
    if (!std::isfinite(exponent) || exponent <= 0.0)
        throw InvalidNonlinearity("power_law: exponent must be positive and finite");
    if (!std::isfinite(scale) || scale <= 0.0)
        throw InvalidNonlinearity("power_law: scale must be positive and finite");
    GrowthFunction g;
    g.kind_ = PhiKind::PowerLaw;
    g.k_ = exponent;
    g.scale_ = scale;
    g.desc_ = "power_law(k=" + std::to_string(exponent) + ", scale=" + std::to_string(scale) +
              (exponent < 1.0 ? ", truncated)" : ")");
    return g;
}

GrowthFunction GrowthFunction::var_exp_log(double scale) {
    if (!std::isfinite(scale) || scale <= 0.0)
        throw InvalidNonlinearity("var_exp_log: scale must be positive and finite");
    GrowthFunction g;
    g.kind_ = PhiKind::VarExpLog;
    g.scale_ = scale;
    g.desc_ = "var_exp_log(C=" + std::to_string(scale) + ")";
    return g;
}

GrowthFunction GrowthFunction::tabulated(std::vector<double> ts, std::vector<double> vs,
                                         std::string label) {
    if (ts.size() != vs.size() || ts.size() < 2)
        throw InvalidNonlinearity("tabulated: need matching arrays with >= 2 samples");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!std::isfinite(ts[i]) || !std::isfinite(vs[i]) || ts[i] < 0.0 || vs[i] < 0.0)
            throw InvalidNonlinearity("tabulated: samples must be finite and nonnegative");
        if (i > 0 && !(ts[i] > ts[i - 1] && vs[i] > vs[i - 1]))
            throw InvalidNonlinearity("tabulated: table must be strictly increasing");
    }
    GrowthFunction g;
    g.kind_ = PhiKind::Tabulated;
    g.table_ = num::HermiteTable(ts, vs, num::monotone_slopes(ts, vs));
    g.desc_ = std::move(label);
    return g;
}

double GrowthFunction::operator()(double t) const {
    switch (kind_) {
    case PhiKind::PowerLaw:
        if (t == 0.0) return 0.0;
        if (k_ < 1.0 && t > 1.0) return scale_ * t; // truncated variant
        return scale_ * std::pow(t, k_);
    case PhiKind::VarExpLog:
        if (t == 0.0) return 0.0;
        return scale_ * (std::abs(std::log(t)) + 1.0) * t;
    case PhiKind::Tabulated:
        return table_.value(t); // refuses outside the table range
    }
    throw DomainError("GrowthFunction: unknown kind");
}

double GrowthFunction::power_exponent() const {
    if (kind_ != PhiKind::PowerLaw) throw DomainError("power_exponent: not a power law");
    return k_;
}

double GrowthFunction::scale() const {
    if (kind_ == PhiKind::Tabulated) throw DomainError("scale: tabulated kind has none");
    return scale_;
}

double GrowthFunction::table_min() const {
    if (kind_ != PhiKind::Tabulated) throw DomainError("table_min: not tabulated");
    return table_.t_min();
}

double GrowthFunction::table_max() const {
    if (kind_ != PhiKind::Tabulated) throw DomainError("table_max: not tabulated");
    return table_.t_max();
}

const num::HermiteTable& GrowthFunction::table() const {
    if (kind_ != PhiKind::Tabulated) throw DomainError("table: not tabulated");
    return table_;
}

double eval_phi(const GrowthFunction& phi, double t) {
    if (std::isnan(t) || t < 0.0) throw DomainError("eval_phi: t must be a nonnegative real");
    if (!std::isfinite(t)) throw DomainError("eval_phi: t must be finite");
    return phi(t);
}

// ===========================================================================
// Dyadic-band improper integrals
// ===========================================================================

namespace {

constexpr double kSumCap = 1e6;       // partial sum beyond this: divergent
constexpr int kRunLength = 40;        // anchored-run length declaring divergence
constexpr double kRunFraction = 0.5;  // band must carry this fraction of its anchor
constexpr int kMaxBands = 1015;       // keeps band edges in normal double range

struct BandRule {
    double sum = 0.0;
    double anchor = -1.0;
    int run = 0;
    double prev = -1.0;
    double ratio = 0.5; // latest consecutive-band ratio, for tail extrapolation

    /// Feed one band contribution; returns true when divergence is declared.
    bool feed(double b) {
        sum += b;
        if (prev > 0.0 && b > 0.0) ratio = b / prev;
        prev = b;
        if (anchor < 0.0 || b < kRunFraction * anchor) {
            anchor = b;
            run = 1;
        } else {
            ++run;
        }
        return sum > kSumCap || run >= kRunLength;
    }
};

} // namespace

ConditionVerdict check_integral_condition(const GrowthFunction& phi, IntegralCondition which,
                                          double tolerance) {
    if (which == IntegralCondition::PhiB)
        throw DomainError("check_integral_condition: use check_phi_B for the decay-profile condition");
    const bool toward_zero = which == IntegralCondition::Osgood;

    const auto integrand = [&phi](double t) {
        const double v = phi(t);
        if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidNonlinearity("check_integral_condition: nonpositive phi sample on range");
        return 1.0 / v;
    };

    ConditionVerdict verdict;
    verdict.condition = which;
    BandRule rule;
    double tail_contribution = 0.0;

    for (int j = 0; j < kMaxBands; ++j) {
        // Osgood walks (2^{-j-1}, 2^{-j}] down toward 0; the Keller-Osserman
        // tail walks [2^j, 2^{j+1}) out toward infinity.
        const double lo = toward_zero ? std::ldexp(1.0, -j - 1) : std::ldexp(1.0, j);
        const double hi = toward_zero ? std::ldexp(1.0, -j) : std::ldexp(1.0, j + 1);
        const double band_tol = std::max(1e-17, tolerance * std::ldexp(1.0, -j - 3));
        const double b = num::integrate(integrand, lo, hi, band_tol);
        if (!std::isfinite(b))
            throw IntegrationError("check_integral_condition: non-finite band contribution");
        verdict.trace.push_back({toward_zero ? lo : hi, b, rule.sum + b});
        if (rule.feed(b)) {
            verdict.divergent = true;
            verdict.limit = std::numeric_limits<double>::infinity();
            return verdict;
        }
        if (j >= 8 && b <= std::max(1e-17 * rule.sum, 1e-306)) {
            tail_contribution = b;
            break;
        }
    }

    // Convergent (or out of bands, in which case the trend decides). The
    // remaining tail is extrapolated geometrically from the last ratio.
    if (tail_contribution == 0.0) {
        if (rule.ratio >= 0.98) {
            verdict.divergent = true;
            verdict.limit = std::numeric_limits<double>::infinity();
            return verdict;
        }
        tail_contribution = rule.prev;
    }
    const double rho = std::clamp(rule.ratio, 0.0, 0.95);
    const double tail = tail_contribution * rho / (1.0 - rho);
    verdict.divergent = false;
    verdict.limit = rule.sum + tail;
    verdict.limit_error = tail + tolerance + 64.0 * std::numeric_limits<double>::epsilon() * rule.sum;
    return verdict;
}

// ===========================================================================
// Decay-profile condition
// ===========================================================================

namespace {

constexpr double kPhiBThreshold = 1e3; // I(nu) at or beyond this: Holds
constexpr int kPlateauRun = 5;         // consecutive geometric increments
constexpr double kPlateauRatio = 0.85; // increment ratio certifying a plateau

/// I(ν) = ∫₀^ε f with f' = -φ(f), f(0) = ν, by adaptive RK and an exact
/// Hermite-table integral over the accepted steps.
double decay_profile_integral(const GrowthFunction& phi, double eps, double nu) {
    num::OdeOptions opt;
    opt.rtol = 1e-10;
    opt.atol = 1e-14;
    opt.max_step = eps / 64.0;
    opt.y_min = 1e-300; // positivity floor; the remaining mass is negligible
    const auto rhs = [&phi](double, double y) { return -phi(std::max(y, 0.0)); };
    const auto sol = num::integrate_ode(rhs, 0.0, nu, eps, opt);

    std::vector<double> ts, ys, ds;
    ts.reserve(sol.points.size());
    ys.reserve(sol.points.size());
    ds.reserve(sol.points.size());
    for (const auto& p : sol.points) {
        ts.push_back(p.t);
        ys.push_back(p.y);
        ds.push_back(rhs(p.t, p.y));
    }
    if (ts.size() < 2) return 0.0;
    return num::HermiteTable(ts, ys, ds).integral_to(ts.back());
}

} // namespace

ConditionVerdict check_phi_B(const GrowthFunction& phi, double eps,
                             std::vector<double> nu_schedule, double cap) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("check_phi_B: eps must be positive");
    if (!(cap > 0.0)) throw DomainError("check_phi_B: cap must be positive");
    if (nu_schedule.empty()) {
        for (double nu = 1.0; nu <= cap; nu *= 2.0) nu_schedule.push_back(nu);
    }
    for (std::size_t i = 0; i < nu_schedule.size(); ++i) {
        if (!(nu_schedule[i] > 0.0) || (i > 0 && !(nu_schedule[i] > nu_schedule[i - 1])))
            throw DomainError("check_phi_B: nu_schedule must be positive and strictly increasing");
    }

    ConditionVerdict verdict;
    verdict.condition = IntegralCondition::PhiB;

    double prev_I = 0.0, prev_inc = -1.0, last_ratio = 0.5;
    int plateau_run = 0;
    bool plateau = false;

    for (double nu : nu_schedule) {
        if (nu > cap) break;
        const double I = decay_profile_integral(phi, eps, nu);
        verdict.trace.push_back({nu, I - prev_I, I});
        if (I >= kPhiBThreshold) {
            verdict.divergent = true;
            verdict.limit = std::numeric_limits<double>::infinity();
            return verdict;
        }
        const double inc = I - prev_I;
        if (prev_inc > 0.0) {
            last_ratio = inc / prev_inc;
            plateau_run = last_ratio <= kPlateauRatio ? plateau_run + 1 : 0;
            if (plateau_run >= kPlateauRun) plateau = true;
        }
        prev_inc = inc;
        prev_I = I;
        // Once a plateau is certified, keep doubling only while it still
        // sharpens the estimate.
        if (plateau && inc <= 1e-12 * std::max(I, 1.0)) break;
    }

    if (plateau) {
        const double rho = std::clamp(last_ratio, 0.0, 0.95);
        const double tail = prev_inc * rho / (1.0 - rho);
        verdict.divergent = false;
        verdict.limit = prev_I + tail;
        verdict.limit_error = tail + 1e-8 * std::max(1.0, verdict.limit);
        return verdict;
    }
    // Schedule exhausted without threshold or plateau: the increments never
    // settled into a geometric decay, so the growth is unbounded in trend.
    verdict.divergent = true;
    verdict.limit = std::numeric_limits<double>::infinity();
    return verdict;
}

// ===========================================================================
// Power-law closed forms
// ===========================================================================

double power_law_closed_form(double k, double eps, double nu) {
    if (!(k >= 1.0)) throw DomainError("power_law_closed_form: need k >= 1");
    if (!(eps > 0.0) || !(nu > 0.0))
        throw DomainError("power_law_closed_form: need eps > 0 and nu > 0");
    if (std::abs(k - 1.0) < 1e-12) return nu * (1.0 - std::exp(-eps));
    if (std::abs(k - 2.0) < 1e-12) return std::log1p(eps * nu);
    const double inner = (k - 1.0) * eps + std::pow(nu, 1.0 - k);
    return (std::pow(nu, 2.0 - k) - std::pow(inner, (2.0 - k) / (1.0 - k))) / (2.0 - k);
}

double power_law_profile(double k, double nu, double t) {
    if (!(k >= 1.0) || !(nu > 0.0) || t < 0.0)
        throw DomainError("power_law_profile: need k >= 1, nu > 0, t >= 0");
    if (std::abs(k - 1.0) < 1e-12) return nu * std::exp(-t);
    return std::pow((k - 1.0) * t + std::pow(nu, 1.0 - k), 1.0 / (1.0 - k));
}

} // namespace barrierlab

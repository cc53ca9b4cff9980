#include "barrierlab/barriers.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "barrierlab/parallel.hpp"

namespace barrierlab {

namespace {

constexpr double kUCap = 690.0;    ///< profile ceiling e^690 (stays below overflow)
constexpr double kUFloor = -690.0; ///< positivity floor e^-690
// Must stay above e^kUFloor so the bottom rung of the start-value halving
// schedule is still walkable (its probe must reach the horizon, not die on
// the representable-range floor).
constexpr double kStartFloor = 1e-290;
constexpr double kStartCap = 1e12;
/// Dense-table log-level cell width. At 0.005 the interpolant's midpoint
/// slope residual stays below 1e-8 relative to Cφ(profile), which is what
/// keeps finite-difference cross-checks of the analytic Hessian clean.
constexpr double kDenseDu = 0.005;

/// dt/du for the level substitution g = e^u of g' = ±Cφ(g): time spent per
/// unit of log-level.
double time_integrand(const GrowthFunction& phi, double C, double u) {
    const double g = std::exp(u);
    return g / (C * eval_phi(phi, g));
}

/// d(∫ profile dt)/du under the same substitution.
double mass_integrand(const GrowthFunction& phi, double C, double u) {
    const double g = std::exp(u);
    return g * (g / (C * eval_phi(phi, g)));
}

struct WalkOutcome {
    bool reached = false; ///< t_target attained before the cap/floor
    double t_end = 0.0;
    double end_value = 0.0;
    double m = 0.0; ///< ∫₀^{min(t_end, m_cut)} profile dt
    std::vector<double> ts, ys, ds;
};

/// March the profile in logarithmic levels of width du, accumulating time and
/// profile mass per cell with fixed Gauss panels (the integrands are smooth
/// on that scale, so each cell is at machine accuracy). The final cell is
/// split by bisection so the last node lands exactly on t_target.
WalkOutcome profile_walk(const GrowthFunction& phi, double C, double init,
                         bool growing, double t_target, double du, bool record,
                         double m_cut) {
    WalkOutcome out;
    const double sign = growing ? 1.0 : -1.0;
    double u = std::log(init);
    double t = 0.0;

    if (record) {
        out.ts.push_back(0.0);
        out.ys.push_back(init);
        out.ds.push_back(sign * C * eval_phi(phi, init));
    }

    const auto cell_time = [&](double a, double b) {
        return num::gauss20([&](double v) { return time_integrand(phi, C, v); }, a, b);
    };
    const auto cell_mass = [&](double a, double b) {
        return num::gauss20([&](double v) { return mass_integrand(phi, C, v); }, a, b);
    };
    // Mass of the cell [a,b] restricted to times before m_cut; t_a is the
    // time at the cell edge closer to the start.
    const auto clipped_mass = [&](double lo, double hi, double t_a, double dt) {
        if (t_a >= m_cut) return 0.0;
        if (t_a + dt <= m_cut) return cell_mass(lo, hi);
        const double need = m_cut - t_a;
        const double a_edge = growing ? lo : hi; // start-side edge
        const double cut = num::bisect(
            [&](double b) {
                return (growing ? cell_time(a_edge, b) : cell_time(b, a_edge)) - need;
            },
            lo, hi, 1e-13);
        return growing ? cell_mass(lo, cut) : cell_mass(cut, hi);
    };

    for (std::size_t cells = 0;; ++cells) {
        if (cells > 4'000'000)
            throw IntegrationError("profile_walk: cell budget exhausted");
        double u_next = u + sign * du;
        if (growing && u_next > kUCap) u_next = kUCap;
        if (!growing && u_next < kUFloor) u_next = kUFloor;
        const double lo = growing ? u : u_next;
        const double hi = growing ? u_next : u;
        const double dt = cell_time(lo, hi);

        if (t + dt >= t_target) {
            // Split the cell at the exact crossing of t_target.
            const double need = t_target - t;
            const double a_edge = growing ? lo : hi;
            double cut;
            if (need <= 0.0) {
                cut = a_edge;
            } else {
                cut = num::bisect(
                    [&](double b) {
                        return (growing ? cell_time(a_edge, b) : cell_time(b, a_edge)) -
                               need;
                    },
                    lo, hi, 1e-13);
            }
            const double part_lo = growing ? lo : cut;
            const double part_hi = growing ? cut : hi;
            const double dt_part = cell_time(part_lo, part_hi);
            out.m += clipped_mass(part_lo, part_hi, t, dt_part);
            t = t_target;
            u = cut;
            out.reached = true;
            if (record) {
                out.ts.push_back(t);
                out.ys.push_back(std::exp(u));
                out.ds.push_back(sign * C * eval_phi(phi, std::exp(u)));
            }
            break;
        }

        out.m += clipped_mass(lo, hi, t, dt);
        t += dt;
        u = u_next;
        if (record) {
            out.ts.push_back(t);
            out.ys.push_back(std::exp(u));
            out.ds.push_back(sign * C * eval_phi(phi, std::exp(u)));
        }
        if (u >= kUCap || u <= kUFloor) break; // representable range exhausted
    }

    out.t_end = t;
    out.end_value = std::exp(u);
    return out;
}

/// Coarse walk used inside the start-value selection loops: no table, wider
/// cells (still machine-accurate per cell).
WalkOutcome scan_walk(const GrowthFunction& phi, double C, double init, bool growing,
                      double t_target, double m_cut) {
    return profile_walk(phi, C, init, growing, t_target, 0.2, false, m_cut);
}

} // namespace

// ---------------------------------------------------------------------------
// Structure bounds
// ---------------------------------------------------------------------------

namespace {
void check_dimension(int n) {
    if (n < 1 || n > 8)
        throw DomainError("StructureBounds: dimension must be between 1 and 8");
}
} // namespace

StructureBounds::StructureBounds(EllipticityPair ell_, int n_, GrowthFunction phi_)
    : ell(ell_), n(n_), phi(std::move(phi_)) {
    check_dimension(n);
}

StructureBounds::StructureBounds(EllipticityPair ell_, int n_, GrowthFunction phi_,
                                 GrowthFunction gamma_, double Cstar_)
    : ell(ell_), n(n_), phi(std::move(phi_)), gamma(std::move(gamma_)), Cstar(Cstar_) {
    check_dimension(n);
    if (!(Cstar >= 0.0) || !std::isfinite(Cstar))
        throw DomainError("StructureBounds: Cstar must be finite and nonnegative");
    // Domination γ(t) ≤ C*·φ(t) on (0, 1], sampled on a log grid.
    for (int i = 0; i <= 80; ++i) {
        const double t = std::pow(10.0, -8.0 + 8.0 * i / 80.0);
        const double g = eval_phi(*gamma, t);
        const double bound = Cstar * eval_phi(phi, t);
        if (g > bound * (1.0 + 1e-9) + 1e-300) {
            std::ostringstream msg;
            msg << "StructureBounds: gamma(" << t << ") = " << g
                << " exceeds Cstar*phi = " << bound;
            throw DomainError(msg.str());
        }
    }
}

// ---------------------------------------------------------------------------
// Profile constant and profile integration
// ---------------------------------------------------------------------------

double choose_C(const StructureBounds& bounds, double r_star) {
    if (!(r_star > 0.0) || !std::isfinite(r_star))
        throw DomainError("choose_C: r_star must be positive and finite");
    const double lam = bounds.ell.lambda;
    const double Lam = bounds.ell.Lambda;
    const double base = (r_star + Lam * (bounds.n - 1)) / lam;
    if (!bounds.gamma) return 2.0 * base;
    return std::max(4.0 * base, 2.0 * r_star * bounds.Cstar / lam);
}

double BarrierProfile::slope(double t) const {
    const double s = C * eval_phi(phi, value(t));
    return kind == ProfileKind::G ? s : -s;
}

BarrierProfile solve_profile(const StructureBounds& bounds, double C, double initial,
                             ProfileKind kind, double t_max_request) {
    if (!(C > 0.0) || !std::isfinite(C))
        throw DomainError("solve_profile: C must be positive and finite");
    if (!(initial > 0.0) || !std::isfinite(initial))
        throw DomainError("solve_profile: start value must be positive and finite");
    if (!(t_max_request > 0.0) || !std::isfinite(t_max_request))
        throw DomainError("solve_profile: horizon must be positive and finite");

    const bool growing = kind == ProfileKind::G;
    double m_cut = growing ? std::min(1.0, t_max_request) : t_max_request;
    WalkOutcome walk =
        profile_walk(bounds.phi, C, initial, growing, t_max_request, kDenseDu, true, m_cut);

    bool truncated = false;
    double t_max = t_max_request;
    if (!walk.reached) {
        if (growing &&
            check_integral_condition(bounds.phi, IntegralCondition::Osgood).convergent())
            throw ProfileBlowup(
                "solve_profile: increasing profile left the representable range "
                "before the requested horizon and the start value cannot be spread "
                "over an Osgood-convergent growth");
        t_max = 0.9 * walk.t_end;
        if (!(t_max > 0.0))
            throw IntegrationError("solve_profile: empty existence interval");
        m_cut = growing ? std::min(1.0, t_max) : t_max;
        walk = profile_walk(bounds.phi, C, initial, growing, t_max, kDenseDu, true, m_cut);
        truncated = true;
    }

    BarrierProfile prof{kind, bounds.phi, C, initial, t_max, truncated,
                        num::HermiteTable(std::move(walk.ts), std::move(walk.ys),
                                          std::move(walk.ds)),
                        0.0};
    // Boundary increment from the table's exact piecewise-cubic integral so
    // that barrier boundary values cancel to roundoff.
    prof.m = prof.table.integral_to(m_cut);
    return prof;
}

// ---------------------------------------------------------------------------
// Barrier construction
// ---------------------------------------------------------------------------

namespace {

bool is_sub_family(BarrierKind k) {
    return k == BarrierKind::SubAnnulus || k == BarrierKind::PositiveSubAnnulus ||
           k == BarrierKind::NegatedSub;
}

/// Start-value acceptance test for the halving loop of the sub-family kinds.
bool mu_acceptable(const StructureBounds& bounds, double C, double mu, double M,
                   double r, BarrierKind kind) {
    const WalkOutcome w = scan_walk(bounds.phi, C, mu, true, 1.0, 1.0);
    if (!w.reached) return false; // profile left the representable range
    if (w.m > M) return false;
    if (w.end_value > 1.0 / mu) return false;
    if (kind == BarrierKind::PositiveSubAnnulus && r * w.end_value > 1.0) return false;
    return true;
}

RadialBarrier build_sub_family(const StructureBounds& bounds, std::vector<double> y,
                               double r, double r_star, BarrierKind kind, double M,
                               double offset) {
    const double C = choose_C(bounds, r_star);
    const double mu0 = std::min(1.0, M);

    int j_max = 0;
    while (std::ldexp(mu0, -(j_max + 1)) >= kStartFloor) ++j_max;

    // The acceptance test is monotone in the start value (smaller μ gives a
    // pointwise smaller profile, hence smaller m and end slope), so the first
    // accepted rung of the halving schedule can be found by bisection on the
    // rung index.
    int chosen;
    if (mu_acceptable(bounds, C, mu0, M, r, kind)) {
        chosen = 0;
    } else if (!mu_acceptable(bounds, C, std::ldexp(mu0, -j_max), M, r, kind)) {
        throw ConstructionFailed(
            "build_barrier: start value underflowed before the boundary increment "
            "dropped below the target");
    } else {
        int lo = 0, hi = j_max; // lo rejected, hi accepted
        while (hi - lo > 1) {
            const int mid = lo + (hi - lo) / 2;
            (mu_acceptable(bounds, C, std::ldexp(mu0, -mid), M, r, kind) ? hi : lo) = mid;
        }
        chosen = hi;
    }

    // Dense profile at the accepted start value; re-verify against the dense
    // table and step down again in the (borderline) case the coarse scan and
    // the dense integral disagree.
    for (int attempt = 0;; ++attempt) {
        if (attempt > 4 || chosen > j_max)
            throw ConstructionFailed("build_barrier: could not certify the start value");
        const double mu = std::ldexp(mu0, -chosen);
        BarrierProfile prof = solve_profile(bounds, C, mu, ProfileKind::G, 1.0);
        if (prof.truncated) {
            ++chosen;
            continue;
        }
        const double g1 = prof.value(1.0);
        const bool ok = prof.m <= M && g1 <= 1.0 / mu &&
                        (kind != BarrierKind::PositiveSubAnnulus || r * g1 <= 1.0);
        if (!ok) {
            ++chosen;
            continue;
        }
        RadialBarrier b;
        b.kind = kind;
        b.center = std::move(y);
        b.n = bounds.n;
        b.r = r;
        b.r_star = r_star;
        b.k = 2.0;
        b.m = prof.m;
        b.offset = offset;
        b.grad_low = mu;
        b.grad_high = g1;
        b.profile = std::move(prof);
        return b;
    }
}

RadialBarrier build_growing_super(const StructureBounds& bounds, std::vector<double> y,
                                  double r, double r_star, double M, double offset) {
    if (!check_phi_B(bounds.phi, 1.0).holds())
        throw PhiBViolated(
            "build_barrier: the growing supersolution needs the decay-profile "
            "growth condition, which this nonlinearity fails");

    const double C = choose_C(bounds, r_star);
    const double nu0 = std::max(1.0, M);

    // Outer-radius factor from the blow-down time of the decay profile at the
    // initial start value (monotone in ν, so valid for all later rungs).
    const ConditionVerdict osgood =
        check_integral_condition(bounds.phi, IntegralCondition::Osgood);
    double k = 2.0;
    if (osgood.convergent()) {
        double T = osgood.limit; // ∫₀¹ dt/φ
        if (nu0 > 1.0)
            T += num::integrate([&](double s) { return 1.0 / eval_phi(bounds.phi, s); },
                                1.0, nu0);
        T /= C;
        k = std::min(2.0, 0.9 * T);
        if (!(k > 1.0))
            throw AnnulusTooThin(
                "build_barrier: decay-profile blow-down time leaves no annulus "
                "(outer factor k <= 1)");
    }

    double nu = nu0;
    while (scan_walk(bounds.phi, C, nu, false, k - 1.0, k - 1.0).m < M) {
        nu *= 2.0;
        if (nu > kStartCap)
            throw PhiBViolated(
                "build_barrier: start-value cap reached before the boundary "
                "increment target");
    }

    for (int attempt = 0;; ++attempt) {
        if (attempt > 4)
            throw ConstructionFailed("build_barrier: could not certify the start value");
        BarrierProfile prof = solve_profile(bounds, C, nu, ProfileKind::F, k - 1.0);
        if (prof.truncated)
            throw ConstructionFailed(
                "build_barrier: decay profile underflowed inside the annulus");
        if (prof.m < M) {
            nu *= 2.0;
            if (nu > kStartCap)
                throw PhiBViolated(
                    "build_barrier: start-value cap reached before the boundary "
                    "increment target");
            continue;
        }
        RadialBarrier b;
        b.kind = BarrierKind::GrowingSuper;
        b.center = std::move(y);
        b.n = bounds.n;
        b.r = r;
        b.r_star = r_star;
        b.k = k;
        b.m = prof.m;
        b.offset = offset;
        b.grad_low = prof.value(k - 1.0);
        b.grad_high = nu;
        b.profile = std::move(prof);
        return b;
    }
}

} // namespace

RadialBarrier build_barrier(const StructureBounds& bounds, std::vector<double> y,
                            double r, double r_star, BarrierKind kind, double M,
                            double offset) {
    if (static_cast<int>(y.size()) != bounds.n)
        throw DomainError("build_barrier: center dimension mismatch");
    if (!(r > 0.0) || !(r <= r_star))
        throw DomainError("build_barrier: need 0 < r <= r_star");
    if (!(M > 0.0) || !std::isfinite(M))
        throw DomainError("build_barrier: target increment M must be positive");
    if (!(offset >= 0.0) || !std::isfinite(offset))
        throw DomainError("build_barrier: offset must be nonnegative");

    if (kind == BarrierKind::ExpSuper)
        throw DomainError(
            "build_barrier: the exponential kind is built by build_exp_barrier");
    if (kind == BarrierKind::PositiveSubAnnulus) {
        if (!bounds.gamma)
            throw DomainError(
                "build_barrier: the positive subsolution kind needs the "
                "zeroth-order bound gamma/Cstar");
        if (!(r <= 1.0))
            throw DomainError(
                "build_barrier: the positive subsolution kind needs r <= 1");
    }

    if (is_sub_family(kind)) return build_sub_family(bounds, std::move(y), r, r_star, kind, M, offset);
    return build_growing_super(bounds, std::move(y), r, r_star, M, offset);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

struct RadialDerivatives {
    double value;  ///< offset included
    double first;  ///< dV/dρ
    double second; ///< d²V/dρ²
};

RadialDerivatives radial_eval(const RadialBarrier& b, double rho) {
    RadialDerivatives d{};
    if (b.kind == BarrierKind::ExpSuper) {
        const double E = std::exp(-b.exp_mu * rho * rho / (b.r * b.r));
        d.value = b.offset + b.exp_amp * (std::exp(-b.exp_mu) - E);
        const double base = 2.0 * b.exp_amp * b.exp_mu / (b.r * b.r) * E;
        d.first = base * rho;
        d.second = base * (1.0 - 2.0 * b.exp_mu * rho * rho / (b.r * b.r));
        return d;
    }
    const BarrierProfile& prof = *b.profile;
    if (b.kind == BarrierKind::GrowingSuper) {
        const double xi = rho / b.r - 1.0;
        const double f = prof.value(xi);
        d.value = b.offset + b.r * prof.integral_to(xi);
        d.first = f;
        d.second = -prof.C * eval_phi(prof.phi, f) / b.r;
        return d;
    }
    const double sharp = 2.0 - rho / b.r;
    const double g = prof.value(sharp);
    const double I = prof.integral_to(sharp);
    switch (b.kind) {
    case BarrierKind::SubAnnulus:
        d.value = b.offset + b.r * (I - b.m);
        d.first = -g;
        d.second = prof.C * eval_phi(prof.phi, g) / b.r;
        break;
    case BarrierKind::PositiveSubAnnulus:
        d.value = b.offset + b.r * I;
        d.first = -g;
        d.second = prof.C * eval_phi(prof.phi, g) / b.r;
        break;
    case BarrierKind::NegatedSub:
        d.value = b.offset + b.r * (b.m - I);
        d.first = g;
        d.second = -prof.C * eval_phi(prof.phi, g) / b.r;
        break;
    default:
        throw DomainError("radial_eval: unexpected kind");
    }
    return d;
}

} // namespace

BarrierValue eval_barrier(const RadialBarrier& b, const std::vector<double>& x) {
    if (x.size() != b.center.size())
        throw DomainError("eval_barrier: point dimension mismatch");
    double rho2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dxi = x[i] - b.center[i];
        rho2 += dxi * dxi;
    }
    const double rho = std::sqrt(rho2);
    if (!(rho > b.r && rho < b.k * b.r)) {
        std::ostringstream msg;
        msg << "eval_barrier: |x - y| = " << rho << " outside the open annulus ("
            << b.r << ", " << b.k * b.r << ")";
        throw OutOfDomain(msg.str());
    }

    const RadialDerivatives d = radial_eval(b, rho);
    BarrierValue out{d.value, std::vector<double>(x.size()), SymmetricMatrix(b.n)};
    const double tangential = d.first / rho;
    for (int i = 0; i < b.n; ++i) {
        const double ei = (x[static_cast<std::size_t>(i)] -
                           b.center[static_cast<std::size_t>(i)]) / rho;
        out.gradient[static_cast<std::size_t>(i)] = d.first * ei;
        for (int j = i; j < b.n; ++j) {
            const double ej = (x[static_cast<std::size_t>(j)] -
                               b.center[static_cast<std::size_t>(j)]) / rho;
            double h = (d.second - tangential) * ei * ej;
            if (i == j) h += tangential;
            out.hessian.set(i, j, h);
        }
    }
    return out;
}

std::pair<double, double> boundary_values(const RadialBarrier& b) {
    switch (b.kind) {
    case BarrierKind::SubAnnulus: return {b.offset, b.offset - b.m * b.r};
    case BarrierKind::PositiveSubAnnulus: return {b.offset + b.m * b.r, b.offset};
    case BarrierKind::NegatedSub: return {b.offset, b.offset + b.m * b.r};
    case BarrierKind::GrowingSuper: return {b.offset, b.offset + b.m * b.r};
    case BarrierKind::ExpSuper: return {b.offset, b.offset + b.exp_M};
    }
    throw DomainError("boundary_values: unexpected kind");
}

// ---------------------------------------------------------------------------
// Strictness
// ---------------------------------------------------------------------------

StrictnessReport verify_strictness(const RadialBarrier& b, const StructureBounds& bounds,
                                   int grid_density) {
    if (grid_density < 1) throw DomainError("verify_strictness: empty station grid");
    if (b.n != bounds.n)
        throw DomainError("verify_strictness: dimension mismatch with bounds");

    StrictnessReport report;
    report.subsolution_side = is_sub_family(b.kind) &&
                              b.kind != BarrierKind::NegatedSub;
    report.stations.resize(static_cast<std::size_t>(grid_density));

    const double span = (b.k - 1.0) * b.r;

    if (b.kind == BarrierKind::ExpSuper) {
        // The exponential kind certifies through its construction inequality,
        // which is already the worst case over the annulus; the margin is the
        // (radius-independent) slack of that inequality.
        const double margin = -b.crux_value;
        for (int i = 0; i < grid_density; ++i) {
            const double rho = b.r + (i + 0.5) * span / grid_density;
            report.stations[static_cast<std::size_t>(i)] = {rho, margin};
        }
        report.worst_margin = margin;
        report.worst_radius = b.r + 0.5 * span / grid_density;
        if (!(margin > 0.0))
            throw StrictnessViolation(
                "verify_strictness: exponential barrier certification expression "
                "is not negative",
                report.worst_radius, margin);
        return report;
    }

    const bool sub = report.subsolution_side;

    parallel_chunks(static_cast<std::size_t>(grid_density), [&](std::size_t lo,
                                                                std::size_t hi) {
        std::vector<double> x(static_cast<std::size_t>(b.n), 0.0);
        for (std::size_t i = lo; i < hi; ++i) {
            const double rho =
                b.r + (static_cast<double>(i) + 0.5) * span / grid_density;
            for (int c = 0; c < b.n; ++c)
                x[static_cast<std::size_t>(c)] = b.center[static_cast<std::size_t>(c)];
            x[0] += rho;

            const BarrierValue v = eval_barrier(b, x);
            double slope = 0.0;
            for (double gi : v.gradient) slope += gi * gi;
            slope = std::sqrt(slope);
            const double phi_slope = eval_phi(bounds.phi, slope);

            double margin_abs;
            if (sub) {
                margin_abs = phi_slope + pucci(v.hessian, bounds.ell, PucciSign::Plus);
                if (b.kind == BarrierKind::PositiveSubAnnulus && bounds.gamma) {
                    const double pre_offset = v.value - b.offset;
                    margin_abs += eval_phi(*bounds.gamma, std::max(pre_offset, 0.0));
                }
            } else {
                margin_abs = -phi_slope + pucci(v.hessian, bounds.ell, PucciSign::Minus);
            }
            report.stations[i] = {rho, margin_abs / phi_slope};
        }
    });

    std::size_t worst = 0;
    for (std::size_t i = 1; i < report.stations.size(); ++i) {
        const bool more_extreme = sub
                                      ? report.stations[i].margin >
                                            report.stations[worst].margin
                                      : report.stations[i].margin <
                                            report.stations[worst].margin;
        if (more_extreme) worst = i;
    }
    report.worst_margin = report.stations[worst].margin;
    report.worst_radius = report.stations[worst].radius;

    const bool violated = sub ? !(report.worst_margin < 0.0)
                              : !(report.worst_margin > 0.0);
    if (violated) {
        std::ostringstream msg;
        msg << "verify_strictness: margin " << report.worst_margin
            << " has the wrong sign at radius " << report.worst_radius;
        throw StrictnessViolation(msg.str(), report.worst_radius, report.worst_margin);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Exponential barrier
// ---------------------------------------------------------------------------

double exp_barrier_crux(double mu, double p_minus, double p_plus, double q_minus,
                        double q_plus, double grad_p_norm, int n, double M, double r,
                        double a) {
    double value = mu * (8.0 * r * grad_p_norm - 2.0 * (p_minus - 1.0)) +
                   2.0 * r * grad_p_norm *
                       (std::log(4.0 / (1.0 - std::exp(-3.0 * mu))) +
                        std::abs(std::log(M)) + std::abs(std::log(r))) +
                   n + p_plus - 2.0;
    if (a < 0.0)
        value += -a * std::max(std::pow(M, q_plus - 1.0), std::pow(M, q_minus - 1.0));
    return value;
}

std::pair<RadialBarrier, double> build_exp_barrier(double p_minus, double p_plus,
                                                   double q_minus, double q_plus,
                                                   double grad_p_norm, int n, double M,
                                                   double r, double a) {
    if (!(p_minus > 1.0) || !(p_plus >= p_minus))
        throw DomainError("build_exp_barrier: need 1 < p_minus <= p_plus");
    if (!(q_plus >= q_minus))
        throw DomainError("build_exp_barrier: need q_minus <= q_plus");
    if (!(grad_p_norm >= 0.0))
        throw DomainError("build_exp_barrier: exponent Lipschitz bound must be >= 0");
    if (!(M > 0.0) || !(r > 0.0))
        throw DomainError("build_exp_barrier: need M > 0 and r > 0");
    if (n < 1 || n > 8)
        throw DomainError("build_exp_barrier: dimension must be between 1 and 8");

    const double r_admissible = grad_p_norm > 0.0
                                    ? (p_minus - 1.0) / (4.0 * grad_p_norm)
                                    : std::numeric_limits<double>::infinity();
    if (r > r_admissible) {
        std::ostringstream msg;
        msg << "build_exp_barrier: r = " << r << " exceeds the admissible bound "
            << r_admissible;
        throw RadiusTooLarge(msg.str());
    }

    double mu = 1.0;
    while (exp_barrier_crux(mu, p_minus, p_plus, q_minus, q_plus, grad_p_norm, n, M, r,
                            a) > 0.0) {
        mu *= 2.0;
        if (mu > 1e6)
            throw ConstructionFailed(
                "build_exp_barrier: no admissible sharpness parameter up to 1e6");
    }

    RadialBarrier b;
    b.kind = BarrierKind::ExpSuper;
    b.center.assign(static_cast<std::size_t>(n), 0.0);
    b.n = n;
    b.r = r;
    b.r_star = std::isfinite(r_admissible) ? r_admissible : r;
    b.k = 2.0;
    b.m = M;
    b.offset = 0.0;
    b.exp_M = M;
    b.exp_mu = mu;
    b.exp_amp = M / (std::exp(-mu) - std::exp(-4.0 * mu));
    b.crux_value =
        exp_barrier_crux(mu, p_minus, p_plus, q_minus, q_plus, grad_p_norm, n, M, r, a);
    // The radial slope A·2μρ e^{-μρ²/r²}/r² is decreasing on [r, 2r] for the
    // μ ≥ 1 this loop produces.
    b.grad_low = 4.0 * b.exp_amp * mu * std::exp(-4.0 * mu) / r;
    b.grad_high = 2.0 * b.exp_amp * mu * std::exp(-mu) / r;
    return {b, mu};
}

} // namespace barrierlab

/// Acceptance suite for the laboratory: nine self-contained criteria covering
/// growth-condition analysis, barrier construction and strictness, derivative
/// consistency, explicit counterexamples, solver oracle accuracy, discrete
/// comparison, boundary estimates, the variable-exponent radius bound, and
/// artifact determinism.
///
/// Output: one "criterion N: pass|FAIL (X.Xs)" line per criterion, with a
/// short reason on failure.  The exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "barrierlab/barriers.hpp"
#include "barrierlab/counterexamples.hpp"
#include "barrierlab/geometry.hpp"
#include "barrierlab/nonlinearity.hpp"
#include "barrierlab/numerics.hpp"
#include "barrierlab/solver.hpp"
#include "barrierlab/verification.hpp"

namespace fs = std::filesystem;
using namespace barrierlab;

namespace {

bool note(bool cond, std::string& why, const std::string& what) {
    if (!cond) {
        if (!why.empty()) why += "; ";
        why += what;
    }
    return cond;
}

std::shared_ptr<const Grid> grid_of(const Domain& d, double h) {
    return std::make_shared<const Grid>(make_grid(d, h));
}

const Domain kAnnulus = Domain::annulus({0.0, 0.0}, 1.0, 2.0);

double log_ref(Vec2 x) {
    const double rho = std::max(0.5, std::hypot(x[0], x[1]));
    return std::log(rho) / std::log(2.0);
}

double ring_data(Vec2 x) {
    const double rho = std::hypot(x[0], x[1]);
    return std::abs(rho - 1.0) <= std::abs(rho - 2.0) ? 0.0 : 1.0;
}

double zero(Vec2) { return 0.0; }

// --------------------------------------------------------------------------
// 1. Power-law condition suite.

bool criterion1(std::string& why) {
    bool ok = true;
    for (double k : {1.0, 1.5, 2.0, 2.5, 3.0}) {
        const std::string tag = " at exponent " + std::to_string(k);
        GrowthFunction phi = GrowthFunction::power_law(k);
        ok &= note(check_phi_B(phi, 1.0).holds() == (k <= 2.0), why,
                   "decay-profile verdict" + tag);
        ok &= note(
            check_integral_condition(phi, IntegralCondition::Osgood).divergent, why,
            "Osgood divergence" + tag);
        ok &= note(check_integral_condition(phi, IntegralCondition::KellerOsserman)
                           .divergent == (k <= 1.0),
                   why, "Keller-Osserman verdict" + tag);

        const double nu = 10.0;
        const double quad = num::integrate(
            [&](double t) { return power_law_profile(k, nu, t); }, 0.0, 1.0);
        const double closed = power_law_closed_form(k, 1.0, nu);
        ok &= note(num::rel_diff(quad, closed) <= 1e-8, why,
                   "profile quadrature" + tag);
    }
    return ok;
}

// --------------------------------------------------------------------------
// 2. Barrier strictness over randomized structure bounds.

bool criterion2(std::string& why) {
    bool ok = true;
    num::SplitMix64 rng(0xB4121A5ull);
    for (int c = 0; c < 20; ++c) {
        const bool power_law = c < 12;
        GrowthFunction phi, gamma;
        double lam, Lam, r_star, M, Cstar;
        int n;
        if (power_law) {
            const double s = rng.uniform(1.0, 2.0);
            phi = GrowthFunction::power_law(1.0, s);
            n = rng.uniform_int(2, 5);
            lam = rng.uniform(1.0, 2.0);
            Lam = lam * rng.uniform(1.0, 1.5);
            r_star = rng.uniform(0.25, 1.0);
            M = rng.uniform(1.0, 2.0);
            Cstar = rng.uniform(0.5, 2.0);
            gamma = GrowthFunction::power_law(1.0, s * Cstar / 2.0);
        } else {
            phi = GrowthFunction::var_exp_log(1.0);
            n = 2;
            lam = rng.uniform(1.0, 2.0);
            Lam = lam * rng.uniform(1.0, 1.05);
            r_star = rng.uniform(0.25, 0.5);
            M = rng.uniform(1.5, 2.0);
            Cstar = rng.uniform(0.5, 2.0);
            gamma = GrowthFunction::var_exp_log(Cstar / 2.0);
        }
        const double r = r_star * rng.uniform(0.5, 1.0);
        StructureBounds bounds(EllipticityPair(lam, Lam), n, phi, gamma, Cstar);
        std::vector<double> y(static_cast<std::size_t>(n), 0.0);
        for (BarrierKind kind :
             {BarrierKind::SubAnnulus, BarrierKind::PositiveSubAnnulus,
              BarrierKind::NegatedSub, BarrierKind::GrowingSuper}) {
            const std::string tag = ", config " + std::to_string(c) + " kind " +
                                    std::to_string(static_cast<int>(kind));
            try {
                RadialBarrier b = build_barrier(bounds, y, r, r_star, kind, M);
                StrictnessReport rep = verify_strictness(b, bounds, 10000);
                const bool sub_side = kind == BarrierKind::SubAnnulus ||
                                      kind == BarrierKind::PositiveSubAnnulus;
                ok &= note(rep.stations.size() == 10000, why, "station count" + tag);
                ok &= note(rep.subsolution_side == sub_side, why, "side flag" + tag);
                ok &= note(sub_side ? rep.worst_margin < 0.0 : rep.worst_margin > 0.0,
                           why, "strict margin sign" + tag);
            } catch (const Error& e) {
                ok &= note(false, why,
                           std::string("construction failed (") + e.what() + ")" + tag);
            }
        }
    }

    // Lowering the profile constant far below the chosen one (here to a
    // quarter of it) must surface as a strictness violation.
    {
        GrowthFunction phi = GrowthFunction::power_law(1.0, 1.5);
        StructureBounds bounds(EllipticityPair(1.0, 1.0), 2, phi);
        BarrierProfile prof = solve_profile(bounds, 1.0, 0.5, ProfileKind::G, 1.0);
        RadialBarrier bad;
        bad.kind = BarrierKind::SubAnnulus;
        bad.center = {0.0, 0.0};
        bad.n = 2;
        bad.r = 1.0;
        bad.r_star = 1.0;
        bad.k = 2.0;
        bad.m = prof.m;
        bad.profile = prof;
        bool violated = false;
        try {
            verify_strictness(bad, bounds);
        } catch (const StrictnessViolation& e) {
            violated = true;
            ok &= note(e.margin() > 0.0, why, "violation margin sign");
        }
        ok &= note(violated, why, "lowered constant must violate strictness");
    }
    return ok;
}

// --------------------------------------------------------------------------
// 3. Analytic derivatives against central differences.

void fd_errors(const RadialBarrier& b, double h, double& grad_err, double& hess_err) {
    grad_err = hess_err = 0.0;
    for (int s = 0; s < 12; ++s) {
        const double rho = b.r + (0.1 + 0.8 * s / 11.0) * (b.k - 1.0) * b.r;
        const double ang = 0.3 + 0.45 * s;
        std::vector<double> x(b.center.begin(), b.center.end());
        x[0] += rho * std::cos(ang);
        x[1] += rho * std::sin(ang);
        const BarrierValue v = eval_barrier(b, x);
        for (std::size_t i = 0; i < x.size(); ++i) {
            auto xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double g_fd =
                (eval_barrier(b, xp).value - eval_barrier(b, xm).value) / (2.0 * h);
            grad_err = std::max(grad_err, std::abs(g_fd - v.gradient[i]));
            for (std::size_t j = 0; j < x.size(); ++j) {
                const double h_fd = (eval_barrier(b, xp).gradient[j] -
                                     eval_barrier(b, xm).gradient[j]) /
                                    (2.0 * h);
                hess_err = std::max(
                    hess_err, std::abs(h_fd - v.hessian(static_cast<int>(i),
                                                        static_cast<int>(j))));
            }
        }
    }
}

bool criterion3(std::string& why) {
    StructureBounds b1(EllipticityPair(1.0, 1.0), 2, GrowthFunction::power_law(1.0));
    std::vector<RadialBarrier> barriers;
    barriers.push_back(
        build_barrier(b1, {0.0, 0.0}, 1.0, 1.0, BarrierKind::SubAnnulus, 1.0));
    barriers.push_back(
        build_barrier(b1, {0.0, 0.0}, 1.0, 1.0, BarrierKind::NegatedSub, 1.0));
    barriers.push_back(
        build_barrier(b1, {0.0, 0.0}, 1.0, 1.0, BarrierKind::GrowingSuper, 1.0));
    {
        StructureBounds bg(EllipticityPair(1.0, 1.0), 2,
                           GrowthFunction::power_law(1.0),
                           GrowthFunction::power_law(1.0, 0.5), 0.5);
        barriers.push_back(build_barrier(bg, {0.0, 0.0}, 1.0, 1.0,
                                         BarrierKind::PositiveSubAnnulus, 0.9));
    }
    barriers.push_back(
        build_exp_barrier(1.5, 2.5, 2.0, 2.0, 0.1, 2, 1.0, 0.1, 0.0).first);
    {
        StructureBounds bv(EllipticityPair(1.0, 1.5), 3,
                           GrowthFunction::var_exp_log(1.0));
        barriers.push_back(build_barrier(bv, {0.0, 0.0, 0.0}, 0.4, 0.4,
                                         BarrierKind::SubAnnulus, 1.5));
    }

    bool ok = true;
    for (std::size_t i = 0; i < barriers.size(); ++i) {
        double g3, h3, g4, h4;
        fd_errors(barriers[i], 1e-3, g3, h3);
        fd_errors(barriers[i], 1e-4, g4, h4);
        const std::string tag = " of barrier " + std::to_string(i);
        ok &= note(std::log10(g3 / g4) >= 1.9, why, "gradient order" + tag);
        ok &= note(std::log10(h3 / h4) >= 1.9, why, "hessian order" + tag);
    }
    return ok;
}

// --------------------------------------------------------------------------
// 4. Counterexample residuals, the interior plateau, and unbounded slopes.

bool criterion4(std::string& why) {
    bool ok = true;
    CounterexampleFunction H =
        build_smap_counterexample(GrowthFunction::power_law(0.5), true);
    std::vector<double> grid;
    for (int i = 0; i < 33; ++i) grid.push_back(0.1 + 0.8 * i / 32.0);
    ok &= note(ode_residual(H, grid) <= 1e-5, why, "plateau residual");
    std::vector<double> mirrored;
    for (int i = 0; i < 33; ++i) mirrored.push_back(-2.9 + 0.8 * i / 32.0);
    ok &= note(ode_residual(H, mirrored) <= 1e-5, why, "mirrored residual");

    // The plateau value 1 is attained away from the interval ends: a direct
    // violation of the strong maximum principle in one dimension.
    std::vector<double> values;
    std::vector<char> interior;
    for (int i = 0; i <= 200; ++i) {
        const double x = -2.9 + 3.8 * i / 200.0;
        values.push_back(H.value(x));
        interior.push_back(i > 0 && i < 200 ? 1 : 0);
    }
    VerificationReport smap = check_smap_samples(values, interior, 1e-9);
    ok &= note(!smap.pass, why, "plateau must violate the maximum principle");
    ok &= note(smap.measured == 1.0, why, "plateau height");

    CounterexampleFunction F =
        build_gradient_blowup(GrowthFunction::power_law(3.0), 10.0, 1.0);
    std::vector<double> fgrid;
    for (int i = 0; i < 31; ++i) fgrid.push_back(0.1 + 0.3 * i / 30.0);
    ok &= note(ode_residual(F, fgrid, 1e-4) <= 1e-5, why, "ramp residual");

    double prev_quotient = 0.0;
    for (double nu : {1e2, 1e4, 1e6}) {
        CounterexampleFunction Fn =
            build_gradient_blowup(GrowthFunction::power_law(3.0), nu, 1.0);
        ok &= note(Fn.derivative(0.0) == nu, why, "start slope must equal nu");
        const double q = Fn.value(1e-4) / 1e-4;
        ok &= note(q > prev_quotient, why, "difference quotient must grow");
        prev_quotient = q;
    }
    ok &= note(prev_quotient > 100.0, why, "difference quotient magnitude");
    return ok;
}

// --------------------------------------------------------------------------
// 5. Solver accuracy against the exact radial profiles.

bool criterion5(std::string& why) {
    bool ok = true;
    const double refs[2] = {0.58496, 0.52837};
    int pi = 0;
    for (double p : {2.0, 4.0}) {
        auto ref = radial_reference(p, 1.0, 2.0, 0.0, 1.0);
        std::vector<double> errs;
        for (double h : {0.04, 0.02, 0.01}) {
            auto g = grid_of(kAnnulus, h);
            auto u = solve(g, ExponentField::constant(p), ring_data, zero, {});
            double err = 0.0;
            for (int j = 0; j < g->ny; ++j)
                for (int i = 0; i < g->nx; ++i)
                    if (g->inside(g->index(i, j))) {
                        const Vec2 x = g->point(i, j);
                        err = std::max(err, std::abs(u.value(i, j) -
                                                     ref(std::hypot(x[0], x[1]))));
                    }
            errs.push_back(err);
            if (h == 0.02) {
                const std::string tag = " at p = " + std::to_string(p);
                ok &= note(err <= 5.0 * h * h, why, "oracle error bound" + tag);
                const double mid = u.sample({1.5, 0.0});
                ok &= note(std::abs(mid - refs[pi]) / refs[pi] <= 0.01, why,
                           "midpoint value" + tag);
            }
        }
        const double order = std::log2(errs[0] / errs[2]) / 2.0;
        ok &= note(order >= 1.58, why,
                   "refinement order at p = " + std::to_string(p));
        ++pi;
    }
    return ok;
}

// --------------------------------------------------------------------------
// 6. Discrete comparison for ordered data.

bool criterion6(std::string& why) {
    bool ok = true;
    auto gbase = [](Vec2 x) { return 1.0 + 0.25 * (x[0] + x[1]); };
    struct Scenario {
        double p, q, a, dg, df;
    };
    const Scenario scenarios[3] = {{2.0, 2.0, -1.0, 0.1, 0.0},
                                   {3.0, 3.0, -0.5, 0.0, 1.0},
                                   {2.0, 2.0, -2.0, 0.05, 0.5}};
    for (int s = 0; s < 3; ++s) {
        const Scenario& sc = scenarios[s];
        for (double h : {0.04, 0.02}) {
            auto g = grid_of(kAnnulus, h);
            ProblemSpec us{ExponentField::constant(sc.p, sc.q, sc.a), gbase, zero};
            ProblemSpec vs{ExponentField::constant(sc.p, sc.q, sc.a),
                           [gbase, sc](Vec2 x) { return gbase(x) + sc.dg; },
                           [sc](Vec2) { return sc.df; }};
            SolverConfig cfg;
            cfg.max_picard = 240;
            OrderingReport rep = check_weak_comparison(g, us, vs, cfg);
            ok &= note(rep.pass, why,
                       "ordering, scenario " + std::to_string(s) + " at h = " +
                           std::to_string(h));
        }
    }
    return ok;
}

// --------------------------------------------------------------------------
// 7. Boundary estimates on the harmonic oracle and a variable exponent.

bool criterion7(std::string& why) {
    bool ok = true;
    const double inv_log2 = 1.0 / std::log(2.0);
    {
        auto g = grid_of(kAnnulus, 0.004);
        auto u = sample_function(g, log_ref);
        VerificationReport dc = distance_comparability(
            u, kAnnulus, {1.0, 0.0}, 0.05, std::array<double, 2>{0.005, 0.05});
        ok &= note(dc.pass, why, "comparability verdict on the oracle");
        ok &= note(std::abs(dc.c_high - inv_log2) / inv_log2 <= 0.05, why,
                   "upper constant vs 1/log 2");

        std::vector<double> doubled(u.values());
        for (double& v : doubled) v *= 2.0;
        GridFunction v2(g, doubled, [](Vec2 x) { return 2.0 * log_ref(x); });
        VerificationReport bh =
            boundary_harnack_quotient(u, v2, kAnnulus, {1.0, 0.0}, 0.05);
        ok &= note(bh.pass && bh.c_low == 0.5 && bh.c_high == 0.5, why,
                   "quotient of the doubled field");
    }
    {
        ExponentField f;
        f.p = [](Vec2 x) { return 2.0 + 0.3 * std::sin(std::atan2(x[1], x[0])); };
        f.q = [](Vec2) { return 2.0; };
        f.a = 0.0;
        f.p_min = 1.7;
        f.p_max = 2.3;
        f.q_min = f.q_max = 2.0;
        f.p_lipschitz = 0.3 / (1.0 - 3.0 * 0.03);
        VerificationReport dcs[2], bhs[2];
        int k = 0;
        for (double h : {0.03, 0.015}) {
            auto g = grid_of(kAnnulus, h);
            auto u = solve(g, f, ring_data, zero, {});
            auto v = solve(g, f, [](Vec2 x) { return 2.0 * ring_data(x); }, zero, {});
            dcs[k] = distance_comparability(u, kAnnulus, {1.0, 0.0}, 0.15);
            bhs[k] = boundary_harnack_quotient(u, v, kAnnulus, {1.0, 0.0}, 0.15);
            ok &= note(dcs[k].pass, why,
                       "variable-exponent comparability at h = " + std::to_string(h));
            ok &= note(bhs[k].pass, why,
                       "variable-exponent quotient at h = " + std::to_string(h));
            ++k;
        }
        ok &= note(ratios_stable(dcs[0], dcs[1]), why,
                   "comparability constants must be refinement-stable");
        ok &= note(ratios_stable(bhs[0], bhs[1]), why,
                   "quotient constants must be refinement-stable");
    }
    return ok;
}

// --------------------------------------------------------------------------
// 8. Exponential barrier for the variable-exponent operator.

bool criterion8(std::string& why) {
    bool ok = true;
    auto [b, mu] = build_exp_barrier(1.5, 2.5, 2.0, 2.0, 0.1, 2, 1.0, 0.1, 0.0);
    ok &= note(mu <= 4.0, why, "exponential rate bound");
    ok &= note(b.crux_value <= 0.0, why, "construction inequality sign");
    bool rejected = false;
    try {
        build_exp_barrier(1.5, 2.5, 2.0, 2.0, 0.1, 2, 1.0, 2.0, 0.0);
    } catch (const RadiusTooLarge&) {
        rejected = true;
    }
    ok &= note(rejected, why, "radius 2 must be rejected");
    return ok;
}

// --------------------------------------------------------------------------
// 9. Byte-identical artifacts across repeated command-line runs.

std::string file_bytes(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

bool criterion9(std::string& why) {
    const char* cli = std::getenv("BARRIERLAB_CLI");
    if (!note(cli != nullptr, why, "BARRIERLAB_CLI is not set")) return false;

    const fs::path base = fs::temp_directory_path() / "barrierlab-acceptance";
    std::error_code ec;
    fs::remove_all(base, ec);
    fs::create_directories(base);
    const fs::path cfg = base / "solve.json";
    {
        std::ofstream f(cfg, std::ios::binary);
        f << "{\n  \"domain\": {\"shape\": \"annulus\", \"r_inner\": 1.0, "
             "\"r_outer\": 2.0},\n  \"solver\": {\"grid_h\": 0.05}\n}\n";
    }

    auto run = [cli](const std::string& args) {
        const std::string cmd =
            "\"" + std::string(cli) + "\" " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };

    bool ok = true;
    for (int i : {0, 1}) {
        const fs::path dir = base / ("run" + std::to_string(i));
        ok &= note(run("reproduce-figure1 --out \"" + dir.string() + "\" --seed 11"),
                   why, "panel regeneration failed");
        ok &= note(run("solve --config \"" + cfg.string() + "\" --out \"" +
                       dir.string() + "\" --seed 11"),
                   why, "solve run failed");
    }
    for (const char* name : {"figure1_a.csv", "figure1_b.csv", "figure1_c.csv",
                             "figure1_d.csv", "solution.csv"}) {
        const std::string a = file_bytes(base / "run0" / name);
        const std::string b = file_bytes(base / "run1" / name);
        ok &= note(!a.empty() && a == b, why,
                   std::string("artifact differs between runs: ") + name);
    }
    return ok;
}

} // namespace

int main() {
    using clock = std::chrono::steady_clock;
    struct Criterion {
        int id;
        double budget_s; // 0 = no runtime budget
        bool (*fn)(std::string&);
    };
    const Criterion criteria[] = {
        {1, 5.0, criterion1},   {2, 60.0, criterion2},  {3, 30.0, criterion3},
        {4, 10.0, criterion4},  {5, 120.0, criterion5}, {6, 120.0, criterion6},
        {7, 180.0, criterion7}, {8, 1.0, criterion8},   {9, 0.0, criterion9},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = clock::now();
        std::string why;
        bool ok = false;
        try {
            ok = c.fn(why);
        } catch (const std::exception& e) {
            note(false, why, std::string("unexpected exception: ") + e.what());
        }
        const double secs =
            std::chrono::duration<double>(clock::now() - t0).count();
        if (ok && c.budget_s > 0.0 && secs > c.budget_s) {
            ok = false;
            note(false, why, "runtime budget exceeded");
        }
        std::printf("criterion %d: %s (%.1fs)\n", c.id, ok ? "pass" : "FAIL", secs);
        if (!ok) {
            ++failures;
            if (!why.empty()) std::printf("  %s\n", why.c_str());
        }
        std::fflush(stdout);
    }
    return failures;
}

#include "barrierlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>
#include <utility>

#include "barrierlab/barriers.hpp"
#include "barrierlab/counterexamples.hpp"
#include "barrierlab/errors.hpp"
#include "barrierlab/geometry.hpp"
#include "barrierlab/nonlinearity.hpp"
#include "barrierlab/solver.hpp"
#include "barrierlab/verification.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace barrierlab {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

// ---------------------------------------------------------------------------
// Configuration schema: the key allowlist.

struct KeyTree {
    std::map<std::string, KeyTree> children;
};

const KeyTree& config_schema() {
    static const KeyTree tree = [] {
        KeyTree t;
        t.children["experiment"];
        t.children["seed"];
        t.children["output_dir"];
        auto& nl = t.children["nonlinearity"];
        for (const char* k : {"kind", "exponent", "scale", "phib_eps"}) nl.children[k];
        auto& st = t.children["structure"];
        for (const char* k : {"lambda", "Lambda", "dimension", "gamma_scale", "Cstar"})
            st.children[k];
        auto& ba = t.children["barrier"];
        for (const char* k : {"kind", "center", "r", "r_star", "M", "offset"})
            ba.children[k];
        auto& ce = t.children["counterexample"];
        for (const char* k : {"kind", "nu", "eps", "extend", "residual_step"})
            ce.children[k];
        auto& dm = t.children["domain"];
        for (const char* k : {"shape", "center", "radius", "r_inner", "r_outer", "a", "b"})
            dm.children[k];
        auto& ef = t.children["exponent_field"];
        for (const char* k : {"kind", "p", "p_base", "p_amp", "q", "a"}) ef.children[k];
        auto& so = t.children["solver"];
        for (const char* k : {"eps_reg", "tolerance", "max_picard", "damping", "lin_tol",
                              "grid_h"})
            so.children[k];
        auto& bd = t.children["boundary"];
        for (const char* k : {"inner_value", "outer_value"}) bd.children[k];
        auto& bn = t.children["band"];
        for (const char* k : {"anchor", "r"}) bn.children[k];
        auto& sr = t.children["source"];
        sr.children["value"];
        return t;
    }();
    return tree;
}

void reject_unknown_keys(const json& j, const KeyTree& tree, const std::string& path) {
    if (!j.is_object()) return;
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto child = tree.children.find(it.key());
        if (child == tree.children.end())
            throw ConfigError("unknown key", path + "/" + it.key());
        reject_unknown_keys(it.value(), child->second, path + "/" + it.key());
    }
}

// ---------------------------------------------------------------------------
// Typed accessors with JSON-pointer-style error anchors.

const json* find_entry(const json& doc, const char* section, const char* key) {
    auto s = doc.find(section);
    if (s == doc.end()) return nullptr;
    auto e = s->find(key);
    if (e == s->end()) return nullptr;
    return &*e;
}

std::string anchor(const char* section, const char* key) {
    return std::string("/") + section + "/" + key;
}

double num_in(const json& doc, const char* section, const char* key, double dflt) {
    const json* e = find_entry(doc, section, key);
    if (!e) return dflt;
    if (!e->is_number()) throw ConfigError("expected a number", anchor(section, key));
    return e->get<double>();
}

int int_in(const json& doc, const char* section, const char* key, int dflt) {
    const json* e = find_entry(doc, section, key);
    if (!e) return dflt;
    if (!e->is_number_integer())
        throw ConfigError("expected an integer", anchor(section, key));
    return e->get<int>();
}

std::string str_in(const json& doc, const char* section, const char* key,
                   const std::string& dflt) {
    const json* e = find_entry(doc, section, key);
    if (!e) return dflt;
    if (!e->is_string()) throw ConfigError("expected a string", anchor(section, key));
    return e->get<std::string>();
}

bool bool_in(const json& doc, const char* section, const char* key, bool dflt) {
    const json* e = find_entry(doc, section, key);
    if (!e) return dflt;
    if (!e->is_boolean()) throw ConfigError("expected a boolean", anchor(section, key));
    return e->get<bool>();
}

Vec2 vec2_in(const json& doc, const char* section, const char* key, Vec2 dflt) {
    const json* e = find_entry(doc, section, key);
    if (!e) return dflt;
    if (!e->is_array() || e->size() != 2 || !(*e)[0].is_number() || !(*e)[1].is_number())
        throw ConfigError("expected an array of two numbers", anchor(section, key));
    return {(*e)[0].get<double>(), (*e)[1].get<double>()};
}

std::vector<double> center_in(const json& doc, int n) {
    const json* e = find_entry(doc, "barrier", "center");
    if (!e) return std::vector<double>(static_cast<std::size_t>(n), 0.0);
    if (!e->is_array()) throw ConfigError("expected an array", "/barrier/center");
    std::vector<double> c;
    for (const auto& v : *e) {
        if (!v.is_number()) throw ConfigError("expected numbers", "/barrier/center");
        c.push_back(v.get<double>());
    }
    if (static_cast<int>(c.size()) != n)
        throw ConfigError("center length must equal the dimension", "/barrier/center");
    return c;
}

// ---------------------------------------------------------------------------
// Builders from configuration sections.

GrowthFunction make_phi(const json& doc) {
    std::string kind = str_in(doc, "nonlinearity", "kind", "power-law");
    double scale = num_in(doc, "nonlinearity", "scale", 1.0);
    if (kind == "power-law")
        return GrowthFunction::power_law(num_in(doc, "nonlinearity", "exponent", 1.0),
                                         scale);
    if (kind == "var-exp-log") return GrowthFunction::var_exp_log(scale);
    throw ConfigError("unknown growth-function kind \"" + kind + "\"",
                      "/nonlinearity/kind");
}

StructureBounds make_bounds(const json& doc, const GrowthFunction& phi) {
    double lam = num_in(doc, "structure", "lambda", 1.0);
    double Lam = num_in(doc, "structure", "Lambda", lam);
    int n = int_in(doc, "structure", "dimension", 2);
    double gscale = num_in(doc, "structure", "gamma_scale", 0.0);
    EllipticityPair ell(lam, Lam);
    if (gscale <= 0.0) return StructureBounds(ell, n, phi);
    double cstar = std::max(num_in(doc, "structure", "Cstar", gscale), gscale);
    std::string kind = str_in(doc, "nonlinearity", "kind", "power-law");
    double scale = num_in(doc, "nonlinearity", "scale", 1.0);
    GrowthFunction gamma =
        (kind == "var-exp-log")
            ? GrowthFunction::var_exp_log(scale * gscale)
            : GrowthFunction::power_law(num_in(doc, "nonlinearity", "exponent", 1.0),
                                        scale * gscale);
    return StructureBounds(ell, n, phi, gamma, cstar);
}

Domain make_domain(const json& doc) {
    std::string shape = str_in(doc, "domain", "shape", "annulus");
    Vec2 c = vec2_in(doc, "domain", "center", {0.0, 0.0});
    if (shape == "ball") return Domain::ball(c, num_in(doc, "domain", "radius", 1.0));
    if (shape == "annulus")
        return Domain::annulus(c, num_in(doc, "domain", "r_inner", 1.0),
                               num_in(doc, "domain", "r_outer", 2.0));
    if (shape == "stadium")
        return Domain::stadium(vec2_in(doc, "domain", "a", {-1.0, 0.0}),
                               vec2_in(doc, "domain", "b", {1.0, 0.0}),
                               num_in(doc, "domain", "radius", 0.5));
    throw ConfigError("unknown domain shape \"" + shape + "\"", "/domain/shape");
}

std::function<double(Vec2)> make_boundary(const json& doc, const Domain& dom) {
    double inner = num_in(doc, "boundary", "inner_value", 0.0);
    double outer = num_in(doc, "boundary", "outer_value", 1.0);
    if (dom.shape() == ShapeKind::Annulus) {
        Vec2 c = dom.center();
        double ri = dom.inner_radius(), ro = dom.outer_radius();
        return [c, ri, ro, inner, outer](Vec2 x) {
            double rho = std::hypot(x[0] - c[0], x[1] - c[1]);
            return std::abs(rho - ri) <= std::abs(rho - ro) ? inner : outer;
        };
    }
    return [outer](Vec2) { return outer; };
}

ExponentField make_field(const json& doc, const Domain& dom, double h) {
    std::string kind = str_in(doc, "exponent_field", "kind", "constant");
    double q = num_in(doc, "exponent_field", "q", 2.0);
    double a = num_in(doc, "exponent_field", "a", 0.0);
    if (kind == "constant")
        return ExponentField::constant(num_in(doc, "exponent_field", "p", 2.0), q, a);
    if (kind == "angular") {
        if (dom.shape() != ShapeKind::Annulus)
            throw ConfigError("angular exponent requires an annulus domain",
                              "/exponent_field/kind");
        double base = num_in(doc, "exponent_field", "p_base", 2.0);
        double amp = std::abs(num_in(doc, "exponent_field", "p_amp", 0.0));
        if (!(base - amp > 1.0))
            throw ConfigError("need p_base - |p_amp| > 1", "/exponent_field/p_base");
        if (!(q >= 2.0)) throw ConfigError("need q >= 2", "/exponent_field/q");
        double denom = dom.inner_radius() - 3.0 * h;
        if (!(denom > 0.0))
            throw ConfigError("grid spacing too coarse for the angular exponent",
                              "/solver/grid_h");
        Vec2 c = dom.center();
        double raw_amp = num_in(doc, "exponent_field", "p_amp", 0.0);
        ExponentField f;
        f.p = [c, base, raw_amp](Vec2 x) {
            return base + raw_amp * std::sin(std::atan2(x[1] - c[1], x[0] - c[0]));
        };
        f.q = [q](Vec2) { return q; };
        f.a = a;
        f.p_min = base - amp;
        f.p_max = base + amp;
        f.q_min = f.q_max = q;
        f.p_lipschitz = amp / denom;
        return f;
    }
    throw ConfigError("unknown exponent-field kind \"" + kind + "\"",
                      "/exponent_field/kind");
}

SolverConfig make_solver_config(const json& doc) {
    SolverConfig c;
    c.eps_reg = num_in(doc, "solver", "eps_reg", c.eps_reg);
    c.tolerance = num_in(doc, "solver", "tolerance", c.tolerance);
    c.max_picard = int_in(doc, "solver", "max_picard", c.max_picard);
    c.damping = num_in(doc, "solver", "damping", c.damping);
    c.lin_tol = num_in(doc, "solver", "lin_tol", c.lin_tol);
    return c;
}

Vec2 default_anchor(const Domain& dom) {
    switch (dom.shape()) {
    case ShapeKind::Annulus:
        return {dom.center()[0] + dom.inner_radius(), dom.center()[1]};
    case ShapeKind::Ball:
        return {dom.center()[0] + dom.radius(), dom.center()[1]};
    case ShapeKind::Stadium:
    default:
        return boundary_point(dom, 0.0);
    }
}

// ---------------------------------------------------------------------------
// Artifact output.

struct Out {
    fs::path dir;
    std::vector<std::string> names;

    void write(const std::string& name, const std::string& content) {
        fs::path p = dir / name;
        std::ofstream f(p, std::ios::binary);
        f << content;
        f.flush();
        if (!f) throw Error("cannot write artifact " + p.string());
        names.push_back(name);
    }
};

/// Rows of pre-formatted cells joined with commas; one trailing newline per
/// row. The writer never emits locale-dependent formatting.
class Csv {
  public:
    explicit Csv(std::initializer_list<const char*> header) { row_strings(header); }

    void row_strings(std::initializer_list<const char*> cells) {
        bool first = true;
        for (const char* c : cells) {
            if (!first) s_ << ',';
            s_ << c;
            first = false;
        }
        s_ << '\n';
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) s_ << ',';
            s_ << cells[i];
        }
        s_ << '\n';
    }

    std::string str() const { return s_.str(); }

  private:
    std::ostringstream s_;
};

json verdict_to_json(const ConditionVerdict& v) {
    json j;
    j["holds"] = v.holds();
    j["divergent"] = v.divergent;
    if (v.convergent()) {
        j["limit"] = v.limit;
        j["limit_error"] = v.limit_error;
    } else {
        j["limit"] = nullptr;
        j["limit_error"] = 0.0;
    }
    j["stations"] = v.trace.size();
    return j;
}

json report_to_json(const VerificationReport& r) {
    json j;
    j["check"] = r.check;
    j["pass"] = r.pass;
    j["c_low"] = r.c_low;
    j["c_high"] = r.c_high;
    j["margin"] = r.margin;
    j["measured"] = r.measured;
    j["witness"] = {r.witness[0], r.witness[1]};
    j["band_radius"] = r.band_radius;
    j["h"] = r.h;
    j["detail"] = r.detail;
    return j;
}

json solve_info_to_json(const SolveInfo& info, double residual_check, double h,
                        int unknowns) {
    json j;
    j["h"] = h;
    j["unknowns"] = unknowns;
    j["iterations"] = info.iterations;
    j["linear_iterations"] = info.linear_iterations;
    j["final_residual"] = info.final_residual;
    j["interior_residual"] = residual_check;
    j["monotonicity_warning"] = info.monotonicity_warning;
    j["warning"] = info.warning;
    if (!info.energy_history.empty()) j["energy_final"] = info.energy_history.back();
    return j;
}

// ---------------------------------------------------------------------------
// Experiment runners. Each returns (exit code, measurements).

std::pair<int, json> run_analyze_phi(const json& doc, Out& out) {
    GrowthFunction phi = make_phi(doc);
    double eps = num_in(doc, "nonlinearity", "phib_eps", 1.0);

    ConditionVerdict osgood =
        check_integral_condition(phi, IntegralCondition::Osgood);
    ConditionVerdict ko =
        check_integral_condition(phi, IntegralCondition::KellerOsserman);
    ConditionVerdict phib = check_phi_B(phi, eps);

    Csv csv({"condition", "station", "contribution", "partial_sum"});
    auto emit = [&csv](const char* name, const ConditionVerdict& v) {
        for (const TracePoint& t : v.trace)
            csv.row({name, format_double(t.where), format_double(t.contribution),
                     format_double(t.partial_sum)});
    };
    emit("osgood", osgood);
    emit("keller-osserman", ko);
    emit("phi-b", phib);
    out.write("phi-conditions.csv", csv.str());

    json m;
    m["phi"] = phi.description();
    m["phib_eps"] = eps;
    m["osgood"] = verdict_to_json(osgood);
    m["keller_osserman"] = verdict_to_json(ko);
    m["phi_b"] = verdict_to_json(phib);
    return {0, m};
}

BarrierKind parse_barrier_kind(const std::string& s) {
    if (s == "sub-annulus") return BarrierKind::SubAnnulus;
    if (s == "positive-sub-annulus") return BarrierKind::PositiveSubAnnulus;
    if (s == "negated-sub") return BarrierKind::NegatedSub;
    if (s == "growing-super") return BarrierKind::GrowingSuper;
    if (s == "exp-super") return BarrierKind::ExpSuper;
    throw ConfigError("unknown barrier kind \"" + s + "\"", "/barrier/kind");
}

std::pair<int, json> run_build_barrier(const json& doc, Out& out) {
    GrowthFunction phi = make_phi(doc);
    StructureBounds bounds = make_bounds(doc, phi);
    BarrierKind kind = parse_barrier_kind(str_in(doc, "barrier", "kind", "growing-super"));
    double r = num_in(doc, "barrier", "r", 0.5);
    double r_star = num_in(doc, "barrier", "r_star", std::max(r, 1.0));
    double M = num_in(doc, "barrier", "M", 1.0);
    double offset = num_in(doc, "barrier", "offset", 0.0);

    json m;
    RadialBarrier b;
    if (kind == BarrierKind::ExpSuper) {
        double p_base = num_in(doc, "exponent_field", "p_base",
                               num_in(doc, "exponent_field", "p", 2.0));
        double p_amp = std::abs(num_in(doc, "exponent_field", "p_amp", 0.0));
        double q = num_in(doc, "exponent_field", "q", 2.0);
        double a = num_in(doc, "exponent_field", "a", 0.0);
        // |∇p| bound: the angular field p_base + p_amp·sin θ on an annulus has
        // |∇p| ≤ |p_amp| / r_inner; a constant field has zero gradient.
        double grad_p = 0.0;
        if (p_amp > 0.0) {
            Domain dom = make_domain(doc);
            if (dom.shape() != ShapeKind::Annulus)
                throw ConfigError("a varying exponent requires an annulus domain",
                                  "/exponent_field/p_amp");
            grad_p = p_amp / dom.inner_radius();
        }
        auto [barrier, mu] = build_exp_barrier(p_base - p_amp, p_base + p_amp, q, q,
                                               grad_p, int_in(doc, "structure",
                                                              "dimension", 2),
                                               M, r, a);
        b = barrier;
        b.center = center_in(doc, b.n);
        m["mu"] = mu;
    } else {
        std::vector<double> center = center_in(doc, bounds.n);
        b = build_barrier(bounds, center, r, r_star, kind, M, offset);
    }

    m["kind"] = str_in(doc, "barrier", "kind", "growing-super");
    m["r"] = b.r;
    m["k"] = b.k;
    m["m"] = b.m;
    m["offset"] = b.offset;
    m["grad_low"] = b.grad_low;
    m["grad_high"] = b.grad_high;
    auto bv = boundary_values(b);
    m["inner_value"] = bv.first;
    m["outer_value"] = bv.second;
    if (b.profile) {
        m["C"] = b.profile->C;
        m["initial"] = b.profile->initial;
        m["t_max"] = b.profile->t_max;

        Csv pcsv({"t", "profile", "integral"});
        int rows = 512;
        for (int i = 0; i <= rows; ++i) {
            double t = b.profile->t_max * i / rows;
            pcsv.row({format_double(t), format_double(b.profile->value(t)),
                      format_double(b.profile->integral_to(t))});
        }
        out.write("barrier-profile.csv", pcsv.str());
    } else {
        m["exp_mu"] = b.exp_mu;
        m["exp_amp"] = b.exp_amp;
        m["crux"] = b.crux_value;
    }

    int exit_code = 0;
    try {
        StrictnessReport rep = verify_strictness(b, bounds);
        m["strict"] = true;
        m["subsolution_side"] = rep.subsolution_side;
        m["worst_margin"] = rep.worst_margin;
        m["worst_radius"] = rep.worst_radius;
        Csv scsv({"radius", "margin"});
        for (const MarginStation& s : rep.stations)
            scsv.row({format_double(s.radius), format_double(s.margin)});
        out.write("barrier-stations.csv", scsv.str());
    } catch (const StrictnessViolation& e) {
        m["strict"] = false;
        m["violation"] = e.what();
        exit_code = 2;
    }
    return {exit_code, m};
}

std::pair<int, json> run_counterexample(const json& doc, Out& out) {
    GrowthFunction phi = make_phi(doc);
    std::string kind = str_in(doc, "counterexample", "kind", "smap-violator");

    CounterexampleFunction c;
    std::vector<double> grid;
    double step;
    json m;
    if (kind == "smap-violator") {
        bool extend = bool_in(doc, "counterexample", "extend", false);
        c = build_smap_counterexample(phi, extend);
        step = num_in(doc, "counterexample", "residual_step", 1e-3);
        for (int i = 0; i < 33; ++i) grid.push_back(0.1 + 0.8 * i / 32.0);
        if (extend)
            for (int i = 0; i < 33; ++i) grid.push_back(-2.9 + 0.8 * i / 32.0);
        m["extend"] = extend;
    } else if (kind == "gradient-blowup") {
        double nu = num_in(doc, "counterexample", "nu", 10.0);
        double eps = num_in(doc, "counterexample", "eps", 1.0);
        c = build_gradient_blowup(phi, nu, eps);
        step = num_in(doc, "counterexample", "residual_step", 1e-4);
        for (int i = 0; i < 31; ++i) grid.push_back(eps * (0.1 + 0.3 * i / 30.0));
        m["nu"] = nu;
        m["eps"] = eps;
        m["slope_at_zero"] = c.derivative(0.0);
    } else {
        throw ConfigError("unknown counterexample kind \"" + kind + "\"",
                          "/counterexample/kind");
    }

    double span = c.x_max() - c.x_min();
    Csv fcsv({"x", "value", "derivative"});
    int rows = 800;
    for (int i = 0; i <= rows; ++i) {
        double x = c.x_min() + span * (1e-6 + (1.0 - 1e-6) * i / rows);
        fcsv.row({format_double(x), format_double(c.value(x)),
                  format_double(c.derivative(x))});
    }
    out.write("counterexample.csv", fcsv.str());

    double resid = ode_residual(c, grid, step);
    Csv rcsv({"x", "max_residual"});
    for (double x : grid)
        rcsv.row({format_double(x), format_double(ode_residual(c, {x}, step))});
    out.write("residual.csv", rcsv.str());

    const double threshold = 1e-5;
    m["kind"] = kind;
    m["x_min"] = c.x_min();
    m["x_max"] = c.x_max();
    m["residual_max"] = resid;
    m["residual_threshold"] = threshold;
    m["residual_grid_points"] = grid.size();
    m["residual_step"] = step;
    bool pass = resid <= threshold;
    m["pass"] = pass;
    return {pass ? 0 : 2, m};
}

struct SolveBundle {
    std::shared_ptr<const Grid> grid;
    Domain dom;
    ExponentField field;
    std::function<double(Vec2)> boundary;
    std::function<double(Vec2)> source;
    SolverConfig cfg;
    SolveInfo info;
    GridFunction u;
    double residual = 0.0;
};

SolveBundle solve_from_config(const json& doc, double default_h = 0.05) {
    Domain dom = make_domain(doc);
    double h = num_in(doc, "solver", "grid_h", default_h);
    auto grid = std::make_shared<Grid>(make_grid(dom, h));
    ExponentField field = make_field(doc, dom, h);
    auto bdry = make_boundary(doc, dom);
    double f_value = num_in(doc, "source", "value", 0.0);
    std::function<double(Vec2)> src = [f_value](Vec2) { return f_value; };
    SolverConfig cfg = make_solver_config(doc);
    SolveInfo info;
    GridFunction u = solve(grid, field, bdry, src, cfg, &info);
    double resid = residual_norm(u, field, src);
    return SolveBundle{grid, dom, field, bdry, src, cfg, info, std::move(u), resid};
}

void write_solution_csv(const GridFunction& u, Out& out) {
    const Grid& g = u.grid();
    Csv csv({"i", "j", "x", "y", "u"});
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int idx = g.index(i, j);
            if (!g.inside(idx)) continue;
            Vec2 x = g.point(i, j);
            csv.row({std::to_string(i), std::to_string(j), format_double(x[0]),
                     format_double(x[1]), format_double(u[idx])});
        }
    out.write("solution.csv", csv.str());
}

std::pair<int, json> run_solve(const json& doc, Out& out) {
    SolveBundle sb = solve_from_config(doc);
    write_solution_csv(sb.u, out);
    json m;
    m["solver"] = solve_info_to_json(sb.info, sb.residual, sb.u.h(),
                                     sb.grid->count(NodeClass::Interior) +
                                         sb.grid->count(NodeClass::BoundaryAdjacent));
    m["max_abs"] = sb.u.max_abs();
    return {0, m};
}

std::pair<int, json> run_verify_boundary(const json& doc, Out& out) {
    // Band geometry constrains the resolution twice over: the Harnack ball
    // B(w, r) keeps only nodes at distance >= 4h from the boundary (so
    // 4h < r), and both bands require the data to vanish on the boundary
    // portion within 6r of the anchor (so 6r must not reach a boundary piece
    // with nonzero data). The defaults r = 0.15, h = 0.025 satisfy both on
    // the default annulus.
    SolveBundle sb = solve_from_config(doc, 0.025);
    Vec2 anchor = boundary_projection(
        sb.dom, vec2_in(doc, "band", "anchor", default_anchor(sb.dom)));
    double band_r = num_in(doc, "band", "r", 0.15);

    VerificationReport rep_dc = distance_comparability(sb.u, sb.dom, anchor, band_r);

    auto scatter = band_scatter(sb.u, sb.dom, anchor, band_r);
    Csv scsv({"distance", "quotient"});
    for (const auto& p : scatter)
        scsv.row({format_double(p[0]), format_double(p[1])});
    out.write("band-scatter.csv", scsv.str());

    // Second positive solution of the same equation for the quotient check:
    // same operator and source, boundary data doubled. For a linear problem
    // this reproduces 2u; for variable exponents it is a genuinely different
    // solution.
    auto g = sb.boundary;
    GridFunction v2 = solve(
        sb.grid, sb.field, [g](Vec2 x) { return 2.0 * g(x); }, sb.source, sb.cfg);
    VerificationReport rep_bh =
        boundary_harnack_quotient(sb.u, v2, sb.dom, anchor, band_r);

    Vec2 nrm = outward_normal(sb.dom, anchor);
    VerificationReport rep_hopf =
        check_hopf_slope(sb.u, sb.dom, anchor, {-nrm[0], -nrm[1]});

    write_solution_csv(sb.u, out);

    json m;
    m["anchor"] = {anchor[0], anchor[1]};
    m["band_r"] = band_r;
    m["distance_comparability"] = report_to_json(rep_dc);
    m["harnack_quotient"] = report_to_json(rep_bh);
    m["hopf_slope"] = report_to_json(rep_hopf);
    m["solver"] = solve_info_to_json(sb.info, sb.residual, sb.u.h(),
                                     sb.grid->count(NodeClass::Interior) +
                                         sb.grid->count(NodeClass::BoundaryAdjacent));
    bool pass = rep_dc.pass && rep_bh.pass && rep_hopf.pass;
    return {pass ? 0 : 2, m};
}

std::pair<int, json> run_verify_smap(const json& doc, Out& out) {
    SolveBundle sb = solve_from_config(doc);
    VerificationReport rep = check_smap(sb.u);
    write_solution_csv(sb.u, out);
    json m;
    m["smap"] = report_to_json(rep);
    m["solver"] = solve_info_to_json(sb.info, sb.residual, sb.u.h(),
                                     sb.grid->count(NodeClass::Interior) +
                                         sb.grid->count(NodeClass::BoundaryAdjacent));
    return {rep.pass ? 0 : 2, m};
}

std::pair<int, json> run_reproduce_figure1(const json& doc, Out& out) {
    (void)doc;
    json m;

    // Panel A: the increasing profile g' = φ(g), g(0) = 0.1, for φ(t) = √t.
    {
        GrowthFunction phi = GrowthFunction::power_law(0.5);
        StructureBounds bounds(EllipticityPair(1.0, 1.0), 2, phi);
        BarrierProfile prof = solve_profile(bounds, 1.0, 0.1, ProfileKind::G, 1.0);
        Csv csv({"t", "g", "G"});
        int rows = 400;
        for (int i = 0; i <= rows; ++i) {
            double t = prof.t_max * i / rows;
            csv.row({format_double(t), format_double(prof.value(t)),
                     format_double(prof.integral_to(t))});
        }
        out.write("figure1_a.csv", csv.str());
        m["a_rows"] = rows + 1;
    }

    // Panel B: the decaying profile f(t) = (2t + 1)^{-1/2} for φ(t) = t³, ν = 1.
    {
        Csv csv({"t", "f"});
        int rows = 400;
        for (int i = 0; i <= rows; ++i) {
            double t = 3.0 * i / rows;
            csv.row({format_double(t), format_double(power_law_profile(3.0, 1.0, t))});
        }
        out.write("figure1_b.csv", csv.str());
        m["b_rows"] = rows + 1;
    }

    // Panel C: the plateau function for φ(t) = √t, evenly extended.
    {
        CounterexampleFunction c =
            build_smap_counterexample(GrowthFunction::power_law(0.5), true);
        Csv csv({"x", "H", "dH"});
        int rows = 800;
        double span = c.x_max() - c.x_min();
        for (int i = 0; i <= rows; ++i) {
            double x = c.x_min() + span * (1e-6 + (1.0 - 1e-6) * i / rows);
            csv.row({format_double(x), format_double(c.value(x)),
                     format_double(c.derivative(x))});
        }
        out.write("figure1_c.csv", csv.str());
        m["c_rows"] = rows + 1;
    }

    // Panel D: steep ramps for φ(t) = t³ at increasing start slopes.
    {
        GrowthFunction phi = GrowthFunction::power_law(3.0);
        std::vector<CounterexampleFunction> ramps;
        for (double nu : {1e2, 1e4, 1e6})
            ramps.push_back(build_gradient_blowup(phi, nu, 1.0));
        Csv csv({"x", "F_nu_1e2", "F_nu_1e4", "F_nu_1e6"});
        int rows = 400;
        for (int i = 0; i <= rows; ++i) {
            double x = 1.0 * i / rows;
            csv.row({format_double(x), format_double(ramps[0].value(x)),
                     format_double(ramps[1].value(x)),
                     format_double(ramps[2].value(x))});
        }
        out.write("figure1_d.csv", csv.str());
        m["d_rows"] = rows + 1;
    }

    m["panels"] = {"figure1_a.csv", "figure1_b.csv", "figure1_c.csv", "figure1_d.csv"};
    return {0, m};
}

using Runner = std::pair<int, json> (*)(const json&, Out&);

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> r = {
        {"analyze-phi", run_analyze_phi},
        {"build-barrier", run_build_barrier},
        {"counterexample", run_counterexample},
        {"solve", run_solve},
        {"verify-boundary", run_verify_boundary},
        {"verify-smap", run_verify_smap},
        {"reproduce-figure1", run_reproduce_figure1},
    };
    return r;
}

} // namespace

// ---------------------------------------------------------------------------
// ExperimentConfig

ExperimentConfig ExperimentConfig::from_text(const std::string& text,
                                             const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        std::size_t stop = e.byte > 0 ? e.byte - 1 : 0;
        for (std::size_t i = 0; i < stop && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("invalid JSON: " + std::string(e.what()),
                          origin + ":" + std::to_string(line) + ":" +
                              std::to_string(col));
    }
    if (!doc.is_object())
        throw ConfigError("configuration must be a JSON object", origin);
    reject_unknown_keys(doc, config_schema(), "");

    ExperimentConfig cfg;
    cfg.doc_ = std::move(doc);
    if (cfg.doc_.contains("experiment")) {
        if (!cfg.doc_["experiment"].is_string())
            throw ConfigError("expected a string", "/experiment");
        cfg.experiment_ = cfg.doc_["experiment"].get<std::string>();
    }
    if (cfg.doc_.contains("seed")) {
        if (!cfg.doc_["seed"].is_number_unsigned())
            throw ConfigError("expected a nonnegative integer", "/seed");
        cfg.seed_ = cfg.doc_["seed"].get<std::uint64_t>();
    }
    if (cfg.doc_.contains("output_dir")) {
        if (!cfg.doc_["output_dir"].is_string())
            throw ConfigError("expected a string", "/output_dir");
        cfg.output_dir_ = cfg.doc_["output_dir"].get<std::string>();
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open configuration file", path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return from_text(ss.str(), path);
}

std::string ExperimentConfig::canonical_text() const {
    return doc_.dump(2) + "\n";
}

void ExperimentConfig::set_output_dir(const std::string& dir) {
    output_dir_ = dir;
    doc_["output_dir"] = dir;
}

void ExperimentConfig::set_seed(std::uint64_t seed) {
    seed_ = seed;
    doc_["seed"] = seed;
}

void ExperimentConfig::set_grid_h(double h) {
    doc_["solver"]["grid_h"] = h;
}

void ExperimentConfig::set_experiment(const std::string& name) {
    experiment_ = name;
    doc_["experiment"] = name;
}

// ---------------------------------------------------------------------------
// Running and consolidation.

RunResult run_experiment(const ExperimentConfig& config) {
    const std::string& name = config.experiment();
    auto it = runners().find(name);
    if (it == runners().end())
        throw ConfigError("unknown experiment \"" + name + "\"", "/experiment");

    Out out;
    out.dir = fs::path(config.output_dir());
    fs::create_directories(out.dir);

    auto [exit_code, measurements] = it->second(config.doc(), out);

    std::string report_name = name + "-report.json";
    json report;
    report["id"] = name + "-seed" + std::to_string(config.seed());
    report["experiment"] = name;
    report["seed"] = config.seed();
    report["status"] = exit_code == 0 ? "pass" : "fail";
    report["exit_code"] = exit_code;
    report["schema"] = name + "-report.schema.json";
    report["config"] = config.doc();
    report["measurements"] = measurements;
    json artifacts = json::array();
    for (const std::string& n : out.names) artifacts.push_back(n);
    report["artifacts"] = artifacts;
    out.write(report_name, report.dump(2) + "\n");

    RunResult res;
    res.exit_code = exit_code;
    res.report_path = (out.dir / report_name).string();
    res.artifacts = out.names;
    res.summary_line =
        name + ": " + (exit_code == 0 ? "pass" : "FAIL") + " (" + res.report_path + ")";
    return res;
}

int consolidate_reports(const std::string& dir) {
    const std::string suffix = "-report.json";
    std::vector<std::string> files;
    if (fs::is_directory(dir)) {
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            std::string n = entry.path().filename().string();
            if (n.size() > suffix.size() &&
                n.compare(n.size() - suffix.size(), suffix.size(), suffix) == 0)
                files.push_back(n);
        }
    }
    std::sort(files.begin(), files.end());

    bool unreadable = false;
    json rows = json::array();
    Csv csv({"file", "id", "experiment", "status", "exit_code"});
    for (const std::string& n : files) {
        json row;
        row["file"] = n;
        try {
            std::ifstream f(fs::path(dir) / n, std::ios::binary);
            json rep = json::parse(f);
            row["id"] = rep.at("id").get<std::string>();
            row["experiment"] = rep.at("experiment").get<std::string>();
            row["status"] = rep.at("status").get<std::string>();
            row["exit_code"] = rep.at("exit_code").get<int>();
            csv.row({n, row["id"].get<std::string>(),
                     row["experiment"].get<std::string>(),
                     row["status"].get<std::string>(),
                     std::to_string(row["exit_code"].get<int>())});
        } catch (const std::exception&) {
            row["status"] = "unreadable";
            unreadable = true;
            csv.row({n, "", "", "unreadable", ""});
        }
        rows.push_back(row);
    }

    json summary;
    summary["reports"] = rows.size();
    summary["rows"] = rows;

    Out out;
    out.dir = fs::path(dir);
    fs::create_directories(out.dir);
    out.write("summary.json", summary.dump(2) + "\n");
    out.write("summary.csv", csv.str());
    return (files.empty() || unreadable) ? 1 : 0;
}

} // namespace barrierlab

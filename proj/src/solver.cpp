#include "barrierlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "barrierlab/parallel.hpp"

namespace barrierlab {

namespace {

/// Shortest admissible cut-arm fraction; shorter crossings are clamped so
/// the eliminated ghost values stay bounded.
constexpr double kThetaFloor = 1e-3;

constexpr int kArmDi[4] = {1, -1, 0, 0};
constexpr int kArmDj[4] = {0, 0, 1, -1};

/// ψ(u) = |u|^{q−2} u.
double lower_order(double u, double q) {
    if (q == 2.0) return u;
    return std::pow(std::abs(u), q - 2.0) * u;
}

double lower_order_weight(double u, double q) {
    if (q == 2.0) return 1.0;
    return std::pow(std::abs(u), q - 2.0);
}

/// Edge weight (|∇u|² + eps²)^{(p−2)/2}; p = 2 short-circuits to exactly 1.
double weight_of(double grad2, double p, double eps2) {
    const double s = grad2 + eps2;
    const double e = 0.5 * (p - 2.0);
    if (e == 0.0) return 1.0;
    if (e == 1.0) return s;
    return std::pow(s, e);
}

struct ArmData {
    double w = 0.0;     ///< edge weight at the (shortened) arm midpoint
    double theta = 1.0; ///< crossing fraction, 1 for whole arms
    double gv = 0.0;    ///< Dirichlet value at the crossing (cut arms)
    double grad2 = 0.0; ///< squared gradient estimate at the midpoint
    double pe = 2.0;    ///< exponent at the midpoint
    bool cut = false;
};

/// One solve's worth of fixed structure: grid, coefficients, boundary data
/// and the numbering of unknowns (all inside nodes).
struct Stencil {
    const Grid& g;
    const ExponentField& field;
    const std::function<double(Vec2)>& bdry;
    double eps2;

    std::vector<int> eq_of;
    std::vector<int> node_of;
    int n = 0;

    Stencil(const Grid& grid, const ExponentField& f,
            const std::function<double(Vec2)>& b, double eps_reg)
        : g(grid), field(f), bdry(b), eps2(eps_reg * eps_reg) {
        eq_of.assign(g.classes.size(), -1);
        for (std::size_t idx = 0; idx < g.classes.size(); ++idx) {
            if (g.classes[idx] == NodeClass::Exterior) continue;
            eq_of[idx] = n++;
            node_of.push_back(static_cast<int>(idx));
        }
    }

    /// Value at the arm neighbor of inside node (i, j): the nodal value when
    /// the neighbor is inside, otherwise a linear ghost extension through
    /// the boundary crossing of that arm.
    double eff(const std::vector<double>& v, int idx, int i, int j, int k) const {
        const int nb = g.index(i + kArmDi[k], j + kArmDj[k]);
        if (g.inside(nb)) return v[static_cast<std::size_t>(nb)];
        const CutNode& cn = g.cuts[static_cast<std::size_t>(
            g.cut_index[static_cast<std::size_t>(idx)])];
        const double th = std::max(cn.theta[static_cast<std::size_t>(k)], kThetaFloor);
        const Vec2 x0 = g.point(i, j);
        const Vec2 xc{x0[0] + th * g.h * kArmDi[k], x0[1] + th * g.h * kArmDj[k]};
        const double gval = bdry(xc);
        const double u0 = v[static_cast<std::size_t>(idx)];
        return u0 + (gval - u0) / th;
    }

    /// Central difference orthogonal to an edge of the given axis, at an
    /// inside node.
    double transverse(const std::vector<double>& v, int idx, int i, int j,
                      int axis) const {
        if (axis == 0)
            return (eff(v, idx, i, j, 2) - eff(v, idx, i, j, 3)) / (2.0 * g.h);
        return (eff(v, idx, i, j, 0) - eff(v, idx, i, j, 1)) / (2.0 * g.h);
    }

    /// Weight and geometry of arm k leaving inside node (i, j). The midpoint
    /// gradient uses the along-edge difference plus averaged transverse
    /// central differences (interior endpoint only when the arm is cut).
    ArmData arm(const std::vector<double>& v, int i, int j, int k) const {
        const int idx = g.index(i, j);
        const int nbi = i + kArmDi[k], nbj = j + kArmDj[k];
        const int nb = g.index(nbi, nbj);
        const int axis = k < 2 ? 0 : 1;
        const double u0 = v[static_cast<std::size_t>(idx)];
        ArmData a;
        Vec2 mid = g.point(i, j);
        if (g.inside(nb)) {
            const double d = (v[static_cast<std::size_t>(nb)] - u0) / g.h;
            const double t = 0.5 * (transverse(v, idx, i, j, axis) +
                                    transverse(v, nb, nbi, nbj, axis));
            mid[0] += 0.5 * g.h * kArmDi[k];
            mid[1] += 0.5 * g.h * kArmDj[k];
            a.grad2 = d * d + t * t;
        } else {
            const CutNode& cn = g.cuts[static_cast<std::size_t>(
                g.cut_index[static_cast<std::size_t>(idx)])];
            a.cut = true;
            a.theta = std::max(cn.theta[static_cast<std::size_t>(k)], kThetaFloor);
            Vec2 xc = g.point(i, j);
            xc[0] += a.theta * g.h * kArmDi[k];
            xc[1] += a.theta * g.h * kArmDj[k];
            a.gv = bdry(xc);
            const double d = (a.gv - u0) / (a.theta * g.h);
            const double t = transverse(v, idx, i, j, axis);
            mid[0] += 0.5 * a.theta * g.h * kArmDi[k];
            mid[1] += 0.5 * a.theta * g.h * kArmDj[k];
            a.grad2 = d * d + t * t;
        }
        a.pe = field.p(mid);
        a.w = weight_of(a.grad2, a.pe, eps2);
        return a;
    }
};

struct Csr {
    std::vector<int> row_ptr, col;
    std::vector<double> val;
    std::vector<double> diag;
};

Csr build_pattern(const Stencil& st) {
    Csr A;
    A.row_ptr.assign(static_cast<std::size_t>(st.n) + 1, 0);
    std::vector<std::array<int, 5>> cols(static_cast<std::size_t>(st.n));
    for (int r = 0; r < st.n; ++r) {
        const int idx = st.node_of[static_cast<std::size_t>(r)];
        const int i = idx % st.g.nx, j = idx / st.g.nx;
        int cnt = 0;
        auto& row = cols[static_cast<std::size_t>(r)];
        row[cnt++] = r;
        for (int k = 0; k < 4; ++k) {
            const int nb = st.g.index(i + kArmDi[k], j + kArmDj[k]);
            if (st.g.inside(nb)) row[cnt++] = st.eq_of[static_cast<std::size_t>(nb)];
        }
        std::sort(row.begin(), row.begin() + cnt);
        A.row_ptr[static_cast<std::size_t>(r) + 1] =
            A.row_ptr[static_cast<std::size_t>(r)] + cnt;
    }
    A.col.resize(static_cast<std::size_t>(A.row_ptr.back()));
    for (int r = 0; r < st.n; ++r) {
        const int begin = A.row_ptr[static_cast<std::size_t>(r)];
        const int end = A.row_ptr[static_cast<std::size_t>(r) + 1];
        for (int kk = begin; kk < end; ++kk)
            A.col[static_cast<std::size_t>(kk)] =
                cols[static_cast<std::size_t>(r)][static_cast<std::size_t>(kk - begin)];
    }
    A.val.assign(A.col.size(), 0.0);
    A.diag.assign(static_cast<std::size_t>(st.n), 0.0);
    return A;
}

int entry_pos(const Csr& A, int row, int col) {
    for (int kk = A.row_ptr[static_cast<std::size_t>(row)];
         kk < A.row_ptr[static_cast<std::size_t>(row) + 1]; ++kk)
        if (A.col[static_cast<std::size_t>(kk)] == col) return kk;
    throw NumericalError("solver: missing matrix entry");
}

/// Refill matrix values and right-hand side from the current iterate. The
/// system is the h²-scaled flux form; a ≤ 0 enters the diagonal implicitly
/// (with |u_old|^{q−2} frozen), a > 0 is lagged entirely to the right side.
void assemble(const Stencil& st, const std::vector<double>& v,
              const std::function<double(Vec2)>& f_src, double a_coef,
              Csr& A, std::vector<double>& b) {
    const double h2 = st.g.h * st.g.h;
    const std::size_t n = static_cast<std::size_t>(st.n);
    std::vector<double> wx(n, -1.0), wy(n, -1.0), cdiag(n, 0.0), crhs(n, 0.0);

    parallel_chunks(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
            const int idx = st.node_of[r];
            const int i = idx % st.g.nx, j = idx / st.g.nx;
            for (int k = 0; k < 4; ++k) {
                const int nb = st.g.index(i + kArmDi[k], j + kArmDj[k]);
                if (st.g.inside(nb)) {
                    if (k == 0) wx[r] = st.arm(v, i, j, 0).w;
                    if (k == 2) wy[r] = st.arm(v, i, j, 2).w;
                } else {
                    const ArmData ad = st.arm(v, i, j, k);
                    cdiag[r] += ad.w / ad.theta;
                    crhs[r] += ad.w / ad.theta * ad.gv;
                }
            }
        }
    });

    std::fill(A.val.begin(), A.val.end(), 0.0);
    std::vector<double> dval(n, 0.0);
    b.assign(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const int idx = st.node_of[r];
        const int i = idx % st.g.nx, j = idx / st.g.nx;
        const Vec2 x = st.g.point(i, j);
        const double qv = st.field.q(x);
        dval[r] += cdiag[r];
        b[r] = h2 * f_src(x) + crhs[r];
        const double u0 = v[static_cast<std::size_t>(idx)];
        if (a_coef <= 0.0)
            dval[r] += (-a_coef) * h2 * lower_order_weight(u0, qv);
        else
            b[r] += h2 * a_coef * lower_order(u0, qv);
        if (wx[r] >= 0.0) {
            const int r2 = st.eq_of[static_cast<std::size_t>(idx + 1)];
            dval[r] += wx[r];
            dval[static_cast<std::size_t>(r2)] += wx[r];
            A.val[static_cast<std::size_t>(entry_pos(A, static_cast<int>(r), r2))] -= wx[r];
            A.val[static_cast<std::size_t>(entry_pos(A, r2, static_cast<int>(r)))] -= wx[r];
        }
        if (wy[r] >= 0.0) {
            const int r2 = st.eq_of[static_cast<std::size_t>(idx + st.g.nx)];
            dval[r] += wy[r];
            dval[static_cast<std::size_t>(r2)] += wy[r];
            A.val[static_cast<std::size_t>(entry_pos(A, static_cast<int>(r), r2))] -= wy[r];
            A.val[static_cast<std::size_t>(entry_pos(A, r2, static_cast<int>(r)))] -= wy[r];
        }
    }
    for (std::size_t r = 0; r < n; ++r) {
        A.val[static_cast<std::size_t>(entry_pos(A, static_cast<int>(r),
                                                 static_cast<int>(r)))] = dval[r];
        A.diag[r] = dval[r];
    }
}

void matvec(const Csr& A, const std::vector<double>& x, std::vector<double>& y) {
    const std::size_t n = A.diag.size();
    parallel_chunks(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
            double s = 0.0;
            for (int kk = A.row_ptr[r]; kk < A.row_ptr[r + 1]; ++kk)
                s += A.val[static_cast<std::size_t>(kk)] *
                     x[static_cast<std::size_t>(A.col[static_cast<std::size_t>(kk)])];
            y[r] = s;
        }
    });
}

/// Serial dot product: fixed summation order keeps runs bit-reproducible.
double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Jacobi-preconditioned conjugate gradients; returns the iteration count.
/// Stops at the stricter of the relative and absolute residual targets, or
/// when rounding has exhausted the attainable accuracy.
int pcg(const Csr& A, const std::vector<double>& b, std::vector<double>& x,
        double rel_tol, double abs_tol, int max_iter) {
    const std::size_t n = b.size();
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return 0;
    }
    double stop = rel_tol * bnorm;
    if (abs_tol > 0.0) stop = std::min(stop, abs_tol);
    std::vector<double> r(n), z(n), p(n), ap(n);
    matvec(A, x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    double rn = std::sqrt(dot(r, r));
    if (rn <= stop) return 0;
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / A.diag[i];
    p = z;
    double rz = dot(r, z);
    double best = rn;
    int since_improved = 0;
    for (int it = 1; it <= max_iter; ++it) {
        matvec(A, p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) return it; // loss of positive definiteness: bail out
        const double alpha = rz / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rn = std::sqrt(dot(r, r));
        if (rn <= stop) return it;
        if (rn < best * (1.0 - 1e-4)) {
            best = rn;
            since_improved = 0;
        } else if (++since_improved >= 80) {
            return it; // at the rounding floor for this system
        }
        for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / A.diag[i];
        const double rz2 = dot(r, z);
        const double beta = rz2 / rz;
        rz = rz2;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return max_iter;
}

/// Max-norm nonlinear residual of the flux form, weights rebuilt from v.
/// Returns the max and the flat index of the witness node.
std::pair<double, int> residual_max(const Stencil& st, const std::vector<double>& v,
                                    const std::function<double(Vec2)>& f_src,
                                    double a_coef, bool interior_only) {
    const double h2 = st.g.h * st.g.h;
    const std::size_t n = static_cast<std::size_t>(st.n);
    std::vector<double> res(n, 0.0);
    parallel_chunks(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
            const int idx = st.node_of[r];
            if (interior_only &&
                st.g.classes[static_cast<std::size_t>(idx)] != NodeClass::Interior)
                continue;
            const int i = idx % st.g.nx, j = idx / st.g.nx;
            const double u0 = v[static_cast<std::size_t>(idx)];
            double flux = 0.0;
            for (int k = 0; k < 4; ++k) {
                const ArmData ad = st.arm(v, i, j, k);
                if (ad.cut)
                    flux += ad.w / ad.theta * (u0 - ad.gv);
                else
                    flux += ad.w * (u0 - v[static_cast<std::size_t>(st.g.index(
                                        i + kArmDi[k], j + kArmDj[k]))]);
            }
            const Vec2 x = st.g.point(i, j);
            res[r] = std::abs(flux / h2 - a_coef * lower_order(u0, st.field.q(x)) -
                              f_src(x));
        }
    });
    double best = 0.0;
    int witness = st.n > 0 ? st.node_of[0] : -1;
    for (std::size_t r = 0; r < n; ++r)
        if (res[r] > best) {
            best = res[r];
            witness = st.node_of[r];
        }
    return {best, witness};
}

/// Discrete energy: edge-wise p-Dirichlet term plus the lower-order and
/// source terms. A Lyapunov diagnostic for the damped Picard iteration.
double energy_of(const Stencil& st, const std::vector<double>& v,
                 const std::function<double(Vec2)>& f_src, double a_coef) {
    const double h2 = st.g.h * st.g.h;
    double e = 0.0;
    for (int r = 0; r < st.n; ++r) {
        const int idx = st.node_of[static_cast<std::size_t>(r)];
        const int i = idx % st.g.nx, j = idx / st.g.nx;
        for (int k = 0; k < 4; ++k) {
            const int nb = st.g.index(i + kArmDi[k], j + kArmDj[k]);
            const bool whole = st.g.inside(nb);
            if (whole && k != 0 && k != 2) continue; // count whole edges once
            const ArmData ad = st.arm(v, i, j, k);
            const double vol = whole ? 0.5 * h2 : 0.5 * h2 * ad.theta;
            e += vol * std::pow(ad.grad2 + st.eps2, 0.5 * ad.pe) / ad.pe;
        }
        const Vec2 x = st.g.point(i, j);
        const double qv = st.field.q(x);
        const double u0 = v[static_cast<std::size_t>(idx)];
        e += h2 * (-a_coef) / qv * std::pow(std::abs(u0), qv);
        e -= h2 * f_src(x) * u0;
    }
    return e;
}

/// Check declared bounds and the Lipschitz quotient of the exponent data on
/// the nodes the discretization actually touches.
void validate_field(const ExponentField& f, const Grid& g) {
    if (!f.p || !f.q)
        throw DomainError("ExponentField: p and q callables must be set");
    if (!(f.p_min > 1.0) || !(f.p_max >= f.p_min) || !std::isfinite(f.p_max))
        throw DomainError("ExponentField: need 1 < p_min <= p_max < inf");
    if (!(f.q_min >= 2.0) || !(f.q_max >= f.q_min) || !std::isfinite(f.q_max))
        throw DomainError("ExponentField: need 2 <= q_min <= q_max < inf");
    if (!(f.p_lipschitz >= 0.0) || !std::isfinite(f.p_lipschitz))
        throw DomainError("ExponentField: Lipschitz bound must be finite and >= 0");
    if (!std::isfinite(f.a))
        throw DomainError("ExponentField: coefficient a must be finite");

    const std::size_t total = g.classes.size();
    std::vector<char> rel(total, 0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int idx = g.index(i, j);
            if (!g.inside(idx)) continue;
            rel[static_cast<std::size_t>(idx)] = 1;
            if (g.cut_index[static_cast<std::size_t>(idx)] < 0) continue;
            for (int k = 0; k < 4; ++k) {
                const int nb = g.index(i + kArmDi[k], j + kArmDj[k]);
                if (!g.inside(nb)) rel[static_cast<std::size_t>(nb)] = 1;
            }
        }

    std::vector<double> pv(total, std::numeric_limits<double>::quiet_NaN());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t idx = static_cast<std::size_t>(g.index(i, j));
            if (!rel[idx]) continue;
            const Vec2 x = g.point(i, j);
            const double p = f.p(x);
            const double q = f.q(x);
            if (!(p >= f.p_min - 1e-12) || !(p <= f.p_max + 1e-12)) {
                std::ostringstream msg;
                msg << "ExponentField: p(" << x[0] << ", " << x[1] << ") = " << p
                    << " violates declared bounds [" << f.p_min << ", " << f.p_max
                    << "]";
                throw DomainError(msg.str());
            }
            if (!(q >= f.q_min - 1e-12) || !(q <= f.q_max + 1e-12)) {
                std::ostringstream msg;
                msg << "ExponentField: q(" << x[0] << ", " << x[1] << ") = " << q
                    << " violates declared bounds [" << f.q_min << ", " << f.q_max
                    << "]";
                throw DomainError(msg.str());
            }
            pv[idx] = p;
        }

    const double cap = f.p_lipschitz * (1.0 + 1e-6) + 1e-12;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t idx = static_cast<std::size_t>(g.index(i, j));
            if (!rel[idx]) continue;
            for (int k = 0; k < 4; k += 2) { // +x and +y pairs cover all edges
                const int ni = i + kArmDi[k], nj = j + kArmDj[k];
                if (ni >= g.nx || nj >= g.ny) continue;
                const std::size_t nb = static_cast<std::size_t>(g.index(ni, nj));
                if (!rel[nb]) continue;
                const double quot = std::abs(pv[nb] - pv[idx]) / g.h;
                if (quot > cap) {
                    std::ostringstream msg;
                    msg << "ExponentField: discrete Lipschitz quotient " << quot
                        << " of p exceeds declared bound " << f.p_lipschitz;
                    throw DomainError(msg.str());
                }
            }
        }
}

void validate_config(const SolverConfig& cfg) {
    if (!(cfg.eps_reg > 0.0) || !(cfg.tolerance > 0.0) || !(cfg.lin_tol > 0.0))
        throw DomainError("SolverConfig: eps_reg, tolerance and lin_tol must be positive");
    if (!(cfg.damping > 0.0) || !(cfg.damping <= 1.0))
        throw DomainError("SolverConfig: damping must lie in (0, 1]");
    if (cfg.max_picard < 1)
        throw DomainError("SolverConfig: need at least one Picard iteration");
}

/// Smallest-eigenvalue estimate of the frozen operator (without the
/// lower-order term) by a few inverse power iterations.
double lambda_min_estimate(const Stencil& st, Csr& A, const std::vector<double>& v) {
    std::vector<double> b_zero;
    auto zero = [](Vec2) { return 0.0; };
    assemble(st, v, zero, 0.0, A, b_zero);
    const std::size_t n = static_cast<std::size_t>(st.n);
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), y(n, 0.0);
    for (int it = 0; it < 8; ++it) {
        std::fill(y.begin(), y.end(), 0.0);
        pcg(A, x, y, 1e-10, 0.0, 20000);
        const double norm = std::sqrt(dot(y, y));
        if (!(norm > 0.0)) break;
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
    }
    std::vector<double> ax(n);
    matvec(A, x, ax);
    return dot(x, ax) / dot(x, x) / (st.g.h * st.g.h);
}

} // namespace

ExponentField ExponentField::constant(double p_const, double q_const, double a) {
    if (!(p_const > 1.0) || !std::isfinite(p_const))
        throw DomainError("ExponentField::constant: need p > 1");
    if (!(q_const >= 2.0) || !std::isfinite(q_const))
        throw DomainError("ExponentField::constant: need q >= 2");
    ExponentField f;
    f.p = [p_const](Vec2) { return p_const; };
    f.q = [q_const](Vec2) { return q_const; };
    f.a = a;
    f.p_min = f.p_max = p_const;
    f.q_min = f.q_max = q_const;
    f.p_lipschitz = 0.0;
    return f;
}

GridFunction::GridFunction(std::shared_ptr<const Grid> grid,
                           std::vector<double> values,
                           std::function<double(Vec2)> boundary)
    : grid_(std::move(grid)), values_(std::move(values)),
      boundary_(std::move(boundary)) {
    if (!grid_)
        throw DomainError("GridFunction: null grid");
    if (!boundary_)
        throw DomainError("GridFunction: boundary data callable must be set");
    const std::size_t expect = static_cast<std::size_t>(grid_->nx) *
                               static_cast<std::size_t>(grid_->ny);
    if (values_.size() != expect)
        throw DomainError("GridFunction: value array does not match the grid");
    for (double v : values_)
        if (!std::isfinite(v))
            throw DomainError("GridFunction: values must be finite");
}

double GridFunction::sample(const Vec2& x) const {
    const Grid& g = *grid_;
    const double fx = (x[0] - g.lo[0]) / g.h;
    const double fy = (x[1] - g.lo[1]) / g.h;
    int i = static_cast<int>(std::floor(fx));
    int j = static_cast<int>(std::floor(fy));
    i = std::clamp(i, 0, g.nx - 2);
    j = std::clamp(j, 0, g.ny - 2);
    const double tx = std::clamp(fx - i, 0.0, 1.0);
    const double ty = std::clamp(fy - j, 0.0, 1.0);
    const double v00 = value(i, j), v10 = value(i + 1, j);
    const double v01 = value(i, j + 1), v11 = value(i + 1, j + 1);
    return (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) +
           ty * ((1.0 - tx) * v01 + tx * v11);
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (std::size_t idx = 0; idx < values_.size(); ++idx)
        if (grid_->inside(static_cast<int>(idx)))
            m = std::max(m, std::abs(values_[idx]));
    return m;
}

GridFunction sample_function(std::shared_ptr<const Grid> grid,
                             std::function<double(Vec2)> fn) {
    if (!grid) throw DomainError("sample_function: null grid");
    if (!fn) throw DomainError("sample_function: callable must be set");
    const std::size_t total = static_cast<std::size_t>(grid->nx) *
                              static_cast<std::size_t>(grid->ny);
    std::vector<double> vals(total);
    const Grid& g = *grid;
    parallel_chunks(total, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            const int i = static_cast<int>(idx) % g.nx;
            const int j = static_cast<int>(idx) / g.nx;
            vals[idx] = fn(g.point(i, j));
        }
    });
    return GridFunction(std::move(grid), std::move(vals), std::move(fn));
}

GridFunction solve(std::shared_ptr<const Grid> grid, const ExponentField& exp,
                   std::function<double(Vec2)> bdry,
                   std::function<double(Vec2)> f_src, const SolverConfig& cfg,
                   SolveInfo* info) {
    if (!grid) throw DomainError("solve: null grid");
    if (!bdry || !f_src)
        throw DomainError("solve: boundary and source callables must be set");
    validate_config(cfg);
    validate_field(exp, *grid);

    SolveInfo local;
    SolveInfo& rec = info ? *info : local;
    rec = SolveInfo{};

    const Grid& g = *grid;
    Stencil st(g, exp, bdry, cfg.eps_reg);
    if (st.n == 0)
        throw ResolutionError("solve: grid has no inside nodes");

    // Initial closure: transport the Dirichlet data from the boundary
    // projection of every node (the exterior part stays fixed for good).
    const std::size_t total = g.classes.size();
    std::vector<double> v(total, 0.0);
    parallel_chunks(total, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            const int i = static_cast<int>(idx) % g.nx;
            const int j = static_cast<int>(idx) / g.nx;
            v[idx] = bdry(boundary_projection(g.domain, g.point(i, j)));
        }
    });
    for (double val : v)
        if (!std::isfinite(val))
            throw DomainError("solve: boundary data produced non-finite values");

    Csr A = build_pattern(st);

    if (exp.a > 0.0) {
        const double lam = lambda_min_estimate(st, A, v);
        if (exp.a > lam) {
            rec.monotonicity_warning = true;
            std::ostringstream msg;
            msg << "coefficient a = " << exp.a
                << " exceeds the smallest-eigenvalue estimate " << lam
                << " of the frozen operator; uniqueness of the discrete "
                   "solution is in doubt";
            rec.warning = msg.str();
        }
    }

    double r_prev = residual_max(st, v, f_src, exp.a, false).first;
    rec.residual_history.push_back(r_prev);
    rec.energy_history.push_back(energy_of(st, v, f_src, exp.a));

    if (r_prev > cfg.tolerance) {
        // With constant p = 2 (and a constant-coefficient lower-order term)
        // the weights never change, so one undamped step is exact.
        const bool linear_problem =
            exp.p_min == 2.0 && exp.p_max == 2.0 &&
            (exp.a == 0.0 ||
             (exp.a < 0.0 && exp.q_min == 2.0 && exp.q_max == 2.0));
        std::vector<double> b;
        std::vector<double> x(static_cast<std::size_t>(st.n));
        std::vector<double> vt(total);
        double omega = linear_problem ? 1.0 : cfg.damping;
        const double lin_abs = 0.5 * cfg.tolerance * g.h * g.h;
        int flat = 0;
        for (int it = 1; it <= cfg.max_picard; ++it) {
            assemble(st, v, f_src, exp.a, A, b);
            for (int r = 0; r < st.n; ++r)
                x[static_cast<std::size_t>(r)] =
                    v[static_cast<std::size_t>(st.node_of[static_cast<std::size_t>(r)])];
            rec.linear_iterations +=
                pcg(A, b, x, cfg.lin_tol, lin_abs, 4 * st.n + 200);

            double s = omega;
            double r_trial = 0.0;
            int rejections = 0;
            for (;;) {
                vt = v;
                for (int r = 0; r < st.n; ++r) {
                    const std::size_t idx = static_cast<std::size_t>(
                        st.node_of[static_cast<std::size_t>(r)]);
                    vt[idx] = v[idx] + s * (x[static_cast<std::size_t>(r)] - v[idx]);
                }
                r_trial = residual_max(st, vt, f_src, exp.a, false).first;
                if (r_trial < r_prev || rejections >= 8) break;
                s *= 0.5;
                ++rejections;
            }
            v.swap(vt);
            rec.residual_history.push_back(r_trial);
            rec.energy_history.push_back(energy_of(st, v, f_src, exp.a));
            rec.iterations = it;

            if (rejections == 0 && r_trial <= 0.3 * r_prev)
                omega = std::min(1.0, omega * 1.4);
            else if (rejections > 0)
                omega = std::max(cfg.damping / 256.0, 0.5 * omega);

            flat = r_trial >= 0.995 * r_prev ? flat + 1 : 0;
            r_prev = r_trial;
            if (r_prev <= cfg.tolerance) break;
            if (flat >= 4) {
                std::ostringstream msg;
                msg << "solve: Picard iteration stagnated at residual " << r_prev
                    << " after " << it << " iterations (tolerance "
                    << cfg.tolerance << ")";
                throw NonConvergence(msg.str(), rec.residual_history);
            }
        }
        if (r_prev > cfg.tolerance) {
            std::ostringstream msg;
            msg << "solve: residual " << r_prev << " above tolerance "
                << cfg.tolerance << " after " << cfg.max_picard
                << " Picard iterations";
            throw NonConvergence(msg.str(), rec.residual_history);
        }
    }
    rec.final_residual = r_prev;
    return GridFunction(std::move(grid), std::move(v), std::move(bdry));
}

double residual_norm(const GridFunction& u, const ExponentField& exp,
                     std::function<double(Vec2)> f_src) {
    if (!f_src) throw DomainError("residual_norm: source callable must be set");
    const Grid& g = u.grid();
    validate_field(exp, g);
    const SolverConfig defaults{};
    Stencil st(g, exp, u.boundary_data(), defaults.eps_reg);
    return residual_max(st, u.values(), f_src, exp.a, true).first;
}

std::function<double(double)> radial_reference(double p_const, double r_in,
                                               double r_out, double inner_val,
                                               double outer_val) {
    if (!(p_const > 1.0) || !std::isfinite(p_const))
        throw DomainError("radial_reference: need p > 1");
    if (!(0.0 < r_in && r_in < r_out) || !std::isfinite(r_out))
        throw DomainError("radial_reference: need 0 < r_in < r_out");
    if (p_const == 2.0) {
        const double denom = std::log(r_out / r_in);
        return [=](double rho) {
            return inner_val + (outer_val - inner_val) * std::log(rho / r_in) / denom;
        };
    }
    const double alpha = (p_const - 2.0) / (p_const - 1.0);
    const double lo = std::pow(r_in, alpha);
    const double denom = std::pow(r_out, alpha) - lo;
    return [=](double rho) {
        return inner_val + (outer_val - inner_val) * (std::pow(rho, alpha) - lo) / denom;
    };
}

OrderingReport check_weak_comparison(std::shared_ptr<const Grid> grid,
                                     const ProblemSpec& u_spec,
                                     const ProblemSpec& v_spec,
                                     const SolverConfig& cfg) {
    if (!grid) throw DomainError("check_weak_comparison: null grid");
    const Grid& g = *grid;
    if (!(u_spec.exp.a < 0.0) || u_spec.exp.a != v_spec.exp.a)
        throw HypothesisError("check_weak_comparison: both problems need the "
                              "same coefficient a < 0");

    // Identical exponents, ordered source and boundary data.
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int idx = g.index(i, j);
            if (!g.inside(idx)) continue;
            const Vec2 x = g.point(i, j);
            if (std::abs(u_spec.exp.p(x) - v_spec.exp.p(x)) > 1e-12 ||
                std::abs(u_spec.exp.q(x) - v_spec.exp.q(x)) > 1e-12)
                throw HypothesisError("check_weak_comparison: exponent fields "
                                      "differ between the two problems");
            if (u_spec.source(x) > v_spec.source(x) + 1e-12)
                throw HypothesisError("check_weak_comparison: source ordering "
                                      "f <= f' fails at an inside node");
        }
    for (const CutNode& cn : g.cuts)
        if (u_spec.boundary(cn.projection) > v_spec.boundary(cn.projection) + 1e-12)
            throw HypothesisError("check_weak_comparison: boundary ordering "
                                  "g <= g' fails at a projection point");
    for (int s = 0; s < 256; ++s) {
        const Vec2 p = boundary_point(g.domain, (s + 0.5) / 256.0);
        if (u_spec.boundary(p) > v_spec.boundary(p) + 1e-12)
            throw HypothesisError("check_weak_comparison: boundary ordering "
                                  "g <= g' fails at a sampled boundary point");
    }

    const GridFunction u = solve(grid, u_spec.exp, u_spec.boundary, u_spec.source, cfg);
    const GridFunction v = solve(grid, v_spec.exp, v_spec.boundary, v_spec.source, cfg);

    OrderingReport rep;
    rep.h = g.h;
    rep.allowance = 10.0 * g.h * g.h;
    rep.min_gap = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int idx = g.index(i, j);
            if (!g.inside(idx)) continue;
            const double gap = v[idx] - u[idx];
            if (gap < rep.min_gap) {
                rep.min_gap = gap;
                rep.witness = g.point(i, j);
            }
        }
    rep.pass = rep.min_gap >= -rep.allowance;
    return rep;
}

} // namespace barrierlab

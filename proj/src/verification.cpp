#include "barrierlab/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace barrierlab {

namespace {

constexpr int kNeighborDi[4] = {1, -1, 0, 0};
constexpr int kNeighborDj[4] = {0, 0, 1, -1};

double dist2(const Vec2& a, const Vec2& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

void require_on_boundary(const Domain& d, const Vec2& w, const char* who) {
    if (std::abs(signed_distance(d, w)) > 1e-8)
        throw DomainError(std::string(who) + ": anchor point is not on the boundary");
}

/// Dirichlet data must vanish (within tol) on the boundary portion within
/// `ball` of w; sampled plus the anchor itself.
void require_vanishing(const GridFunction& u, const Domain& d, const Vec2& w,
                       double ball, double tol, const char* who) {
    if (std::abs(u.boundary(w)) > tol)
        throw HypothesisError(std::string(who) +
                              ": field does not vanish at the anchor");
    for (int s = 0; s < 512; ++s) {
        const Vec2 p = boundary_point(d, (s + 0.5) / 512.0);
        if (dist2(p, w) >= ball * ball) continue;
        if (std::abs(u.boundary(p)) > tol) {
            std::ostringstream msg;
            msg << who << ": field does not vanish on the boundary portion (value "
                << u.boundary(p) << " at (" << p[0] << ", " << p[1] << "))";
            throw HypothesisError(msg.str());
        }
    }
}

/// Barrier value at an exact radius, valid at the rims too.
double barrier_radial_value(const RadialBarrier& b, double rho) {
    const auto [inner, outer] = boundary_values(b);
    if (std::abs(rho - b.r) <= 1e-12 * std::max(1.0, b.r)) return inner;
    const double r_out = b.k * b.r;
    if (std::abs(rho - r_out) <= 1e-12 * std::max(1.0, r_out)) return outer;
    std::vector<double> x(b.center);
    x[0] += rho;
    return eval_barrier(b, x).value;
}

} // namespace

VerificationReport check_smap_samples(const std::vector<double>& values,
                                      const std::vector<char>& interior,
                                      double constant_tol) {
    if (values.empty() || values.size() != interior.size())
        throw DomainError("check_smap_samples: need matching nonempty arrays");
    if (!(constant_tol >= 0.0))
        throw DomainError("check_smap_samples: tolerance must be nonnegative");

    VerificationReport rep;
    rep.check = "smap";
    const double inf = std::numeric_limits<double>::infinity();
    double all_max = -inf, all_min = inf, interior_max = -inf, rest_max = -inf;
    std::size_t interior_argmax = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        all_max = std::max(all_max, values[i]);
        all_min = std::min(all_min, values[i]);
        if (interior[i]) {
            if (values[i] > interior_max) {
                interior_max = values[i];
                interior_argmax = i;
            }
        } else {
            rest_max = std::max(rest_max, values[i]);
        }
    }
    rep.measured = all_max;
    rep.witness = {static_cast<double>(interior_argmax), 0.0};

    if (all_max - all_min <= constant_tol) {
        rep.pass = true;
        rep.margin = constant_tol - (all_max - all_min);
        rep.detail = "constant within tolerance";
        return rep;
    }
    if (all_max <= 0.0) {
        rep.pass = true;
        rep.margin = -all_max;
        rep.detail = "no positive maximum";
        return rep;
    }
    const double tie = 1e-12 * std::max(1.0, std::abs(all_max));
    if (interior_max >= all_max - tie) {
        rep.pass = false;
        rep.margin = rest_max - interior_max;
        rep.detail = "positive maximum attained at an interior node";
        return rep;
    }
    rep.pass = true;
    rep.margin = rest_max - interior_max;
    rep.detail = "maximum attained only at the boundary-adjacent layer";
    return rep;
}

VerificationReport check_smap(const GridFunction& u) {
    const Grid& g = u.grid();
    std::vector<double> vals;
    std::vector<char> interior;
    std::vector<int> nodes;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int idx = g.index(i, j);
            bool in_closure = g.inside(idx);
            if (!in_closure)
                for (int k = 0; k < 4 && !in_closure; ++k) {
                    const int ni = i + kNeighborDi[k], nj = j + kNeighborDj[k];
                    if (ni < 0 || nj < 0 || ni >= g.nx || nj >= g.ny) continue;
                    in_closure = g.inside(g.index(ni, nj));
                }
            if (!in_closure) continue;
            vals.push_back(u[idx]);
            interior.push_back(
                g.classes[static_cast<std::size_t>(idx)] == NodeClass::Interior ? 1 : 0);
            nodes.push_back(idx);
        }
    VerificationReport rep =
        check_smap_samples(vals, interior, 10.0 * g.h * g.h);
    const std::size_t wi = static_cast<std::size_t>(rep.witness[0]);
    const int idx = nodes[wi];
    rep.witness = g.point(idx % g.nx, idx / g.nx);
    rep.h = g.h;
    return rep;
}

VerificationReport check_hopf_slope(const GridFunction& u, const Domain& d,
                                    const Vec2& w, const Vec2& v) {
    require_on_boundary(d, w, "check_hopf_slope");
    const double vn = std::sqrt(v[0] * v[0] + v[1] * v[1]);
    if (!(vn > 0.0))
        throw DomainError("check_hopf_slope: direction must be nonzero");
    const Vec2 vhat{v[0] / vn, v[1] / vn};
    const Vec2 nrm = outward_normal(d, w);
    if (!(vhat[0] * nrm[0] + vhat[1] * nrm[1] < 0.0))
        throw DomainError("check_hopf_slope: direction must point inward");

    const double h = u.h();
    const double uw = u.sample(w);
    const double slope_floor = 1e-3 * u.max_abs() / d.ball_radius();

    double q[3];
    const double scales[3] = {4.0, 8.0, 16.0};
    for (int k = 0; k < 3; ++k) {
        const double s = scales[k] * h;
        const Vec2 p{w[0] + s * vhat[0], w[1] + s * vhat[1]};
        if (!(signed_distance(d, p) < 0.0))
            throw ResolutionError("check_hopf_slope: probe point left the domain "
                                  "(grid too coarse for this boundary point)");
        q[k] = (u.sample(p) - uw) / s;
    }

    VerificationReport rep;
    rep.check = "hopf-slope";
    rep.h = h;
    rep.witness = w;
    rep.measured = (8.0 * q[0] - 6.0 * q[1] + q[2]) / 3.0;
    const double qmin = std::min({q[0], q[1], q[2]});
    const double qmax = std::max({q[0], q[1], q[2]});
    rep.margin = std::max(qmin - slope_floor, -qmax - slope_floor);
    rep.pass = rep.margin > 0.0;
    std::ostringstream det;
    det << "quotients " << q[0] << ", " << q[1] << ", " << q[2] << " against floor "
        << slope_floor;
    rep.detail = det.str();
    return rep;
}

namespace {

struct BandNodes {
    std::vector<int> used;    ///< flat indices with dist >= 4h
    std::vector<double> dist; ///< exact boundary distance of used nodes
};

/// Collect the nodes of {d_lo < dist < d_hi} ∩ B(w, ball) with the 4h
/// discretization floor applied; verifies positivity of u on them.
BandNodes collect_band(const GridFunction& u, const Vec2& w, double d_lo,
                       double d_hi, double ball, const char* who) {
    const Grid& g = u.grid();
    const double floor_d = std::max(d_lo, 4.0 * g.h);
    BandNodes out;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int idx = g.index(i, j);
            if (!g.inside(idx)) continue;
            const double dist = -g.sdist[static_cast<std::size_t>(idx)];
            if (dist2(g.point(i, j), w) >= ball * ball) continue;
            if (!(dist < d_hi)) continue;
            if (!(dist > d_lo)) continue;
            if (dist < floor_d) {
                // Too close to the boundary to trust the ratio; only screen
                // for gross sign violations.
                if (u[idx] < -10.0 * g.h * g.h) {
                    std::ostringstream msg;
                    msg << who << ": field is negative (" << u[idx]
                        << ") near the boundary";
                    throw PositivityError(msg.str());
                }
                continue;
            }
            if (!(u[idx] > 0.0)) {
                std::ostringstream msg;
                msg << who << ": field is not strictly positive at ("
                    << g.point(i, j)[0] << ", " << g.point(i, j)[1] << ")";
                throw PositivityError(msg.str());
            }
            out.used.push_back(idx);
            out.dist.push_back(dist);
        }
    if (out.used.empty())
        throw ResolutionError(std::string(who) +
                              ": no band node clears the 4h distance floor");
    return out;
}

} // namespace

VerificationReport distance_comparability(
    const GridFunction& u, const Domain& d, const Vec2& w, double r,
    std::optional<std::array<double, 2>> d_window) {
    require_on_boundary(d, w, "distance_comparability");
    if (!(r > 0.0)) throw DomainError("distance_comparability: need r > 0");
    const double d_lo = d_window ? (*d_window)[0] : r;
    const double d_hi = d_window ? (*d_window)[1] : 3.0 * r;
    if (!(0.0 < d_lo && d_lo < d_hi))
        throw DomainError("distance_comparability: need 0 < d_lo < d_hi");
    const double ball = 2.0 * d_hi;
    const double h = u.h();
    require_vanishing(u, d, w, ball, 10.0 * h * h, "distance_comparability");

    const BandNodes band = collect_band(u, w, d_lo, d_hi, ball,
                                        "distance_comparability");
    const Grid& g = u.grid();
    double rmax = -std::numeric_limits<double>::infinity();
    double rmin = std::numeric_limits<double>::infinity();
    double inf_u = std::numeric_limits<double>::infinity();
    std::size_t argmax = 0;
    for (std::size_t k = 0; k < band.used.size(); ++k) {
        const double ratio = u[band.used[k]] / band.dist[k];
        if (ratio > rmax) {
            rmax = ratio;
            argmax = k;
        }
        rmin = std::min(rmin, ratio);
        inf_u = std::min(inf_u, u[band.used[k]]);
    }

    VerificationReport rep;
    rep.check = "distance-comparability";
    rep.h = h;
    rep.band_radius = r;
    rep.c_high = rmax;
    rep.c_low = 1.0 / rmin;
    rep.measured = rmax;
    rep.margin = rmin;
    const int idx = band.used[argmax];
    rep.witness = g.point(idx % g.nx, idx / g.nx);
    rep.pass = std::isfinite(rmax) && rmin > 0.0;
    std::ostringstream det;
    det << band.used.size() << " band nodes; raw band infimum / r = " << inf_u / r;
    rep.detail = det.str();
    return rep;
}

std::vector<std::array<double, 2>> band_scatter(
    const GridFunction& u, const Domain& d, const Vec2& w, double r,
    std::optional<std::array<double, 2>> d_window) {
    require_on_boundary(d, w, "band_scatter");
    if (!(r > 0.0)) throw DomainError("band_scatter: need r > 0");
    const double d_lo = d_window ? (*d_window)[0] : r;
    const double d_hi = d_window ? (*d_window)[1] : 3.0 * r;
    if (!(0.0 < d_lo && d_lo < d_hi))
        throw DomainError("band_scatter: need 0 < d_lo < d_hi");
    const BandNodes band =
        collect_band(u, w, d_lo, d_hi, 2.0 * d_hi, "band_scatter");
    std::vector<std::array<double, 2>> pairs;
    pairs.reserve(band.used.size());
    for (std::size_t k = 0; k < band.used.size(); ++k)
        pairs.push_back({band.dist[k], u[band.used[k]] / band.dist[k]});
    return pairs;
}

VerificationReport boundary_harnack_quotient(const GridFunction& u,
                                             const GridFunction& v,
                                             const Domain& d, const Vec2& w,
                                             double r, double c_cap) {
    if (u.grid_ptr() != v.grid_ptr())
        throw DomainError("boundary_harnack_quotient: fields must share a grid");
    require_on_boundary(d, w, "boundary_harnack_quotient");
    if (!(r > 0.0)) throw DomainError("boundary_harnack_quotient: need r > 0");
    if (!(c_cap >= 1.0))
        throw DomainError("boundary_harnack_quotient: cap must be >= 1");
    const double h = u.h();
    require_vanishing(u, d, w, 6.0 * r, 10.0 * h * h, "boundary_harnack_quotient");
    require_vanishing(v, d, w, 6.0 * r, 10.0 * h * h, "boundary_harnack_quotient");

    const Grid& g = u.grid();
    const double thick = d.thinnest_width(); // nodes can't be deeper than this
    const BandNodes band = collect_band(u, w, 0.0, thick, r,
                                        "boundary_harnack_quotient");
    double qmin = std::numeric_limits<double>::infinity();
    double qmax = -std::numeric_limits<double>::infinity();
    std::size_t argmax = 0;
    for (std::size_t k = 0; k < band.used.size(); ++k) {
        const int idx = band.used[k];
        if (!(v[idx] > 0.0)) {
            std::ostringstream msg;
            msg << "boundary_harnack_quotient: second field is not strictly "
                   "positive at ("
                << g.point(idx % g.nx, idx / g.nx)[0] << ", "
                << g.point(idx % g.nx, idx / g.nx)[1] << ")";
            throw PositivityError(msg.str());
        }
        const double q = u[idx] / v[idx];
        if (q > qmax) {
            qmax = q;
            argmax = k;
        }
        qmin = std::min(qmin, q);
    }

    VerificationReport rep;
    rep.check = "boundary-harnack";
    rep.h = h;
    rep.band_radius = r;
    rep.c_low = qmin;
    rep.c_high = qmax;
    rep.measured = qmax;
    rep.margin = std::min(qmin - 1.0 / c_cap, c_cap - qmax);
    rep.pass = rep.margin >= 0.0;
    const int idx = band.used[argmax];
    rep.witness = g.point(idx % g.nx, idx / g.nx);
    std::ostringstream det;
    det << band.used.size() << " band nodes; quotient within [" << qmin << ", "
        << qmax << "], cap " << c_cap;
    rep.detail = det.str();
    return rep;
}

VerificationReport compare_with_barrier(
    const GridFunction& u, const RadialBarrier& b,
    std::optional<std::array<double, 2>> region) {
    if (b.n != 2 || b.center.size() != 2)
        throw DomainError("compare_with_barrier: barrier must be planar");
    const double lo = region ? (*region)[0] : b.r;
    const double hi = region ? (*region)[1] : b.k * b.r;
    if (!(b.r <= lo * (1.0 + 1e-12)) || !(lo < hi) ||
        !(hi <= b.k * b.r * (1.0 + 1e-12)))
        throw DomainError("compare_with_barrier: region must lie within the "
                          "barrier's annulus");
    const Grid& g = u.grid();
    const double h = g.h;
    const double allowance = 10.0 * h * h;
    const Vec2 c{b.center[0], b.center[1]};
    const bool super_side = b.kind == BarrierKind::NegatedSub ||
                            b.kind == BarrierKind::GrowingSuper ||
                            b.kind == BarrierKind::ExpSuper;

    auto in_region = [&](int i, int j) {
        const int idx = g.index(i, j);
        if (!g.inside(idx)) return false;
        const double rho = std::sqrt(dist2(g.point(i, j), c));
        return rho > lo && rho < hi;
    };

    VerificationReport rep;
    rep.check = "barrier-comparison";
    rep.h = h;
    rep.band_radius = b.r;
    double min_gap = std::numeric_limits<double>::infinity();
    int count = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!in_region(i, j)) continue;
            ++count;
            const Vec2 x = g.point(i, j);
            const double rho = std::sqrt(dist2(x, c));

            bool ring = false;
            for (int k = 0; k < 4 && !ring; ++k)
                ring = !in_region(i + kNeighborDi[k], j + kNeighborDj[k]);
            if (ring) {
                // Ordering hypothesis on the region's relative boundary,
                // sampled through the radial projection onto the nearer rim.
                const double rim = (rho - lo < hi - rho) ? lo : hi;
                const Vec2 proj{c[0] + rim * (x[0] - c[0]) / rho,
                                c[1] + rim * (x[1] - c[1]) / rho};
                const double u_rim = u.sample(proj);
                const double b_rim = barrier_radial_value(b, rim);
                const bool ok = super_side ? u_rim <= b_rim + allowance
                                           : u_rim >= b_rim - allowance;
                if (!ok) {
                    std::ostringstream msg;
                    msg << "compare_with_barrier: ordering fails on the region "
                           "boundary at radius "
                        << rim << " (field " << u_rim << " vs barrier " << b_rim
                        << ")";
                    throw HypothesisError(msg.str());
                }
            }

            const double bv =
                eval_barrier(b, std::vector<double>{x[0], x[1]}).value;
            const double gap = super_side ? bv - u[g.index(i, j)]
                                          : u[g.index(i, j)] - bv;
            if (gap < min_gap) {
                min_gap = gap;
                rep.witness = x;
            }
        }
    if (count == 0)
        throw ResolutionError("compare_with_barrier: no grid node falls in the "
                              "comparison region");

    rep.measured = min_gap;
    rep.margin = min_gap - allowance;
    // Strict ordering: clearing the discretization allowance is required, so
    // a field equal to the barrier's own sample does not pass.
    rep.pass = rep.margin > 0.0;
    std::ostringstream det;
    det << count << " region nodes; minimal "
        << (super_side ? "barrier-minus-field" : "field-minus-barrier")
        << " gap " << min_gap << " vs allowance " << allowance;
    rep.detail = det.str();
    return rep;
}

bool ratios_stable(const VerificationReport& coarse,
                   const VerificationReport& fine, double rel_tol) {
    if (!(rel_tol > 0.0)) throw DomainError("ratios_stable: need rel_tol > 0");
    const auto close = [rel_tol](double a, double b) {
        return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
    };
    return close(coarse.c_low, fine.c_low) && close(coarse.c_high, fine.c_high);
}

} // namespace barrierlab

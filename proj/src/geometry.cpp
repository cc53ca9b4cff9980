#include "barrierlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "barrierlab/numerics.hpp"
#include "barrierlab/parallel.hpp"

namespace barrierlab {

namespace {

double norm2(const Vec2& v) { return std::hypot(v[0], v[1]); }

Vec2 sub(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }

Vec2 axpy(const Vec2& a, double t, const Vec2& dir) {
    return {a[0] + t * dir[0], a[1] + t * dir[1]};
}

/// Closest point of the segment [a, b] to x.
Vec2 segment_closest(const Vec2& a, const Vec2& b, const Vec2& x) {
    const Vec2 ab = sub(b, a);
    const double len2 = ab[0] * ab[0] + ab[1] * ab[1];
    double t = len2 > 0.0 ? ((x[0] - a[0]) * ab[0] + (x[1] - a[1]) * ab[1]) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return axpy(a, t, ab);
}

} // namespace

Domain Domain::ball(Vec2 center, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw DomainError("Domain::ball: radius must be positive");
    Domain d;
    d.shape_ = ShapeKind::Ball;
    d.center_ = center;
    d.radius_ = radius;
    d.r_b_ = radius;
    return d;
}

Domain Domain::annulus(Vec2 center, double r_inner, double r_outer) {
    if (!(0.0 < r_inner && r_inner < r_outer) || !std::isfinite(r_outer))
        throw DomainError("Domain::annulus: need 0 < r_inner < r_outer");
    Domain d;
    d.shape_ = ShapeKind::Annulus;
    d.center_ = center;
    d.r_in_ = r_inner;
    d.r_out_ = r_outer;
    d.r_b_ = std::min(r_inner, 0.5 * (r_outer - r_inner));
    return d;
}

Domain Domain::stadium(Vec2 a, Vec2 b, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw DomainError("Domain::stadium: radius must be positive");
    if (norm2(sub(b, a)) <= 0.0)
        throw DomainError("Domain::stadium: degenerate axis segment");
    Domain d;
    d.shape_ = ShapeKind::Stadium;
    d.a_ = a;
    d.b_ = b;
    d.center_ = {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
    d.radius_ = radius;
    d.r_b_ = radius;
    return d;
}

double Domain::thinnest_width() const {
    switch (shape_) {
    case ShapeKind::Ball: return 2.0 * radius_;
    case ShapeKind::Annulus: return r_out_ - r_in_;
    case ShapeKind::Stadium: return 2.0 * radius_;
    }
    throw DomainError("Domain: unexpected shape");
}

Vec2 Domain::bounding_lo() const {
    switch (shape_) {
    case ShapeKind::Ball: return {center_[0] - radius_, center_[1] - radius_};
    case ShapeKind::Annulus: return {center_[0] - r_out_, center_[1] - r_out_};
    case ShapeKind::Stadium:
        return {std::min(a_[0], b_[0]) - radius_, std::min(a_[1], b_[1]) - radius_};
    }
    throw DomainError("Domain: unexpected shape");
}

Vec2 Domain::bounding_hi() const {
    switch (shape_) {
    case ShapeKind::Ball: return {center_[0] + radius_, center_[1] + radius_};
    case ShapeKind::Annulus: return {center_[0] + r_out_, center_[1] + r_out_};
    case ShapeKind::Stadium:
        return {std::max(a_[0], b_[0]) + radius_, std::max(a_[1], b_[1]) + radius_};
    }
    throw DomainError("Domain: unexpected shape");
}

double signed_distance(const Domain& d, const Vec2& x) {
    if (!std::isfinite(x[0]) || !std::isfinite(x[1]))
        throw DomainError("signed_distance: point must be finite");
    switch (d.shape()) {
    case ShapeKind::Ball: return norm2(sub(x, d.center())) - d.radius();
    case ShapeKind::Annulus: {
        const double rho = norm2(sub(x, d.center()));
        return std::max(d.inner_radius() - rho, rho - d.outer_radius());
    }
    case ShapeKind::Stadium:
        return norm2(sub(x, segment_closest(d.segment_a(), d.segment_b(), x))) -
               d.radius();
    }
    throw DomainError("signed_distance: unexpected shape");
}

Vec2 outward_normal(const Domain& d, const Vec2& x) {
    switch (d.shape()) {
    case ShapeKind::Ball: {
        const Vec2 v = sub(x, d.center());
        const double r = norm2(v);
        if (r < 1e-14) return {1.0, 0.0}; // center: any direction works
        return {v[0] / r, v[1] / r};
    }
    case ShapeKind::Annulus: {
        const Vec2 v = sub(x, d.center());
        const double rho = norm2(v);
        if (rho < 1e-14) return {1.0, 0.0};
        const double mid = 0.5 * (d.inner_radius() + d.outer_radius());
        const double s = rho < mid ? -1.0 : 1.0; // inner circle: outward is inward-radial
        return {s * v[0] / rho, s * v[1] / rho};
    }
    case ShapeKind::Stadium: {
        const Vec2 c = segment_closest(d.segment_a(), d.segment_b(), x);
        const Vec2 v = sub(x, c);
        const double r = norm2(v);
        if (r < 1e-14) {
            // On the axis: perpendicular to the segment.
            const Vec2 ab = sub(d.segment_b(), d.segment_a());
            const double len = norm2(ab);
            return {-ab[1] / len, ab[0] / len};
        }
        return {v[0] / r, v[1] / r};
    }
    }
    throw DomainError("outward_normal: unexpected shape");
}

Vec2 boundary_projection(const Domain& d, const Vec2& x) {
    const double sd = signed_distance(d, x);
    const Vec2 n = outward_normal(d, x);
    return {x[0] - sd * n[0], x[1] - sd * n[1]};
}

Vec2 boundary_point(const Domain& d, double s) {
    s -= std::floor(s);
    switch (d.shape()) {
    case ShapeKind::Ball: {
        const double t = 2.0 * M_PI * s;
        return {d.center()[0] + d.radius() * std::cos(t),
                d.center()[1] + d.radius() * std::sin(t)};
    }
    case ShapeKind::Annulus: {
        // First half of the parameter runs the outer circle, second the inner.
        const bool outer = s < 0.5;
        const double t = 4.0 * M_PI * (outer ? s : s - 0.5);
        const double r = outer ? d.outer_radius() : d.inner_radius();
        return {d.center()[0] + r * std::cos(t), d.center()[1] + r * std::sin(t)};
    }
    case ShapeKind::Stadium: {
        const Vec2 a = d.segment_a(), b = d.segment_b();
        const Vec2 ab = sub(b, a);
        const double L = norm2(ab);
        const double R = d.radius();
        const Vec2 u{ab[0] / L, ab[1] / L};
        const Vec2 n{-u[1], u[0]};
        const double per = 2.0 * L + 2.0 * M_PI * R;
        double t = s * per;
        if (t < L) // straight edge on the +n side, a → b
            return {a[0] + t * u[0] + R * n[0], a[1] + t * u[1] + R * n[1]};
        t -= L;
        if (t < M_PI * R) { // cap around b, from +n to −n
            const double ang = t / R;
            const Vec2 dir{std::cos(ang) * n[0] + std::sin(ang) * u[0],
                           std::cos(ang) * n[1] + std::sin(ang) * u[1]};
            return {b[0] + R * dir[0], b[1] + R * dir[1]};
        }
        t -= M_PI * R;
        if (t < L) // straight edge on the −n side, b → a
            return {b[0] - t * u[0] - R * n[0], b[1] - t * u[1] - R * n[1]};
        t -= L;
        const double ang = t / R; // cap around a, from −n back to +n
        const Vec2 dir{-std::cos(ang) * n[0] - std::sin(ang) * u[0],
                       -std::cos(ang) * n[1] - std::sin(ang) * u[1]};
        return {a[0] + R * dir[0], a[1] + R * dir[1]};
    }
    }
    throw DomainError("boundary_point: unexpected shape");
}

ContactPoints contact_points(const Domain& d, const Vec2& eta) {
    if (std::abs(signed_distance(d, eta)) > 1e-8)
        throw DomainError("contact_points: point is not on the boundary");
    const double rb = d.ball_radius();
    const Vec2 n = outward_normal(d, eta);
    ContactPoints cp{{eta[0] - rb * n[0], eta[1] - rb * n[1]},
                     {eta[0] + rb * n[0], eta[1] + rb * n[1]}};

    // The center of a tangent ball lies at exactly ball-radius distance from
    // the boundary (inside for the interior ball, outside for the exterior).
    if (std::abs(signed_distance(d, cp.interior) + rb) > 1e-9 ||
        std::abs(signed_distance(d, cp.exterior) - rb) > 1e-9)
        throw NumericalError("contact_points: tangent ball centers failed the "
                             "distance identity");
    // Tangency by sampling: no sampled boundary point may intrude into either
    // ball.
    for (int i = 0; i < 720; ++i) {
        const Vec2 p = boundary_point(d, (i + 0.5) / 720.0);
        if (norm2(sub(p, cp.interior)) < rb - 1e-8 ||
            norm2(sub(p, cp.exterior)) < rb - 1e-8)
            throw NumericalError("contact_points: sampled boundary point intrudes "
                                 "into a tangent ball");
    }
    return cp;
}

int Grid::count(NodeClass c) const {
    int n = 0;
    for (NodeClass cl : classes) n += cl == c;
    return n;
}

Grid make_grid(const Domain& d, double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw DomainError("make_grid: spacing must be positive");
    if (d.thinnest_width() / h < 11.0) {
        std::ostringstream msg;
        msg << "make_grid: spacing " << h << " leaves fewer than 10 interior nodes "
            << "across the thinnest width " << d.thinnest_width();
        throw ResolutionError(msg.str());
    }

    Grid g;
    g.domain = d;
    g.h = h;
    const Vec2 blo = d.bounding_lo();
    const Vec2 bhi = d.bounding_hi();
    g.lo = {blo[0] - 2.0 * h, blo[1] - 2.0 * h};
    g.nx = static_cast<int>(std::ceil((bhi[0] - g.lo[0]) / h)) + 3;
    g.ny = static_cast<int>(std::ceil((bhi[1] - g.lo[1]) / h)) + 3;

    const std::size_t total = static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny);
    g.sdist.resize(total);
    g.classes.assign(total, NodeClass::Exterior);
    g.cut_index.assign(total, -1);

    parallel_chunks(total, [&](std::size_t lo_i, std::size_t hi_i) {
        for (std::size_t idx = lo_i; idx < hi_i; ++idx) {
            const int i = static_cast<int>(idx) % g.nx;
            const int j = static_cast<int>(idx) / g.nx;
            g.sdist[idx] = signed_distance(d, g.point(i, j));
        }
    });

    static constexpr int dx[4] = {1, -1, 0, 0};
    static constexpr int dy[4] = {0, 0, 1, -1};

    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t idx = static_cast<std::size_t>(g.index(i, j));
            if (!(g.sdist[idx] < 0.0)) continue;
            bool cut = false;
            for (int k = 0; k < 4; ++k) {
                const int ni = i + dx[k], nj = j + dy[k];
                // The two-cell apron guarantees inside nodes never touch the
                // array edge.
                cut = cut || !(g.sdist[static_cast<std::size_t>(g.index(ni, nj))] < 0.0);
            }
            g.classes[idx] = cut ? NodeClass::BoundaryAdjacent : NodeClass::Interior;
            if (!cut) continue;

            CutNode cn;
            const Vec2 x0 = g.point(i, j);
            for (int k = 0; k < 4; ++k) {
                const int ni = i + dx[k], nj = j + dy[k];
                const double sn = g.sdist[static_cast<std::size_t>(g.index(ni, nj))];
                if (sn < 0.0) continue; // whole arm
                if (sn == 0.0) {
                    // The neighbor sits exactly on the boundary: it is the
                    // crossing, and the arm degenerates to a whole edge whose
                    // far end carries Dirichlet data.
                    cn.theta[static_cast<std::size_t>(k)] = 1.0;
                    continue;
                }
                // Interpolate between the stored node positions, so the
                // bracket endpoints reproduce the signed distances that
                // drove the classification bit for bit. Recomputing the far
                // end as x0 + h·dir can round to the other side of the
                // boundary when a node sits within one ulp of it.
                const Vec2 x1 = g.point(ni, nj);
                const Vec2 dxv{x1[0] - x0[0], x1[1] - x0[1]};
                cn.theta[static_cast<std::size_t>(k)] = num::bisect(
                    [&](double t) { return signed_distance(d, axpy(x0, t, dxv)); },
                    0.0, 1.0, 1e-12);
            }
            cn.projection = boundary_projection(d, x0);
            g.cut_index[idx] = static_cast<int>(g.cuts.size());
            g.cuts.push_back(cn);
        }
    }
    return g;
}

BoundaryBand boundary_band(const Domain& d, const Grid& g, const Vec2& w, double r) {
    if (std::abs(signed_distance(d, w)) > 1e-8)
        throw DomainError("boundary_band: anchor is not on the boundary");
    if (!(r > 0.0) || !std::isfinite(r))
        throw DomainError("boundary_band: band radius must be positive");

    BoundaryBand band;
    band.anchor = w;
    band.r = r;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const int idx = g.index(i, j);
            if (!g.inside(idx)) continue;
            const double dist = -g.sdist[static_cast<std::size_t>(idx)];
            if (!(dist > r && dist < 3.0 * r)) continue;
            if (norm2(sub(g.point(i, j), w)) >= 6.0 * r) continue;
            band.nodes.push_back(idx);
        }
    }
    if (band.nodes.empty())
        throw ResolutionError("boundary_band: no grid node satisfies the band "
                              "predicate (band too thin or radius too large)");
    return band;
}

} // namespace barrierlab

#pragma once

///
/// Planar domains with exact signed distance (ball, annulus, stadium — all of
/// them satisfy interior and exterior tangent-ball conditions with a uniform
/// radius), the grids the solver runs on, and boundary bands for ratio
/// statistics.
///
/// Grid computations are fixed to two dimensions; the barrier machinery is
/// dimension-generic analytically and never needs a grid.
///

#include <array>
#include <cstdint>
#include <vector>

#include "barrierlab/errors.hpp"

namespace barrierlab {

using Vec2 = std::array<double, 2>;

enum class ShapeKind { Ball, Annulus, Stadium };

/// A domain given by an exact signed distance function (negative inside).
class Domain {
public:
    /// Default-constructs the unit ball; factories below build everything
    /// else.
    Domain() = default;

    static Domain ball(Vec2 center, double radius);
    static Domain annulus(Vec2 center, double r_inner, double r_outer);
    /// All points within `radius` of the segment [a, b].
    static Domain stadium(Vec2 a, Vec2 b, double radius);

    ShapeKind shape() const { return shape_; }
    /// Uniform radius for which interior and exterior tangent balls exist at
    /// every boundary point.
    double ball_radius() const { return r_b_; }
    Vec2 center() const { return center_; }
    double radius() const { return radius_; }       ///< ball/stadium radius
    double inner_radius() const { return r_in_; }   ///< annulus only
    double outer_radius() const { return r_out_; }  ///< annulus only
    Vec2 segment_a() const { return a_; }           ///< stadium only
    Vec2 segment_b() const { return b_; }           ///< stadium only

    /// Width of the thinnest cross-section (resolution checks).
    double thinnest_width() const;
    Vec2 bounding_lo() const;
    Vec2 bounding_hi() const;

private:
    ShapeKind shape_ = ShapeKind::Ball;
    Vec2 center_{0.0, 0.0};
    double radius_ = 1.0;
    double r_in_ = 0.0, r_out_ = 0.0;
    Vec2 a_{0.0, 0.0}, b_{0.0, 0.0};
    double r_b_ = 1.0;
};

/// Exact signed distance: negative inside, positive outside, zero on the
/// boundary.
double signed_distance(const Domain& d, const Vec2& x);

/// Unit outward normal at (or near) the boundary; defined wherever x is off
/// the medial axis.
Vec2 outward_normal(const Domain& d, const Vec2& x);

/// The closest boundary point to x.
Vec2 boundary_projection(const Domain& d, const Vec2& x);

/// A point on the boundary, parametrized by s ∈ [0, 1) running over the whole
/// boundary (both circles for the annulus, arcs and straights for the
/// stadium). Used for sampling-based tangency and vanishing checks.
Vec2 boundary_point(const Domain& d, double s);

struct ContactPoints {
    Vec2 interior; ///< center of the tangent ball inside the domain
    Vec2 exterior; ///< center of the tangent ball outside
};

/// Tangent ball centers at distance ball_radius() along the normal through a
/// boundary point eta; the tangency is re-verified by boundary sampling.
ContactPoints contact_points(const Domain& d, const Vec2& eta);

enum class NodeClass : std::uint8_t { Exterior, Interior, BoundaryAdjacent };

/// A boundary-adjacent node's cut data: per-arm crossing fractions and the
/// closest boundary point.
struct CutNode {
    /// Fraction of the grid spacing at which each arm (+x, −x, +y, −y) meets
    /// the boundary; 1 when the arm is whole.
    std::array<double, 4> theta{1.0, 1.0, 1.0, 1.0};
    Vec2 projection{0.0, 0.0};
};

struct Grid {
    Domain domain;
    double h = 0.0;
    Vec2 lo{0.0, 0.0}; ///< position of node (0, 0)
    int nx = 0, ny = 0;
    std::vector<NodeClass> classes; ///< nx*ny, row-major with x fastest
    std::vector<double> sdist;      ///< signed distance per node
    std::vector<int> cut_index;     ///< −1, or index into `cuts`
    std::vector<CutNode> cuts;

    int index(int i, int j) const { return j * nx + i; }
    Vec2 point(int i, int j) const {
        return {lo[0] + i * h, lo[1] + j * h};
    }
    /// Nodes inside the domain (interior and boundary-adjacent) are solver
    /// unknowns.
    bool inside(int idx) const { return classes[static_cast<std::size_t>(idx)] != NodeClass::Exterior; }
    int count(NodeClass c) const;
};

/// Classify all nodes of an axis-aligned grid covering the domain, locate the
/// boundary crossing of every cut arm (bisection on the signed distance) and
/// the boundary projection of every boundary-adjacent node.
Grid make_grid(const Domain& d, double h);

/// Γ = {x ∈ Ω : r < dist(x, ∂Ω) < 3r} ∩ B(w, 6r), as grid nodes.
struct BoundaryBand {
    Vec2 anchor{0.0, 0.0};
    double r = 0.0;
    std::vector<int> nodes; ///< flat grid indices
};

BoundaryBand boundary_band(const Domain& d, const Grid& g, const Vec2& w, double r);

} // namespace barrierlab

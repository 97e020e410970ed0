#pragma once

#include "hodomap/common.hpp"

#include <memory>
#include <optional>
#include <string>
#include <cstdint>
#include <vector>

namespace hodomap {

enum class Smoothness { Lipschitz, C1, C1Dini, C1DMO };

std::string to_string(Smoothness s);

/// Local boundary graph y = phi(x) with phi(0) = 0.
struct GraphParametrization {
  std::string name;
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  Smoothness smoothness = Smoothness::C1;
  std::vector<double> kinks;  ///< abscissae where phi is not differentiable
};

/// x / |log|x||^{1/2} on |x| < 1/2, extended by 0 at the origin.
double dmo_phi(double x);
double dmo_dphi(double x);

GraphParametrization flat_graph();
GraphParametrization dmo_graph();
GraphParametrization corner_graph();  ///< phi(x) = |x|
/// Piecewise linear graph through nodes sorted by x; must pass through 0.
GraphParametrization polyline_graph(std::vector<Point> nodes);

/// Nodal pieces carry the zero Dirichlet condition (the part of the boundary
/// of Omega inside the localizing ball); free pieces close the local picture.
enum class BoundaryRole { Nodal, Free };

class Segment {
 public:
  Segment(std::function<Point(double)> at, std::function<Point(double)> velocity,
          BoundaryRole role, std::string label);

  static Segment line(Point a, Point b, BoundaryRole role);
  static Segment arc(Point center, double radius, double theta0, double theta1, BoundaryRole role);
  static Segment ellipse(Point center, double a, double b, double theta0, double theta1,
                         BoundaryRole role);
  static Segment graph(std::shared_ptr<const GraphParametrization> g, double x0, double x1,
                       BoundaryRole role);

  Point at(double t) const { return at_(t); }
  Point velocity(double t) const { return velocity_(t); }
  Point start() const { return at_(0.0); }
  Point end() const { return at_(1.0); }
  double length() const { return panel_s_.back(); }
  /// Parameter t in [0,1] at arc length s in [0, length()].
  double parameter_at(double s) const;
  BoundaryRole role() const { return role_; }
  const std::string& label() const { return label_; }

 private:
  void build_arclength_table();

  std::function<Point(double)> at_, velocity_;
  BoundaryRole role_;
  std::string label_;
  std::vector<double> panel_t_, panel_s_;
};

/// Junction between consecutive segments. `turn` is the signed turning angle
/// of the tangent (positive = left turn for a counterclockwise curve).
struct Knot {
  Point point;
  double s = 0;
  double turn = 0;
  std::size_t incoming = 0, outgoing = 0;
  Point tangent_in, tangent_out;

  bool is_corner() const;
  double interior_angle() const;  ///< pi - turn
  Point inward_bisector() const;
};

/// Closed, counterclockwise, piecewise smooth Jordan curve. Nodal segments
/// come first, so the nodal part is the arc-length interval [0, nodal_length()].
class BoundaryCurve {
 public:
  explicit BoundaryCurve(std::vector<Segment> segments);

  double length() const { return offsets_.back(); }
  double nodal_length() const { return nodal_length_; }
  std::size_t size() const { return segments_.size(); }
  const Segment& segment(std::size_t i) const { return segments_[i]; }
  double segment_offset(std::size_t i) const { return offsets_[i]; }
  std::size_t segment_index(double s) const;

  Point point_at(double s) const;
  Point tangent_at(double s) const;  ///< unit tangent
  Point normal_at(double s) const;   ///< outward unit normal
  const std::vector<Knot>& knots() const { return knots_; }

  /// Ordered closed polyline (first point not repeated) with every knot as a vertex.
  std::vector<Point> polyline(std::size_t n) const;
  double signed_area() const;

 private:
  std::vector<Segment> segments_;
  std::vector<double> offsets_;
  std::vector<Knot> knots_;
  double nodal_length_ = 0;
};

struct BoundarySample {
  Point point, tangent, normal;
  double s = 0;       ///< arc-length coordinate of the sample
  double weight = 0;  ///< arc length of the cell the sample represents
  std::size_t segment = 0;
  bool near_corner = false;
};

class Domain {
 public:
  Domain(BoundaryCurve boundary, Point anchor, double clip_radius, Smoothness smoothness,
         std::string kind);

  const BoundaryCurve& boundary() const { return boundary_; }
  Point anchor() const { return anchor_; }
  double anchor_s() const { return anchor_s_; }
  double clip_radius() const { return clip_radius_; }
  Smoothness smoothness() const { return smoothness_; }
  const std::string& kind() const { return kind_; }
  Point centroid() const { return centroid_; }
  Rect bounding_box() const { return bbox_; }

  /// Winding-number membership test against the boundary polyline.
  bool inside(Point z) const;
  double distance_to_boundary(Point z) const;
  /// Point just inside the domain next to the anchor (inward normal, or the
  /// corner bisector when the anchor is a knot).
  Point anchor_inward(double step) const;
  const std::vector<Point>& polyline() const { return polyline_; }

  /// Quasi-random interior points with distance >= margin from the boundary.
  std::vector<Point> interior_samples(std::size_t n, double margin,
                                      unsigned long long seed = 0) const;

 private:
  BoundaryCurve boundary_;
  Point anchor_;
  double anchor_s_ = 0;
  double clip_radius_;
  Smoothness smoothness_;
  std::string kind_;
  std::vector<Point> polyline_;
  Point centroid_;
  Rect bbox_;
  // segment indices per horizontal band of the bounding box, for inside()
  std::vector<std::vector<std::uint32_t>> bands_;
};

/// Graph y = phi(x) over [-half_width, half_width] closed through the unit
/// circle by two vertical joins and a circular arc. Anchor at the origin.
Domain make_graph_domain(const GraphParametrization& phi, double half_width);
Domain make_halfdisk();
Domain make_disk();
/// Polygon given counterclockwise; the first `nodal_edges` edges are nodal.
Domain make_polygon_domain(std::vector<Point> vertices, std::size_t nodal_edges, Point anchor);
Domain make_ellipse(double a, double b);

/// Sampled supremum of (shortest boundary arc)/(chord) over quasi-random pairs.
double chord_arc_constant(const Domain& domain, std::size_t n_pairs);

std::vector<BoundarySample> boundary_sample(const Domain& domain, std::size_t n);
/// Samples restricted to the nodal part (same cell rule, only nodal segments).
std::vector<BoundarySample> nodal_boundary_sample(const Domain& domain, std::size_t n);

/// Invariant checks for a constructed domain; empty result means all hold.
std::vector<std::string> validate_domain(const Domain& domain);

}  // namespace hodomap

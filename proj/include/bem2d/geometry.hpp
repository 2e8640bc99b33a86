#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "bem2d/vec2.hpp"

namespace bem2d {

enum class CurveRole { Outer, Hole };

// A closed boundary curve sampled at 2n equispaced parameter nodes
// t_j = pi*j/n.  Normals always point out of the solution domain: away
// from the enclosed region on the outer curve, into the enclosed region
// on a hole.  The curvature carries the sign that makes the double-layer
// kernel tend to curvature/(4*pi) on the diagonal.
struct CurveComponent {
  CurveRole role = CurveRole::Outer;
  std::vector<double> t;
  std::vector<Vec2> point;
  std::vector<Vec2> velocity;
  std::vector<Vec2> normal;
  std::vector<double> speed;
  std::vector<double> curvature;
  Vec2 interior_reference;  // a point strictly inside the region enclosed by the curve
  double diameter = 0.0;

  int node_count() const { return static_cast<int>(t.size()); }
  int half_order() const { return node_count() / 2; }  // the n of the 2n nodes
  double weight(int j) const;                          // pi/n * |x'(t_j)|
};

// Trigonometric series for a closed curve:
//   x1(t) = sum_k cos_x[k] cos(k t) + sum_{k>=1} sin_x[k] sin(k t)
// and likewise for x2; index 0 of the sin arrays is ignored.
struct FourierCoeffs {
  std::vector<double> cos_x, sin_x, cos_y, sin_y;
};

CurveComponent make_circle(Vec2 center, double radius, int n_nodes, CurveRole role);
CurveComponent make_fourier_curve(const FourierCoeffs& coeffs, int n_nodes, CurveRole role);

Vec2 fourier_point(const FourierCoeffs& c, double t);
Vec2 fourier_velocity(const FourierCoeffs& c, double t);
Vec2 fourier_acceleration(const FourierCoeffs& c, double t);

// Discrete winding number of the curve around p, by trapezoidal quadrature
// of the angle form.  Throws if p is too close to the curve for the result
// to round cleanly to an integer.
int winding_number(const CurveComponent& curve, Vec2 p);

// Arclength of the component (sum of quadrature weights).
double boundary_measure(const CurveComponent& c);

class Domain {
 public:
  const CurveComponent& component(int j) const { return j == 0 ? outer_ : holes_[j - 1]; }
  const CurveComponent& outer() const { return outer_; }
  const std::vector<CurveComponent>& holes() const { return holes_; }
  int component_count() const { return 1 + static_cast<int>(holes_.size()); }
  int hole_count() const { return static_cast<int>(holes_.size()); }
  int node_count() const { return offsets_.back(); }
  int component_offset(int j) const { return offsets_[j]; }
  int component_size(int j) const { return offsets_[j + 1] - offsets_[j]; }
  const std::vector<int>& partition() const { return offsets_; }
  std::uint64_t id() const { return id_; }

  // flat node data, indexed 0 .. node_count()-1
  Vec2 node(int i) const { return nodes_[i]; }
  Vec2 node_normal(int i) const { return normals_[i]; }
  double node_weight(int i) const { return weights_[i]; }
  double node_curvature(int i) const { return curvatures_[i]; }
  double node_param(int i) const { return params_[i]; }
  int component_of(int i) const { return comp_of_[i]; }
  const Eigen::VectorXd& weights() const { return weights_; }

  bool contains(Vec2 p) const;
  double boundary_distance(Vec2 p) const;

  // Points inside the domain, generated by stepping off the boundary along
  // the inward normal by margin * (local feature size).
  std::vector<Vec2> interior_points(double margin = 0.2, int stride = 4) const;

 private:
  friend Domain build_domain(CurveComponent outer, std::vector<CurveComponent> holes);
  Domain() = default;

  CurveComponent outer_;
  std::vector<CurveComponent> holes_;
  std::vector<int> offsets_;
  std::vector<Vec2> nodes_, normals_;
  Eigen::VectorXd weights_;
  std::vector<double> curvatures_, params_;
  std::vector<int> comp_of_;
  std::uint64_t id_ = 0;
};

// Validates containment and disjointness of the components.
Domain build_domain(CurveComponent outer, std::vector<CurveComponent> holes);

}  // namespace bem2d

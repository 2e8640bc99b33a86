#include "bem2d/geometry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bem2d {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t next_domain_id() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

double series_eval(const std::vector<double>& cosc, const std::vector<double>& sinc, double t,
                   int deriv) {
  double acc = 0.0;
  for (std::size_t k = 0; k < cosc.size(); ++k) {
    const double kk = static_cast<double>(k);
    // d^deriv/dt^deriv cos(kt) = k^deriv * cos(kt + deriv*pi/2)
    acc += cosc[k] * std::pow(kk, deriv) * std::cos(kk * t + 0.5 * kPi * deriv);
  }
  for (std::size_t k = 1; k < sinc.size(); ++k) {
    const double kk = static_cast<double>(k);
    acc += sinc[k] * std::pow(kk, deriv) * std::sin(kk * t + 0.5 * kPi * deriv);
  }
  return acc;
}

double max_pairwise_distance(const std::vector<Vec2>& pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      d = std::max(d, distance(pts[i], pts[j]));
  return d;
}

bool reference_ok(const CurveComponent& c, Vec2 p) {
  try {
    return std::abs(winding_number(c, p)) == 1;
  } catch (const std::exception&) {
    return false;
  }
}

// Builds the derived node data (speed, normals, curvature) from samples of
// x, x' and x'', runs the validity checks and finds an interior reference
// point.  `hint` is tried first as the reference.
CurveComponent finalize_curve(CurveRole role, std::vector<double> t, std::vector<Vec2> x,
                              std::vector<Vec2> v, const std::vector<Vec2>& a, Vec2 hint,
                              bool have_hint) {
  const int nn = static_cast<int>(t.size());
  if (nn < 16 || nn % 2 != 0)
    throw std::invalid_argument("curve node count must be even and at least 16");

  CurveComponent c;
  c.role = role;
  c.t = std::move(t);
  c.point = std::move(x);
  c.velocity = std::move(v);
  c.diameter = max_pairwise_distance(c.point);
  if (c.diameter <= 0.0) throw std::invalid_argument("degenerate curve: all nodes coincide");

  c.speed.resize(nn);
  for (int j = 0; j < nn; ++j) {
    c.speed[j] = norm(c.velocity[j]);
    if (c.speed[j] < 1e-10 * c.diameter)
      throw std::invalid_argument("degenerate curve: zero speed at node " + std::to_string(j));
  }

  // traversal orientation from the signed area
  const int n = nn / 2;
  double area2 = 0.0;
  for (int j = 0; j < nn; ++j) area2 += (kPi / n) * cross(c.point[j], c.velocity[j]);
  const double ccw = area2 > 0.0 ? 1.0 : -1.0;

  // normal out of the enclosed region, flipped into it for holes
  const double flip = (role == CurveRole::Outer) ? ccw : -ccw;
  c.normal.resize(nn);
  c.curvature.resize(nn);
  for (int j = 0; j < nn; ++j) {
    c.normal[j] = flip * Vec2{c.velocity[j].y, -c.velocity[j].x} / c.speed[j];
    c.curvature[j] = -dot(a[j], c.normal[j]) / (c.speed[j] * c.speed[j]);
  }

  // simplicity: non-adjacent nodes must stay apart
  const double threshold = 1e-6 * c.diameter;
  for (int i = 0; i < nn; ++i)
    for (int j = i + 2; j < nn; ++j) {
      if (i == 0 && j == nn - 1) continue;
      if (distance(c.point[i], c.point[j]) < threshold)
        throw std::invalid_argument("curve self-intersection detected near nodes " +
                                    std::to_string(i) + " and " + std::to_string(j));
    }

  if (have_hint && reference_ok(c, hint)) {
    c.interior_reference = hint;
    return c;
  }
  // step from a few nodes toward the enclosed side
  const double inward = (role == CurveRole::Outer) ? -1.0 : 1.0;
  for (double frac : {0.25, 0.1, 0.05, 0.02}) {
    for (int j : {0, nn / 4, nn / 2, 3 * nn / 4}) {
      const Vec2 p = c.point[j] + (inward * frac * c.diameter) * c.normal[j];
      if (reference_ok(c, p)) {
        c.interior_reference = p;
        return c;
      }
    }
  }
  throw std::invalid_argument("could not locate a point inside the curve");
}

}  // namespace

double CurveComponent::weight(int j) const { return kPi / half_order() * speed[j]; }

CurveComponent make_circle(Vec2 center, double radius, int n_nodes, CurveRole role) {
  if (radius <= 0.0) throw std::invalid_argument("circle radius must be positive");
  if (n_nodes < 16 || n_nodes % 2 != 0)
    throw std::invalid_argument("circle node count must be even and at least 16");
  std::vector<double> t(n_nodes);
  std::vector<Vec2> x(n_nodes), v(n_nodes), a(n_nodes);
  for (int j = 0; j < n_nodes; ++j) {
    t[j] = 2.0 * kPi * j / n_nodes;
    const double ct = std::cos(t[j]), st = std::sin(t[j]);
    x[j] = center + radius * Vec2{ct, st};
    v[j] = radius * Vec2{-st, ct};
    a[j] = -radius * Vec2{ct, st};
  }
  return finalize_curve(role, std::move(t), std::move(x), std::move(v), a, center, true);
}

Vec2 fourier_point(const FourierCoeffs& c, double t) {
  return {series_eval(c.cos_x, c.sin_x, t, 0), series_eval(c.cos_y, c.sin_y, t, 0)};
}

Vec2 fourier_velocity(const FourierCoeffs& c, double t) {
  return {series_eval(c.cos_x, c.sin_x, t, 1), series_eval(c.cos_y, c.sin_y, t, 1)};
}

Vec2 fourier_acceleration(const FourierCoeffs& c, double t) {
  return {series_eval(c.cos_x, c.sin_x, t, 2), series_eval(c.cos_y, c.sin_y, t, 2)};
}

CurveComponent make_fourier_curve(const FourierCoeffs& coeffs, int n_nodes, CurveRole role) {
  if (coeffs.cos_x.empty() && coeffs.sin_x.empty())
    throw std::invalid_argument("fourier curve: no x coefficients");
  if (coeffs.cos_y.empty() && coeffs.sin_y.empty())
    throw std::invalid_argument("fourier curve: no y coefficients");
  if (n_nodes < 16 || n_nodes % 2 != 0)
    throw std::invalid_argument("fourier curve node count must be even and at least 16");
  std::vector<double> t(n_nodes);
  std::vector<Vec2> x(n_nodes), v(n_nodes), a(n_nodes);
  for (int j = 0; j < n_nodes; ++j) {
    t[j] = 2.0 * kPi * j / n_nodes;
    x[j] = fourier_point(coeffs, t[j]);
    v[j] = fourier_velocity(coeffs, t[j]);
    a[j] = fourier_acceleration(coeffs, t[j]);
  }
  const Vec2 mean{coeffs.cos_x.empty() ? 0.0 : coeffs.cos_x[0],
                  coeffs.cos_y.empty() ? 0.0 : coeffs.cos_y[0]};
  return finalize_curve(role, std::move(t), std::move(x), std::move(v), a, mean, true);
}

int winding_number(const CurveComponent& curve, Vec2 p) {
  const int nn = curve.node_count();
  double dmin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < nn; ++j) dmin = std::min(dmin, distance(curve.point[j], p));
  if (dmin < 1e-9 * curve.diameter)
    throw std::invalid_argument("winding_number: point too close to the curve");

  double w = 0.0;
  for (int j = 0; j < nn; ++j) {
    const Vec2 r = curve.point[j] - p;
    w += cross(r, curve.velocity[j]) / squared_norm(r);
  }
  w *= (kPi / curve.half_order()) / (2.0 * kPi);
  const double rounded = std::round(w);
  if (std::abs(w - rounded) > 0.1)
    throw std::invalid_argument("winding_number: quadrature did not resolve the point");
  return static_cast<int>(rounded);
}

double boundary_measure(const CurveComponent& c) {
  double len = 0.0;
  for (int j = 0; j < c.node_count(); ++j) len += c.weight(j);
  return len;
}

bool Domain::contains(Vec2 p) const {
  try {
    if (std::abs(winding_number(outer_, p)) != 1) return false;
    for (const auto& h : holes_)
      if (winding_number(h, p) != 0) return false;
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

double Domain::boundary_distance(Vec2 p) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& x : nodes_) d = std::min(d, distance(x, p));
  return d;
}

std::vector<Vec2> Domain::interior_points(double margin, int stride) const {
  std::vector<Vec2> pts;
  for (int c = 0; c < component_count(); ++c) {
    const auto& comp = component(c);
    // clearance to the other components bounds the usable offset
    double clearance = comp.diameter;
    for (int o = 0; o < component_count(); ++o) {
      if (o == c) continue;
      const auto& other = component(o);
      for (const auto& a : comp.point)
        for (const auto& b : other.point) clearance = std::min(clearance, distance(a, b));
    }
    const double feature = std::min(comp.diameter, clearance);
    for (int j = 0; j < comp.node_count(); j += stride) {
      for (double frac : {1.0, 0.6, 0.35}) {
        const Vec2 p = comp.point[j] - (margin * feature * frac) * comp.normal[j];
        if (contains(p)) {
          pts.push_back(p);
          break;
        }
      }
    }
  }
  return pts;
}

Domain build_domain(CurveComponent outer, std::vector<CurveComponent> holes) {
  if (outer.role != CurveRole::Outer)
    throw std::invalid_argument("build_domain: outer component has hole role");
  for (std::size_t k = 0; k < holes.size(); ++k)
    if (holes[k].role != CurveRole::Hole)
      throw std::invalid_argument("build_domain: hole " + std::to_string(k) + " has outer role");

  const double threshold = 1e-6 * outer.diameter;
  auto min_gap = [](const CurveComponent& a, const CurveComponent& b) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& p : a.point)
      for (const auto& q : b.point) d = std::min(d, distance(p, q));
    return d;
  };

  for (std::size_t k = 0; k < holes.size(); ++k) {
    if (min_gap(outer, holes[k]) < threshold)
      throw std::invalid_argument("build_domain: hole " + std::to_string(k) +
                                  " touches the outer curve");
    for (const auto& p : holes[k].point) {
      int w;
      try {
        w = winding_number(outer, p);
      } catch (const std::exception&) {
        throw std::invalid_argument("build_domain: hole " + std::to_string(k) +
                                    " too close to the outer curve");
      }
      if (std::abs(w) != 1)
        throw std::invalid_argument("build_domain: hole " + std::to_string(k) +
                                    " not strictly inside the outer curve");
    }
    for (std::size_t l = 0; l < k; ++l) {
      if (min_gap(holes[l], holes[k]) < threshold)
        throw std::invalid_argument("build_domain: holes " + std::to_string(l) + " and " +
                                    std::to_string(k) + " touch");
      for (const auto& p : holes[k].point) {
        int w;
        try {
          w = winding_number(holes[l], p);
        } catch (const std::exception&) {
          throw std::invalid_argument("build_domain: holes " + std::to_string(l) + " and " +
                                      std::to_string(k) + " too close");
        }
        if (w != 0)
          throw std::invalid_argument("build_domain: holes " + std::to_string(l) + " and " +
                                      std::to_string(k) + " overlap");
      }
    }
  }

  Domain d;
  d.outer_ = std::move(outer);
  d.holes_ = std::move(holes);
  d.offsets_.push_back(0);
  for (int c = 0; c < d.component_count(); ++c)
    d.offsets_.push_back(d.offsets_.back() + d.component(c).node_count());

  const int total = d.offsets_.back();
  d.nodes_.reserve(total);
  d.normals_.reserve(total);
  d.curvatures_.reserve(total);
  d.params_.reserve(total);
  d.comp_of_.reserve(total);
  d.weights_.resize(total);
  int i = 0;
  for (int c = 0; c < d.component_count(); ++c) {
    const auto& comp = d.component(c);
    for (int j = 0; j < comp.node_count(); ++j, ++i) {
      d.nodes_.push_back(comp.point[j]);
      d.normals_.push_back(comp.normal[j]);
      d.curvatures_.push_back(comp.curvature[j]);
      d.params_.push_back(comp.t[j]);
      d.comp_of_.push_back(c);
      d.weights_[i] = comp.weight(j);
    }
  }
  d.id_ = next_domain_id();
  return d;
}

}  // namespace bem2d

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bem2d/vec2.hpp"

namespace bem2d {

// Fundamental solution of the planar Laplacian, s(x,y) = log|x-y|/(2 pi),
// and its directional derivatives.  All three are singular at x == y; on a
// smooth curve the double-layer kernel has the finite diagonal limit
// curvature/(4 pi), which the assembly routines substitute.

inline double fund_solution(Vec2 x, Vec2 y) {
  const double r2 = squared_norm(x - y);
  if (r2 == 0.0) throw std::invalid_argument("fund_solution: coincident points");
  return std::log(r2) / (4.0 * std::numbers::pi);
}

// d/d nu_y s(x,y) = (y-x).nu_y / (2 pi |x-y|^2)
inline double dnu_y_s(Vec2 x, Vec2 y, Vec2 nu_y) {
  const double r2 = squared_norm(x - y);
  if (r2 == 0.0) throw std::invalid_argument("dnu_y_s: coincident points");
  return dot(y - x, nu_y) / (2.0 * std::numbers::pi * r2);
}

// d/d nu_x s(x,y) = (x-y).nu_x / (2 pi |x-y|^2)
inline double dnu_x_s(Vec2 x, Vec2 y, Vec2 nu_x) {
  const double r2 = squared_norm(x - y);
  if (r2 == 0.0) throw std::invalid_argument("dnu_x_s: coincident points");
  return dot(x - y, nu_x) / (2.0 * std::numbers::pi * r2);
}

}  // namespace bem2d

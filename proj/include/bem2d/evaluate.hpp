#pragma once

#include <vector>

#include "bem2d/solvers.hpp"

namespace bem2d {

struct FieldSample {
  Vec2 point;
  double value = 0.0;
  double boundary_distance = 0.0;
};

// Raw trapezoidal quadrature of the layer potentials; no point
// classification.  Accuracy degrades within roughly five node spacings of
// the boundary and is not compensated.
double single_layer_potential(const Domain& d, const Eigen::VectorXd& density, Vec2 x);
double double_layer_potential(const Domain& d, const Eigen::VectorXd& density, Vec2 x);

// Classified evaluation: throws std::domain_error unless x is strictly
// inside the domain.
double eval_single_layer(const Domain& d, const BoundaryFunction& phi, Vec2 x);
double eval_double_layer(const Domain& d, const BoundaryFunction& psi, Vec2 x);

double eval_solution_at(const Domain& d, const RobinSolution& s, Vec2 x);
double eval_solution_at(const Domain& d, const NeumannSolution& s, Vec2 x);
double eval_solution_at(const Domain& d, const DirichletSolution& s, Vec2 x);

template <class Solution>
std::vector<double> eval_solution(const Domain& d, const Solution& s,
                                  const std::vector<Vec2>& pts) {
  std::vector<double> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(eval_solution_at(d, s, p));
  return out;
}

template <class Solution>
std::vector<FieldSample> sample_solution(const Domain& d, const Solution& s,
                                         const std::vector<Vec2>& pts) {
  std::vector<FieldSample> out;
  out.reserve(pts.size());
  for (const auto& p : pts)
    out.push_back({p, eval_solution_at(d, s, p), d.boundary_distance(p)});
  return out;
}

// Max-norm residual of the Robin condition at the nodes, with the normal
// derivative of the double layer taken through the tangential-derivative
// composition d/ds S d/ds; independent of interior evaluation accuracy.
double boundary_residual_robin(const Domain& d, const RobinSolution& s,
                               const BoundaryFunction& h, const BoundaryFunction& g);

double boundary_residual_neumann(const Domain& d, const NeumannSolution& s,
                                 const BoundaryFunction& g);

double boundary_residual_dirichlet(const Domain& d, const DirichletSolution& s,
                                   const BoundaryFunction& f);

// Quadrature of u (du/dnu + h u - g) over the boundary; vanishes for the
// exact solution by the energy identity.
double robin_energy_identity(const Domain& d, const RobinSolution& s, const BoundaryFunction& h,
                             const BoundaryFunction& g);

}  // namespace bem2d

#include "bem2d/evaluate.hpp"

#include <stdexcept>

#include "bem2d/kernels.hpp"

namespace bem2d {

namespace {

void require_interior(const Domain& d, Vec2 x) {
  if (!d.contains(x))
    throw std::domain_error("evaluation point is not strictly inside the domain");
}

Eigen::VectorXd hole_indicator(const Domain& d, int hole) {
  Eigen::VectorXd chi = Eigen::VectorXd::Zero(d.node_count());
  chi.segment(d.component_offset(hole + 1), d.component_size(hole + 1)).setOnes();
  return chi;
}

}  // namespace

double single_layer_potential(const Domain& d, const Eigen::VectorXd& density, Vec2 x) {
  double acc = 0.0;
  for (int i = 0; i < d.node_count(); ++i)
    acc += density[i] * fund_solution(x, d.node(i)) * d.node_weight(i);
  return acc;
}

double double_layer_potential(const Domain& d, const Eigen::VectorXd& density, Vec2 x) {
  double acc = 0.0;
  for (int i = 0; i < d.node_count(); ++i)
    acc += density[i] * dnu_y_s(x, d.node(i), d.node_normal(i)) * d.node_weight(i);
  return acc;
}

double eval_single_layer(const Domain& d, const BoundaryFunction& phi, Vec2 x) {
  require_interior(d, x);
  return single_layer_potential(d, phi.values, x);
}

double eval_double_layer(const Domain& d, const BoundaryFunction& psi, Vec2 x) {
  require_interior(d, x);
  return double_layer_potential(d, psi.values, x);
}

double eval_solution_at(const Domain& d, const RobinSolution& s, Vec2 x) {
  require_interior(d, x);
  return double_layer_potential(d, s.psi.values, x);
}

double eval_solution_at(const Domain& d, const NeumannSolution& s, Vec2 x) {
  require_interior(d, x);
  double u = double_layer_potential(d, s.psi.values, x);
  for (int j = 0; j < d.hole_count(); ++j)
    if (s.charges[j] != 0.0)
      u += s.charges[j] * single_layer_potential(d, hole_indicator(d, j), x);
  return u;
}

double eval_solution_at(const Domain& d, const DirichletSolution& s, Vec2 x) {
  require_interior(d, x);
  return single_layer_potential(d, s.density.values, x) + s.constant;
}

double boundary_residual_robin(const Domain& d, const RobinSolution& s,
                               const BoundaryFunction& h, const BoundaryFunction& g) {
  if (s.psi.size() != d.node_count())
    throw std::invalid_argument("boundary_residual_robin: solution/domain mismatch");
  const Eigen::MatrixXd sm = assemble_single_layer(d).matrix();
  const Eigen::MatrixXd dm = assemble_double_layer_pv(d).matrix();
  const Eigen::MatrixXd dds = assemble_tangential_derivative(d).matrix();
  const Eigen::VectorXd dnu = dds * (sm * (dds * s.psi.values));
  const Eigen::VectorXd trace = 0.5 * s.psi.values + dm * s.psi.values;
  const Eigen::VectorXd res = dnu + h.values.cwiseProduct(trace) - g.values;
  return res.lpNorm<Eigen::Infinity>();
}

double boundary_residual_neumann(const Domain& d, const NeumannSolution& s,
                                 const BoundaryFunction& g) {
  const Eigen::MatrixXd sm = assemble_single_layer(d).matrix();
  const Eigen::MatrixXd km = assemble_adjoint_double_layer(d).matrix();
  const Eigen::MatrixXd dds = assemble_tangential_derivative(d).matrix();
  Eigen::VectorXd dnu = dds * (sm * (dds * s.psi.values));
  for (int j = 0; j < d.hole_count(); ++j) {
    if (s.charges[j] == 0.0) continue;
    const Eigen::VectorXd chi = hole_indicator(d, j);
    dnu += s.charges[j] * Eigen::VectorXd(-0.5 * chi + km * chi);
  }
  return (dnu - g.values).lpNorm<Eigen::Infinity>();
}

double boundary_residual_dirichlet(const Domain& d, const DirichletSolution& s,
                                   const BoundaryFunction& f) {
  const Eigen::MatrixXd sm = assemble_single_layer(d).matrix();
  const Eigen::VectorXd trace = (sm * s.density.values).array() + s.constant;
  return (trace - f.values).lpNorm<Eigen::Infinity>();
}

double robin_energy_identity(const Domain& d, const RobinSolution& s, const BoundaryFunction& h,
                             const BoundaryFunction& g) {
  const Eigen::MatrixXd sm = assemble_single_layer(d).matrix();
  const Eigen::MatrixXd dm = assemble_double_layer_pv(d).matrix();
  const Eigen::MatrixXd dds = assemble_tangential_derivative(d).matrix();
  const Eigen::VectorXd dnu = dds * (sm * (dds * s.psi.values));
  const Eigen::VectorXd trace = 0.5 * s.psi.values + dm * s.psi.values;
  const Eigen::VectorXd integrand =
      trace.cwiseProduct(dnu + h.values.cwiseProduct(trace) - g.values);
  return quadrature_functional(d).integrate(integrand);
}

}  // namespace bem2d

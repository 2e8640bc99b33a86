#include "bem2d/solvers.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

#include "bem2d/kernels.hpp"

namespace bem2d {

namespace {

double rel_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& b) {
  const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
  return (a * x - b).lpNorm<Eigen::Infinity>() / scale;
}

struct SecondKindSolve {
  Eigen::VectorXd phi;
  double residual = 0.0;
  int kernel_dim = 0;
};

// Least-squares solve of (-I/4 + K^2) phi = data with singular values below
// cutoff * sigma_max truncated.  The numerical kernel must have dimension
// m+1: m directions from the (I/2 + K) factor, one from (-I/2 + K).  Kernel
// components only shift the represented field by a constant, which the
// callers normalize away.
SecondKindSolve solve_second_kind(const Domain& d, const Eigen::MatrixXd& k2,
                                  const Eigen::VectorXd& data, double cutoff) {
  const int n = d.node_count();
  Eigen::MatrixXd a = k2;
  a.diagonal().array() -= 0.25;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(cutoff);
  SecondKindSolve out;
  out.kernel_dim = n - static_cast<int>(svd.rank());
  if (out.kernel_dim != d.hole_count() + 1)
    throw std::runtime_error("second-kind solve: numerical kernel dimension " +
                             std::to_string(out.kernel_dim) + ", expected " +
                             std::to_string(d.hole_count() + 1));
  out.phi = svd.solve(data);
  out.residual = rel_residual(a, out.phi, data);
  return out;
}

Eigen::VectorXd hole_indicator(const Domain& d, int hole) {
  Eigen::VectorXd chi = Eigen::VectorXd::Zero(d.node_count());
  chi.segment(d.component_offset(hole + 1), d.component_size(hole + 1)).setOnes();
  return chi;
}

double single_layer_sum(const Domain& d, const Eigen::VectorXd& density, Vec2 x) {
  double acc = 0.0;
  for (int i = 0; i < d.node_count(); ++i)
    acc += density[i] * fund_solution(x, d.node(i)) * d.node_weight(i);
  return acc;
}

}  // namespace

ExceptionalReport detect_exceptional(const Domain& d, double tol) {
  // The decision depends on the outer boundary alone.
  const Domain outer = build_domain(d.outer(), {});
  const int n = outer.node_count();
  const Eigen::MatrixXd s0 = assemble_single_layer(outer).matrix();
  const auto q = quadrature_functional(outer);

  // Equilibrium problem: S0 phi = r on the curve, unit total mass.
  Eigen::MatrixXd a(n + 1, n + 1);
  a.topLeftCorner(n, n) = s0;
  a.col(n).head(n).setConstant(-1.0);
  a.row(n).head(n) = q.w;
  a(n, n) = 0.0;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs[n] = 1.0;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  if (!(lu.rcond() > 1e-15))
    throw std::runtime_error("detect_exceptional: singular augmented system");
  const Eigen::VectorXd x = lu.solve(rhs);

  ExceptionalReport rep;
  rep.robin_constant = x[n];
  rep.equilibrium_density = {x.head(n), {0, n}};
  rep.is_exceptional = std::abs(rep.robin_constant) < tol;
  return rep;
}

RobinSolution solve_robin(const Domain& d, const BoundaryFunction& h, const BoundaryFunction& g,
                          const RobinOptions& opt) {
  const int n = d.node_count();
  if (h.size() != n || g.size() != n)
    throw std::invalid_argument("solve_robin: data length mismatch");
  if (h.values.minCoeff() < 0.0)
    throw std::invalid_argument("solve_robin: negative h entry");

  const auto q = quadrature_functional(d);
  if (q.integrate(h.values) <= 0.0) {
    if (!opt.neumann_mode)
      throw std::invalid_argument(
          "solve_robin: h vanishes identically; set neumann_mode to solve the Neumann problem");
    NeumannSolution ns = solve_neumann(d, g, {opt.svd_cutoff, 1e-10});
    if (ns.info.path != "strict")
      throw std::invalid_argument(
          "solve_robin: zero-h data violates the per-component flux conditions");
    RobinSolution out;
    out.phi = ns.phi;
    out.c = 0.0;
    out.psi = ns.psi;
    out.exceptional = false;
    out.info = ns.info;
    out.info.path = "neumann";
    return out;
  }

  const auto except = detect_exceptional(d, opt.exceptional_tol);
  const Eigen::MatrixXd s = assemble_single_layer(d).matrix();
  const Eigen::MatrixXd dl = assemble_double_layer_pv(d).matrix();
  const Eigen::MatrixXd k = assemble_adjoint_double_layer(d).matrix();
  Eigen::MatrixXd hop = k * k + h.values.asDiagonal() * Eigen::MatrixXd(0.5 * s + dl * s);

  RobinSolution out;
  if (!except.is_exceptional) {
    Eigen::MatrixXd a = std::move(hop);
    a.diagonal().array() -= 0.25;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    out.info.rcond = lu.rcond();
    if (!(out.info.rcond > 0.0) || 1.0 / out.info.rcond > opt.condition_cap)
      throw std::runtime_error("solve_robin: system condition number exceeds the cap");
    out.phi = {lu.solve(g.values), d.partition()};
    out.info.system_residual = rel_residual(a, out.phi.values, g.values);
    out.c = 0.0;
    out.psi = {s * out.phi.values, d.partition()};
    out.exceptional = false;
    out.info.path = "regular";
  } else {
    // Augmented system: the Fredholm rows keep the unknown constant through
    // the h c term, the last row enforces integral(phi) = 0.
    Eigen::MatrixXd a(n + 1, n + 1);
    a.topLeftCorner(n, n) = hop;
    a.topLeftCorner(n, n).diagonal().array() -= 0.25;
    a.col(n).head(n) = h.values;
    a.row(n).head(n) = q.w;
    a(n, n) = 0.0;
    Eigen::VectorXd rhs(n + 1);
    rhs.head(n) = g.values;
    rhs[n] = 0.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    out.info.rcond = lu.rcond();
    if (!(out.info.rcond > 0.0) || 1.0 / out.info.rcond > opt.condition_cap)
      throw std::runtime_error("solve_robin: augmented system condition number exceeds the cap");
    const Eigen::VectorXd x = lu.solve(rhs);
    out.phi = {x.head(n), d.partition()};
    out.c = x[n];
    out.info.system_residual = rel_residual(a, x, rhs);
    out.info.side_condition = std::abs(q.integrate(out.phi.values));
    out.psi = {(s * out.phi.values).array() + out.c, d.partition()};
    out.exceptional = true;
    out.info.path = "exceptional";
  }
  return out;
}

NeumannSolution solve_neumann(const Domain& d, const BoundaryFunction& g,
                              const NeumannOptions& opt) {
  const int n = d.node_count();
  if (g.size() != n) throw std::invalid_argument("solve_neumann: data length mismatch");
  const auto q = quadrature_functional(d);
  const double scale = std::max(1.0, g.values.lpNorm<Eigen::Infinity>());

  if (std::abs(q.integrate(g.values)) > opt.flux_tol * scale * std::max(1.0, q.w.sum()))
    throw std::invalid_argument("solve_neumann: data has nonzero total flux, no solution exists");

  const int m = d.hole_count();
  std::vector<double> fluxes(m + 1);
  bool strict = true;
  for (int j = 0; j <= m; ++j) {
    fluxes[j] = q.component_integral(j, g.values);
    if (std::abs(fluxes[j]) > opt.flux_tol * scale * std::max(1.0, q.component_measure(j)))
      strict = false;
  }

  const Eigen::MatrixXd s = assemble_single_layer(d).matrix();
  const Eigen::MatrixXd dl = assemble_double_layer_pv(d).matrix();
  const Eigen::MatrixXd k = assemble_adjoint_double_layer(d).matrix();

  NeumannSolution out;
  out.charges.assign(m, 0.0);
  Eigen::VectorXd data = g.values;
  if (!strict) {
    // Hole charges absorb the per-component fluxes; what remains is the
    // interior normal-derivative trace (-I/2 + K) of the unit layers.
    for (int j = 0; j < m; ++j) {
      out.charges[j] = -fluxes[j + 1] / q.component_measure(j + 1);
      const Eigen::VectorXd chi = hole_indicator(d, j);
      data -= out.charges[j] * Eigen::VectorXd(-0.5 * chi + k * chi);
    }
    for (int j = 0; j <= m; ++j)
      if (std::abs(q.component_integral(j, data)) >
          100.0 * opt.flux_tol * scale * std::max(1.0, q.component_measure(j)))
        throw std::runtime_error("solve_neumann: charge correction left a nonzero flux");
  }

  const auto sk = solve_second_kind(d, k * k, data, opt.svd_cutoff);
  out.phi = {sk.phi, d.partition()};
  out.info.system_residual = sk.residual;
  out.info.kernel_dim = sk.kernel_dim;
  out.info.path = strict ? "strict" : "general";

  Eigen::VectorXd psi = s * sk.phi;
  // normalize the field to zero mean trace on the outer curve
  Eigen::VectorXd trace = 0.5 * psi + dl * psi;
  for (int j = 0; j < m; ++j) trace += out.charges[j] * Eigen::VectorXd(s * hole_indicator(d, j));
  const double mean0 = q.component_integral(0, trace) / q.component_measure(0);
  psi.array() -= mean0;
  out.psi = {std::move(psi), d.partition()};
  return out;
}

DirichletSolution solve_dirichlet(const Domain& d, const BoundaryFunction& f,
                                  const DirichletOptions& opt) {
  const int n = d.node_count();
  if (f.size() != n) throw std::invalid_argument("solve_dirichlet: data length mismatch");
  const auto q = quadrature_functional(d);

  const Eigen::MatrixXd s = assemble_single_layer(d).matrix();
  const Eigen::MatrixXd k = assemble_adjoint_double_layer(d).matrix();
  const Eigen::MatrixXd dds = assemble_tangential_derivative(d).matrix();

  // First-kind equation d/ds S phi = d/ds f, reduced to second kind by
  // composing with the reducer; the reduced right side is d/ds S (df).
  const Eigen::VectorXd df = dds * f.values;
  const Eigen::VectorXd rhs = dds * (s * df);
  auto sk = solve_second_kind(d, k * k, rhs, opt.svd_cutoff);

  DirichletSolution out;
  out.phi = {sk.phi, d.partition()};
  out.info.kernel_dim = sk.kernel_dim;

  const Eigen::VectorXd sphi = s * sk.phi;
  out.info.system_residual =
      (dds * sphi - df).lpNorm<Eigen::Infinity>() /
      std::max(1.0, df.lpNorm<Eigen::Infinity>());

  // S phi matches f up to one constant per component
  const int m = d.hole_count();
  out.gamma.resize(m + 1);
  for (int j = 0; j <= m; ++j) {
    const Eigen::VectorXd diff =
        sphi.segment(d.component_offset(j), d.component_size(j)) -
        f.values.segment(d.component_offset(j), d.component_size(j));
    out.gamma[j] = q.component_integral(j, sphi - f.values) / q.component_measure(j);
    const double sd = std::sqrt((diff.array() - diff.mean()).square().mean());
    if (sd > opt.constancy_tol)
      throw std::runtime_error("solve_dirichlet: S phi - f not constant on component " +
                               std::to_string(j) + " (std " + std::to_string(sd) + ")");
  }

  out.exceptional = detect_exceptional(d, opt.exceptional_tol).is_exceptional;
  Eigen::VectorXd density = sk.phi;
  if (m >= 1) {
    const auto psi_h = hole_indicator_densities(d);
    for (int hh = 0; hh < m; ++hh)
      density += (out.gamma[0] - out.gamma[hh + 1]) * psi_h[hh].values;
  }
  out.density = {std::move(density), d.partition()};
  out.constant = -out.gamma[0];
  return out;
}

std::vector<BoundaryFunction> adjoint_eigendensities(const Domain& d, double tol) {
  const int n = d.node_count();
  const int m = d.hole_count();
  Eigen::MatrixXd b = assemble_adjoint_double_layer(d).matrix();
  b.diagonal().array() += 0.5;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();

  int count = 0;
  for (int i = 0; i < n; ++i)
    if (sv[i] < tol) ++count;
  if (count != m)
    throw std::runtime_error("adjoint_eigendensities: found " + std::to_string(count) +
                             " near-null directions, expected " + std::to_string(m));
  if (n - m - 1 >= 0 && sv[n - m - 1] <= 1e-3)
    throw std::runtime_error("adjoint_eigendensities: no spectral gap above the null space");

  std::vector<BoundaryFunction> out;
  out.reserve(m);
  for (int i = n - m; i < n; ++i)
    out.push_back({svd.matrixV().col(i), d.partition()});
  return out;
}

std::vector<BoundaryFunction> hole_indicator_densities(const Domain& d) {
  const int m = d.hole_count();
  if (m == 0) return {};
  const auto basis = adjoint_eigendensities(d);

  // Single layers of null densities are constant on each hole closure and
  // vanish outside the outer curve, so one interior point per hole pins the
  // matching coefficients.
  Eigen::MatrixXd a(m, m);
  for (int kk = 0; kk < m; ++kk)
    for (int hh = 0; hh < m; ++hh)
      a(kk, hh) = single_layer_sum(d, basis[hh].values, d.holes()[kk].interior_reference);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible())
    throw std::runtime_error("hole_indicator_densities: ill-conditioned matching matrix");

  const Eigen::MatrixXd s = assemble_single_layer(d).matrix();
  std::vector<BoundaryFunction> out;
  out.reserve(m);
  for (int hh = 0; hh < m; ++hh) {
    const Eigen::VectorXd alpha = lu.solve(Eigen::VectorXd::Unit(m, hh));
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(d.node_count());
    for (int b = 0; b < m; ++b) psi += alpha[b] * basis[b].values;

    const Eigen::VectorXd trace = s * psi;
    if (trace.segment(d.component_offset(0), d.component_size(0)).lpNorm<Eigen::Infinity>() >
        1e-6)
      throw std::runtime_error("hole_indicator_densities: potential does not vanish on the "
                               "outer curve");
    out.push_back({std::move(psi), d.partition()});
  }
  return out;
}

}  // namespace bem2d

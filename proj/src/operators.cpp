#include "bem2d/operators.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "bem2d/kernels.hpp"

namespace bem2d {

namespace {

constexpr double kPi = std::numbers::pi;

int env_threads() {
  const char* s = std::getenv("BEM2D_THREADS");
  if (!s) return 1;
  const int v = std::atoi(s);
  return v < 1 ? 1 : v;
}

void parallel_rows(int n, const std::function<void(int)>& row) {
  const int threads = std::min(env_threads(), n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) row(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += threads) row(i);
    });
  for (auto& th : pool) th.join();
}

// Weights of the spectrally exact rule for the periodic logarithm,
//   integral log(4 sin^2((t-tau)/2)) f(tau) dtau
//     ~ sum_j R_(i-j) f(t_j),   t_j = pi j / n  (2n nodes),
//   R_d = -(2 pi / n) sum_{m=1}^{n-1} cos(m t_d)/m - (pi/n^2) cos(n t_d).
Eigen::VectorXd periodic_log_weights(int half_n) {
  const int nn = 2 * half_n;
  Eigen::VectorXd r(nn);
  for (int d = 0; d < nn; ++d) {
    const double td = kPi * d / half_n;
    double acc = 0.0;
    for (int m = 1; m < half_n; ++m) acc += std::cos(m * td) / m;
    r[d] = -(2.0 * kPi / half_n) * acc -
           kPi / (static_cast<double>(half_n) * half_n) * std::cos(half_n * td);
  }
  return r;
}

}  // namespace

BoundaryFunction BoundaryFunction::zeros(const Domain& d) {
  return {Eigen::VectorXd::Zero(d.node_count()), d.partition()};
}

BoundaryFunction BoundaryFunction::constant(const Domain& d, double v) {
  return {Eigen::VectorXd::Constant(d.node_count(), v), d.partition()};
}

BoundaryFunction BoundaryFunction::sample(
    const Domain& d, const std::function<double(int comp, double t, Vec2 x)>& f) {
  BoundaryFunction out = zeros(d);
  for (int i = 0; i < d.node_count(); ++i)
    out.values[i] = f(d.component_of(i), d.node_param(i), d.node(i));
  return out;
}

BoundaryFunction DiscreteOperator::apply(const BoundaryFunction& f) const {
  if (f.size() != size())
    throw std::invalid_argument("operator application: size mismatch");
  return {mat_ * f.values, f.offsets};
}

DiscreteOperator DiscreteOperator::compose(const DiscreteOperator& inner) const {
  if (inner.domain_id_ != domain_id_)
    throw std::invalid_argument("operator composition: domain tags differ");
  return {mat_ * inner.mat_, domain_id_};
}

QuadratureFunctional quadrature_functional(const Domain& d) {
  return {d.weights().transpose(), d.partition()};
}

// Same-component blocks split the kernel as
//   s(x(t),x(tau)) = log(4 sin^2((t-tau)/2)) / (4 pi) + M(t,tau),
// M smooth with M(t,t) = log|x'(t)| / (2 pi); the log part gets the
// periodic_log_weights rule, the remainder the trapezoidal rule.
// Cross-component kernels are smooth and use the plain trapezoidal rule.
DiscreteOperator assemble_single_layer(const Domain& d) {
  const int total = d.node_count();
  const int nc = d.component_count();
  Eigen::MatrixXd S(total, total);
  std::vector<Eigen::VectorXd> logw(nc);
  for (int c = 0; c < nc; ++c) logw[c] = periodic_log_weights(d.component(c).half_order());

  parallel_rows(total, [&](int i) {
    const int ci = d.component_of(i);
    const auto& rowc = d.component(ci);
    const int ai = i - d.component_offset(ci);
    for (int c = 0; c < nc; ++c) {
      const auto& comp = d.component(c);
      const int off = d.component_offset(c);
      const int n = comp.half_order();
      if (c == ci) {
        for (int b = 0; b < comp.node_count(); ++b) {
          double m;
          if (b == ai) {
            m = std::log(comp.speed[b]) / (2.0 * kPi);
          } else {
            const double r2 = squared_norm(rowc.point[ai] - comp.point[b]);
            const double sn = std::sin(0.5 * (rowc.t[ai] - comp.t[b]));
            m = std::log(r2 / (4.0 * sn * sn)) / (4.0 * kPi);
          }
          const int dd = ((ai - b) % (2 * n) + 2 * n) % (2 * n);
          S(i, off + b) = (logw[c][dd] / (4.0 * kPi) + kPi / n * m) * comp.speed[b];
        }
      } else {
        for (int b = 0; b < comp.node_count(); ++b)
          S(i, off + b) = fund_solution(d.node(i), d.node(off + b)) * d.node_weight(off + b);
      }
    }
  });
  return {std::move(S), d.id()};
}

DiscreteOperator assemble_double_layer_pv(const Domain& d) {
  const int total = d.node_count();
  Eigen::MatrixXd D(total, total);
  parallel_rows(total, [&](int i) {
    for (int j = 0; j < total; ++j) {
      if (j == i)
        D(i, i) = d.node_curvature(i) / (4.0 * kPi) * d.node_weight(i);
      else
        D(i, j) = dnu_y_s(d.node(i), d.node(j), d.node_normal(j)) * d.node_weight(j);
    }
  });
  return {std::move(D), d.id()};
}

DiscreteOperator assemble_adjoint_double_layer(const Domain& d) {
  const int total = d.node_count();
  Eigen::MatrixXd K(total, total);
  parallel_rows(total, [&](int i) {
    for (int j = 0; j < total; ++j) {
      if (j == i)
        K(i, i) = d.node_curvature(i) / (4.0 * kPi) * d.node_weight(i);
      else
        K(i, j) = dnu_x_s(d.node(i), d.node(j), d.node_normal(i)) * d.node_weight(j);
    }
  });
  return {std::move(K), d.id()};
}

// Trigonometric differentiation in the parameter, divided by the speed.
DiscreteOperator assemble_tangential_derivative(const Domain& d) {
  const int total = d.node_count();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(total, total);
  for (int c = 0; c < d.component_count(); ++c) {
    const auto& comp = d.component(c);
    const int off = d.component_offset(c);
    const int nn = comp.node_count();
    for (int a = 0; a < nn; ++a)
      for (int b = 0; b < nn; ++b) {
        if (a == b) continue;
        const double sign = ((a - b) % 2 == 0) ? 1.0 : -1.0;
        const double arg = 0.5 * (comp.t[a] - comp.t[b]);
        M(off + a, off + b) = 0.5 * sign / std::tan(arg) / comp.speed[a];
      }
  }
  return {std::move(M), d.id()};
}

DiscreteOperator assemble_grad_single_layer(const Domain& d) {
  return assemble_tangential_derivative(d).compose(assemble_single_layer(d));
}

DiscreteOperator assemble_reducing_operator(const Domain& d) {
  return assemble_grad_single_layer(d);
}

DiscreteOperator assemble_robin_operator(const Domain& d, const BoundaryFunction& h,
                                         bool allow_zero_h) {
  if (h.size() != d.node_count())
    throw std::invalid_argument("assemble_robin_operator: h has wrong length");
  if (h.values.minCoeff() < 0.0)
    throw std::invalid_argument("assemble_robin_operator: negative h entry");
  const auto q = quadrature_functional(d);
  if (q.integrate(h.values) <= 0.0 && !allow_zero_h)
    throw std::invalid_argument(
        "assemble_robin_operator: h vanishes identically (Neumann case needs the flag)");

  const Eigen::MatrixXd K = assemble_adjoint_double_layer(d).matrix();
  Eigen::MatrixXd H = K * K;
  if (h.values.maxCoeff() > 0.0) {
    const Eigen::MatrixXd S = assemble_single_layer(d).matrix();
    const Eigen::MatrixXd D = assemble_double_layer_pv(d).matrix();
    H += h.values.asDiagonal() * Eigen::MatrixXd(0.5 * S + D * S);
  }
  return {std::move(H), d.id()};
}

}  // namespace bem2d

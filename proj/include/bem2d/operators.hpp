#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "bem2d/geometry.hpp"

namespace bem2d {

// Nodal values of a function on the whole boundary, together with the
// component partition of the originating domain.
struct BoundaryFunction {
  Eigen::VectorXd values;
  std::vector<int> offsets;

  static BoundaryFunction zeros(const Domain& d);
  static BoundaryFunction constant(const Domain& d, double v);
  static BoundaryFunction sample(const Domain& d,
                                 const std::function<double(int comp, double t, Vec2 x)>& f);

  int component_count() const { return static_cast<int>(offsets.size()) - 1; }
  int size() const { return static_cast<int>(values.size()); }
  Eigen::VectorBlock<Eigen::VectorXd> segment(int c) {
    return values.segment(offsets[c], offsets[c + 1] - offsets[c]);
  }
  Eigen::VectorBlock<const Eigen::VectorXd> segment(int c) const {
    return values.segment(offsets[c], offsets[c + 1] - offsets[c]);
  }
};

// Dense operator on boundary node values, tagged with the identity of the
// grid it was assembled on.
class DiscreteOperator {
 public:
  DiscreteOperator(Eigen::MatrixXd m, std::uint64_t domain_id)
      : mat_(std::move(m)), domain_id_(domain_id) {}

  const Eigen::MatrixXd& matrix() const { return mat_; }
  std::uint64_t domain_id() const { return domain_id_; }
  int size() const { return static_cast<int>(mat_.rows()); }

  BoundaryFunction apply(const BoundaryFunction& f) const;
  DiscreteOperator compose(const DiscreteOperator& inner) const;  // *this after inner

 private:
  Eigen::MatrixXd mat_;
  std::uint64_t domain_id_;
};

// Row functional realizing the boundary integral of nodal values.
struct QuadratureFunctional {
  Eigen::RowVectorXd w;
  std::vector<int> offsets;

  double integrate(const Eigen::VectorXd& f) const { return (w * f).value(); }
  double component_integral(int j, const Eigen::VectorXd& f) const {
    return (w.segment(offsets[j], offsets[j + 1] - offsets[j]) *
            f.segment(offsets[j], offsets[j + 1] - offsets[j]))
        .value();
  }
  double component_measure(int j) const {
    return w.segment(offsets[j], offsets[j + 1] - offsets[j]).sum();
  }
};

QuadratureFunctional quadrature_functional(const Domain& d);

// Boundary trace of the single-layer potential.
DiscreteOperator assemble_single_layer(const Domain& d);

// Principal value of the double layer; the interior trace of D psi is
// (I/2 + D_pv) psi.
DiscreteOperator assemble_double_layer_pv(const Domain& d);

// Adjoint double layer K; the interior normal-derivative trace of the
// single layer S phi is (-I/2 + K) phi.
DiscreteOperator assemble_adjoint_double_layer(const Domain& d);

// Arclength derivative, block-diagonal per component.
DiscreteOperator assemble_tangential_derivative(const Domain& d);

// d/ds of the single-layer trace: the singular operator of the first-kind
// Dirichlet equation.
DiscreteOperator assemble_grad_single_layer(const Domain& d);

// Left reducer of the operator above.  In the plane the two coincide
// entrywise and differ only in the role they play; composing them gives
// the reduction identity  (reducer . grad_single_layer) = -I/4 + K^2.
DiscreteOperator assemble_reducing_operator(const Domain& d);

// Compact part H = K^2 + h (S/2 + D_pv S) of the Robin system
// (-I/4 + H) phi = g.  Requires h >= 0 with positive integral; a vanishing
// h is accepted only with allow_zero_h (the Neumann reduction H = K^2).
DiscreteOperator assemble_robin_operator(const Domain& d, const BoundaryFunction& h,
                                         bool allow_zero_h = false);

}  // namespace bem2d

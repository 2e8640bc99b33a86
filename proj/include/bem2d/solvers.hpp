#pragma once

#include <string>
#include <vector>

#include "bem2d/operators.hpp"

namespace bem2d {

// Result of the logarithmic-capacity probe of the outer boundary.  The
// Robin constant is the value of the equilibrium single-layer potential on
// the outer curve; it vanishes exactly when the boundary is exceptional,
// i.e. when constants cannot be represented by a single layer.
struct ExceptionalReport {
  double robin_constant = 0.0;
  BoundaryFunction equilibrium_density;  // on the outer component only
  bool is_exceptional = false;
};

ExceptionalReport detect_exceptional(const Domain& d, double tol = 1e-8);

struct SolveDiagnostics {
  std::string path;             // regular | exceptional | neumann | strict | general
  double system_residual = 0.0; // relative inf-norm residual of the linear solve
  double rcond = 1.0;           // reciprocal condition estimate (direct solves)
  double side_condition = 0.0;  // |integral of phi| in the exceptional path
  int kernel_dim = 0;           // numerical kernel dimension (least-squares solves)
};

// u = D psi with psi = S phi + c; c stays zero unless the outer boundary is
// exceptional, in which case the augmented system determines (phi, c) under
// the side condition integral(phi) = 0.
struct RobinSolution {
  BoundaryFunction phi;
  double c = 0.0;
  BoundaryFunction psi;
  bool exceptional = false;
  SolveDiagnostics info;
};

struct RobinOptions {
  bool neumann_mode = false;  // accept h == 0 and run the Neumann solve
  double exceptional_tol = 1e-8;
  double condition_cap = 1e12;
  double svd_cutoff = 1e-8;
};

RobinSolution solve_robin(const Domain& d, const BoundaryFunction& h, const BoundaryFunction& g,
                          const RobinOptions& opt = {});

// u = D psi + sum_j charges_j S[chi_j], normalized to zero mean trace on the
// outer curve.  The strict path applies when every per-component flux of g
// vanishes; otherwise the hole charges absorb the fluxes first.
struct NeumannSolution {
  BoundaryFunction psi;
  std::vector<double> charges;  // one per hole, zero on the strict path
  BoundaryFunction phi;         // generating density, psi = S phi up to the normalization shift
  std::string normalization = "zero-mean-on-outer";
  SolveDiagnostics info;
};

struct NeumannOptions {
  double svd_cutoff = 1e-8;
  double flux_tol = 1e-10;
};

NeumannSolution solve_neumann(const Domain& d, const BoundaryFunction& g,
                              const NeumannOptions& opt = {});

// u = S[density] + constant.  gamma holds the per-component offsets of
// S phi against the data before the hole corrections are applied.
struct DirichletSolution {
  BoundaryFunction phi;        // solution of the reduced second-kind equation
  std::vector<double> gamma;   // per-component means of (S phi - f)
  BoundaryFunction density;    // phi plus the hole-indicator corrections
  double constant = 0.0;
  bool exceptional = false;
  SolveDiagnostics info;
};

struct DirichletOptions {
  double svd_cutoff = 1e-8;
  double exceptional_tol = 1e-8;
  double constancy_tol = 1e-6;
};

DirichletSolution solve_dirichlet(const Domain& d, const BoundaryFunction& f,
                                  const DirichletOptions& opt = {});

// Basis of the null space of (I/2 + K); its dimension equals the number of
// holes.  Vectors are l2-normalized right singular vectors.
std::vector<BoundaryFunction> adjoint_eigendensities(const Domain& d, double tol = 1e-8);

// Densities combined from adjoint_eigendensities whose single-layer
// potentials equal 1 on one hole closure, 0 on the others, and vanish on
// the outer curve.
std::vector<BoundaryFunction> hole_indicator_densities(const Domain& d);

}  // namespace bem2d

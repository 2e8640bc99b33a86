#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bem2d/evaluate.hpp"
#include "bem2d/expression.hpp"

namespace bem2d {

// Analytic description of one boundary curve; the discrete CurveComponent
// is sampled from it, and the oracle quadrature resamples it at any
// resolution.
struct CurveSpec {
  enum class Kind { Circle, Fourier };
  Kind kind = Kind::Circle;
  Vec2 center{};
  double radius = 1.0;
  FourierCoeffs coeffs;

  CurveComponent build(int nodes, CurveRole role) const;
  Vec2 point(double t) const;
  Vec2 velocity(double t) const;
  Vec2 acceleration(double t) const;
};

struct GeometrySpec {
  CurveSpec outer;
  std::vector<CurveSpec> holes;

  Domain build(int nodes_per_component) const;
  int component_count() const { return 1 + static_cast<int>(holes.size()); }
  const CurveSpec& component(int j) const { return j == 0 ? outer : holes[j - 1]; }
};

struct CaseConfig {
  std::string case_id = "case";
  GeometrySpec geometry;
  std::string problem;  // robin | neumann | dirichlet
  nlohmann::json h_spec;
  nlohmann::json data_spec;
  int nodes_per_component = 128;
  nlohmann::json tolerances;
  std::string report_path;
  std::string csv_prefix;
};

CaseConfig parse_config(const nlohmann::json& j);
CaseConfig load_config(const std::string& path);

struct ManufacturedSolution {
  std::string name;
  std::function<double(Vec2)> value;
  std::function<Vec2(Vec2)> gradient;
};

// Closed-form harmonic fields for verification: "log-radial",
// "harmonic-polynomial", "point-log".  Singular points must lie outside
// the closed domain.
ManufacturedSolution make_manufactured(const std::string& name, const nlohmann::json& params,
                                       const Domain& domain);

BoundaryFunction build_h(const nlohmann::json& spec, const Domain& d);

struct CaseData {
  BoundaryFunction boundary_data;  // g (robin/neumann) or f (dirichlet)
  std::optional<ManufacturedSolution> exact;
};

// h may be null for non-Robin problems.
CaseData build_case_data(const CaseConfig& cfg, const Domain& d, const BoundaryFunction* h);

enum class LayerKind { Single, Double };

struct OracleTarget {
  Vec2 point{};
  int on_component = -1;  // >= 0 marks a target on that component at parameter `param`
  double param = 0.0;
};

// Independent evaluation of a layer potential by naive high-resolution
// summation over a fresh sampling of the geometry (log-split rule on the
// singular component for on-curve single-layer targets).  The result is
// accepted only if doubling the resolution confirms it.
double oracle_quadrature(const GeometrySpec& geom, LayerKind kind,
                         const std::function<double(int comp, double t)>& density,
                         const OracleTarget& target, int base_nodes, int multiplier);

struct Assertion {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Report {
  std::string case_id;
  std::string problem;
  std::string path;  // solver path taken
  int nodes = 0;
  std::vector<Assertion> assertions;
  nlohmann::json extra;
  bool passed = true;

  void check(const std::string& name, double value, double tol);
  nlohmann::json to_json() const;
};

Report run_case(const CaseConfig& cfg);
Report run_convergence(const CaseConfig& cfg, const std::vector<int>& node_counts);
Report run_identities(const CaseConfig& cfg);
Report run_oracle_checks(const CaseConfig& cfg);
Report run_detect_exceptional(const CaseConfig& cfg);

}  // namespace bem2d

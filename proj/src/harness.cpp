#include "bem2d/harness.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "bem2d/kernels.hpp"

namespace bem2d {

namespace {

constexpr double kPi = std::numbers::pi;
using json = nlohmann::json;

double now_ms() {
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

Vec2 parse_vec2(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument("config error: " + what + " must be a [x, y] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<double> parse_doubles(const json& j) {
  std::vector<double> v;
  for (const auto& e : j) v.push_back(e.get<double>());
  return v;
}

CurveSpec parse_curve(const json& j, const std::string& what) {
  CurveSpec c;
  const std::string type = j.value("type", "");
  if (type == "circle") {
    c.kind = CurveSpec::Kind::Circle;
    c.center = parse_vec2(j.at("center"), what + ".center");
    c.radius = j.at("radius").get<double>();
  } else if (type == "fourier") {
    c.kind = CurveSpec::Kind::Fourier;
    if (j.contains("cos_x")) c.coeffs.cos_x = parse_doubles(j["cos_x"]);
    if (j.contains("sin_x")) c.coeffs.sin_x = parse_doubles(j["sin_x"]);
    if (j.contains("cos_y")) c.coeffs.cos_y = parse_doubles(j["cos_y"]);
    if (j.contains("sin_y")) c.coeffs.sin_y = parse_doubles(j["sin_y"]);
  } else {
    throw std::invalid_argument("config error: " + what + ".type must be circle or fourier");
  }
  return c;
}

}  // namespace

CurveComponent CurveSpec::build(int nodes, CurveRole role) const {
  if (kind == Kind::Circle) return make_circle(center, radius, nodes, role);
  return make_fourier_curve(coeffs, nodes, role);
}

Vec2 CurveSpec::point(double t) const {
  if (kind == Kind::Circle) return center + radius * Vec2{std::cos(t), std::sin(t)};
  return fourier_point(coeffs, t);
}

Vec2 CurveSpec::velocity(double t) const {
  if (kind == Kind::Circle) return radius * Vec2{-std::sin(t), std::cos(t)};
  return fourier_velocity(coeffs, t);
}

Vec2 CurveSpec::acceleration(double t) const {
  if (kind == Kind::Circle) return -radius * Vec2{std::cos(t), std::sin(t)};
  return fourier_acceleration(coeffs, t);
}

Domain GeometrySpec::build(int nodes_per_component) const {
  CurveComponent out = outer.build(nodes_per_component, CurveRole::Outer);
  std::vector<CurveComponent> hs;
  hs.reserve(holes.size());
  for (const auto& h : holes) hs.push_back(h.build(nodes_per_component, CurveRole::Hole));
  return build_domain(std::move(out), std::move(hs));
}

CaseConfig parse_config(const json& j) {
  try {
    CaseConfig cfg;
    cfg.case_id = j.value("case_id", "case");
    const json& g = j.at("geometry");
    cfg.geometry.outer = parse_curve(g.at("outer"), "geometry.outer");
    if (g.contains("holes")) {
      int k = 0;
      for (const auto& h : g["holes"])
        cfg.geometry.holes.push_back(parse_curve(h, "geometry.holes[" + std::to_string(k++) + "]"));
    }
    cfg.problem = j.value("problem", "");
    if (j.contains("h")) cfg.h_spec = j["h"];
    if (j.contains("data")) cfg.data_spec = j["data"];
    cfg.nodes_per_component = j.value("nodes_per_component", 128);
    if (j.contains("tolerances")) cfg.tolerances = j["tolerances"];
    if (j.contains("output")) {
      cfg.report_path = j["output"].value("report", "");
      cfg.csv_prefix = j["output"].value("csv_prefix", "");
    }
    return cfg;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config error: ") + e.what());
  }
}

CaseConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("config parse error in " + path + ": " + e.what());
  }
  return parse_config(j);
}

ManufacturedSolution make_manufactured(const std::string& name, const json& params,
                                       const Domain& domain) {
  auto require_outside = [&](Vec2 p) {
    if (domain.contains(p) || domain.boundary_distance(p) < 1e-6 * domain.outer().diameter)
      throw std::invalid_argument("manufactured case: singular point (" + std::to_string(p.x) +
                                  ", " + std::to_string(p.y) + ") lies inside the domain");
  };

  ManufacturedSolution m;
  m.name = name;
  if (name == "log-radial") {
    const double a = params.value("a", 0.0);
    const double b = params.at("b").get<double>();
    const Vec2 p = parse_vec2(params.at("p"), "log-radial p");
    require_outside(p);
    m.value = [a, b, p](Vec2 x) { return a + b * std::log(norm(x - p)); };
    m.gradient = [b, p](Vec2 x) { return b / squared_norm(x - p) * (x - p); };
  } else if (name == "harmonic-polynomial") {
    const int k = params.at("k").get<int>();
    if (k < 0) throw std::invalid_argument("harmonic-polynomial: k must be >= 0");
    const bool re = params.value("part", "re") == std::string("re");
    m.value = [k, re](Vec2 x) {
      const std::complex<double> z{x.x, x.y};
      const std::complex<double> w = std::pow(z, k);
      return re ? w.real() : w.imag();
    };
    m.gradient = [k, re](Vec2 x) -> Vec2 {
      if (k == 0) return {0.0, 0.0};
      const std::complex<double> z{x.x, x.y};
      const std::complex<double> dw = static_cast<double>(k) * std::pow(z, k - 1);
      return re ? Vec2{dw.real(), -dw.imag()} : Vec2{dw.imag(), dw.real()};
    };
  } else if (name == "point-log") {
    const double a0 = params.value("constant", 0.0);
    std::vector<Vec2> pts;
    for (const auto& pj : params.at("points")) pts.push_back(parse_vec2(pj, "point-log point"));
    std::vector<double> cs = parse_doubles(params.at("coefficients"));
    if (cs.size() != pts.size())
      throw std::invalid_argument("point-log: points and coefficients differ in length");
    for (const auto& p : pts) require_outside(p);
    m.value = [a0, pts, cs](Vec2 x) {
      double u = a0;
      for (std::size_t i = 0; i < pts.size(); ++i) u += cs[i] * std::log(norm(x - pts[i]));
      return u;
    };
    m.gradient = [pts, cs](Vec2 x) {
      Vec2 g{0.0, 0.0};
      for (std::size_t i = 0; i < pts.size(); ++i)
        g = g + cs[i] / squared_norm(x - pts[i]) * (x - pts[i]);
      return g;
    };
  } else {
    throw std::invalid_argument("unknown manufactured solution: " + name);
  }
  return m;
}

BoundaryFunction build_h(const json& spec, const Domain& d) {
  if (spec.is_null()) throw std::invalid_argument("robin problem requires an h specification");
  const std::string kind = spec.value("kind", "");
  if (kind == "constant") {
    return BoundaryFunction::constant(d, spec.at("value").get<double>());
  }
  if (kind == "expression") {
    Expression e(spec.at("expr").get<std::string>());
    return BoundaryFunction::sample(
        d, [&e](int, double t, Vec2 x) { return e.eval(x.x, x.y, t); });
  }
  if (kind == "per_component") {
    const std::vector<double> vals = parse_doubles(spec.at("values"));
    if (static_cast<int>(vals.size()) != d.component_count())
      throw std::invalid_argument("h.per_component: wrong number of values");
    return BoundaryFunction::sample(d, [&d, &vals](int c, double, Vec2) { return vals[c]; });
  }
  throw std::invalid_argument("h.kind must be constant, expression or per_component");
}

CaseData build_case_data(const CaseConfig& cfg, const Domain& d, const BoundaryFunction* h) {
  const json& spec = cfg.data_spec;
  if (spec.is_null()) throw std::invalid_argument("case requires a data specification");
  const std::string kind = spec.value("kind", "");
  CaseData out{BoundaryFunction::zeros(d), std::nullopt};

  if (kind == "manufactured") {
    auto exact = make_manufactured(spec.at("name").get<std::string>(),
                                   spec.value("params", json::object()), d);
    for (int i = 0; i < d.node_count(); ++i) {
      const Vec2 x = d.node(i);
      if (cfg.problem == "dirichlet") {
        out.boundary_data.values[i] = exact.value(x);
      } else {
        double g = dot(exact.gradient(x), d.node_normal(i));
        if (cfg.problem == "robin") {
          if (!h) throw std::invalid_argument("robin data needs h");
          g += h->values[i] * exact.value(x);
        }
        out.boundary_data.values[i] = g;
      }
    }
    out.exact = std::move(exact);
  } else if (kind == "expression") {
    Expression e(spec.at("expr").get<std::string>());
    out.boundary_data = BoundaryFunction::sample(
        d, [&e](int, double t, Vec2 x) { return e.eval(x.x, x.y, t); });
  } else if (kind == "values") {
    const std::vector<double> vals = parse_doubles(spec.at("values"));
    if (static_cast<int>(vals.size()) != d.node_count())
      throw std::invalid_argument("data.values: wrong length");
    for (int i = 0; i < d.node_count(); ++i) out.boundary_data.values[i] = vals[i];
  } else if (kind == "per_component") {
    const std::vector<double> vals = parse_doubles(spec.at("values"));
    if (static_cast<int>(vals.size()) != d.component_count())
      throw std::invalid_argument("data.per_component: wrong number of values");
    out.boundary_data =
        BoundaryFunction::sample(d, [&vals](int c, double, Vec2) { return vals[c]; });
  } else {
    throw std::invalid_argument("data.kind must be manufactured, expression, values or "
                                "per_component");
  }
  return out;
}

namespace {

int curve_orientation(const CurveSpec& spec) {
  if (spec.kind == CurveSpec::Kind::Circle) return 1;
  double area2 = 0.0;
  const int ns = 512;
  for (int k = 0; k < ns; ++k) {
    const double t = 2.0 * kPi * k / ns;
    area2 += cross(spec.point(t), spec.velocity(t));
  }
  return area2 > 0.0 ? 1 : -1;
}

struct Frame {
  Vec2 x, nu;
  double speed = 0.0, kappa = 0.0;
};

Frame analytic_frame(const CurveSpec& spec, CurveRole role, int orient, double t) {
  Frame f;
  f.x = spec.point(t);
  const Vec2 v = spec.velocity(t);
  f.speed = norm(v);
  const double flip = (role == CurveRole::Outer) ? orient : -orient;
  f.nu = flip * Vec2{v.y, -v.x} / f.speed;
  f.kappa = -dot(spec.acceleration(t), f.nu) / (f.speed * f.speed);
  return f;
}

// R(t) = -(2 pi / n) sum_{m<n} cos(m t)/m - (pi/n^2) cos(n t); the weight of
// the log(4 sin^2((t - t_j)/2)) rule for a 2n-point grid, valid for any t.
double log_weight_at(int half_n, double tdiff) {
  double acc = 0.0;
  for (int m = 1; m < half_n; ++m) acc += std::cos(m * tdiff) / m;
  return -(2.0 * kPi / half_n) * acc -
         kPi / (static_cast<double>(half_n) * half_n) * std::cos(half_n * tdiff);
}

double oracle_value(const GeometrySpec& geom, LayerKind kind,
                    const std::function<double(int, double)>& density,
                    const OracleTarget& target, int fine_nodes) {
  double acc = 0.0;
  for (int j = 0; j < geom.component_count(); ++j) {
    const CurveSpec& spec = geom.component(j);
    const CurveRole role = j == 0 ? CurveRole::Outer : CurveRole::Hole;
    const int orient = curve_orientation(spec);
    const int nn = fine_nodes % 2 == 0 ? fine_nodes : fine_nodes + 1;
    const double dt = 2.0 * kPi / nn;
    const bool singular = target.on_component == j;
    const Frame tf = singular ? analytic_frame(spec, role, orient, target.param) : Frame{};

    for (int k = 0; k < nn; ++k) {
      const double tk = k * dt;
      const Frame fr = analytic_frame(spec, role, orient, tk);
      const double f = density(j, tk) * fr.speed;
      if (kind == LayerKind::Single && singular) {
        const double sn = std::sin(0.5 * (target.param - tk));
        double smooth;
        if (std::abs(sn) < 1e-9)
          smooth = std::log(tf.speed) / (2.0 * kPi);
        else
          smooth = std::log(squared_norm(tf.x - fr.x) / (4.0 * sn * sn)) / (4.0 * kPi);
        acc += (log_weight_at(nn / 2, target.param - tk) / (4.0 * kPi) + dt * smooth) * f;
      } else if (kind == LayerKind::Double && singular) {
        const double sn = std::sin(0.5 * (target.param - tk));
        const double kern =
            std::abs(sn) < 1e-9 ? tf.kappa / (4.0 * kPi) : dnu_y_s(tf.x, fr.x, fr.nu);
        acc += kern * f * dt;
      } else {
        const Vec2 xt = singular ? tf.x : target.point;
        const double kern =
            kind == LayerKind::Single ? fund_solution(xt, fr.x) : dnu_y_s(xt, fr.x, fr.nu);
        acc += kern * f * dt;
      }
    }
  }
  return acc;
}

}  // namespace

double oracle_quadrature(const GeometrySpec& geom, LayerKind kind,
                         const std::function<double(int, double)>& density,
                         const OracleTarget& target, int base_nodes, int multiplier) {
  const double v1 = oracle_value(geom, kind, density, target, base_nodes * multiplier);
  const double v2 = oracle_value(geom, kind, density, target, 2 * base_nodes * multiplier);
  if (std::abs(v1 - v2) > 1e-8 * std::max(1.0, std::abs(v2)))
    throw std::runtime_error("oracle_quadrature: no convergence between resolutions (" +
                             std::to_string(v1) + " vs " + std::to_string(v2) + ")");
  return v2;
}

void Report::check(const std::string& name, double value, double tol) {
  const bool ok = std::isfinite(value) && value < tol;
  assertions.push_back({name, value, tol, ok});
  passed = passed && ok;
}

json Report::to_json() const {
  json a = json::array();
  for (const auto& c : assertions)
    a.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance},
                 {"pass", c.pass}});
  json out{{"case_id", case_id}, {"problem", problem},   {"path", path},
           {"nodes", nodes},     {"assertions", a},      {"passed", passed}};
  out.update(extra);
  return out;
}

namespace {

double tolerance_of(const CaseConfig& cfg, const std::string& key, double dflt) {
  if (cfg.tolerances.is_object() && cfg.tolerances.contains(key))
    return cfg.tolerances[key].get<double>();
  return dflt;
}

std::vector<Vec2> probe_points(const Domain& d, double min_distance) {
  std::vector<Vec2> probes;
  for (const auto& p : d.interior_points(0.2, 4))
    if (d.boundary_distance(p) >= min_distance) probes.push_back(p);
  while (probes.size() > 200) {
    std::vector<Vec2> thinned;
    for (std::size_t i = 0; i < probes.size(); i += 2) thinned.push_back(probes[i]);
    probes.swap(thinned);
  }
  if (probes.empty()) throw std::runtime_error("no interior probes at the requested distance");
  return probes;
}

// Discrete residuals of the operator identities on this grid.
json identity_residuals(const Domain& d, int max_mode) {
  const Eigen::MatrixXd s = assemble_single_layer(d).matrix();
  const Eigen::MatrixXd dl = assemble_double_layer_pv(d).matrix();
  const Eigen::MatrixXd k = assemble_adjoint_double_layer(d).matrix();
  const Eigen::MatrixXd dds = assemble_tangential_derivative(d).matrix();
  const int n = d.node_count();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd w = d.weights();

  json out;
  out["gauss_pv"] = ((dl * ones).array() - 0.5).abs().maxCoeff();
  out["jump"] = ((0.5 * ones + dl * ones).array() - 1.0).abs().maxCoeff();
  out["duality"] =
      (k - w.cwiseInverse().asDiagonal() * dl.transpose() * w.asDiagonal()).cwiseAbs().maxCoeff();
  out["weighted_symmetry"] =
      (w.asDiagonal() * s - s.transpose() * w.asDiagonal()).cwiseAbs().maxCoeff();

  const Eigen::MatrixXd j = dds * s;
  Eigen::MatrixXd gap = j * j - Eigen::MatrixXd(k * k);
  gap.diagonal().array() += 0.25;
  double red = 0.0;
  for (int c = 0; c < d.component_count(); ++c) {
    const auto& comp = d.component(c);
    const int off = d.component_offset(c);
    for (int mode = 0; mode <= max_mode; ++mode)
      for (int phase = 0; phase < (mode == 0 ? 1 : 2); ++phase) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        for (int a = 0; a < comp.node_count(); ++a)
          v[off + a] = phase == 0 ? std::cos(mode * comp.t[a]) : std::sin(mode * comp.t[a]);
        red = std::max(red, (gap * v).lpNorm<Eigen::Infinity>());
      }
  }
  out["reduction"] = red;
  return out;
}

void write_csv(const std::string& path, const std::vector<std::array<double, 3>>& rows) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "x1,x2,value\n";
  out.precision(17);
  for (const auto& r : rows) out << r[0] << ',' << r[1] << ',' << r[2] << '\n';
}

void dump_case_csv(const CaseConfig& cfg, const Domain& d, const Eigen::VectorXd& density,
                   const std::vector<Vec2>& probes, const std::vector<double>& values) {
  if (cfg.csv_prefix.empty()) return;
  std::vector<std::array<double, 3>> rows;
  for (int i = 0; i < d.node_count(); ++i)
    rows.push_back({d.node(i).x, d.node(i).y, density[i]});
  write_csv(cfg.csv_prefix + "_density.csv", rows);
  rows.clear();
  for (std::size_t i = 0; i < probes.size(); ++i)
    rows.push_back({probes[i].x, probes[i].y, values[i]});
  write_csv(cfg.csv_prefix + "_field.csv", rows);
}

void finish_report(const CaseConfig& cfg, Report& rep) {
  if (cfg.report_path.empty()) return;
  const std::filesystem::path p(cfg.report_path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(cfg.report_path);
  if (!out) throw std::runtime_error("cannot write " + cfg.report_path);
  out << rep.to_json().dump(2) << '\n';
}

struct SolveOutcome {
  std::string path;
  Eigen::VectorXd density;          // dumped to csv
  std::vector<double> probe_values;
  double interior_max_error = -1.0; // vs exact, -1 when no exact field
  double interior_l2_error = -1.0;
  double boundary_residual = 0.0;
  json detail;
};

SolveOutcome solve_and_measure(const CaseConfig& cfg, const Domain& d,
                               const BoundaryFunction* h, const CaseData& data,
                               const std::vector<Vec2>& probes, Report& rep,
                               bool structural_asserts) {
  SolveOutcome out;
  const double svd_cutoff = tolerance_of(cfg, "svd_cutoff", 1e-8);

  if (cfg.problem == "robin") {
    RobinOptions opt;
    opt.svd_cutoff = svd_cutoff;
    opt.exceptional_tol = tolerance_of(cfg, "exceptional", 1e-8);
    opt.condition_cap = tolerance_of(cfg, "condition_cap", 1e12);
    opt.neumann_mode = quadrature_functional(d).integrate(h->values) <= 0.0;
    RobinSolution sol = solve_robin(d, *h, data.boundary_data, opt);
    out.path = sol.info.path;
    out.density = sol.psi.values;
    out.probe_values = eval_solution(d, sol, probes);
    out.boundary_residual = boundary_residual_robin(d, sol, *h, data.boundary_data);
    out.detail["energy_identity"] = robin_energy_identity(d, sol, *h, data.boundary_data);
    out.detail["rcond"] = sol.info.rcond;
    if (structural_asserts) {
      rep.check("system residual", sol.info.system_residual, 1e-10);
      if (sol.exceptional) rep.check("side condition |w.phi|", sol.info.side_condition, 1e-10);
    }
  } else if (cfg.problem == "neumann") {
    NeumannOptions opt;
    opt.svd_cutoff = svd_cutoff;
    opt.flux_tol = tolerance_of(cfg, "flux", 1e-10);
    NeumannSolution sol = solve_neumann(d, data.boundary_data, opt);
    out.path = sol.info.path;
    out.density = sol.psi.values;
    out.probe_values = eval_solution(d, sol, probes);
    out.boundary_residual = boundary_residual_neumann(d, sol, data.boundary_data);
    out.detail["charges"] = sol.charges;
    out.detail["kernel_dim"] = sol.info.kernel_dim;
    if (structural_asserts) rep.check("least-squares residual", sol.info.system_residual, 1e-8);
  } else if (cfg.problem == "dirichlet") {
    DirichletOptions opt;
    opt.svd_cutoff = svd_cutoff;
    opt.exceptional_tol = tolerance_of(cfg, "exceptional", 1e-8);
    DirichletSolution sol = solve_dirichlet(d, data.boundary_data, opt);
    out.path = sol.exceptional ? "exceptional" : "regular";
    out.density = sol.density.values;
    out.probe_values = eval_solution(d, sol, probes);
    out.boundary_residual = boundary_residual_dirichlet(d, sol, data.boundary_data);
    out.detail["gamma"] = sol.gamma;
    out.detail["first_kind_residual"] = sol.info.system_residual;
  } else {
    throw std::invalid_argument("problem must be robin, neumann or dirichlet");
  }

  if (data.exact) {
    double maxerr = 0.0, l2 = 0.0;
    if (cfg.problem == "neumann") {
      // defined up to one additive constant: compare after matching means
      double shift = 0.0;
      for (std::size_t i = 0; i < probes.size(); ++i)
        shift += out.probe_values[i] - data.exact->value(probes[i]);
      shift /= static_cast<double>(probes.size());
      for (std::size_t i = 0; i < probes.size(); ++i) {
        const double e = std::abs(out.probe_values[i] - data.exact->value(probes[i]) - shift);
        maxerr = std::max(maxerr, e);
        l2 += e * e;
      }
    } else {
      for (std::size_t i = 0; i < probes.size(); ++i) {
        const double e = std::abs(out.probe_values[i] - data.exact->value(probes[i]));
        maxerr = std::max(maxerr, e);
        l2 += e * e;
      }
    }
    out.interior_max_error = maxerr;
    out.interior_l2_error = std::sqrt(l2 / static_cast<double>(probes.size()));
  }
  return out;
}

}  // namespace

Report run_case(const CaseConfig& cfg) {
  Report rep;
  rep.case_id = cfg.case_id;
  rep.problem = cfg.problem;
  rep.nodes = cfg.nodes_per_component;

  json timings;
  double t0 = now_ms();
  const Domain d = cfg.geometry.build(cfg.nodes_per_component);
  timings["geometry_ms"] = now_ms() - t0;

  BoundaryFunction h = BoundaryFunction::zeros(d);
  const bool robin = cfg.problem == "robin";
  if (robin) h = build_h(cfg.h_spec, d);
  const CaseData data = build_case_data(cfg, d, robin ? &h : nullptr);

  const std::vector<Vec2> probes = probe_points(d, tolerance_of(cfg, "probe_min_distance", 0.1));

  t0 = now_ms();
  SolveOutcome sol = solve_and_measure(cfg, d, robin ? &h : nullptr, data, probes, rep, true);
  timings["solve_eval_ms"] = now_ms() - t0;
  rep.path = sol.path;

  json metrics = sol.detail;
  metrics["boundary_residual"] = sol.boundary_residual;
  metrics["probe_count"] = probes.size();
  if (sol.interior_max_error >= 0.0) {
    metrics["interior_max_error"] = sol.interior_max_error;
    metrics["interior_l2_error"] = sol.interior_l2_error;
  }

  t0 = now_ms();
  const json idres = identity_residuals(d, 4);
  timings["identities_ms"] = now_ms() - t0;
  rep.check("gauss identity", idres["gauss_pv"].get<double>(), 1e-10);
  rep.check("jump identity", idres["jump"].get<double>(), 1e-10);
  rep.check("duality", idres["duality"].get<double>(), 1e-12);
  rep.check("weighted symmetry", idres["weighted_symmetry"].get<double>(), 1e-10);

  if (cfg.tolerances.is_object()) {
    if (cfg.tolerances.contains("interior_error") && sol.interior_max_error >= 0.0)
      rep.check("interior error", sol.interior_max_error,
                cfg.tolerances["interior_error"].get<double>());
    if (cfg.tolerances.contains("boundary_residual"))
      rep.check("boundary residual", sol.boundary_residual,
                cfg.tolerances["boundary_residual"].get<double>());
    if (cfg.tolerances.contains("energy") && metrics.contains("energy_identity"))
      rep.check("energy identity", std::abs(metrics["energy_identity"].get<double>()),
                cfg.tolerances["energy"].get<double>());
  }

  rep.extra["metrics"] = metrics;
  rep.extra["operator_identities"] = idres;
  rep.extra["timings_ms"] = timings;

  dump_case_csv(cfg, d, sol.density, probes, sol.probe_values);
  finish_report(cfg, rep);
  return rep;
}

Report run_convergence(const CaseConfig& cfg, const std::vector<int>& node_counts) {
  if (node_counts.size() < 2)
    throw std::invalid_argument("convergence study needs at least two node counts");
  Report rep;
  rep.case_id = cfg.case_id;
  rep.problem = cfg.problem;
  rep.nodes = node_counts.back();
  rep.path = "convergence";

  const double ratio_tol = tolerance_of(cfg, "convergence_ratio", 0.2);
  const double floor = tolerance_of(cfg, "error_floor", 1e-10);

  json table = json::array();
  std::vector<double> errors;
  for (int n : node_counts) {
    CaseConfig sub = cfg;
    sub.nodes_per_component = n;
    sub.report_path.clear();
    sub.csv_prefix.clear();
    const Domain d = sub.geometry.build(n);
    BoundaryFunction h = BoundaryFunction::zeros(d);
    const bool robin = sub.problem == "robin";
    if (robin) h = build_h(sub.h_spec, d);
    const CaseData data = build_case_data(sub, d, robin ? &h : nullptr);
    if (!data.exact)
      throw std::invalid_argument("convergence study requires manufactured data");
    const auto probes = probe_points(d, tolerance_of(sub, "probe_min_distance", 0.1));
    Report scratch;
    const SolveOutcome out =
        solve_and_measure(sub, d, robin ? &h : nullptr, data, probes, scratch, false);
    errors.push_back(out.interior_max_error);
    table.push_back({{"nodes", n},
                     {"interior_max_error", out.interior_max_error},
                     {"boundary_residual", out.boundary_residual},
                     {"path", out.path}});
  }

  for (std::size_t i = 1; i < errors.size(); ++i) {
    const double ratio = errors[i] / std::max(errors[i - 1], 1e-300);
    const bool at_floor = errors[i] < floor;
    Assertion a;
    a.name = "error ratio " + std::to_string(node_counts[i - 1]) + "->" +
             std::to_string(node_counts[i]) + (at_floor ? " (at floor)" : "");
    a.value = ratio;
    a.tolerance = ratio_tol;
    a.pass = std::isfinite(ratio) && (ratio < ratio_tol || at_floor);
    rep.assertions.push_back(a);
    rep.passed = rep.passed && a.pass;
  }
  if (cfg.tolerances.is_object() && cfg.tolerances.contains("interior_error"))
    rep.check("final interior error", errors.back(),
              cfg.tolerances["interior_error"].get<double>());

  rep.extra["convergence"] = table;
  finish_report(cfg, rep);
  return rep;
}

Report run_identities(const CaseConfig& cfg) {
  Report rep;
  rep.case_id = cfg.case_id;
  rep.problem = "identities";
  rep.nodes = cfg.nodes_per_component;
  rep.path = "identities";

  const Domain d = cfg.geometry.build(cfg.nodes_per_component);
  const json idres = identity_residuals(d, 8);
  rep.check("gauss identity D_pv 1 = 1/2", idres["gauss_pv"].get<double>(), 1e-10);
  rep.check("jump identity (I/2 + D_pv) 1 = 1", idres["jump"].get<double>(), 1e-10);
  rep.check("duality K = W^-1 D^T W", idres["duality"].get<double>(), 1e-12);
  rep.check("weighted symmetry of S", idres["weighted_symmetry"].get<double>(), 1e-10);
  rep.check("reduction identity, modes <= 8", idres["reduction"].get<double>(),
            tolerance_of(cfg, "reduction", 1e-8));
  if (d.hole_count() == 0) {
    const Eigen::MatrixXd k = assemble_adjoint_double_layer(d).matrix();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(d.node_count());
    rep.check("single-layer interior flux (K - I/2) 1 = 0",
              (k * ones - 0.5 * ones).lpNorm<Eigen::Infinity>(), 1e-10);
  }
  rep.extra["operator_identities"] = idres;
  finish_report(cfg, rep);
  return rep;
}

Report run_oracle_checks(const CaseConfig& cfg) {
  Report rep;
  rep.case_id = cfg.case_id;
  rep.problem = "oracle";
  rep.nodes = cfg.nodes_per_component;
  rep.path = "oracle";

  const Domain d = cfg.geometry.build(cfg.nodes_per_component);
  const Eigen::MatrixXd s = assemble_single_layer(d).matrix();
  const Eigen::MatrixXd dl = assemble_double_layer_pv(d).matrix();

  const auto smooth = [](int, double t) { return std::cos(t) + 0.5 * std::sin(2.0 * t); };
  const auto one = [](int, double) { return 1.0; };
  BoundaryFunction fsm =
      BoundaryFunction::sample(d, [&](int c, double t, Vec2) { return smooth(c, t); });
  const Eigen::VectorXd ssm = s * fsm.values;
  const Eigen::VectorXd dsm = dl * fsm.values;
  const Eigen::VectorXd d1 = dl * Eigen::VectorXd::Ones(d.node_count());

  double err_s = 0.0, err_d = 0.0, err_gauss = 0.0;
  for (int c = 0; c < d.component_count(); ++c) {
    const auto& comp = d.component(c);
    for (int a : {0, comp.node_count() / 3}) {
      const int i = d.component_offset(c) + a;
      OracleTarget tgt{comp.point[a], c, comp.t[a]};
      err_s = std::max(err_s, std::abs(ssm[i] - oracle_quadrature(cfg.geometry, LayerKind::Single,
                                                                  smooth, tgt, 128, 8)));
      err_d = std::max(err_d, std::abs(dsm[i] - oracle_quadrature(cfg.geometry, LayerKind::Double,
                                                                  smooth, tgt, 128, 8)));
      err_gauss = std::max(
          err_gauss, std::abs(d1[i] - oracle_quadrature(cfg.geometry, LayerKind::Double, one, tgt,
                                                        128, 8)));
    }
  }
  rep.check("single layer vs oracle", err_s, 1e-8);
  rep.check("double layer vs oracle", err_d, 1e-8);
  rep.check("oracle Gauss value D_pv[1] = 1/2", err_gauss + 0.0, 1e-8);

  if (d.component_count() > 1) {
    // cross-component entries are bare kernel values times weights
    double err = 0.0;
    const int i = d.component_offset(0);
    const int j = d.component_offset(1) + 1;
    err = std::abs(s(i, j) - fund_solution(d.node(i), d.node(j)) * d.node_weight(j));
    rep.check("cross-component entry", err, 1e-13);
  }
  finish_report(cfg, rep);
  return rep;
}

Report run_detect_exceptional(const CaseConfig& cfg) {
  Report rep;
  rep.case_id = cfg.case_id;
  rep.problem = "detect-exceptional";
  rep.nodes = cfg.nodes_per_component;

  const Domain d = cfg.geometry.build(cfg.nodes_per_component);
  const auto det = detect_exceptional(d, tolerance_of(cfg, "exceptional", 1e-8));
  rep.path = det.is_exceptional ? "exceptional" : "regular";

  const Domain outer = build_domain(d.outer(), {});
  const auto q = quadrature_functional(outer);
  rep.check("equilibrium density unit mass",
            std::abs(q.integrate(det.equilibrium_density.values) - 1.0), 1e-10);
  rep.extra["robin_constant"] = det.robin_constant;
  rep.extra["is_exceptional"] = det.is_exceptional;
  finish_report(cfg, rep);
  return rep;
}

}  // namespace bem2d

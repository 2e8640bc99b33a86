#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bem2d/evaluate.hpp"
#include "bem2d/harness.hpp"
#include "bem2d/kernels.hpp"
#include "bem2d/operators.hpp"
#include "test_domains.hpp"

using namespace bem2d;

namespace {
constexpr double kPi = std::numbers::pi;

Eigen::VectorXd ones(const Domain& d) { return Eigen::VectorXd::Ones(d.node_count()); }
}  // namespace

TEST_CASE("single layer of a constant on circles") {
  // unit circle: S 1 = R log R = 0
  const Domain unit = testdom::unit_circle().build(64);
  const Eigen::MatrixXd s1 = assemble_single_layer(unit).matrix();
  CHECK((s1 * ones(unit)).lpNorm<Eigen::Infinity>() < 1e-10);

  // radius 2: S 1 = 2 log 2 at every node
  GeometrySpec two;
  two.outer = testdom::circle({0.0, 0.0}, 2.0);
  const Domain d2 = two.build(64);
  const Eigen::MatrixXd s2 = assemble_single_layer(d2).matrix();
  const Eigen::VectorXd v = s2 * ones(d2);
  for (int i = 0; i < d2.node_count(); ++i)
    CHECK(v[i] == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("single layer of cos t on the unit circle is -cos(t)/2") {
  const GeometrySpec g = testdom::unit_circle();
  const Domain d = g.build(64);
  const Eigen::MatrixXd s = assemble_single_layer(d).matrix();
  Eigen::VectorXd phi(d.node_count());
  for (int i = 0; i < d.node_count(); ++i) phi[i] = std::cos(d.node_param(i));
  const Eigen::VectorXd v = s * phi;
  for (int i = 0; i < d.node_count(); ++i)
    CHECK(std::abs(v[i] + 0.5 * std::cos(d.node_param(i))) < 1e-10);

  // cross-check three nodes against the independent oracle at 8x
  for (int i : {0, 17, 40}) {
    OracleTarget tgt{d.node(i), 0, d.node_param(i)};
    const double ref = oracle_quadrature(g, LayerKind::Single,
                                         [](int, double t) { return std::cos(t); }, tgt, 64, 8);
    CHECK(std::abs(v[i] - ref) < 1e-10);
  }
}

TEST_CASE("double layer principal value of a constant is 1/2") {
  for (const GeometrySpec& g :
       {testdom::unit_circle(), testdom::annulus(), testdom::three_component()}) {
    const Domain d = g.build(64);
    const Eigen::MatrixXd dl = assemble_double_layer_pv(d).matrix();
    const Eigen::VectorXd v = dl * ones(d);
    CHECK(((v.array() - 0.5).abs().maxCoeff()) < 1e-10);
  }
}

TEST_CASE("double layer rows on a circle are the constant kernel times weights") {
  GeometrySpec g;
  g.outer = testdom::circle({0.5, 0.5}, 1.5);
  const Domain d = g.build(32);
  const Eigen::MatrixXd dl = assemble_double_layer_pv(d).matrix();
  for (int i = 0; i < d.node_count(); ++i)
    for (int j = 0; j < d.node_count(); ++j)
      CHECK(std::abs(dl(i, j) - d.node_weight(j) / (4.0 * kPi * 1.5)) < 1e-13);
}

TEST_CASE("adjoint double layer identities on a single circle") {
  GeometrySpec g;
  g.outer = testdom::circle({0.0, 0.0}, 2.0);
  const Domain d = g.build(64);
  const Eigen::MatrixXd k = assemble_adjoint_double_layer(d).matrix();
  const Eigen::VectorXd k1 = k * ones(d);
  for (int i = 0; i < d.node_count(); ++i) CHECK(k1[i] == doctest::Approx(0.5).epsilon(1e-12));
  // interior normal derivative of the single layer of density one vanishes
  CHECK((k1.array() - 0.5).abs().maxCoeff() < 1e-10);
}

TEST_CASE("duality K = W^-1 D^T W") {
  const Domain d = testdom::three_component().build(48);
  const Eigen::MatrixXd dl = assemble_double_layer_pv(d).matrix();
  const Eigen::MatrixXd k = assemble_adjoint_double_layer(d).matrix();
  const Eigen::VectorXd w = d.weights();
  const Eigen::MatrixXd dual =
      w.cwiseInverse().asDiagonal() * dl.transpose() * w.asDiagonal();
  CHECK((k - dual).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("weighted self-adjointness of the single layer") {
  const Domain d = testdom::annulus().build(64);
  const Eigen::MatrixXd s = assemble_single_layer(d).matrix();
  const Eigen::VectorXd w = d.weights();
  CHECK((w.asDiagonal() * s - s.transpose() * w.asDiagonal()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("tangential derivative on circles") {
  GeometrySpec g;
  g.outer = testdom::circle({0.0, 0.0}, 1.0);
  const Domain d = g.build(64);
  const Eigen::MatrixXd dds = assemble_tangential_derivative(d).matrix();
  Eigen::VectorXd f(d.node_count());
  for (int i = 0; i < d.node_count(); ++i) f[i] = std::cos(d.node_param(i));
  const Eigen::VectorXd df = dds * f;
  for (int i = 0; i < d.node_count(); ++i)
    CHECK(std::abs(df[i] + std::sin(d.node_param(i))) < 1e-12);

  // constants map to zero
  CHECK((dds * ones(d)).lpNorm<Eigen::Infinity>() < 1e-12);

  // radius 2: d/ds cos(t) = -sin(t)/2 by the chain rule
  GeometrySpec g2;
  g2.outer = testdom::circle({0.0, 0.0}, 2.0);
  const Domain d2 = g2.build(64);
  const Eigen::MatrixXd dds2 = assemble_tangential_derivative(d2).matrix();
  Eigen::VectorXd f2(d2.node_count());
  for (int i = 0; i < d2.node_count(); ++i) f2[i] = std::cos(d2.node_param(i));
  const Eigen::VectorXd df2 = dds2 * f2;
  for (int i = 0; i < d2.node_count(); ++i)
    CHECK(std::abs(df2[i] + 0.5 * std::sin(d2.node_param(i))) < 1e-12);
}

TEST_CASE("grad single layer on the unit circle") {
  const Domain d = testdom::unit_circle().build(64);
  const Eigen::MatrixXd j = assemble_grad_single_layer(d).matrix();
  Eigen::VectorXd f(d.node_count());
  for (int i = 0; i < d.node_count(); ++i) f[i] = std::cos(d.node_param(i));
  // J cos = d/dt (-cos/2) = sin/2
  const Eigen::VectorXd jf = j * f;
  for (int i = 0; i < d.node_count(); ++i)
    CHECK(std::abs(jf[i] - 0.5 * std::sin(d.node_param(i))) < 1e-10);
  // constants are annihilated on any single circle
  CHECK((j * ones(d)).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("reduction identity J'J = -I/4 + K^2") {
  // J'J cos = -cos/4 on the unit circle
  const Domain unit = testdom::unit_circle().build(64);
  const Eigen::MatrixXd j = assemble_grad_single_layer(unit).matrix();
  const Eigen::MatrixXd jp = assemble_reducing_operator(unit).matrix();
  Eigen::VectorXd f(unit.node_count());
  for (int i = 0; i < unit.node_count(); ++i) f[i] = std::cos(unit.node_param(i));
  const Eigen::VectorXd v = jp * (j * f);
  for (int i = 0; i < unit.node_count(); ++i)
    CHECK(std::abs(v[i] + 0.25 * std::cos(unit.node_param(i))) < 1e-9);

  // matrix identity applied to low Fourier modes on a multiply connected domain
  const Domain d = testdom::annulus().build(96);
  const Eigen::MatrixXd jj = assemble_grad_single_layer(d).matrix();
  const Eigen::MatrixXd k = assemble_adjoint_double_layer(d).matrix();
  Eigen::MatrixXd gap = jj * jj - Eigen::MatrixXd(k * k);
  gap.diagonal().array() += 0.25;
  for (int c = 0; c < d.component_count(); ++c) {
    const auto& comp = d.component(c);
    const int off = d.component_offset(c);
    for (int mode = 0; mode <= 8; ++mode) {
      Eigen::VectorXd basis = Eigen::VectorXd::Zero(d.node_count());
      for (int a = 0; a < comp.node_count(); ++a) basis[off + a] = std::cos(mode * comp.t[a]);
      CHECK((gap * basis).lpNorm<Eigen::Infinity>() < 1e-8);
    }
  }
}

TEST_CASE("robin operator H") {
  // h = 0 with the flag gives exactly K^2
  const Domain d = testdom::annulus().build(48);
  const Eigen::MatrixXd k = assemble_adjoint_double_layer(d).matrix();
  const auto h0 = BoundaryFunction::zeros(d);
  const Eigen::MatrixXd hmat = assemble_robin_operator(d, h0, true).matrix();
  CHECK((hmat - Eigen::MatrixXd(k * k)).cwiseAbs().maxCoeff() == 0.0);

  // errors: negative h, vanishing h without the flag
  auto hneg = BoundaryFunction::constant(d, 1.0);
  hneg.values[3] = -0.5;
  CHECK_THROWS_AS(assemble_robin_operator(d, hneg, false), std::invalid_argument);
  CHECK_THROWS_AS(assemble_robin_operator(d, h0, false), std::invalid_argument);

  // circle radius 2, h = 1: H 1 = 1/4 + 2 log 2
  GeometrySpec g2;
  g2.outer = testdom::circle({0.0, 0.0}, 2.0);
  const Domain d2 = g2.build(64);
  const auto h1 = BoundaryFunction::constant(d2, 1.0);
  const Eigen::MatrixXd h2 = assemble_robin_operator(d2, h1).matrix();
  const Eigen::VectorXd v = h2 * ones(d2);
  for (int i = 0; i < d2.node_count(); ++i)
    CHECK(v[i] == doctest::Approx(0.25 + 2.0 * std::log(2.0)).epsilon(1e-10));
}

namespace {

// Independent composition pipeline for the Robin operator test: resamples
// the analytic geometry on a fine grid and applies each stage by direct
// summation, sharing no code with the assembly routines.
struct FineGeometry {
  struct Node {
    Vec2 x, nu;
    double t, speed, kappa;
    int comp;
  };
  std::vector<Node> nodes;
  std::vector<int> offsets;
  std::vector<std::vector<double>> logw;  // per component, index difference
  int per_comp;

  FineGeometry(const GeometrySpec& g, int nn) : per_comp(nn) {
    offsets.push_back(0);
    logw.resize(g.component_count());
    for (int c = 0; c < g.component_count(); ++c) {
      const CurveSpec& sp = g.component(c);
      const double flip = c == 0 ? 1.0 : -1.0;  // all test specs are CCW
      for (int k = 0; k < nn; ++k) {
        Node nd;
        nd.t = 2.0 * kPi * k / nn;
        nd.x = sp.point(nd.t);
        const Vec2 v = sp.velocity(nd.t);
        nd.speed = norm(v);
        nd.nu = flip * Vec2{v.y, -v.x} / nd.speed;
        nd.kappa = -dot(sp.acceleration(nd.t), nd.nu) / (nd.speed * nd.speed);
        nd.comp = c;
        nodes.push_back(nd);
      }
      offsets.push_back(static_cast<int>(nodes.size()));
      // log-rule weights by index difference for the 2m-point grid
      const int m = nn / 2;
      std::vector<double> r(nn);
      for (int dd = 0; dd < nn; ++dd) {
        const double td = 2.0 * kPi * dd / nn;
        double acc = 0.0;
        for (int q = 1; q < m; ++q) acc += std::cos(q * td) / q;
        r[dd] = -(2.0 * kPi / m) * acc - kPi / (double(m) * m) * std::cos(m * td);
      }
      logw[c] = std::move(r);
    }
  }

  // single layer of nodal values at fine node i (log-split on own component)
  double single(const std::vector<double>& f, int i) const {
    const Node& ni = nodes[i];
    double acc = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const Node& nj = nodes[j];
      const double dt = 2.0 * kPi / per_comp;
      if (nj.comp == ni.comp) {
        const int a = static_cast<int>(i) - offsets[ni.comp];
        const int b = static_cast<int>(j) - offsets[ni.comp];
        const int dd = ((a - b) % per_comp + per_comp) % per_comp;
        double smooth;
        if (a == b) {
          smooth = std::log(ni.speed) / (2.0 * kPi);
        } else {
          const double sn = std::sin(0.5 * (ni.t - nj.t));
          smooth = std::log(squared_norm(ni.x - nj.x) / (4.0 * sn * sn)) / (4.0 * kPi);
        }
        acc += (logw[ni.comp][dd] / (4.0 * kPi) + dt * smooth) * f[j] * nj.speed;
      } else {
        acc += fund_solution(ni.x, nj.x) * f[j] * nj.speed * dt;
      }
    }
    return acc;
  }

  // adjoint double layer of nodal values at fine node i
  double adjoint(const std::vector<double>& f, int i) const {
    const Node& ni = nodes[i];
    double acc = 0.0;
    const double dt = 2.0 * kPi / per_comp;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const Node& nj = nodes[j];
      const double kern = (static_cast<int>(j) == i) ? ni.kappa / (4.0 * kPi)
                                                     : dnu_x_s(ni.x, nj.x, ni.nu);
      acc += kern * f[j] * nj.speed * dt;
    }
    return acc;
  }

  // double layer of nodal values at fine node i
  double dbl(const std::vector<double>& f, int i) const {
    const Node& ni = nodes[i];
    double acc = 0.0;
    const double dt = 2.0 * kPi / per_comp;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const Node& nj = nodes[j];
      const double kern = (static_cast<int>(j) == i) ? nj.kappa / (4.0 * kPi)
                                                     : dnu_y_s(ni.x, nj.x, nj.nu);
      acc += kern * f[j] * nj.speed * dt;
    }
    return acc;
  }
};

}  // namespace

TEST_CASE("robin operator matches an oracle-composed application") {
  // H phi = K^2 phi + h (S phi / 2 + D S phi), every stage applied on an
  // 8x resampling of the analytic geometry
  const GeometrySpec g = testdom::three_component();
  const int base = 64, mult = 8;
  const Domain d = g.build(base);
  const auto hfun = [](double t) { return 1.0 + 0.25 * std::cos(t); };
  const auto h = BoundaryFunction::sample(d, [&](int, double t, Vec2) { return hfun(t); });
  const Eigen::MatrixXd hmat = assemble_robin_operator(d, h).matrix();

  const auto phi = [](int c, double t) {
    return std::cos(t) + 0.2 * std::sin(2.0 * t) + 0.1 * c;
  };
  Eigen::VectorXd phin(d.node_count());
  for (int i = 0; i < d.node_count(); ++i) phin[i] = phi(d.component_of(i), d.node_param(i));
  const Eigen::VectorXd got = hmat * phin;

  const FineGeometry fine(g, base * mult);
  const int nf = static_cast<int>(fine.nodes.size());
  std::vector<double> phif(nf), sphi(nf), kphi(nf);
  for (int i = 0; i < nf; ++i) phif[i] = phi(fine.nodes[i].comp, fine.nodes[i].t);
  for (int i = 0; i < nf; ++i) sphi[i] = fine.single(phif, i);
  for (int i = 0; i < nf; ++i) kphi[i] = fine.adjoint(phif, i);

  for (int i : {0, 40, 70, 130, 150}) {
    // coarse node i sits at fine index offset + local*mult
    const int c = d.component_of(i);
    const int fi = fine.offsets[c] + (i - d.component_offset(c)) * mult;
    REQUIRE(std::abs(fine.nodes[fi].t - d.node_param(i)) < 1e-13);
    const double want =
        fine.adjoint(kphi, fi) + hfun(d.node_param(i)) * (0.5 * sphi[fi] + fine.dbl(sphi, fi));
    CHECK(std::abs(got[i] - want) < 1e-8);
  }
}

TEST_CASE("composition rejects mismatched grids") {
  const Domain a = testdom::unit_circle().build(32);
  const Domain b = testdom::unit_circle().build(32);
  const auto sa = assemble_single_layer(a);
  const auto db = assemble_double_layer_pv(b);
  CHECK_THROWS_AS(db.compose(sa), std::invalid_argument);
}

TEST_CASE("quadrature functional integrates component-wise") {
  const Domain d = testdom::annulus().build(64);
  const auto q = quadrature_functional(d);
  CHECK(q.component_measure(0) == doctest::Approx(4.0 * kPi).epsilon(1e-13));
  CHECK(q.component_measure(1) == doctest::Approx(kPi).epsilon(1e-13));
  CHECK(q.integrate(ones(d)) == doctest::Approx(5.0 * kPi).epsilon(1e-13));
}

TEST_CASE("normal derivative of the double layer through the tangential composition") {
  // d/dnu D psi = d/ds S d/ds psi, probed against one-sided finite
  // differences of the field just inside the boundary
  const GeometrySpec g = testdom::annulus();
  const int base = 128;
  const Domain d = g.build(base);
  const Eigen::MatrixXd s = assemble_single_layer(d).matrix();
  const Eigen::MatrixXd dds = assemble_tangential_derivative(d).matrix();

  const auto psi = [](int c, double t) { return std::cos(t) + 0.3 * std::sin(t) * (c + 1); };
  Eigen::VectorXd psin(d.node_count());
  for (int i = 0; i < d.node_count(); ++i) psin[i] = psi(d.component_of(i), d.node_param(i));
  const Eigen::VectorXd dnu = dds * (s * (dds * psin));

  const double step = 1e-3;
  for (int i : {0, 32, 128, 160}) {
    // cubic fit through field values at distances step..4*step inside
    Eigen::Matrix4d vand;
    Eigen::Vector4d rhs;
    for (int q = 0; q < 4; ++q) {
      const double dist = step * (q + 1);
      const Vec2 p = d.node(i) - dist * d.node_normal(i);
      OracleTarget tgt{p, -1, 0.0};
      rhs[q] = oracle_quadrature(g, LayerKind::Double, psi, tgt, base, 512);
      for (int c = 0; c < 4; ++c) vand(q, c) = std::pow(dist, c);
    }
    const Eigen::Vector4d coef = vand.fullPivLu().solve(rhs);
    const double fd = -coef[1];  // derivative along +nu at the boundary
    CHECK(std::abs(dnu[i] - fd) < 1e-4);
  }
}

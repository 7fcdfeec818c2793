#include "kbl/polysurf.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace kbl;
using namespace kbl::poly;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

PolyNVars xvar(int n = 2) { return PolyNVars::variable(n, 0); }
PolyNVars yvar(int n = 2) { return PolyNVars::variable(n, 1); }

/// x^2 + y^2 - rho^2 (or the sphere version with three variables).
PolyNVars ball_poly(double rho, int n = 2) {
  PolyNVars p = PolyNVars::constant(n, -rho * rho);
  for (int i = 0; i < n; ++i) {
    auto v = PolyNVars::variable(n, i);
    p = p + v * v;
  }
  return p;
}

CubeDomain centered_cube(int n, double side) {
  CubeDomain q;
  q.lo = Vec::Constant(n, -0.5 * side);
  q.side = side;
  return q;
}

PolyNVars random_poly(int maxdeg, Rng& rng) {
  PolyNVars p(2);
  for (int a = 0; a <= maxdeg; ++a)
    for (int b = 0; a + b <= maxdeg; ++b) {
      PolyNVars::Exps e{};
      e[0] = a;
      e[1] = b;
      p.add_term(e, rng.uniform(-1.0, 1.0));
    }
  return p;
}

}  // namespace

TEST_CASE("polynomial arithmetic expands (x + y)^2") {
  auto s = xvar() + yvar();
  auto sq = s * s;
  CHECK(sq.degree() == 2);
  CHECK(sq.terms().size() == 3);
  CHECK(sq.eval(v2(2, 3)) == Catch::Approx(25.0));
  // formal partial: 2x + 2y
  auto dx = sq.partial(0);
  CHECK(dx.eval(v2(2, 3)) == Catch::Approx(10.0));
  CHECK(dx.degree() == 1);
  // gradient assembles both partials
  Vec g = sq.gradient(v2(2, 3));
  CHECK(g[0] == Catch::Approx(10.0));
  CHECK(g[1] == Catch::Approx(10.0));
}

TEST_CASE("cancellation removes terms") {
  auto p = xvar() + (xvar() * -1.0);
  CHECK(p.zero());
  CHECK(p.degree() == 0);
}

TEST_CASE("line restriction matches a hand expansion") {
  // p = x^2 + y^2 along (1, 2) + t (0, 1): 1 + (2 + t)^2 = t^2 + 4t + 5
  auto p = xvar() * xvar() + yvar() * yvar();
  auto c = p.restrict_to_line(v2(1, 2), v2(0, 1));
  REQUIRE(c.size() == 3);
  CHECK(c[0] == Catch::Approx(5.0));
  CHECK(c[1] == Catch::Approx(4.0));
  CHECK(c[2] == Catch::Approx(1.0));
}

TEST_CASE("grid product polynomial has the counted degree and grid zeros") {
  auto p0 = grid_product_poly(1.0, 2);
  // half-integers with |c| <= 2: {+-1/2, +-3/2}, four per axis
  CHECK(p0.degree() == 8);
  CHECK(p0.eval(v2(0.5, 0.77)) == Catch::Approx(0.0).margin(1e-12));
  CHECK(p0.eval(v2(-0.33, -1.5)) == Catch::Approx(0.0).margin(1e-12));
  // independent product evaluation at a generic point
  double expect = 1.0;
  for (double c : {0.5, -0.5, 1.5, -1.5}) expect *= (0.25 - c);
  expect *= expect;  // same factor for both coordinates at (0.25, 0.25)
  CHECK(p0.eval(v2(0.25, 0.25)) == Catch::Approx(expect).epsilon(1e-12));
}

TEST_CASE("meshing a coordinate line gives unit length and a fixed normal") {
  auto mesh = mesh_zero_set(xvar(), centered_cube(2, 1.0), 0.1);
  CHECK(mesh.total_measure == Catch::Approx(1.0).margin(1e-9));
  CHECK(mesh.discarded_count == 0);
  for (const auto& f : mesh.facets) {
    CHECK(std::abs(f.normal[0]) == Catch::Approx(1.0).margin(1e-9));
    CHECK(std::abs(f.vertices[0][0]) < 1e-9);
  }
  Vec e1 = v2(1, 0), e2 = v2(0, 1);
  CHECK(directional_area(mesh, e1) == Catch::Approx(1.0).margin(1e-9));
  CHECK(directional_area(mesh, e2) == Catch::Approx(0.0).margin(1e-9));
  auto mu = normal_measure(mesh);
  CHECK(mu.total_weight() == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("meshed circle has the analytic perimeter and directional area") {
  const double rho = 0.35;
  auto mesh = mesh_zero_set(ball_poly(rho), centered_cube(2, 1.0), 0.01);
  CHECK(mesh.total_measure == Catch::Approx(2.0 * M_PI * rho).epsilon(0.01));
  CHECK(mesh.quality < 1.0);
  // |<v, n>| integrates to 4 rho for every unit v
  for (double ang : {0.0, 0.3, 1.2}) {
    Vec v = v2(std::cos(ang), std::sin(ang));
    CHECK(directional_area(mesh, v) == Catch::Approx(4.0 * rho).epsilon(0.015));
  }
  CHECK(mesh_convergence_ratio(ball_poly(rho), centered_cube(2, 1.0), 0.01) < 0.02);
}

TEST_CASE("rescaled polynomial doubles the meshed length in the doubled cube") {
  const double rho = 0.35;
  // p(x/2) vanishes on the circle of radius 2 rho
  PolyNVars half(2);
  PolyNVars::Exps ex{};
  ex[0] = 2;
  half.add_term(ex, 0.25);
  PolyNVars::Exps ey{};
  ey[1] = 2;
  half.add_term(ey, 0.25);
  PolyNVars::Exps e0{};
  half.add_term(e0, -rho * rho);
  auto mesh = mesh_zero_set(half, centered_cube(2, 2.0), 0.02);
  CHECK(mesh.total_measure == Catch::Approx(4.0 * M_PI * rho).epsilon(0.01));
}

TEST_CASE("polynomials without zeros give empty meshes") {
  auto none = ball_poly(0.0) + PolyNVars::constant(2, 1.0);
  auto mesh = mesh_zero_set(none, centered_cube(2, 1.0), 0.05);
  CHECK(mesh.facets.empty());
  CHECK(mesh.total_measure == 0.0);
  CHECK(normal_measure(mesh).atoms.empty());
  PolyNVars zero(2);
  CHECK_THROWS_AS(mesh_zero_set(zero, centered_cube(2, 1.0), 0.05), std::invalid_argument);
}

TEST_CASE("meshing a coordinate plane in three dimensions") {
  auto mesh = mesh_zero_set(xvar(3), centered_cube(3, 1.0), 1.0 / 8.0);
  CHECK(mesh.total_measure == Catch::Approx(1.0).margin(1e-6));
  for (const auto& f : mesh.facets) CHECK(std::abs(f.normal[0]) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("meshed sphere area approximates the analytic value") {
  const double rho = 0.35;
  auto mesh = mesh_zero_set(ball_poly(rho, 3), centered_cube(3, 1.0), 1.0 / 32.0);
  CHECK(mesh.total_measure == Catch::Approx(4.0 * M_PI * rho * rho).epsilon(0.02));
  CHECK(mesh.quality < 1.0);
}

TEST_CASE("line scan of a coordinate line is exactly the cross-section") {
  auto rep = line_root_scan(xvar(), centered_cube(2, 1.0), v2(1, 0), 200);
  CHECK(rep.value == Catch::Approx(1.0).margin(1e-12));
  CHECK(rep.max_count == 1);
  CHECK(rep.cap_respected);
  // lines parallel to the zero line see no roots almost surely
  auto rep2 = line_root_scan(xvar(), centered_cube(2, 1.0), v2(0, 1), 200);
  CHECK(rep2.value == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("line scan of the circle sees two roots across the diameter band") {
  const double rho = 0.35;
  for (double ang : {0.0, 0.7}) {
    auto rep = line_root_scan(ball_poly(rho), centered_cube(2, 1.0), v2(std::cos(ang), std::sin(ang)), 4000);
    CHECK(rep.value == Catch::Approx(4.0 * rho).epsilon(0.02));
    CHECK(rep.max_count == 2);
    CHECK(rep.cap_respected);
  }
}

TEST_CASE("line scan cross-validates the meshed directional area") {
  Rng rng(12001);
  int checked = 0;
  for (int trial = 0; trial < 10 && checked < 6; ++trial) {
    auto p = random_poly(3, rng);
    if (p.zero()) continue;
    auto mesh = mesh_zero_set(p, centered_cube(2, 1.0), 0.005);
    if (mesh.total_measure < 0.3) continue;  // want a visible zero set
    double ang = rng.uniform(0.0, M_PI);
    Vec v = v2(std::cos(ang), std::sin(ang));
    double da = directional_area(mesh, v);
    auto scan = line_root_scan(p, centered_cube(2, 1.0), v, 4000);
    INFO("trial=" << trial << " ang=" << ang);
    CHECK(scan.cap_respected);
    CHECK(std::abs(scan.value - da) <= 0.03 * std::max(scan.value, da) + 0.01);
    ++checked;
  }
  CHECK(checked == 6);
}

TEST_CASE("area-to-degree ratio for straight lines is one") {
  CubeDomain q;
  q.lo = v2(0, 0);
  q.side = 1.0;
  // four parallel interior lines: area 4, degree 4
  PolyNVars p = PolyNVars::constant(2, 1.0);
  for (int i = 1; i <= 4; ++i) p = p * (xvar() + PolyNVars::constant(2, -i / 5.0));
  auto rep = bezout_area_check(p, q, 0.02);
  CHECK(rep.degree == 4);
  CHECK(rep.ratio == Catch::Approx(1.0).epsilon(0.02));
  CHECK(rep.cap_respected);
  CHECK(rep.max_line_count <= 4);

  auto single = bezout_area_check(xvar(), centered_cube(2, 1.0), 0.02);
  CHECK(single.ratio == Catch::Approx(1.0).epsilon(0.01));
}

TEST_CASE("root counts never exceed the degree on random polynomials") {
  Rng rng(5150);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = random_poly(3 + trial % 4, rng);
    if (p.zero()) continue;
    double ang = rng.uniform(0.0, M_PI);
    auto rep = line_root_scan(p, centered_cube(2, 1.0), v2(std::cos(ang), std::sin(ang)), 300);
    INFO("trial=" << trial);
    CHECK(rep.cap_respected);
    CHECK(rep.max_count <= rep.degree_cap);
  }
}

TEST_CASE("grid product keeps one sheet per axis through every unit cube") {
  auto p0 = grid_product_poly(2.0, 2);
  CHECK(p0.degree() == 12);  // six half-integers per axis, two axes
  std::vector<CubeDomain> cubes;
  {
    CubeDomain a;
    a.lo = v2(0, 0);
    a.side = 1.0;
    cubes.push_back(a);
    CubeDomain b;
    b.lo = v2(-2, 1);
    b.side = 1.0;
    cubes.push_back(b);
  }
  for (const auto& q : cubes) {
    auto mesh = mesh_zero_set(p0, q, 1.0 / 32.0);
    // one vertical and one horizontal sheet of length about 1 each
    CHECK(mesh.total_measure == Catch::Approx(2.0).epsilon(0.1));
    double worst = 1e300;
    for (int k = 0; k < 8; ++k) {
      double ang = M_PI * k / 8.0;
      worst = std::min(worst, directional_area(mesh, v2(std::cos(ang), std::sin(ang))));
    }
    CHECK(worst >= 0.5);
  }
}

TEST_CASE("mixtures concatenate the normal measures linearly") {
  auto small = ball_poly(0.25), large = ball_poly(0.35);
  auto q = centered_cube(2, 1.0);
  auto sigma = make_mixture({{small, 0.5}, {large, 0.5}});
  auto mu = mixture_normal_measure(sigma, q, 0.01);
  double expect = 0.5 * 2.0 * M_PI * 0.25 + 0.5 * 2.0 * M_PI * 0.35;
  CHECK(mu.total_weight() == Catch::Approx(expect).epsilon(0.012));

  auto solo = make_mixture({{small, 1.0}});
  auto mu1 = mixture_normal_measure(solo, q, 0.01);
  auto direct = normal_measure(mesh_zero_set(small, q, 0.01));
  CHECK(mu1.total_weight() == Catch::Approx(direct.total_weight()).epsilon(1e-12));

  CHECK_THROWS_AS(make_mixture({{small, 0.4}, {large, 0.4}}), std::invalid_argument);
  CHECK_THROWS_AS(make_mixture({{PolyNVars(2), 1.0}}), std::invalid_argument);
}

TEST_CASE("disk split for a diameter beats the isoperimetric floor") {
  auto rep = disk_split_check(xvar(), 0.01, 200000, 11);
  CHECK(rep.pos_frac == Catch::Approx(0.5).margin(0.01));
  CHECK(rep.neg_frac == Catch::Approx(0.5).margin(0.01));
  CHECK(rep.boundary_length == Catch::Approx(2.0).epsilon(0.01));
  // floor = (sqrt(1/2) + sqrt(1/2) - 1) * pi
  CHECK(rep.lower_bound == Catch::Approx((std::sqrt(2.0) - 1.0) * M_PI).margin(0.05));
  CHECK(rep.holds);
}

TEST_CASE("disk split with no zero set is vacuous") {
  auto none = ball_poly(0.0) + PolyNVars::constant(2, 0.1);
  auto rep = disk_split_check(none, 0.02, 50000, 3);
  CHECK(rep.boundary_length == 0.0);
  CHECK(rep.pos_frac == Catch::Approx(1.0).margin(1e-9));
  CHECK(rep.lower_bound == Catch::Approx(0.0).margin(1e-9));
  CHECK(rep.holds);
}

TEST_CASE("random cubics through the origin satisfy the split floor") {
  Rng rng(777);
  for (int trial = 0; trial < 5; ++trial) {
    PolyNVars p(2);
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; a + b <= 3; ++b) {
        if (a == 0 && b == 0) continue;  // vanish at the origin
        PolyNVars::Exps e{};
        e[0] = a;
        e[1] = b;
        p.add_term(e, rng.uniform(-1.0, 1.0));
      }
    if (p.zero()) continue;
    auto rep = disk_split_check(p, 0.01, 100000, 1000 + trial);
    INFO("trial=" << trial);
    CHECK(rep.holds);
  }
}

TEST_CASE("ellipse split records the clipped directional areas") {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 0.25;  // semi-axes 2 and 1
  a(1, 1) = 1.0;
  auto rep = ellipse_split_report(xvar(), a, 0.01, 100000, 4);
  CHECK(rep.region_area == Catch::Approx(2.0 * M_PI).epsilon(1e-9));
  // the zero line crosses the ellipse along the minor axis
  CHECK(rep.boundary_length == Catch::Approx(2.0).epsilon(0.01));
  CHECK(rep.dir_area[0] == Catch::Approx(2.0).epsilon(0.01));
  CHECK(rep.dir_area[1] == Catch::Approx(0.0).margin(1e-9));
  CHECK(rep.pos_frac == Catch::Approx(0.5).margin(0.01));
}

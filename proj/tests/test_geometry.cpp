#include "kbl/geometry.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace kbl;
using namespace kbl::geom;

namespace {

exterior::GradedMeasure direction_measure(const std::vector<Vec>& dirs, const std::vector<double>& weights) {
  int n = static_cast<int>(dirs[0].size());
  exterior::GradedMeasure mu(n, 1);
  for (std::size_t i = 0; i < dirs.size(); ++i) mu.add(exterior::Blade::from_vectors(Mat(dirs[i].transpose())), weights[i]);
  return mu;
}

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Vec v3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

/// mu = sum of unit atoms at the given plane angles.
exterior::GradedMeasure plane_measure(const std::vector<double>& angles, double weight = 1.0) {
  std::vector<Vec> dirs;
  std::vector<double> ws;
  for (double t : angles) {
    dirs.push_back(v2(std::cos(t), std::sin(t)));
    ws.push_back(weight);
  }
  return direction_measure(dirs, ws);
}

ConvexBody cube3() {
  Mat a(6, 3);
  Vec b(6);
  a.setZero();
  for (int i = 0; i < 3; ++i) {
    a(2 * i, i) = 1.0;
    a(2 * i + 1, i) = -1.0;
    b[2 * i] = b[2 * i + 1] = 1.0;
  }
  return ConvexBody::hpolytope(a, b);
}

ConvexBody octahedron3() {
  Mat a(8, 3);
  Vec b = Vec::Ones(8);
  int r = 0;
  for (int s0 : {1, -1})
    for (int s1 : {1, -1})
      for (int s2 : {1, -1}) {
        a.row(r) << s0, s1, s2;
        ++r;
      }
  return ConvexBody::hpolytope(a, b);
}

ConvexBody square2(double half = 1.0) {
  Mat a(4, 2);
  Vec b(4);
  a << 1, 0, -1, 0, 0, 1, 0, -1;
  b << half, half, half, half;
  return ConvexBody::hpolytope(a, b);
}

/// Random symmetric H-polytope: a bounding cube plus a few random slabs.
ConvexBody random_sym_polytope(int n, Rng& rng) {
  int slabs = rng.uniform_int(3, 6);
  Mat a(2 * (n + slabs), n);
  Vec b(2 * (n + slabs));
  int r = 0;
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e[i] = 1.0;
    a.row(r) = e.transpose();
    b[r++] = 1.5;
    a.row(r) = -e.transpose();
    b[r++] = 1.5;
  }
  for (int s = 0; s < slabs; ++s) {
    Vec u = rng.unit_vector(n);
    double c = rng.uniform(0.7, 1.4);
    a.row(r) = u.transpose();
    b[r++] = c;
    a.row(r) = -u.transpose();
    b[r++] = c;
  }
  return ConvexBody::hpolytope(a, b);
}

}  // namespace

TEST_CASE("seminorm evaluates the weighted absolute pairings") {
  auto mu = direction_measure({v2(1, 0), v2(0, 1)}, {2.0, 3.0});
  Seminorm s(mu);
  // 2|x| + 3|y| by hand
  CHECK(s(v2(1, 0)) == Catch::Approx(2.0));
  CHECK(s(v2(-1, -1)) == Catch::Approx(5.0));
  CHECK(s(v2(0.5, -2)) == Catch::Approx(1.0 + 6.0));
  auto [lo, hi] = s.sphere_range();
  CHECK(lo == Catch::Approx(2.0).margin(1e-3));  // weakest direction is e1
  CHECK(hi == Catch::Approx(std::sqrt(13.0)).margin(1e-3));
  CHECK(s.ball_bounded());
}

TEST_CASE("single-direction seminorm has an unbounded ball") {
  auto mu = direction_measure({v2(1, 0)}, {1.0});
  Seminorm s(mu);
  CHECK_FALSE(s.ball_bounded());
  CHECK_THROWS_AS(seminorm_ball_polygon(s), std::invalid_argument);
  CHECK_THROWS_AS(visibility(s), std::invalid_argument);
}

TEST_CASE("crosspolytope seminorm ball is the exact diamond") {
  Seminorm s(direction_measure({v2(1, 0), v2(0, 1)}, {1.0, 1.0}));
  auto poly = seminorm_ball_polygon(s);
  REQUIRE(poly.size() == 4);
  // vertices (+-1, 0), (0, +-1) in some ccw rotation
  double rmin = 1e9, rmax = 0;
  for (const auto& p : poly) {
    rmin = std::min(rmin, p.norm());
    rmax = std::max(rmax, p.norm());
    CHECK(std::abs(p.x()) + std::abs(p.y()) == Catch::Approx(1.0).epsilon(1e-12));
  }
  CHECK(rmin == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(rmax == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(polygon_area(poly) == Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("weighted diamond has semi-axes 1/w") {
  Seminorm s(direction_measure({v2(1, 0), v2(0, 1)}, {2.0, 3.0}));
  auto poly = seminorm_ball_polygon(s);
  REQUIRE(poly.size() == 4);
  // area of a diamond with semi-axes 1/2 and 1/3
  CHECK(polygon_area(poly) == Catch::Approx(2.0 * 0.5 * (1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("three equal spread directions give the regular hexagon") {
  Seminorm s(plane_measure({0.0, M_PI / 3.0, 2.0 * M_PI / 3.0}));
  auto poly = seminorm_ball_polygon(s);
  REQUIRE(poly.size() == 6);
  for (const auto& p : poly) CHECK(p.norm() == Catch::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  // regular hexagon with circumradius 1/sqrt(3)
  CHECK(polygon_area(poly) == Catch::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("polygon-disk clipping matches closed forms") {
  std::vector<Vec2> big = {{-2, -2}, {2, -2}, {2, 2}, {-2, 2}};
  CHECK(polygon_disk_area(big, 1.0) == Catch::Approx(M_PI).epsilon(1e-12));

  std::vector<Vec2> small = {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}};
  CHECK(polygon_disk_area(small, 1.0) == Catch::Approx(1.0).epsilon(1e-12));

  // inscribed disk: square [-1,1]^2 against radius 1
  std::vector<Vec2> unit = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  CHECK(polygon_disk_area(unit, 1.0) == Catch::Approx(M_PI).epsilon(1e-9));

  // half-plane style cut at x = 1/2: pi minus the circular segment
  std::vector<Vec2> cut = {{-2, -2}, {0.5, -2}, {0.5, 2}, {-2, 2}};
  double segment = std::acos(0.5) - 0.5 * std::sqrt(0.75);
  CHECK(polygon_disk_area(cut, 1.0) == Catch::Approx(M_PI - segment).epsilon(1e-12));

  // diamond inscribed in the unit disk keeps its own area
  std::vector<Vec2> diamond = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  CHECK(polygon_disk_area(diamond, 1.0) == Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("exact volumes for the closed-form bodies") {
  CHECK(body_volume(ConvexBody::unit_ball(2)).value == Catch::Approx(M_PI).epsilon(1e-12));
  CHECK(body_volume(ConvexBody::unit_ball(3)).value == Catch::Approx(4.0 * M_PI / 3.0).epsilon(1e-12));

  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 0.25;
  a(1, 1) = 1.0;
  // semi-axes 2 and 1
  CHECK(body_volume(ConvexBody::ellipsoid_body(a)).value == Catch::Approx(2.0 * M_PI).epsilon(1e-12));

  CHECK(body_volume(cube3()).value == Catch::Approx(8.0).epsilon(1e-9));
  CHECK(body_volume(octahedron3()).value == Catch::Approx(4.0 / 3.0).epsilon(1e-9));
  CHECK(body_volume(square2(1.0)).value == Catch::Approx(4.0).epsilon(1e-9));

  auto diamond = ConvexBody::polygon_body({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
  auto est = body_volume(diamond);
  CHECK(est.exact);
  CHECK(est.value == Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("monte carlo volume agrees with the exact disk area") {
  ConvexBody disk;
  disk.n = 2;
  disk.kind = ConvexBody::Kind::Generic;
  disk.contains = [](const Vec& x) { return x.squaredNorm() <= 1.0; };
  disk.outer_radius = 1.0;
  auto est = body_volume(disk, 400000, 7);
  CHECK_FALSE(est.exact);
  CHECK(est.stderr_est > 0.0);
  CHECK(std::abs(est.value - M_PI) < 4.0 * est.stderr_est);
}

TEST_CASE("gauges: closed forms and membership bisection") {
  auto cube = cube3();
  CHECK(cube.gauge(v3(2, 0, 0)) == Catch::Approx(2.0).epsilon(1e-12));
  CHECK(cube.gauge(v3(0.5, -0.25, 0.5)) == Catch::Approx(0.5).epsilon(1e-12));

  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 0.25;
  a(1, 1) = 1.0;
  auto ell = ConvexBody::ellipsoid_body(a);
  CHECK(ell.gauge(v2(2, 0)) == Catch::Approx(1.0).epsilon(1e-12));

  ConvexBody disk;
  disk.n = 2;
  disk.kind = ConvexBody::Kind::Generic;
  disk.contains = [](const Vec& x) { return x.squaredNorm() <= 1.0; };
  disk.outer_radius = 1.0;
  CHECK(disk.gauge(v2(3, 4)) == Catch::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("hpolytope rejects bad input") {
  Mat a(2, 2);
  a << 1, 0, -1, 0;
  Vec b = Vec::Ones(2);
  // a slab is unbounded
  CHECK_THROWS_AS(ConvexBody::hpolytope(a, b), std::invalid_argument);
  Mat a2(4, 2);
  a2 << 1, 0, -1, 0, 0, 1, 0, -1;
  Vec b2(4);
  b2 << 1, 1, 1, -0.5;  // origin not interior
  CHECK_THROWS_AS(ConvexBody::hpolytope(a2, b2), std::invalid_argument);
}

TEST_CASE("inscribed ellipsoid of the square is the unit disk") {
  auto rep = john_ellipsoid(square2(1.0));
  CHECK(rep.ellipsoid.a(0, 0) == Catch::Approx(1.0).margin(1e-3));
  CHECK(rep.ellipsoid.a(1, 1) == Catch::Approx(1.0).margin(1e-3));
  CHECK(rep.ellipsoid.a(0, 1) == Catch::Approx(0.0).margin(1e-3));
  CHECK(rep.inner_ratio <= 1.0 + 1e-9);
  // the square is the extremal case: outer ratio lands exactly on sqrt(n)
  CHECK(rep.outer_ratio == Catch::Approx(1.0).margin(1e-3));
}

TEST_CASE("inscribed ellipsoid of the diamond has radius 1/sqrt(2)") {
  auto diamond = ConvexBody::polygon_body({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
  auto rep = john_ellipsoid(diamond);
  CHECK(rep.ellipsoid.a(0, 0) == Catch::Approx(2.0).margin(2e-3));
  CHECK(rep.ellipsoid.a(1, 1) == Catch::Approx(2.0).margin(2e-3));
  CHECK(rep.ellipsoid.a(0, 1) == Catch::Approx(0.0).margin(2e-3));
  CHECK(rep.inner_ratio <= 1.0 + 1e-9);
  CHECK(rep.outer_ratio <= 1.0 + 1e-3);
}

TEST_CASE("inscribed ellipsoid of an ellipsoid is itself") {
  Mat a(2, 2);
  a << 0.25, 0.05, 0.05, 1.0;
  auto rep = john_ellipsoid(ConvexBody::ellipsoid_body(a));
  CHECK((rep.ellipsoid.a - a).norm() < 1e-9);
  CHECK(rep.inner_ratio <= 1.0 + 1e-9);
}

TEST_CASE("solver path recovers an ellipse given only its support function") {
  Mat a(2, 2);
  a << 0.25, 0.0, 0.0, 1.0;
  auto exact = ConvexBody::ellipsoid_body(a);
  ConvexBody wrapped;  // same body, support oracle only
  wrapped.n = 2;
  wrapped.kind = ConvexBody::Kind::Generic;
  wrapped.contains = exact.contains;
  wrapped.support = exact.support;
  wrapped.outer_radius = 2.0;
  auto rep = john_ellipsoid(wrapped);
  CHECK((rep.ellipsoid.a - a).norm() < 1e-3);
  CHECK(rep.inner_ratio <= 1.0 + 1e-6);
}

TEST_CASE("sandwich holds on random symmetric polytopes") {
  Rng rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    for (int n : {2, 3}) {
      auto k = random_sym_polytope(n, rng);
      auto rep = john_ellipsoid(k);
      INFO("n=" << n << " trial=" << trial);
      CHECK(rep.inner_ratio <= 1.0 + 1e-9);   // exact facet check
      CHECK(rep.outer_ratio <= 1.0 + 1e-3);   // exact vertex check
      CHECK(rep.ellipsoid.volume() > 0.0);
    }
  }
}

TEST_CASE("distance between a body and itself is zero") {
  CHECK(bm_distance(cube3(), cube3()) == Catch::Approx(0.0).margin(1e-12));
  auto ball = ConvexBody::unit_ball(3);
  CHECK(bm_distance(ball, ball) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("square against disk is log sqrt(2), exactly") {
  // vertices of the square have disk-gauge sqrt(2); the disk fits inside
  double d = bm_distance(square2(1.0), ConvexBody::unit_ball(2));
  CHECK(d == Catch::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
  // symmetric in the arguments
  CHECK(bm_distance(ConvexBody::unit_ball(2), square2(1.0)) == Catch::Approx(d).epsilon(1e-12));
}

TEST_CASE("ellipsoid pair distance from the pencil eigenvalues") {
  Mat a(2, 2);
  a << 0.25, 0.0, 0.0, 1.0;
  double d = bm_distance(ConvexBody::unit_ball(2), ConvexBody::ellipsoid_body(a));
  // the ellipse doubles the ball in one axis only
  CHECK(d == Catch::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("distance satisfies the triangle inequality on random ellipsoids") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    auto rand_ell = [&]() {
      Mat g(3, 3);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) g(i, j) = rng.normal();
      Mat a = g * g.transpose() + 0.3 * Mat::Identity(3, 3);
      return ConvexBody::ellipsoid_body(a);
    };
    auto k1 = rand_ell(), k2 = rand_ell(), k3 = rand_ell();
    double d12 = bm_distance(k1, k2), d23 = bm_distance(k2, k3), d13 = bm_distance(k1, k3);
    CHECK(d13 <= d12 + d23 + 1e-9);
  }
}

TEST_CASE("visibility of the crosspolytope measure is exactly one half") {
  Seminorm s(direction_measure({v2(1, 0), v2(0, 1)}, {1.0, 1.0}));
  auto vis = visibility(s);
  CHECK(vis.exact);
  CHECK(vis.value == Catch::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("visibility scales like the ball volume") {
  // doubling the weights shrinks the diamond by 2: area 1/2, visibility 2
  Seminorm s(direction_measure({v2(1, 0), v2(0, 1)}, {2.0, 2.0}));
  CHECK(visibility(s).value == Catch::Approx(2.0).epsilon(1e-12));

  Seminorm hex(plane_measure({0.0, M_PI / 3.0, 2.0 * M_PI / 3.0}));
  CHECK(visibility(hex).value == Catch::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("3d visibility agrees with the octahedron volume") {
  Seminorm s(direction_measure({v3(1, 0, 0), v3(0, 1, 0), v3(0, 0, 1)}, {1.0, 1.0, 1.0}));
  auto vis = visibility(s, 300000, 5);
  CHECK_FALSE(vis.exact);
  // ball is the octahedron, fully inside the unit ball: vis = 1/(4/3)
  CHECK(std::abs(vis.value - 0.75) < 4.0 * vis.stderr_est + 1e-3);
}

TEST_CASE("ball-mass pairing for the diamond and hexagon measures") {
  auto rep = wedge_visibility_check(direction_measure({v2(1, 0), v2(0, 1)}, {1.0, 1.0}));
  CHECK(rep.lhs == 1.0);
  // wedge mass 2 (both ordered pairs give |det| = 1) times area 2
  CHECK(rep.rhs == Catch::Approx(4.0).epsilon(1e-12));
  CHECK(rep.lhs <= rep.rhs);

  auto hex = wedge_visibility_check(plane_measure({0.0, M_PI / 3.0, 2.0 * M_PI / 3.0}));
  // mass 3*sqrt(3), area sqrt(3)/2
  CHECK(hex.rhs == Catch::Approx(4.5).epsilon(1e-12));
}

TEST_CASE("slice and projection of the disk") {
  auto disk = ConvexBody::unit_ball(2);
  Mat s(1, 2);
  s << 1, 0;
  CHECK(slice_volume(disk, s).value == Catch::Approx(2.0).epsilon(1e-12));
  CHECK(projection_volume(disk, s).value == Catch::Approx(2.0).epsilon(1e-12));
  auto rep = slice_projection_check(disk, s);
  CHECK(rep.lhs == Catch::Approx(4.0).epsilon(1e-9));
  CHECK(rep.rhs == Catch::Approx(2.0 * M_PI).epsilon(1e-9));
  CHECK(rep.holds);
}

TEST_CASE("axis slice and shadow of the cube") {
  auto cube = cube3();
  Mat s(2, 3);
  s << 1, 0, 0, 0, 1, 0;
  CHECK(slice_volume(cube, s).value == Catch::Approx(4.0).epsilon(1e-9));
  CHECK(projection_volume(cube, s).value == Catch::Approx(2.0).epsilon(1e-9));
  auto rep = slice_projection_check(cube, s);
  CHECK(rep.lhs == Catch::Approx(8.0).epsilon(1e-9));
  CHECK(rep.rhs == Catch::Approx(24.0).epsilon(1e-9));
  CHECK(rep.holds);
}

TEST_CASE("diagonal slice of the cube attains the binomial bound") {
  auto cube = cube3();
  Mat s(1, 3);
  double c = 1.0 / std::sqrt(3.0);
  s << c, c, c;
  // slice length 2*sqrt(3); hexagonal shadow of area 4*sqrt(3); equality at 24
  CHECK(slice_volume(cube, s).value == Catch::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-9));
  CHECK(projection_volume(cube, s).value == Catch::Approx(4.0 * std::sqrt(3.0)).epsilon(1e-9));
  auto rep = slice_projection_check(cube, s);
  CHECK(rep.lhs == Catch::Approx(24.0).epsilon(1e-9));
  CHECK(rep.rhs == Catch::Approx(24.0).epsilon(1e-9));
  CHECK(rep.holds);
}

TEST_CASE("ellipsoid projection closed form matches monte carlo") {
  Mat a = Mat::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 0.25;
  a(2, 2) = 1.0 / 9.0;
  auto ell = ConvexBody::ellipsoid_body(a);
  Mat s(1, 3);
  s << 1, 0, 0;
  // shadow is the (2, 3) ellipse
  auto exact = projection_volume(ell, s);
  CHECK(exact.exact);
  CHECK(exact.value == Catch::Approx(6.0 * M_PI).epsilon(1e-12));

  ConvexBody wrapped;
  wrapped.n = 3;
  wrapped.kind = ConvexBody::Kind::Generic;
  wrapped.contains = ell.contains;
  wrapped.gauge_fn = [a](const Vec& x) { return std::sqrt(x.dot(a * x)); };
  wrapped.outer_radius = 3.0;
  auto mc = projection_volume(wrapped, s, 20000, 3);
  CHECK_FALSE(mc.exact);
  CHECK(std::abs(mc.value - exact.value) < 4.0 * mc.stderr_est + 0.05);
}

TEST_CASE("random slices stay below the binomial bound") {
  Rng rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    int n = trial % 2 == 0 ? 2 : 3;
    auto k = random_sym_polytope(n, rng);
    int kd = 1 + (n == 3 ? rng.uniform_int(0, 1) : 0);
    Mat g(kd, n);
    for (int i = 0; i < kd; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    Mat s = orthonormal_rows(g);
    if (s.rows() != kd) continue;
    auto rep = slice_projection_check(k, s);
    INFO("trial=" << trial);
    CHECK(rep.holds);
  }
}

TEST_CASE("shadow of the diamond against the direction pairing") {
  auto mu = direction_measure({v2(1, 0), v2(0, 1)}, {1.0, 1.0});
  Mat t(1, 2);
  t << 1, 0;
  auto rep = ball_projection_pairing_check(mu, t);
  // shadow on e2 has length 2; pairing with e1 is 1; ball area 2: equality
  CHECK(rep.lhs == Catch::Approx(2.0).epsilon(1e-12));
  CHECK(rep.rhs == Catch::Approx(2.0).epsilon(1e-12));

  Mat diag(1, 2);
  diag << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  auto rep2 = ball_projection_pairing_check(mu, diag);
  CHECK(rep2.lhs == Catch::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(rep2.rhs == Catch::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));
  CHECK(rep2.lhs <= rep2.rhs + 1e-9);
}

TEST_CASE("window inequality for orthogonal lines and the diamond measure") {
  Mat e1(1, 2), e2(1, 2);
  e1 << 1, 0;
  e2 << 0, 1;
  auto d = bl::make_datum(2, {e1, e2}, v2(1.0, 1.0));
  auto mu = direction_measure({v2(1, 0), v2(0, 1)}, {1.0, 1.0});
  auto rep = ball_window_inequality(d, mu, 4.0);
  // closed form applies: both pairings are 1, the constant is 1
  CHECK(rep.window_source == "loomis-whitney");
  CHECK(rep.window_value == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(rep.lhs == Catch::Approx(0.5).epsilon(1e-12));
  CHECK(rep.rhs == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(rep.lhs <= rep.rhs);
  CHECK(rep.c_lower >= 1.0);
  CHECK(rep.c_upper == Catch::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("window inequality rejects unusable measures") {
  Mat e1(1, 2), e2(1, 2);
  e1 << 1, 0;
  e2 << 0, 1;
  auto d = bl::make_datum(2, {e1, e2}, v2(1.0, 1.0));
  // unbounded ball: seminorm vanishes on e2
  auto bad = direction_measure({v2(1, 0)}, {1.0});
  CHECK_THROWS_AS(ball_window_inequality(d, bad, 4.0), std::invalid_argument);
  // heavy weights shrink the ball below the window bottom scale
  auto heavy = direction_measure({v2(1, 0), v2(0, 1)}, {10.0, 10.0});
  CHECK_THROWS_AS(ball_window_inequality(d, heavy, 4.0), std::invalid_argument);
}

TEST_CASE("slice and projection dimension checks throw") {
  auto cube = cube3();
  Mat s0(0, 3);
  CHECK_THROWS_AS(slice_volume(cube, s0), std::invalid_argument);
  Mat s3 = Mat::Identity(3, 3);
  CHECK_THROWS_AS(slice_volume(cube, s3), std::invalid_argument);
  CHECK_THROWS_AS(projection_volume(cube, s3), std::invalid_argument);
  ConvexBody no_support;
  no_support.n = 2;
  no_support.kind = ConvexBody::Kind::Generic;
  no_support.contains = [](const Vec&) { return true; };
  no_support.outer_radius = 1.0;
  CHECK_THROWS_AS(john_ellipsoid(no_support), std::invalid_argument);
}

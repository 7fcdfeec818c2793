#pragma once

/// Convex-geometry toolkit: seminorms from atomic direction measures and
/// their unit balls, convex body oracles with exact volume / slice /
/// projection paths (polygons, ellipsoids, H-polytopes) and Monte Carlo
/// fallbacks, the maximal inscribed ellipsoid, a Banach-Mazur-type distance,
/// visibility functionals, and the volume-split inequalities tying all of
/// that to the subspace pairings.

#include "kbl/bl_core.hpp"
#include "kbl/common.hpp"
#include "kbl/exterior.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace kbl::geom {

using Vec2 = Eigen::Vector2d;

inline double unit_ball_volume(int n) {
  return std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

inline std::vector<Vec> sphere_directions(int n, int count) {
  std::vector<Vec> dirs;
  dirs.reserve(count);
  if (n == 1) {
    Vec a(1), b(1);
    a << 1.0;
    b << -1.0;
    dirs = {a, b};
    return dirs;
  }
  if (n == 2) {
    for (int i = 0; i < count; ++i) {
      double t = 2.0 * M_PI * i / count;
      Vec d(2);
      d << std::cos(t), std::sin(t);
      dirs.push_back(d);
    }
    return dirs;
  }
  // Fibonacci sphere for n = 3
  require(n == 3, "sphere_directions: only n <= 3 supported");
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    double z = 1.0 - 2.0 * (i + 0.5) / count;
    double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
    Vec d(3);
    d << rad * std::cos(golden * i), rad * std::sin(golden * i), z;
    dirs.push_back(d);
  }
  return dirs;
}

// ---------------------------------------------------------------------------
// Seminorms from atomic grade-1 measures

struct Seminorm {
  exterior::GradedMeasure mu;

  explicit Seminorm(exterior::GradedMeasure m) : mu(std::move(m)) {
    require(mu.k == 1, "Seminorm: needs a grade-1 measure");
  }

  int n() const { return mu.n; }

  double operator()(const Vec& v) const {
    double s = 0.0;
    for (const auto& a : mu.atoms) s += a.weight * std::abs(a.blade.mv.coeffs().dot(v));
    return s;
  }

  /// min and max of the seminorm over a standard sphere sample (360 dirs in
  /// the plane, 1000 on the 2-sphere).
  std::pair<double, double> sphere_range() const {
    auto dirs = sphere_directions(n(), n() <= 2 ? 360 : 1000);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& d : dirs) {
      double v = (*this)(d);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return {lo, hi};
  }

  bool ball_bounded(double tol = 1e-9) const { return sphere_range().first > tol; }
};

/// Exact polygon of the unit ball of a plane seminorm.  On each angular
/// sector cut by the atom perpendiculars the seminorm is linear, <g, v> with
/// g the sign-weighted atom sum, so the ball boundary is the segment on
/// {<g, v> = 1}; vertices come from consecutive sector lines.
inline std::vector<Vec2> seminorm_ball_polygon(const Seminorm& s) {
  require(s.n() == 2, "seminorm_ball_polygon: plane seminorms only");
  require(s.ball_bounded(), "seminorm_ball_polygon: ball is unbounded");
  std::vector<Vec2> atoms;
  std::vector<double> weights;
  for (const auto& a : s.mu.atoms) {
    Vec2 u = a.blade.mv.coeffs();
    if (a.weight * u.norm() > 0.0) {
      atoms.push_back(u);
      weights.push_back(a.weight);
    }
  }
  std::vector<double> cuts;
  for (const auto& u : atoms) {
    double t = std::atan2(u.x(), -u.y());  // direction perpendicular to u
    if (t < 0) t += M_PI;
    cuts.push_back(t);
    cuts.push_back(t + M_PI);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             cuts.end());

  std::vector<Vec2> gradients;
  const int nc = static_cast<int>(cuts.size());
  for (int i = 0; i < nc; ++i) {
    double mid = cuts[i] + 0.5 * ((i + 1 < nc ? cuts[i + 1] : cuts[0] + 2.0 * M_PI) - cuts[i]);
    Vec2 v(std::cos(mid), std::sin(mid));
    Vec2 g = Vec2::Zero();
    for (std::size_t a = 0; a < atoms.size(); ++a) g += weights[a] * (atoms[a].dot(v) >= 0 ? 1.0 : -1.0) * atoms[a];
    gradients.push_back(g);
  }

  std::vector<Vec2> verts;
  for (int i = 0; i < nc; ++i) {
    Vec2 g1 = gradients[i], g2 = gradients[(i + 1) % nc];
    double det = g1.x() * g2.y() - g1.y() * g2.x();
    if (std::abs(det) < 1e-14) continue;  // same face continues across the cut
    verts.emplace_back((g2.y() - g1.y()) / det, (g1.x() - g2.x()) / det);
  }
  require(verts.size() >= 3, "seminorm_ball_polygon: degenerate ball");
  return verts;
}

inline double polygon_area(const std::vector<Vec2>& poly) {
  double area = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    area += p.x() * q.y() - p.y() * q.x();
  }
  return 0.5 * std::abs(area);
}

/// Area of (convex polygon) intersect (disk of radius r at the origin),
/// accumulated edge by edge as triangle fans with circular-segment pieces.
inline double polygon_disk_area(const std::vector<Vec2>& poly, double r) {
  auto angle = [](const Vec2& a, const Vec2& b) {
    return std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
  };
  const double r2 = r * r;
  double area = 0.0;
  const std::size_t np = poly.size();
  for (std::size_t i = 0; i < np; ++i) {
    Vec2 p = poly[i], q = poly[(i + 1) % np];
    bool pin = p.squaredNorm() <= r2, qin = q.squaredNorm() <= r2;
    if (pin && qin) {
      area += 0.5 * (p.x() * q.y() - p.y() * q.x());
      continue;
    }
    // segment/circle intersection parameters
    Vec2 d = q - p;
    double aa = d.squaredNorm();
    double bb = 2.0 * p.dot(d);
    double cc = p.squaredNorm() - r2;
    double disc = bb * bb - 4.0 * aa * cc;
    if (!pin && !qin) {
      bool crosses = false;
      double t1 = 0, t2 = 0;
      if (disc > 0.0) {
        double sq = std::sqrt(disc);
        t1 = (-bb - sq) / (2.0 * aa);
        t2 = (-bb + sq) / (2.0 * aa);
        crosses = t1 > 0.0 && t2 < 1.0 && t1 < t2;
      }
      if (!crosses) {
        area += 0.5 * r2 * angle(p, q);
      } else {
        Vec2 x1 = p + t1 * d, x2 = p + t2 * d;
        area += 0.5 * r2 * angle(p, x1);
        area += 0.5 * (x1.x() * x2.y() - x1.y() * x2.x());
        area += 0.5 * r2 * angle(x2, q);
      }
      continue;
    }
    double sq = std::sqrt(std::max(0.0, disc));
    if (pin) {  // leaves the disk at the larger root
      double t = (-bb + sq) / (2.0 * aa);
      Vec2 x = p + t * d;
      area += 0.5 * (p.x() * x.y() - p.y() * x.x());
      area += 0.5 * r2 * angle(x, q);
    } else {  // enters at the smaller root
      double t = (-bb - sq) / (2.0 * aa);
      Vec2 x = p + t * d;
      area += 0.5 * r2 * angle(p, x);
      area += 0.5 * (x.x() * q.y() - x.y() * q.x());
    }
  }
  return std::abs(area);
}

// ---------------------------------------------------------------------------
// Convex bodies

struct Ellipsoid {
  Mat a;  // {x : x^T a x <= 1}, symmetric positive definite
  double volume() const {
    return unit_ball_volume(static_cast<int>(a.rows())) / std::sqrt(a.determinant());
  }
};

struct VolumeEstimate {
  double value = 0.0;
  double stderr_est = 0.0;
  bool exact = true;
};

class ConvexBody {
 public:
  enum class Kind { Generic, Polygon, EllipsoidBody, Polytope };

  int n = 0;
  Kind kind = Kind::Generic;
  std::function<bool(const Vec&)> contains;
  std::function<double(const Vec&)> support;   // may be empty for Generic
  std::function<double(const Vec&)> gauge_fn;  // optional closed-form gauge
  double outer_radius = 0.0;

  std::vector<Vec2> poly;       // Polygon payload, ccw
  Mat ell_a, ell_ainv;          // EllipsoidBody payload
  Mat hrep_a;                   // Polytope payload: a_i . x <= b_i rows
  Vec hrep_b;
  std::vector<Vec> verts;       // Polytope vertex cache

  static ConvexBody unit_ball(int n) { return ellipsoid_body(Mat::Identity(n, n)); }

  static ConvexBody ellipsoid_body(const Mat& a) {
    ConvexBody k;
    k.n = static_cast<int>(a.rows());
    k.kind = Kind::EllipsoidBody;
    k.ell_a = a;
    k.ell_ainv = a.inverse();
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    require(es.eigenvalues().minCoeff() > 0.0, "ellipsoid_body: matrix must be positive definite");
    k.outer_radius = 1.0 / std::sqrt(es.eigenvalues().minCoeff());
    Mat ai = k.ell_ainv;
    k.contains = [a](const Vec& x) { return x.dot(a * x) <= 1.0 + 1e-12; };
    k.support = [ai](const Vec& d) { return std::sqrt(std::max(0.0, d.dot(ai * d))); };
    return k;
  }

  static ConvexBody polygon_body(std::vector<Vec2> verts_ccw) {
    ConvexBody k;
    k.n = 2;
    k.kind = Kind::Polygon;
    k.poly = std::move(verts_ccw);
    require(k.poly.size() >= 3, "polygon_body: need at least three vertices");
    for (const auto& v : k.poly) k.outer_radius = std::max(k.outer_radius, v.norm());
    auto poly = k.poly;
    k.contains = [poly](const Vec& x) {
      for (std::size_t i = 0; i < poly.size(); ++i) {
        Vec2 p = poly[i], q = poly[(i + 1) % poly.size()];
        if ((q.x() - p.x()) * (x[1] - p.y()) - (q.y() - p.y()) * (x[0] - p.x()) < -1e-12) return false;
      }
      return true;
    };
    k.support = [poly](const Vec& d) {
      double h = -std::numeric_limits<double>::infinity();
      for (const auto& v : poly) h = std::max(h, v.x() * d[0] + v.y() * d[1]);
      return h;
    };
    return k;
  }

  /// H-polytope a_i . x <= b_i with the origin interior; vertices are
  /// enumerated on construction (n = 2 or 3 only).
  static ConvexBody hpolytope(const Mat& a, const Vec& b);

  /// Membership-only intersection; exact payloads are dropped.
  static ConvexBody intersect_membership(const ConvexBody& x, const ConvexBody& y) {
    require(x.n == y.n, "intersect_membership: dimension mismatch");
    ConvexBody k;
    k.n = x.n;
    k.kind = Kind::Generic;
    auto cx = x.contains, cy = y.contains;
    k.contains = [cx, cy](const Vec& v) { return cx(v) && cy(v); };
    k.outer_radius = std::min(x.outer_radius, y.outer_radius);
    return k;
  }

  /// Gauge (Minkowski functional); exact for the exact kinds, membership
  /// bisection otherwise.
  double gauge(const Vec& x) const {
    if (gauge_fn) return gauge_fn(x);
    switch (kind) {
      case Kind::EllipsoidBody:
        return std::sqrt(std::max(0.0, x.dot(ell_a * x)));
      case Kind::Polygon: {
        double g = 0.0;
        for (std::size_t i = 0; i < poly.size(); ++i) {
          Vec2 p = poly[i], q = poly[(i + 1) % poly.size()];
          Vec2 edge = q - p;
          Vec2 normal(edge.y(), -edge.x());  // outward for ccw
          double denom = normal.x() * p.x() + normal.y() * p.y();
          if (std::abs(denom) > 1e-14) g = std::max(g, (normal.x() * x[0] + normal.y() * x[1]) / denom);
        }
        return g;
      }
      case Kind::Polytope: {
        double g = 0.0;
        for (int i = 0; i < hrep_a.rows(); ++i) g = std::max(g, hrep_a.row(i).dot(x) / hrep_b[i]);
        return g;
      }
      case Kind::Generic: {
        double norm = x.norm();
        if (norm == 0.0) return 0.0;
        // bisect t with x / t on the boundary
        double lo = norm / (outer_radius * 4.0), hi = lo;
        while (!contains(x / hi) && hi < 1e12) hi *= 2.0;
        while (contains(x / lo) && lo > 1e-12) lo *= 0.5;
        for (int it = 0; it < 80; ++it) {
          double mid = 0.5 * (lo + hi);
          (contains(x / mid) ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
      }
    }
    return 0.0;
  }
};

inline ConvexBody ConvexBody::hpolytope(const Mat& a, const Vec& b) {
  ConvexBody k;
  k.n = static_cast<int>(a.cols());
  require(k.n == 2 || k.n == 3, "hpolytope: only n = 2 or 3");
  require(a.rows() == b.size() && b.minCoeff() > 0.0, "hpolytope: need b > 0 (origin interior)");
  k.kind = Kind::Polytope;
  k.hrep_a = a;
  k.hrep_b = b;
  const int m = static_cast<int>(a.rows());
  auto feasible = [&](const Vec& x) {
    for (int i = 0; i < m; ++i)
      if (a.row(i).dot(x) > b[i] + 1e-9) return false;
    return true;
  };
  if (k.n == 2) {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        Mat s(2, 2);
        s.row(0) = a.row(i);
        s.row(1) = a.row(j);
        if (std::abs(s.determinant()) < 1e-12) continue;
        Vec rhs(2);
        rhs << b[i], b[j];
        Vec x = s.partialPivLu().solve(rhs);
        if (feasible(x)) k.verts.push_back(x);
      }
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        for (int l = j + 1; l < m; ++l) {
          Mat s(3, 3);
          s.row(0) = a.row(i);
          s.row(1) = a.row(j);
          s.row(2) = a.row(l);
          if (std::abs(s.determinant()) < 1e-10) continue;
          Vec rhs(3);
          rhs << b[i], b[j], b[l];
          Vec x = s.partialPivLu().solve(rhs);
          if (feasible(x)) k.verts.push_back(x);
        }
  }
  // dedup near-identical vertices
  std::vector<Vec> dedup;
  for (const auto& v : k.verts) {
    bool found = false;
    for (const auto& w : dedup)
      if ((v - w).norm() < 1e-9) {
        found = true;
        break;
      }
    if (!found) dedup.push_back(v);
  }
  k.verts = dedup;
  require(k.verts.size() >= std::size_t(k.n + 1), "hpolytope: unbounded or degenerate");
  for (const auto& v : k.verts) k.outer_radius = std::max(k.outer_radius, v.norm());
  Mat aa = a;
  Vec bb = b;
  k.contains = [aa, bb](const Vec& x) {
    for (int i = 0; i < aa.rows(); ++i)
      if (aa.row(i).dot(x) > bb[i] + 1e-12) return false;
    return true;
  };
  auto verts = k.verts;
  k.support = [verts](const Vec& d) {
    double h = -std::numeric_limits<double>::infinity();
    for (const auto& v : verts) h = std::max(h, v.dot(d));
    return h;
  };
  return k;
}

// ---------------------------------------------------------------------------
// Volumes

namespace detail {

/// Area of a 2D convex hull of points (monotone chain).
inline double hull_area(std::vector<Vec2> pts) {
  if (pts.size() < 3) return 0.0;
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Vec2> hull(2 * pts.size());
  int h = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0) --h;
    hull[h++] = pts[i];
  }
  for (int i = static_cast<int>(pts.size()) - 2, lower = h + 1; i >= 0; --i) {
    while (h >= lower && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0) --h;
    hull[h++] = pts[i];
  }
  hull.resize(h - 1);
  return polygon_area(hull);
}

/// Facet-decomposition volume of a 3D polytope with the origin interior.
inline double polytope3_volume(const ConvexBody& k) {
  double vol = 0.0;
  for (int i = 0; i < k.hrep_a.rows(); ++i) {
    Vec normal = k.hrep_a.row(i).transpose();
    double nn = normal.norm();
    std::vector<Vec> on_facet;
    for (const auto& v : k.verts)
      if (std::abs(normal.dot(v) - k.hrep_b[i]) < 1e-7 * std::max(1.0, k.hrep_b[i])) on_facet.push_back(v);
    if (on_facet.size() < 3) continue;
    // orthonormal frame in the facet plane
    Mat frame = complement_basis(Mat(normal.transpose() / nn), 3);
    Vec center = Vec::Zero(3);
    for (const auto& v : on_facet) center += v;
    center /= static_cast<double>(on_facet.size());
    std::vector<Vec2> flat;
    for (const auto& v : on_facet) flat.push_back(Vec2((frame * (v - center)).x(), (frame * (v - center)).y()));
    std::sort(flat.begin(), flat.end(),
              [](const Vec2& a, const Vec2& b) { return std::atan2(a.y(), a.x()) < std::atan2(b.y(), b.x()); });
    double area = 0.0;
    for (std::size_t t = 0; t < flat.size(); ++t) {
      const Vec2& p = flat[t];
      const Vec2& q = flat[(t + 1) % flat.size()];
      area += p.x() * q.y() - p.y() * q.x();
    }
    area = 0.5 * std::abs(area);
    vol += area * (k.hrep_b[i] / nn) / 3.0;
  }
  return vol;
}

}  // namespace detail

/// Volume with the exact path when the body carries one; otherwise Monte
/// Carlo over the bounding box with a reported standard error.
inline VolumeEstimate body_volume(const ConvexBody& k, long samples = 200000, std::uint64_t seed = 0) {
  VolumeEstimate est;
  switch (k.kind) {
    case ConvexBody::Kind::Polygon:
      est.value = polygon_area(k.poly);
      return est;
    case ConvexBody::Kind::EllipsoidBody:
      est.value = Ellipsoid{k.ell_a}.volume();
      return est;
    case ConvexBody::Kind::Polytope:
      if (k.n == 2) {
        std::vector<Vec2> pts;
        for (const auto& v : k.verts) pts.emplace_back(v[0], v[1]);
        est.value = detail::hull_area(pts);
      } else {
        est.value = detail::polytope3_volume(k);
      }
      return est;
    case ConvexBody::Kind::Generic: {
      require(k.outer_radius > 0.0, "body_volume: generic body without bounding radius");
      Rng rng(seed);
      const double side = 2.0 * k.outer_radius;
      double boxvol = std::pow(side, k.n);
      long hits = 0;
      Vec x(k.n);
      for (long s = 0; s < samples; ++s) {
        for (int i = 0; i < k.n; ++i) x[i] = rng.uniform(-k.outer_radius, k.outer_radius);
        if (k.contains(x)) ++hits;
      }
      double p = static_cast<double>(hits) / samples;
      est.value = p * boxvol;
      est.stderr_est = boxvol * std::sqrt(std::max(0.0, p * (1.0 - p)) / samples);
      est.exact = false;
      return est;
    }
  }
  return est;
}

inline ConvexBody seminorm_ball_body(const Seminorm& s) {
  if (s.n() == 2 && s.ball_bounded()) return ConvexBody::polygon_body(seminorm_ball_polygon(s));
  require(s.ball_bounded(), "seminorm_ball_body: ball is unbounded");
  ConvexBody k;
  k.n = s.n();
  k.kind = ConvexBody::Kind::Generic;
  auto sn = s;
  k.contains = [sn](const Vec& x) { return sn(x) <= 1.0 + 1e-12; };
  k.gauge_fn = [sn](const Vec& x) { return sn(x); };
  k.outer_radius = 1.0 / s.sphere_range().first;
  return k;
}

// ---------------------------------------------------------------------------
// Maximal inscribed ellipsoid

struct JohnReport {
  Ellipsoid ellipsoid;       // E = {x : x^T a x <= 1} contained in K
  double inner_ratio = 0.0;  // max_d h_E / h_K  (<= 1 up to tolerance)
  double outer_ratio = 0.0;  // max over K of the E-gauge divided by sqrt(n)
  int constraints_added = 0;
};

struct JohnOptions {
  int directions = 0;  // 0: 720 for n=2, 2562 for n=3
  double barrier_tmax = 1e11;
  double tol = 1e-9;
};

namespace detail {

/// max_M log det M subject to y_i^T M y_i <= 1 by a damped-Newton barrier.
inline Mat mvee_dual(const std::vector<Vec>& ys, int n, double tmax, double tol) {
  // symmetric parameter basis
  std::vector<std::pair<int, int>> basis;
  for (int a = 0; a < n; ++a)
    for (int b2 = a; b2 < n; ++b2) basis.emplace_back(a, b2);
  const int np = static_cast<int>(basis.size());
  const int nc = static_cast<int>(ys.size());

  auto to_mat = [&](const Vec& p) {
    Mat m = Mat::Zero(n, n);
    for (int k = 0; k < np; ++k) {
      auto [a, b2] = basis[k];
      m(a, b2) = p[k];
      m(b2, a) = p[k];
    }
    return m;
  };

  // u_k(i) = y_i^T E_k y_i
  Mat u(nc, np);
  for (int i = 0; i < nc; ++i)
    for (int k = 0; k < np; ++k) {
      auto [a, b2] = basis[k];
      u(i, k) = (a == b2 ? 1.0 : 2.0) * ys[i][a] * ys[i][b2];
    }

  double ymax2 = 0.0;
  for (const auto& y : ys) ymax2 = std::max(ymax2, y.squaredNorm());
  Vec p = Vec::Zero(np);
  {
    Mat m0 = Mat::Identity(n, n) * (0.9 / ymax2);
    for (int k = 0; k < np; ++k) p[k] = m0(basis[k].first, basis[k].second);
  }

  auto slacks = [&](const Vec& pp, Vec& s) {
    s = Vec::Ones(nc) - u * pp;
    return s.minCoeff() > 0.0;
  };
  auto value = [&](const Vec& pp, double t, const Vec& s) {
    Mat m = to_mat(pp);
    Eigen::LLT<Mat> llt(m);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) {
      double l = llt.matrixL()(i, i);
      if (!(l > 0.0)) return std::numeric_limits<double>::infinity();
      logdet += 2.0 * std::log(l);
    }
    return -t * logdet - s.array().log().sum();
  };

  Vec s(nc);
  require(slacks(p, s), "mvee_dual: infeasible start");
  for (double t = 1.0; t <= tmax; t *= 8.0) {
    for (int iter = 0; iter < 60; ++iter) {
      Mat m = to_mat(p);
      Mat minv = m.inverse();
      slacks(p, s);
      // gradient of -t logdet M - sum log s_i in the symmetric basis
      Vec grad(np);
      Mat gm = -t * minv;
      for (int i = 0; i < nc; ++i) gm += (ys[i] * ys[i].transpose()) / s[i];
      for (int k = 0; k < np; ++k) {
        auto [a, b2] = basis[k];
        grad[k] = (a == b2 ? 1.0 : 2.0) * gm(a, b2);
      }
      Mat hess(np, np);
      for (int k = 0; k < np; ++k)
        for (int l = k; l < np; ++l) {
          auto [a, b2] = basis[k];
          auto [c, d2] = basis[l];
          Mat ek = Mat::Zero(n, n), el = Mat::Zero(n, n);
          ek(a, b2) = ek(b2, a) = 1.0;
          el(c, d2) = el(d2, c) = 1.0;
          hess(k, l) = hess(l, k) = t * (minv * ek * minv * el).trace();
        }
      for (int i = 0; i < nc; ++i) hess += (u.row(i).transpose() * u.row(i)) / (s[i] * s[i]);

      Vec step = hess.ldlt().solve(-grad);
      double f0 = value(p, t, s);
      double alpha = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt) {
        Vec cand = p + alpha * step;
        Vec cs(nc);
        if (slacks(cand, cs)) {
          double f1 = value(cand, t, cs);
          if (f1 < f0 - 1e-4 * alpha * std::abs(grad.dot(step))) {
            p = cand;
            moved = true;
            break;
          }
          if (f1 < f0) {
            p = cand;
            moved = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!moved || grad.norm() * alpha < tol) break;
    }
  }
  Mat m = to_mat(p);
  // rescale so every sampled constraint is strictly satisfied
  double worst = 0.0;
  for (const auto& y : ys) worst = std::max(worst, y.dot(m * y));
  if (worst > 1.0) m /= worst;
  return m;
}

}  // namespace detail

/// Largest-volume ellipsoid E = {x^T a x <= 1} inscribed in a symmetric body
/// with a support oracle.  Support constraints are sampled over a standard
/// direction set, the dual problem is solved by a barrier Newton method, and
/// the solve is repeated once with any violated denser-sample constraints
/// appended.  The report carries a-posteriori sandwich ratios (exact for
/// polytope inputs, sampled otherwise).
inline JohnReport john_ellipsoid(const ConvexBody& k, const JohnOptions& opts = {}) {
  require(k.n == 2 || k.n == 3, "john_ellipsoid: only n = 2 or 3");
  require(static_cast<bool>(k.support), "john_ellipsoid: body must carry a support oracle");
  if (k.kind == ConvexBody::Kind::EllipsoidBody) {
    // the largest inscribed ellipsoid of an ellipsoid is the body itself
    JohnReport rep;
    rep.ellipsoid.a = k.ell_a;
    rep.inner_ratio = 1.0;
    rep.outer_ratio = 1.0 / std::sqrt(static_cast<double>(k.n));
    return rep;
  }
  int ndirs = opts.directions > 0 ? opts.directions : (k.n == 2 ? 720 : 2562);
  auto dirs = sphere_directions(k.n, ndirs);
  JohnReport rep;
  std::vector<Vec> ys;
  bool complete = false;  // H-rep kinds carry the full constraint set
  if (k.kind == ConvexBody::Kind::Polytope) {
    for (int i = 0; i < k.hrep_a.rows(); ++i) ys.push_back(k.hrep_a.row(i).transpose() / k.hrep_b[i]);
    complete = true;
  } else if (k.kind == ConvexBody::Kind::Polygon) {
    for (std::size_t i = 0; i < k.poly.size(); ++i) {
      Vec2 p = k.poly[i], q = k.poly[(i + 1) % k.poly.size()];
      Vec a(2);
      a << q.y() - p.y(), -(q.x() - p.x());
      double b = a[0] * p.x() + a[1] * p.y();
      require(b > 1e-14, "john_ellipsoid: polygon must be ccw with the origin interior");
      ys.push_back(a / b);
    }
    complete = true;
  } else {
    for (const auto& d : dirs) {
      double h = k.support(d);
      require(h > 0.0, "john_ellipsoid: support must be positive (origin interior)");
      ys.push_back(d / h);
    }
  }
  Mat m = detail::mvee_dual(ys, k.n, opts.barrier_tmax, opts.tol);

  // densify once: append violated constraints from a 4x sample and re-solve
  auto dense = sphere_directions(k.n, 4 * ndirs);
  if (!complete) {
    std::vector<Vec> extra;
    for (const auto& d : dense) {
      double h = k.support(d);
      if (h <= 0.0) continue;
      Vec y = d / h;
      if (y.dot(m * y) > 1.0 + 1e-9) extra.push_back(y);
    }
    if (!extra.empty()) {
      rep.constraints_added = static_cast<int>(extra.size());
      for (auto& y : extra) ys.push_back(y);
      m = detail::mvee_dual(ys, k.n, opts.barrier_tmax, opts.tol);
    }
  }

  // final feasibility rescale: shrink until E sits inside K with respect to
  // the sharpest containment test the body kind supports (yTmy is linear in
  // m, so dividing by the worst ratio restores feasibility exactly)
  double vio = 0.0;
  if (k.kind == ConvexBody::Kind::Polytope) {
    for (int i = 0; i < k.hrep_a.rows(); ++i) {
      Vec a = k.hrep_a.row(i).transpose();
      vio = std::max(vio, a.dot(m * a) / (k.hrep_b[i] * k.hrep_b[i]));
    }
  } else if (k.kind == ConvexBody::Kind::Polygon) {
    for (std::size_t i = 0; i < k.poly.size(); ++i) {
      Vec2 p = k.poly[i], q = k.poly[(i + 1) % k.poly.size()];
      Vec a(2);
      a << q.y() - p.y(), -(q.x() - p.x());
      double b = a[0] * p.x() + a[1] * p.y();
      if (std::abs(b) > 1e-14) vio = std::max(vio, a.dot(m * a) / (b * b));
    }
  } else {
    for (const auto& d : dense) {
      double h = k.support(d);
      if (h > 0.0) vio = std::max(vio, (d / h).dot(m * (d / h)));
    }
  }
  if (vio > 1.0) m /= vio;

  rep.ellipsoid.a = m.inverse();
  ConvexBody e = ConvexBody::ellipsoid_body(rep.ellipsoid.a);

  if (k.kind == ConvexBody::Kind::Polytope || k.kind == ConvexBody::Kind::Polygon) {
    // exact sandwich for H-representations: E in K iff h_E(a_i) <= b_i;
    // K in c E iff every vertex has E-gauge at most c
    rep.inner_ratio = 0.0;
    if (k.kind == ConvexBody::Kind::Polytope) {
      for (int i = 0; i < k.hrep_a.rows(); ++i)
        rep.inner_ratio = std::max(rep.inner_ratio, e.support(k.hrep_a.row(i).transpose()) / k.hrep_b[i]);
      for (const auto& v : k.verts) rep.outer_ratio = std::max(rep.outer_ratio, e.gauge(v));
    } else {
      for (std::size_t i = 0; i < k.poly.size(); ++i) {
        Vec2 p = k.poly[i], q = k.poly[(i + 1) % k.poly.size()];
        Vec2 nrm(q.y() - p.y(), -(q.x() - p.x()));
        double b = nrm.x() * p.x() + nrm.y() * p.y();
        Vec nd(2);
        nd << nrm.x(), nrm.y();
        if (b < 0) {
          nd = -nd;
          b = -b;
        }
        if (b > 1e-14) rep.inner_ratio = std::max(rep.inner_ratio, e.support(nd) / b);
      }
      for (const auto& v : k.poly) {
        Vec vv(2);
        vv << v.x(), v.y();
        rep.outer_ratio = std::max(rep.outer_ratio, e.gauge(vv));
      }
    }
    rep.outer_ratio /= std::sqrt(static_cast<double>(k.n));
  } else {
    double inner = 0.0, outer = 0.0;
    for (const auto& d : dense) {
      double hk = k.support(d), he = e.support(d);
      inner = std::max(inner, he / hk);
      outer = std::max(outer, hk / (he * std::sqrt(static_cast<double>(k.n))));
    }
    rep.inner_ratio = inner;
    rep.outer_ratio = outer;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Banach-Mazur-type distance

/// log inf { c >= 1 : c^{-1} K subset L subset c K }; exact for pairs of
/// exact-kind bodies (via vertex gauges and support at facet normals),
/// support sampling otherwise.
inline double bm_distance(const ConvexBody& k, const ConvexBody& l, int samples = 2000) {
  require(k.n == l.n, "bm_distance: dimension mismatch");
  auto one_sided = [&](const ConvexBody& inner, const ConvexBody& outer) {
    // smallest c with inner subset c * outer
    switch (inner.kind) {
      case ConvexBody::Kind::Polytope: {
        double c = 0.0;
        for (const auto& v : inner.verts) c = std::max(c, outer.gauge(v));
        return c;
      }
      case ConvexBody::Kind::Polygon: {
        double c = 0.0;
        for (const auto& v : inner.poly) {
          Vec vv(2);
          vv << v.x(), v.y();
          c = std::max(c, outer.gauge(vv));
        }
        return c;
      }
      case ConvexBody::Kind::EllipsoidBody: {
        if (outer.kind == ConvexBody::Kind::EllipsoidBody) {
          // sup_x sqrt(x^T A_out x) over x^T A_in x = 1: largest pencil eigenvalue
          Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(outer.ell_a, inner.ell_a);
          return std::sqrt(std::max(0.0, ges.eigenvalues().maxCoeff()));
        }
        if (outer.kind == ConvexBody::Kind::Polytope) {
          double c = 0.0;
          for (int i = 0; i < outer.hrep_a.rows(); ++i)
            c = std::max(c, inner.support(outer.hrep_a.row(i).transpose()) / outer.hrep_b[i]);
          return c;
        }
        break;
      }
      default:
        break;
    }
    // sampled fallback over boundary points of the inner body
    auto dirs = sphere_directions(k.n, samples);
    double c = 0.0;
    for (const auto& d : dirs) {
      double gi = inner.gauge(d);
      if (gi <= 0.0) continue;
      c = std::max(c, outer.gauge(d / gi));
    }
    return c;
  };
  double c1 = one_sided(k, l);
  double c2 = one_sided(l, k);
  return std::log(std::max({c1, c2, 1.0}));
}

// ---------------------------------------------------------------------------
// Visibility and the ball-mass pairing

/// (vol(unit ball intersect seminorm ball))^{-1}; exact polygon-disk area in
/// the plane, Monte Carlo elsewhere.
inline VolumeEstimate visibility(const Seminorm& s, long samples = 200000, std::uint64_t seed = 0) {
  require(s.ball_bounded(), "visibility: seminorm ball is unbounded");
  if (s.n() == 2) {
    auto poly = seminorm_ball_polygon(s);
    double inter = polygon_disk_area(poly, 1.0);
    return VolumeEstimate{1.0 / inter, 0.0, true};
  }
  ConvexBody cap = ConvexBody::intersect_membership(seminorm_ball_body(s), ConvexBody::unit_ball(s.n()));
  cap.outer_radius = 1.0;
  auto vol = body_volume(cap, samples, seed);
  double vis = 1.0 / vol.value;
  return VolumeEstimate{vis, vis * vol.stderr_est / vol.value, false};
}

struct PairReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double stderr_est = 0.0;
};

/// Ball-mass pairing: lhs 1 against |mu^n| * vol(ball of s_mu); finite
/// direction measures in the plane keep both sides exact.
inline PairReport wedge_visibility_check(const exterior::GradedMeasure& mu, long samples = 200000,
                                         std::uint64_t seed = 0) {
  Seminorm s(mu);
  require(s.ball_bounded(), "wedge_visibility_check: unbounded ball");
  std::vector<int> all(mu.n);
  for (int i = 0; i < mu.n; ++i) all[i] = i;
  exterior::MultiVector top = exterior::MultiVector::basis_blade(mu.n, all);
  double mass = exterior::pairing_moment_power(mu, mu.n, top);
  auto vol = s.n() == 2 ? VolumeEstimate{polygon_area(seminorm_ball_polygon(s)), 0.0, true}
                        : body_volume(seminorm_ball_body(s), samples, seed);
  return PairReport{1.0, mass * vol.value, mass * vol.stderr_est};
}

// ---------------------------------------------------------------------------
// Slice / projection volume split

namespace detail {

/// Golden-section minimization of a convex function on [lo, hi].
template <typename F>
double golden_min(F&& f, double lo, double hi, int iters = 60) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return std::min(f1, f2);
}

/// min over the fiber z + span(S) of the body gauge; k = 1 or 2.
inline double fiber_gauge_min(const ConvexBody& body, const Vec& z0, const Mat& sbasis) {
  const int k = static_cast<int>(sbasis.rows());
  const double reach = 2.0 * body.outer_radius;
  if (k == 0) return body.gauge(z0);
  if (k == 1) {
    return golden_min([&](double t) { return body.gauge(z0 + t * sbasis.row(0).transpose()); }, -reach, reach);
  }
  require(k == 2, "fiber_gauge_min: fiber dim must be <= 2");
  // cyclic coordinate descent, each line solved by golden section
  Vec t = Vec::Zero(2);
  double best = body.gauge(z0);
  for (int sweep = 0; sweep < 20; ++sweep) {
    double prev = best;
    for (int i = 0; i < 2; ++i) {
      double other = t[1 - i];
      double lo = -reach, hi = reach;
      const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
      double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
      auto eval = [&](double ti) {
        Vec p = z0 + ti * sbasis.row(i).transpose() + other * sbasis.row(1 - i).transpose();
        return body.gauge(p);
      };
      double f1 = eval(x1), f2 = eval(x2);
      for (int it = 0; it < 50; ++it) {
        if (f1 < f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - phi * (hi - lo);
          f1 = eval(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + phi * (hi - lo);
          f2 = eval(x2);
        }
      }
      t[i] = f1 < f2 ? x1 : x2;
      best = std::min(f1, f2);
    }
    if (prev - best < 1e-12) break;
  }
  return best;
}

}  // namespace detail

/// Volume of the slice K intersect span(S) (S: k x n orthonormal rows).
inline VolumeEstimate slice_volume(const ConvexBody& k, const Mat& sbasis, long samples = 200000,
                                   std::uint64_t seed = 0) {
  const int kd = static_cast<int>(sbasis.rows());
  require(kd >= 1 && kd < k.n, "slice_volume: slice dim must be in [1, n)");
  if (kd == 1) {
    // symmetric-body interval through the origin: exact via the gauge
    Vec u = sbasis.row(0).transpose();
    double gp = k.gauge(u), gm = k.gauge(-u);
    require(gp > 0.0 && gm > 0.0, "slice_volume: degenerate gauge");
    bool exact = k.kind != ConvexBody::Kind::Generic || static_cast<bool>(k.gauge_fn);
    return VolumeEstimate{1.0 / gp + 1.0 / gm, 0.0, exact};
  }
  // kd == 2 inside n = 3
  if (k.kind == ConvexBody::Kind::EllipsoidBody) {
    Mat a2 = sbasis * k.ell_a * sbasis.transpose();
    return VolumeEstimate{Ellipsoid{a2}.volume(), 0.0, true};
  }
  if (k.kind == ConvexBody::Kind::Polytope) {
    Mat a2 = k.hrep_a * sbasis.transpose();
    // 2D halfplane intersection via vertex enumeration in slice coords
    std::vector<Vec2> pts;
    for (int i = 0; i < a2.rows(); ++i)
      for (int j = i + 1; j < a2.rows(); ++j) {
        Mat s(2, 2);
        s.row(0) = a2.row(i);
        s.row(1) = a2.row(j);
        if (std::abs(s.determinant()) < 1e-12) continue;
        Vec rhs(2);
        rhs << k.hrep_b[i], k.hrep_b[j];
        Vec y = s.partialPivLu().solve(rhs);
        bool ok = true;
        for (int l = 0; l < a2.rows() && ok; ++l)
          if (a2.row(l).dot(y) > k.hrep_b[l] + 1e-9) ok = false;
        if (ok) pts.emplace_back(y[0], y[1]);
      }
    return VolumeEstimate{detail::hull_area(pts), 0.0, true};
  }
  // Monte Carlo in slice coordinates
  Rng rng(seed);
  double side = 2.0 * k.outer_radius;
  long hits = 0;
  Vec y(kd);
  for (long s = 0; s < samples; ++s) {
    for (int i = 0; i < kd; ++i) y[i] = rng.uniform(-k.outer_radius, k.outer_radius);
    if (k.contains(sbasis.transpose() * y)) ++hits;
  }
  double p = static_cast<double>(hits) / samples;
  double boxvol = std::pow(side, kd);
  return VolumeEstimate{p * boxvol, boxvol * std::sqrt(std::max(0.0, p * (1.0 - p)) / samples), false};
}

/// Volume of the orthogonal projection of K along span(S) (image in the
/// complement of S).
inline VolumeEstimate projection_volume(const ConvexBody& k, const Mat& sbasis, long samples = 200000,
                                        std::uint64_t seed = 0) {
  const int kd = static_cast<int>(sbasis.rows());
  const int pd = k.n - kd;
  require(kd >= 1 && kd < k.n, "projection_volume: dims out of range");
  Mat comp = complement_basis(sbasis, k.n);  // pd x n
  if (k.kind == ConvexBody::Kind::EllipsoidBody) {
    Mat shape = comp * k.ell_ainv * comp.transpose();  // support matrix of the shadow
    return VolumeEstimate{Ellipsoid{Mat(shape.inverse())}.volume(), 0.0, true};
  }
  if (k.kind == ConvexBody::Kind::Polytope || k.kind == ConvexBody::Kind::Polygon) {
    std::vector<Vec> vs;
    if (k.kind == ConvexBody::Kind::Polytope)
      vs = k.verts;
    else
      for (const auto& v : k.poly) {
        Vec vv(2);
        vv << v.x(), v.y();
        vs.push_back(vv);
      }
    if (pd == 1) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const auto& v : vs) {
        double t = comp.row(0).dot(v);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
      }
      return VolumeEstimate{hi - lo, 0.0, true};
    }
    std::vector<Vec2> flat;
    for (const auto& v : vs) flat.emplace_back(comp.row(0).dot(v), comp.row(1).dot(v));
    return VolumeEstimate{detail::hull_area(flat), 0.0, true};
  }
  // membership Monte Carlo in shadow coordinates via the fiber gauge
  Rng rng(seed);
  double side = 2.0 * k.outer_radius;
  long hits = 0;
  Vec z(pd);
  for (long s = 0; s < samples; ++s) {
    for (int i = 0; i < pd; ++i) z[i] = rng.uniform(-k.outer_radius, k.outer_radius);
    if (detail::fiber_gauge_min(k, comp.transpose() * z, sbasis) <= 1.0) ++hits;
  }
  double p = static_cast<double>(hits) / samples;
  double boxvol = std::pow(side, pd);
  return VolumeEstimate{p * boxvol, boxvol * std::sqrt(std::max(0.0, p * (1.0 - p)) / samples), false};
}

struct SplitReport {
  double lhs = 0.0;   // projection volume * slice volume
  double rhs = 0.0;   // binomial(n, k) * volume
  double stderr_est = 0.0;
  bool holds = false;
};

/// vol_{n-k}(shadow along T) * vol_k(K cap T) <= C(n,k) * vol_n(K).
inline SplitReport slice_projection_check(const ConvexBody& k, const Mat& sbasis, long samples = 200000,
                                          std::uint64_t seed = 0) {
  auto pv = projection_volume(k, sbasis, samples, seed);
  auto sv = slice_volume(k, sbasis, samples, seed + 1);
  auto vol = body_volume(k, samples, seed + 2);
  SplitReport rep;
  rep.lhs = pv.value * sv.value;
  rep.rhs = binomial(k.n, static_cast<int>(sbasis.rows())) * vol.value;
  rep.stderr_est = std::abs(sv.value) * pv.stderr_est + std::abs(pv.value) * sv.stderr_est +
                   binomial(k.n, static_cast<int>(sbasis.rows())) * vol.stderr_est;
  rep.holds = rep.lhs <= rep.rhs + 3.0 * rep.stderr_est + 1e-9;
  return rep;
}

/// Shadow bound for seminorm balls: vol_{n-k}(B + T) against the k-fold
/// pairing of the direction measure with T times vol(B).
inline PairReport ball_projection_pairing_check(const exterior::GradedMeasure& mu, const Mat& tbasis,
                                                long samples = 200000, std::uint64_t seed = 0) {
  Seminorm s(mu);
  require(s.ball_bounded(), "ball_projection_pairing_check: unbounded ball");
  ConvexBody ball = seminorm_ball_body(s);
  auto shadow = projection_volume(ball, tbasis, samples, seed);
  auto vol = body_volume(ball, samples, seed + 1);
  exterior::MultiVector tb = exterior::Blade::from_subspace(tbasis).mv;
  double pairing = exterior::pairing_moment_power(mu, static_cast<int>(tbasis.rows()), tb);
  PairReport rep;
  rep.lhs = shadow.value;
  rep.rhs = pairing * vol.value;
  rep.stderr_est = shadow.stderr_est + pairing * vol.stderr_est;
  return rep;
}

// ---------------------------------------------------------------------------
// Window constant against ball data

struct BallInequalityReport {
  double lhs = 0.0;          // vol(B)^{1 - P}
  double rhs = 0.0;          // window constant * prod_j pairing^{p_j}
  double window_value = 0.0;
  double c_lower = 0.0;      // observed inner radius * R
  double c_upper = 0.0;      // observed outer radius
  std::string window_source;
};

/// Window constant at (1/R, 1) against the ball of s_mu: compares
/// vol(B)^{1-P} with the estimated constant times the subspace pairings.
/// The ball must be sandwiched between scaled unit balls; vanishing
/// directions are rejected.
inline BallInequalityReport ball_window_inequality(const bl::BLDatum& d, const exterior::GradedMeasure& mu, double R,
                                                   long samples = 200000, std::uint64_t seed = 0) {
  require(R > 1.0, "ball_window_inequality: need R > 1");
  Seminorm s(mu);
  auto [lo, hi] = s.sphere_range();
  require(lo > 1e-9, "ball_window_inequality: seminorm vanishes in some direction");
  BallInequalityReport rep;
  rep.c_lower = R / hi;  // ball contains (1/hi) B, compare against 1/R scale
  rep.c_upper = 1.0 / lo;

  require(hi <= R, "ball_window_inequality: ball inner radius falls below the window bottom scale");

  double total_p = d.exponents.sum();
  auto ball = seminorm_ball_body(s);
  auto vol = s.n() == 2 ? VolumeEstimate{polygon_area(seminorm_ball_polygon(s)), 0.0, true}
                        : body_volume(ball, samples, seed);
  rep.lhs = std::pow(vol.value, 1.0 - total_p);

  // prefer an exact or Gaussian-certified constant; the window estimate is
  // only a certified lower bound
  double window = std::numeric_limits<double>::quiet_NaN();
  int dimsum = 0;
  for (int j = 0; j < d.m(); ++j) dimsum += d.dim(j);
  bool lw_shape = dimsum == d.n && d.m() >= 2;
  if (lw_shape)
    for (int j = 0; j < d.m(); ++j)
      if (std::abs(d.exponents[j] - 1.0 / (d.m() - 1)) > 1e-12) lw_shape = false;
  if (lw_shape) {
    auto lw = bl::lw_constant(d);
    if (!lw.infinite) {
      window = lw.value;
      rep.window_source = "loomis-whitney";
    }
  }
  if (!(window == window)) {
    auto g = bl::bl_gaussian(d);
    if (g.applicable && !g.divergent) {
      window = g.value;
      rep.window_source = "gaussian";
    }
  }
  if (!(window == window)) {
    auto est = bl::bl_truncated_estimate(d, {1.0 / R, 1.0});
    window = est.value;
    rep.window_source = "window-estimate:" + est.family;
  }
  rep.window_value = window;
  double prod = 1.0;
  for (int j = 0; j < d.m(); ++j) {
    int kj = d.dim(j);
    require(kj >= 1, "ball_window_inequality: subspaces must have positive dim");
    exterior::MultiVector tb = exterior::Blade::from_subspace(d.subspaces[j]).mv;
    prod *= std::pow(exterior::pairing_moment_power(mu, kj, tb), d.exponents[j]);
  }
  rep.rhs = window * prod;
  return rep;
}

}  // namespace kbl::geom

#pragma once

/// Polynomial hypersurfaces at desk scale: sparse multivariate polynomials,
/// meshed zero sets inside axis cubes (marching squares / tetrahedra with
/// bisection-refined edge roots and gradient normals), the induced normal
/// measures and directional areas, line-restriction root counting as an
/// independent estimate of directional area, the half-integer grid product
/// polynomial, and sign-split inequality reports on disks and ellipses.

#include "kbl/common.hpp"
#include "kbl/exterior.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace kbl::poly {

// ---------------------------------------------------------------------------
// Sparse polynomials

class PolyNVars {
 public:
  using Exps = std::array<int, kMaxAmbientDim>;

  explicit PolyNVars(int n = 1) : n_(n) { require(1 <= n && n <= kMaxAmbientDim, "PolyNVars: bad variable count"); }

  int vars() const { return n_; }
  const std::map<Exps, double>& terms() const { return terms_; }

  static PolyNVars constant(int n, double c) {
    PolyNVars p(n);
    p.add_term(Exps{}, c);
    return p;
  }

  static PolyNVars variable(int n, int i) {
    PolyNVars p(n);
    Exps e{};
    e[i] = 1;
    p.add_term(e, 1.0);
    return p;
  }

  void add_term(const Exps& e, double c) {
    for (int i = n_; i < kMaxAmbientDim; ++i) require(e[i] == 0, "PolyNVars: exponent beyond variable count");
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      if (c != 0.0) terms_[e] = c;
    } else {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  bool zero() const { return terms_.empty(); }

  int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
      int t = 0;
      for (int i = 0; i < n_; ++i) t += e[i];
      d = std::max(d, t);
    }
    return d;
  }

  double eval(const Vec& x) const {
    require(static_cast<int>(x.size()) == n_, "PolyNVars::eval: dimension mismatch");
    double s = 0.0;
    for (const auto& [e, c] : terms_) {
      double t = c;
      for (int i = 0; i < n_; ++i)
        for (int k = 0; k < e[i]; ++k) t *= x[i];
      s += t;
    }
    return s;
  }

  Vec gradient(const Vec& x) const {
    Vec g = Vec::Zero(n_);
    for (int i = 0; i < n_; ++i) g[i] = partial(i).eval(x);
    return g;
  }

  PolyNVars partial(int i) const {
    require(0 <= i && i < n_, "PolyNVars::partial: bad variable");
    PolyNVars out(n_);
    for (const auto& [e, c] : terms_) {
      if (e[i] == 0) continue;
      Exps f = e;
      f[i] -= 1;
      out.add_term(f, c * e[i]);
    }
    return out;
  }

  PolyNVars operator+(const PolyNVars& o) const {
    require(n_ == o.n_, "PolyNVars: variable count mismatch");
    PolyNVars out = *this;
    for (const auto& [e, c] : o.terms_) out.add_term(e, c);
    return out;
  }

  PolyNVars operator*(const PolyNVars& o) const {
    require(n_ == o.n_, "PolyNVars: variable count mismatch");
    PolyNVars out(n_);
    for (const auto& [e1, c1] : terms_)
      for (const auto& [e2, c2] : o.terms_) {
        Exps e{};
        for (int i = 0; i < n_; ++i) e[i] = e1[i] + e2[i];
        out.add_term(e, c1 * c2);
      }
    return out;
  }

  PolyNVars operator*(double c) const {
    PolyNVars out(n_);
    for (const auto& [e, co] : terms_) out.add_term(e, co * c);
    return out;
  }

  /// Coefficients of t -> p(a + t u), low degree first.
  std::vector<double> restrict_to_line(const Vec& a, const Vec& u) const {
    require(static_cast<int>(a.size()) == n_ && static_cast<int>(u.size()) == n_,
            "restrict_to_line: dimension mismatch");
    std::vector<double> out(degree() + 1, 0.0);
    for (const auto& [e, c] : terms_) {
      std::vector<double> acc{c};
      for (int i = 0; i < n_; ++i)
        for (int k = 0; k < e[i]; ++k) {
          std::vector<double> next(acc.size() + 1, 0.0);
          for (std::size_t s = 0; s < acc.size(); ++s) {
            next[s] += acc[s] * a[i];
            next[s + 1] += acc[s] * u[i];
          }
          acc = std::move(next);
        }
      for (std::size_t s = 0; s < acc.size(); ++s) out[s] += acc[s];
    }
    return out;
  }

 private:
  int n_;
  std::map<Exps, double> terms_;
};

/// Product of (x_i - c) over all variables and all half-integers |c| <= R+1;
/// the zero set is the grid of axis hyperplanes at half-integer offsets, so
/// every axis unit cube with integer corners is crossed by exactly one sheet
/// per coordinate direction.
inline PolyNVars grid_product_poly(double R, int n) {
  require(R > 0.0 && n >= 1 && n <= kMaxAmbientDim, "grid_product_poly: bad arguments");
  std::vector<double> cs;
  for (double c = 0.5; c <= R + 1.0 + 1e-12; c += 1.0) {
    cs.push_back(c);
    cs.push_back(-c);
  }
  PolyNVars p = PolyNVars::constant(n, 1.0);
  for (int i = 0; i < n; ++i)
    for (double c : cs) p = p * (PolyNVars::variable(n, i) + PolyNVars::constant(n, -c));
  return p;
}

// ---------------------------------------------------------------------------
// Zero set meshing

struct CubeDomain {
  Vec lo;
  double side = 1.0;
};

struct MeshFacet {
  std::vector<Vec> vertices;  // 2 for a segment, 3 for a triangle
  Vec centroid;
  Vec normal;       // unit gradient direction at the centroid
  double measure;   // length or area
};

struct ZeroSetMesh {
  int n = 0;
  std::vector<MeshFacet> facets;
  double total_measure = 0.0;
  double discarded_measure = 0.0;  // zero-gradient facets that found no neighbor
  int discarded_count = 0;
  double quality = 0.0;  // max |p(centroid)| / (|grad| * h) over facets
};

namespace detail {

/// Root of p on the segment [a, b] assuming a sign change between the ends.
inline Vec edge_root(const PolyNVars& p, Vec a, Vec b, double fa, double fb) {
  // signs: fa and fb straddle zero (one may be exactly zero)
  for (int it = 0; it < 80 && (b - a).norm() > 1e-10; ++it) {
    Vec m = 0.5 * (a + b);
    double fm = p.eval(m);
    if ((fm >= 0.0) == (fa >= 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  return 0.5 * (a + b);
}

inline void push_facet(ZeroSetMesh& mesh, const PolyNVars& p, std::vector<Vec> verts, double h) {
  MeshFacet f;
  f.vertices = std::move(verts);
  const int n = static_cast<int>(f.vertices[0].size());
  f.centroid = Vec::Zero(n);
  for (const auto& v : f.vertices) f.centroid += v;
  f.centroid /= static_cast<double>(f.vertices.size());
  if (f.vertices.size() == 2) {
    f.measure = (f.vertices[1] - f.vertices[0]).norm();
  } else {
    Eigen::Vector3d u = f.vertices[1] - f.vertices[0];
    Eigen::Vector3d w = f.vertices[2] - f.vertices[0];
    f.measure = 0.5 * u.cross(w).norm();
  }
  if (f.measure <= 0.0) return;  // collapsed facet, carries nothing
  Vec g = p.gradient(f.centroid);
  double gn = g.norm();
  if (gn < 1e-12) {
    // flagged for the redistribution pass
    f.normal = Vec::Zero(n);
    mesh.facets.push_back(std::move(f));
    return;
  }
  f.normal = g / gn;
  double q = std::abs(p.eval(f.centroid)) / (gn * h);
  mesh.quality = std::max(mesh.quality, q);
  mesh.facets.push_back(std::move(f));
}

inline void mesh_cells_2d(ZeroSetMesh& mesh, const PolyNVars& p, const CubeDomain& q, int cells, double h) {
  // corner value grid
  std::vector<double> grid((cells + 1) * (cells + 1));
  auto at = [&](int i, int j) -> double& { return grid[i * (cells + 1) + j]; };
  for (int i = 0; i <= cells; ++i)
    for (int j = 0; j <= cells; ++j) {
      Vec x(2);
      x << q.lo[0] + h * i, q.lo[1] + h * j;
      at(i, j) = p.eval(x);
    }
  auto corner = [&](int i, int j) {
    Vec x(2);
    x << q.lo[0] + h * i, q.lo[1] + h * j;
    return x;
  };
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j) {
      double f00 = at(i, j), f10 = at(i + 1, j), f11 = at(i + 1, j + 1), f01 = at(i, j + 1);
      bool s00 = f00 >= 0, s10 = f10 >= 0, s11 = f11 >= 0, s01 = f01 >= 0;
      // edge order: bottom, right, top, left
      struct Cross {
        Vec pt;
        int edge;
      };
      std::vector<Cross> cr;
      if (s00 != s10) cr.push_back({edge_root(p, corner(i, j), corner(i + 1, j), f00, f10), 0});
      if (s10 != s11) cr.push_back({edge_root(p, corner(i + 1, j), corner(i + 1, j + 1), f10, f11), 1});
      if (s11 != s01) cr.push_back({edge_root(p, corner(i + 1, j + 1), corner(i, j + 1), f11, f01), 2});
      if (s01 != s00) cr.push_back({edge_root(p, corner(i, j + 1), corner(i, j), f01, f00), 3});
      if (cr.size() == 2) {
        push_facet(mesh, p, {cr[0].pt, cr[1].pt}, h);
      } else if (cr.size() == 4) {
        // saddle cell: the center sign decides which corners pair up
        Vec c(2);
        c << q.lo[0] + h * (i + 0.5), q.lo[1] + h * (j + 0.5);
        bool sc = p.eval(c) >= 0;
        // with signs +-+- around the cell, same-center pairing hugs f00
        if (sc == s00) {
          push_facet(mesh, p, {cr[0].pt, cr[1].pt}, h);  // around corner (i+1, j)
          push_facet(mesh, p, {cr[2].pt, cr[3].pt}, h);  // around corner (i, j+1)
        } else {
          push_facet(mesh, p, {cr[3].pt, cr[0].pt}, h);  // around corner (i, j)
          push_facet(mesh, p, {cr[1].pt, cr[2].pt}, h);  // around corner (i+1, j+1)
        }
      }
    }
}

inline void mesh_cells_3d(ZeroSetMesh& mesh, const PolyNVars& p, const CubeDomain& q, int cells, double h) {
  const int stride = cells + 1;
  std::vector<double> grid(stride * stride * stride);
  auto at = [&](int i, int j, int k) -> double& { return grid[(i * stride + j) * stride + k]; };
  for (int i = 0; i <= cells; ++i)
    for (int j = 0; j <= cells; ++j)
      for (int k = 0; k <= cells; ++k) {
        Vec x(3);
        x << q.lo[0] + h * i, q.lo[1] + h * j, q.lo[2] + h * k;
        at(i, j, k) = p.eval(x);
      }
  // Kuhn subdivision: six tetrahedra along the main diagonal 000 -> 111,
  // listed as bit masks of the cube corner offsets
  static const int tets[6][4] = {{0, 1, 3, 7}, {0, 3, 2, 7}, {0, 2, 6, 7},
                                 {0, 6, 4, 7}, {0, 4, 5, 7}, {0, 5, 1, 7}};
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j)
      for (int k = 0; k < cells; ++k) {
        Vec base(3);
        base << q.lo[0] + h * i, q.lo[1] + h * j, q.lo[2] + h * k;
        std::array<Vec, 8> pos;
        std::array<double, 8> val;
        for (int c = 0; c < 8; ++c) {
          Vec x = base;
          x[0] += h * ((c >> 0) & 1);
          x[1] += h * ((c >> 1) & 1);
          x[2] += h * ((c >> 2) & 1);
          pos[c] = x;
          val[c] = at(i + ((c >> 0) & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
        }
        for (const auto& tet : tets) {
          std::array<int, 4> vs = {tet[0], tet[1], tet[2], tet[3]};
          std::vector<int> plus, minus;
          for (int v : vs) (val[v] >= 0 ? plus : minus).push_back(v);
          if (plus.empty() || minus.empty()) continue;
          auto cut = [&](int a, int b) { return edge_root(p, pos[a], pos[b], val[a], val[b]); };
          if (plus.size() == 1 || minus.size() == 1) {
            int lone = plus.size() == 1 ? plus[0] : minus[0];
            const auto& others = plus.size() == 1 ? minus : plus;
            push_facet(mesh, p, {cut(lone, others[0]), cut(lone, others[1]), cut(lone, others[2])}, h);
          } else {
            // 2-2 split: quad with corners on the four straddling edges
            Vec q00 = cut(plus[0], minus[0]), q01 = cut(plus[0], minus[1]);
            Vec q10 = cut(plus[1], minus[0]), q11 = cut(plus[1], minus[1]);
            push_facet(mesh, p, {q00, q01, q11}, h);
            push_facet(mesh, p, {q00, q11, q10}, h);
          }
        }
      }
}

}  // namespace detail

/// Mesh {p = 0} inside the axis cube; facets carry bisection-refined
/// vertices, unit gradient normals, and measure.  Zero-gradient facets hand
/// their measure to facets sharing a vertex; if none exists the loss is
/// reported in discarded_measure.
inline ZeroSetMesh mesh_zero_set(const PolyNVars& p, const CubeDomain& q, double h) {
  require(!p.zero(), "mesh_zero_set: zero polynomial");
  const int n = p.vars();
  require(n == 2 || n == 3, "mesh_zero_set: only n = 2 or 3");
  require(static_cast<int>(q.lo.size()) == n, "mesh_zero_set: cube dimension mismatch");
  require(h > 0.0 && q.side > 0.0, "mesh_zero_set: need positive size and resolution");
  int cells = std::max(1, static_cast<int>(std::lround(q.side / h)));
  double step = q.side / cells;

  ZeroSetMesh mesh;
  mesh.n = n;
  if (n == 2)
    detail::mesh_cells_2d(mesh, p, q, cells, step);
  else
    detail::mesh_cells_3d(mesh, p, q, cells, step);

  // redistribute facets whose centroid gradient vanished
  std::vector<MeshFacet> kept;
  std::vector<MeshFacet> orphans;
  for (auto& f : mesh.facets) {
    if (f.normal.norm() > 0.5)
      kept.push_back(std::move(f));
    else
      orphans.push_back(std::move(f));
  }
  const double tol = 1e-9 * q.side;
  for (const auto& orphan : orphans) {
    std::vector<std::size_t> neighbors;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      bool shares = false;
      for (const auto& v : kept[i].vertices)
        for (const auto& w : orphan.vertices)
          if ((v - w).norm() < tol) shares = true;
      if (shares) neighbors.push_back(i);
    }
    if (neighbors.empty()) {
      mesh.discarded_measure += orphan.measure;
      ++mesh.discarded_count;
    } else {
      for (auto i : neighbors) kept[i].measure += orphan.measure / neighbors.size();
    }
  }
  mesh.facets = std::move(kept);
  for (const auto& f : mesh.facets) mesh.total_measure += f.measure;
  return mesh;
}

/// Relative change of total measure when the resolution is halved; large
/// values flag an under-resolved mesh.
inline double mesh_convergence_ratio(const PolyNVars& p, const CubeDomain& q, double h) {
  double a = mesh_zero_set(p, q, h).total_measure;
  double b = mesh_zero_set(p, q, 0.5 * h).total_measure;
  return std::abs(a - b) / std::max(1e-300, std::abs(b));
}

/// One grade-1 atom per facet: (unit normal, facet measure); total mass is
/// the mesh area by construction.
inline exterior::GradedMeasure normal_measure(const ZeroSetMesh& mesh) {
  exterior::GradedMeasure mu(mesh.n, 1);
  for (const auto& f : mesh.facets) mu.add(exterior::Blade::from_vectors(Mat(f.normal.transpose())), f.measure);
  return mu;
}

inline double directional_area(const ZeroSetMesh& mesh, const Vec& v) {
  require(std::abs(v.norm() - 1.0) < 1e-9, "directional_area: direction must be unit");
  double s = 0.0;
  for (const auto& f : mesh.facets) s += f.measure * std::abs(f.normal.dot(v));
  return s;
}

// ---------------------------------------------------------------------------
// Root counting along lines

namespace detail {

inline double eval_poly1(const std::vector<double>& c, double t) {
  double s = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) s = s * t + c[i];
  return s;
}

inline int trimmed_degree(const std::vector<double>& c) {
  double mx = 0.0;
  for (double v : c) mx = std::max(mx, std::abs(v));
  if (mx == 0.0) return -1;
  int d = -1;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (std::abs(c[i]) > 1e-12 * mx) d = static_cast<int>(i);
  return d;
}

/// Sign-change root count on [t0, t1].  Interior nodes sit at an irrational
/// fraction of the subdivision so lattice-aligned roots cannot land exactly
/// on a node.  Returns -1 when the restriction vanishes identically and -2
/// when a node value is exactly zero (caller jitters the line and retries).
inline int count_roots(const std::vector<double>& c, double t0, double t1) {
  int deg = trimmed_degree(c);
  if (deg <= 0) return deg == 0 ? 0 : -1;
  const int m = 4 * deg;
  const double irr = 0.3819660112501051;  // golden-section offset
  std::vector<double> nodes;
  nodes.push_back(t0);
  for (int k = 0; k < m; ++k) nodes.push_back(t0 + (k + irr) * (t1 - t0) / m);
  nodes.push_back(t1);
  int count = 0;
  double prev = eval_poly1(c, nodes[0]);
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    double cur = eval_poly1(c, nodes[k]);
    if (cur == 0.0 || prev == 0.0) return -2;
    if ((cur > 0.0) != (prev > 0.0)) ++count;
    prev = cur;
  }
  return count;
}

}  // namespace detail

struct LineRootReport {
  double value = 0.0;      // average root count times the cross-section width
  int max_count = 0;       // largest per-line count observed
  int degree_cap = 0;      // effective degree bound the counts must respect
  bool cap_respected = true;
  int resampled = 0;       // lines jittered around tangency or node hits
};

/// Average number of zeros of p along lines parallel to v through the cube,
/// scaled by the cross-section width; a change of variables makes this an
/// independent estimate of the directional area in direction v.
inline LineRootReport line_root_scan(const PolyNVars& p, const CubeDomain& q, const Vec& v, int lines = 500) {
  require(p.vars() == 2, "line_root_scan: plane polynomials only");
  require(std::abs(v.norm() - 1.0) < 1e-9, "line_root_scan: direction must be unit");
  require(lines >= 1, "line_root_scan: need at least one line");
  Vec u(2);
  u << -v[1], v[0];  // offsets move along the perpendicular
  // project the cube on the offset axis to get the cross-section interval
  double olo = 1e300, ohi = -1e300;
  for (int cx = 0; cx <= 1; ++cx)
    for (int cy = 0; cy <= 1; ++cy) {
      Vec corner(2);
      corner << q.lo[0] + cx * q.side, q.lo[1] + cy * q.side;
      double t = u.dot(corner);
      olo = std::min(olo, t);
      ohi = std::max(ohi, t);
    }
  // the piece of the line off*u + t*v inside the cube, by slab clipping
  auto clip = [&](const Vec& base, double& t0, double& t1) {
    t0 = -1e300;
    t1 = 1e300;
    for (int i = 0; i < 2; ++i) {
      double a = q.lo[i] - base[i], b = q.lo[i] + q.side - base[i];
      if (std::abs(v[i]) < 1e-15) {
        if (a > 0.0 || b < 0.0) return false;
      } else {
        double ta = a / v[i], tb = b / v[i];
        t0 = std::max(t0, std::min(ta, tb));
        t1 = std::min(t1, std::max(ta, tb));
      }
    }
    return t1 > t0;
  };

  LineRootReport rep;
  rep.degree_cap = p.degree();
  long total = 0;
  for (int i = 0; i < lines; ++i) {
    double frac = (i + 0.5) / lines;
    int count = -2;
    for (int attempt = 0; attempt < 4 && count < 0; ++attempt) {
      double off = olo + (frac + attempt * 1.37e-4) * (ohi - olo);
      Vec base = off * u;
      double t0, t1;
      if (!clip(base, t0, t1)) {
        count = 0;
        break;
      }
      auto c = p.restrict_to_line(base, v);
      count = detail::count_roots(c, t0, t1);
      if (attempt > 0 && count >= 0) ++rep.resampled;
    }
    if (count < 0) count = 0;  // restriction degenerate along this family
    int eff = std::min(count, rep.degree_cap);
    if (count > rep.degree_cap) rep.cap_respected = false;
    rep.max_count = std::max(rep.max_count, count);
    total += eff;
  }
  rep.value = (static_cast<double>(total) / lines) * (ohi - olo);
  return rep;
}

struct BezoutReport {
  double mesh_measure = 0.0;
  int degree = 0;
  double ratio = 0.0;  // mesh measure / degree
  int max_line_count = 0;
  bool cap_respected = true;
};

/// Mesh area against the degree, with per-line root counts asserted not to
/// exceed the degree over a deterministic fan of directions.
inline BezoutReport bezout_area_check(const PolyNVars& p, const CubeDomain& q, double h = 0.02,
                                      int lines_per_dir = 64, int dirs = 8) {
  BezoutReport rep;
  rep.degree = p.degree();
  require(rep.degree >= 1, "bezout_area_check: constant polynomial");
  auto mesh = mesh_zero_set(p, q, h);
  rep.mesh_measure = mesh.total_measure;
  rep.ratio = rep.mesh_measure / rep.degree;
  for (int d = 0; d < dirs; ++d) {
    double ang = M_PI * (d + 0.318) / dirs;
    Vec v(2);
    v << std::cos(ang), std::sin(ang);
    auto scan = line_root_scan(p, q, v, lines_per_dir);
    rep.max_line_count = std::max(rep.max_line_count, scan.max_count);
    rep.cap_respected = rep.cap_respected && scan.cap_respected;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Atomic polynomial mixtures

struct PolynomialMixture {
  std::vector<std::pair<PolyNVars, double>> atoms;
};

inline PolynomialMixture make_mixture(std::vector<std::pair<PolyNVars, double>> atoms) {
  require(!atoms.empty(), "make_mixture: empty mixture");
  double total = 0.0;
  for (auto& [p, w] : atoms) {
    require(!p.zero(), "make_mixture: zero polynomial atom");
    require(w > 0.0, "make_mixture: weights must be positive");
    total += w;
  }
  require(std::abs(total - 1.0) < 1e-9, "make_mixture: weights must sum to one");
  return PolynomialMixture{std::move(atoms)};
}

/// Weighted concatenation of the per-polynomial normal measures on the cube.
inline exterior::GradedMeasure mixture_normal_measure(const PolynomialMixture& sigma, const CubeDomain& q, double h) {
  require(!sigma.atoms.empty(), "mixture_normal_measure: empty mixture");
  const int n = sigma.atoms.front().first.vars();
  exterior::GradedMeasure mu(n, 1);
  for (const auto& [p, w] : sigma.atoms) {
    auto part = normal_measure(mesh_zero_set(p, q, h));
    for (const auto& atom : part.atoms) mu.add(atom.blade, w * atom.weight);
  }
  return mu;
}

// ---------------------------------------------------------------------------
// Sign-split reports on disks and ellipses

namespace detail {

/// Length of the piece of segment [a, b] inside {x^T A x <= 1}.
inline double clip_segment_to_ellipse(const Vec& a, const Vec& b, const Mat& A) {
  Vec d = b - a;
  double c2 = d.dot(A * d);
  double c1 = 2.0 * a.dot(A * d);
  double c0 = a.dot(A * a) - 1.0;
  double len = d.norm();
  if (c2 < 1e-300) return c0 <= 0.0 ? len : 0.0;
  double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc <= 0.0) return c0 <= 0.0 ? len : 0.0;
  double sq = std::sqrt(disc);
  double t0 = (-c1 - sq) / (2.0 * c2), t1 = (-c1 + sq) / (2.0 * c2);
  double lo = std::max(0.0, t0), hi = std::min(1.0, t1);
  return hi > lo ? (hi - lo) * len : 0.0;
}

}  // namespace detail

struct SignSplitReport {
  double pos_frac = 0.0;  // fraction of the region with p > 0
  double neg_frac = 0.0;
  double frac_stderr = 0.0;
  double boundary_length = 0.0;  // meshed length of {p = 0} clipped to the region
  double lower_bound = 0.0;      // isoperimetric floor from the fractions (disk only)
  bool holds = false;
  double region_area = 0.0;
  Vec dir_area;  // directional areas of the clipped boundary along the axes
};

namespace detail {

inline SignSplitReport split_core(const PolyNVars& p, const Mat& A, double h, long samples, std::uint64_t seed) {
  require(p.vars() == 2, "sign split: plane polynomials only");
  require(A.rows() == 2 && A.cols() == 2, "sign split: shape matrix must be 2x2");
  Mat ainv = A.inverse();
  double r0 = std::sqrt(ainv(0, 0)), r1 = std::sqrt(ainv(1, 1));  // bounding box half-widths

  SignSplitReport rep;
  rep.region_area = M_PI / std::sqrt(A.determinant());

  Rng rng(seed);
  long inside = 0, pos = 0, neg = 0;
  for (long s = 0; s < samples; ++s) {
    Vec x(2);
    x << rng.uniform(-r0, r0), rng.uniform(-r1, r1);
    if (x.dot(A * x) > 1.0) continue;
    ++inside;
    double v = p.eval(x);
    if (v > 0.0)
      ++pos;
    else if (v < 0.0)
      ++neg;
  }
  require(inside > 0, "sign split: no samples landed in the region");
  rep.pos_frac = static_cast<double>(pos) / inside;
  rep.neg_frac = static_cast<double>(neg) / inside;
  rep.frac_stderr = std::sqrt(0.25 / inside);

  CubeDomain box;
  box.lo = Vec(2);
  double half = std::max(r0, r1);
  box.lo << -half, -half;
  box.side = 2.0 * half;
  auto mesh = mesh_zero_set(p, box, h);
  rep.dir_area = Vec::Zero(2);
  for (const auto& f : mesh.facets) {
    double len = clip_segment_to_ellipse(f.vertices[0], f.vertices[1], A);
    rep.boundary_length += len;
    rep.dir_area[0] += len * std::abs(f.normal[0]);
    rep.dir_area[1] += len * std::abs(f.normal[1]);
  }
  return rep;
}

}  // namespace detail

/// Sign split on the unit disk: Monte Carlo sign fractions a, b, the clipped
/// meshed boundary length, and the relative-isoperimetry floor
/// (sqrt(a) + sqrt(b) - 1) * pi which any curve separating the two sign
/// regions must reach.
inline SignSplitReport disk_split_check(const PolyNVars& p, double h = 0.01, long samples = 200000,
                                        std::uint64_t seed = 0) {
  SignSplitReport rep = detail::split_core(p, Mat::Identity(2, 2), h, samples, seed);
  double floor_term = std::sqrt(rep.pos_frac) + std::sqrt(rep.neg_frac) - 1.0;
  rep.lower_bound = std::max(0.0, floor_term) * M_PI;
  // allow for the Monte Carlo error in the fractions
  double derr = 0.0;
  if (rep.pos_frac > 1e-12) derr += rep.frac_stderr / (2.0 * std::sqrt(rep.pos_frac));
  if (rep.neg_frac > 1e-12) derr += rep.frac_stderr / (2.0 * std::sqrt(rep.neg_frac));
  rep.holds = rep.boundary_length + 1e-9 >= rep.lower_bound - 3.0 * derr * M_PI;
  return rep;
}

/// Affine variant on the ellipse {x^T A x <= 1}: no closed-form floor, but
/// the directional-area sum against the region area is recorded so balanced
/// splits can be checked against an observed constant.
inline SignSplitReport ellipse_split_report(const PolyNVars& p, const Mat& A, double h = 0.01, long samples = 200000,
                                            std::uint64_t seed = 0) {
  SignSplitReport rep = detail::split_core(p, A, h, samples, seed);
  rep.lower_bound = 0.0;
  rep.holds = true;
  return rep;
}

}  // namespace kbl::poly

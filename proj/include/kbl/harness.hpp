#pragma once

/// Grid experiment harness: families of affine flats against the unit-cube
/// grid over a ball.  Builds the incidence structure and evaluates the two
/// sides of the Kakeya-type inequalities in several forms -- pointwise
/// uniform sums, per-cube tensor norms, exact wedge sums -- plus the
/// surface-pairing functionals and the discrete duality audit that ties the
/// per-cube quantities back to a global bound.

#include "kbl/bl_core.hpp"
#include "kbl/exterior.hpp"
#include "kbl/fremlin.hpp"
#include "kbl/geometry.hpp"
#include "kbl/polysurf.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace kbl::harness {

using exterior::MultiVector;

// ---------------------------------------------------------------------------
// Flats, families, grids

struct AffineSubspace {
  int n = 0;
  int k = 0;           // dimension of the direction space
  Vec a;               // base point
  Mat basis;           // k x n orthonormal direction rows
  Mat comp;            // (n-k) x n orthonormal rows of the normal space
  Mat normal_proj;     // comp^T comp, the projector onto the normal space
  exterior::Blade blade{exterior::MultiVector(1, 0), Mat(0, 1)};  // unit k-blade of the directions

  /// Coordinates of x in the quotient by the direction space.
  Vec quotient_coords(const Vec& x) const { return comp * (x - a); }
};

inline AffineSubspace affine_subspace(const Vec& point, const Mat& directions) {
  const int n = static_cast<int>(point.size());
  require(1 <= n && n <= kMaxAmbientDim, "affine_subspace: ambient dim out of range");
  require(directions.rows() == 0 || directions.cols() == n, "affine_subspace: direction width mismatch");
  AffineSubspace t;
  t.n = n;
  t.a = point;
  t.basis = orthonormal_rows(directions.rows() == 0 ? Mat(0, n) : directions);
  t.k = static_cast<int>(t.basis.rows());
  t.comp = complement_basis(t.basis, n);
  t.normal_proj = t.comp.transpose() * t.comp;
  t.blade = exterior::Blade::from_subspace(t.basis);
  return t;
}

inline AffineSubspace line_through(const Vec& point, const Vec& dir) {
  Mat d(1, point.size());
  d.row(0) = dir.transpose();
  return affine_subspace(point, d);
}

inline AffineSubspace plane_through(const Vec& point, const Vec& d1, const Vec& d2) {
  Mat d(2, point.size());
  d.row(0) = d1.transpose();
  d.row(1) = d2.transpose();
  return affine_subspace(point, d);
}

struct AffineFamily {
  int n = 0;
  int k = 0;  // common member dimension
  std::vector<AffineSubspace> members;
};

inline AffineFamily affine_family(int n, int k, std::vector<AffineSubspace> members) {
  require(1 <= n && n <= kMaxAmbientDim, "affine_family: ambient dim out of range");
  require(0 <= k && k <= n, "affine_family: member dim out of range");
  for (const auto& t : members)
    require(t.n == n && t.k == k, "affine_family: member shape mismatch");
  return AffineFamily{n, k, std::move(members)};
}

inline AffineFamily affine_family(std::vector<AffineSubspace> members) {
  require(!members.empty(), "affine_family: cannot infer shape from an empty family");
  int n = members.front().n, k = members.front().k;
  return affine_family(n, k, std::move(members));
}

struct Cube {
  Vec lo;
  double side = 1.0;
  Vec center() const { return lo.array() + 0.5 * side; }
};

inline double point_box_distance(const Vec& x, const Vec& lo, double side) {
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    double d = std::max({0.0, lo[i] - x[i], x[i] - (lo[i] + side)});
    s += d * d;
  }
  return std::sqrt(s);
}

/// Unit cubes with integer corners whose closed cube meets the closed ball
/// B(0, R), in lexicographic corner order.
struct DyadicGrid {
  int n = 0;
  double R = 0.0;
  std::vector<Cube> cubes;
};

inline DyadicGrid dyadic_grid(int n, double R) {
  require(1 <= n && n <= 3, "dyadic_grid: ambient dim must be 1..3");
  require(R > 0.0, "dyadic_grid: radius must be positive");
  DyadicGrid g;
  g.n = n;
  g.R = R;
  const int lo = static_cast<int>(std::floor(-R)) - 1;
  const int hi = static_cast<int>(std::ceil(R));
  std::vector<int> c(n, lo);
  while (true) {
    double d2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double d = std::max({0.0, static_cast<double>(c[i]), -static_cast<double>(c[i] + 1)});
      d2 += d * d;
    }
    if (d2 <= R * R + 1e-9) {
      Cube q;
      q.lo = Vec(n);
      for (int i = 0; i < n; ++i) q.lo[i] = c[i];
      q.side = 1.0;
      g.cubes.push_back(std::move(q));
    }
    int pos = n - 1;
    while (pos >= 0 && ++c[pos] > hi) {
      c[pos] = lo;
      --pos;
    }
    if (pos < 0) break;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Incidence: does a flat meet a cube?

/// True iff min over the closed cube of the distance to the flat is <= tol.
/// The minimum is found by coordinate descent on the convex quadratic
/// (x-a)^T N (x-a), N the normal projector, with each coordinate clamped to
/// the cube; 200 sweeps or a fixed point, whichever first.
inline bool cube_incidence(const AffineSubspace& t, const Cube& q, double tol = 1e-9) {
  if (t.k == t.n) return true;  // full-dimensional flat meets everything
  const int n = t.n;
  require(static_cast<int>(q.lo.size()) == n, "cube_incidence: dim mismatch");
  const Vec c = q.center();
  const double center_dist = (t.comp * (c - t.a)).norm();
  const double half_diag = 0.5 * q.side * std::sqrt(static_cast<double>(n));
  if (center_dist > half_diag + tol) return false;  // cube cannot reach the flat
  if (center_dist <= tol) return true;

  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = std::clamp(t.a[i], q.lo[i], q.lo[i] + q.side);
  const Mat& m = t.normal_proj;
  for (int sweep = 0; sweep < 200; ++sweep) {
    double moved = 0.0;
    for (int i = 0; i < n; ++i) {
      if (m(i, i) <= 1e-14) continue;  // coordinate lies in the flat's directions
      double num = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) num += m(i, j) * (x[j] - t.a[j]);
      double xi = std::clamp(t.a[i] - num / m(i, i), q.lo[i], q.lo[i] + q.side);
      moved = std::max(moved, std::abs(xi - x[i]));
      x[i] = xi;
    }
    if (moved < 1e-12 * std::max(1.0, q.side)) break;
  }
  return (t.comp * (x - t.a)).norm() <= tol;
}

// ---------------------------------------------------------------------------
// Cell-in-ball volumes (exact for n <= 2, quadrature for n = 3)

inline double cell_ball_volume(const Cube& q, double R) {
  const int n = static_cast<int>(q.lo.size());
  double near2 = 0.0, far2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double d = std::max({0.0, q.lo[i], -(q.lo[i] + q.side)});
    near2 += d * d;
    double f = std::max(std::abs(q.lo[i]), std::abs(q.lo[i] + q.side));
    far2 += f * f;
  }
  if (near2 >= R * R) return 0.0;
  if (far2 <= R * R) return std::pow(q.side, n);
  if (n == 1) {
    double lo = std::max(q.lo[0], -R), hi = std::min(q.lo[0] + q.side, R);
    return std::max(0.0, hi - lo);
  }
  if (n == 2) {
    std::vector<geom::Vec2> sq = {{q.lo[0], q.lo[1]},
                                  {q.lo[0] + q.side, q.lo[1]},
                                  {q.lo[0] + q.side, q.lo[1] + q.side},
                                  {q.lo[0], q.lo[1] + q.side}};
    return geom::polygon_disk_area(sq, R);
  }
  // n == 3: z-slices are square/disk intersections; composite Simpson
  const double zlo = std::max(q.lo[2], -R), zhi = std::min(q.lo[2] + q.side, R);
  if (zhi <= zlo) return 0.0;
  std::vector<geom::Vec2> sq = {{q.lo[0], q.lo[1]},
                                {q.lo[0] + q.side, q.lo[1]},
                                {q.lo[0] + q.side, q.lo[1] + q.side},
                                {q.lo[0], q.lo[1] + q.side}};
  const int steps = 64;  // even
  const double h = (zhi - zlo) / steps;
  double acc = 0.0;
  for (int i = 0; i <= steps; ++i) {
    double z = zlo + i * h;
    double r2 = R * R - z * z;
    double slice = r2 <= 0.0 ? 0.0 : geom::polygon_disk_area(sq, std::sqrt(r2));
    double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * slice;
  }
  return acc * h / 3.0;
}

// ---------------------------------------------------------------------------
// k-volume of flat-and-cube intersections (exact clipping, k <= 2, n <= 3)

namespace detail {

inline std::vector<geom::Vec2> clip_halfplane(const std::vector<geom::Vec2>& poly, const geom::Vec2& g,
                                              double b) {
  std::vector<geom::Vec2> out;
  const std::size_t np = poly.size();
  for (std::size_t i = 0; i < np; ++i) {
    const geom::Vec2& p = poly[i];
    const geom::Vec2& r = poly[(i + 1) % np];
    double dp = b - g.dot(p), dr = b - g.dot(r);
    if (dp >= 0.0) out.push_back(p);
    if ((dp >= 0.0) != (dr >= 0.0)) out.push_back(p + (dp / (dp - dr)) * (r - p));
  }
  return out;
}

}  // namespace detail

inline double flat_box_volume(const AffineSubspace& t, const Cube& q) {
  const int n = t.n;
  require(static_cast<int>(q.lo.size()) == n, "flat_box_volume: dim mismatch");
  if (t.k == 0) return point_box_distance(t.a, q.lo, q.side) <= 1e-9 ? 1.0 : 0.0;
  if (t.k == n) return std::pow(q.side, n);
  if (t.k == 1) {
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      double u = t.basis(0, i);
      double a = q.lo[i] - t.a[i], b = q.lo[i] + q.side - t.a[i];
      if (std::abs(u) < 1e-14) {
        if (a > 0.0 || b < 0.0) return 0.0;  // line runs outside this slab
      } else {
        double ta = a / u, tb = b / u;
        t0 = std::max(t0, std::min(ta, tb));
        t1 = std::min(t1, std::max(ta, tb));
      }
    }
    return std::max(0.0, t1 - t0);
  }
  require(t.k == 2 && n == 3, "flat_box_volume: unsupported flat dimension");
  // parameterize the plane isometrically and clip a generous square by the
  // six slab constraints of the box
  Vec u = t.basis.row(0).transpose(), v = t.basis.row(1).transpose();
  Vec c = q.center();
  geom::Vec2 sc(u.dot(c - t.a), v.dot(c - t.a));
  const double L = 2.0 * q.side * std::sqrt(3.0);
  std::vector<geom::Vec2> poly = {sc + geom::Vec2(-L, -L), sc + geom::Vec2(L, -L), sc + geom::Vec2(L, L),
                                  sc + geom::Vec2(-L, L)};
  for (int i = 0; i < n; ++i) {
    geom::Vec2 g(u[i], v[i]);
    poly = detail::clip_halfplane(poly, g, q.lo[i] + q.side - t.a[i]);
    if (poly.empty()) return 0.0;
    poly = detail::clip_halfplane(poly, -g, -(q.lo[i] - t.a[i]));
    if (poly.empty()) return 0.0;
  }
  return poly.size() >= 3 ? geom::polygon_area(poly) : 0.0;
}

// ---------------------------------------------------------------------------
// Uniform (pointwise) form of the inequality

/// A tube function reads a point of ambient space and returns the input
/// density attached to one flat; it must be constant on unit cells of the
/// quotient.
using TubeFn = std::function<double(const AffineSubspace&, const Vec&)>;

/// Indicator of the centered unit cell of the quotient, halfopen so that a
/// flat through a cell boundary is counted by exactly one row of cells.
inline TubeFn unit_tube() {
  return [](const AffineSubspace& t, const Vec& x) -> double {
    if (t.comp.rows() == 0) return 1.0;
    Vec y = t.quotient_coords(x);
    for (int i = 0; i < y.size(); ++i)
      if (y[i] < -0.5 || y[i] >= 0.5) return 0.0;
    return 1.0;
  };
}

namespace detail {

template <typename Fn>
inline void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int tn = static_cast<int>(std::min<std::size_t>(threads, count));
  for (int t = 0; t < tn; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

inline void validate_family_exponents(const std::vector<AffineFamily>& fams, const Vec& p) {
  require(!fams.empty(), "need at least one family");
  require(static_cast<int>(fams.size()) == p.size(), "family/exponent count mismatch");
  for (int j = 0; j < p.size(); ++j) require(p[j] > 0.0, "exponents must be positive");
  for (const auto& f : fams) require(f.n == fams.front().n, "families must share the ambient dim");
}

}  // namespace detail

/// Grid sum of prod_j (sum_T f_{j,T})^{p_j} over unit cells meeting B(0, R),
/// each cell weighted by its exact cell-in-ball volume and sampled at its
/// center (tube functions are cellwise constant, so the center is exact).
inline double lhs_uniform(const std::vector<AffineFamily>& fams, const Vec& p, double R,
                          std::vector<TubeFn> tubes = {}, int threads = 1) {
  detail::validate_family_exponents(fams, p);
  require(R > 0.0, "lhs_uniform: radius must be positive");
  const int m = static_cast<int>(fams.size());
  if (tubes.empty()) tubes.assign(m, unit_tube());
  require(static_cast<int>(tubes.size()) == m, "lhs_uniform: tube/family count mismatch");
  DyadicGrid grid = dyadic_grid(fams.front().n, R);
  std::vector<double> terms(grid.cubes.size(), 0.0);
  detail::parallel_for(grid.cubes.size(), threads, [&](std::size_t qi) {
    const Cube& q = grid.cubes[qi];
    const Vec c = q.center();
    double prod = 1.0;
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (const auto& t : fams[j].members) s += tubes[j](t, c);
      if (s <= 0.0) {
        prod = 0.0;
        break;
      }
      prod *= std::pow(s, p[j]);
    }
    if (prod > 0.0) terms[qi] = prod * cell_ball_volume(q, R);
  });
  double lhs = 0.0;
  for (double t : terms) lhs += t;
  return lhs;
}

// ---------------------------------------------------------------------------
// Per-tuple constants

enum class BlSource { Auto, LoomisWhitney, Gaussian, Truncated };

struct BlValue {
  double value = std::numeric_limits<double>::infinity();
  bool infinite = false;
  std::string source;
  bool lower_bound_only = false;  // truncated estimates undershoot the true constant
};

namespace detail {

inline bool lw_applicable(const std::vector<const AffineSubspace*>& tuple, const Vec& p, int n) {
  if (tuple.size() < 2) return false;
  int ksum = 0;
  for (const auto* t : tuple) ksum += t->k;
  if (ksum != n) return false;
  const double want = 1.0 / (static_cast<double>(tuple.size()) - 1.0);
  for (int j = 0; j < p.size(); ++j)
    if (std::abs(p[j] - want) > 1e-12) return false;
  return true;
}

inline BlValue tuple_bl(const std::vector<const AffineSubspace*>& tuple, const Vec& p, double R,
                        BlSource src) {
  const int n = tuple.front()->n;
  BlValue out;
  const bool lw_ok = lw_applicable(tuple, p, n);
  if (src == BlSource::LoomisWhitney)
    require(lw_ok, "tuple_bl: closed form needs dims summing to n and exponents 1/(m-1)");
  if (lw_ok && (src == BlSource::Auto || src == BlSource::LoomisWhitney)) {
    // cheap special case first: the closed form is a determinant
    std::vector<Mat> gens;
    gens.reserve(tuple.size());
    for (const auto* t : tuple) gens.push_back(t->basis);
    auto lw = bl::lw_constant(bl::make_datum(n, gens, p));
    out.value = lw.value;
    out.infinite = lw.infinite;
    out.source = "loomis-whitney";
    return out;
  }
  std::vector<Mat> gens;
  gens.reserve(tuple.size());
  for (const auto* t : tuple) gens.push_back(t->basis);
  bl::BLDatum d = bl::make_datum(n, gens, p);
  if (src == BlSource::Auto || src == BlSource::Gaussian) {
    auto g = bl::bl_gaussian(d);
    if (src == BlSource::Gaussian)
      require(g.applicable, "tuple_bl: gaussian ratio needs the scaling condition");
    if (g.applicable) {
      out.value = g.divergent ? std::numeric_limits<double>::infinity() : g.value;
      out.infinite = g.divergent;
      out.source = "gaussian";
      return out;
    }
  }
  auto est = bl::bl_truncated_estimate(d, bl::TruncationWindow{1.0, std::max(R, 2.0)});
  out.value = est.value;
  out.infinite = false;
  out.source = "truncated-estimate";
  out.lower_bound_only = true;
  return out;
}

/// Stratified pick of `want` indices out of 0..count-1 (all of them when the
/// budget allows).
inline std::vector<int> stratified_indices(int count, int want, Rng& rng) {
  std::vector<int> idx;
  if (want >= count) {
    idx.resize(count);
    for (int i = 0; i < count; ++i) idx[i] = i;
    return idx;
  }
  idx.reserve(want);
  for (int t = 0; t < want; ++t) {
    double u = (t + rng.uniform()) / want;
    int i = std::min(count - 1, static_cast<int>(u * count));
    if (idx.empty() || i > idx.back()) idx.push_back(i);
  }
  while (static_cast<int>(idx.size()) < want) idx.push_back(idx.back());
  return idx;
}

inline std::uint64_t corner_seed(std::uint64_t base, const Vec& lo) {
  std::uint64_t h = base ^ 0x9e3779b97f4a7c15ull;
  for (int i = 0; i < lo.size(); ++i) {
    std::int64_t v = static_cast<std::int64_t>(std::llround(lo[i] * 8.0));
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Reports

struct CubeRow {
  Vec corner;
  std::vector<int> incident;  // per-family incidence counts
  double term = 0.0;
};

struct KBLReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs, the observed constant (to the P-th power where applicable)
  std::string bl_source;
  std::vector<std::string> flags;  // "sampled", "diagnostic-only"
  std::vector<CubeRow> rows;
};

// ---------------------------------------------------------------------------
// Uniform right side and its constant

struct RhsReport {
  double value = 0.0;
  double a_value = 0.0;
  std::string a_source;
  std::vector<std::string> flags;
};

/// Largest per-tuple constant over the families, used as the hypothesis bound
/// A of the uniform inequality.  Tuples beyond the cap are stratified-sampled
/// and the result flagged, since a sampled max can undershoot.
inline RhsReport bl_bound_for_families(const std::vector<AffineFamily>& fams, const Vec& p, double R,
                                       BlSource src = BlSource::Auto, std::uint64_t seed = 0,
                                       std::size_t tuple_cap = 100000) {
  detail::validate_family_exponents(fams, p);
  const int m = static_cast<int>(fams.size());
  std::size_t total = 1;
  for (const auto& f : fams) {
    require(!f.members.empty(), "bl_bound_for_families: empty family has no tuples");
    total *= f.members.size();
  }
  RhsReport rep;
  Rng rng(seed ^ 0x5bd1e995u);
  const int per_axis = std::max(1, static_cast<int>(std::floor(std::pow(static_cast<double>(tuple_cap),
                                                                        1.0 / m))));
  std::vector<std::vector<int>> picks(m);
  bool sampled = false;
  for (int j = 0; j < m; ++j) {
    int count = static_cast<int>(fams[j].members.size());
    picks[j] = detail::stratified_indices(count, per_axis, rng);
    if (static_cast<int>(picks[j].size()) < count) sampled = true;
  }
  if (sampled) rep.flags.push_back("sampled-max");

  std::set<std::string> sources;
  double best = 0.0;
  bool any_infinite = false, diagnostic = false;
  std::vector<int> cursor(m, 0);
  std::vector<const AffineSubspace*> tuple(m, nullptr);
  while (true) {
    for (int j = 0; j < m; ++j) tuple[j] = &fams[j].members[picks[j][cursor[j]]];
    BlValue bv = detail::tuple_bl(tuple, p, R, src);
    sources.insert(bv.source);
    diagnostic = diagnostic || bv.lower_bound_only;
    if (bv.infinite)
      any_infinite = true;
    else
      best = std::max(best, bv.value);
    int pos = m - 1;
    while (pos >= 0 && ++cursor[pos] == static_cast<int>(picks[pos].size())) {
      cursor[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  if (any_infinite) {
    rep.a_value = std::numeric_limits<double>::infinity();
    rep.flags.push_back("divergent-tuple");
  } else {
    rep.a_value = best;
  }
  std::string joined;
  for (const auto& s : sources) joined += (joined.empty() ? "" : "+") + s;
  rep.a_source = joined;
  if (diagnostic) rep.flags.push_back("diagnostic-only");
  rep.value = rep.a_value;
  return rep;
}

/// A * prod_j (sum over members of the quotient integral)^{p_j}.  The default
/// tube has quotient integral exactly 1; custom integrals support the
/// homogeneity audits.
inline double rhs_uniform(const std::vector<AffineFamily>& fams, const Vec& p, double A,
                          std::vector<double> tube_integrals = {}) {
  detail::validate_family_exponents(fams, p);
  const int m = static_cast<int>(fams.size());
  if (tube_integrals.empty()) tube_integrals.assign(m, 1.0);
  require(static_cast<int>(tube_integrals.size()) == m, "rhs_uniform: integral/family count mismatch");
  double prod = 1.0;
  for (int j = 0; j < m; ++j) {
    require(tube_integrals[j] >= 0.0, "rhs_uniform: quotient integrals must be nonnegative");
    prod *= std::pow(static_cast<double>(fams[j].members.size()) * tube_integrals[j], p[j]);
  }
  return A * prod;
}

// ---------------------------------------------------------------------------
// Tensor-norm form of the left side

/// Per cube, the projective tensor norm (exponents q_j = P/p_j) of the tensor
/// of per-tuple constants to the power -1/P over incident members, raised to
/// P; summed over the grid.  Degenerate tuples contribute entry 0 and never
/// block the factorization.  rhs is the tuple-count product prod |T_j|^{p_j}.
inline KBLReport lhs_fremlin(const std::vector<AffineFamily>& fams, const Vec& p, double R,
                             BlSource src = BlSource::Auto, std::uint64_t seed = 0,
                             std::size_t tuple_cap = 100000, int threads = 1) {
  detail::validate_family_exponents(fams, p);
  require(R > 0.0, "lhs_fremlin: radius must be positive");
  const int m = static_cast<int>(fams.size());
  const double P = p.sum();
  for (int j = 0; j < m; ++j)
    require(p[j] < P - 1e-12,
            "lhs_fremlin: every p_j must be strictly below the total so that q_j = P/p_j > 1");
  Vec q(m);
  for (int j = 0; j < m; ++j) q[j] = P / p[j];

  DyadicGrid grid = dyadic_grid(fams.front().n, R);
  std::vector<CubeRow> rows(grid.cubes.size());
  std::vector<std::uint8_t> cube_sampled(grid.cubes.size(), 0);
  std::vector<std::uint8_t> cube_diag(grid.cubes.size(), 0);
  std::vector<std::set<std::string>> cube_sources(grid.cubes.size());

  detail::parallel_for(grid.cubes.size(), threads, [&](std::size_t qi) {
    const Cube& cube = grid.cubes[qi];
    CubeRow row;
    row.corner = cube.lo;
    row.incident.assign(m, 0);
    std::vector<std::vector<int>> incident(m);
    bool empty = false;
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < static_cast<int>(fams[j].members.size()); ++i)
        if (cube_incidence(fams[j].members[i], cube)) incident[j].push_back(i);
      row.incident[j] = static_cast<int>(incident[j].size());
      if (incident[j].empty()) empty = true;
    }
    if (empty) {
      rows[qi] = std::move(row);
      return;
    }
    std::size_t total = 1;
    for (int j = 0; j < m; ++j) total *= incident[j].size();
    Rng rng(detail::corner_seed(seed, cube.lo));
    std::vector<std::vector<int>> picks(m);
    double scale = 1.0;  // cross-norm extrapolation from the sampled block
    if (total > tuple_cap) {
      cube_sampled[qi] = 1;
      const int per_axis = std::max(
          1, static_cast<int>(std::floor(std::pow(static_cast<double>(tuple_cap), 1.0 / m))));
      for (int j = 0; j < m; ++j) {
        picks[j] = detail::stratified_indices(static_cast<int>(incident[j].size()), per_axis, rng);
        scale *= std::pow(static_cast<double>(incident[j].size()) / picks[j].size(), 1.0 / q[j]);
      }
    } else {
      for (int j = 0; j < m; ++j) {
        picks[j].resize(incident[j].size());
        for (std::size_t i = 0; i < incident[j].size(); ++i) picks[j][i] = static_cast<int>(i);
      }
    }
    std::vector<fremlin::WeightedIndexSet> axes;
    axes.reserve(m);
    for (int j = 0; j < m; ++j) axes.push_back(fremlin::counting_axis(static_cast<int>(picks[j].size())));
    fremlin::NonnegTensor tensor(axes);
    std::vector<int> idx(m, 0);
    std::vector<const AffineSubspace*> tuple(m, nullptr);
    while (true) {
      for (int j = 0; j < m; ++j) tuple[j] = &fams[j].members[incident[j][picks[j][idx[j]]]];
      BlValue bv = detail::tuple_bl(tuple, p, R, src);
      cube_sources[qi].insert(bv.source);
      if (bv.lower_bound_only) cube_diag[qi] = 1;
      tensor.at(idx) = bv.infinite ? 0.0 : std::pow(bv.value, -1.0 / P);
      int pos = m - 1;
      while (pos >= 0 && ++idx[pos] == static_cast<int>(picks[pos].size())) {
        idx[pos] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
    fremlin::FremlinOptions fo;
    fo.seed = detail::corner_seed(seed ^ 0xabcdu, cube.lo);
    if (tensor.size() > 10000) {
      fo.restarts = 2;
      fo.max_sweeps = 60;
    }
    auto res = fremlin::fremlin_norm(tensor, q, fo);
    row.term = std::pow(res.value * scale, P);
    rows[qi] = std::move(row);
  });

  KBLReport rep;
  std::set<std::string> sources;
  bool sampled = false, diag = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rep.lhs += rows[i].term;
    sampled = sampled || cube_sampled[i];
    diag = diag || cube_diag[i];
    sources.insert(cube_sources[i].begin(), cube_sources[i].end());
  }
  rep.rhs = 1.0;
  for (int j = 0; j < m; ++j) rep.rhs *= std::pow(static_cast<double>(fams[j].members.size()), p[j]);
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  std::string joined;
  for (const auto& s : sources) joined += (joined.empty() ? "" : "+") + s;
  rep.bl_source = joined.empty() ? "none" : joined;
  if (sampled) rep.flags.push_back("sampled");
  if (diag) rep.flags.push_back("diagnostic-only");
  rep.rows = std::move(rows);
  return rep;
}

// ---------------------------------------------------------------------------
// Exact wedge (endpoint) form

/// LHS = sum over cubes of (sum over incident tuples of |wedge of direction
/// blades|)^{1/(m-1)}; RHS = prod |T_j|^{1/(m-1)}.  Needs dims summing to n.
inline KBLReport lw_kakeya(const std::vector<AffineFamily>& fams, double R, std::uint64_t seed = 0,
                           std::size_t tuple_cap = 100000, int threads = 1) {
  require(fams.size() >= 2, "lw_kakeya: need at least two families");
  const int m = static_cast<int>(fams.size());
  const int n = fams.front().n;
  int ksum = 0;
  for (const auto& f : fams) {
    require(f.n == n, "lw_kakeya: families must share the ambient dim");
    ksum += f.k;
  }
  require(ksum == n, "lw_kakeya: member dims must sum to the ambient dim");
  require(R > 0.0, "lw_kakeya: radius must be positive");

  DyadicGrid grid = dyadic_grid(n, R);
  std::vector<CubeRow> rows(grid.cubes.size());
  std::vector<std::uint8_t> cube_sampled(grid.cubes.size(), 0);
  detail::parallel_for(grid.cubes.size(), threads, [&](std::size_t qi) {
    const Cube& cube = grid.cubes[qi];
    CubeRow row;
    row.corner = cube.lo;
    row.incident.assign(m, 0);
    std::vector<std::vector<int>> incident(m);
    bool empty = false;
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < static_cast<int>(fams[j].members.size()); ++i)
        if (cube_incidence(fams[j].members[i], cube)) incident[j].push_back(i);
      row.incident[j] = static_cast<int>(incident[j].size());
      if (incident[j].empty()) empty = true;
    }
    if (empty) {
      rows[qi] = std::move(row);
      return;
    }
    std::size_t total = 1;
    for (int j = 0; j < m; ++j) total *= incident[j].size();
    std::vector<std::vector<int>> picks(m);
    double scale = 1.0;  // sampled tuples estimate the mean; rescale to the full sum
    if (total > tuple_cap) {
      cube_sampled[qi] = 1;
      Rng rng(detail::corner_seed(seed, cube.lo));
      const int per_axis = std::max(
          1, static_cast<int>(std::floor(std::pow(static_cast<double>(tuple_cap), 1.0 / m))));
      std::size_t kept = 1;
      for (int j = 0; j < m; ++j) {
        picks[j] = detail::stratified_indices(static_cast<int>(incident[j].size()), per_axis, rng);
        kept *= picks[j].size();
      }
      scale = static_cast<double>(total) / static_cast<double>(kept);
    } else {
      for (int j = 0; j < m; ++j) {
        picks[j].resize(incident[j].size());
        for (std::size_t i = 0; i < incident[j].size(); ++i) picks[j][i] = static_cast<int>(i);
      }
    }
    double wsum = 0.0;
    std::vector<int> idx(m, 0);
    while (true) {
      MultiVector acc = fams[0].members[incident[0][picks[0][idx[0]]]].blade.mv;
      for (int j = 1; j < m; ++j)
        acc = exterior::wedge(acc, fams[j].members[incident[j][picks[j][idx[j]]]].blade.mv);
      wsum += acc.norm();
      int pos = m - 1;
      while (pos >= 0 && ++idx[pos] == static_cast<int>(picks[pos].size())) {
        idx[pos] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
    row.term = std::pow(wsum * scale, 1.0 / (m - 1.0));
    rows[qi] = std::move(row);
  });

  KBLReport rep;
  bool sampled = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rep.lhs += rows[i].term;
    sampled = sampled || cube_sampled[i];
  }
  rep.rhs = 1.0;
  for (int j = 0; j < m; ++j)
    rep.rhs *= std::pow(static_cast<double>(fams[j].members.size()), 1.0 / (m - 1.0));
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  rep.bl_source = "exact-wedge";
  if (sampled) rep.flags.push_back("sampled");
  rep.rows = std::move(rows);
  return rep;
}

// ---------------------------------------------------------------------------
// Surface pairing functional

/// R^{-k} * sum over incident members of vol_k(member in cube) times the
/// pairing of the member's conormal against the (n-k)-fold wedge of the
/// surface normal measure of sigma inside the cube.  The pairing vanishes
/// exactly when the surface sheets fail to wall the flat off in its
/// transverse directions.
inline double sj_functional(const AffineFamily& h, const Cube& q, const poly::PolynomialMixture& sigma,
                            double R, double mesh_h = 1.0 / 32) {
  require(R > 0.0, "sj_functional: scale must be positive");
  require(h.k < h.n, "sj_functional: flats must have positive codimension");
  require(h.n == static_cast<int>(q.lo.size()), "sj_functional: dim mismatch");
  poly::CubeDomain dom{q.lo, q.side};
  exterior::GradedMeasure mu = poly::mixture_normal_measure(sigma, dom, mesh_h);
  mu.prune();
  if (mu.atoms.empty()) return 0.0;
  const int power = h.n - h.k;
  double total = 0.0;
  for (const auto& t : h.members) {
    if (!cube_incidence(t, q)) continue;
    double w = flat_box_volume(t, q);
    if (w <= 0.0) continue;
    total += w * exterior::pairing_moment_power(mu, power, exterior::hodge_star(t.blade.mv));
  }
  return std::pow(R, -static_cast<double>(h.k)) * total;
}

// ---------------------------------------------------------------------------
// Per-cube weighted tensor functional

struct GValue {
  double value = 0.0;
  std::string bl_source = "none";
  bool sampled = false;
  bool lower_bound_only = false;
};

/// Same tensor as the per-cube term of lhs_fremlin, but over index sets
/// weighted by the k-volume of each member inside the cube (members whose
/// slice is null are dropped).  Scaling every weight by c scales the value by
/// c^{sum p_j}.
inline GValue g_functional(const std::vector<AffineFamily>& fams, const Vec& p, const Cube& cube,
                           double R, BlSource src = BlSource::Auto, double weight_scale = 1.0,
                           std::uint64_t seed = 0, std::size_t tuple_cap = 100000) {
  detail::validate_family_exponents(fams, p);
  require(weight_scale > 0.0, "g_functional: weight scale must be positive");
  const int m = static_cast<int>(fams.size());
  const double P = p.sum();
  for (int j = 0; j < m; ++j)
    require(p[j] < P - 1e-12,
            "g_functional: every p_j must be strictly below the total so that q_j = P/p_j > 1");
  Vec q(m);
  for (int j = 0; j < m; ++j) q[j] = P / p[j];

  GValue out;
  std::vector<std::vector<int>> incident(m);
  std::vector<std::vector<double>> weights(m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < static_cast<int>(fams[j].members.size()); ++i) {
      const auto& t = fams[j].members[i];
      if (!cube_incidence(t, cube)) continue;
      double w = weight_scale * flat_box_volume(t, cube);
      if (w <= 1e-12) continue;
      incident[j].push_back(i);
      weights[j].push_back(w);
    }
    if (incident[j].empty()) return out;
  }
  std::size_t total = 1;
  for (int j = 0; j < m; ++j) total *= incident[j].size();
  Rng rng(detail::corner_seed(seed, cube.lo));
  std::vector<std::vector<int>> picks(m);
  double scale = 1.0;
  if (total > tuple_cap) {
    out.sampled = true;
    const int per_axis =
        std::max(1, static_cast<int>(std::floor(std::pow(static_cast<double>(tuple_cap), 1.0 / m))));
    for (int j = 0; j < m; ++j) {
      picks[j] = detail::stratified_indices(static_cast<int>(incident[j].size()), per_axis, rng);
      double w_full = 0.0, w_kept = 0.0;
      for (double w : weights[j]) w_full += w;
      for (int t : picks[j]) w_kept += weights[j][t];
      scale *= std::pow(w_full / w_kept, 1.0 / q[j]);
    }
  } else {
    for (int j = 0; j < m; ++j) {
      picks[j].resize(incident[j].size());
      for (std::size_t i = 0; i < incident[j].size(); ++i) picks[j][i] = static_cast<int>(i);
    }
  }
  std::vector<fremlin::WeightedIndexSet> axes;
  axes.reserve(m);
  for (int j = 0; j < m; ++j) {
    Vec w(picks[j].size());
    for (std::size_t i = 0; i < picks[j].size(); ++i) w[i] = weights[j][picks[j][i]];
    axes.push_back(fremlin::WeightedIndexSet{w});
  }
  fremlin::NonnegTensor tensor(axes);
  std::set<std::string> sources;
  std::vector<int> idx(m, 0);
  std::vector<const AffineSubspace*> tuple(m, nullptr);
  while (true) {
    for (int j = 0; j < m; ++j) tuple[j] = &fams[j].members[incident[j][picks[j][idx[j]]]];
    BlValue bv = detail::tuple_bl(tuple, p, R, src);
    sources.insert(bv.source);
    out.lower_bound_only = out.lower_bound_only || bv.lower_bound_only;
    tensor.at(idx) = bv.infinite ? 0.0 : std::pow(bv.value, -1.0 / P);
    int pos = m - 1;
    while (pos >= 0 && ++idx[pos] == static_cast<int>(picks[pos].size())) {
      idx[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  fremlin::FremlinOptions fo;
  fo.seed = detail::corner_seed(seed ^ 0xabcdu, cube.lo);
  auto res = fremlin::fremlin_norm(tensor, q, fo);
  out.value = std::pow(res.value * scale, P);
  std::string joined;
  for (const auto& s : sources) joined += (joined.empty() ? "" : "+") + s;
  out.bl_source = joined;
  return out;
}

// ---------------------------------------------------------------------------
// Duality audit

struct DualityReport {
  double p_total = 0.0;
  double z = 0.0;             // score normalizer
  double c1_pow_p = 0.0;      // realized C1^P under C2 = 1
  double c2 = 0.0;            // realized max_j (sum_Q S_j) / deg_j
  double backward_slack = 0.0;  // worst relative excess of G M^{P-1} over its bound
  double sj_slack = 0.0;        // worst relative miss of sum_Q S_j = deg_j
  double forward_gap = 0.0;     // relative gap of the recovered global bound
  bool backward_ok = false;
  bool forward_ok = false;
  bool ok = false;
  std::vector<double> s;  // per-cube scores
};

/// Score ansatz S(Q) = G^{1/P} M^{1-1/P} / Z, S_j = S * deg_j.  Backward:
/// per-cube G M^{P-1} <= C1^P prod_j S_j^{p_j} with C1^P realized from the
/// global sum, and sum_Q S_j = deg_j.  Forward: plugging the scores back
/// through the chain of per-cube bounds recovers sum_Q G to within tol.
inline DualityReport duality_check(const std::vector<double>& g, const std::vector<double>& mw,
                                   const Vec& p, const std::vector<double>& degs, double tol = 1e-9) {
  require(!g.empty() && g.size() == mw.size(), "duality_check: value/weight length mismatch");
  require(p.size() >= 1 && p.size() == static_cast<int>(degs.size()),
          "duality_check: exponent/degree count mismatch");
  const double P = p.sum();
  require(P > 1.0 + 1e-12, "duality_check: total exponent must exceed 1");
  for (int j = 0; j < p.size(); ++j) {
    require(p[j] > 0.0, "duality_check: exponents must be positive");
    require(degs[j] > 0.0, "duality_check: degrees must be positive");
  }
  double msum = 0.0;
  for (std::size_t i = 0; i < mw.size(); ++i) {
    require(g[i] >= 0.0, "duality_check: values must be nonnegative");
    require(mw[i] >= 0.0, "duality_check: weights must be nonnegative");
    require(!(g[i] > 0.0 && mw[i] == 0.0),
            "duality_check: a cube with positive value needs positive weight");
    msum += mw[i];
  }
  require(std::abs(msum - 1.0) <= 1e-9, "duality_check: cube weights must sum to 1");

  DualityReport rep;
  rep.p_total = P;
  rep.s.resize(g.size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double si = std::pow(g[i], 1.0 / P) * std::pow(mw[i], 1.0 - 1.0 / P);
    rep.s[i] = si;
    z += si;
  }
  require(z > 0.0, "duality_check: no cube carries mass");
  for (auto& si : rep.s) si /= z;
  rep.z = z;

  double sum_g = 0.0;
  for (double v : g) sum_g += v;
  double prod_deg = 1.0;
  for (int j = 0; j < p.size(); ++j) prod_deg *= std::pow(degs[j], p[j]);
  rep.c1_pow_p = sum_g / prod_deg;

  // sum_Q S_j = deg_j by construction of the normalizer; measure the residual
  double s_total = 0.0;
  for (double si : rep.s) s_total += si;
  rep.c2 = s_total;  // equals max_j sum S_j / deg_j since S_j = S deg_j
  rep.sj_slack = std::abs(s_total - 1.0);

  // backward: G M^{P-1} <= C1^P * S^P * prod deg^{p_j}
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double lhs = g[i] * std::pow(mw[i], P - 1.0);
    double rhs = rep.c1_pow_p * std::pow(rep.s[i], P) * prod_deg;
    double scale = std::max({lhs, rhs, 1e-300});
    worst = std::max(worst, (lhs - rhs) / scale);
  }
  rep.backward_slack = worst;
  rep.backward_ok = worst <= tol && rep.sj_slack <= tol;

  // forward: the pointwise constant realized by the scores recovers sum G
  double c1_pointwise = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (rep.s[i] <= 0.0) continue;
    double ratio = g[i] * std::pow(mw[i], P - 1.0) / (std::pow(rep.s[i], P) * prod_deg);
    c1_pointwise = std::max(c1_pointwise, ratio);
  }
  double chain = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (mw[i] <= 0.0) continue;
    chain += c1_pointwise * std::pow(rep.s[i], P) * prod_deg * std::pow(mw[i], 1.0 - P);
  }
  rep.forward_gap = std::abs(chain - sum_g) / std::max(sum_g, 1e-300);
  rep.forward_ok = chain >= sum_g * (1.0 - tol) && rep.forward_gap <= tol;
  rep.ok = rep.backward_ok && rep.forward_ok;
  return rep;
}

// ---------------------------------------------------------------------------
// Stock configurations

/// N horizontal plus N vertical unit-spaced lines with half-integer offsets
/// centered on the origin (N even so no line or tube boundary sits on the
/// integer grid).  With R = N the incidences fill an N x N block of cells.
inline std::vector<AffineFamily> grid_line_families(int N) {
  require(N >= 2 && N % 2 == 0, "grid_line_families: N must be even and >= 2");
  std::vector<AffineSubspace> horiz, vert;
  for (int i = 0; i < N; ++i) {
    double c = -0.5 * N + 0.5 + i;
    Vec ph(2), pv(2), e1(2), e2(2);
    ph << 0.0, c;
    pv << c, 0.0;
    e1 << 1.0, 0.0;
    e2 << 0.0, 1.0;
    horiz.push_back(line_through(ph, e1));
    vert.push_back(line_through(pv, e2));
  }
  return {affine_family(std::move(horiz)), affine_family(std::move(vert))};
}

/// N lines with uniform random directions and base points in the centered
/// square of the given half-extent.
inline AffineFamily random_line_family(int N, double extent, Rng& rng) {
  require(N >= 1, "random_line_family: need at least one line");
  std::vector<AffineSubspace> members;
  members.reserve(N);
  for (int i = 0; i < N; ++i) {
    Vec pt(2);
    pt << rng.uniform(-extent, extent), rng.uniform(-extent, extent);
    members.push_back(line_through(pt, rng.unit_vector(2)));
  }
  return affine_family(std::move(members));
}

}  // namespace kbl::harness

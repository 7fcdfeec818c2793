#pragma once

/// Core multilinear-inequality machinery for data (T_1..T_m, p_1..p_m) of
/// subspaces of R^n with positive weights: the combinatorial exponents kappa
/// and kappa-tilde over a generated subspace lattice, the structural
/// conditions they certify, the transversal closed-form constant, truncated
/// constants over windows (r,R) estimated from explicit step-function inputs,
/// and the centered-Gaussian ratio ascent.

#include "kbl/common.hpp"
#include "kbl/exterior.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace kbl::bl {

// ---------------------------------------------------------------------------
// Data

struct BLDatum {
  int n = 0;
  std::vector<Mat> subspaces;  // orthonormal bases, k_j x n rows
  Vec exponents;               // p_j > 0

  int m() const { return static_cast<int>(subspaces.size()); }
  int dim(int j) const { return static_cast<int>(subspaces[j].rows()); }
  int quotient_dim(int j) const { return n - dim(j); }

  /// n - sum_j p_j n_j; zero iff the datum is scale invariant.
  double scaling_residual() const {
    double s = n;
    for (int j = 0; j < m(); ++j) s -= exponents[j] * quotient_dim(j);
    return s;
  }
};

/// Builds a datum from generating rows (any spanning set per subspace).
inline BLDatum make_datum(int n, const std::vector<Mat>& generators, const Vec& p) {
  require(1 <= n && n <= kMaxAmbientDim, "make_datum: ambient dim out of range");
  require(static_cast<int>(generators.size()) == p.size(), "make_datum: subspace/exponent count mismatch");
  require(p.size() >= 1, "make_datum: need at least one subspace");
  BLDatum d;
  d.n = n;
  d.exponents = p;
  for (int j = 0; j < p.size(); ++j) {
    require(p[j] > 0.0, "make_datum: exponents must be positive");
    require(generators[j].cols() == n || generators[j].rows() == 0, "make_datum: generator width mismatch");
    Mat g = generators[j].rows() == 0 ? Mat(0, n) : generators[j];
    d.subspaces.push_back(orthonormal_rows(g));
  }
  return d;
}

/// Orthonormal rows spanning the orthogonal complement of T_j; quotient
/// coordinates of x are B * x.  All window machinery shares this convention.
inline Mat quotient_map(const BLDatum& d, int j) { return complement_basis(d.subspaces[j], d.n); }

// ---------------------------------------------------------------------------
// Subspace lattice

struct SubspaceLattice {
  int n = 0;
  std::vector<Mat> elements;  // orthonormal bases, sorted by (dim, entries)
  bool capped = false;
};

namespace detail {

inline bool same_subspace(const Mat& a, const Mat& b, int n) {
  if (a.rows() != b.rows()) return false;
  return (projection_matrix(a, n) - projection_matrix(b, n)).norm() < 1e-8;
}

inline bool lex_less(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) return a.rows() < b.rows();
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (a(i, j) != b(i, j)) return a(i, j) < b(i, j);
  return false;
}

}  // namespace detail

/// Closure of the generators plus {0} and R^n under sums and intersections,
/// deduplicated by projection distance; capped to keep degenerate inputs
/// from exploding (capped results are flagged).  Dedup goes through a
/// quantized-signature bucket map so closure stays fast near the cap; a
/// boundary-rounding miss can at worst admit a near-duplicate element, which
/// never changes an optimum over the lattice.
inline SubspaceLattice generate_lattice(int n, const std::vector<Mat>& generators, int cap = 512) {
  SubspaceLattice lat;
  lat.n = n;
  Mat probe(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) probe(i, j) = std::sin(7.0 * i + 3.0 * j + 1.0);
  std::vector<Mat> projections;
  std::unordered_map<long long, std::vector<std::size_t>> buckets;
  auto signature = [&](const Mat& p) { return static_cast<long long>(std::llround(p.cwiseProduct(probe).sum() * 1e7)); };

  auto try_add = [&](const Mat& basis) {
    Mat proj = projection_matrix(basis, n);
    long long sig = signature(proj);
    for (long long s = sig - 1; s <= sig + 1; ++s) {
      auto it = buckets.find(s);
      if (it == buckets.end()) continue;
      for (std::size_t idx : it->second)
        if (lat.elements[idx].rows() == basis.rows() && (projections[idx] - proj).norm() < 1e-8) return false;
    }
    if (static_cast<int>(lat.elements.size()) >= cap) {
      lat.capped = true;
      return false;
    }
    buckets[sig].push_back(lat.elements.size());
    lat.elements.push_back(basis);
    projections.push_back(proj);
    return true;
  };
  try_add(Mat(0, n));
  try_add(Mat::Identity(n, n));
  for (const auto& g : generators) try_add(orthonormal_rows(g.rows() ? g : Mat(0, n)));

  std::size_t frontier_begin = 0;
  while (frontier_begin < lat.elements.size() && !lat.capped) {
    std::size_t frontier_end = lat.elements.size();
    for (std::size_t i = 0; i < frontier_end && !lat.capped; ++i) {
      std::size_t j0 = std::max(i + 1, frontier_begin);
      for (std::size_t j = j0; j < frontier_end && !lat.capped; ++j) {
        try_add(subspace_sum(lat.elements[i], lat.elements[j]));
        try_add(subspace_intersection(lat.elements[i], lat.elements[j], n));
      }
    }
    frontier_begin = frontier_end;
  }
  std::sort(lat.elements.begin(), lat.elements.end(), detail::lex_less);
  return lat;
}

// ---------------------------------------------------------------------------
// Exponents over the lattice

inline int intersection_dim(const Mat& v, const Mat& t, int n) {
  if (v.rows() == 0 || t.rows() == 0) return 0;
  Mat stacked(v.rows() + t.rows(), n);
  stacked.topRows(v.rows()) = v;
  stacked.bottomRows(t.rows()) = t;
  Eigen::JacobiSVD<Mat> svd(stacked);
  int sum_dim = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-8) ++sum_dim;
  return static_cast<int>(v.rows() + t.rows()) - sum_dim;
}

/// dim V - sum_j p_j dim(V / T_j) for one candidate subspace V.
inline double subspace_excess(const BLDatum& d, const Mat& v) {
  int dv = static_cast<int>(v.rows());
  double s = dv;
  for (int j = 0; j < d.m(); ++j) s -= d.exponents[j] * (dv - intersection_dim(v, d.subspaces[j], d.n));
  return s;
}

/// codim V - sum_j p_j codim(V / T_j) for one candidate subspace V.  Written
/// as scaling_residual - excess (the same expression rearranged), which keeps
/// the excess/deficit pairing exact even in floating point.
inline double subspace_deficit(const BLDatum& d, const Mat& v) {
  return d.scaling_residual() - subspace_excess(d, v);
}

struct ExponentReport {
  double kappa = 0.0;
  double kappa_tilde = 0.0;
  Mat kappa_argmax;        // subspace attaining kappa (smallest dim, then lex)
  Mat kappa_tilde_argmin;  // subspace attaining kappa_tilde
  int lattice_size = 0;
  bool lattice_capped = false;  // when set, values are certified only over the
                                // enumerated lattice, not over all subspaces
};

inline ExponentReport exponents(const BLDatum& d, int cap = 512) {
  SubspaceLattice lat = generate_lattice(d.n, d.subspaces, cap);
  ExponentReport rep;
  rep.lattice_size = static_cast<int>(lat.elements.size());
  rep.lattice_capped = lat.capped;
  rep.kappa = -std::numeric_limits<double>::infinity();
  rep.kappa_tilde = std::numeric_limits<double>::infinity();
  for (const auto& v : lat.elements) {
    double ex = subspace_excess(d, v);
    if (ex > rep.kappa + 1e-12) {
      rep.kappa = ex;
      rep.kappa_argmax = v;
    }
    double de = subspace_deficit(d, v);
    if (de < rep.kappa_tilde - 1e-12) {
      rep.kappa_tilde = de;
      rep.kappa_tilde_argmin = v;
    }
  }
  return rep;
}

struct ConditionReport {
  bool discrete = false;  // kappa == 0
  bool local = false;     // kappa_tilde == 0
  bool scaling = false;   // n == sum_j p_j n_j
  double kappa = 0.0;
  double kappa_tilde = 0.0;
  double scaling_residual = 0.0;
  bool lattice_capped = false;
};

inline ConditionReport bcct_conditions(const BLDatum& d, int cap = 512, double tol = 1e-9) {
  ExponentReport rep = exponents(d, cap);
  ConditionReport c;
  c.kappa = rep.kappa;
  c.kappa_tilde = rep.kappa_tilde;
  c.scaling_residual = d.scaling_residual();
  c.discrete = std::abs(rep.kappa) <= tol;
  c.local = std::abs(rep.kappa_tilde) <= tol;
  c.scaling = std::abs(c.scaling_residual) <= tol;
  c.lattice_capped = rep.lattice_capped;
  return c;
}

// ---------------------------------------------------------------------------
// Transversal closed form

struct LwResult {
  double value = std::numeric_limits<double>::infinity();
  bool infinite = false;
  double wedge_norm = 0.0;  // |T_1 ^ ... ^ T_m| in [0,1]
};

/// Closed-form constant for sum_j dim T_j = n and all p_j = 1/(m-1):
/// wedge_norm^{-1/(m-1)}, infinite when the subspaces fail to be transversal.
inline LwResult lw_constant(const BLDatum& d, double degeneracy_tol = 1e-12) {
  const int m = d.m();
  require(m >= 2, "lw_constant: need at least two subspaces");
  int ksum = 0;
  for (int j = 0; j < m; ++j) ksum += d.dim(j);
  require(ksum == d.n, "lw_constant: subspace dims must sum to the ambient dim");
  for (int j = 0; j < m; ++j)
    require(std::abs(d.exponents[j] - 1.0 / (m - 1)) <= 1e-12, "lw_constant: exponents must all equal 1/(m-1)");
  exterior::Blade acc = exterior::Blade::from_subspace(d.subspaces[0]);
  for (int j = 1; j < m; ++j) acc = exterior::wedge(acc, exterior::Blade::from_subspace(d.subspaces[j]));
  LwResult res;
  res.wedge_norm = acc.norm();
  if (res.wedge_norm <= degeneracy_tol) {
    res.infinite = true;
    return res;
  }
  res.infinite = false;
  res.value = std::pow(res.wedge_norm, -1.0 / (m - 1));
  return res;
}

// ---------------------------------------------------------------------------
// Step functions on quotient grids

struct CellKey {
  std::array<std::int32_t, kMaxAmbientDim> idx{};
  std::int8_t len = 0;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(k.len);
    for (int i = 0; i < k.len; ++i) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.idx[i])) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h *= 0xbf58476d1ce4e5b9ull;
    }
    return static_cast<std::size_t>(h ^ (h >> 31));
  }
};

/// Nonnegative step function on the scale-r cell grid of a quotient space;
/// cells are half-open boxes [c*r, (c+1)*r) indexed by integer corners.
struct QuotientFn {
  int qdim = 0;
  double scale = 1.0;
  std::unordered_map<CellKey, double, CellKeyHash> cells;

  static CellKey key_of(const Vec& y, double r) {
    CellKey k;
    k.len = static_cast<std::int8_t>(y.size());
    for (int i = 0; i < y.size(); ++i) k.idx[i] = static_cast<std::int32_t>(std::floor(y[i] / r));
    return k;
  }

  double value(const CellKey& k) const {
    auto it = cells.find(k);
    return it == cells.end() ? 0.0 : it->second;
  }

  double integral() const {
    double s = 0.0;
    for (const auto& [k, v] : cells) s += v;
    return s * std::pow(scale, qdim);
  }
};

struct TruncationWindow {
  double r = 1.0;
  double R = 1.0;
};

inline void validate_window(const TruncationWindow& w) {
  require(w.r > 0.0 && w.R > w.r, "window requires 0 < r < R");
}

/// Ratio  integral_{|x|<=R} prod_j f_j(x + T_j)^{p_j} dx / prod_j (int f_j)^{p_j}
/// for step inputs constant on scale-r quotient cells; the numerator cell-ball
/// overlap uses a fixed 4^n subsample per cell.  Any achieved ratio is a
/// certified lower bound for the window constant.
inline double bl_ratio(const BLDatum& d, const TruncationWindow& w, const std::vector<QuotientFn>& fns) {
  validate_window(w);
  require(static_cast<int>(fns.size()) == d.m(), "bl_ratio: need one input per subspace");
  const int n = d.n;
  const double r = w.r, R = w.R;
  std::vector<Mat> qmaps;
  std::vector<double> integrals;
  for (int j = 0; j < d.m(); ++j) {
    require(fns[j].qdim == d.quotient_dim(j), "bl_ratio: quotient dim mismatch");
    require(std::abs(fns[j].scale - r) <= 1e-12 * r, "bl_ratio: input scale must match the window");
    for (const auto& [k, v] : fns[j].cells) require(v >= 0.0, "bl_ratio: negative input value");
    double in = fns[j].integral();
    require(in > 0.0, "bl_ratio: input with zero integral");
    integrals.push_back(in);
    qmaps.push_back(quotient_map(d, j));
  }

  const int lo = static_cast<int>(std::floor(-R / r)) - 1;
  const int hi = static_cast<int>(std::floor(R / r)) + 1;
  const double R2 = R * R;

  std::vector<int> c(n, lo);
  Vec x(n), y;
  double numer = 0.0;
  while (true) {
    for (int i = 0; i < n; ++i) x[i] = (c[i] + 0.5) * r;
    // cheap reject: cell cannot meet the ball
    double dist2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double t = std::max(0.0, std::abs(x[i]) - 0.5 * r);
      dist2 += t * t;
    }
    if (dist2 <= R2) {
      double prod = 1.0;
      for (int j = 0; j < d.m() && prod > 0.0; ++j) {
        y = qmaps[j] * x;
        double v = fns[j].value(QuotientFn::key_of(y, r));
        prod = v > 0.0 ? prod * std::pow(v, d.exponents[j]) : 0.0;
      }
      if (prod > 0.0) {
        // overlap of the cell with the ball by 4^n midpoint subsamples
        int inside = 0, total = 0;
        std::vector<int> s(n, 0);
        while (true) {
          double q2 = 0.0;
          for (int i = 0; i < n; ++i) {
            double xs = (c[i] + (s[i] + 0.5) / 4.0) * r;
            q2 += xs * xs;
          }
          if (q2 <= R2) ++inside;
          ++total;
          int pos = 0;
          while (pos < n && ++s[pos] == 4) {
            s[pos] = 0;
            ++pos;
          }
          if (pos == n) break;
        }
        if (inside > 0) numer += prod * std::pow(r, n) * inside / total;
      }
    }
    int pos = 0;
    while (pos < n && ++c[pos] > hi) {
      c[pos] = lo;
      ++pos;
    }
    if (pos == n) break;
  }

  double denom = 1.0;
  for (int j = 0; j < d.m(); ++j) denom *= std::pow(integrals[j], d.exponents[j]);
  return numer / denom;
}

// ---------------------------------------------------------------------------
// Truncated constant estimation

struct EstimateBudget {
  int ascent_sweeps = 1;
  int ascent_cell_cap = 2048;     // skip greedy refinement on larger supports
  std::vector<double> extra_rhos;  // additional indicator radii to sweep
};

struct TruncatedEstimate {
  double value = 0.0;         // certified lower bound (an achieved ratio)
  double base_R = 0.0;        // reduced window (1, R/r) actually evaluated
  std::string family;         // input family achieving the bound
  std::vector<QuotientFn> witnesses;  // achieving inputs at the caller's scale
};

namespace detail {

inline QuotientFn single_cell(int qdim) {
  QuotientFn f;
  f.qdim = qdim;
  f.scale = 1.0;
  CellKey k;
  k.len = static_cast<std::int8_t>(qdim);
  f.cells[k] = 1.0;  // the cell [0,1)^qdim
  return f;
}

inline QuotientFn box_indicator(int qdim, double rho) {
  QuotientFn f;
  f.qdim = qdim;
  f.scale = 1.0;
  int b = std::max(1, static_cast<int>(std::lround(rho)));
  std::vector<int> c(qdim, -b);
  if (qdim == 0) {
    f.cells[CellKey{}] = 1.0;
    return f;
  }
  while (true) {
    CellKey k;
    k.len = static_cast<std::int8_t>(qdim);
    for (int i = 0; i < qdim; ++i) k.idx[i] = c[i];
    f.cells[k] = 1.0;
    int pos = 0;
    while (pos < qdim && ++c[pos] == b) {
      c[pos] = -b;
      ++pos;
    }
    if (pos == qdim) break;
  }
  return f;
}

inline QuotientFn radial_fn(int qdim, double radius, double gauss_s) {
  // gauss_s <= 0: ball indicator of the given radius; else a discretized
  // centered Gaussian truncated at 4 sigma
  QuotientFn f;
  f.qdim = qdim;
  f.scale = 1.0;
  if (qdim == 0) {
    f.cells[CellKey{}] = 1.0;
    return f;
  }
  double reach = gauss_s > 0.0 ? 4.0 * gauss_s : radius;
  int b = std::max(1, static_cast<int>(std::ceil(reach)) + 1);
  std::vector<int> c(qdim, -b);
  while (true) {
    double r2 = 0.0;
    for (int i = 0; i < qdim; ++i) {
      double t = c[i] + 0.5;
      r2 += t * t;
    }
    double v = 0.0;
    if (gauss_s > 0.0)
      v = r2 <= 16.0 * gauss_s * gauss_s ? std::exp(-r2 / (2.0 * gauss_s * gauss_s)) : 0.0;
    else
      v = r2 <= radius * radius ? 1.0 : 0.0;
    if (v > 0.0) {
      CellKey k;
      k.len = static_cast<std::int8_t>(qdim);
      for (int i = 0; i < qdim; ++i) k.idx[i] = c[i];
      f.cells[k] = v;
    }
    int pos = 0;
    while (pos < qdim && ++c[pos] == b) {
      c[pos] = -b;
      ++pos;
    }
    if (pos == qdim) break;
  }
  return f;
}

}  // namespace detail

/// Certified lower estimate of the window constant.  The window is first
/// reduced to (1, R/r) through the exact rescaling law
///   value(r, R) = r^{n - sum_j p_j n_j} * value(1, R/r),
/// then indicator/Gaussian families are swept and the best tuple gets a
/// budgeted greedy refinement.
inline TruncatedEstimate bl_truncated_estimate(const BLDatum& d, const TruncationWindow& w,
                                               const EstimateBudget& budget = {}) {
  validate_window(w);
  const double Rb = w.R / w.r;
  const TruncationWindow base{1.0, Rb};
  const double scale_factor = std::pow(w.r, d.scaling_residual());

  std::vector<double> rhos = {1.0};
  for (double rho = 2.0; rho < Rb; rho *= 2.0) rhos.push_back(rho);
  double inscribed = std::floor(Rb / std::sqrt(2.0));
  if (inscribed >= 1.0) rhos.push_back(inscribed);
  if (std::floor(Rb) >= 1.0) rhos.push_back(std::floor(Rb));
  for (double rho : budget.extra_rhos)
    if (rho >= 1.0) rhos.push_back(rho);
  std::sort(rhos.begin(), rhos.end());
  rhos.erase(std::unique(rhos.begin(), rhos.end()), rhos.end());

  TruncatedEstimate best;
  best.base_R = Rb;
  auto consider = [&](const std::vector<QuotientFn>& fns, const std::string& family) {
    double ratio = bl_ratio(d, base, fns);
    if (ratio > best.value) {
      best.value = ratio;
      best.family = family;
      best.witnesses = fns;
    }
  };

  auto tuple_of = [&](auto&& maker) {
    std::vector<QuotientFn> fns;
    for (int j = 0; j < d.m(); ++j) fns.push_back(maker(d.quotient_dim(j)));
    return fns;
  };

  consider(tuple_of([&](int q) { return detail::single_cell(q); }), "point");
  for (double rho : rhos) {
    consider(tuple_of([&](int q) { return detail::box_indicator(q, rho); }), "box");
    consider(tuple_of([&](int q) { return detail::radial_fn(q, rho + 0.5, 0.0); }), "ball");
  }
  for (double s : {Rb / 8.0, Rb / 4.0, Rb / 2.0, Rb})
    if (s >= 0.5) consider(tuple_of([&](int q) { return detail::radial_fn(q, 0.0, s); }), "gauss");

  // budgeted greedy refinement of the winning tuple
  std::size_t support = 0;
  for (const auto& f : best.witnesses) support += f.cells.size();
  if (support <= static_cast<std::size_t>(budget.ascent_cell_cap)) {
    for (int sweep = 0; sweep < budget.ascent_sweeps; ++sweep) {
      bool improved = false;
      for (int j = 0; j < d.m(); ++j) {
        std::vector<CellKey> keys;
        for (const auto& [k, v] : best.witnesses[j].cells) keys.push_back(k);
        std::sort(keys.begin(), keys.end(), [](const CellKey& a, const CellKey& b) {
          for (int i = 0; i < a.len; ++i)
            if (a.idx[i] != b.idx[i]) return a.idx[i] < b.idx[i];
          return false;
        });
        for (const auto& k : keys) {
          for (double mult : {2.0, 0.5}) {
            auto fns = best.witnesses;
            fns[j].cells[k] *= mult;
            double ratio = bl_ratio(d, base, fns);
            if (ratio > best.value * (1.0 + 1e-12)) {
              best.value = ratio;
              best.family = "ascent";
              best.witnesses = fns;
              improved = true;
            }
          }
        }
      }
      if (!improved) break;
    }
  }

  best.value *= scale_factor;
  for (auto& f : best.witnesses) f.scale = w.r;
  return best;
}

// ---------------------------------------------------------------------------
// Centered-Gaussian ratio

struct GaussianOptions {
  int iters = 300;
  int restarts = 8;
  std::uint64_t seed = 0;
  double cap = 1e12;  // ratio above this is reported as divergent
};

struct GaussianResult {
  double value = std::numeric_limits<double>::quiet_NaN();
  bool divergent = false;
  bool applicable = true;  // scale-invariance precondition
  std::vector<Mat> covariances;  // achieving A_j on success
};

namespace detail {

inline Mat sym_exp(const Mat& s) {
  if (s.rows() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

/// Supremum of the ratio over centered Gaussian inputs, approached by
/// derivative-free ascent over log-parameterized quotient covariances:
///   log ratio = (1/2) [ sum_j p_j tr(S_j) - logdet sum_j p_j B_j^T e^{S_j} B_j ].
inline GaussianResult bl_gaussian(const BLDatum& d, const GaussianOptions& opts = {}) {
  GaussianResult res;
  if (std::abs(d.scaling_residual()) > 1e-9) {
    res.applicable = false;
    return res;
  }
  const int m = d.m();
  std::vector<Mat> qmaps;
  std::vector<int> offsets;  // parameter offsets per subspace
  int nparams = 0;
  for (int j = 0; j < m; ++j) {
    qmaps.push_back(quotient_map(d, j));
    offsets.push_back(nparams);
    int nj = d.quotient_dim(j);
    nparams += nj * (nj + 1) / 2;
  }

  auto unpack = [&](const Vec& theta, int j) {
    int nj = d.quotient_dim(j);
    Mat s(nj, nj);
    int t = offsets[j];
    for (int a = 0; a < nj; ++a)
      for (int b = a; b < nj; ++b) {
        s(a, b) = theta[t];
        s(b, a) = theta[t];
        ++t;
      }
    return s;
  };

  int total_rows = 0;
  for (int j = 0; j < m; ++j) total_rows += d.quotient_dim(j);

  // logdet of M = sum_j p_j B_j^T e^{S_j} B_j through the stacked square-root
  // factor C (M = C^T C) and its singular values; forming M directly cancels
  // catastrophically once the covariance scales spread, and the ascent would
  // happily climb that rounding noise
  auto log_ratio = [&](const Vec& theta) -> double {
    if (total_rows < d.n) return -std::numeric_limits<double>::infinity();
    Mat stacked(total_rows, d.n);
    double trace_term = 0.0;
    int rowpos = 0;
    for (int j = 0; j < m; ++j) {
      Mat s = unpack(theta, j);
      trace_term += d.exponents[j] * s.trace();
      int nj = d.quotient_dim(j);
      if (nj > 0) {
        stacked.middleRows(rowpos, nj) = std::sqrt(d.exponents[j]) * detail::sym_exp(Mat(0.5 * s)) * qmaps[j];
        rowpos += nj;
      }
    }
    Eigen::JacobiSVD<Mat> svd(stacked);
    double logdet = 0.0;
    for (int i = 0; i < d.n; ++i) {
      double sv = svd.singularValues()[i];
      if (!(sv > 1e-154)) return -std::numeric_limits<double>::infinity();
      logdet += 2.0 * std::log(sv);
    }
    return 0.5 * (trace_term - logdet);
  };

  double best = -std::numeric_limits<double>::infinity();
  Vec best_theta = Vec::Zero(nparams);
  Rng rng(opts.seed);
  bool any_valid = false;
  const double log_cap = std::log(opts.cap);

  for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
    Rng local = rng.split(restart);
    Vec theta = Vec::Zero(nparams);
    if (restart > 0)
      for (int i = 0; i < nparams; ++i) theta[i] = local.normal();
    double cur = log_ratio(theta);
    if (std::isfinite(cur)) any_valid = true;
    Vec steps = Vec::Constant(std::max(nparams, 1), 0.5);
    for (int iter = 0; iter < opts.iters; ++iter) {
      bool improved = false;
      for (int i = 0; i < nparams; ++i) {
        for (double dir : {1.0, -1.0}) {
          Vec cand = theta;
          cand[i] += dir * steps[i];
          double val = log_ratio(cand);
          if (val > cur) {
            cur = val;
            theta = cand;
            any_valid = true;
            steps[i] *= 1.6;
            improved = true;
            break;
          }
        }
      }
      if (!improved) {
        steps *= 0.5;
        if (steps.maxCoeff() < 1e-10) break;
      }
      if (cur > log_cap) break;
    }
    if (cur > best) {
      best = cur;
      best_theta = theta;
    }
    if (best > log_cap) break;
  }

  if (!any_valid || best > log_cap) {
    res.divergent = true;
    return res;
  }
  res.value = std::exp(best);
  for (int j = 0; j < m; ++j) res.covariances.push_back(detail::sym_exp(unpack(best_theta, j)));
  return res;
}

// ---------------------------------------------------------------------------
// Random data generators (shared by the test suites and the CLI)

/// Random datum with subspace dims in [0, n]; exponents in [0.25, 2].
inline BLDatum random_datum(int n, int m, Rng& rng) {
  std::vector<Mat> gens;
  for (int j = 0; j < m; ++j) {
    int k = rng.uniform_int(0, n);
    Mat g(k, n);
    for (int i = 0; i < k; ++i) g.row(i) = rng.gaussian_vector(n).transpose();
    gens.push_back(g);
  }
  Vec p(m);
  for (int j = 0; j < m; ++j) p[j] = rng.uniform(0.25, 2.0);
  return make_datum(n, gens, p);
}

/// Random datum whose subspaces are coordinate subspaces under one common
/// rotation, so every lattice rank is exact by construction.
inline BLDatum random_flag_datum(int n, int m, Rng& rng) {
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  std::vector<Mat> gens;
  for (int j = 0; j < m; ++j) {
    int k = rng.uniform_int(0, n);
    // pick k distinct coordinates
    std::vector<int> coords(n);
    for (int i = 0; i < n; ++i) coords[i] = i;
    for (int i = 0; i < k; ++i) std::swap(coords[i], coords[rng.uniform_int(i, n - 1)]);
    Mat b(k, n);
    for (int i = 0; i < k; ++i) b.row(i) = q.col(coords[i]).transpose();
    gens.push_back(b);
  }
  Vec p(m);
  for (int j = 0; j < m; ++j) p[j] = rng.uniform(0.25, 2.0);
  return make_datum(n, gens, p);
}

}  // namespace kbl::bl

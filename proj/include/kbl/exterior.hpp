#pragma once

/// Exterior algebra over R^n (n <= 8) with dense coefficients in the
/// lexicographic multi-index basis, plus atomic measures on the Grassmann
/// cone: weighted sums of simple k-blades with sign-insensitive pairings.

#include "kbl/common.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace kbl::exterior {

class MultiVector {
 public:
  MultiVector(int n, int k) : n_(n), k_(k) {
    require(0 <= n && n <= kMaxAmbientDim, "MultiVector: ambient dim out of range");
    require(0 <= k && k <= n, "MultiVector: grade out of range");
    coeffs_ = Vec::Zero(binomial(n, k));
  }

  static MultiVector from_vector(const Vec& v) {
    MultiVector m(static_cast<int>(v.size()), 1);
    m.coeffs_ = v;
    return m;
  }

  /// Basis blade e_{S} for a sorted list of 0-based indices.
  static MultiVector basis_blade(int n, const std::vector<int>& elems) {
    MultiVector m(n, static_cast<int>(elems.size()));
    std::uint16_t mask = 0;
    for (int e : elems) {
      require(0 <= e && e < n, "basis_blade: index out of range");
      require(!(mask & (1u << e)), "basis_blade: repeated index");
      mask = static_cast<std::uint16_t>(mask | (1u << e));
    }
    m.coeffs_[subset_rank(n, mask)] = 1.0;
    return m;
  }

  int n() const { return n_; }
  int k() const { return k_; }
  const Vec& coeffs() const { return coeffs_; }
  Vec& coeffs() { return coeffs_; }
  double coeff(std::uint16_t mask) const { return coeffs_[subset_rank(n_, mask)]; }

  double norm() const { return coeffs_.norm(); }

  MultiVector& operator*=(double c) {
    coeffs_ *= c;
    return *this;
  }
  friend MultiVector operator*(double c, MultiVector m) {
    m *= c;
    return m;
  }
  friend MultiVector operator+(MultiVector a, const MultiVector& b) {
    require(a.n_ == b.n_ && a.k_ == b.k_, "multivector sum: grade/dim mismatch");
    a.coeffs_ += b.coeffs_;
    return a;
  }
  friend MultiVector operator-(MultiVector a, const MultiVector& b) {
    require(a.n_ == b.n_ && a.k_ == b.k_, "multivector difference: grade/dim mismatch");
    a.coeffs_ -= b.coeffs_;
    return a;
  }

 private:
  int n_, k_;
  Vec coeffs_;
};

inline MultiVector wedge(const MultiVector& a, const MultiVector& b) {
  require(a.n() == b.n(), "wedge: ambient dim mismatch");
  require(a.k() + b.k() <= a.n(), "wedge: grade overflow");
  const int n = a.n();
  MultiVector out(n, a.k() + b.k());
  const auto& ma = subset_masks(n, a.k());
  const auto& mb = subset_masks(n, b.k());
  for (std::size_t i = 0; i < ma.size(); ++i) {
    double ca = a.coeffs()[i];
    if (ca == 0.0) continue;
    for (std::size_t j = 0; j < mb.size(); ++j) {
      double cb = b.coeffs()[j];
      if (cb == 0.0) continue;
      if (ma[i] & mb[j]) continue;
      int sign = detail::wedge_sign(ma[i], mb[j]);
      out.coeffs()[subset_rank(n, static_cast<std::uint16_t>(ma[i] | mb[j]))] += sign * ca * cb;
    }
  }
  return out;
}

inline MultiVector hodge_star(const MultiVector& a) {
  const int n = a.n();
  MultiVector out(n, n - a.k());
  const auto& ma = subset_masks(n, a.k());
  const std::uint16_t full = static_cast<std::uint16_t>((1u << n) - 1);
  for (std::size_t i = 0; i < ma.size(); ++i) {
    double c = a.coeffs()[i];
    if (c == 0.0) continue;
    std::uint16_t comp = static_cast<std::uint16_t>(full & ~ma[i]);
    out.coeffs()[subset_rank(n, comp)] += detail::wedge_sign(ma[i], comp) * c;
  }
  return out;
}

/// |<a,b>| in the inner product making the basis blades orthonormal; on
/// simple blades this is |det Gram| of the generating vectors.
inline double abs_inner(const MultiVector& a, const MultiVector& b) {
  require(a.n() == b.n() && a.k() == b.k(), "abs_inner: grade/dim mismatch");
  return std::abs(a.coeffs().dot(b.coeffs()));
}

// ---------------------------------------------------------------------------

/// Simple blade together with a generating set of row vectors.
struct Blade {
  MultiVector mv;
  Mat rep;  // k x n rows wedged in order

  static Blade from_vectors(const Mat& rows) {
    const int n = static_cast<int>(rows.cols());
    require(rows.rows() <= n, "Blade: more generators than ambient dim");
    MultiVector acc(n, 0);
    acc.coeffs()[0] = 1.0;
    for (int i = 0; i < rows.rows(); ++i) acc = wedge(acc, MultiVector::from_vector(rows.row(i).transpose()));
    return Blade{std::move(acc), rows};
  }

  /// Unit-norm blade of a subspace given by an orthonormal basis.
  static Blade from_subspace(const Mat& orthonormal_rows) { return from_vectors(orthonormal_rows); }

  int n() const { return mv.n(); }
  int k() const { return mv.k(); }
  double norm() const { return mv.norm(); }
};

inline Blade wedge(const Blade& a, const Blade& b) {
  Mat rep(a.rep.rows() + b.rep.rows(), a.rep.cols());
  if (a.rep.rows()) rep.topRows(a.rep.rows()) = a.rep;
  if (b.rep.rows()) rep.bottomRows(b.rep.rows()) = b.rep;
  return Blade{wedge(a.mv, b.mv), rep};
}

// ---------------------------------------------------------------------------
// Atomic graded measures: finite weighted sums of simple blades.  All pairing
// functionals take absolute values at the consumption site, so atom signs are
// never canonicalized; zero blades are legitimate atoms.

struct GradedMeasure {
  int n = 0;
  int k = 0;
  struct Atom {
    Blade blade;
    double weight;
  };
  std::vector<Atom> atoms;

  GradedMeasure(int n_, int k_) : n(n_), k(k_) {}

  GradedMeasure& add(Blade b, double w) {
    require(b.n() == n && b.k() == k, "GradedMeasure::add: grade/dim mismatch");
    require(w >= 0.0, "GradedMeasure::add: negative weight");
    atoms.push_back({std::move(b), w});
    return *this;
  }

  double total_weight() const {
    double t = 0.0;
    for (const auto& a : atoms) t += a.weight;
    return t;
  }

  /// Drop atoms lighter than rel * total weight (default matches the atom
  /// retention rule used throughout: only utterly negligible mass goes).
  void prune(double rel = 1e-15) {
    double cut = rel * total_weight();
    std::vector<Atom> kept;
    kept.reserve(atoms.size());
    for (auto& a : atoms)
      if (a.weight >= cut) kept.push_back(std::move(a));
    atoms.swap(kept);
  }
};

/// Pushforward of the product measure under the ordered wedge; every ordered
/// pair becomes an atom, zero blades included.
inline GradedMeasure measure_wedge(const GradedMeasure& a, const GradedMeasure& b) {
  require(a.n == b.n, "measure_wedge: ambient dim mismatch");
  require(a.k + b.k <= a.n, "measure_wedge: grade overflow");
  GradedMeasure out(a.n, a.k + b.k);
  out.atoms.reserve(a.atoms.size() * b.atoms.size());
  for (const auto& x : a.atoms)
    for (const auto& y : b.atoms) out.atoms.push_back({wedge(x.blade, y.blade), x.weight * y.weight});
  return out;
}

inline GradedMeasure wedge_power(const GradedMeasure& m, int power) {
  require(power >= 1, "wedge_power: power must be >= 1");
  GradedMeasure out = m;
  for (int i = 1; i < power; ++i) out = measure_wedge(out, m);
  return out;
}

inline GradedMeasure star_measure(const GradedMeasure& m) {
  GradedMeasure out(m.n, m.n - m.k);
  out.atoms.reserve(m.atoms.size());
  for (const auto& a : m.atoms) {
    Blade b{hodge_star(a.blade.mv), a.blade.rep};  // keep the pre-star representative around
    out.atoms.push_back({std::move(b), a.weight});
  }
  return out;
}

/// Total mass of blade norms: sum_i w_i |b_i|.
inline double first_moment(const GradedMeasure& m) {
  double t = 0.0;
  for (const auto& a : m.atoms) t += a.weight * a.blade.norm();
  return t;
}

/// sum_i w_i |<b_i, t>| for a fixed test multivector of matching grade.
inline double pairing_moment(const GradedMeasure& m, const MultiVector& t) {
  require(t.n() == m.n && t.k() == m.k, "pairing_moment: grade/dim mismatch");
  double s = 0.0;
  for (const auto& a : m.atoms) s += a.weight * abs_inner(a.blade.mv, t);
  return s;
}

inline double pairing_moment(const GradedMeasure& m, const Blade& t) { return pairing_moment(m, t.mv); }

/// pairing_moment against mu^{^power} without materializing the power measure;
/// sums over ordered tuples of atoms.
inline double pairing_moment_power(const GradedMeasure& m, int power, const MultiVector& t) {
  require(power >= 1, "pairing_moment_power: power must be >= 1");
  if (power == 1) return pairing_moment(m, t);
  const std::size_t na = m.atoms.size();
  double s = 0.0;
  std::vector<std::size_t> idx(power, 0);
  while (true) {
    MultiVector w = m.atoms[idx[0]].blade.mv;
    double wt = m.atoms[idx[0]].weight;
    for (int i = 1; i < power; ++i) {
      w = wedge(w, m.atoms[idx[i]].blade.mv);
      wt *= m.atoms[idx[i]].weight;
    }
    s += wt * abs_inner(w, t);
    int pos = power - 1;
    while (pos >= 0 && ++idx[pos] == na) {
      idx[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return s;
}

}  // namespace kbl::exterior

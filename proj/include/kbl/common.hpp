#pragma once

/// Shared numeric plumbing: dense linear-algebra aliases, subset tables for
/// the multi-index bases, a splittable deterministic RNG, and small-subspace
/// helpers (orthonormal bases, sums, intersections, complements).

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kbl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Ambient dimensions are capped so C(n,k) coefficient tables stay tiny.
inline constexpr int kMaxAmbientDim = 8;

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

namespace detail {

/// k-element subsets of {0..n-1} as bitmasks, in lexicographic order of the
/// sorted element lists.  This is the coefficient ordering of MultiVector.
inline std::vector<std::uint16_t> make_subset_masks(int n, int k) {
  std::vector<std::uint16_t> out;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return out;
  while (true) {
    std::uint16_t m = 0;
    for (int i : idx) m = static_cast<std::uint16_t>(m | (1u << i));
    out.push_back(m);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  if (k == 0) out = {0};
  return out;
}

struct SubsetTables {
  // masks[n][k] = lex-ordered masks; rank[n][mask] = index within its grade.
  std::array<std::array<std::vector<std::uint16_t>, kMaxAmbientDim + 1>, kMaxAmbientDim + 1> masks;
  std::array<std::array<int, 1 << kMaxAmbientDim>, kMaxAmbientDim + 1> rank;
  SubsetTables() {
    for (int n = 0; n <= kMaxAmbientDim; ++n) {
      rank[n].fill(-1);
      for (int k = 0; k <= n; ++k) {
        masks[n][k] = make_subset_masks(n, k);
        for (std::size_t i = 0; i < masks[n][k].size(); ++i) rank[n][masks[n][k][i]] = static_cast<int>(i);
      }
    }
  }
};

inline const SubsetTables& subset_tables() {
  static const SubsetTables t;
  return t;
}

/// Sign of e_S ^ e_T relative to e_{S|T}; S, T disjoint bitmasks.
inline int wedge_sign(std::uint16_t s, std::uint16_t t) {
  int inv = 0;
  for (std::uint16_t tt = t; tt;) {
    int b = __builtin_ctz(tt);
    inv += __builtin_popcount(static_cast<unsigned>(s) >> (b + 1));
    tt = static_cast<std::uint16_t>(tt & (tt - 1));
  }
  return (inv & 1) ? -1 : 1;
}

}  // namespace detail

inline const std::vector<std::uint16_t>& subset_masks(int n, int k) {
  require(0 <= n && n <= kMaxAmbientDim && 0 <= k && k <= n, "subset_masks: bad (n,k)");
  return detail::subset_tables().masks[n][k];
}

inline int subset_rank(int n, std::uint16_t mask) { return detail::subset_tables().rank[n][mask]; }

// ---------------------------------------------------------------------------
// Deterministic splittable RNG (splitmix64 core + Box-Muller)

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Independent stream derived from this seed; does not advance this state.
  Rng split(std::uint64_t stream) const {
    Rng r(state_ ^ (0x6a09e667f3bcc909ull + stream * 0x9e3779b97f4a7c15ull));
    r.next_u64();
    return r;
  }

  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0, u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    have_spare_ = true;
    spare_ = r * std::sin(2.0 * M_PI * u2);
    return r * std::cos(2.0 * M_PI * u2);
  }

  Vec gaussian_vector(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  Vec unit_vector(int n) {
    Vec v = gaussian_vector(n);
    double norm = v.norm();
    while (norm < 1e-12) {
      v = gaussian_vector(n);
      norm = v.norm();
    }
    return v / norm;
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Subspace helpers.  Subspaces are stored as orthonormal bases in row form
// (k x n); the zero subspace is a 0 x n matrix.

/// Orthonormal basis of the row space, rank detected at `tol`.
inline Mat orthonormal_rows(const Mat& rows, double tol = 1e-10) {
  if (rows.rows() == 0) return Mat(0, rows.cols());
  Eigen::JacobiSVD<Mat> svd(rows, Eigen::ComputeThinV | Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int r = 0;
  double cutoff = tol * std::max(1.0, sv.size() ? sv[0] : 0.0);
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++r;
  Mat basis(r, rows.cols());
  for (int i = 0; i < r; ++i) basis.row(i) = svd.matrixV().col(i).transpose();
  return basis;
}

/// Orthonormal basis of the orthogonal complement of the row space.
inline Mat complement_basis(const Mat& basis, int n) {
  if (basis.rows() == 0) return Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> svd(basis, Eigen::ComputeFullV);
  int k = static_cast<int>(basis.rows());
  Mat out(n - k, n);
  for (int i = k; i < n; ++i) out.row(i - k) = svd.matrixV().col(i).transpose();
  return out;
}

inline Mat subspace_sum(const Mat& a, const Mat& b) {
  Mat stacked(a.rows() + b.rows(), a.cols());
  if (a.rows()) stacked.topRows(a.rows()) = a;
  if (b.rows()) stacked.bottomRows(b.rows()) = b;
  return orthonormal_rows(stacked);
}

inline Mat subspace_intersection(const Mat& a, const Mat& b, int n) {
  return complement_basis(subspace_sum(complement_basis(a, n), complement_basis(b, n)), n);
}

/// Projection matrix onto the row space; used for deduplication distances.
inline Mat projection_matrix(const Mat& basis, int n) {
  if (basis.rows() == 0) return Mat::Zero(n, n);
  return basis.transpose() * basis;
}

}  // namespace kbl

#pragma once

/// On-disk formats: JSON loaders for data, families, polynomials and tensors,
/// plus CSV/JSON writers for reports and meshes.  Writers carry no timestamps
/// or environment-dependent fields, so identical inputs produce byte-identical
/// files; doubles are printed with enough digits to round-trip.

#include "kbl/bl_core.hpp"
#include "kbl/fremlin.hpp"
#include "kbl/harness.hpp"
#include "kbl/polysurf.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>
#include <utility>
#include <vector>

namespace kbl::io {

using nlohmann::json;

inline json parse_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    require(false, path + ":" + std::to_string(line) + ": " + e.what());
  }
  return {};
}

inline Vec load_vec(const json& j, const std::string& what) {
  require(j.is_array(), what + " must be an array of numbers");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_number(), what + " must contain only numbers");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

inline Mat load_mat(const json& j, const std::string& what) {
  require(j.is_array(), what + " must be an array of rows");
  if (j.empty()) return Mat(0, 0);
  Vec first = load_vec(j[0], what + " row");
  Mat m(j.size(), first.size());
  m.row(0) = first.transpose();
  for (std::size_t r = 1; r < j.size(); ++r) {
    Vec row = load_vec(j[r], what + " row");
    require(row.size() == first.size(), what + " rows must have equal length");
    m.row(static_cast<int>(r)) = row.transpose();
  }
  return m;
}

/// Worst deviation of G G^T from the identity: zero when the rows are already
/// an orthonormal system.
inline double orthonormal_defect(const Mat& rows) {
  if (rows.rows() == 0) return 0.0;
  return (rows * rows.transpose() - Mat::Identity(rows.rows(), rows.rows())).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Loaders

/// {"n": int, "subspaces": [[[...],...],...], "exponents": [...]}.  Subspace
/// generator rows are orthonormalized on load; a warning records any input
/// that was not already orthonormal to 1e-6.
inline bl::BLDatum load_datum(const json& j, std::vector<std::string>* warnings = nullptr) {
  require(j.is_object() && j.contains("n") && j.contains("subspaces") && j.contains("exponents"),
          "datum needs fields n, subspaces, exponents");
  const int n = j["n"].get<int>();
  Vec p = load_vec(j["exponents"], "exponents");
  require(j["subspaces"].is_array(), "subspaces must be an array");
  std::vector<Mat> gens;
  for (std::size_t s = 0; s < j["subspaces"].size(); ++s) {
    Mat g = load_mat(j["subspaces"][s], "subspace " + std::to_string(s));
    if (g.rows() == 0) g = Mat(0, n);
    require(g.cols() == n, "subspace " + std::to_string(s) + " width must equal n");
    if (warnings && orthonormal_defect(g) > 1e-6)
      warnings->push_back("subspace " + std::to_string(s) + " was re-orthonormalized (defect " +
                          std::to_string(orthonormal_defect(g)) + ")");
    gens.push_back(std::move(g));
  }
  return bl::make_datum(n, gens, p);
}

inline bl::BLDatum load_datum_file(const std::string& path, std::vector<std::string>* warnings = nullptr) {
  return load_datum(parse_file(path), warnings);
}

/// {"k": int, "members": [{"point": [...], "basis": [[...],...]},...]}.
inline harness::AffineFamily load_family(const json& j, std::vector<std::string>* warnings = nullptr) {
  require(j.is_object() && j.contains("k") && j.contains("members"), "family needs fields k, members");
  const int k = j["k"].get<int>();
  require(j["members"].is_array() && !j["members"].empty(), "family needs at least one member");
  std::vector<harness::AffineSubspace> members;
  for (std::size_t i = 0; i < j["members"].size(); ++i) {
    const json& jm = j["members"][i];
    require(jm.is_object() && jm.contains("point") && jm.contains("basis"),
            "family member " + std::to_string(i) + " needs point and basis");
    Vec pt = load_vec(jm["point"], "member point");
    Mat basis = load_mat(jm["basis"], "member basis");
    if (basis.rows() == 0) basis = Mat(0, pt.size());
    if (warnings && orthonormal_defect(basis) > 1e-6)
      warnings->push_back("family member " + std::to_string(i) + " basis was re-orthonormalized");
    auto t = harness::affine_subspace(pt, basis);
    require(t.k == k, "family member " + std::to_string(i) + " has dimension " + std::to_string(t.k) +
                          ", expected " + std::to_string(k));
    members.push_back(std::move(t));
  }
  return harness::affine_family(std::move(members));
}

inline harness::AffineFamily load_family_file(const std::string& path,
                                              std::vector<std::string>* warnings = nullptr) {
  return load_family(parse_file(path), warnings);
}

/// {"n": int, "terms": [{"exps": [int,...], "coef": real},...]}.
inline poly::PolyNVars load_polynomial(const json& j) {
  require(j.is_object() && j.contains("n") && j.contains("terms"), "polynomial needs fields n, terms");
  const int n = j["n"].get<int>();
  poly::PolyNVars p(n);
  require(j["terms"].is_array(), "terms must be an array");
  for (const json& jt : j["terms"]) {
    require(jt.is_object() && jt.contains("exps") && jt.contains("coef"),
            "each term needs exps and coef");
    require(jt["exps"].is_array() && static_cast<int>(jt["exps"].size()) == n,
            "term exps length must equal n");
    poly::PolyNVars::Exps e{};
    for (int i = 0; i < n; ++i) {
      int ei = jt["exps"][i].get<int>();
      require(ei >= 0, "term exponents must be nonnegative");
      e[i] = ei;
    }
    p.add_term(e, jt["coef"].get<double>());
  }
  return p;
}

inline poly::PolyNVars load_polynomial_file(const std::string& path) {
  return load_polynomial(parse_file(path));
}

/// {"dims": [int,...], "entries": [flat row-major, last axis fastest],
///  optional "weights": [[...],...], optional "q": [...]}.
inline fremlin::NonnegTensor load_tensor(const json& j, Vec* q_out = nullptr) {
  require(j.is_object() && j.contains("dims") && j.contains("entries"),
          "tensor needs fields dims, entries");
  require(j["dims"].is_array() && !j["dims"].empty(), "dims must be a nonempty array");
  std::vector<fremlin::WeightedIndexSet> axes;
  std::size_t total = 1;
  for (std::size_t a = 0; a < j["dims"].size(); ++a) {
    int d = j["dims"][a].get<int>();
    require(d >= 1, "dims must be positive");
    total *= static_cast<std::size_t>(d);
    if (j.contains("weights")) {
      require(j["weights"].is_array() && j["weights"].size() == j["dims"].size(),
              "weights must list one vector per axis");
      Vec w = load_vec(j["weights"][a], "axis weights");
      require(w.size() == d, "axis weight length must match its dim");
      axes.push_back(fremlin::WeightedIndexSet{w});
    } else {
      axes.push_back(fremlin::counting_axis(d));
    }
  }
  fremlin::NonnegTensor t(axes);
  require(j["entries"].is_array() && j["entries"].size() == total,
          "entries must hold exactly the product of dims values");
  for (std::size_t i = 0; i < total; ++i) t.flat_at(i) = j["entries"][i].get<double>();
  t.check_nonnegative();
  if (q_out) {
    if (j.contains("q"))
      *q_out = load_vec(j["q"], "q");
    else
      *q_out = Vec();
  }
  return t;
}

// ---------------------------------------------------------------------------
// Writers

/// Shortest representation that still round-trips a double exactly.
inline std::string fmt(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
    char ibuf[32];
    std::snprintf(ibuf, sizeof ibuf, "%.0f", v);
    return ibuf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  double back = 0.0;
  std::sscanf(buf, "%lf", &back);
  if (back == v) {
    for (int prec = 1; prec < 17; ++prec) {
      char shorter[64];
      std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
      std::sscanf(shorter, "%lf", &back);
      if (back == v) return shorter;
    }
  }
  return buf;
}

struct CsvWriter {
  std::ofstream out;
  explicit CsvWriter(const std::string& path) : out(path, std::ios::binary) {
    require(out.good(), "cannot write " + path);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  }
};

inline std::string join_flags(const std::vector<std::string>& flags) {
  if (flags.empty()) return "none";
  std::string s;
  for (const auto& f : flags) s += (s.empty() ? "" : "|") + f;
  return s;
}

/// Per-cube rows under a fixed header, then one ragged summary row carrying
/// the totals; layouts are documented in the README.
inline void save_report_csv(const harness::KBLReport& rep, const std::string& path) {
  CsvWriter w(path);
  int n = 0, m = 0;
  if (!rep.rows.empty()) {
    n = static_cast<int>(rep.rows.front().corner.size());
    m = static_cast<int>(rep.rows.front().incident.size());
  }
  std::vector<std::string> header = {"kind"};
  for (int i = 0; i < n; ++i) header.push_back("corner" + std::to_string(i));
  for (int j = 0; j < m; ++j) header.push_back("incident" + std::to_string(j));
  header.push_back("term");
  header.push_back("cumulative_lhs");
  w.row(header);
  double cum = 0.0;
  for (const auto& row : rep.rows) {
    cum += row.term;
    std::vector<std::string> cells = {"cube"};
    for (int i = 0; i < n; ++i) cells.push_back(fmt(row.corner[i]));
    for (int j = 0; j < m; ++j) cells.push_back(std::to_string(row.incident[j]));
    cells.push_back(fmt(row.term));
    cells.push_back(fmt(cum));
    w.row(cells);
  }
  w.row({"summary", fmt(rep.lhs), fmt(rep.rhs), fmt(rep.ratio), rep.bl_source, join_flags(rep.flags)});
}

inline json report_json(const harness::KBLReport& rep) {
  json j;
  j["lhs"] = rep.lhs;
  j["rhs"] = rep.rhs;
  j["ratio"] = rep.ratio;
  j["bl_source"] = rep.bl_source;
  j["flags"] = rep.flags;
  json rows = json::array();
  for (const auto& row : rep.rows) {
    json jr;
    jr["corner"] = std::vector<double>(row.corner.data(), row.corner.data() + row.corner.size());
    jr["incident"] = row.incident;
    jr["term"] = row.term;
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline void save_report_json(const harness::KBLReport& rep, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot write " + path);
  out << report_json(rep).dump(2) << '\n';
}

/// Facet table: centroid, unit normal, measure.
inline void save_mesh_csv(const poly::ZeroSetMesh& mesh, const std::string& path) {
  CsvWriter w(path);
  std::vector<std::string> header;
  for (int i = 0; i < mesh.n; ++i) header.push_back("centroid" + std::to_string(i));
  for (int i = 0; i < mesh.n; ++i) header.push_back("normal" + std::to_string(i));
  header.push_back("measure");
  w.row(header);
  for (const auto& f : mesh.facets) {
    std::vector<std::string> cells;
    for (int i = 0; i < mesh.n; ++i) cells.push_back(fmt(f.centroid[i]));
    for (int i = 0; i < mesh.n; ++i) cells.push_back(fmt(f.normal[i]));
    cells.push_back(fmt(f.measure));
    w.row(cells);
  }
}

}  // namespace kbl::io

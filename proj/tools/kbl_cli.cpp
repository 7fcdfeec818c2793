// Batch experiment runner: computes scaling exponents, grid inequality
// reports, tensor norms and module self-checks from JSON configs, writing
// deterministic CSV/JSON artifacts.  Exit codes: 0 pass, 1 invariant failure,
// 2 config or usage error.

#include "kbl/bl_core.hpp"
#include "kbl/exterior.hpp"
#include "kbl/fremlin.hpp"
#include "kbl/geometry.hpp"
#include "kbl/harness.hpp"
#include "kbl/io.hpp"
#include "kbl/polysurf.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace kbl;
using nlohmann::json;

struct Opts {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  long samples = -1;  // unset: use the subcommand default; 0 is a real (vacuous) budget
  int threads = 1;
};

void add_common(CLI::App* cmd, Opts& o, bool config_required) {
  auto* copt = cmd->add_option("--config", o.config, "JSON config file");
  if (config_required) copt->required();
  cmd->add_option("--out", o.out, "output directory, created if missing");
  cmd->add_option("--seed", o.seed, "seed for every random draw of the run");
  cmd->add_option("--samples", o.samples, "sampling budget; 0 makes checks vacuous");
  cmd->add_option("--threads", o.threads, "worker threads for grid sweeps")->check(CLI::PositiveNumber);
}

std::string out_file(const Opts& o, const std::string& name) {
  std::filesystem::create_directories(o.out);
  return (std::filesystem::path(o.out) / name).string();
}

json load_config(const Opts& o) {
  if (o.config.empty()) return json::object();
  json j = io::parse_file(o.config);
  require(j.is_object(), o.config + ": config must be a JSON object");
  return j;
}

double cfg_num(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  require(j.at(key).is_number(), "config field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

long cfg_int(const json& j, const std::string& key, long fallback) {
  if (!j.contains(key)) return fallback;
  require(j.at(key).is_number_integer(), "config field '" + key + "' must be an integer");
  return j.at(key).get<long>();
}

std::string cfg_str(const json& j, const std::string& key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  require(j.at(key).is_string(), "config field '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

std::vector<double> cfg_list(const json& j, const std::string& key, std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  require(j.at(key).is_array() && !j.at(key).empty(), "config field '" + key + "' must be a nonempty array");
  std::vector<double> out;
  for (const auto& v : j.at(key)) out.push_back(v.get<double>());
  return out;
}

harness::BlSource parse_source(const std::string& s) {
  if (s == "auto") return harness::BlSource::Auto;
  if (s == "loomis-whitney") return harness::BlSource::LoomisWhitney;
  if (s == "gaussian") return harness::BlSource::Gaussian;
  if (s == "truncated") return harness::BlSource::Truncated;
  require(false, "unknown bl_source '" + s + "' (want auto|loomis-whitney|gaussian|truncated)");
  return harness::BlSource::Auto;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  require(xs.size() == ys.size() && xs.size() >= 2, "slope fit needs at least two sweep points");
  double n = static_cast<double>(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double den = n * sxx - sx * sx;
  require(std::abs(den) > 1e-12, "sweep points are degenerate, cannot fit a slope");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  for (std::size_t i = 0; i < xs.size(); ++i)
    f.max_residual = std::max(f.max_residual, std::abs(ys[i] - (f.intercept + f.slope * xs[i])));
  return f;
}

// ---------------------------------------------------------------------------
// Shared check-table plumbing for the verification subcommands

struct CheckRow {
  std::string name;
  long trials = 0;
  double observed = 0.0;
  double bound = 0.0;
  double stderr_est = 0.0;
  bool pass = true;
  bool vacuous = false;
};

int emit_checks(const Opts& o, const std::string& file, const std::vector<CheckRow>& rows) {
  io::CsvWriter w(out_file(o, file));
  w.row({"check", "trials", "observed", "bound", "stderr", "status"});
  bool all_ok = true;
  for (const auto& r : rows) {
    std::string status = r.vacuous ? "vacuous" : (r.pass ? "pass" : "fail");
    if (!r.vacuous && !r.pass) all_ok = false;
    w.row({r.name, std::to_string(r.trials), io::fmt(r.observed), io::fmt(r.bound),
           io::fmt(r.stderr_est), status});
    std::cout << status << "  " << r.name << " (observed " << io::fmt(r.observed) << ", bound "
              << io::fmt(r.bound) << ")\n";
  }
  return all_ok ? 0 : 1;
}

std::vector<CheckRow> vacuous_rows(const std::vector<std::string>& names) {
  std::cerr << "warning: sample budget 0, every check passes vacuously\n";
  std::vector<CheckRow> rows;
  for (const auto& n : names) rows.push_back({n, 0, 0.0, 0.0, 0.0, true, true});
  return rows;
}

// ---------------------------------------------------------------------------
// Random instance builders

geom::ConvexBody random_symmetric_polytope(int n, Rng rng) {
  int extra = rng.uniform_int(2, 5);
  Mat a(2 * n + 2 * extra, n);
  Vec b(a.rows());
  int r = 0;
  for (int i = 0; i < n; ++i) {  // bounding box keeps the body bounded
    Vec e = Vec::Zero(n);
    e[i] = 1.0;
    a.row(r) = e.transpose();
    b[r++] = 1.5;
    a.row(r) = -e.transpose();
    b[r++] = 1.5;
  }
  for (int i = 0; i < extra; ++i) {
    Vec u = rng.unit_vector(n);
    double c = rng.uniform(0.7, 1.4);
    a.row(r) = u.transpose();
    b[r++] = c;
    a.row(r) = -u.transpose();
    b[r++] = c;
  }
  return geom::ConvexBody::hpolytope(a, b);
}

exterior::GradedMeasure random_plane_measure(Rng rng) {
  exterior::GradedMeasure mu(2, 1);
  // two axis atoms guarantee a bounded ball, extras perturb it
  Vec e1(2), e2(2);
  e1 << 1, 0;
  e2 << 0, 1;
  mu.add(exterior::Blade::from_vectors(Mat(e1.transpose())), rng.uniform(0.5, 2.0));
  mu.add(exterior::Blade::from_vectors(Mat(e2.transpose())), rng.uniform(0.5, 2.0));
  int extra = rng.uniform_int(0, 3);
  for (int i = 0; i < extra; ++i)
    mu.add(exterior::Blade::from_vectors(Mat(rng.unit_vector(2).transpose())), rng.uniform(0.5, 2.0));
  return mu;
}

poly::PolyNVars random_poly2(int max_deg, Rng& rng) {
  poly::PolyNVars p(2);
  for (int a = 0; a <= max_deg; ++a)
    for (int b = 0; a + b <= max_deg; ++b)
      if (rng.uniform() < 0.45) {
        poly::PolyNVars::Exps e{};
        e[0] = a;
        e[1] = b;
        p.add_term(e, rng.uniform(-1.0, 1.0));
      }
  if (p.terms().empty()) {
    poly::PolyNVars::Exps e{};
    e[0] = 1;
    p.add_term(e, 1.0);
  }
  return p;
}

poly::PolyNVars circle_poly(double rho) {
  poly::PolyNVars p(2);
  poly::PolyNVars::Exps e{};
  e[0] = 2;
  p.add_term(e, 1.0);
  e[0] = 0;
  e[1] = 2;
  p.add_term(e, 1.0);
  e[1] = 0;
  p.add_term(e, -rho * rho);
  return p;
}

// ---------------------------------------------------------------------------
// exponents: certified and regression-fitted scaling exponents of a datum

bl::BLDatum config_datum(const json& cfg, std::vector<std::string>* warnings) {
  if (cfg.contains("subspaces")) return io::load_datum(cfg, warnings);  // bare datum as config
  require(cfg.contains("datum"), "exponents config needs a datum, inline or as a file path");
  if (cfg.at("datum").is_string())
    return io::load_datum_file(cfg.at("datum").get<std::string>(), warnings);
  return io::load_datum(cfg.at("datum"), warnings);
}

int cmd_exponents(const Opts& o) {
  json cfg = load_config(o);
  std::vector<std::string> warnings;
  bl::BLDatum d = config_datum(cfg, &warnings);
  for (const auto& msg : warnings) std::cerr << "warning: " << msg << "\n";

  std::vector<double> r_default;
  for (double r = 0.5; r >= 1.0 / 64 - 1e-12; r /= 2.0) r_default.push_back(r);
  auto R_list = cfg_list(cfg, "R_list", {4, 8, 16, 32, 64, 128, 256});
  auto r_list = cfg_list(cfg, "r_list", r_default);
  double r_fixed = cfg_num(cfg, "r_fixed", 1.0);
  double R_fixed = cfg_num(cfg, "R_fixed", 1.0);

  auto cert = bl::exponents(d);
  auto cond = bl::bcct_conditions(d);

  io::CsvWriter w(out_file(o, "exponents.csv"));
  w.row({"kind", "label", "x", "value"});
  std::vector<double> lx, ly;
  for (double R : R_list) {
    require(R > r_fixed, "every R_list value must exceed r_fixed");
    double v = bl::bl_truncated_estimate(d, {r_fixed, R}).value;
    w.row({"point", "R_sweep", io::fmt(R), io::fmt(v)});
    lx.push_back(std::log(R));
    ly.push_back(std::log(v));
  }
  LineFit fR = fit_line(lx, ly);

  lx.clear();
  ly.clear();
  int skipped = 0;
  for (double r : r_list) {
    if (r >= R_fixed) {  // the window needs r < R
      ++skipped;
      continue;
    }
    double v = bl::bl_truncated_estimate(d, {r, R_fixed}).value;
    w.row({"point", "r_sweep", io::fmt(r), io::fmt(v)});
    lx.push_back(std::log(1.0 / r));
    ly.push_back(std::log(v));
  }
  if (skipped) std::cerr << "warning: skipped " << skipped << " r value(s) at or above R_fixed\n";
  LineFit fr = fit_line(lx, ly);

  w.row({"fit", "kappa_hat", "", io::fmt(fR.slope)});
  w.row({"fit", "kappa_hat_residual", "", io::fmt(fR.max_residual)});
  w.row({"fit", "r_slope", "", io::fmt(fr.slope)});  // slope against log(1/r)
  w.row({"fit", "kappa_tilde_hat", "", io::fmt(-fr.slope)});
  w.row({"fit", "kappa_tilde_hat_residual", "", io::fmt(fr.max_residual)});
  w.row({"certified", "kappa", "", io::fmt(cert.kappa)});
  w.row({"certified", "kappa_tilde", "", io::fmt(cert.kappa_tilde)});
  w.row({"certified", "lattice_size", "", std::to_string(cert.lattice_size)});
  w.row({"certified", "lattice_capped", "", cert.lattice_capped ? "1" : "0"});
  w.row({"certified", "scaling_residual", "", io::fmt(cond.scaling_residual)});
  w.row({"certified", "discrete", "", cond.discrete ? "1" : "0"});
  w.row({"certified", "local", "", cond.local ? "1" : "0"});

  std::cout << "kappa: certified " << io::fmt(cert.kappa) << ", fitted " << io::fmt(fR.slope) << "\n"
            << "kappa_tilde: certified " << io::fmt(cert.kappa_tilde) << ", fitted "
            << io::fmt(-fr.slope) << "\n";
  if (cert.lattice_capped)
    std::cerr << "warning: subspace lattice hit its cap, certification covers the enumerated part\n";
  return 0;
}

// ---------------------------------------------------------------------------
// kakeya: grid inequality reports for families of affine flats

std::vector<harness::AffineFamily> config_families(const json& cfg, std::vector<std::string>* warnings) {
  std::vector<harness::AffineFamily> fams;
  for (const json& jf : cfg.at("families"))
    fams.push_back(jf.is_string() ? io::load_family_file(jf.get<std::string>(), warnings)
                                  : io::load_family(jf, warnings));
  return fams;
}

Vec config_exponents(const json& cfg, int m) {
  if (cfg.contains("exponents")) {
    Vec p = io::load_vec(cfg.at("exponents"), "exponents");
    require(p.size() == m, "exponent count must match the family count");
    return p;
  }
  require(m >= 2, "default exponents 1/(m-1) need at least two families");
  return Vec::Constant(m, 1.0 / (m - 1));
}

harness::KBLReport run_kakeya_op(const std::string& op, const std::vector<harness::AffineFamily>& fams,
                                 const Vec& p, double R, harness::BlSource src, std::uint64_t seed,
                                 std::size_t cap, int threads) {
  if (op == "lw") return harness::lw_kakeya(fams, R, seed, cap, threads);
  if (op == "fremlin") return harness::lhs_fremlin(fams, p, R, src, seed, cap, threads);
  require(op == "uniform", "unknown op '" + op + "' (want lw|fremlin|uniform)");

  // mirror lhs_uniform cube by cube so the report carries per-cube rows
  auto bd = harness::bl_bound_for_families(fams, p, R, src, seed, cap);
  harness::KBLReport rep;
  rep.bl_source = bd.a_source;
  rep.flags = bd.flags;
  auto grid = harness::dyadic_grid(fams.front().n, R);
  auto tube = harness::unit_tube();
  const int m = static_cast<int>(fams.size());
  for (const auto& q : grid.cubes) {
    Vec c = q.center();
    std::vector<int> inc(m, 0);
    double prod = 1.0;
    for (int j = 0; j < m && prod > 0.0; ++j) {
      double s = 0.0;
      for (const auto& t : fams[j].members) {
        double v = tube(t, c);
        if (v > 0.0) {
          s += v;
          ++inc[j];
        }
      }
      prod = s > 0.0 ? prod * std::pow(s, p[j]) : 0.0;
    }
    double term = prod > 0.0 ? prod * harness::cell_ball_volume(q, R) : 0.0;
    rep.lhs += term;
    bool any = false;
    for (int v : inc) any = any || v > 0;
    if (any) rep.rows.push_back({q.lo, inc, term});
  }
  rep.rhs = harness::rhs_uniform(fams, p, bd.a_value);
  if (rep.rhs > 0.0)
    rep.ratio = rep.lhs / rep.rhs;
  else
    rep.ratio = rep.lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return rep;
}

int cmd_kakeya(const Opts& o) {
  json cfg = load_config(o);
  std::string op = cfg_str(cfg, "op", "lw");
  auto src = parse_source(cfg_str(cfg, "bl_source", "auto"));
  std::size_t cap = static_cast<std::size_t>(cfg_int(cfg, "tuple_cap", 100000));
  if (o.samples > 0) cap = static_cast<std::size_t>(o.samples);

  io::CsvWriter plot(out_file(o, "kakeya_plot.csv"));
  plot.row({"count", "lhs", "rhs", "ratio"});
  harness::KBLReport last;

  if (cfg.contains("sweep")) {
    const json& sw = cfg.at("sweep");
    require(sw.contains("counts"), "sweep needs a counts list");
    int nfam = static_cast<int>(cfg_int(sw, "families", 2));
    require(nfam >= 1, "sweep needs at least one family");
    double extent_scale = cfg_num(sw, "extent_scale", 0.5);
    double r_scale = cfg_num(sw, "R_scale", 1.0);
    Rng rng(o.seed);
    for (const json& jc : sw.at("counts")) {
      int N = jc.get<int>();
      require(N >= 1, "sweep counts must be positive");
      std::vector<harness::AffineFamily> fams;
      for (int f = 0; f < nfam; ++f) {
        Rng rf = rng.split(static_cast<std::uint64_t>(N) * 97 + static_cast<std::uint64_t>(f));
        fams.push_back(harness::random_line_family(N, std::max(1.0, extent_scale * N), rf));
      }
      Vec p = config_exponents(cfg, nfam);
      double R = std::max(1.0, r_scale * N);
      last = run_kakeya_op(op, fams, p, R, src, o.seed, cap, o.threads);
      long total = 0;
      for (const auto& f : fams) total += static_cast<long>(f.members.size());
      plot.row({std::to_string(total), io::fmt(last.lhs), io::fmt(last.rhs), io::fmt(last.ratio)});
      std::cout << "count " << total << ": ratio " << io::fmt(last.ratio) << " (" << last.bl_source
                << ")\n";
    }
  } else {
    require(cfg.contains("families"), "kakeya config needs families or sweep");
    require(cfg.at("families").is_array(), "families must be an array");
    if (cfg.at("families").empty()) {
      // nothing to integrate: the zero report
      last.bl_source = "none";
      last.flags = {"empty"};
      std::cout << "empty family collection: zero report\n";
    } else {
      std::vector<std::string> warnings;
      auto fams = config_families(cfg, &warnings);
      for (const auto& msg : warnings) std::cerr << "warning: " << msg << "\n";
      Vec p = config_exponents(cfg, static_cast<int>(fams.size()));
      double R = cfg_num(cfg, "R", 0.0);
      require(R > 0.0, "kakeya config needs a positive R");
      last = run_kakeya_op(op, fams, p, R, src, o.seed, cap, o.threads);
      long total = 0;
      for (const auto& f : fams) total += static_cast<long>(f.members.size());
      plot.row({std::to_string(total), io::fmt(last.lhs), io::fmt(last.rhs), io::fmt(last.ratio)});
      std::cout << "ratio " << io::fmt(last.ratio) << " (" << last.bl_source << ")\n";
    }
  }
  io::save_report_csv(last, out_file(o, "kakeya_report.csv"));
  io::save_report_json(last, out_file(o, "kakeya_report.json"));
  return 0;
}

// ---------------------------------------------------------------------------
// fremlin: projective tensor norm of a JSON tensor

int cmd_fremlin(const Opts& o) {
  json cfg = load_config(o);
  json jt;
  if (cfg.contains("tensor"))
    jt = cfg.at("tensor").is_string() ? io::parse_file(cfg.at("tensor").get<std::string>())
                                      : cfg.at("tensor");
  else
    jt = cfg;  // the config may be the tensor itself
  Vec q;
  auto t = io::load_tensor(jt, &q);
  if (cfg.contains("q")) q = io::load_vec(cfg.at("q"), "q");
  require(q.size() > 0, "fremlin config needs exponents q, in the tensor or beside it");

  fremlin::FremlinOptions fo;
  fo.seed = o.seed;
  fo.restarts = static_cast<int>(cfg_int(cfg, "restarts", fo.restarts));
  fo.max_sweeps = static_cast<int>(cfg_int(cfg, "max_sweeps", fo.max_sweeps));
  fo.tol = cfg_num(cfg, "tol", fo.tol);
  if (o.samples > 0) fo.restarts = static_cast<int>(o.samples);

  auto res = fremlin::fremlin_norm(t, q, fo);
  io::CsvWriter w(out_file(o, "fremlin.csv"));
  w.row({"label", "value"});
  w.row({"norm", io::fmt(res.value)});
  w.row({"converged", res.converged ? "1" : "0"});
  w.row({"sweeps", std::to_string(res.sweeps)});
  w.row({"axes", std::to_string(t.axes().size())});
  w.row({"entries", std::to_string(t.size())});
  for (std::size_t i = 0; i < t.axes().size(); ++i)
    w.row({"dim" + std::to_string(i), std::to_string(t.axes()[i].size())});
  std::cout << "norm " << io::fmt(res.value) << (res.converged ? "" : " (sweep cap hit)") << "\n";
  if (!res.converged) std::cerr << "warning: alternating maximization hit the sweep cap\n";
  return 0;
}

// ---------------------------------------------------------------------------
// geometry-checks: convex-geometry inequality sweep

int cmd_geometry_checks(const Opts& o) {
  json cfg = load_config(o);
  long samples = o.samples >= 0 ? o.samples : cfg_int(cfg, "samples", 20000);
  const std::vector<std::string> names = {"john-sandwich", "slice-projection", "visibility-l1",
                                          "wedge-product-floor"};
  if (samples <= 0) return emit_checks(o, "geometry_checks.csv", vacuous_rows(names));

  Rng rng(o.seed);
  std::vector<CheckRow> rows;

  {  // inscribed ellipsoid between K/sqrt(n) and K
    long trials = cfg_int(cfg, "john_instances", 6);
    double worst = 0.0;
    for (long i = 0; i < trials; ++i) {
      int n = 2 + static_cast<int>(i % 2);
      auto body = random_symmetric_polytope(n, rng.split(100 + static_cast<std::uint64_t>(i)));
      auto jr = geom::john_ellipsoid(body);
      worst = std::max({worst, jr.inner_ratio, jr.outer_ratio});
    }
    rows.push_back({"john-sandwich", trials, worst, 1.0 + 1e-3, 0.0, worst <= 1.0 + 1e-3, false});
  }

  {  // shadow times slice against the binomial multiple of the volume
    long trials = cfg_int(cfg, "slice_instances", 8);
    double worst = -1.0, wse = 0.0;
    bool ok = true;
    for (long i = 0; i < trials; ++i) {
      Rng ri = rng.split(200 + static_cast<std::uint64_t>(i));
      int n = 2 + static_cast<int>(i % 2);
      int k = n == 2 ? 1 : 1 + static_cast<int>(i % 2);
      auto body = random_symmetric_polytope(n, ri.split(1));
      Mat raw(k, n);
      for (int r = 0; r < k; ++r) raw.row(r) = ri.gaussian_vector(n).transpose();
      Mat sbasis = orthonormal_rows(raw);
      auto sp = geom::slice_projection_check(body, sbasis, samples, o.seed + 17 * i);
      ok = ok && sp.holds;
      worst = std::max(worst, (sp.lhs - sp.rhs) / std::max(sp.rhs, 1e-300));
      wse = std::max(wse, sp.stderr_est);
    }
    rows.push_back({"slice-projection", trials, worst, 0.0, wse, ok, false});
  }

  {  // crosspolytope direction measure: ball area over the unit disk
    exterior::GradedMeasure mu(2, 1);
    Vec e1(2), e2(2);
    e1 << 1, 0;
    e2 << 0, 1;
    mu.add(exterior::Blade::from_vectors(Mat(e1.transpose())), 1.0);
    mu.add(exterior::Blade::from_vectors(Mat(e2.transpose())), 1.0);
    auto vis = geom::visibility(geom::Seminorm(mu), samples, o.seed);
    bool ok = std::abs(vis.value - 0.5) <= std::max(0.005, 4.0 * vis.stderr_est);
    rows.push_back({"visibility-l1", 1, vis.value, 0.5, vis.stderr_est, ok, false});
  }

  {  // ball-mass pairing stays above the observed floor
    long trials = cfg_int(cfg, "floor_instances", 8);
    double worst = std::numeric_limits<double>::infinity(), wse = 0.0;
    for (long i = 0; i < trials; ++i) {
      auto mu = random_plane_measure(rng.split(400 + static_cast<std::uint64_t>(i)));
      auto pr = geom::wedge_visibility_check(mu, samples, o.seed + 31 * i);
      worst = std::min(worst, pr.lhs / pr.rhs);
      wse = std::max(wse, pr.stderr_est);
    }
    rows.push_back({"wedge-product-floor", trials, worst, 0.1, wse, worst >= 0.1, false});
  }

  return emit_checks(o, "geometry_checks.csv", rows);
}

// ---------------------------------------------------------------------------
// polysurf-checks: root counts, direction-averaged areas, mesh stability

int cmd_polysurf_checks(const Opts& o) {
  json cfg = load_config(o);
  long lines = o.samples >= 0 ? o.samples : cfg_int(cfg, "lines", 200);
  const std::vector<std::string> names = {"root-cap", "crofton-consistency", "circle-anchor",
                                          "mesh-convergence"};
  if (lines <= 0) return emit_checks(o, "polysurf_checks.csv", vacuous_rows(names));

  Rng rng(o.seed);
  std::vector<CheckRow> rows;
  Vec lo(2);
  lo << -1.0, -1.0;
  poly::CubeDomain box{lo, 2.0};

  {  // per-line zero counts never exceed the degree
    long polys = cfg_int(cfg, "polys", 5);
    double worst = -static_cast<double>(64);
    bool ok = true;
    long trials = 0;
    for (long i = 0; i < polys; ++i) {
      Rng ri = rng.split(500 + static_cast<std::uint64_t>(i));
      auto p = random_poly2(6, ri);
      auto rep = poly::line_root_scan(p, box, ri.unit_vector(2), static_cast<int>(lines));
      ok = ok && rep.cap_respected;
      worst = std::max(worst, static_cast<double>(rep.max_count - rep.degree_cap));
      trials += lines;
    }
    rows.push_back({"root-cap", trials, worst, 0.0, 0.0, ok, false});
  }

  {  // mesh directional area against the average-root-count estimate
    double worst = 0.0;
    auto run = [&](const poly::PolyNVars& p, const Vec& v) {
      auto mesh = poly::mesh_zero_set(p, box, 0.01);
      double da = poly::directional_area(mesh, v);
      double cr = poly::line_root_scan(p, box, v, static_cast<int>(std::max<long>(lines, 500))).value;
      worst = std::max(worst, std::abs(da - cr) / std::max({da, cr, 1e-300}));
    };
    Vec ex(2), dia(2);
    ex << 1, 0;
    dia << std::sqrt(0.5), std::sqrt(0.5);
    run(circle_poly(0.8), ex);
    run(circle_poly(0.8), dia);
    // randomized rotated ellipse: curvature stays bounded, so the fixed mesh
    // pitch resolves it (a free random quartic can wiggle below the pitch)
    {
      double phi = rng.uniform(0.0, M_PI);
      double a = rng.uniform(0.55, 0.8), b = rng.uniform(0.55, 0.8);
      double c = std::cos(phi), s = std::sin(phi);
      poly::PolyNVars ell(2);
      auto add = [&](int i, int j, double coef) {
        poly::PolyNVars::Exps e{};
        e[0] = i;
        e[1] = j;
        ell.add_term(e, coef);
      };
      add(2, 0, c * c / (a * a) + s * s / (b * b));
      add(0, 2, s * s / (a * a) + c * c / (b * b));
      add(1, 1, 2.0 * c * s * (1.0 / (a * a) - 1.0 / (b * b)));
      add(0, 0, -1.0);
      run(ell, ex);
    }
    rows.push_back({"crofton-consistency", 3, worst, 0.03, 0.0, worst <= 0.03, false});
  }

  {  // circle of radius rho has directional area 4 rho in every direction
    double rho = 0.8;
    auto mesh = poly::mesh_zero_set(circle_poly(rho), box, 0.01);
    Vec ex(2), ey(2);
    ex << 1, 0;
    ey << 0, 1;
    double worst = std::max(std::abs(poly::directional_area(mesh, ex) - 4.0 * rho),
                            std::abs(poly::directional_area(mesh, ey) - 4.0 * rho)) /
                   (4.0 * rho);
    rows.push_back({"circle-anchor", 2, worst, 0.02, 0.0, worst <= 0.02, false});
  }

  {  // halving the mesh step barely moves the total measure
    double ratio = poly::mesh_convergence_ratio(circle_poly(0.8), box, 0.02);
    rows.push_back({"mesh-convergence", 1, ratio, 0.02, 0.0, ratio <= 0.02, false});
  }

  return emit_checks(o, "polysurf_checks.csv", rows);
}

// ---------------------------------------------------------------------------
// duality: score-ansatz audit on explicit or random weight systems

int cmd_duality(const Opts& o) {
  json cfg = load_config(o);
  io::CsvWriter w(out_file(o, "duality.csv"));
  w.row({"instance", "cubes", "p_total", "z", "c1_pow_p", "backward_slack", "sj_slack", "forward_gap",
         "status"});
  bool all_ok = true;
  auto run_one = [&](const std::string& name, const std::vector<double>& g,
                     const std::vector<double>& mw, const Vec& p, const std::vector<double>& degs) {
    auto rep = harness::duality_check(g, mw, p, degs);
    all_ok = all_ok && rep.ok;
    w.row({name, std::to_string(g.size()), io::fmt(rep.p_total), io::fmt(rep.z), io::fmt(rep.c1_pow_p),
           io::fmt(rep.backward_slack), io::fmt(rep.sj_slack), io::fmt(rep.forward_gap),
           rep.ok ? "pass" : "fail"});
  };

  if (cfg.contains("g")) {
    require(cfg.contains("m_weights") && cfg.contains("exponents") && cfg.contains("degrees"),
            "explicit duality config needs g, m_weights, exponents, degrees");
    run_one("config", cfg.at("g").get<std::vector<double>>(),
            cfg.at("m_weights").get<std::vector<double>>(), io::load_vec(cfg.at("exponents"), "exponents"),
            cfg.at("degrees").get<std::vector<double>>());
  } else {
    long instances = o.samples >= 0 ? o.samples : cfg_int(cfg, "instances", 20);
    if (instances == 0) std::cerr << "warning: zero instances, the audit is vacuous\n";
    Rng rng(o.seed);
    for (long i = 0; i < instances; ++i) {
      Rng ri = rng.split(300 + static_cast<std::uint64_t>(i));
      bool three = i % 2 == 1;
      Vec p(three ? 3 : 2);
      std::vector<double> degs;
      if (three) {
        p << 0.6, 0.9, 1.5;
        degs = {2, 5, 11};
      } else {
        p << 1.0, 1.0;
        degs = {3, 7};
      }
      int cubes = i == 0 ? 1 : ri.uniform_int(2, 8);
      std::vector<double> g(cubes), mw(cubes);
      std::string name = "random" + std::to_string(i);
      double msum = 0.0;
      for (int c = 0; c < cubes; ++c) msum += (mw[c] = ri.uniform(0.1, 1.0));
      for (auto& v : mw) v /= msum;
      if (i == 0) {
        name = "single-cube";
        g[0] = 1.7;
      } else if (i == 1) {
        name = "proportional";  // the per-cube bound is met with equality
        for (int c = 0; c < cubes; ++c) g[c] = 4.0 * mw[c];
      } else if (i == 2) {
        name = "equal-weight";
        std::fill(mw.begin(), mw.end(), 1.0 / cubes);
        std::fill(g.begin(), g.end(), 1.7);
      } else {
        for (int c = 0; c < cubes; ++c) g[c] = ri.uniform(0.0, 3.0);
        g[0] = std::max(g[0], 0.5);  // keep at least one cube active
      }
      run_one(name, g, mw, p, degs);
    }
  }
  std::cout << (all_ok ? "duality: all instances pass\n" : "duality: FAILURES, see duality.csv\n");
  return all_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// proptest: randomized invariant sweep across every module

struct SuiteResult {
  std::string name;
  long trials = 0;
  long failures = 0;
  std::vector<std::string> notes;
};

void fail(SuiteResult& s, const std::string& note) {
  ++s.failures;
  if (s.notes.size() < 5) s.notes.push_back(note);
}

SuiteResult suite_exterior(long budget, std::uint64_t seed) {
  SuiteResult s{"exterior"};
  Rng rng(seed ^ 0x100u);
  for (long t = 0; t < 10 * budget; ++t) {
    Rng r = rng.split(static_cast<std::uint64_t>(t));
    int n = r.uniform_int(2, 4);
    auto x = exterior::Blade::from_vectors(Mat(r.gaussian_vector(n).transpose()));
    auto y = exterior::Blade::from_vectors(Mat(r.gaussian_vector(n).transpose()));
    ++s.trials;
    auto xy = exterior::wedge(x, y);
    auto yx = exterior::wedge(y, x);
    if (xy.norm() > x.norm() * y.norm() + 1e-9) fail(s, "wedge norm above the product of norms");
    if (std::abs(xy.norm() - yx.norm()) > 1e-9) fail(s, "wedge norm changed under swap");
    if (std::abs(exterior::hodge_star(x.mv).norm() - x.mv.norm()) > 1e-9)
      fail(s, "duality map changed a norm");
    if (exterior::abs_inner(x.mv, y.mv) > x.norm() * y.norm() + 1e-9)
      fail(s, "pairing above the product of norms");
  }
  return s;
}

SuiteResult suite_bl(long budget, std::uint64_t seed) {
  SuiteResult s{"bl-core"};
  Rng rng(seed ^ 0x200u);
  for (long t = 0; t < 6 * budget; ++t) {
    Rng r = rng.split(static_cast<std::uint64_t>(t));
    int n = r.uniform_int(1, 3);
    int m = r.uniform_int(1, 4);
    auto d = t % 2 == 0 ? bl::random_datum(n, m, r) : bl::random_flag_datum(n, m, r);
    ++s.trials;
    auto rep = bl::exponents(d, 96);
    if (rep.kappa < -1e-15) fail(s, "negative growth exponent");
    if (rep.kappa_tilde > 1e-15) fail(s, "positive decay exponent");
    if (rep.kappa + rep.kappa_tilde != d.scaling_residual())
      fail(s, "exponent sum misses the scaling residual");
  }
  for (long t = 0; t < 3 * budget; ++t) {
    Rng r = rng.split(1000 + static_cast<std::uint64_t>(t));
    auto d = bl::random_datum(r.uniform_int(1, 3), r.uniform_int(1, 3), r);
    double rr = std::exp(r.uniform(-1.5, 1.5));
    double R = rr * r.uniform(3.0, 6.0);
    ++s.trials;
    double lhs = bl::bl_truncated_estimate(d, {rr, R}).value;
    double rhs = std::pow(rr, d.scaling_residual()) * bl::bl_truncated_estimate(d, {1.0, R / rr}).value;
    if (std::abs(lhs - rhs) > 1e-9 * std::max(1.0, std::abs(rhs))) fail(s, "window scaling identity broke");
  }
  return s;
}

SuiteResult suite_fremlin(long budget, std::uint64_t seed) {
  SuiteResult s{"fremlin"};
  Rng rng(seed ^ 0x300u);
  Vec q(2);
  q << 2, 2;
  for (long t = 0; t < 4 * budget; ++t) {
    Rng r = rng.split(static_cast<std::uint64_t>(t));
    int d0 = r.uniform_int(2, 4), d1 = r.uniform_int(2, 4);
    fremlin::NonnegTensor f({fremlin::counting_axis(d0), fremlin::counting_axis(d1)});
    for (std::size_t i = 0; i < f.size(); ++i) f.flat_at(i) = r.uniform(0.0, 2.0);
    ++s.trials;
    fremlin::FremlinOptions fo{.max_sweeps = 200, .restarts = 6, .tol = 1e-9,
                               .seed = seed ^ static_cast<std::uint64_t>(t)};
    double base = fremlin::fremlin_norm(f, q, fo).value;
    fremlin::NonnegTensor g = f;
    g.flat_at(static_cast<std::size_t>(r.uniform_int(0, d0 * d1 - 1))) += r.uniform(0.1, 1.0);
    double bigger = fremlin::fremlin_norm(g, q, fo).value;
    if (bigger + 1e-7 < base) fail(s, "norm dropped when an entry grew");
    if (base + 1e-9 < fremlin::lm_lower_bound(f, q)) fail(s, "norm fell under its lower bound");
  }
  for (long t = 0; t < 2 * budget; ++t) {
    Rng r = rng.split(2000 + static_cast<std::uint64_t>(t));
    Vec u(3), v(2);
    for (int i = 0; i < 3; ++i) u[i] = std::exp(r.normal());
    for (int i = 0; i < 2; ++i) v[i] = std::exp(r.normal());
    fremlin::NonnegTensor f({fremlin::counting_axis(3), fremlin::counting_axis(2)});
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 2; ++b) f.at({a, b}) = u[a] * v[b];
    ++s.trials;
    double expect = fremlin::factor_norm(f.axes()[0], u, 2.0) * fremlin::factor_norm(f.axes()[1], v, 2.0);
    double got = fremlin::fremlin_norm(f, q, {.seed = seed ^ (7000 + static_cast<std::uint64_t>(t))}).value;
    if (std::abs(got - expect) > 1e-6 * expect) fail(s, "rank-one tensor missed its product value");
  }
  return s;
}

SuiteResult suite_geometry(long budget, std::uint64_t seed) {
  SuiteResult s{"geometry"};
  Rng rng(seed ^ 0x400u);
  for (long t = 0; t < 2 * budget; ++t) {
    auto body = random_symmetric_polytope(2, rng.split(static_cast<std::uint64_t>(t)));
    ++s.trials;
    auto jr = geom::john_ellipsoid(body);
    if (jr.inner_ratio > 1.0 + 1e-6 || jr.outer_ratio > 1.0 + 1e-3)
      fail(s, "inscribed-ellipsoid sandwich violated");
  }
  return s;
}

SuiteResult suite_polysurf(long budget, std::uint64_t seed) {
  SuiteResult s{"polysurf"};
  Rng rng(seed ^ 0x500u);
  Vec lo(2);
  lo << -1.0, -1.0;
  poly::CubeDomain box{lo, 2.0};
  for (long t = 0; t < 2 * budget; ++t) {
    Rng r = rng.split(static_cast<std::uint64_t>(t));
    auto p = random_poly2(5, r);
    ++s.trials;
    auto rep = poly::line_root_scan(p, box, r.unit_vector(2), 60);
    if (!rep.cap_respected) fail(s, "per-line zero count exceeded the degree");
  }
  return s;
}

SuiteResult suite_harness(long budget, std::uint64_t seed) {
  SuiteResult s{"harness"};
  for (long t = 0; t < budget; ++t) {
    ++s.trials;
    auto fams = harness::grid_line_families(4);
    auto rep = harness::lw_kakeya(fams, 4.0, seed);
    if (std::abs(rep.ratio - 1.0) > 1e-9) fail(s, "grid-lines wedge ratio left 1");
    Vec p(2);
    p << 1, 1;
    auto fr = harness::lhs_fremlin(fams, p, 4.0, harness::BlSource::Auto, seed);
    if (std::abs(fr.ratio - 1.0) > 1e-6) fail(s, "grid-lines tensor ratio left 1");
  }
  Rng rng(seed ^ 0x600u);
  for (long t = 0; t < 4 * budget; ++t) {
    Rng r = rng.split(static_cast<std::uint64_t>(t));
    int cubes = r.uniform_int(2, 6);
    std::vector<double> g(cubes), mw(cubes);
    double msum = 0.0;
    for (int c = 0; c < cubes; ++c) msum += (mw[c] = r.uniform(0.1, 1.0));
    for (auto& v : mw) v /= msum;
    for (int c = 0; c < cubes; ++c) g[c] = r.uniform(0.0, 3.0);
    g[0] = std::max(g[0], 0.5);
    Vec p(2);
    p << 1.0, 1.0;
    ++s.trials;
    if (!harness::duality_check(g, mw, p, {3.0, 7.0}).ok) fail(s, "duality audit failed");
  }
  return s;
}

SuiteResult suite_io(long budget, std::uint64_t seed) {
  SuiteResult s{"io"};
  Rng rng(seed ^ 0x700u);
  for (long t = 0; t < 40 * budget; ++t) {
    double v = rng.normal() * std::pow(10.0, rng.uniform_int(-12, 12));
    ++s.trials;
    if (std::stod(io::fmt(v)) != v) fail(s, "formatted double did not round-trip");
  }
  return s;
}

int cmd_proptest(const Opts& o) {
  json cfg = load_config(o);
  long budget = o.samples >= 0 ? o.samples : cfg_int(cfg, "budget", 1);
  bool inject = cfg.contains("inject_failure") && cfg.at("inject_failure").get<bool>();
  using SuiteFn = SuiteResult (*)(long, std::uint64_t);
  const std::vector<std::pair<std::string, SuiteFn>> table = {
      {"exterior", suite_exterior}, {"bl-core", suite_bl},     {"fremlin", suite_fremlin},
      {"geometry", suite_geometry}, {"polysurf", suite_polysurf}, {"harness", suite_harness},
      {"io", suite_io}};

  std::vector<SuiteResult> suites;
  if (budget <= 0) {
    std::cerr << "warning: budget 0, every suite passes vacuously\n";
    for (const auto& [name, fn] : table) suites.push_back({name, 0, 0, {}});
  } else {
    for (const auto& [name, fn] : table) suites.push_back(fn(budget, o.seed));
  }
  if (inject) {
    SuiteResult bad{"inject-bad-tolerance", 1, 1};
    bad.notes.push_back("deliberate failure requested by the config");
    suites.push_back(bad);
  }

  io::CsvWriter w(out_file(o, "proptest.csv"));
  w.row({"suite", "trials", "failures", "status"});
  json js;
  js["budget"] = budget;
  js["suites"] = json::array();
  long total = 0;
  for (const auto& s : suites) {
    std::string status = s.trials == 0 && s.failures == 0 ? "vacuous" : (s.failures ? "fail" : "pass");
    total += s.failures;
    w.row({s.name, std::to_string(s.trials), std::to_string(s.failures), status});
    std::cout << status << "  " << s.name << " (" << s.trials << " trials, " << s.failures
              << " failures)\n";
    for (const auto& note : s.notes) std::cerr << s.name << ": " << note << "\n";
    json jsuite;
    jsuite["name"] = s.name;
    jsuite["trials"] = s.trials;
    jsuite["failures"] = s.failures;
    jsuite["status"] = status;
    js["suites"].push_back(std::move(jsuite));
  }
  js["total_failures"] = total;
  js["status"] = total ? "fail" : (budget <= 0 ? "vacuous" : "pass");
  std::ofstream jf(out_file(o, "proptest.json"), std::ios::binary);
  jf << js.dump(2) << '\n';
  return total ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"invariant experiments for multilinear inequality data"};
  app.require_subcommand(1);

  Opts o_exp, o_kak, o_fre, o_geo, o_pol, o_dua, o_pro;
  add_common(app.add_subcommand("exponents", "certified and fitted scaling exponents of a datum"),
             o_exp, true);
  add_common(app.add_subcommand("kakeya", "grid inequality report for families of flats"), o_kak, true);
  add_common(app.add_subcommand("fremlin", "projective tensor norm of a JSON tensor"), o_fre, true);
  add_common(app.add_subcommand("geometry-checks", "convex-geometry inequality sweep"), o_geo, false);
  add_common(app.add_subcommand("polysurf-checks", "zero-set mesh and root-count sweep"), o_pol, false);
  add_common(app.add_subcommand("duality", "score-ansatz duality audit"), o_dua, false);
  add_common(app.add_subcommand("proptest", "randomized invariant sweep across modules"), o_pro, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("exponents")) return cmd_exponents(o_exp);
    if (app.got_subcommand("kakeya")) return cmd_kakeya(o_kak);
    if (app.got_subcommand("fremlin")) return cmd_fremlin(o_fre);
    if (app.got_subcommand("geometry-checks")) return cmd_geometry_checks(o_geo);
    if (app.got_subcommand("polysurf-checks")) return cmd_polysurf_checks(o_pol);
    if (app.got_subcommand("duality")) return cmd_duality(o_dua);
    if (app.got_subcommand("proptest")) return cmd_proptest(o_pro);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

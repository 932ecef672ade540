#ifndef RANKONE_IO_HPP
#define RANKONE_IO_HPP

// Configuration, persistence and report writing for the command-line
// front end. Reports are JSON with a full parameter echo; tables are CSV
// with one header row and shortest round-trip decimal formatting, so a
// fixed config and seed reproduce byte-identical outputs.

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankone/chernoff.hpp"
#include "rankone/compact.hpp"
#include "rankone/noncompact.hpp"
#include "rankone/specfun.hpp"
#include "rankone/sphere.hpp"

namespace rankone::io {

inline constexpr const char* kLibraryName = "rankone";
inline constexpr const char* kLibraryVersion = "0.1.0";

using json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// shortest decimal string that round-trips under IEEE-754 doubles
inline std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt(int v) { return std::to_string(v); }

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
}

inline void write_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  for (size_t i = 0; i < header.size(); ++i)
    os << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows)
    for (size_t i = 0; i < row.size(); ++i)
      os << row[i] << (i + 1 < row.size() ? "," : "\n");
  write_text_file(path, os.str());
}

// ---------------------------------------------------------------------------
// Deterministic random inputs. The 64-bit generator is mapped to [0,1)
// explicitly so outputs do not depend on the standard library's
// distribution implementation.

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double symmetric() { return 2.0 * uniform01() - 1.0; }

 private:
  std::mt19937_64 eng_;
};

// coefficient-style synthetic inputs shared by the compact-type models
inline std::vector<double> synthetic_coefficients(const std::string& kind,
                                                  int count, std::uint64_t seed,
                                                  const json& opts) {
  std::vector<double> c(count, 0.0);
  if (kind == "band-limited-random") {
    Rng rng(seed);
    for (auto& v : c) v = rng.symmetric();
  } else if (kind == "single-mode") {
    const int n = opts.value("n", 0);
    if (n < 0 || n >= count) throw ConfigError("input.n out of range");
    c[n] = 1.0;
  } else if (kind == "gevrey-decay") {
    const double s = opts.value("s", 0.5);
    if (!(s > 0.0)) throw ConfigError("input.s out of range");
    for (int n = 0; n < count; ++n) c[n] = std::exp(-std::pow(n + 1.0, s));
  } else {
    throw ConfigError("input.kind unknown: " + kind);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Parameter extraction with single-line diagnostics naming the field.

inline double get_num(const json& p, const std::string& key, double defval,
                      bool required = false) {
  if (!p.contains(key)) {
    if (required) throw ConfigError(key + " missing");
    return defval;
  }
  if (!p[key].is_number()) throw ConfigError(key + " must be a number");
  return p[key].get<double>();
}

inline int get_int(const json& p, const std::string& key, int defval,
                   bool required = false) {
  const double v = get_num(p, key, defval, required);
  if (v != std::floor(v)) throw ConfigError(key + " must be an integer");
  return static_cast<int>(v);
}

inline noncompact::Params nc_params_from(const json& p) {
  const double alpha = get_num(p, "alpha", 0.0, true);
  const double beta = get_num(p, "beta", 0.0, true);
  if (!(alpha > -1.0)) throw ConfigError("alpha out of range");
  if (!(std::abs(beta) <= alpha + 1.0)) throw ConfigError("beta out of range");
  return noncompact::Params(alpha, beta);
}

inline compact::Params cp_params_from(const json& p) {
  const double alpha = get_num(p, "alpha", 0.0, true);
  const double beta = get_num(p, "beta", 0.0, true);
  if (!(alpha > -1.0)) throw ConfigError("alpha out of range");
  if (!(beta > -1.0)) throw ConfigError("beta out of range");
  return compact::Params(alpha, beta);
}

inline sphere::Family family_from(const std::string& name) {
  if (name == "real") return sphere::Family::real;
  if (name == "complex") return sphere::Family::complex_proj;
  if (name == "quaternion") return sphere::Family::quaternion;
  if (name == "cayley") return sphere::Family::cayley;
  throw ConfigError("family unknown: " + name);
}

// fiber-basis table: row 0 = node quadrature weights, row 1 = column
// degrees, remaining rows = basis values (rows = fiber nodes, columns =
// basis functions)
inline sphere::FiberTable load_fiber_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("fiber_table unreadable: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.size() < 3) throw ConfigError("fiber_table needs >= 3 rows");
  sphere::FiberTable t;
  t.weights = rows[0];
  t.degrees.reserve(rows[1].size());
  for (double d : rows[1]) t.degrees.push_back(static_cast<int>(d));
  t.values.assign(rows.begin() + 2, rows.end());
  if (t.values.size() != t.weights.size())
    throw ConfigError("fiber_table row count does not match weights");
  return t;
}

// ---------------------------------------------------------------------------

struct RunConfig {
  std::string task;
  json params;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
};

inline RunConfig load_config(const std::filesystem::path& config_path,
                             const std::string& cli_task,
                             const std::string& out_override,
                             std::optional<std::uint64_t> seed_override) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError("config file unreadable: " + config_path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse failure: ") + e.what());
  }
  RunConfig cfg;
  cfg.task = cli_task;
  if (doc.contains("task")) {
    const std::string t = doc["task"].get<std::string>();
    if (!cli_task.empty() && t != cli_task)
      throw ConfigError("task in config (" + t + ") conflicts with CLI task");
    cfg.task = t;
  }
  if (cfg.task.empty()) throw ConfigError("task missing");
  cfg.params = doc.value("params", json::object());
  if (doc.contains("io") && doc["io"].contains("out"))
    cfg.out_dir = doc["io"]["out"].get<std::string>();
  if (!out_override.empty()) cfg.out_dir = out_override;
  cfg.seed = static_cast<std::uint64_t>(get_num(cfg.params, "seed", 0.0));
  if (seed_override) cfg.seed = *seed_override;
  return cfg;
}

namespace detail {

inline json report_skeleton(const RunConfig& cfg) {
  json rep;
  rep["library"] = {{"name", kLibraryName}, {"version", kLibraryVersion}};
  rep["task"] = cfg.task;
  json echo;
  echo["task"] = cfg.task;
  echo["params"] = cfg.params;
  echo["params"]["seed"] = cfg.seed;
  echo["io"] = {{"out", cfg.out_dir.string()}};
  rep["config"] = echo;
  return rep;
}

inline noncompact::Grid1D lambda_grid_from(const json& p) {
  const double lmax = get_num(p, "lambda_max", 10.0);
  const int panels = get_int(p, "lambda_panels", 25);
  const int nodes = get_int(p, "lambda_per_panel", 8);
  if (!(lmax > 0.0)) throw ConfigError("lambda_max out of range");
  if (panels < 1) throw ConfigError("lambda_panels out of range");
  if (nodes < 1) throw ConfigError("lambda_per_panel out of range");
  return noncompact::panel_gauss_legendre(0.0, lmax, panels, nodes);
}

inline noncompact::Grid1D radial_grid_from(const json& p) {
  const double R = get_num(p, "R", 7.0);
  const int panels = get_int(p, "r_panels", 28);
  const int nodes = get_int(p, "r_per_panel", 8);
  if (!(R > 0.0)) throw ConfigError("R out of range");
  if (panels < 1) throw ConfigError("r_panels out of range");
  if (nodes < 1) throw ConfigError("r_per_panel out of range");
  return noncompact::panel_gauss_legendre(0.0, R, panels, nodes);
}

// spectral inputs on a lambda grid
inline noncompact::SpectralDensity spectrum_from(const json& p,
                                                 const noncompact::Params& np,
                                                 const noncompact::Grid1D& grid,
                                                 std::uint64_t seed) {
  const json in = p.value("input", json::object());
  const std::string kind = in.value("kind", "gaussian-bump");
  noncompact::SpectralDensity g{np, grid, {}};
  g.values.resize(grid.nodes.size());
  if (kind == "gaussian-bump") {
    const double center = in.value("center", 5.0);
    const double width = in.value("width", 1.0);
    if (!(width > 0.0)) throw ConfigError("input.width out of range");
    for (size_t i = 0; i < grid.nodes.size(); ++i) {
      const double t = (grid.nodes[i] - center) / width;
      g.values[i] = std::exp(-t * t);
    }
  } else if (kind == "band-limited-random") {
    Rng rng(seed);
    for (auto& v : g.values) v = rng.symmetric();
  } else {
    throw ConfigError("input.kind unknown: " + kind);
  }
  return g;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Task runners. Each writes its artifacts into cfg.out_dir and fills in the
// "results" object of the report it returns.

inline json run_specfun_check(const RunConfig& cfg) {
  json rep = detail::report_skeleton(cfg);
  json checks = json::array();
  bool all_ok = true;
  auto push = [&](const std::string& name, double value, double tol) {
    const bool ok = std::abs(value) <= tol;
    all_ok = all_ok && ok;
    checks.push_back({{"check", name},
                      {"residual", value},
                      {"tolerance", tol},
                      {"pass", ok}});
  };

  for (double lam : {0.1, 1.0, 10.0, 50.0}) {
    // |Gamma(i lam)|^2 lam sinh(pi lam) / pi = 1, all in log space
    const double lg = 2.0 * specfun::log_gamma(std::complex<double>(0, lam)).real();
    const double log_sinh = lam * std::numbers::pi +
                            std::log1p(-std::exp(-2.0 * std::numbers::pi * lam)) -
                            std::numbers::ln2;
    const double resid =
        lg + std::log(lam) + log_sinh - std::log(std::numbers::pi);
    push("gamma-reflection lam=" + fmt(lam), resid, 1e-10);
  }
  push("log_gamma(1)", std::abs(specfun::log_gamma({1.0, 0.0})), 1e-13);
  push("log_gamma(5)-log24",
       std::abs(specfun::log_gamma({5.0, 0.0}) - std::log(24.0)), 1e-12);
  push("log_gamma(0.5)-log(sqrt pi)",
       std::abs(specfun::log_gamma({0.5, 0.0}) -
                0.5 * std::log(std::numbers::pi)),
       1e-13);

  {
    Rng rng(cfg.seed ? cfg.seed : 12345);
    double worst = 0.0;
    for (int t = 0; t < 32; ++t) {
      const std::complex<double> z(4.0 * rng.symmetric(), 4.0 * rng.symmetric());
      const int m = static_cast<int>(rng.uniform01() * 20);
      const auto lhs = specfun::pochhammer(z, m + 1);
      const auto rhs = specfun::pochhammer(z, m) * (z + double(m));
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    push("pochhammer-chain", worst, 1e-9);
  }

  {
    const auto rule = specfun::gauss_jacobi_rule(12, 0.5, 1.5);
    double mass = 0.0;
    for (double w : rule.weights) mass += w;
    const double expect = std::pow(2.0, 3.0) *
                          std::exp(specfun::log_gamma_real(1.5) +
                                   specfun::log_gamma_real(2.5) -
                                   specfun::log_gamma_real(4.0));
    push("gauss-jacobi-mass(0.5,1.5)", mass - expect, 1e-12);
  }

  for (auto [a, b] : std::vector<std::pair<double, double>>{
           {0.0, 0.0}, {0.5, -0.5}, {2.0, 1.0}}) {
    const int n_max = 12;
    const auto grid = compact::make_grid(compact::Params(a, b), n_max);
    double worst = 0.0;
    std::vector<double> col;
    std::vector<std::vector<double>> cols(grid.theta.size());
    for (size_t i = 0; i < grid.theta.size(); ++i) {
      compact::detail::basis_column(grid.params, n_max, std::cos(grid.theta[i]),
                                    cols[i]);
    }
    for (int m = 0; m <= n_max; ++m)
      for (int n = 0; n <= n_max; ++n) {
        double g = 0.0;
        for (size_t i = 0; i < grid.theta.size(); ++i)
          g += grid.weights[i] * cols[i][m] * cols[i][n];
        worst = std::max(worst, std::abs(g - (m == n ? 1.0 : 0.0)));
      }
    push("gram-identity(" + fmt(a) + "," + fmt(b) + ")", worst, 1e-10);
  }

  rep["results"] = {{"checks", checks}, {"all_pass", all_ok}};
  if (!all_ok) throw std::runtime_error("specfun-check: invariant failure");
  return rep;
}

inline json run_nc_transform(const RunConfig& cfg) {
  json rep = detail::report_skeleton(cfg);
  const auto np = nc_params_from(cfg.params);
  const auto rg = detail::radial_grid_from(cfg.params);
  const auto lg = detail::lambda_grid_from(cfg.params);

  const json in = cfg.params.value("input", json::object());
  const std::string kind = in.value("kind", "gaussian-radial");
  noncompact::RadialFunction f{np, rg, {}};
  f.values.resize(rg.nodes.size());
  if (kind == "gaussian-radial") {
    const double width = in.value("width", 1.0);
    if (!(width > 0.0)) throw ConfigError("input.width out of range");
    for (size_t i = 0; i < rg.nodes.size(); ++i) {
      const double t = rg.nodes[i] / width;
      f.values[i] = std::exp(-t * t);
    }
  } else if (kind == "bump-spectrum-synthesis") {
    const auto g = detail::spectrum_from(cfg.params, np, lg, cfg.seed);
    f = noncompact::inverse_transform(g, rg);
  } else {
    throw ConfigError("input.kind unknown: " + kind);
  }

  const auto spec = noncompact::forward_transform(f, lg);
  std::vector<std::vector<std::string>> rows;
  for (size_t j = 0; j < lg.nodes.size(); ++j)
    rows.push_back({fmt(lg.nodes[j]), fmt(spec.values[j].real()),
                    fmt(spec.values[j].imag())});
  write_csv(cfg.out_dir / "spectrum.csv", {"lambda", "re", "im"}, rows);

  std::vector<std::vector<std::string>> plot;
  for (size_t j = 0; j < lg.nodes.size(); ++j)
    plot.push_back({fmt(lg.nodes[j]), fmt(std::abs(spec.values[j]))});
  write_csv(cfg.out_dir / "plot_spectrum.csv", {"lambda", "abs"}, plot);

  rep["results"] = {{"lambda_points", lg.nodes.size()},
                    {"r_points", rg.nodes.size()},
                    {"files", {"spectrum.csv", "plot_spectrum.csv"}}};
  return rep;
}

inline json run_nc_invert(const RunConfig& cfg) {
  json rep = detail::report_skeleton(cfg);
  const auto np = nc_params_from(cfg.params);
  const auto rg = detail::radial_grid_from(cfg.params);
  const auto lg = detail::lambda_grid_from(cfg.params);
  const auto g = detail::spectrum_from(cfg.params, np, lg, cfg.seed);
  const auto f = noncompact::inverse_transform(g, rg);

  std::vector<std::vector<std::string>> rows, plot;
  for (size_t i = 0; i < rg.nodes.size(); ++i) {
    rows.push_back({fmt(rg.nodes[i]), fmt(f.values[i].real()),
                    fmt(f.values[i].imag())});
    plot.push_back({fmt(rg.nodes[i]), fmt(f.values[i].real())});
  }
  write_csv(cfg.out_dir / "radial.csv", {"r", "re", "im"}, rows);
  write_csv(cfg.out_dir / "plot_profile.csv", {"r", "value"}, plot);
  rep["results"] = {{"r_points", rg.nodes.size()},
                    {"files", {"radial.csv", "plot_profile.csv"}}};
  return rep;
}

inline json run_nc_plancherel(const RunConfig& cfg) {
  json rep = detail::report_skeleton(cfg);
  const auto np = nc_params_from(cfg.params);
  const auto rg = detail::radial_grid_from(cfg.params);
  const auto lg = detail::lambda_grid_from(cfg.params);
  const auto g = detail::spectrum_from(cfg.params, np, lg, cfg.seed);
  const auto f = noncompact::inverse_transform(g, rg);
  double norm2 = 0.0;
  for (size_t i = 0; i < f.values.size(); ++i)
    norm2 += rg.weights[i] * std::norm(f.values[i]) *
             noncompact::weight_w(rg.nodes[i], np);
  const double defect = noncompact::plancherel_defect(f);
  rep["results"] = {{"norm2", norm2},
                    {"defect", defect},
                    {"relative_defect", defect / norm2}};
  return rep;
}

inline json run_nc_cratio(const RunConfig& cfg) {
  json rep = detail::report_skeleton(cfg);
  const auto np = nc_params_from(cfg.params);
  const noncompact::KType d(get_int(cfg.params, "p", 2, true),
                            get_int(cfg.params, "q", 0, true));
  const double lo = get_num(cfg.params, "lambda_lo", 0.01);
  const double hi = get_num(cfg.params, "lambda_hi", 1e3);
  const int pts = get_int(cfg.params, "points", 200);
  if (!(lo > 0.0 && hi > lo)) throw ConfigError("lambda_lo out of range");
  if (pts < 2) throw ConfigError("points out of range");

  std::vector<std::vector<std::string>> rows;
  double sup_raw = 0.0, sup_norm = 0.0;
  const double step = std::log(hi / lo) / (pts - 1);
  double raw_hi = 0.0, norm_hi = 0.0;
  for (int i = 0; i < pts; ++i) {
    const double lam = lo * std::exp(i * step);
    const double raw = noncompact::c_ratio_stat(lam, np, d);
    const double nrm = noncompact::c_ratio_normalized(lam, np, d);
    sup_raw = std::max(sup_raw, raw);
    sup_norm = std::max(sup_norm, nrm);
    raw_hi = raw;
    norm_hi = nrm;
    rows.push_back({fmt(lam), fmt(raw), fmt(nrm)});
  }
  write_csv(cfg.out_dir / "cratio.csv", {"lambda", "raw", "normalized"}, rows);
  rep["results"] = {{"sup_raw", sup_raw},
                    {"sup_normalized", sup_norm},
                    {"raw_at_hi", raw_hi},
                    {"normalized_at_hi", norm_hi},
                    {"files", {"cratio.csv"}}};
  return rep;
}

inline json run_nc_step2(const RunConfig& cfg) {
  json rep = detail::report_skeleton(cfg);
  const auto np = nc_params_from(cfg.params);
  const noncompact::KType d(get_int(cfg.params, "p", 2, true),
                            get_int(cfg.params, "q", 0, true));
  const auto lg = detail::lambda_grid_from(cfg.params);
  auto g = detail::spectrum_from(cfg.params, np, lg, cfg.seed);
  const int m_max = get_int(cfg.params, "M", 3);
  if (m_max < 1) throw ConfigError("M out of range");
  json entries = json::array();
  for (int m = 1; m <= m_max; ++m) {
    const auto chk = noncompact::step2_inequality_check(g, d, m);
    entries.push_back(
        {{"m", m}, {"lhs", chk.lhs}, {"rhs", chk.rhs}, {"ratio", chk.ratio}});
  }
  rep["results"] = {{"checks", entries}};
  return rep;
}

inline json run_cp_coeffs(const RunConfig& cfg) {
  json rep = detail::report_skeleton(cfg);
  const auto cp = cp_params_from(cfg.params);
  const int N = get_int(cfg.params, "N", 16);
  if (N < 0) throw ConfigError("N out of range");
  const json in = cfg.params.value("input", json::object());
  const auto cin = synthetic_coefficients(in.value("kind", "band-limited-random"),
                                          N + 1, cfg.seed, in);
  const auto grid = compact::make_grid(cp, N);
  const auto samples =
      compact::synthesize(compact::CoefficientSequence{cp, cin}, grid.theta);
  const auto c = compact::analyze(grid, samples, N);
  const double defect = compact::plancherel_defect(grid, samples, N);

  std::vector<std::vector<std::string>> rows;
  double recovery = 0.0;
  for (int n = 0; n <= N; ++n) {
    rows.push_back({fmt(n), fmt(c.values[n])});
    recovery = std::max(recovery, std::abs(c.values[n] - cin[n]));
  }
  write_csv(cfg.out_dir / "coefficients.csv", {"n", "value"}, rows);
  rep["results"] = {{"plancherel_defect", defect},
                    {"max_recovery_error", recovery},
                    {"files", {"coefficients.csv"}}};
  return rep;
}

inline json run_cp_synth(const RunConfig& cfg) {
  json rep = detail::report_skeleton(cfg);
  const auto cp = cp_params_from(cfg.params);
  const int N = get_int(cfg.params, "N", 16);
  const int pts = get_int(cfg.params, "points", 181);
  if (N < 0) throw ConfigError("N out of range");
  if (pts < 2) throw ConfigError("points out of range");
  const json in = cfg.params.value("input", json::object());
  const auto cin = synthetic_coefficients(in.value("kind", "single-mode"),
                                          N + 1, cfg.seed, in);
  std::vector<double> theta(pts);
  for (int i = 0; i < pts; ++i)
    theta[i] = std::numbers::pi * (i + 1.0) / (pts + 1.0);
  const auto samples =
      compact::synthesize(compact::CoefficientSequence{cp, cin}, theta);
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < pts; ++i)
    rows.push_back({fmt(theta[i]), fmt(samples[i])});
  write_csv(cfg.out_dir / "plot_profile.csv", {"theta", "value"}, rows);
  rep["results"] = {{"files", {"plot_profile.csv"}}};
  return rep;
}

namespace detail {

inline sphere::HarmonicCoefficients sphere_coeffs_from(
    const json& p, const sphere::SphereModel& m, int deg_max,
    std::uint64_t seed) {
  const json in = p.value("input", json::object());
  const std::string kind = in.value("kind", "band-limited-random");
  sphere::HarmonicCoefficients c;
  c.q = m.q;
  if (kind == "band-limited-random" || kind == "zonal-polynomial") {
    const bool zonal = (kind == "zonal-polynomial");
    Rng rng(seed);
    for (int deg = 0; deg <= deg_max; ++deg)
      for (const auto& mode : m.modes) {
        if (mode.l > deg) continue;
        if (zonal && mode.l != 0) continue;
        c.values[sphere::Key{deg, mode.l, mode.k}] = rng.symmetric();
      }
  } else if (kind == "single-mode") {
    const int deg = in.value("deg", 1), l = in.value("l", 0), k = in.value("k", 1);
    if (deg > deg_max || l > deg || m.mode_index(l, k) < 0)
      throw ConfigError("input.deg out of range");
    c.values[sphere::Key{deg, l, k}] = 1.0;
  } else if (kind == "even-random") {
    Rng rng(seed);
    for (int deg = 0; deg <= deg_max; deg += 2)
      for (const auto& mode : m.modes) {
        if (mode.l > deg) continue;
        c.values[sphere::Key{deg, mode.l, mode.k}] = rng.symmetric();
      }
  } else {
    throw ConfigError("input.kind unknown: " + kind);
  }
  return c;
}

inline std::shared_ptr<const sphere::SphereModel> sphere_model_from(
    const json& p, int deg_max) {
  const int q = get_int(p, "q", 2);
  if (q < 2) throw ConfigError("q out of range");
  if (p.contains("fiber_table")) {
    const auto table = load_fiber_table(p["fiber_table"].get<std::string>());
    return sphere::make_sphere_model_custom(q, deg_max, table);
  }
  const int lmax = get_int(p, "fiber_l_max", q == 2 ? deg_max : 0);
  return sphere::make_sphere_model(q, deg_max, lmax);
}

inline void write_sphere_coeffs(const std::filesystem::path& path,
                                const sphere::HarmonicCoefficients& c) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [key, v] : c.values)
    rows.push_back({fmt(key.deg), fmt(key.l), fmt(key.k), fmt(v)});
  write_csv(path, {"deg", "l", "k", "value"}, rows);
}

}  // namespace detail

inline json run_sphere_decompose(const RunConfig& cfg) {
  json rep = detail::report_skeleton(cfg);
  const int deg_max = get_int(cfg.params, "deg_max", 5);
  if (deg_max < 0) throw ConfigError("deg_max out of range");
  auto model = detail::sphere_model_from(cfg.params, deg_max);
  auto cin = detail::sphere_coeffs_from(cfg.params, *model, deg_max, cfg.seed);
  const auto f = sphere::sphere_synthesize(cin, model);
  const auto c = sphere::sphere_decompose(f, deg_max);

  double recovery = 0.0, sum2 = 0.0, norm2 = 0.0;
  for (const auto& [key, v] : c.values) {
    const auto it = cin.values.find(key);
    const double ref = (it == cin.values.end()) ? 0.0 : it->second;
    recovery = std::max(recovery, std::abs(v - ref));
    sum2 += v * v;
  }
  for (int i = 0; i < model->n_theta(); ++i)
    for (int j = 0; j < model->n_fiber(); ++j)
      norm2 += model->theta_weight[i] * model->fiber_weight[j] *
               f.at(i, j) * f.at(i, j);

  detail::write_sphere_coeffs(cfg.out_dir / "coefficients.csv", c);
  rep["results"] = {{"max_recovery_error", recovery},
                    {"parseval_defect", std::abs(sum2 - norm2)},
                    {"files", {"coefficients.csv"}}};
  return rep;
}

inline json run_sphere_apply(const RunConfig& cfg) {
  json rep = detail::report_skeleton(cfg);
  const int deg_max = get_int(cfg.params, "deg_max", 5);
  const int m = get_int(cfg.params, "m", 1);
  if (deg_max < 0) throw ConfigError("deg_max out of range");
  if (m < 0) throw ConfigError("m out of range");
  auto model = detail::sphere_model_from(cfg.params, deg_max);
  auto cin = detail::sphere_coeffs_from(cfg.params, *model, deg_max, cfg.seed);
  const auto out = sphere::sphere_apply_Delta_spectral(cin, m);
  detail::write_sphere_coeffs(cfg.out_dir / "applied.csv", out);
  rep["results"] = {{"m", m}, {"files", {"applied.csv"}}};
  return rep;
}

inline json run_proj_decompose(const RunConfig& cfg) {
  json rep = detail::report_skeleton(cfg);
  const std::string fname = cfg.params.value("family", "complex");
  const auto family = family_from(fname);
  const int deg_max = get_int(cfg.params, "deg_max", 3);
  if (deg_max < 0) throw ConfigError("deg_max out of range");

  if (family == sphere::Family::real) {
    const int q = get_int(cfg.params, "l", 2);
    if (q < 2) throw ConfigError("l out of range");
    json p2 = cfg.params;
    p2["q"] = q;
    if (!p2.contains("input")) p2["input"] = {{"kind", "even-random"}};
    auto model = detail::sphere_model_from(p2, deg_max);
    auto cin = detail::sphere_coeffs_from(p2, *model, deg_max, cfg.seed);
    const auto f = sphere::sphere_synthesize(cin, model);
    const auto c = sphere::even_lift_decompose(f, deg_max);
    double recovery = 0.0;
    for (const auto& [key, v] : c.values) {
      const auto it = cin.values.find(key);
      const double ref = (it == cin.values.end()) ? 0.0 : it->second;
      recovery = std::max(recovery, std::abs(v - ref));
    }
    detail::write_sphere_coeffs(cfg.out_dir / "coefficients.csv", c);
    rep["results"] = {{"family", "real"},
                      {"max_recovery_error", recovery},
                      {"files", {"coefficients.csv"}}};
    return rep;
  }

  const int size_l = get_int(cfg.params, "l", 3);
  auto model = sphere::make_projective_model(family, size_l, deg_max);
  const json in = cfg.params.value("input", json::object());
  const std::string kind = in.value("kind", "band-limited-random");
  sphere::ProjCoefficients cin;
  if (kind == "band-limited-random") {
    Rng rng(cfg.seed);
    for (int deg = 0; deg <= deg_max; ++deg)
      for (int j = 0; j <= deg; ++j)
        for (int idx = 0; idx < model->fiber_dim(j); ++idx)
          cin[sphere::Key{deg, j, idx}] = rng.symmetric();
  } else if (kind == "single-mode") {
    const int deg = in.value("deg", 1), j = in.value("j", 0),
              idx = in.value("idx", 0);
    if (deg > deg_max || j > deg || idx >= model->fiber_dim(j))
      throw ConfigError("input.deg out of range");
    cin[sphere::Key{deg, j, idx}] = 1.0;
  } else {
    throw ConfigError("input.kind unknown: " + kind);
  }
  const auto f = sphere::projective_synthesize(cin, model);
  const auto c = sphere::projective_decompose(f, deg_max);
  double recovery = 0.0;
  for (const auto& [key, v] : c) {
    const auto it = cin.find(key);
    const double ref = (it == cin.end()) ? 0.0 : it->second;
    recovery = std::max(recovery, std::abs(v - ref));
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& [key, v] : c)
    rows.push_back({fmt(key.deg), fmt(key.l), fmt(key.k), fmt(v)});
  write_csv(cfg.out_dir / "coefficients.csv", {"deg", "j", "idx", "value"}, rows);
  rep["results"] = {{"family", fname},
                    {"max_recovery_error", recovery},
                    {"files", {"coefficients.csv"}}};
  return rep;
}

inline json run_chernoff_report(const RunConfig& cfg) {
  json rep = detail::report_skeleton(cfg);
  const std::string model_name = cfg.params.value("model", "noncompact");
  const int M = get_int(cfg.params, "M", 30);
  const int M_jet = get_int(cfg.params, "M_jet", 10);
  const double tol = get_num(cfg.params, "tol", 1e-10);
  if (M < 1) throw ConfigError("M out of range");
  if (M_jet < 0) throw ConfigError("M_jet out of range");

  chernoff::SpectralMeasure sm;
  std::vector<chernoff::JetRow> jets;

  if (model_name == "noncompact") {
    const auto np = nc_params_from(cfg.params);
    const auto lg = detail::lambda_grid_from(cfg.params);
    const auto g = detail::spectrum_from(cfg.params, np, lg, cfg.seed);
    sm = chernoff::measure_of(g);
    jets = chernoff::jet_at_zero(g, M_jet);
  } else if (model_name == "compact") {
    const auto cp = cp_params_from(cfg.params);
    const int N = get_int(cfg.params, "N", 64);
    if (N < 0) throw ConfigError("N out of range");
    const json in = cfg.params.value("input", json::object());
    const auto cv = synthetic_coefficients(
        in.value("kind", "band-limited-random"), N + 1, cfg.seed, in);
    compact::CoefficientSequence c{cp, cv};
    sm = chernoff::measure_of(c);
    jets = chernoff::jet_at_zero(c, M_jet);
  } else if (model_name == "sphere") {
    const int deg_max = get_int(cfg.params, "deg_max", 5);
    if (deg_max < 0) throw ConfigError("deg_max out of range");
    auto model = detail::sphere_model_from(cfg.params, deg_max);
    auto c = detail::sphere_coeffs_from(cfg.params, *model, deg_max, cfg.seed);
    sm = chernoff::measure_of(c);
    jets = chernoff::jet_at_zero(c, M_jet);
  } else if (model_name == "projective") {
    const auto family = family_from(cfg.params.value("family", "complex"));
    const int size_l = get_int(cfg.params, "l", 3);
    const int deg_max = get_int(cfg.params, "deg_max", 3);
    if (deg_max < 0) throw ConfigError("deg_max out of range");
    auto model = sphere::make_projective_model(family, size_l, deg_max);
    Rng rng(cfg.seed);
    sphere::ProjCoefficients c;
    for (int deg = 0; deg <= deg_max; ++deg)
      for (int j = 0; j <= deg; ++j)
        for (int idx = 0; idx < model->fiber_dim(j); ++idx)
          c[sphere::Key{deg, j, idx}] = rng.symmetric();
    sm = chernoff::measure_of(c, *model);
    jets = chernoff::jet_at_zero(c, *model, M_jet);
  } else {
    throw ConfigError("model unknown: " + model_name);
  }

  const auto report = chernoff::chernoff_verdict(sm, std::move(jets), M, M_jet, tol);

  std::vector<std::vector<std::string>> norm_rows, carleman_rows, jet_rows, plot;
  for (int m = 0; m < static_cast<int>(report.carleman.log_norms.size()); ++m)
    norm_rows.push_back({fmt(m), fmt(report.carleman.log_norms[m]),
                         fmt(std::exp(report.carleman.log_norms[m]))});
  for (int m = 1; m <= static_cast<int>(report.carleman.a.size()); ++m) {
    carleman_rows.push_back({fmt(m), fmt(report.carleman.a[m - 1]),
                             fmt(report.carleman.partial_sums[m - 1])});
    plot.push_back({fmt(m), fmt(report.carleman.partial_sums[m - 1])});
  }
  for (const auto& row : report.jets)
    for (size_t o = 0; o < row.jets.size(); ++o)
      jet_rows.push_back({fmt(row.l), fmt(row.k), fmt(static_cast<int>(o)),
                          fmt(row.jets[o].real()), fmt(row.jets[o].imag())});
  write_csv(cfg.out_dir / "norms.csv", {"m", "log_norm", "norm"}, norm_rows);
  write_csv(cfg.out_dir / "carleman.csv", {"m", "a_m", "partial_sum"},
            carleman_rows);
  write_csv(cfg.out_dir / "jets.csv", {"l", "k", "order", "re", "im"}, jet_rows);
  write_csv(cfg.out_dir / "plot_partial_sums.csv", {"m", "partial_sum"}, plot);

  json jres;
  jres["model"] = model_name;
  jres["verdict"] = chernoff::verdict_name(report.carleman.verdict);
  jres["growth"] = {{"loglog_slope", report.carleman.growth.loglog_slope},
                    {"limit", report.carleman.growth.limit}};
  jres["log_norm_f"] = report.log_norm_f;
  jres["first_nonvanishing_jet"] =
      report.first_nonvanishing_jet ? json(*report.first_nonvanishing_jet)
                                    : json(nullptr);
  jres["consistency_flag"] = report.consistency_flag;
  jres["log_convex_ok"] = report.log_convex_ok;
  jres["files"] = {"norms.csv", "carleman.csv", "jets.csv",
                   "plot_partial_sums.csv"};
  rep["results"] = jres;
  return rep;
}

// Dispatch, artifact writing and the exit-status contract.
inline int run(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  json rep;
  if (cfg.task == "specfun-check") rep = run_specfun_check(cfg);
  else if (cfg.task == "nc-transform") rep = run_nc_transform(cfg);
  else if (cfg.task == "nc-invert") rep = run_nc_invert(cfg);
  else if (cfg.task == "nc-plancherel") rep = run_nc_plancherel(cfg);
  else if (cfg.task == "nc-cratio") rep = run_nc_cratio(cfg);
  else if (cfg.task == "nc-step2") rep = run_nc_step2(cfg);
  else if (cfg.task == "cp-coeffs") rep = run_cp_coeffs(cfg);
  else if (cfg.task == "cp-synth") rep = run_cp_synth(cfg);
  else if (cfg.task == "sphere-decompose") rep = run_sphere_decompose(cfg);
  else if (cfg.task == "sphere-apply") rep = run_sphere_apply(cfg);
  else if (cfg.task == "proj-decompose") rep = run_proj_decompose(cfg);
  else if (cfg.task == "chernoff-report") rep = run_chernoff_report(cfg);
  else throw ConfigError("task unknown: " + cfg.task);

  write_text_file(cfg.out_dir / "report.json", rep.dump(2) + "\n");
  return 0;
}

}  // namespace rankone::io

#endif  // RANKONE_IO_HPP

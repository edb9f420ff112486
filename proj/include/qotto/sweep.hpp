// sweep.hpp — Run configurations, the flat key=value config format, grid
// execution across engines, and figure-ready CSV + manifest output.
//
// CSV schema (fixed): the swept variable columns in declaration order, then
//   E_A, E_Aprime, E_B, E_C, E_D, Q_in, Q_out, W, abs_W, eta, P, abs_P,
//   tau_k, tau_k_opt, tau_total, is_engine
// written with 12 significant digits. Failed cells keep their row (NaN
// values) so the grid stays rectangular; they are listed in the manifest and
// flip the exit code to 3.

#pragma once

#include <qotto/analytics.hpp>
#include <qotto/cycle.hpp>
#include <qotto/kspace.hpp>
#include <qotto/parallel.hpp>
#include <qotto/version.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qotto {

enum class EngineKind { Dense, Statevector, Kspace, Analytic2Spin };

inline const char* to_string(EngineKind e) {
  switch (e) {
    case EngineKind::Dense: return "dense";
    case EngineKind::Statevector: return "statevector";
    case EngineKind::Kspace: return "kspace";
    case EngineKind::Analytic2Spin: return "analytic2spin";
  }
  return "?";
}

inline EngineKind engine_from_string(const std::string& name) {
  if (name == "dense") return EngineKind::Dense;
  if (name == "statevector") return EngineKind::Statevector;
  if (name == "kspace") return EngineKind::Kspace;
  if (name == "analytic2spin") return EngineKind::Analytic2Spin;
  throw std::invalid_argument("unknown engine '" + name +
                              "' (expected dense, statevector, kspace or analytic2spin)");
}

enum class SweepVariable { H2, TauK, L, Tau2 };

inline const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::H2: return "h2";
    case SweepVariable::TauK: return "tau_k";
    case SweepVariable::L: return "L";
    case SweepVariable::Tau2: return "tau2";
  }
  return "?";
}

inline SweepVariable sweep_variable_from_string(const std::string& name) {
  if (name == "h2") return SweepVariable::H2;
  if (name == "tau_k") return SweepVariable::TauK;
  if (name == "L") return SweepVariable::L;
  if (name == "tau2") return SweepVariable::Tau2;
  throw std::invalid_argument("unknown sweep variable '" + name +
                              "' (expected h2, tau_k, L or tau2)");
}

struct SweepAxis {
  SweepVariable var = SweepVariable::H2;
  double start = 0.0;
  double stop = 0.0;
  int count = 1;
};

struct RunConfig {
  EngineKind engine = EngineKind::Dense;
  ModelSpec model;          // TIM, L = 8, J = 1 by default
  CycleParams params;       // headline defaults
  std::vector<SweepAxis> axes;
  bool optimize_tau_k = false;
  double tau_k_max = 0.0;   // 0 = per-model default window
  int scan_grid_points = kDefaultScanGridPoints;
  int max_sites = kDefaultMaxSites;
  int jobs = 0;             // 0 = hardware concurrency
  std::string out_path;     // empty = stdout, no manifest
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void validate(const RunConfig& c) {
  if (c.axes.size() > 2)
    throw ConfigError("config: at most two sweep axes are supported");
  for (const SweepAxis& ax : c.axes) {
    if (ax.count < 1) throw ConfigError("config: sweep count must be >= 1");
    if (c.optimize_tau_k && ax.var == SweepVariable::TauK)
      throw ConfigError("config: sweeping tau_k and optimize_tau_k are mutually exclusive");
  }
  if (c.engine == EngineKind::Kspace && c.model.model != Model::TIM)
    throw ConfigError("config: the kspace engine supports only model = tim");
  if (c.engine == EngineKind::Analytic2Spin &&
      (c.model.model != Model::TIM || c.model.L != 2))
    throw ConfigError("config: the analytic2spin engine requires model = tim and L = 2");
  if (c.engine == EngineKind::Statevector && c.params.T_C != 0.0)
    throw ConfigError("config: the statevector engine requires TC = 0");
  if (c.scan_grid_points < 16)
    throw ConfigError("config: grid_points must be >= 16");
  validate(c.params);
}

// ---------------------------------------------------------------------------
// Flat key = value config files; '#' starts a comment. CLI flags win over
// file values (the CLI applies them after parse_config).
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& value,
                           int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "' expects a number, got '" + value + "'");
  }
}

inline int parse_int(const std::string& key, const std::string& value, int line) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "' expects an integer, got '" + value + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& value, int line) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                    "' expects a boolean, got '" + value + "'");
}

inline SweepAxis parse_axis(const std::string& key, const std::string& value,
                            int line) {
  // var:start:stop:count
  std::vector<std::string> parts;
  std::string token;
  std::istringstream in(value);
  while (std::getline(in, token, ':')) parts.push_back(trim(token));
  if (parts.size() != 4)
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "' expects var:start:stop:count, got '" + value + "'");
  SweepAxis ax;
  try {
    ax.var = sweep_variable_from_string(parts[0]);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("line " + std::to_string(line) + ": " + e.what());
  }
  ax.start = parse_double(key, parts[1], line);
  ax.stop = parse_double(key, parts[2], line);
  ax.count = parse_int(key, parts[3], line);
  return ax;
}

}  // namespace detail

// "var:start:stop:count", as accepted by the sweep/sweep2 config keys.
inline SweepAxis parse_sweep_axis(const std::string& text) {
  return detail::parse_axis("sweep", text, 0);
}

inline void apply_config_entry(RunConfig& c, const std::string& key,
                               const std::string& value, int line) {
  using detail::parse_bool;
  using detail::parse_double;
  using detail::parse_int;
  try {
    if (key == "engine") c.engine = engine_from_string(value);
    else if (key == "model") c.model.model = model_from_string(value);
    else if (key == "L") c.model.L = parse_int(key, value, line);
    else if (key == "J") c.model.J = parse_double(key, value, line);
    else if (key == "Bz") c.model.Bz = parse_double(key, value, line);
    else if (key == "h1") c.params.h1 = parse_double(key, value, line);
    else if (key == "h2") c.params.h2 = parse_double(key, value, line);
    else if (key == "TH") c.params.T_H = parse_double(key, value, line);
    else if (key == "TC") c.params.T_C = parse_double(key, value, line);
    else if (key == "tau1") c.params.tau1 = parse_double(key, value, line);
    else if (key == "tau2") c.params.tau2 = parse_double(key, value, line);
    else if (key == "tau_bath") c.params.tau_bath = parse_double(key, value, line);
    else if (key == "tau_k") c.params.tau_k = parse_double(key, value, line);
    else if (key == "dt_max") c.params.dt_max = parse_double(key, value, line);
    else if (key == "optimize_tau_k") c.optimize_tau_k = parse_bool(key, value, line);
    else if (key == "tau_k_max") c.tau_k_max = parse_double(key, value, line);
    else if (key == "grid_points") c.scan_grid_points = parse_int(key, value, line);
    else if (key == "max_sites") c.max_sites = parse_int(key, value, line);
    else if (key == "jobs") c.jobs = parse_int(key, value, line);
    else if (key == "out") c.out_path = value;
    else if (key == "sweep" || key == "sweep2")
      c.axes.push_back(detail::parse_axis(key, value, line));
    else
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
  } catch (const std::invalid_argument& e) {
    throw ConfigError("line " + std::to_string(line) + ": key '" + key + "': " + e.what());
  }
}

inline RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string text = detail::trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    const std::string key = detail::trim(text.substr(0, eq));
    const std::string value = detail::trim(text.substr(eq + 1));
    apply_config_entry(c, key, value, line);
  }
  return c;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// Grid execution
// ---------------------------------------------------------------------------

struct SweepRecord {
  std::vector<double> axis_values;  // one per declared axis
  CycleResult result;
  double tau_k_used = 0.0;
  double tau_k_opt = std::numeric_limits<double>::quiet_NaN();
  bool failed = false;
  std::string error;
};

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 3 partial failure
  std::vector<SweepRecord> records;
  double wall_seconds = 0.0;
};

// Analytic two-spin engine: both ramps treated adiabatically (populations
// transported between the sorted level sets), free segment through the
// dephased closed form. Level set of the two-spin medium at field h:
// {-2R, -2|J|, +2|J|, +2R}, R = sqrt(h^2 + J^2).
inline CycleResult run_cycle_analytic_two_spin(const ModelSpec& spec,
                                               const CycleParams& p,
                                               double tau_k) {
  validate(p);
  const double J = spec.J;
  const auto levels = [&](double h) {
    const double r = std::sqrt(h * h + J * J);
    return std::array<double, 4>{-2.0 * r, -2.0 * std::abs(J),
                                 2.0 * std::abs(J), 2.0 * r};
  };
  const auto thermal_weights = [](const std::array<double, 4>& eps, double T) {
    std::array<double, 4> w{};
    double z = 0.0;
    for (int i = 0; i < 4; ++i) {
      w[static_cast<std::size_t>(i)] =
          T == 0.0 ? (eps[static_cast<std::size_t>(i)] - eps[0] <= 1e-12 ? 1.0 : 0.0)
                   : std::exp(-(eps[static_cast<std::size_t>(i)] - eps[0]) / T);
      z += w[static_cast<std::size_t>(i)];
    }
    for (double& x : w) x /= z;
    return w;
  };
  const auto dot = [](const std::array<double, 4>& a, const std::array<double, 4>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
  };

  const auto eps_hot = levels(p.h1);
  const auto eps_cold = levels(p.h2);
  const auto w_hot = thermal_weights(eps_hot, p.T_H);
  const double E_B = dot(w_hot, eps_hot);
  const double E_C = dot(w_hot, eps_cold);  // adiabatic forward ramp
  const auto w_cold = thermal_weights(eps_cold, p.T_C);
  const double E_D = dot(w_cold, eps_cold);
  const TwoSpinCoefficients c = two_spin_coefficients(p.h1, p.h2, J, p.T_C);
  const double E_Aprime = two_spin_energy_Aprime(c, p.h1, J);
  const double E_A = two_spin_energy_A_dephased(tau_k, c, p.h1, J);
  return assemble_cycle_result(E_A, E_B, E_C, E_D, E_Aprime, p, tau_k);
}

namespace detail {

inline double axis_value(const SweepAxis& ax, int i) {
  if (ax.count == 1) return ax.start;
  return ax.start + (ax.stop - ax.start) * i / (ax.count - 1);
}

inline void apply_axis(ModelSpec& model, CycleParams& params,
                       const SweepAxis& ax, double value) {
  switch (ax.var) {
    case SweepVariable::H2: params.h2 = value; break;
    case SweepVariable::TauK: params.tau_k = value; break;
    case SweepVariable::L: model.L = static_cast<int>(std::lround(value)); break;
    case SweepVariable::Tau2: params.tau2 = value; break;
  }
}

}  // namespace detail

// Executes one grid cell.
inline SweepRecord run_cell(const RunConfig& c, const std::vector<double>& values) {
  SweepRecord rec;
  rec.axis_values = values;
  ModelSpec model = c.model;
  CycleParams params = c.params;
  for (std::size_t i = 0; i < c.axes.size(); ++i)
    detail::apply_axis(model, params, c.axes[i], values[i]);
  try {
    double tau_k = params.tau_k;
    switch (c.engine) {
      case EngineKind::Dense: {
        SectorCycleEngine engine(model, c.max_sites);
        const auto front = engine.run_front(params);
        if (c.optimize_tau_k) {
          const double window =
              c.tau_k_max > 0.0 ? c.tau_k_max : default_tau_k_window(model);
          const TauKScan scan = optimize_free_segment(
              engine.free_segment_scan(front, params.h1), window,
              c.scan_grid_points);
          tau_k = scan.tau_k_opt;
          rec.tau_k_opt = scan.tau_k_opt;
        }
        rec.result = engine.finish(front, params, tau_k);
        break;
      }
      case EngineKind::Statevector: {
        rec.result = run_cycle_statevector(model, params, c.max_sites);
        break;
      }
      case EngineKind::Kspace: {
        if (model.model != Model::TIM)
          throw std::invalid_argument("kspace engine supports only the TIM");
        KspaceCycleEngine engine(model.L, 1);  // cells already run in parallel
        const auto front = engine.run_front(params);
        if (c.optimize_tau_k) {
          const double window =
              c.tau_k_max > 0.0 ? c.tau_k_max : std::numbers::pi / 2.0;
          const TauKScan scan = optimize_free_segment(
              engine.free_segment_scan(front, params.h1), window,
              c.scan_grid_points);
          tau_k = scan.tau_k_opt;
          rec.tau_k_opt = scan.tau_k_opt;
        }
        rec.result = engine.finish(front, params, tau_k);
        break;
      }
      case EngineKind::Analytic2Spin: {
        if (c.optimize_tau_k) {
          const TwoSpinCoefficients co =
              two_spin_coefficients(params.h1, params.h2, model.J, params.T_C);
          const auto f = [&](double t) {
            return two_spin_energy_A_dephased(t, co, params.h1, model.J);
          };
          const double window =
              c.tau_k_max > 0.0 ? c.tau_k_max : default_tau_k_window(model);
          const TauKScan scan = optimize_free_segment(f, window, c.scan_grid_points);
          tau_k = scan.tau_k_opt;
          rec.tau_k_opt = scan.tau_k_opt;
        }
        rec.result = run_cycle_analytic_two_spin(model, params, tau_k);
        break;
      }
    }
    rec.tau_k_used = tau_k;
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
    rec.result = CycleResult{};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rec.result.E_A = rec.result.E_B = rec.result.E_C = rec.result.E_D =
        rec.result.E_Aprime = rec.result.Q_in = rec.result.Q_out =
            rec.result.W = rec.result.eta = rec.result.P =
                rec.result.tau_total = rec.result.free_evolution_gain = nan;
    rec.tau_k_used = nan;
  }
  return rec;
}

inline RunOutcome run_sweep(const RunConfig& c) {
  validate(c);
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::vector<double>> cells;
  if (c.axes.empty()) {
    cells.push_back({});
  } else if (c.axes.size() == 1) {
    for (int i = 0; i < c.axes[0].count; ++i)
      cells.push_back({detail::axis_value(c.axes[0], i)});
  } else {
    for (int i = 0; i < c.axes[0].count; ++i)
      for (int j = 0; j < c.axes[1].count; ++j)
        cells.push_back({detail::axis_value(c.axes[0], i),
                         detail::axis_value(c.axes[1], j)});
  }
  RunOutcome out;
  out.records.resize(cells.size());
  parallel_for(
      cells.size(),
      [&](std::size_t i) { out.records[i] = run_cell(c, cells[i]); },
      c.jobs <= 0 ? 0 : static_cast<unsigned>(c.jobs));
  for (const SweepRecord& r : out.records)
    if (r.failed) out.exit_code = 3;
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

// ---------------------------------------------------------------------------
// CSV + manifest
// ---------------------------------------------------------------------------

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline void write_csv(const RunConfig& c, const std::vector<SweepRecord>& records,
                      std::ostream& os) {
  for (const SweepAxis& ax : c.axes) os << to_string(ax.var) << ",";
  os << "E_A,E_Aprime,E_B,E_C,E_D,Q_in,Q_out,W,abs_W,eta,P,abs_P,"
        "tau_k,tau_k_opt,tau_total,is_engine\n";
  for (const SweepRecord& r : records) {
    for (double v : r.axis_values) os << format_number(v) << ",";
    const CycleResult& x = r.result;
    os << format_number(x.E_A) << "," << format_number(x.E_Aprime) << ","
       << format_number(x.E_B) << "," << format_number(x.E_C) << ","
       << format_number(x.E_D) << "," << format_number(x.Q_in) << ","
       << format_number(x.Q_out) << "," << format_number(x.W) << ","
       << format_number(std::abs(x.W)) << "," << format_number(x.eta) << ","
       << format_number(x.P) << "," << format_number(std::abs(x.P)) << ","
       << format_number(r.tau_k_used) << "," << format_number(r.tau_k_opt) << ","
       << format_number(x.tau_total) << "," << (x.is_engine ? 1 : 0) << "\n";
  }
}

inline void write_manifest(const RunConfig& c, const RunOutcome& out,
                           std::ostream& os) {
  os << "qotto_version = " << kVersion << "\n";
  os << "engine = " << to_string(c.engine) << "\n";
  os << "model = " << to_string(c.model.model) << "\n";
  os << "L = " << c.model.L << "\n";
  os << "J = " << format_number(c.model.J) << "\n";
  os << "Bz = " << format_number(c.model.Bz) << "\n";
  const CycleParams& p = c.params;
  os << "h1 = " << format_number(p.h1) << "\n";
  os << "h2 = " << format_number(p.h2) << "\n";
  os << "TH = " << format_number(p.T_H) << "\n";
  os << "TC = " << format_number(p.T_C) << "\n";
  os << "tau1 = " << format_number(p.tau1) << "\n";
  os << "tau2 = " << format_number(p.tau2) << "\n";
  os << "tau_bath = " << format_number(p.tau_bath) << "\n";
  os << "tau_k = " << format_number(p.tau_k) << "\n";
  os << "dt_max = " << format_number(p.dt_max) << "\n";
  os << "optimize_tau_k = " << (c.optimize_tau_k ? 1 : 0) << "\n";
  os << "grid_points = " << c.scan_grid_points << "\n";
  for (std::size_t i = 0; i < c.axes.size(); ++i)
    os << "axis" << i << " = " << to_string(c.axes[i].var) << ":"
       << format_number(c.axes[i].start) << ":" << format_number(c.axes[i].stop)
       << ":" << c.axes[i].count << "\n";
  os << "records = " << out.records.size() << "\n";
  std::size_t failed = 0;
  std::string failed_list;
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    if (!out.records[i].failed) continue;
    ++failed;
    if (!failed_list.empty()) failed_list += " ";
    failed_list += std::to_string(i);
  }
  os << "failed_cells = " << failed << "\n";
  if (failed > 0) os << "failed_cell_indices = " << failed_list << "\n";
  os << "wall_time_seconds = " << format_number(out.wall_seconds) << "\n";
  os << "created_unix = "
     << std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count()
     << "\n";
}

// Executes the grid and writes the CSV (and, for file output, the manifest
// at <out>.manifest). Returns the process exit code.
inline int run(const RunConfig& c, std::ostream& console) {
  const RunOutcome out = run_sweep(c);
  if (c.out_path.empty()) {
    write_csv(c, out.records, console);
  } else {
    std::ofstream csv(c.out_path);
    if (!csv) throw ConfigError("cannot open output file '" + c.out_path + "'");
    write_csv(c, out.records, csv);
    std::ofstream manifest(c.out_path + ".manifest");
    if (!manifest)
      throw ConfigError("cannot open manifest file '" + c.out_path + ".manifest'");
    write_manifest(c, out, manifest);
  }
  for (const SweepRecord& r : out.records)
    if (r.failed)
      console << "cell failed: " << r.error << "\n";
  return out.exit_code;
}

}  // namespace qotto

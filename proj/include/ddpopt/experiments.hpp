#pragma once

// Experiment layer behind the CLI: key = value configs, model construction
// from a family name, threaded parameter sweeps and CSV/JSON export.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ddpopt/ddp_engine.hpp"
#include "ddpopt/errors.hpp"
#include "ddpopt/gaussian_analytic.hpp"
#include "ddpopt/propagator.hpp"
#include "ddpopt/pulse_families.hpp"
#include "json.hpp"

namespace ddpopt {

inline std::string format_double(double v) {
  // shortest of 15..17 significant digits that round-trips
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v || std::isnan(v)) break;
  }
  return buf;
}

struct Grid {
  double start = 0.0;
  double stop = 10.0;
  int count = 200;
  bool log_scale = false;

  std::vector<double> values() const {
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) {
      const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      out[i] = log_scale ? start * std::pow(stop / start, f) : start + (stop - start) * f;
    }
    // pin the endpoints exactly
    out.front() = start;
    out.back() = stop;
    return out;
  }
};

/// "a:b:n"
inline Grid parse_grid(const std::string& s, bool log_scale = false) {
  Grid g;
  g.log_scale = log_scale;
  const auto p1 = s.find(':');
  const auto p2 = s.find(':', p1 == std::string::npos ? p1 : p1 + 1);
  if (p1 == std::string::npos || p2 == std::string::npos) throw ConfigError("grid must look like a:b:n, got '" + s + "'");
  try {
    std::size_t used = 0;
    g.start = std::stod(s.substr(0, p1), &used);
    g.stop = std::stod(s.substr(p1 + 1, p2 - p1 - 1));
    g.count = std::stoi(s.substr(p2 + 1));
  } catch (const std::exception&) {
    throw ConfigError("grid must look like a:b:n, got '" + s + "'");
  }
  if (g.count < 2) throw ConfigError("grid count must be at least 2");
  if (log_scale && !(g.start > 0.0 && g.stop > 0.0)) throw ConfigError("log grid needs positive endpoints");
  return g;
}

inline std::string format_grid(const Grid& g) {
  return format_double(g.start) + ":" + format_double(g.stop) + ":" + std::to_string(g.count);
}

enum class Method { ode, ddp_generic, ddp_two_point, ddp_sech, series };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::ode: return "ode";
    case Method::ddp_generic: return "ddp-generic";
    case Method::ddp_two_point: return "ddp-two-point";
    case Method::ddp_sech: return "ddp-sech";
    default: return "series";
  }
}

inline Method parse_method(const std::string& s) {
  for (const Method m : {Method::ode, Method::ddp_generic, Method::ddp_two_point, Method::ddp_sech, Method::series})
    if (s == to_string(m)) return m;
  throw ConfigError("unknown method '" + s + "'");
}

/// One experiment. Physical parameters are dimensionless products with T;
/// the swept key replaces one of them per grid point.
struct SweepConfig {
  std::string family = "gaussian";
  double omega0T = 1.0;
  double deltaT = 3.0;
  double muT = 0.0;
  double T = 1.0;
  double vT2 = 1.0;  ///< Landau-Zener slope v T^2
  std::string sweep = "omega0T";
  Grid grid;
  std::vector<Method> methods{Method::ode, Method::ddp_generic, Method::ddp_two_point, Method::ddp_sech};
  std::string out;
  std::string json;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double window = 0.0;  ///< half-width in units of T; 0 keeps the family default
  int threads = 0;      ///< 0: hardware concurrency
  std::string ddp_basis = "diabatic";
  std::string d_source = "quadrature";

  bool wants(Method m) const { return std::find(methods.begin(), methods.end(), m) != methods.end(); }
  bool operator==(const SweepConfig&) const = default;
};

inline bool operator==(const Grid& a, const Grid& b) {
  return a.start == b.start && a.stop == b.stop && a.count == b.count && a.log_scale == b.log_scale;
}

namespace config_detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
}

inline const std::vector<std::string>& families() {
  static const std::vector<std::string> f{"gaussian", "erf", "erf-mu", "landau-zener", "parametrized-gaussian",
                                          "parametrized-sech"};
  return f;
}

inline const std::vector<std::string>& sweepable() {
  static const std::vector<std::string> s{"omega0T", "deltaT", "muT", "vT2"};
  return s;
}

}  // namespace config_detail

/// Apply one key = value setting. Throws ConfigError on unknown keys or
/// malformed values.
inline void set_config_value(SweepConfig& c, const std::string& key, const std::string& value) {
  using config_detail::to_double;
  if (key == "family") {
    const auto& f = config_detail::families();
    if (std::find(f.begin(), f.end(), value) == f.end()) throw ConfigError("unknown family '" + value + "'");
    c.family = value;
  } else if (key == "omega0T") {
    c.omega0T = to_double(key, value);
  } else if (key == "deltaT") {
    c.deltaT = to_double(key, value);
  } else if (key == "muT") {
    c.muT = to_double(key, value);
  } else if (key == "T") {
    c.T = to_double(key, value);
    if (!(c.T > 0.0)) throw ConfigError("T must be positive");
  } else if (key == "vT2") {
    c.vT2 = to_double(key, value);
  } else if (key == "sweep") {
    const auto& s = config_detail::sweepable();
    if (std::find(s.begin(), s.end(), value) == s.end()) throw ConfigError("cannot sweep '" + value + "'");
    c.sweep = value;
  } else if (key == "grid") {
    c.grid = parse_grid(value, c.grid.log_scale);
  } else if (key == "grid_scale") {
    if (value != "linear" && value != "log") throw ConfigError("grid_scale must be linear or log");
    c.grid.log_scale = value == "log";
    if (c.grid.log_scale && !(c.grid.start > 0.0 && c.grid.stop > 0.0))
      throw ConfigError("log grid needs positive endpoints");
  } else if (key == "methods") {
    std::vector<Method> ms;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = config_detail::trim(item);
      if (item.empty()) continue;
      const Method m = parse_method(item);
      if (std::find(ms.begin(), ms.end(), m) == ms.end()) ms.push_back(m);
    }
    if (ms.empty()) throw ConfigError("methods must not be empty");
    c.methods = ms;
  } else if (key == "out") {
    c.out = value;
  } else if (key == "json") {
    c.json = value;
  } else if (key == "rel_tol" || key == "abs_tol") {
    const double v = to_double(key, value);
    if (!(v > 0.0 && v <= 1e-3)) throw ConfigError(key + " must lie in (0, 1e-3]");
    (key == "rel_tol" ? c.rel_tol : c.abs_tol) = v;
  } else if (key == "window") {
    c.window = to_double(key, value);
    if (c.window < 0.0) throw ConfigError("window must be nonnegative");
  } else if (key == "threads") {
    const double v = to_double(key, value);
    if (v < 0.0 || v != std::floor(v)) throw ConfigError("threads must be a nonnegative integer");
    c.threads = static_cast<int>(v);
  } else if (key == "ddp_basis") {
    if (value != "diabatic" && value != "superadiabatic") throw ConfigError("ddp_basis must be diabatic or superadiabatic");
    c.ddp_basis = value;
  } else if (key == "d_source") {
    if (value != "quadrature" && value != "uniform") throw ConfigError("d_source must be quadrature or uniform");
    c.d_source = value;
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

/// Apply a batch of settings. grid_scale and grid are order-independent:
/// the log-scale endpoint check runs once every key is in.
inline void apply_config_values(SweepConfig& c, const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv) {
    if (k != "grid_scale") continue;
    if (v != "linear" && v != "log") throw ConfigError("grid_scale must be linear or log");
    c.grid.log_scale = v == "log";
  }
  const bool log_scale = c.grid.log_scale;
  c.grid.log_scale = false;
  for (const auto& [k, v] : kv)
    if (k != "grid_scale") set_config_value(c, k, v);
  c.grid.log_scale = log_scale;
  if (log_scale && !(c.grid.start > 0.0 && c.grid.stop > 0.0)) throw ConfigError("log grid needs positive endpoints");
}

/// Parse a key = value document; '#' starts a comment. grid_scale may
/// appear before or after grid.
inline SweepConfig parse_config(const std::string& text, SweepConfig base = {}) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = config_detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    kv.emplace_back(config_detail::trim(line.substr(0, eq)), config_detail::trim(line.substr(eq + 1)));
  }
  apply_config_values(base, kv);
  return base;
}

inline SweepConfig load_config(const std::string& path, SweepConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

/// Ordered key/value pairs, every setting included.
inline std::vector<std::pair<std::string, std::string>> config_entries(const SweepConfig& c) {
  std::string methods;
  for (const Method m : c.methods) methods += (methods.empty() ? "" : ",") + std::string(to_string(m));
  return {{"family", c.family},
          {"omega0T", format_double(c.omega0T)},
          {"deltaT", format_double(c.deltaT)},
          {"muT", format_double(c.muT)},
          {"T", format_double(c.T)},
          {"vT2", format_double(c.vT2)},
          {"sweep", c.sweep},
          {"grid_scale", c.grid.log_scale ? "log" : "linear"},
          {"grid", format_grid(c.grid)},
          {"methods", methods},
          {"out", c.out},
          {"json", c.json},
          {"rel_tol", format_double(c.rel_tol)},
          {"abs_tol", format_double(c.abs_tol)},
          {"window", format_double(c.window)},
          {"threads", std::to_string(c.threads)},
          {"ddp_basis", c.ddp_basis},
          {"d_source", c.d_source}};
}

inline std::string serialize_config(const SweepConfig& c) {
  std::string s;
  for (const auto& [k, v] : config_entries(c)) s += k + " = " + v + "\n";
  return s;
}

/// Parameters at one grid point.
inline SweepConfig at_point(SweepConfig c, double value) {
  if (c.sweep == "omega0T") c.omega0T = value;
  else if (c.sweep == "deltaT") c.deltaT = value;
  else if (c.sweep == "muT") c.muT = value;
  else c.vT2 = value;
  return c;
}

/// Model for the family at the configured parameters.
inline PulseModel make_model(const SweepConfig& c) {
  const double T = c.T;
  PulseModel m;
  if (c.family == "gaussian") m = make_gaussian(c.omega0T / T, c.deltaT / T, T);
  else if (c.family == "erf") m = make_erf(c.omega0T / T, T);
  else if (c.family == "erf-mu") m = make_erf_deviated(c.omega0T / T, T, c.muT / T);
  else if (c.family == "landau-zener") m = make_landau_zener(c.omega0T / T, c.vT2 / (T * T));
  else if (c.family == "parametrized-gaussian") m = make_parametrized(shapes::gaussian_pulse(T), c.omega0T / T, c.deltaT / T);
  else if (c.family == "parametrized-sech") m = make_parametrized(shapes::sech_pulse(T), c.omega0T / T, c.deltaT / T);
  else throw ConfigError("unknown family '" + c.family + "'");
  if (c.window > 0.0) m.window = {-c.window * T, c.window * T};
  return m;
}

/// Gaussian-model parameters behind the closed forms, if the family has
/// them: the Gaussian model itself, or the erf model's adiabatic image.
inline std::optional<GaussianParams> gaussian_image(const SweepConfig& c) {
  if (c.family == "gaussian") return GaussianParams{c.omega0T / c.T, c.deltaT / c.T, c.T};
  if (c.family == "erf" || (c.family == "erf-mu" && c.muT == 0.0)) return GaussianParams::superadiabatic(c.omega0T / c.T, c.T);
  return std::nullopt;
}

struct SweepRecord {
  double sweep_value = 0.0;
  std::optional<double> p_adiabatic_ode;
  std::optional<double> p_diabatic_ode;
  std::optional<double> p_ddp_sech;
  std::optional<double> p_ddp_two_point;  ///< raw, may exceed 1
  std::optional<double> p_ddp_generic;    ///< clipped to [0, 1]
  std::optional<double> p_ddp_generic_raw;
  std::optional<double> p_ddp_series;
  std::optional<double> ln_one_minus_p;
  std::optional<double> norm_drift;
  std::optional<int> n_points;
  std::string error;
};

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> c{"sweep_value",   "p_adiabatic_ode", "p_diabatic_ode",    "p_ddp_sech",
                                          "p_ddp_two_point", "p_ddp_generic", "ln_one_minus_p",    "norm_drift",
                                          "n_points",      "error",           "p_ddp_generic_raw", "p_ddp_series"};
  return c;
}

/// D(tau_0^+) of the Gaussian image, by quadrature or by the uniform
/// approximations.
inline cplx gaussian_action(const GaussianParams& g, const std::string& source) {
  if (source == "uniform") return ddp_uniform(g);
  const PulseModel m = make_gaussian(g.coupling_amplitude, g.splitting, g.T);
  return ddp_integral(m, g.T * transition_points_closed(g, 0).first).value;
}

/// Evaluate every requested method at one parameter set. Errors from any
/// stage end up in the record's error field; earlier results are kept.
inline SweepRecord evaluate_point(const SweepConfig& c, double value) {
  SweepRecord r;
  r.sweep_value = value;
  const SweepConfig p = at_point(c, value);
  std::vector<std::string> errs;
  const auto guard = [&](const char* stage, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      errs.push_back(std::string(stage) + ": " + e.what());
    }
  };

  std::optional<PulseModel> model;
  // A Gaussian model with zero coupling (or an erf image with infinite
  // splitting) is trivially adiabatic.
  const bool trivial = (c.family == "gaussian" && p.omega0T == 0.0);
  guard("model", [&] {
    if (!trivial) model = make_model(p);
  });

  if (c.wants(Method::ode)) {
    guard("ode", [&] {
      if (trivial) {
        r.p_adiabatic_ode = 0.0;
        r.p_diabatic_ode = 1.0;
        r.norm_drift = 0.0;
      } else if (model) {
        PropagationConfig cfg = default_config(*model, Basis::diabatic, p.rel_tol);
        cfg.abs_tol = p.abs_tol;
        const auto res = transition_probability(*model, cfg);
        r.p_adiabatic_ode = res.p_adiabatic;
        r.p_diabatic_ode = res.p_diabatic;
        r.norm_drift = res.norm_drift;
      }
      if (r.p_adiabatic_ode) r.ln_one_minus_p = std::log1p(-*r.p_adiabatic_ode);
    });
  }

  const auto image = trivial ? std::nullopt : gaussian_image(p);
  if (trivial) {
    if (c.wants(Method::ddp_sech)) r.p_ddp_sech = 0.0;
    if (c.wants(Method::ddp_two_point)) r.p_ddp_two_point = 0.0;
    if (c.wants(Method::series)) r.p_ddp_series = 0.0;
  }
  if (image && (c.wants(Method::ddp_sech) || c.wants(Method::ddp_two_point))) {
    guard("ddp-closed-form", [&] {
      const cplx D = gaussian_action(*image, p.d_source);
      if (c.wants(Method::ddp_sech)) r.p_ddp_sech = probability_all_points(D.real(), D.imag());
      if (c.wants(Method::ddp_two_point)) r.p_ddp_two_point = probability_two_point(D.real(), D.imag());
    });
  }
  if (image && c.wants(Method::series)) {
    guard("series", [&] {
      if (image->alpha() < 1.0) {
        const cplx D = ddp_series_small_alpha(*image, 20);
        r.p_ddp_series = probability_two_point(D.real(), D.imag());
      }
    });
  }
  if (c.wants(Method::ddp_generic)) {
    guard("ddp-generic", [&] {
      if (trivial) {
        r.p_ddp_generic = r.p_ddp_generic_raw = 0.0;
        r.n_points = 0;
        return;
      }
      if (!model) return;
      std::optional<PulseModel> target;
      if (p.ddp_basis == "superadiabatic") {
        if (!image) throw CapabilityError("no superadiabatic image for family '" + p.family + "'");
        target = make_gaussian(image->coupling_amplitude, image->splitting, image->T);
      } else {
        target = *model;
      }
      const DdpResult d = analyze_ddp(*target);
      r.p_ddp_generic_raw = d.p_multi;
      r.p_ddp_generic = d.p_multi_reported();
      r.n_points = static_cast<int>(d.points.size());
    });
  }
  for (const auto& e : errs) r.error += (r.error.empty() ? "" : "; ") + e;
  return r;
}

/// Evaluate the grid on a pool of threads; rows come back in grid order.
inline std::vector<SweepRecord> run_sweep(const SweepConfig& c) {
  const std::vector<double> xs = c.grid.values();
  std::vector<SweepRecord> rows(xs.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n = std::min<unsigned>(c.threads > 0 ? static_cast<unsigned>(c.threads) : hw,
                                        static_cast<unsigned>(xs.size()));
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < xs.size(); i = next++) rows[i] = evaluate_point(c, xs[i]);
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

namespace csv_detail {

inline std::string field(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

inline std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (const char ch : s) {
    if (ch == '"') q += "\"\"";
    else if (ch == '\n') q += ' ';
    else q += ch;
  }
  return q + "\"";
}

}  // namespace csv_detail

/// CSV with the configuration echoed as '# key = value' comment lines.
inline std::string to_csv(const SweepConfig& c, const std::vector<SweepRecord>& rows) {
  using csv_detail::field;
  std::string s;
  for (const auto& [k, v] : config_entries(c)) s += "# " + k + " = " + v + "\n";
  for (std::size_t i = 0; i < csv_columns().size(); ++i) s += (i ? "," : "") + csv_columns()[i];
  s += "\n";
  for (const auto& r : rows) {
    s += format_double(r.sweep_value) + "," + field(r.p_adiabatic_ode) + "," + field(r.p_diabatic_ode) + "," +
         field(r.p_ddp_sech) + "," + field(r.p_ddp_two_point) + "," + field(r.p_ddp_generic) + "," +
         field(r.ln_one_minus_p) + "," + field(r.norm_drift) + "," + (r.n_points ? std::to_string(*r.n_points) : "") +
         "," + csv_detail::quote(r.error) + "," + field(r.p_ddp_generic_raw) + "," + field(r.p_ddp_series) + "\n";
  }
  return s;
}

inline nlohmann::ordered_json to_json(const SweepConfig& c, const std::vector<SweepRecord>& rows) {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : config_entries(c)) j["config"][k] = v;
  j["columns"] = csv_columns();
  j["rows"] = nlohmann::ordered_json::array();
  const auto put = [](nlohmann::ordered_json& o, const char* k, const std::optional<double>& v) {
    if (v && std::isfinite(*v)) o[k] = *v;
    else if (v) o[k] = format_double(*v);
    else o[k] = nullptr;
  };
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["sweep_value"] = r.sweep_value;
    put(o, "p_adiabatic_ode", r.p_adiabatic_ode);
    put(o, "p_diabatic_ode", r.p_diabatic_ode);
    put(o, "p_ddp_sech", r.p_ddp_sech);
    put(o, "p_ddp_two_point", r.p_ddp_two_point);
    put(o, "p_ddp_generic", r.p_ddp_generic);
    put(o, "ln_one_minus_p", r.ln_one_minus_p);
    put(o, "norm_drift", r.norm_drift);
    o["n_points"] = r.n_points ? nlohmann::ordered_json(*r.n_points) : nlohmann::ordered_json(nullptr);
    o["error"] = r.error;
    put(o, "p_ddp_generic_raw", r.p_ddp_generic_raw);
    put(o, "p_ddp_series", r.p_ddp_series);
    j["rows"].push_back(o);
  }
  return j;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
}

}  // namespace ddpopt

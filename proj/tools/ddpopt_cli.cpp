// ddpopt: sweeps, transition-point tables and comparison runs.
//
// Exit codes: 0 success, 1 tolerance violation (compare), 2 config error,
// 3 numeric failure.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ddpopt/ddpopt.hpp"
#include "json.hpp"

namespace {

using namespace ddpopt;

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kConfigError = 2;
constexpr int kNumericFailure = 3;

struct CommonArgs {
  std::string config;
  std::map<std::string, std::string> overrides;
};

// Register the shared override flags; each maps onto a config key.
void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "key = value experiment file");
  static const std::vector<std::pair<std::string, std::string>> flags{
      {"--family", "family"},     {"--omega0T", "omega0T"}, {"--deltaT", "deltaT"},       {"--muT", "muT"},
      {"--T", "T"},               {"--vT2", "vT2"},         {"--sweep", "sweep"},         {"--grid", "grid"},
      {"--grid-scale", "grid_scale"}, {"--out", "out"},     {"--methods", "methods"},     {"--json", "json"},
      {"--rel-tol", "rel_tol"},   {"--abs-tol", "abs_tol"}, {"--window", "window"},       {"--threads", "threads"},
      {"--ddp-basis", "ddp_basis"}, {"--d-source", "d_source"}};
  for (const auto& [flag, key] : flags) {
    cmd->add_option_function<std::string>(
        flag, [&args, key = key](const std::string& v) { args.overrides[key] = v; }, "override '" + key + "'");
  }
}

SweepConfig resolve(const CommonArgs& args) {
  SweepConfig c = args.config.empty() ? SweepConfig{} : load_config(args.config);
  apply_config_values(c, {args.overrides.begin(), args.overrides.end()});
  return c;
}

int cmd_sweep(const CommonArgs& args) {
  const SweepConfig c = resolve(args);
  const auto rows = run_sweep(c);
  const std::string csv = to_csv(c, rows);
  if (c.out.empty() || c.out == "-") std::cout << csv;
  else write_text(c.out, csv);
  if (!c.json.empty()) write_text(c.json, to_json(c, rows).dump(2) + "\n");
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.error.empty() ? 0 : 1;
  if (failed) std::cerr << failed << " of " << rows.size() << " rows recorded errors\n";
  return kOk;
}

struct PointRow {
  std::string source;
  TransitionPoint point;
  cplx D;
  cplx gamma;
  bool stokes_ok = false;
  std::string stokes_message;
};

int cmd_points(const CommonArgs& args, int max_points, bool no_stokes) {
  const SweepConfig c = resolve(args);
  const PulseModel m = make_model(c);
  if (!m.complex_capable) {
    std::cerr << "family '" << c.family << "' cannot be evaluated at complex time; no transition points\n";
    return kNumericFailure;
  }
  SearchOptions so = default_search(m);
  so.max_points = max_points;
  const auto search = find_transition_points(m, so);
  std::vector<PointRow> rows;
  for (const auto& p : search.points) {
    PointRow r{"numeric", p, {}, {}, false, {}};
    try {
      r.D = ddp_integral(m, p).value;
    } catch (const PathRefinementError& e) {
      r.D = cplx{std::nan(""), std::nan("")};
      r.stokes_message = e.what();
    }
    r.gamma = gamma_factor(m, p);
    if (!no_stokes && p.index_k == 0) {
      const auto s = stokes_check(m, p.t0);
      r.stokes_ok = s.ok;
      r.stokes_message = s.message;
    }
    rows.push_back(r);
  }
  if (c.family == "gaussian") {
    const GaussianParams g{c.omega0T / c.T, c.deltaT / c.T, c.T};
    for (int k = 0; k <= 2; ++k) {
      const auto [tp, tm] = transition_points_closed(g, k);
      rows.push_back({"closed-form", {tp * c.T, k, PointSign::plus, 0.0}, {}, cplx{k % 2 == 0 ? 1.0 : -1.0}, false, {}});
      rows.push_back({"closed-form", {tm * c.T, k, PointSign::minus, 0.0}, {}, cplx{k % 2 == 0 ? -1.0 : 1.0}, false, {}});
    }
  }

  std::ostringstream os;
  for (const auto& [k, v] : config_entries(c)) os << "# " << k << " = " << v << "\n";
  if (search.no_transition_points()) os << "# no transition points in the search region\n";
  for (const auto& w : search.warnings) os << "# warning: " << w << "\n";
  os << "source,k,sign,re_t0,im_t0,residual,re_D,im_D,re_gamma,im_gamma,stokes_ok,stokes\n";
  for (const auto& r : rows) {
    const bool closed = r.source == "closed-form";
    os << r.source << "," << r.point.index_k << "," << to_string(r.point.sign) << "," << format_double(r.point.t0.real())
       << "," << format_double(r.point.t0.imag()) << "," << (closed ? "" : format_double(r.point.residual)) << ","
       << (closed ? "" : format_double(r.D.real())) << "," << (closed ? "" : format_double(r.D.imag())) << ","
       << format_double(r.gamma.real()) << "," << format_double(r.gamma.imag()) << ","
       << (closed || r.point.index_k != 0 || no_stokes ? "" : (r.stokes_ok ? "yes" : "no")) << ","
       << (r.stokes_message.empty() ? "" : "\"" + r.stokes_message + "\"") << "\n";
  }
  if (c.out.empty() || c.out == "-") std::cout << os.str();
  else write_text(c.out, os.str());

  if (!c.json.empty()) {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : config_entries(c)) j["config"][k] = v;
    j["no_transition_points"] = search.no_transition_points();
    j["warnings"] = search.warnings;
    j["points"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json o;
      o["source"] = r.source;
      o["k"] = r.point.index_k;
      o["sign"] = to_string(r.point.sign);
      o["t0"] = {r.point.t0.real(), r.point.t0.imag()};
      o["gamma"] = {r.gamma.real(), r.gamma.imag()};
      if (r.source != "closed-form") {
        o["residual"] = r.point.residual;
        o["D"] = {r.D.real(), r.D.imag()};
        if (r.point.index_k == 0 && !no_stokes) o["stokes_ok"] = r.stokes_ok;
      }
      j["points"].push_back(o);
    }
    write_text(c.json, j.dump(2) + "\n");
  }
  return kOk;
}

std::vector<int> parse_checks(const std::string& s) {
  std::vector<int> ids;
  if (s == "none") return ids;
  if (s == "all") {
    for (int i = 1; i <= kCheckCount; ++i) ids.push_back(i);
    return ids;
  }
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      ids.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError("--checks expects all, none or a comma list of numbers");
    }
    if (ids.back() < 1 || ids.back() > kCheckCount) throw ConfigError("no check numbered " + item);
  }
  return ids;
}

int cmd_compare(const CommonArgs& args, const std::string& checks, std::optional<double> max_deviation) {
  bool violated = false;
  for (const int id : parse_checks(checks)) {
    const CheckResult r = run_check(id);
    std::printf("[%s] %2d %s: %s\n", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(), r.detail.c_str());
    std::fflush(stdout);
    violated = violated || !r.passed;
  }

  const bool audit = !args.config.empty() || args.overrides.count("family");
  if (audit) {
    const SweepConfig c = resolve(args);
    const auto rows = run_sweep(c);
    std::map<std::string, double> dev;
    double drift = 0.0;
    std::size_t errors = 0;
    for (const auto& r : rows) {
      if (!r.error.empty()) ++errors;
      if (r.norm_drift) drift = std::max(drift, *r.norm_drift);
      if (!r.p_adiabatic_ode) continue;
      const auto upd = [&](const char* name, const std::optional<double>& v) {
        if (v) dev[name] = std::max(dev[name], std::abs(*v - *r.p_adiabatic_ode));
      };
      upd("ddp-sech", r.p_ddp_sech);
      upd("ddp-two-point", r.p_ddp_two_point);
      upd("ddp-generic", r.p_ddp_generic);
      upd("series", r.p_ddp_series);
    }
    std::printf("sweep audit: family %s, %zu rows, %zu with errors\n", c.family.c_str(), rows.size(), errors);
    const bool drift_ok = drift <= 10.0 * c.rel_tol;
    std::printf("  max norm drift %.3e (limit %.3e)%s\n", drift, 10.0 * c.rel_tol, drift_ok ? "" : "  VIOLATION");
    violated = violated || !drift_ok || errors > 0;
    for (const auto& [name, d] : dev) {
      const bool ok = !max_deviation || d <= *max_deviation;
      std::printf("  max |P_%s - P_ode| = %.3e%s\n", name.c_str(), d, ok ? "" : "  VIOLATION");
      violated = violated || !ok;
    }
  }
  return violated ? kViolation : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-state transition probabilities: ODE, DDP and Gaussian closed forms"};
  app.require_subcommand(1);

  CommonArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "parameter sweep to CSV (and JSON)");
  add_common(sweep, sweep_args);

  CommonArgs points_args;
  int max_points = 64;
  bool no_stokes = false;
  auto* points = app.add_subcommand("points", "transition points, D integrals, Gamma factors, Stokes check");
  add_common(points, points_args);
  points->add_option("--max-points", max_points, "cap on listed points");
  points->add_flag("--no-stokes", no_stokes, "skip level-line tracing");

  CommonArgs compare_args;
  std::string checks = "all";
  std::optional<double> max_deviation;
  auto* compare = app.add_subcommand("compare", "acceptance comparisons and sweep audit");
  add_common(compare, compare_args);
  compare->add_option("--checks", checks, "all, none, or comma list of check numbers");
  compare->add_option("--max-deviation", max_deviation, "fail the audit if any |P_method - P_ode| exceeds this");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*sweep) return cmd_sweep(sweep_args);
    if (*points) return cmd_points(points_args, max_points, no_stokes);
    return cmd_compare(compare_args, checks, max_deviation);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  }
}

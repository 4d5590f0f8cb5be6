#include "qkd/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qkd/arrival_model.hpp"
#include "qkd/detail/bits.hpp"
#include "qkd/detail/parallel.hpp"
#include "qkd/errors.hpp"
#include "qkd/oracle.hpp"
#include "qkd/rates.hpp"

namespace qkd::cli {

namespace {

constexpr double kVerifyTolerance = 1e-10;
constexpr int kVerifyMaxN = 16;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Scheme parse_scheme_or_throw(const std::string& name) {
  const auto s = parse_scheme(name);
  if (!s) {
    throw UsageError("unknown scheme '" + name + "' (expected sb, ab, aab, af)");
  }
  return *s;
}

std::vector<double> parse_grid(const std::string& spec) {
  double start = 0.0, stop = 0.0, step = 0.0;
  char extra = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf%c", &start, &stop, &step, &extra) != 3) {
    throw UsageError("p grid must be start:stop:step, got '" + spec + "'");
  }
  if (!(start > 0.0 && stop < 1.0 && start <= stop && step > 0.0)) {
    throw UsageError("p grid must satisfy 0 < start <= stop < 1 and step > 0");
  }
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double p = start + i * step;
    if (p > stop + step * 1e-9) break;
    grid.push_back(p);
  }
  return grid;
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// ---------------------------------------------------------------- rate ----

struct RateArgs {
  std::vector<std::string> schemes;
  std::vector<int> ns{8, 16, 64};
  std::vector<int> ks{1};
  std::string grid_spec = "0.01:0.99:0.01";
  std::vector<double> ps;
  double unit_seconds = 1e-11;
  double channel_seconds = 0.0;
  std::string out_path;
  std::string format = "csv";
};

int cmd_rate(const RateArgs& args, std::ostream& out, std::ostream& err) {
  if (args.schemes.empty()) {
    throw UsageError("at least one --scheme is required");
  }
  std::set<Scheme> schemes;
  for (const auto& name : args.schemes) schemes.insert(parse_scheme_or_throw(name));

  std::vector<double> grid = args.ps;
  if (grid.empty()) {
    grid = parse_grid(args.grid_spec);
  } else {
    for (double p : grid) {
      if (!(p > 0.0 && p < 1.0)) throw UsageError("--p values must lie strictly in (0, 1)");
    }
    std::sort(grid.begin(), grid.end());
  }

  const std::vector<int> ns = sorted_unique(args.ns);
  const std::vector<int> ks = sorted_unique(args.ks);
  for (int n : ns) {
    if (n < 2 || !detail::is_pow2(n)) {
      throw UsageError("--n values must be powers of two >= 2");
    }
    if (schemes.count(Scheme::AdaptiveBinning) && n < 4) {
      throw UsageError("adaptive binning needs n >= 4");
    }
  }
  for (int k : ks) {
    if (k < 1 || !detail::is_pow2(k)) {
      throw UsageError("--k values must be powers of two >= 1");
    }
  }

  // Deterministic row order: scheme, n, k, p ascending.
  std::vector<RateCurvePoint> rows;
  for (Scheme scheme : schemes) {
    for (int n : ns) {
      std::vector<std::optional<int>> k_choices;
      if (scheme == Scheme::SimpleBinning) {
        for (int k : ks) {
          if (k <= n) k_choices.emplace_back(k);
        }
        if (k_choices.empty()) continue;
      } else {
        k_choices.emplace_back(std::nullopt);
      }
      for (const auto& k : k_choices) {
        for (double p : grid) {
          rows.push_back({scheme, n, k, p, 0.0, 0.0, 0.0});
        }
      }
    }
  }
  if (rows.empty()) {
    throw UsageError("no valid (scheme, n, k) combination selected");
  }

  detail::parallel_for(rows.size(), [&](std::uint64_t i) {
    RateCurvePoint& row = rows[i];
    row.raw_rate = scheme_rate(row.scheme, row.p, row.n, row.k);
    row.utilization = utilization(row.raw_rate, row.p);
    const TimingParams timing{args.unit_seconds, needs_public_channel(row.scheme)
                                                     ? args.channel_seconds
                                                     : 0.0};
    row.effective_rate = effective_rate(row.raw_rate, row.n, timing);
  });

  std::ostringstream doc;
  if (args.format == "csv") {
    doc << "scheme,n,k,p,raw_rate,utilization,effective_rate\n";
    for (const auto& row : rows) {
      doc << to_string(row.scheme) << ',' << row.n << ',';
      if (row.k) doc << *row.k;
      doc << ',' << fmt_g(row.p) << ',' << fmt_g(row.raw_rate) << ','
          << fmt_g(row.utilization) << ',' << fmt_g(row.effective_rate) << '\n';
    }
  } else if (args.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
      nlohmann::json obj = {{"scheme", to_string(row.scheme)}, {"n", row.n},
                            {"p", row.p},                      {"raw_rate", row.raw_rate},
                            {"utilization", row.utilization},  {"effective_rate", row.effective_rate}};
      if (row.k) obj["k"] = *row.k;
      arr.push_back(obj);
    }
    doc << arr.dump(2) << '\n';
  } else {
    throw UsageError("--format must be csv or json");
  }

  if (args.out_path.empty()) {
    out << doc.str();
  } else {
    std::ofstream file(args.out_path, std::ios::binary);
    if (!file) throw UsageError("cannot open output file '" + args.out_path + "'");
    file << doc.str();
    err << "wrote " << rows.size() << " rows to " << args.out_path << "\n";
  }
  return kExitOk;
}

// -------------------------------------------------------------- verify ----

void append_compositions(int total, int parts, std::vector<int>& prefix,
                         const std::function<void(const std::vector<int>&)>& visit) {
  if (parts == 1) {
    prefix.push_back(total);
    visit(prefix);
    prefix.pop_back();
    return;
  }
  for (int first = 1; first <= total - parts + 1; ++first) {
    prefix.push_back(first);
    append_compositions(total - first, parts - 1, prefix, visit);
    prefix.pop_back();
  }
}

int cmd_verify(std::vector<int> ns, const std::string& grid_spec, std::ostream& out,
               std::ostream& err) {
  ns = sorted_unique(ns);
  for (int n : ns) {
    if (n > kVerifyMaxN) {
      err << "refusing to enumerate 2^" << n << " frames: the verification budget caps n at "
          << kVerifyMaxN << "\n";
      return kExitBudget;
    }
    if (n < 4 || !detail::is_pow2(n)) {
      throw UsageError("verify needs power-of-two n in [4, 16]");
    }
  }
  const std::vector<double> grid = parse_grid(grid_spec);

  bool all_pass = true;
  out << "formula vs exhaustive enumeration (tolerance " << fmt_g(kVerifyTolerance) << ")\n";
  for (int n : ns) {
    struct Check {
      Scheme scheme;
      std::optional<int> k;
    };
    std::vector<Check> checks;
    for (int k = 1; k <= n; k *= 2) checks.push_back({Scheme::SimpleBinning, k});
    checks.push_back({Scheme::AdaptiveBinning, std::nullopt});
    checks.push_back({Scheme::AdaptiveAggregated, std::nullopt});
    checks.push_back({Scheme::AdaptiveFraming, std::nullopt});

    for (const auto& check : checks) {
      const EnumerationProfile prof = enumerate_profile(check.scheme, n, check.k);
      double worst = 0.0;
      for (double p : grid) {
        const double analytic = scheme_rate(check.scheme, p, n, check.k);
        worst = std::max(worst, std::abs(analytic - prof.rate(p)));
      }
      const bool pass = worst <= kVerifyTolerance;
      all_pass = all_pass && pass;
      out << "  " << to_string(check.scheme) << " n=" << n;
      if (check.k) out << " k=" << *check.k;
      out << "  max|diff|=" << fmt_g(worst) << (pass ? "  PASS" : "  FAIL") << "\n";
    }
  }

  // Balanced-partition bound, exhaustive over compositions of n <= 12.
  std::uint64_t cases = 0;
  bool bound_ok = true;
  bool equality_ok = true;
  for (int n = 1; n <= 12; ++n) {
    for (int g = 1; g <= n; ++g) {
      const int m = n / g;
      std::vector<int> prefix;
      append_compositions(n, g, prefix, [&](const std::vector<int>& sizes) {
        ++cases;
        if (!partition_bound_check(n, g, sizes)) bound_ok = false;
        double lhs = 0.0;
        for (int d : sizes) lhs += std::log2(static_cast<double>(d));
        const double rhs = balanced_partition_bits(n, g);
        const bool balanced = std::all_of(sizes.begin(), sizes.end(),
                                          [&](int d) { return d == m || d == m + 1; });
        if (balanced != (std::abs(lhs - rhs) <= 1e-9)) equality_ok = false;
      });
    }
  }
  out << "partition bound over " << cases << " compositions (n <= 12): "
      << (bound_ok ? "PASS" : "FAIL") << "\n";
  out << "bound equality exactly at balanced splits: " << (equality_ok ? "PASS" : "FAIL")
      << "\n";
  all_pass = all_pass && bound_ok && equality_ok;

  out << "verify: " << (all_pass ? "PASS" : "FAIL") << "\n";
  return all_pass ? kExitOk : kExitCheckFailed;
}

// ------------------------------------------------------------ simulate ----

int cmd_simulate(const std::string& scheme_name, int n, std::optional<int> k, double p,
                 std::uint64_t trials, std::uint64_t seed, const std::string& format,
                 std::ostream& out) {
  const Scheme scheme = parse_scheme_or_throw(scheme_name);
  if (trials == 0) {
    throw UsageError("--trials must be >= 1");
  }
  if (scheme == Scheme::SimpleBinning && !k) {
    throw UsageError("simple binning needs --k");
  }

  const MonteCarloEstimate mc = monte_carlo_rate(scheme, p, n, k, trials, seed);
  const double analytic = scheme_rate(scheme, p, n, k);
  double z = 0.0;
  if (mc.standard_error > 0.0) {
    z = (mc.mean_bits_per_unit - analytic) / mc.standard_error;
  } else if (mc.mean_bits_per_unit != analytic) {
    z = std::numeric_limits<double>::infinity();
  }

  if (format == "json") {
    nlohmann::json doc = {{"scheme", scheme_name},
                          {"n", n},
                          {"p", p},
                          {"trials", trials},
                          {"seed", seed},
                          {"monte_carlo", mc.mean_bits_per_unit},
                          {"standard_error", mc.standard_error},
                          {"analytic", analytic},
                          {"z", z}};
    if (k) doc["k"] = *k;
    out << doc.dump(2) << '\n';
  } else {
    out << "scheme " << scheme_name << " n=" << n;
    if (k) out << " k=" << *k;
    out << " p=" << fmt_g(p) << " trials=" << trials << " seed=" << seed << "\n";
    out << "monte_carlo " << fmt_g(mc.mean_bits_per_unit) << "  (se " << fmt_g(mc.standard_error)
        << ")\n";
    out << "analytic    " << fmt_g(analytic) << "\n";
    out << "z           " << fmt_g(z) << "\n";
  }
  return std::abs(z) > 5.0 ? kExitCheckFailed : kExitOk;
}

// ------------------------------------------------------------- session ----

int cmd_session(const std::string& config_path, const std::string& out_path, std::ostream& out,
                std::ostream& err) {
  std::ifstream file(config_path);
  if (!file) {
    throw UsageError("cannot open config file '" + config_path + "'");
  }
  SessionConfig config = parse_session_config(file);
  if (!needs_public_channel(config.scheme) && config.timing.channel_seconds > 0.0) {
    err << "warning: field 'D' ignored: " << to_string(config.scheme)
        << " uses no public channel\n";
    config.timing.channel_seconds = 0.0;
  }

  const SessionReport report = run_session(config);
  const std::string doc = session_report_json(config, report);
  if (out_path.empty()) {
    out << doc << '\n';
  } else {
    std::ofstream outfile(out_path, std::ios::binary);
    if (!outfile) throw UsageError("cannot open output file '" + out_path + "'");
    outfile << doc << '\n';
    err << "report written to " << out_path << "\n";
  }
  if (!report.keys_agree) {
    err << "key mismatch between Alice and Bob\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

}  // namespace

SessionConfig parse_session_config(std::istream& in) {
  std::map<std::string, std::string> fields;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    }
    if (!fields.emplace(key, value).second) {
      throw ConfigError("field '" + key + "' given twice");
    }
  }

  const std::set<std::string> known{"scheme", "n", "k", "p", "frames", "seed", "T", "D"};
  for (const auto& [key, value] : fields) {
    if (!known.count(key)) {
      throw ConfigError("unknown field '" + key + "'");
    }
  }
  auto require = [&](const std::string& key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError("missing field '" + key + "'");
    return it->second;
  };
  auto to_double = [](const std::string& key, const std::string& value) {
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument{""};
      return v;
    } catch (const std::exception&) {
      throw ConfigError("field '" + key + "': '" + value + "' is not a number");
    }
  };
  auto to_u64 = [](const std::string& key, const std::string& value) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(value, &used);
      if (used != value.size()) throw std::invalid_argument{""};
      return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
      throw ConfigError("field '" + key + "': '" + value + "' is not a nonnegative integer");
    }
  };

  SessionConfig config;
  const auto scheme = parse_scheme(require("scheme"));
  if (!scheme) {
    throw ConfigError("field 'scheme': expected sb, ab, aab or af");
  }
  config.scheme = *scheme;
  config.n = static_cast<int>(to_u64("n", require("n")));
  if (config.n < 2 || !detail::is_pow2(config.n)) {
    throw ConfigError("field 'n': must be a power of two >= 2");
  }
  config.p = to_double("p", require("p"));
  if (!(config.p >= 0.0 && config.p <= 1.0)) {
    throw ConfigError("field 'p': must be in [0, 1]");
  }
  config.frame_count = to_u64("frames", require("frames"));
  if (config.frame_count < 1) {
    throw ConfigError("field 'frames': must be >= 1");
  }
  if (config.scheme == Scheme::SimpleBinning) {
    config.k = static_cast<int>(to_u64("k", require("k")));
    if (*config.k < 1 || *config.k > config.n || !detail::is_pow2(*config.k)) {
      throw ConfigError("field 'k': must be a power of two dividing n");
    }
  } else if (fields.count("k")) {
    throw ConfigError("field 'k': only valid for scheme sb");
  }
  if (fields.count("seed")) config.master_seed = to_u64("seed", fields.at("seed"));
  if (fields.count("T")) config.timing.unit_seconds = to_double("T", fields.at("T"));
  if (fields.count("D")) config.timing.channel_seconds = to_double("D", fields.at("D"));
  if (!(config.timing.unit_seconds > 0.0)) {
    throw ConfigError("field 'T': must be > 0");
  }
  if (config.timing.channel_seconds < 0.0) {
    throw ConfigError("field 'D': must be >= 0");
  }
  return config;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"raw-key encoding toolkit for energy-time entanglement QKD"};
  app.require_subcommand(1);

  RateArgs rate_args;
  auto* rate = app.add_subcommand("rate", "closed-form rate sweep (CSV or JSON)");
  rate->add_option("--scheme", rate_args.schemes, "schemes: sb ab aab af")->delimiter(',');
  rate->add_option("--n", rate_args.ns, "frame lengths (default 8 16 64)")->delimiter(',');
  rate->add_option("--k", rate_args.ks, "bin sizes for sb (default 1)")->delimiter(',');
  rate->add_option("--p-grid", rate_args.grid_spec, "p sweep as start:stop:step");
  rate->add_option("--p", rate_args.ps, "explicit p values instead of a grid")->delimiter(',');
  rate->add_option("--T", rate_args.unit_seconds, "seconds per time unit (default 1e-11)");
  rate->add_option("--D", rate_args.channel_seconds, "public channel seconds per window");
  rate->add_option("--out", rate_args.out_path, "output file (default stdout)");
  rate->add_option("--format", rate_args.format, "csv or json");

  std::vector<int> verify_ns{4, 8, 16};
  std::string verify_grid = "0.05:0.95:0.05";
  auto* verify = app.add_subcommand("verify", "formula vs enumeration + partition bounds");
  verify->add_option("--n", verify_ns, "frame lengths to enumerate (max 16)")->delimiter(',');
  verify->add_option("--p-grid", verify_grid, "p sweep as start:stop:step");

  std::string sim_scheme;
  int sim_n = 8;
  int sim_k = 0;
  double sim_p = 0.1;
  std::uint64_t sim_trials = 1000000;
  std::uint64_t sim_seed = 0;
  std::string sim_format = "text";
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo vs analytic rate");
  simulate->add_option("--scheme", sim_scheme)->required();
  simulate->add_option("--n", sim_n);
  simulate->add_option("--k", sim_k, "bin size (sb only)");
  simulate->add_option("--p", sim_p);
  simulate->add_option("--trials", sim_trials);
  simulate->add_option("--seed", sim_seed);
  simulate->add_option("--format", sim_format, "text or json");

  std::string session_config;
  std::string session_out;
  auto* session = app.add_subcommand("session", "paired Alice/Bob run from a config file");
  session->add_option("--config", session_config)->required();
  session->add_option("--out", session_out, "report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(rate)) {
      return cmd_rate(rate_args, out, err);
    }
    if (app.got_subcommand(verify)) {
      return cmd_verify(verify_ns, verify_grid, out, err);
    }
    if (app.got_subcommand(simulate)) {
      std::optional<int> k;
      if (sim_k > 0) k = sim_k;
      return cmd_simulate(sim_scheme, sim_n, k, sim_p, sim_trials, sim_seed, sim_format, out);
    }
    if (app.got_subcommand(session)) {
      return cmd_session(session_config, session_out, out, err);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const BudgetError& e) {
    err << "refused: " << e.what() << "\n";
    return kExitBudget;
  }
  return kExitUsage;
}

}  // namespace qkd::cli

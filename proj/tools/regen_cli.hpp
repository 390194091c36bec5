#pragma once

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <map>
#include <optional>
#include <type_traits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include <regen/error.hpp>
#include <regen/idprocess.hpp>
#include <regen/intersectlaw.hpp>
#include <regen/parallel.hpp>
#include <regen/randkit.hpp>
#include <regen/renewalkit.hpp>
#include <regen/stablesets.hpp>
#include <regen/stats.hpp>
#include <regen/supmeasure.hpp>
#include <regen/verify.hpp>

namespace regen::cli {

using randkit::RngStream;
using stablesets::GridIndex;

using Cell = std::variant<std::monostate, bool, std::int64_t, std::uint64_t, double, std::string,
                          std::vector<double>, std::vector<std::string>>;
using Field = std::pair<std::string, Cell>;

struct Envelope {
  std::string command;
  std::vector<Field> config;
  std::uint64_t seed = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<Field> diagnostics;
  std::optional<double> wall_clock_seconds;
};

enum ExitCode : int { kOk = 0, kInternal = 1, kValidation = 2 };

// ---- serialization ----

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

// Non-finite doubles have no JSON literal; they are written as strings.
inline std::string json_number(double v) {
  return std::isfinite(v) ? format_number(v) : json_string(format_number(v));
}

inline std::string json_cell(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return "null"; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return json_number(v); }
    std::string operator()(const std::string& s) const { return json_string(s); }
    std::string operator()(const std::vector<double>& v) const {
      std::string out = "[";
      for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + json_number(v[i]);
      return out + "]";
    }
    std::string operator()(const std::vector<std::string>& v) const {
      std::string out = "[";
      for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + json_string(v[i]);
      return out + "]";
    }
  };
  return std::visit(V{}, c);
}

inline std::string csv_cell(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string out = "\"";
      for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return out + "\"";
    }
    std::string operator()(const std::vector<double>&) const { return ""; }
    std::string operator()(const std::vector<std::string>&) const { return ""; }
  };
  return std::visit(V{}, c);
}

inline void write_fields(std::ostream& os, const std::vector<Field>& fields, const char* indent) {
  os << "{";
  for (std::size_t i = 0; i < fields.size(); ++i)
    os << (i ? ",\n" : "\n") << indent << "  " << json_string(fields[i].first) << ": " << json_cell(fields[i].second);
  os << (fields.empty() ? "}" : std::string("\n") + indent + "}");
}

inline void write_json(const Envelope& env, std::ostream& os) {
  os << "{\n  \"command\": " << json_string(env.command) << ",\n  \"config\": ";
  write_fields(os, env.config, "  ");
  os << ",\n  \"seed\": " << env.seed << ",\n  \"columns\": [";
  for (std::size_t i = 0; i < env.columns.size(); ++i) os << (i ? ", " : "") << json_string(env.columns[i]);
  os << "],\n  \"rows\": [";
  for (std::size_t r = 0; r < env.rows.size(); ++r) {
    os << (r ? ",\n    [" : "\n    [");
    for (std::size_t i = 0; i < env.rows[r].size(); ++i) os << (i ? ", " : "") << json_cell(env.rows[r][i]);
    os << "]";
  }
  os << (env.rows.empty() ? "]" : "\n  ]") << ",\n  \"diagnostics\": ";
  write_fields(os, env.diagnostics, "  ");
  if (env.wall_clock_seconds) os << ",\n  \"wall_clock_seconds\": " << json_number(*env.wall_clock_seconds);
  os << "\n}\n";
}

inline void write_csv(const Envelope& env, std::ostream& os) {
  for (std::size_t i = 0; i < env.columns.size(); ++i) os << (i ? "," : "") << env.columns[i];
  os << "\n";
  for (const auto& row : env.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << "\n";
  }
}

// path "-" writes to stdout. Throws std::runtime_error on I/O failure.
inline void write_envelope(const Envelope& env, const std::string& format, const std::string& path) {
  std::ostringstream ss;
  if (format == "csv")
    write_csv(env, ss);
  else
    write_json(env, ss);
  if (path == "-" || path.empty()) {
    std::cout << ss.str() << std::flush;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << ss.str();
  f.close();
  if (!f) throw std::runtime_error("write failed: " + path);
}

// ---- option registry ----

struct Registry {
  std::vector<std::function<Field()>> dump;

  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& flag, T& ref, const std::string& help) {
    std::string key = flag.substr(2);
    std::replace(key.begin(), key.end(), '-', '_');
    dump.push_back([key, &ref] { return Field{key, to_cell(ref)}; });
    auto* o = app->add_option(flag, ref, help)->capture_default_str();
    if constexpr (std::is_integral_v<T> || std::is_same_v<T, std::vector<std::int64_t>>) o->transform(CLI::Validator(integer_text, "INT"));
    return o;
  }

  // Integer flags also accept exact scientific notation such as 1e5.
  static std::string integer_text(std::string& s) {
    if (s.find_first_of("eE.") == std::string::npos) return {};
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      return "not a number: " + s;
    }
    if (used != s.size() || v != std::floor(v) || std::fabs(v) > 9.0e15) return "not an integer: " + s;
    s = std::to_string(std::int64_t(v));
    return {};
  }

  std::vector<Field> config() const {
    std::vector<Field> out;
    for (const auto& d : dump) out.push_back(d());
    return out;
  }

  static Cell to_cell(double v) { return v; }
  static Cell to_cell(std::int64_t v) { return v; }
  static Cell to_cell(std::uint64_t v) { return v; }
  static Cell to_cell(int v) { return std::int64_t(v); }
  static Cell to_cell(const std::string& v) { return v; }
  static Cell to_cell(const std::vector<double>& v) { return v; }
  static Cell to_cell(const std::vector<std::string>& v) { return v; }
  static Cell to_cell(const std::vector<std::int64_t>& v) {
    std::vector<double> d(v.begin(), v.end());
    return d;
  }
};

// Parses "lo:hi".
inline supmeasure::OpenInterval parse_interval(const std::string& s) {
  const auto colon = s.find(':');
  detail::require(colon != std::string::npos, "interval must be written lo:hi, got '" + s + "'");
  try {
    return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ValidationError("interval must be written lo:hi, got '" + s + "'");
  }
}

inline std::size_t as_count(std::int64_t v, const char* name) {
  detail::require(v >= 1, std::string(name) + " must be >= 1");
  return std::size_t(v);
}

// ---- the application ----

struct Shared {
  std::uint64_t seed = 7;
  unsigned threads = default_threads();
  std::string out = "-";
  std::string format = "json";
};

using Command = std::function<Envelope()>;

inline Cell num(double v) { return v; }
inline Cell num(std::int64_t v) { return v; }

class App {
public:
  App() : app_("Regenerative-set sup-measure simulation harness", "regen") {
    app_.require_subcommand(1);
    app_.fallthrough();
    app_.add_option("--seed", sh_.seed, "Master seed (env REGEN_SEED when the flag is absent)")
        ->envname("REGEN_SEED")
        ->capture_default_str();
    app_.add_option("--threads", sh_.threads, "Worker threads; output does not depend on it")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app_.add_option("--out", sh_.out, "Output path, - for stdout")->capture_default_str();
    app_.add_option("--format", sh_.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    build();
  }

  int run(int argc, const char* const* argv, std::ostream& err = std::cerr) {
    try {
      app_.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      std::cout << app_.help();
      return kOk;
    } catch (const CLI::CallForAllHelp&) {
      std::cout << app_.help("", CLI::AppFormatMode::All);
      return kOk;
    } catch (const CLI::ParseError& e) {
      err << "validation error: " << e.what() << "\n";
      return kValidation;
    }
    const std::string name = app_.get_subcommands().front()->get_name();
    try {
      const auto t0 = std::chrono::steady_clock::now();
      Envelope env = commands_.at(name)();
      env.command = name;
      env.seed = sh_.seed;
      env.config = registries_.at(name).config();
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      // verify output must be byte-reproducible, so its duration goes to stderr only.
      if (name == "verify")
        err << "wall clock: " << format_number(secs) << " s\n";
      else
        env.wall_clock_seconds = secs;
      write_envelope(env, sh_.format, sh_.out);
      if (name == "verify" && verify_failed_) return kInternal;
      return kOk;
    } catch (const ValidationError& e) {
      err << "validation error: " << e.what() << "\n";
      return kValidation;
    } catch (const std::exception& e) {
      err << "internal error: " << e.what() << "\n";
      return kInternal;
    }
  }

private:
  CLI::App* sub(const std::string& name, const std::string& help) {
    auto* s = app_.add_subcommand(name, help);
    registries_[name];
    return s;
  }

  template <class T>
  CLI::Option* opt(const std::string& cmd, CLI::App* s, const std::string& flag, T& ref, const std::string& help) {
    return registries_[cmd].add(s, flag, ref, help);
  }

  void build();

  CLI::App app_;
  Shared sh_;
  std::map<std::string, Registry> registries_;
  std::map<std::string, Command> commands_;
  bool verify_failed_ = false;

  // Parameters. Each command reads only the ones it registers.
  struct {
    double x = 1.0, beta = 0.7;
    std::int64_t reps = 100000;
  } overshoot_;
  struct {
    std::vector<double> x = {1.0};
    double a = 1.0, beta1 = 0.75, beta2 = 0.75, quad_tol = 1e-10;
  } icdf_;
  struct {
    double a = 1.0, beta1 = 0.75, beta2 = 0.75, rel_tol = 1e-9, quad_tol = 1e-10;
    std::int64_t reps = 100000;
  } isample_;
  struct {
    double beta = 0.8;
    std::int64_t resolution = 10000, reps = 10000;
  } shift_;
  struct {
    std::vector<double> beta = {0.5};
    double quad_tol = 1e-12;
  } phi_;
  struct {
    double alpha = 1.0, beta = 0.7, window = 1.0;
    std::int64_t trunc = 64, resolution = 10000;
  } eta_;
  struct {
    double alpha = 1.0, beta = 0.6;
    std::vector<double> x = {5.0, 10.0, 25.0, 50.0};
    std::int64_t trunc = 64, resolution = 10000, reps = 10000;
  } tail_;
  struct {
    double alpha = 1.0, beta = 0.7, scale = 0.5;
    std::int64_t trunc = 64, resolution = 10000, reps = 10000;
  } self_;
  struct {
    double alpha = 1.0, beta = 0.7, t0 = 0.5, s = 0.5, window = 0.0;
    std::int64_t trunc = 64, resolution = 10000, reps = 10000;
  } stat_;
  struct {
    double alpha = 0.5;
    std::vector<double> beta_grid = {0.3, 0.5, 0.8, 0.95};
    std::int64_t trunc = 64, resolution = 10000, reps = 10000, stable_terms = 4096;
  } interp_;
  struct {
    double alpha = 1.0, beta = 0.7, a = 1.0, z0 = 1.0;
    std::int64_t n = 1000, trunc = 64;
  } proc_;
  struct {
    double alpha = 1.0, beta = 0.7, a = 1.0, z0 = 1.0;
    std::vector<std::int64_t> n = {100, 1000, 10000};
    std::vector<std::string> intervals = {"0:1"};
    std::int64_t trunc = 64, resolution = 10000, reps = 1000;
  } limit_;
  struct {
    std::vector<double> beta = {0.6, 0.8};
    double beta1 = 0.8, beta2 = 0.8;
    std::int64_t n = 100000;
  } renewal_;
  struct {
    double beta1 = 0.75, beta2 = 0.75, a = 0.3;
    std::int64_t n = 2000;
    std::vector<double> x = {0.5, 1.0, 2.0};
  } dp_;
  struct {
    std::vector<std::int64_t> criteria;
  } verify_;
};

inline void App::build() {
  using namespace regen;
  {
    auto* s = sub("sample-overshoot", "Draw overshoots B_{x,beta} and test them against the analytic CDF");
    auto& p = overshoot_;
    opt("sample-overshoot", s, "--x", p.x, "Level x > 0");
    opt("sample-overshoot", s, "--beta", p.beta, "Stability index in (0,1)");
    opt("sample-overshoot", s, "--reps", p.reps, "Number of draws");
    commands_["sample-overshoot"] = [this, &p] {
      stablesets::OvershootLaw{p.x, p.beta}.validate();
      const std::size_t reps = as_count(p.reps, "reps");
      RngStream rng(sh_.seed, 0);
      Envelope env;
      env.columns = {"index", "value"};
      std::vector<double> s(reps);
      for (std::size_t i = 0; i < reps; ++i) {
        s[i] = stablesets::sample_overshoot(rng, p.x, p.beta);
        env.rows.push_back({std::int64_t(i), s[i]});
      }
      const double ks = stats::ks_one_sample(stats::ecdf(std::move(s)), [&](double b) {
        return b > 0.0 ? stablesets::overshoot_cdf(b, p.x, p.beta) : 0.0;
      });
      env.diagnostics = {{"ks_vs_cdf", ks}, {"ks_threshold_99", stats::ks_critical_one_sample(reps)}};
      return env;
    };
  }
  {
    auto* s = sub("intersection-cdf", "First-intersection CDF P(D <= x | a)");
    auto& p = icdf_;
    opt("intersection-cdf", s, "--x", p.x, "Evaluation points x > 0")->delimiter(',');
    opt("intersection-cdf", s, "--a", p.a, "Shift a > 0");
    opt("intersection-cdf", s, "--beta1", p.beta1, "First index in (0,1)");
    opt("intersection-cdf", s, "--beta2", p.beta2, "Second index in (0,1)");
    opt("intersection-cdf", s, "--quad-tol", p.quad_tol, "Absolute quadrature tolerance");
    commands_["intersection-cdf"] = [&p] {
      stablesets::IntersectionSpec{p.a, p.beta1, p.beta2}.validate();
      const QuadratureConfig cfg{p.quad_tol, 15};
      cfg.validate();
      for (double x : p.x) detail::require_positive(x, "x");
      Envelope env;
      env.columns = {"x", "a", "beta1", "beta2", "cdf"};
      for (double x : p.x)
        env.rows.push_back({x, p.a, p.beta1, p.beta2, intersectlaw::intersection_cdf(x, p.a, p.beta1, p.beta2, cfg)});
      return env;
    };
  }
  {
    auto* s = sub("sample-intersection", "Iterated-overshoot samples of the first intersection time");
    auto& p = isample_;
    opt("sample-intersection", s, "--a", p.a, "Shift a > 0");
    opt("sample-intersection", s, "--beta1", p.beta1, "First index in (0,1)");
    opt("sample-intersection", s, "--beta2", p.beta2, "Second index in (0,1)");
    opt("sample-intersection", s, "--reps", p.reps, "Number of draws");
    opt("sample-intersection", s, "--rel-tol", p.rel_tol, "Series truncation tolerance in (0,1)");
    opt("sample-intersection", s, "--quad-tol", p.quad_tol, "Quadrature tolerance of the reference CDF");
    commands_["sample-intersection"] = [this, &p] {
      const stablesets::IntersectionSpec spec{p.a, p.beta1, p.beta2};
      spec.validate();
      detail::require(p.rel_tol > 0.0 && p.rel_tol < 1.0, "rel_tol must lie in (0,1)");
      const QuadratureConfig cfg{p.quad_tol, 15};
      cfg.validate();
      const std::size_t reps = as_count(p.reps, "reps");
      const auto draws = run_replicates<stablesets::FirstIntersection>(reps, sh_.threads, [&](std::size_t r) {
        RngStream rng(sh_.seed, r);
        return stablesets::sample_first_intersection(rng, spec, p.rel_tol);
      });
      Envelope env;
      env.columns = {"index", "value", "deficit", "steps"};
      std::vector<double> v;
      double max_def = 0.0;
      for (std::size_t i = 0; i < reps; ++i) {
        env.rows.push_back({std::int64_t(i), draws[i].value, draws[i].deficit, std::int64_t(draws[i].steps)});
        v.push_back(draws[i].value);
        max_def = std::max(max_def, draws[i].deficit);
      }
      const double ks = stats::ks_one_sample(stats::ecdf(std::move(v)), [&](double x) {
        return x > 0.0 ? intersectlaw::intersection_cdf(x, p.a, p.beta1, p.beta2, cfg) : 0.0;
      });
      env.diagnostics = {{"ks_vs_cdf", ks},
                         {"ks_threshold_99", stats::ks_critical_one_sample(reps)},
                         {"max_truncation_deficit", max_def}};
      return env;
    };
  }
  {
    auto* s = sub("shift-law", "First point of a 2-fold intersection of shifted sets vs the shift law");
    auto& p = shift_;
    opt("shift-law", s, "--beta", p.beta, "Common index in (1/2,1)");
    opt("shift-law", s, "--resolution", p.resolution, "Grid resolution");
    opt("shift-law", s, "--reps", p.reps, "Accepted replicates");
    commands_["shift-law"] = [this, &p] {
      const auto r = supmeasure::shift_law_experiment(p.beta, p.resolution, as_count(p.reps, "reps"), sh_.seed,
                                                      sh_.threads);
      Envelope env;
      env.columns = {"index", "value"};
      for (std::size_t i = 0; i < r.samples.size(); ++i) env.rows.push_back({std::int64_t(i), r.samples[i]});
      env.diagnostics = {{"ks_vs_shift_law", r.ks},
                         {"ks_threshold_99", stats::ks_critical_one_sample(r.samples.size())},
                         {"attempts", std::int64_t(r.attempts)}};
      return env;
    };
  }
  {
    auto* s = sub("phi", "The functional phi(beta)");
    auto& p = phi_;
    opt("phi", s, "--beta", p.beta, "Indices in (0,1)")->delimiter(',');
    opt("phi", s, "--quad-tol", p.quad_tol, "Quadrature tolerance");
    commands_["phi"] = [&p] {
      for (double b : p.beta) detail::require_unit_open(b, "beta");
      detail::require(p.quad_tol > 0.0, "quad_tol must be positive");
      Envelope env;
      env.columns = {"beta", "phi"};
      for (double b : p.beta) env.rows.push_back({b, stablesets::phi(b, p.quad_tol)});
      return env;
    };
  }
  {
    auto* s = sub("simulate-eta", "One truncated realization of eta on the grid");
    auto& p = eta_;
    opt("simulate-eta", s, "--alpha", p.alpha, "Tail index > 0");
    opt("simulate-eta", s, "--beta", p.beta, "Index in (0,1)");
    opt("simulate-eta", s, "--trunc", p.trunc, "Number of series terms");
    opt("simulate-eta", s, "--resolution", p.resolution, "Cells per unit length");
    opt("simulate-eta", s, "--window", p.window, "Window length T in [1,64]");
    commands_["simulate-eta"] = [this, &p] {
      const supmeasure::EtaConfig cfg{p.alpha, p.beta, int(p.trunc), p.resolution, p.window};
      cfg.validate();
      RngStream rng(sh_.seed, 0);
      const supmeasure::EtaRealization eta(rng, cfg);
      Envelope env;
      env.columns = {"k", "t", "eta", "coverage"};
      for (GridIndex k = 0; k < eta.cells(); ++k)
        env.rows.push_back({std::int64_t(k), double(k) / double(p.resolution), eta.eta_value(k),
                            std::int64_t(eta.coverage(k))});
      const auto sup = eta.sup({0.0, 1.0});
      env.diagnostics = {{"eta_unit_interval", sup.value},
                         {"first_weight", eta.weights().front()},
                         {"tail_bound", eta.tail_bound()},
                         {"coincidence_count", std::int64_t(eta.coincidence_count())},
                         {"coincidence_slack", sup.coincidence_slack},
                         {"ell_beta", std::int64_t(eta.ell_beta())}};
      return env;
    };
  }
  {
    auto* s = sub("eta-tail", "x^alpha P(eta((0,1)) > x) with 99% Wilson bands");
    auto& p = tail_;
    opt("eta-tail", s, "--alpha", p.alpha, "Tail index > 0");
    opt("eta-tail", s, "--beta", p.beta, "Index in (0,1)");
    opt("eta-tail", s, "--x", p.x, "Levels x > 0")->delimiter(',');
    opt("eta-tail", s, "--trunc", p.trunc, "Number of series terms");
    opt("eta-tail", s, "--resolution", p.resolution, "Cells per unit length");
    opt("eta-tail", s, "--reps", p.reps, "Replicates (>= 1e4)");
    commands_["eta-tail"] = [this, &p] {
      const supmeasure::EtaConfig cfg{p.alpha, p.beta, int(p.trunc), p.resolution, 1.0};
      const auto t = supmeasure::eta_tail_experiment(cfg, p.x, as_count(p.reps, "reps"), sh_.seed, sh_.threads);
      Envelope env;
      env.columns = {"x", "estimate", "ci_low", "ci_high", "lower_curve", "max_tail_bound", "max_coincidence_slack"};
      for (const auto& r : t.rows)
        env.rows.push_back({r.x, r.estimate, r.ci_low, r.ci_high, r.lower_curve, t.diag.max_tail_bound,
                            t.diag.max_coincidence_slack});
      env.diagnostics = {{"lower_sandwich_violations", std::int64_t(t.diag.lower_violations)},
                         {"upper_sandwich_violations", std::int64_t(t.diag.upper_violations)},
                         {"upper_violations_with_slack", std::int64_t(t.diag.upper_violations_with_slack)},
                         {"replicates_with_coincidence", std::int64_t(t.diag.replicates_with_coincidence)},
                         {"mean_coverage_excess_fraction", t.diag.mean_coverage_excess}};
      return env;
    };
  }
  {
    auto* s = sub("self-similarity", "KS between eta((0,a)) and a^H eta((0,1))");
    auto& p = self_;
    opt("self-similarity", s, "--alpha", p.alpha, "Tail index > 0");
    opt("self-similarity", s, "--beta", p.beta, "Index in (0,1)");
    opt("self-similarity", s, "--scale", p.scale, "Scale a in (0,1]");
    opt("self-similarity", s, "--trunc", p.trunc, "Number of series terms");
    opt("self-similarity", s, "--resolution", p.resolution, "Cells per unit length");
    opt("self-similarity", s, "--reps", p.reps, "Replicates per side (>= 1e4)");
    commands_["self-similarity"] = [this, &p] {
      const supmeasure::EtaConfig cfg{p.alpha, p.beta, int(p.trunc), p.resolution, 1.0};
      const auto r = supmeasure::selfsimilarity_experiment(cfg, p.scale, as_count(p.reps, "reps"), sh_.seed, sh_.threads);
      Envelope env;
      env.columns = {"scale_a", "hurst", "ks", "threshold"};
      env.rows.push_back({p.scale, cfg.hurst(), r.ks, r.threshold});
      return env;
    };
  }
  {
    auto* s = sub("stationarity", "KS between eta((t0,t0+s)) and eta((0,s))");
    auto& p = stat_;
    opt("stationarity", s, "--alpha", p.alpha, "Tail index > 0");
    opt("stationarity", s, "--beta", p.beta, "Index in (0,1)");
    opt("stationarity", s, "--t0", p.t0, "Offset t0 >= 0");
    opt("stationarity", s, "--s", p.s, "Length s > 0");
    opt("stationarity", s, "--window", p.window, "Window T (0 picks the smallest integer >= t0+s)");
    opt("stationarity", s, "--trunc", p.trunc, "Number of series terms");
    opt("stationarity", s, "--resolution", p.resolution, "Cells per unit length");
    opt("stationarity", s, "--reps", p.reps, "Replicates per side (>= 1e4)");
    commands_["stationarity"] = [this, &p] {
      const double window = p.window > 0.0 ? p.window : supmeasure::stationarity_window(p.t0, p.s);
      const supmeasure::EtaConfig cfg{p.alpha, p.beta, int(p.trunc), p.resolution, window};
      const auto r = supmeasure::stationarity_experiment(cfg, p.t0, p.s, as_count(p.reps, "reps"), sh_.seed, sh_.threads);
      Envelope env;
      env.columns = {"t0", "s", "window", "ks", "threshold"};
      env.rows.push_back({p.t0, p.s, window, r.ks, r.threshold});
      return env;
    };
  }
  {
    auto* s = sub("interpolation", "Law of eta((0,1)) across beta against the Frechet and stable endpoints");
    auto& p = interp_;
    opt("interpolation", s, "--alpha", p.alpha, "Tail index in (0,1)");
    opt("interpolation", s, "--beta-grid", p.beta_grid, "Indices in (0,1)")->delimiter(',');
    opt("interpolation", s, "--trunc", p.trunc, "Number of series terms");
    opt("interpolation", s, "--resolution", p.resolution, "Cells per unit length");
    opt("interpolation", s, "--reps", p.reps, "Replicates per beta");
    opt("interpolation", s, "--stable-terms", p.stable_terms, "Series terms of the stable reference");
    commands_["interpolation"] = [this, &p] {
      for (double b : p.beta_grid) detail::require_unit_open(b, "beta");
      const supmeasure::EtaConfig base{p.alpha, p.beta_grid.front(), int(p.trunc), p.resolution, 1.0};
      const auto rows = supmeasure::interpolation_check(base, p.beta_grid, as_count(p.reps, "reps"), sh_.seed,
                                                        sh_.threads, as_count(p.stable_terms, "stable_terms"));
      Envelope env;
      env.columns = {"beta", "ks_frechet", "ks_stable", "median"};
      for (const auto& r : rows) env.rows.push_back({r.beta, r.ks_frechet, r.ks_stable, r.median});
      return env;
    };
  }
  {
    auto* s = sub("simulate-process", "One truncated path X_0..X_n of the series representation");
    auto& p = proc_;
    opt("simulate-process", s, "--alpha", p.alpha, "Tail index > 0");
    opt("simulate-process", s, "--beta", p.beta, "Return-tail index in (0,1)");
    opt("simulate-process", s, "--a", p.a, "Levy tail constant > 0");
    opt("simulate-process", s, "--z0", p.z0, "Levy tail threshold > 0");
    opt("simulate-process", s, "--n", p.n, "Horizon n >= 1");
    opt("simulate-process", s, "--trunc", p.trunc, "Number of series terms");
    commands_["simulate-process"] = [this, &p] {
      const idprocess::LawSpec spec{p.alpha, p.beta, p.a, p.z0};
      spec.validate();
      idprocess::validate_trunc(int(p.trunc), p.beta);
      detail::require(p.n >= 1, "n must be >= 1");
      RngStream rng(sh_.seed, 0);
      const auto path = idprocess::simulate_process(rng, p.n, spec, int(p.trunc));
      std::vector<std::int64_t> cover(path.values.size(), 0);
      for (auto k : path.points) ++cover[std::size_t(k)];
      Envelope env;
      env.columns = {"k", "value", "coverage"};
      for (std::size_t k = 0; k < path.values.size(); ++k) env.rows.push_back({std::int64_t(k), path.values[k], cover[k]});
      env.diagnostics = {{"bn_alpha", path.bn_alpha},
                         {"bn", path.bn},
                         {"sets", std::int64_t(path.set_count())},
                         {"truncation_diag", path.truncation_diag},
                         {"coverage_excess", std::int64_t(idprocess::coverage_excess(path, intersectlaw::ell_beta(p.beta)))}};
      return env;
    };
  }
  {
    auto* s = sub("limit-experiment", "KS between M_n(I)/b_n and a^(1/alpha) eta(I)");
    auto& p = limit_;
    opt("limit-experiment", s, "--alpha", p.alpha, "Tail index > 0");
    opt("limit-experiment", s, "--beta", p.beta, "Return-tail index in (0,1)");
    opt("limit-experiment", s, "--a", p.a, "Levy tail constant > 0");
    opt("limit-experiment", s, "--z0", p.z0, "Levy tail threshold > 0");
    opt("limit-experiment", s, "--n", p.n, "Horizons")->delimiter(',');
    opt("limit-experiment", s, "--intervals", p.intervals, "Intervals lo:hi inside (0,1)")->delimiter(',');
    opt("limit-experiment", s, "--trunc", p.trunc, "Number of series terms, both sides");
    opt("limit-experiment", s, "--resolution", p.resolution, "Resolution of the eta reference");
    opt("limit-experiment", s, "--reps", p.reps, "Replicates per side (>= 1e3)");
    commands_["limit-experiment"] = [this, &p] {
      idprocess::LimitConfig cfg;
      cfg.spec = {p.alpha, p.beta, p.a, p.z0};
      cfg.n_list = p.n;
      cfg.intervals.clear();
      for (const auto& iv : p.intervals) cfg.intervals.push_back(parse_interval(iv));
      cfg.reps = as_count(p.reps, "reps");
      cfg.ell_trunc = int(p.trunc);
      cfg.eta_resolution = p.resolution;
      const auto rows = idprocess::limit_experiment(cfg, sh_.seed, sh_.threads);
      Envelope env;
      env.columns = {"n", "lo", "hi", "ks", "threshold", "max_truncation_diag", "max_eta_tail_bound"};
      for (const auto& r : rows)
        env.rows.push_back({std::int64_t(r.n), r.interval.lo, r.interval.hi, r.ks, r.threshold, r.max_truncation_diag,
                            r.max_eta_tail_bound});
      return env;
    };
  }
  {
    auto* s = sub("renewal-asymptotics", "Exact renewal masses, intersection tail and their asymptotic ratios");
    auto& p = renewal_;
    opt("renewal-asymptotics", s, "--beta", p.beta, "Single-chain indices")->delimiter(',');
    opt("renewal-asymptotics", s, "--beta1", p.beta1, "First chain of the intersection");
    opt("renewal-asymptotics", s, "--beta2", p.beta2, "Second chain of the intersection");
    opt("renewal-asymptotics", s, "--n", p.n, "Horizon n_max");
    commands_["renewal-asymptotics"] = [&p] {
      detail::require(p.n >= 2, "n must be >= 2");
      for (double b : p.beta) detail::require_unit_open(b, "beta");
      const double betas[] = {p.beta1, p.beta2};
      const double bs = intersectlaw::beta_star(betas);
      if (!(bs > 0.0)) throw NonIntersectingRegime("beta1 + beta2 - 1 must be positive");
      const auto n = std::size_t(p.n);
      Envelope env;
      env.columns = {"quantity", "beta1", "beta2", "n", "value", "ratio"};
      for (double b : p.beta) {
        const auto u = renewalkit::renewal_mass_function(renewalkit::RenewalLaw{b}, n);
        env.rows.push_back({std::string("u"), b, std::monostate{}, std::int64_t(n), u[n], renewalkit::renewal_ratio(u[n], b, n)});
        CompensatedSum cum;
        for (double v : u) cum.add(v);
        env.rows.push_back({std::string("U"), b, std::monostate{}, std::int64_t(n), cum.value(),
                            renewalkit::cumulative_renewal_ratio(u, b, n)});
      }
      const std::vector<std::vector<double>> us = {
          renewalkit::renewal_mass_function(renewalkit::RenewalLaw{p.beta1}, n),
          renewalkit::renewal_mass_function(renewalkit::RenewalLaw{p.beta2}, n)};
      const auto ir = renewalkit::intersection_renewal(us);
      double drift = 0.0;
      for (std::size_t k = 0; k <= n; ++k) drift = std::max(drift, std::fabs(ir.cum_p_star[k] + ir.F_bar_star[k] - 1.0));
      env.rows.push_back({std::string("Fbar_star"), p.beta1, p.beta2, std::int64_t(n), ir.F_bar_star[n],
                          renewalkit::intersection_tail_ratio(ir.F_bar_star[n], betas, n)});
      env.rows.push_back({std::string("conservation_error"), p.beta1, p.beta2, std::int64_t(n), drift, std::monostate{}});
      return env;
    };
  }
  {
    auto* s = sub("dp-oracle", "Exact discrete first common renewal against the continuum CDF");
    auto& p = dp_;
    opt("dp-oracle", s, "--beta1", p.beta1, "Index of the chain started at -offset");
    opt("dp-oracle", s, "--beta2", p.beta2, "Index of the chain started at 0");
    opt("dp-oracle", s, "--a", p.a, "Offset as a fraction of n");
    opt("dp-oracle", s, "--n", p.n, "Scale n");
    opt("dp-oracle", s, "--x", p.x, "Evaluation points x > 0 (time x n)")->delimiter(',');
    commands_["dp-oracle"] = [&p] {
      stablesets::IntersectionSpec{p.a, p.beta1, p.beta2}.validate();
      detail::require(p.n >= 1, "n must be >= 1");
      double xmax = 0.0;
      for (double x : p.x) {
        detail::require_positive(x, "x");
        xmax = std::max(xmax, x);
      }
      const auto offset = std::size_t(std::llround(p.a * double(p.n)));
      const auto n_max = std::max<std::size_t>(offset, std::size_t(std::llround(xmax * double(p.n))));
      const auto dp = renewalkit::first_simultaneous_renewal_cdf(renewalkit::RenewalLaw{p.beta1},
                                                                 renewalkit::RenewalLaw{p.beta2}, offset, n_max);
      Envelope env;
      env.columns = {"x", "t", "dp_cdf", "continuum_cdf", "abs_diff"};
      for (double x : p.x) {
        const auto t = std::size_t(std::llround(x * double(p.n)));
        const double c = intersectlaw::intersection_cdf(x, p.a, p.beta1, p.beta2);
        env.rows.push_back({x, std::int64_t(t), dp.cdf[t], c, std::fabs(dp.cdf[t] - c)});
      }
      env.diagnostics = {{"offset", std::int64_t(offset)}, {"deficit", dp.deficit}};
      return env;
    };
  }
  {
    auto* s = sub("verify", "Run the acceptance suite; exits 1 if any criterion fails");
    auto& p = verify_;
    opt("verify", s, "--criteria", p.criteria, "Subset of criterion ids (default: all)")->delimiter(',');
    commands_["verify"] = [this, &p] {
      std::vector<int> only;
      for (auto id : p.criteria) {
        detail::require(id >= 1 && id <= 13, "criteria ids must lie in 1..13");
        only.push_back(int(id));
      }
      verify::Options o{sh_.seed, sh_.threads};
      Envelope env;
      env.columns = {"id", "title", "metric", "value", "lo", "hi", "gating", "pass"};
      int failed = 0;
      const auto crit = verify::run_all(o, only, [](const verify::Criterion& c) {
        std::cerr << "criterion " << c.id << ": " << (c.pass() ? "PASS" : "FAIL") << "  " << c.title << "\n";
      });
      for (const auto& c : crit) {
        for (const auto& m : c.metrics)
          env.rows.push_back({std::int64_t(c.id), c.title, m.name, m.value, m.lo, m.hi, m.gating, m.pass()});
        env.rows.push_back({std::int64_t(c.id), c.title, std::string("criterion"), c.pass() ? 1.0 : 0.0, 1.0, 1.0,
                            true, c.pass()});
        failed += !c.pass();
      }
      env.diagnostics = {{"criteria_run", std::int64_t(crit.size())}, {"criteria_failed", std::int64_t(failed)}};
      verify_failed_ = failed > 0;
      return env;
    };
  }
}

inline int run(int argc, const char* const* argv) {
  App app;
  return app.run(argc, argv);
}

inline int run(const std::vector<std::string>& args, std::ostream& err = std::cerr) {
  std::vector<const char*> argv = {"regen"};
  for (const auto& a : args) argv.push_back(a.c_str());
  App app;
  return app.run(int(argv.size()), argv.data(), err);
}

}  // namespace regen::cli

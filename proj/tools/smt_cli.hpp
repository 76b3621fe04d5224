#pragma once

// Command-line front end. Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smt/fields.hpp"
#include "smt/memory_test.hpp"
#include "smt/power_harness.hpp"
#include "smt/stable_core.hpp"
#include "smt/table_io.hpp"

namespace smt::cli {

inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& flag, const std::string& what)
      : std::runtime_error(flag + ": " + what) {}
};

namespace detail {

inline Alpha checked_alpha(double value, const std::string& flag = "--alpha") {
  try {
    return Alpha(value);
  } catch (const std::domain_error& e) {
    throw UsageError(flag, e.what());
  }
}

inline void check_open_unit(double value, const std::string& flag) {
  if (!(value > 0.0 && value < 1.0)) {
    throw UsageError(flag, "must lie in (0, 1), got " + format_number(value));
  }
}

inline void check_n(Coord n, double rho, const std::string& flag = "--n") {
  if (n < 1) throw UsageError(flag, "must be a positive integer");
  if (small_half_width(n, rho) < 1) throw UsageError(flag, "floor(n^rho) must be at least 1");
}

inline FieldSpec checked_field(const std::string& text, Alpha alpha, std::optional<std::size_t> dim) {
  try {
    return parse_field_spec(text, alpha, dim);
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    throw UsageError(what.find("d = 3") != std::string::npos ||
                             what.find("dimension does not match") != std::string::npos
                         ? "--d"
                         : "--field",
                     what);
  }
}

inline std::optional<std::size_t> optional_dim(int d) {
  if (d == 0) return std::nullopt;
  if (d < 0) throw UsageError("--d", "must be a positive integer");
  return static_cast<std::size_t>(d);
}

inline void check_reps(std::size_t reps) {
  if (reps < 1) throw UsageError("--reps", "must be at least 1");
}

struct SingleTestFlags {
  std::string field = "iid";
  double alpha = 0.0;
  int d = 0;
  Coord n = 0;
  double rho = 0.65;
  double beta = 0.1;
  std::uint64_t seed = 0;
  std::size_t reps = 2000;
  unsigned threads = 0;

  void add_to(CLI::App& sub, bool with_reps) {
    sub.add_option("--field", field, "Field spec: iid, subgaussian, effdim-iid, effdim-ma1, ma:[o1;..;od]=c,...")
        ->capture_default_str();
    sub.add_option("--alpha", alpha, "Stability index in (0, 2)")->required();
    sub.add_option("--d", d, "Lattice dimension (default 3 for effdim fields, kernel dimension for ma:, else 2)");
    sub.add_option("--n", n, "Half width of the origin box")->required();
    sub.add_option("--rho", rho, "Small-box exponent in (0, 1)")->capture_default_str();
    sub.add_option("--beta", beta, "Test level in (0, 1)")->capture_default_str();
    sub.add_option("--seed", seed, "Random seed")->capture_default_str();
    if (with_reps) {
      sub.add_option("--reps", reps, "Number of replications")->capture_default_str();
      sub.add_option("--threads", threads, "Worker threads (0: hardware, capped by SMT_THREADS)");
    }
  }

  std::pair<FieldSpec, TestConfig> resolve() const {
    const Alpha a = checked_alpha(alpha);
    check_open_unit(rho, "--rho");
    check_open_unit(beta, "--beta");
    check_n(n, rho);
    const FieldSpec spec = checked_field(field, a, optional_dim(d));
    return {spec, TestConfig{a, spec.dim(), n, rho, beta}};
  }
};

}  // namespace detail

/// Runs the CLI on `args` (without the program name).
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ratio-of-block-maxima test for the length of memory of SaS random fields", "smt"};
  app.require_subcommand(1);

  // critical-value
  auto* cv = app.add_subcommand("critical-value", "Print the lower critical value tau_beta");
  double cv_alpha = 0.0, cv_beta = 0.1;
  bool cv_json = false;
  cv->add_option("--alpha", cv_alpha, "Stability index in (0, 2)")->required();
  cv->add_option("--beta", cv_beta, "Test level in (0, 1)")->capture_default_str();
  cv->add_flag("--json", cv_json, "Emit JSON instead of a plain number");

  // test
  auto* test = app.add_subcommand("test", "Run the test once on a simulated field and print the result as JSON");
  detail::SingleTestFlags test_flags;
  test_flags.add_to(*test, false);

  // power
  auto* power = app.add_subcommand("power", "Write empirical power tables, one file per alpha");
  std::string power_field = "subgaussian";
  std::vector<double> alpha_list, rho_list{0.65};
  std::vector<Coord> n_list;
  int power_d = 0;
  double power_beta = 0.1;
  std::size_t power_reps = 0;
  std::uint64_t power_seed = 0;
  std::string out_dir = ".";
  std::string format = "csv";
  unsigned power_threads = 0;
  power->add_option("--field", power_field, "Field spec")->capture_default_str();
  power->add_option("--alpha-list", alpha_list, "Stability indices, comma separated")
      ->required()
      ->delimiter(',');
  power->add_option("--rho-list", rho_list, "Small-box exponents, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  power->add_option("--n-list", n_list, "Origin box half widths, comma separated")
      ->required()
      ->delimiter(',');
  power->add_option("--d", power_d, "Lattice dimension (default by field kind)");
  power->add_option("--beta", power_beta, "Test level in (0, 1)")->capture_default_str();
  power->add_option("--reps", power_reps, "Replications per cell (default 400 for d = 2, 800 otherwise)");
  power->add_option("--seed", power_seed, "Random seed")->capture_default_str();
  power->add_option("--out", out_dir, "Output directory")->capture_default_str();
  power->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  power->add_option("--threads", power_threads, "Worker threads (0: hardware, capped by SMT_THREADS)");

  // level
  auto* level = app.add_subcommand("level", "Empirical rejection frequency under a null field");
  detail::SingleTestFlags level_flags;
  level_flags.add_to(*level, true);

  // null-diagnostic
  auto* diag = app.add_subcommand("null-diagnostic", "KS distance of the T_n sample to the null law");
  detail::SingleTestFlags diag_flags;
  diag_flags.add_to(*diag, true);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (cv->parsed()) {
      const Alpha a = detail::checked_alpha(cv_alpha);
      detail::check_open_unit(cv_beta, "--beta");
      const double tau = critical_value(a, cv_beta);
      if (cv_json) {
        out << nlohmann::json{{"schema", kSchema}, {"alpha", a.value()}, {"beta", cv_beta}, {"tau_beta", tau}}.dump(2)
            << '\n';
      } else {
        out << format_number(tau) << '\n';
      }
      return 0;
    }

    if (test->parsed()) {
      const auto [spec, cfg] = test_flags.resolve();
      const auto result = run_replication(spec, cfg, replication_stream(test_flags.seed, cfg, 0));
      out << to_json(result).dump(2) << '\n';
      return 0;
    }

    if (power->parsed()) {
      std::vector<double> alphas;
      for (double a : alpha_list) alphas.push_back(detail::checked_alpha(a, "--alpha-list").value());
      for (double r : rho_list) detail::check_open_unit(r, "--rho-list");
      detail::check_open_unit(power_beta, "--beta");
      for (Coord n : n_list) {
        for (double r : rho_list) detail::check_n(n, r, "--n-list");
      }
      const FieldSpec spec =
          detail::checked_field(power_field, Alpha(alphas.front()), detail::optional_dim(power_d));
      const std::size_t reps = power_reps > 0 ? power_reps : (spec.dim() == 2 ? 400 : 800);
      const ExperimentGrid grid{spec, alphas, rho_list, n_list, power_beta, reps, power_seed};
      const auto tables = power_table(grid, power_threads);

      std::filesystem::create_directories(out_dir);
      for (const auto& table : tables) {
        const auto path = std::filesystem::path(out_dir) /
                          ("power_alpha" + format_number(table.alpha.value()) + "." + format);
        std::ofstream file(path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
        if (format == "csv") {
          write_power_csv(file, table);
        } else {
          file << to_json(table).dump(2) << '\n';
        }
        if (!file) throw std::runtime_error("failed writing " + path.string());
        out << path.string() << '\n';
      }
      return 0;
    }

    if (level->parsed()) {
      const auto [spec, cfg] = level_flags.resolve();
      detail::check_reps(level_flags.reps);
      if (spec.kind() != FieldKind::IidSas && spec.kind() != FieldKind::FiniteKernelMA) {
        throw UsageError("--field", "level checks need a null field (iid or ma:...)");
      }
      const auto result = empirical_level(spec, cfg, level_flags.reps, level_flags.seed, level_flags.threads);
      out << to_json(result, spec, level_flags.seed).dump(2) << '\n';
      return 0;
    }

    if (diag->parsed()) {
      const auto [spec, cfg] = diag_flags.resolve();
      detail::check_reps(diag_flags.reps);
      auto sample = null_statistic_sample(spec, cfg, diag_flags.reps, diag_flags.seed, diag_flags.threads);
      const double ks = ks_distance(sample, [&](double t) { return null_cdf_T(cfg.alpha, t); });
      std::sort(sample.begin(), sample.end());
      const std::size_t m = sample.size();
      const double median = m % 2 == 1 ? sample[m / 2] : 0.5 * (sample[m / 2 - 1] + sample[m / 2]);
      out << nlohmann::json{{"schema", kSchema},
                            {"kind", "null_diagnostic"},
                            {"field", spec.to_string()},
                            {"d", cfg.dim},
                            {"alpha", cfg.alpha.value()},
                            {"n", cfg.n},
                            {"rho", cfg.rho},
                            {"replications", diag_flags.reps},
                            {"seed", diag_flags.seed},
                            {"ks_distance", ks},
                            {"median", median}}
                 .dump(2)
          << '\n';
      return 0;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace smt::cli

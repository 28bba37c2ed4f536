// finsym: evaluate Finsler/symplectic check suites on a scenario file.
//
//   finsym run --config <path> [--suite ids] [--format json|table] [--out <path>]
//              [--seed <u64>] [--tol name=value ...] [--threads N] [--timing]
//   finsym validate --config <path>
//   finsym list-checks
//
// Exit status: 0 every record passes, 1 some record fails, 2 usage or config error.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "finsym/finsym.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

std::vector<std::string> split_suite(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void apply_tolerance(finsym::Tolerances& tol, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw finsym::ConfigError("/tolerances", "expected name=value, got '" + spec + "'");
  const std::string name = spec.substr(0, eq);
  const std::string text = spec.substr(eq + 1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !(v >= 0.0))
    throw finsym::ConfigError("/tolerances/" + name, "invalid value '" + text + "'");
  if (!tol.set(name, v)) throw finsym::ConfigError("/tolerances/" + name, "unknown tolerance name");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residual checks for Finsler metrics, symplectic forms and induced symplectic connections"};
  app.require_subcommand(1);

  std::string config_path, suite_text, format = "json", out_path;
  std::uint64_t seed = 0;
  std::vector<std::string> tol_overrides;
  unsigned threads = 1;
  bool timing = false;

  auto* run = app.add_subcommand("run", "evaluate a check suite on a scenario");
  run->add_option("--config", config_path, "scenario JSON file")->required();
  run->add_option("--suite", suite_text, "comma-separated check families (default: all applicable)");
  run->add_option("--format", format, "json (JSON lines) or table")->check(CLI::IsMember({"json", "table"}));
  run->add_option("--out", out_path, "write the report here instead of stdout");
  auto* seed_opt = run->add_option("--seed", seed, "override sampling.seed");
  run->add_option("--tol", tol_overrides, "tolerance override name=value (repeatable)");
  run->add_option("--threads", threads, "worker threads over sample points")->check(CLI::Range(1u, 256u));
  run->add_flag("--timing", timing, "report measured evaluation times (output is no longer reproducible)");

  auto* validate = app.add_subcommand("validate", "check a scenario file against the schema");
  validate->add_option("--config", config_path, "scenario JSON file")->required();

  auto* list = app.add_subcommand("list-checks", "print check families");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*list) {
    for (const auto& c : finsym::check_catalog()) std::cout << c.id << "\t" << c.description << "\n";
    return 0;
  }

  try {
    finsym::ScenarioConfig cfg = finsym::load_scenario(config_path);
    if (*validate) {
      std::cout << "ok\n";
      return 0;
    }
    if (*seed_opt) cfg.sampling.seed = seed;
    for (const auto& t : tol_overrides) apply_tolerance(cfg.tolerances, t);
    const std::vector<std::string> suite =
        suite_text.empty() ? finsym::applicable_checks(cfg) : split_suite(suite_text);
    const auto records = finsym::run_scenario(cfg, suite, {threads, timing});
    if (records.empty()) throw finsym::ConfigError("/sampling", "no sample points inside the sampling box");

    const auto fmt = format == "table" ? finsym::ReportFormat::table : finsym::ReportFormat::json_lines;
    if (out_path.empty()) {
      finsym::emit_report(records, fmt, std::cout);
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw finsym::ConfigError("/", "cannot write " + out_path);
      finsym::emit_report(records, fmt, out);
    }
    return finsym::all_pass(records) ? 0 : kExitFail;
  } catch (const finsym::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const finsym::ParseError& e) {
    std::cerr << "expression error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const finsym::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

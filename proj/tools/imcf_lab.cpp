#include "imcf/error.hpp"
#include "imcf/lab/battery.hpp"
#include "imcf/lab/config.hpp"
#include "imcf/lab/report.hpp"
#include "imcf/lab/scenario.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace imcf;

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitError = 3;

/// --out, then IMCF_LAB_OUT, then ./imcf-lab-out.
fs::path output_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("IMCF_LAB_OUT"); env && *env) return env;
  return "imcf-lab-out";
}

int cmd_run(const std::vector<std::string>& files, std::size_t workers, std::optional<std::uint64_t> seed,
            const fs::path& out) {
  std::vector<lab::BatchItem> items;
  for (const auto& f : files) {
    lab::BatchItem it{lab::load_config(f), fs::path(f).parent_path()};
    if (it.config_dir.empty()) it.config_dir = ".";
    items.push_back(std::move(it));
  }
  lab::RunContext ctx;
  ctx.out_root = out;
  ctx.seed_override = seed;
  const auto reports = lab::run_batch(items, ctx, workers);
  lab::write_table(std::cout, reports);
  bool ok = true;
  for (const auto& r : reports) {
    if (!r.failure.empty())
      std::cout << r.name << ": solver failure, last valid state in " << (out / r.name / "failure").string() << '\n';
    ok = ok && r.passed();
  }
  std::cout << "outputs: " << out.string() << '\n';
  return ok ? 0 : kExitChecksFailed;
}

int cmd_verify(const std::string& suite_name, std::size_t workers, std::optional<std::uint64_t> seed,
               const fs::path& out) {
  const auto suite = lab::suite_from_string(suite_name);
  lab::BatteryOptions opt;
  opt.workers = workers;
  if (seed) opt.seed = *seed;
  const auto results = lab::run_battery(suite, opt);
  lab::write_battery_table(std::cout, results);

  lab::ScenarioReport rep;
  rep.scenario = "verify";
  rep.name = "verify-" + suite_name;
  rep.seed = opt.seed;
  for (const auto& r : results) {
    auto c = r.check;
    c.name = "criterion_" + std::to_string(r.id);
    c.label = r.title;
    if (r.unattainable) c.note = c.note.empty() ? "unattainable as stated" : c.note + "; unattainable as stated";
    rep.seconds += r.seconds;
    rep.checks.push_back(std::move(c));
  }
  const fs::path dir = out / rep.name;
  fs::create_directories(dir);
  std::ofstream text(dir / "report.txt");
  lab::write_text(text, rep);
  std::ofstream json(dir / "summary.json");
  lab::write_summary(json, rep);
  const bool ok = lab::battery_ok(results);
  std::cout << "verify " << suite_name << ": " << (ok ? "ok" : "failed") << " (" << (dir / "summary.json").string()
            << ")\n";
  return ok ? 0 : kExitChecksFailed;
}

int cmd_report(const fs::path& dir) {
  const auto reports = lab::collect_summaries(dir);
  if (reports.empty()) throw UsageError("report: no summary.json below " + dir.string());
  lab::write_table(std::cout, reports);
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.passed();
  return ok ? 0 : kExitChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak inverse mean curvature flow laboratory"};
  app.require_subcommand(1);
  std::size_t workers = 1;
  std::optional<std::uint64_t> seed;
  std::string out_flag;
  app.add_option("--workers", workers, "Concurrent scenarios (run) or weak-flow members (verify)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Seed override");
  app.add_option("--out", out_flag, "Output root (overrides IMCF_LAB_OUT)");

  auto* run = app.add_subcommand("run", "Run scenario configs");
  std::vector<std::string> files;
  run->add_option("configs", files, "Scenario YAML files")->required()->check(CLI::ExistingFile);

  auto* verify = app.add_subcommand("verify", "Run the acceptance battery");
  std::string suite;
  verify->add_option("suite", suite, "fast or full")->required();

  auto* report = app.add_subcommand("report", "Summarize the summary files below a directory");
  std::string dir;
  report->add_option("dir", dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const fs::path out = output_root(out_flag);
    if (*run) return cmd_run(files, workers, seed, out);
    if (*verify) return cmd_verify(suite, workers, seed, out);
    return cmd_report(dir);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}

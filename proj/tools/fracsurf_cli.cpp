#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fracsurf/cli/commands.hpp"

namespace {

enum ExitCode { kOk = 0, kFixtureMismatch = 1, kInvalidInput = 2, kNoConvergence = 3 };

struct Options {
  std::string scenario;
  std::string out;
  std::string fixtures = FRACSURF_FIXTURE_DIR;
  unsigned workers = 1;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
};

int emit(const std::vector<fracsurf::cli::Record>& recs, const Options& opt) {
  std::ofstream file;
  if (!opt.out.empty()) {
    file.open(opt.out);
    if (!file) throw fracsurf::ValidationError("cannot open output file " + opt.out);
  }
  std::ostream& os = opt.out.empty() ? std::cout : file;
  if (opt.format == "csv") fracsurf::cli::write_csv(recs, os);
  else fracsurf::cli::write_jsonl(recs, os);
  return kOk;
}

int run(const std::string& command, const Options& opt) {
  const fracsurf::Execution exec{opt.workers};
  if (command == "validate") {
    const auto report = fracsurf::cli::cmd_validate(opt.fixtures, exec);
    emit(report.records, opt);
    for (const auto& r : report.records)
      if (!r["pass"].get<bool>()) std::cerr << "fixture failed: " << r["fixture"].get<std::string>() << '\n';
    return report.all_passed ? kOk : kFixtureMismatch;
  }
  if (opt.scenario.empty()) throw fracsurf::ValidationError("--scenario is required");
  auto sc = fracsurf::cli::Scenario::load(opt.scenario);
  if (opt.seed) sc.override_seed(*opt.seed);
  return emit(fracsurf::cli::run_command(command, sc, exec), opt);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional perimeters, s-areas and nonlocal curvatures"};
  app.require_subcommand(1);
  Options opt;
  for (const char* name : {"perimeter", "area", "curvature", "sweep", "validate", "diagnostic"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--scenario", opt.scenario, "scenario JSON file");
    sub->add_option("--out", opt.out, "output file (default stdout)");
    sub->add_option("--workers", opt.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "seed overriding the scenario");
    sub->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    if (std::string(name) == "validate") sub->add_option("--fixtures", opt.fixtures, "fixture directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidInput;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opt);
  } catch (const fracsurf::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const fracsurf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
}

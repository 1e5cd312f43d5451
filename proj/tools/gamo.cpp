#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gamo/cli/commands.hpp"
#include "gamo/error.hpp"

namespace {

using namespace gamo;
using namespace gamo::cli;

struct Options {
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::size_t jobs = 1;
  std::string run;
  std::string model;
  bool inject_fault = false;
};

RunSpec load(const Options& o) {
  RunSpec spec = load_run_spec(o.spec);
  if (!o.out.empty()) spec.output = o.out;
  if (o.seed) spec.seed = *o.seed;
  if (o.reps) spec.repetitions = *o.reps;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gamo: minority oversampling experiments"};
  app.require_subcommand(1);
  Options o;

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--spec", o.spec, "run spec (INI)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "output directory (overrides run.output)");
    cmd->add_option("--seed", o.seed, "base seed (overrides run.seed)");
    cmd->add_option("--reps", o.reps, "repetitions (overrides run.repetitions)")->check(CLI::PositiveNumber);
    cmd->add_option("--jobs", o.jobs, "repetitions run concurrently")->check(CLI::PositiveNumber);
  };

  auto* train = app.add_subcommand("train", "train one variant over all repetitions");
  add_run_flags(train);
  auto* ablate = app.add_subcommand("ablate", "train every listed variant with each loss and tabulate");
  add_run_flags(ablate);
  auto* oracle = app.add_subcommand("oracle", "run the numerical self-checks");
  oracle->add_option("--seed", o.seed, "oracle seed");
  oracle->add_flag("--inject-gradient-fault", o.inject_fault, "corrupt autodiff gradients (negative control)");
  auto* plot = app.add_subcommand("plot", "SVG scatter and decision regions for a 2-D run");
  plot->add_option("--run", o.run, "run directory written by train/ablate")->required()->check(CLI::ExistingDirectory);
  plot->add_option("--out", o.out, "where to write the SVGs (default: the run directory)");
  auto* exp = app.add_subcommand("export", "write a balanced dataset drawn from a trained generator");
  exp->add_option("--model", o.model, "model checkpoint")->required()->check(CLI::ExistingFile);
  exp->add_option("--out", o.out, "CSV to write")->required();
  exp->add_option("--seed", o.seed, "sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*train) return cmd_train(load(o), o.jobs, std::cout);
    if (*ablate) return cmd_ablate(load(o), o.jobs, std::cout);
    if (*oracle) {
      oracle::OracleOptions opt;
      if (o.seed) opt.seed = *o.seed;
      opt.inject_gradient_fault = o.inject_fault;
      return cmd_oracle(opt, std::cout);
    }
    if (*plot) return cmd_plot(o.run, o.out.empty() ? o.run : o.out, std::cout);
    if (*exp) return cmd_export(o.model, o.out, o.seed.value_or(0), std::cout);
  } catch (const SpecError& e) {
    std::cerr << "spec error: " << e.what() << '\n';
    return kSpecError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailure;
  }
  return kUsage;
}

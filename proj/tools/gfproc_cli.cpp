// Command-line driver: assumption checks, path simulation, limit-process
// sampling and the full scaling experiment.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "gfproc/harness.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t workers = 1;
};

void add_common(CLI::App *cmd, CommonOpts &opts) {
  cmd->add_option("--config", opts.config_path, "configuration file");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "master seed override")
      ->each([&opts](const std::string &) { opts.seed_set = true; });
  cmd->add_option("--workers", opts.workers, "worker thread count")
      ->check(CLI::PositiveNumber);
}

gfproc::ExperimentConfig load(const CommonOpts &opts) {
  gfproc::ExperimentConfig cfg;
  if (!opts.config_path.empty()) cfg = gfproc::load_config(opts.config_path);
  if (opts.seed_set) cfg.master_seed = opts.seed;
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  cfg.validate();
  return cfg;
}

int cmd_check(const CommonOpts &opts) {
  const auto cfg = load(opts);
  const auto report = gfproc::run_condition_checks(cfg);
  for (const auto &e : report.entries)
    std::printf("%-24s %-5s %.6g  (%s)\n", e.name.c_str(),
                e.pass ? "pass" : "warn", e.value, e.note.c_str());
  return report.all_pass() ? 0 : 3;
}

int cmd_simulate(const CommonOpts &opts) {
  const auto cfg = load(opts);
  const auto result =
      gfproc::run_scaling_experiment(cfg, {}, opts.workers);
  gfproc::emit_outputs(result, cfg.out_dir);
  std::printf("simulated %zu a-values x %zu replicates -> %s\n",
              result.per_a.size(), cfg.replicates, cfg.out_dir.c_str());
  return 0;
}

int cmd_limit(const CommonOpts &opts) {
  const auto cfg = load(opts);
  std::size_t boundary = 0;
  gfproc::ExperimentResult result;
  result.limit_sample = gfproc::sample_limit_sups(cfg, opts.workers, &boundary);
  gfproc::emit_outputs(result, cfg.out_dir);
  std::printf("sampled %zu limit paths (%zu boundary-argmax warnings) -> %s\n",
              result.limit_sample.size(), boundary, cfg.out_dir.c_str());
  return 0;
}

int cmd_scaling(const CommonOpts &opts) {
  const auto cfg = load(opts);
  auto limit = gfproc::sample_limit_sups(cfg, opts.workers);
  const auto result =
      gfproc::run_scaling_experiment(cfg, std::move(limit), opts.workers);
  gfproc::emit_outputs(result, cfg.out_dir);
  std::printf("slope = %.6g (se %.2g)\n", result.slope.slope,
              result.slope.slope_se);
  for (const auto &w : result.warnings)
    std::printf("warning: %s\n", w.c_str());
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"heavy-tailed (g,F)-process simulator"};
  app.require_subcommand(1);

  CommonOpts check_o, sim_o, limit_o, scaling_o;
  auto *check = app.add_subcommand("check", "run model assumption checks");
  add_common(check, check_o);
  auto *sim = app.add_subcommand("simulate", "simulate scaled sup samples");
  add_common(sim, sim_o);
  auto *limit = app.add_subcommand("limit", "sample the limit-process sup law");
  add_common(limit, limit_o);
  auto *scaling =
      app.add_subcommand("scaling", "full scaling experiment with KS comparison");
  add_common(scaling, scaling_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*check) return cmd_check(check_o);
    if (*sim) return cmd_simulate(sim_o);
    if (*limit) return cmd_limit(limit_o);
    if (*scaling) return cmd_scaling(scaling_o);
  } catch (const std::invalid_argument &e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}

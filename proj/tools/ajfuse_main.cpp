// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ajfuse/app/commands.hpp"
#include "ajfuse/error.hpp"
#include "json.hpp"

namespace {

struct Flags {
  std::string config_file;
  std::string out;
  std::string input;
  std::string tuned;
  std::string fused;
  bool check = false;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<double> eta;
  std::optional<double> psi;
  std::optional<int> steps;
  std::optional<std::string> score;
  std::optional<std::string> grid;
  std::optional<std::string> aggregate;
  std::optional<int> dump_trajectory;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_file, "Configuration file (section.key = value)");
  sub->add_option("--out", f.out, "Output directory")->required();
  sub->add_option("--input", f.input, "Input corpus manifest or directory from a previous step");
  sub->add_option("--seed", f.seed, "Master seed");
  sub->add_option("--set", f.sets, "Override a configuration key: section.key=value");
  sub->add_flag("--check", f.check, "Verify an existing output directory instead of writing");
}

void add_fusion(CLI::App* sub, Flags& f) {
  sub->add_option("--eta", f.eta, "OM guidance weight");
  sub->add_option("--psi", f.psi, "CP guidance weight");
  sub->add_option("--steps", f.steps, "Diffusion steps T");
  sub->add_option("--score", f.score, "Score model: gmm or gaussian");
  sub->add_option("--aggregate", f.aggregate, "SSIM aggregation: mean or sum");
}

ajfuse::app::RunConfig build_config(const Flags& f) {
  ajfuse::app::RunConfig config;
  if (!f.config_file.empty()) config.load_file(f.config_file);
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ajfuse::Error(ajfuse::ErrorCode::ConfigError, "--set expects key=value, got " + kv);
    }
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.seed) config.set("run.seed", std::to_string(*f.seed));
  if (f.eta) config.set("fusion.eta", CLI::detail::to_string(*f.eta));
  if (f.psi) config.set("fusion.psi", CLI::detail::to_string(*f.psi));
  if (f.steps) config.set("schedule.steps", std::to_string(*f.steps));
  if (f.score) config.set("score.kind", *f.score);
  if (f.aggregate) config.set("ssim.aggregate", *f.aggregate);
  if (f.dump_trajectory) config.set("fusion.dump_trajectory", std::to_string(*f.dump_trajectory));
  if (f.grid) {
    config.set("tune.eta_grid", *f.grid);
    config.set("tune.psi_grid", *f.grid);
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ajfuse: multimodal fusion of aerosol jet printed line images"};
  app.require_subcommand(1);
  Flags f;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic OM/CP corpus");
  add_common(synth, f);

  auto* reg = app.add_subcommand("register", "Segment, align and crop ROI pairs");
  add_common(reg, f);

  auto* tune = app.add_subcommand("tune", "Two-stage grid search for (eta, psi)");
  add_common(tune, f);
  add_fusion(tune, f);
  tune->add_option("--grid", f.grid, "Grid for both weights, LO:HI:N");

  auto* fuse = app.add_subcommand("fuse", "Fuse every registered ROI pair");
  add_common(fuse, f);
  add_fusion(fuse, f);
  fuse->add_option("--tuned", f.tuned, "Tuning summary providing eta* and psi*");
  fuse->add_option("--dump-trajectory", f.dump_trajectory,
                   "Save the clean estimate every N steps (0 disables)");

  auto* ablate = app.add_subcommand("ablate", "Compare diffusion fusion with the midpoint baseline");
  add_common(ablate, f);
  add_fusion(ablate, f);
  ablate->add_option("--tuned", f.tuned, "Tuning summary providing eta* and psi*");

  auto* evaluate = app.add_subcommand("evaluate", "Score fused images against their ROI pairs");
  add_common(evaluate, f);
  evaluate->add_option("--fused", f.fused, "Directory written by fuse")->required();
  evaluate->add_option("--aggregate", f.aggregate, "SSIM aggregation: mean or sum");

  auto* export_dt = app.add_subcommand("export-dt", "Export the time-indexed surface of one line");
  add_common(export_dt, f);

  CLI11_PARSE(app, argc, argv);

  ajfuse::app::CommandOptions opt;
  opt.command = app.get_subcommands().front()->get_name();
  try {
    opt.config = build_config(f);
  } catch (const ajfuse::Error& e) {
    std::cerr << nlohmann::json{{"stage", opt.command},
                                {"error", std::string(ajfuse::to_string(e.code()))},
                                {"message", e.what()}}
                     .dump()
              << '\n';
    return 1;
  }
  opt.out = f.out;
  opt.input = f.input;
  opt.tuned = f.tuned;
  opt.fused = f.fused;
  opt.check = f.check;
  return ajfuse::app::run_command(opt, std::cout, std::cerr);
}

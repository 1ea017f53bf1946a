// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "ajfuse/app/config.hpp"
#include "ajfuse/registration.hpp"
#include "ajfuse/scores.hpp"

namespace ajfuse::app {

namespace fs = std::filesystem;

struct CommandOptions {
  std::string command;  // synth, register, fuse, tune, ablate, evaluate, export-dt
  fs::path out;
  fs::path input;  // corpus manifest (or its directory), registration dir, or fused dir
  fs::path tuned;  // optional tuning summary providing (eta*, psi*)
  fs::path fused;  // evaluate: directory written by `fuse`
  bool check = false;
  RunConfig config;
};

/// Validates the configuration, runs one command and writes its run manifest.
/// Returns the process exit code; failures print one JSON object naming the
/// failing stage to `err`.
int run_command(const CommandOptions& options, std::ostream& log, std::ostream& err);

/// Pairs written by `register`, reloaded from disk.
struct RegisteredPairs {
  std::vector<RoiPair> pairs;
  HeightRange height_range;
};

RegisteredPairs load_registered(const fs::path& registration_dir);

/// Score model for the configured kind. GMM centers and the Gaussian mean
/// come from score.patch_dir when set, otherwise from the pairs' midpoint
/// images (ROI_OM + ROI_CP) / 2.
std::unique_ptr<ScoreModel> build_score(const RunConfig& config,
                                        const std::vector<RoiPair>& pairs);

struct TunedValues {
  double eta = 0.0;
  double psi = 0.0;
};

TunedValues read_tuned_summary(const fs::path& path);

}  // namespace ajfuse::app

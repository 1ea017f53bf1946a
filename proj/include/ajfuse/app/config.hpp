// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "ajfuse/diffusion.hpp"
#include "ajfuse/metrics.hpp"
#include "ajfuse/registration.hpp"
#include "ajfuse/synthgen.hpp"
#include "ajfuse/tuning.hpp"

namespace ajfuse::app {

enum class ScoreKind { Gaussian, Gmm };
enum class ProfileAxis { Rows, Cols };

/// Flat `section.key = value` configuration shared by every command.
///
/// Every known key has a default; files and command-line overrides may only
/// set known keys. Typed views (`corpus_spec()`, `fusion_config()`, ...) parse
/// and validate on access, and `validate()` runs all of them up front.
class RunConfig {
 public:
  RunConfig();

  /// Applies `section.key = value` lines; `#` starts a comment.
  void load_file(const std::filesystem::path& path);
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;

  bool has_key(const std::string& key) const { return values_.contains(key); }
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  /// Sorted `key = value` lines of the effective configuration.
  std::string canonical_text() const;

  /// Throws ConfigError naming the first invalid key.
  void validate() const;

  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  TuningGrid get_grid(const std::string& key) const;

  std::uint64_t seed() const;
  CorpusSpec corpus_spec() const;
  RegistrationParams registration_params() const;
  FusionConfig fusion_config() const;
  SsimParams ssim_params() const;
  ScoreKind score_kind() const;
  ProfileAxis dt_axis() const;
  /// Band averaged into the digital-twin profile; nullopt means all.
  std::optional<IndexRange> dt_band() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace ajfuse::app

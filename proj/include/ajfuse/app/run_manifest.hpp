// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ajfuse/app/config.hpp"
#include "ajfuse/image.hpp"
#include "ajfuse/image_io.hpp"

namespace ajfuse::app {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kRunManifestName = "run_manifest.json";

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// SHA-256 of the configuration's canonical text.
std::string config_hash(const RunConfig& config);

/// Single writer for one run directory. Every output goes through it so the
/// run manifest lists each file with its digest.
class RunWriter {
 public:
  explicit RunWriter(std::filesystem::path out_dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }

  void write_text(const std::string& relative, std::string_view content);
  void write_image(const std::string& relative, const Image& img,
                   PgmFormat format = PgmFormat::Binary16);

  /// Lists a file already written under the run directory as an output.
  void adopt(const std::string& relative);

  /// Records an input file; stored relative to the run directory.
  void add_input(const std::filesystem::path& path);

  /// Writes run_manifest.json: command, tool and library versions, config
  /// hash and values, inputs and outputs with their SHA-256 digests.
  void finalize(const std::string& command, const RunConfig& config);

 private:
  std::filesystem::path dir_;
  std::vector<std::string> outputs_;
  std::vector<std::filesystem::path> inputs_;
};

/// Verifies an existing run directory against `config`: the stored config
/// hash must match and every listed output must exist with its recorded
/// digest. Throws CheckFailed describing the first inconsistency.
void check_run(const std::filesystem::path& out_dir, const std::string& command,
               const RunConfig& config);

}  // namespace ajfuse::app

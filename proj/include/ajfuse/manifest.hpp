// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ajfuse/registration.hpp"

namespace ajfuse {

enum class Modality { OM, CP };

/// One row of a corpus manifest. The manifest is a CSV with header
/// `path,timestamp,modality`; paths are relative to the manifest's directory,
/// timestamps are hours, modality is `om` or `cp`.
struct ManifestEntry {
  std::string path;
  double timestamp_h = 0.0;
  Modality modality = Modality::OM;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries);

struct LoadedCorpus {
  std::vector<TimedImage> om_frames;
  std::vector<TimedHeightMap> cp_maps;
};

/// Loads every file a manifest references. OM frames take the CP pitch of
/// the same timestamp when one exists.
LoadedCorpus load_corpus(const std::filesystem::path& manifest_path);

}  // namespace ajfuse

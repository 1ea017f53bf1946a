// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include "ajfuse/manifest.hpp"

#include <charconv>
#include <fstream>
#include <map>

#include <fmt/core.h>

#include "ajfuse/error.hpp"
#include "ajfuse/image_io.hpp"

namespace ajfuse {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

}  // namespace

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open manifest {}", path.string()));
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv(line);
    if (line_no == 1 && !fields.empty() && fields[0] == "path") continue;
    if (fields.size() != 3) {
      throw Error(ErrorCode::IoError,
                  fmt::format("{}:{}: expected path,timestamp,modality", path.string(), line_no));
    }
    ManifestEntry e;
    e.path = fields[0];
    const auto& ts = fields[1];
    auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), e.timestamp_h);
    if (ec != std::errc() || ptr != ts.data() + ts.size()) {
      throw Error(ErrorCode::IoError,
                  fmt::format("{}:{}: bad timestamp '{}'", path.string(), line_no, ts));
    }
    if (fields[2] == "om") {
      e.modality = Modality::OM;
    } else if (fields[2] == "cp") {
      e.modality = Modality::CP;
    } else {
      throw Error(ErrorCode::IoError, fmt::format("{}:{}: unknown modality '{}'", path.string(),
                                                  line_no, fields[2]));
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write {}", path.string()));
  out << "path,timestamp,modality\n";
  for (const auto& e : entries) {
    out << e.path << ',' << format_exact(e.timestamp_h) << ','
        << (e.modality == Modality::OM ? "om" : "cp") << '\n';
  }
}

LoadedCorpus load_corpus(const std::filesystem::path& manifest_path) {
  const auto base = manifest_path.parent_path();
  LoadedCorpus corpus;
  std::map<double, double> cp_pitch;
  for (const auto& e : read_manifest(manifest_path)) {
    if (e.modality != Modality::CP) continue;
    HeightMapMeta meta;
    HeightMap hm = read_heightmap(base / e.path, &meta);
    cp_pitch[e.timestamp_h] = hm.pitch_um;
    corpus.cp_maps.push_back({e.timestamp_h, std::move(hm)});
  }
  for (const auto& e : read_manifest(manifest_path)) {
    if (e.modality != Modality::OM) continue;
    const auto it = cp_pitch.find(e.timestamp_h);
    corpus.om_frames.push_back(
        {e.timestamp_h,
         read_pgm(base / e.path, it == cp_pitch.end() ? kDefaultPitchUm : it->second)});
  }
  return corpus;
}

}  // namespace ajfuse

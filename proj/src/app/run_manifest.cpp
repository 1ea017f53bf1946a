// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include "ajfuse/app/run_manifest.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <memory>

#include <fmt/core.h>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include "ajfuse/error.hpp"
#include "json.hpp"

namespace ajfuse::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot read {}", path.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

[[noreturn]] void check_failed(const std::string& why) {
  throw Error(ErrorCode::CheckFailed, why);
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error(ErrorCode::IoError, "SHA-256 computation failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_all(path)); }

std::string config_hash(const RunConfig& config) { return sha256_hex(config.canonical_text()); }

RunWriter::RunWriter(fs::path out_dir) : dir_(std::move(out_dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) {
    throw Error(ErrorCode::IoError,
                fmt::format("cannot create output directory {}: {}", dir_.string(), ec.message()));
  }
}

void RunWriter::adopt(const std::string& relative) {
  if (std::find(outputs_.begin(), outputs_.end(), relative) == outputs_.end()) {
    outputs_.push_back(relative);
  }
}

void RunWriter::write_text(const std::string& relative, std::string_view content) {
  const fs::path path = dir_ / relative;
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write {}", path.string()));
  adopt(relative);
}

void RunWriter::write_image(const std::string& relative, const Image& img, PgmFormat format) {
  const fs::path path = dir_ / relative;
  fs::create_directories(path.parent_path());
  write_pgm(path, img, format);
  adopt(relative);
}

void RunWriter::add_input(const fs::path& path) { inputs_.push_back(path); }

void RunWriter::finalize(const std::string& command, const RunConfig& config) {
  json manifest;
  manifest["command"] = command;
  manifest["tool_version"] = kToolVersion;
  manifest["libraries"] = {
      {"fmt", FMT_VERSION},
      {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR,
                                    NLOHMANN_JSON_VERSION_MINOR, NLOHMANN_JSON_VERSION_PATCH)},
      {"openssl", OPENSSL_VERSION_TEXT},
  };
  manifest["config_hash"] = config_hash(config);
  manifest["config"] = config.values();

  std::vector<fs::path> inputs = inputs_;
  std::sort(inputs.begin(), inputs.end());
  json in = json::array();
  for (const auto& p : inputs) {
    in.push_back({{"path", fs::relative(p, dir_).generic_string()}, {"sha256", sha256_file(p)}});
  }
  manifest["inputs"] = in;

  std::vector<std::string> outputs = outputs_;
  std::sort(outputs.begin(), outputs.end());
  json out = json::array();
  for (const auto& rel : outputs) {
    out.push_back({{"path", rel}, {"sha256", sha256_file(dir_ / rel)}});
  }
  manifest["outputs"] = out;

  std::ofstream f(dir_ / kRunManifestName, std::ios::binary);
  f << manifest.dump(2) << '\n';
  if (!f) throw Error(ErrorCode::IoError, "cannot write run manifest");
}

void check_run(const fs::path& out_dir, const std::string& command, const RunConfig& config) {
  const fs::path path = out_dir / kRunManifestName;
  if (!fs::exists(path)) check_failed(fmt::format("no run manifest in {}", out_dir.string()));
  json manifest;
  try {
    manifest = json::parse(read_all(path));
  } catch (const json::exception& e) {
    check_failed(fmt::format("unreadable run manifest: {}", e.what()));
  }
  if (manifest.value("command", "") != command) {
    check_failed(fmt::format("run directory was produced by '{}', not '{}'",
                             manifest.value("command", ""), command));
  }
  const std::string expected = config_hash(config);
  if (manifest.value("config_hash", "") != expected) {
    check_failed(fmt::format("config hash {} does not match recorded {}", expected,
                             manifest.value("config_hash", "")));
  }
  for (const auto& entry : manifest.at("outputs")) {
    const fs::path file = out_dir / entry.at("path").get<std::string>();
    if (!fs::exists(file)) check_failed(fmt::format("missing output {}", file.string()));
    if (sha256_file(file) != entry.at("sha256").get<std::string>()) {
      check_failed(fmt::format("output {} changed since the run", file.string()));
    }
  }
}

}  // namespace ajfuse::app

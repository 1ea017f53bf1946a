// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include "ajfuse/image_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "ajfuse/error.hpp"

namespace ajfuse {

namespace {

std::uint16_t to_sample(double v) {
  return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
}

[[noreturn]] void io_fail(const std::filesystem::path& path, std::string_view what) {
  throw Error(ErrorCode::IoError, fmt::format("{}: {}", path.string(), what));
}

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string discard;
      std::getline(in, discard);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

long parse_long(const std::string& tok, const std::filesystem::path& path) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    io_fail(path, fmt::format("bad integer '{}'", tok));
  }
  return v;
}

double parse_double(std::string_view tok, const std::filesystem::path& path) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    io_fail(path, fmt::format("bad number '{}'", tok));
  }
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string format_exact(double value) { return fmt::format("{}", value); }

void write_pgm(const std::filesystem::path& path, const Image& img, PgmFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) io_fail(path, "cannot open for writing");
  if (format == PgmFormat::Binary16) {
    out << "P5\n" << img.width << ' ' << img.height << "\n65535\n";
    std::string buf;
    buf.reserve(img.size() * 2);
    for (double v : img.pixels) {
      const std::uint16_t s = to_sample(v);
      buf.push_back(static_cast<char>(s >> 8));
      buf.push_back(static_cast<char>(s & 0xFF));
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  } else {
    out << "P2\n" << img.width << ' ' << img.height << "\n65535\n";
    for (std::size_t r = 0; r < img.height; ++r) {
      for (std::size_t c = 0; c < img.width; ++c) {
        out << (c ? " " : "") << to_sample(img.at(r, c));
      }
      out << '\n';
    }
  }
  if (!out) io_fail(path, "write failed");
}

Image read_pgm(const std::filesystem::path& path, double pitch_um) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open for reading");
  const std::string magic = next_token(in);
  if (magic != "P5" && magic != "P2") io_fail(path, "not a P2/P5 graymap");
  const long width = parse_long(next_token(in), path);
  const long height = parse_long(next_token(in), path);
  const long maxval = parse_long(next_token(in), path);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
    io_fail(path, "invalid graymap header");
  }
  Image img(static_cast<std::size_t>(height), static_cast<std::size_t>(width), 0.0,
            pitch_um, true);
  const double scale = 1.0 / static_cast<double>(maxval);
  if (magic == "P5") {
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    std::string buf(img.size() * bytes_per, '\0');
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
      io_fail(path, "truncated pixel data");
    }
    for (std::size_t i = 0; i < img.size(); ++i) {
      unsigned s = 0;
      if (bytes_per == 2) {
        s = (static_cast<unsigned char>(buf[2 * i]) << 8) |
            static_cast<unsigned char>(buf[2 * i + 1]);
      } else {
        s = static_cast<unsigned char>(buf[i]);
      }
      img.pixels[i] = std::min(1.0, s * scale);
    }
  } else {
    for (double& v : img.pixels) {
      const std::string tok = next_token(in);
      if (tok.empty()) io_fail(path, "truncated pixel data");
      v = std::min(1.0, static_cast<double>(parse_long(tok, path)) * scale);
    }
  }
  return img;
}

std::filesystem::path heightmap_meta_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p += ".meta";
  return p;
}

void write_heightmap(const std::filesystem::path& path, const HeightMap& hm,
                     double timestamp_h) {
  hm.validate();
  {
    std::ofstream out(path);
    if (!out) io_fail(path, "cannot open for writing");
    std::string line;
    for (std::size_t r = 0; r < hm.height; ++r) {
      line.clear();
      for (std::size_t c = 0; c < hm.width; ++c) {
        if (c) line.push_back(',');
        line += format_exact(hm.at(r, c));
      }
      out << line << '\n';
    }
    if (!out) io_fail(path, "write failed");
  }
  const auto meta = heightmap_meta_path(path);
  std::ofstream out(meta);
  if (!out) io_fail(meta, "cannot open for writing");
  out << "pitch_um = " << format_exact(hm.pitch_um) << '\n'
      << "timestamp = " << format_exact(timestamp_h) << '\n';
}

HeightMap read_heightmap(const std::filesystem::path& path, HeightMapMeta* meta_out) {
  HeightMapMeta meta;
  const auto meta_path = heightmap_meta_path(path);
  if (std::ifstream mf(meta_path); mf) {
    std::string line;
    while (std::getline(mf, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const auto key = trim(std::string_view(line).substr(0, eq));
      const auto value = trim(std::string_view(line).substr(eq + 1));
      if (key == "pitch_um") meta.pitch_um = parse_double(value, meta_path);
      if (key == "timestamp") meta.timestamp_h = parse_double(value, meta_path);
    }
  }
  std::ifstream in(path);
  if (!in) io_fail(path, "cannot open for reading");
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::size_t count = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      values.push_back(parse_double(trim(rest.substr(0, comma)), path));
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows == 0) cols = count;
    if (count != cols) io_fail(path, fmt::format("ragged row {}", rows));
    ++rows;
  }
  if (rows == 0) io_fail(path, "empty height map");
  HeightMap hm(rows, cols, 0.0, meta.pitch_um);
  hm.z_um = std::move(values);
  hm.validate();
  if (meta_out) *meta_out = meta;
  return hm;
}

}  // namespace ajfuse

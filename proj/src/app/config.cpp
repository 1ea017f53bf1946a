// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include "ajfuse/app/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <fmt/core.h>

#include "ajfuse/error.hpp"
#include "ajfuse/image_io.hpp"
#include "ajfuse/rng.hpp"

namespace ajfuse::app {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& value, std::string_view why) {
  throw Error(ErrorCode::ConfigError, fmt::format("{} = '{}': {}", key, value, why));
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Every key the tool understands, with its default.
const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> table = [] {
    const CorpusSpec spec;
    const RegistrationParams reg;
    const SsimParams ssim;
    return std::map<std::string, std::string>{
        {"run.seed", "0"},
        {"synth.n_frames", std::to_string(spec.n_frames)},
        {"synth.lines_per_frame", std::to_string(spec.lines_per_frame)},
        {"synth.rows", std::to_string(spec.rows)},
        {"synth.cols", std::to_string(spec.cols)},
        {"synth.margin_px", std::to_string(spec.margin_px)},
        {"synth.pitch_um", format_exact(spec.pitch_um)},
        {"synth.base_width_um", format_exact(spec.base_width_um)},
        {"synth.width_drift_um_per_frame", format_exact(spec.width_drift_um_per_frame)},
        {"synth.peak_height_um", format_exact(spec.peak_height_um)},
        {"synth.cross_section", "gaussian"},
        {"synth.overspray_noise_sd", format_exact(spec.overspray_noise_sd)},
        {"synth.om_speckle_sd", format_exact(spec.om_speckle_sd)},
        {"synth.om_background", format_exact(spec.om_background)},
        {"synth.om_saturation", format_exact(spec.om_saturation)},
        {"synth.satellites_per_line", std::to_string(spec.satellites_per_line)},
        {"synth.satellite_height_frac", format_exact(spec.satellite_height_frac)},
        {"synth.satellite_radius_px", format_exact(spec.satellite_radius_px)},
        {"synth.duration_h", format_exact(spec.duration_h)},
        {"synth.max_offset", "0"},
        {"register.n_lines", std::to_string(reg.n_lines)},
        {"register.max_shift", std::to_string(reg.align.max_shift)},
        {"register.warn_threshold", format_exact(reg.align.warn_threshold)},
        {"register.roi_rows", std::to_string(reg.roi_rows)},
        {"register.roi_cols", std::to_string(reg.roi_cols)},
        {"register.reference", "om"},
        {"schedule.steps", "100"},
        {"schedule.beta_start", "0.0001"},
        {"schedule.beta_end", "0.02"},
        {"schedule.kind", "linear"},
        {"fusion.eta", "0"},
        {"fusion.psi", "0"},
        {"fusion.clamp_output", "true"},
        {"fusion.dump_trajectory", "0"},
        {"score.kind", "gmm"},
        {"score.bandwidth", "0.05"},
        {"score.sigma0_sq", "0.01"},
        {"score.patch_dir", ""},
        {"ssim.window", std::to_string(ssim.window)},
        {"ssim.stride", std::to_string(ssim.stride)},
        {"ssim.c1", format_exact(ssim.c1)},
        {"ssim.c2", format_exact(ssim.c2)},
        {"ssim.c3", format_exact(ssim.c3)},
        {"ssim.aggregate", "mean"},
        {"tune.eta_grid", "0:100:11"},
        {"tune.psi_grid", "0:100:11"},
        {"tune.psi0", "0"},
        {"tune.max_pairs", "0"},
        {"dt.line", "0"},
        {"dt.axis", "rows"},
        {"dt.band", "all"},
    };
  }();
  return table;
}

}  // namespace

RunConfig::RunConfig() : values_(defaults()) {}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, fmt::format("cannot open config {}", path.string()));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError,
                  fmt::format("{}:{}: expected 'section.key = value'", path.string(), line_no));
    }
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!values_.contains(key)) {
    throw Error(ErrorCode::ConfigError, fmt::format("unknown configuration key '{}'", key));
  }
  values_[key] = value;
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw Error(ErrorCode::ConfigError, fmt::format("unknown configuration key '{}'", key));
  }
  return it->second;
}

std::string RunConfig::canonical_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += fmt::format("{} = {}\n", k, v);
  return out;
}

double RunConfig::get_double(const std::string& key) const {
  const std::string& s = get(key);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    bad(key, s, "expected a finite number");
  }
  return v;
}

std::int64_t RunConfig::get_int(const std::string& key) const {
  const std::string& s = get(key);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad(key, s, "expected an integer");
  return v;
}

std::size_t RunConfig::get_size(const std::string& key) const {
  const auto v = get_int(key);
  if (v < 0) bad(key, get(key), "expected a nonnegative integer");
  return static_cast<std::size_t>(v);
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& s = get(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  bad(key, s, "expected true or false");
}

TuningGrid RunConfig::get_grid(const std::string& key) const {
  const std::string& s = get(key);
  const auto c1 = s.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : s.find(':', c1 + 1);
  if (c2 == std::string::npos) bad(key, s, "expected LO:HI:N");
  TuningGrid grid;
  RunConfig scratch;
  scratch.values_ = {{"lo", s.substr(0, c1)},
                     {"hi", s.substr(c1 + 1, c2 - c1 - 1)},
                     {"n", s.substr(c2 + 1)}};
  try {
    grid.lo = scratch.get_double("lo");
    grid.hi = scratch.get_double("hi");
    grid.n_points = scratch.get_size("n");
    grid.validate();
  } catch (const Error& e) {
    bad(key, s, e.what());
  }
  return grid;
}

std::uint64_t RunConfig::seed() const {
  return static_cast<std::uint64_t>(get_int("run.seed"));
}

CorpusSpec RunConfig::corpus_spec() const {
  CorpusSpec spec;
  spec.n_frames = get_size("synth.n_frames");
  spec.lines_per_frame = get_size("synth.lines_per_frame");
  spec.rows = get_size("synth.rows");
  spec.cols = get_size("synth.cols");
  spec.margin_px = get_size("synth.margin_px");
  spec.pitch_um = get_double("synth.pitch_um");
  spec.base_width_um = get_double("synth.base_width_um");
  spec.width_drift_um_per_frame = get_double("synth.width_drift_um_per_frame");
  spec.peak_height_um = get_double("synth.peak_height_um");
  if (get("synth.cross_section") != "gaussian") {
    bad("synth.cross_section", get("synth.cross_section"), "only 'gaussian' is supported");
  }
  spec.overspray_noise_sd = get_double("synth.overspray_noise_sd");
  spec.om_speckle_sd = get_double("synth.om_speckle_sd");
  spec.om_background = get_double("synth.om_background");
  spec.om_saturation = get_double("synth.om_saturation");
  spec.satellites_per_line = get_size("synth.satellites_per_line");
  spec.satellite_height_frac = get_double("synth.satellite_height_frac");
  spec.satellite_radius_px = get_double("synth.satellite_radius_px");
  spec.duration_h = get_double("synth.duration_h");
  spec.seed = seed();
  const auto max_offset = get_int("synth.max_offset");
  if (max_offset < 0) bad("synth.max_offset", get("synth.max_offset"), "must be >= 0");
  if (max_offset > 0) {
    Rng rng(Rng::derive(mix64(spec.seed), 0xFFFF'FFFFULL));
    for (std::size_t k = 0; k < spec.n_frames; ++k) {
      const auto dy = static_cast<int>(rng.uniform_int(-max_offset, max_offset));
      const auto dx = static_cast<int>(rng.uniform_int(-max_offset, max_offset));
      spec.injected_offsets.emplace_back(dy, dx);
    }
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, fmt::format("synth: {}", e.what()));
  }
  return spec;
}

RegistrationParams RunConfig::registration_params() const {
  RegistrationParams p;
  p.n_lines = get_size("register.n_lines");
  if (p.n_lines == 0) bad("register.n_lines", get("register.n_lines"), "must be >= 1");
  p.align.max_shift = static_cast<int>(get_size("register.max_shift"));
  p.align.warn_threshold = get_double("register.warn_threshold");
  p.roi_rows = get_size("register.roi_rows");
  p.roi_cols = get_size("register.roi_cols");
  if (p.roi_rows == 0 || p.roi_cols == 0) {
    bad("register.roi_rows", get("register.roi_rows"), "ROI dimensions must be positive");
  }
  const std::string& ref = get("register.reference");
  if (ref != "om" && ref != "cp") bad("register.reference", ref, "expected om or cp");
  p.cp_as_reference = ref == "cp";
  return p;
}

FusionConfig RunConfig::fusion_config() const {
  FusionConfig cfg;
  cfg.schedule.steps = static_cast<int>(get_int("schedule.steps"));
  cfg.schedule.beta_start = get_double("schedule.beta_start");
  cfg.schedule.beta_end = get_double("schedule.beta_end");
  if (get("schedule.kind") != "linear") {
    bad("schedule.kind", get("schedule.kind"), "only 'linear' is supported");
  }
  cfg.eta = get_double("fusion.eta");
  cfg.psi = get_double("fusion.psi");
  cfg.seed = seed();
  cfg.clamp_output = get_bool("fusion.clamp_output");
  cfg.trajectory_stride = static_cast<int>(get_size("fusion.dump_trajectory"));
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, fmt::format("fusion: {}", e.what()));
  }
  return cfg;
}

SsimParams RunConfig::ssim_params() const {
  SsimParams p;
  p.window = get_size("ssim.window");
  p.stride = get_size("ssim.stride");
  p.c1 = get_double("ssim.c1");
  p.c2 = get_double("ssim.c2");
  p.c3 = get_double("ssim.c3");
  const std::string& agg = get("ssim.aggregate");
  if (agg == "mean") {
    p.aggregate = SsimAggregate::Mean;
  } else if (agg == "sum") {
    p.aggregate = SsimAggregate::Sum;
  } else {
    bad("ssim.aggregate", agg, "expected mean or sum");
  }
  try {
    p.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, fmt::format("ssim: {}", e.what()));
  }
  return p;
}

ScoreKind RunConfig::score_kind() const {
  const std::string& kind = get("score.kind");
  if (kind == "gaussian") return ScoreKind::Gaussian;
  if (kind == "gmm") return ScoreKind::Gmm;
  bad("score.kind", kind, "expected gaussian or gmm");
}

ProfileAxis RunConfig::dt_axis() const {
  const std::string& axis = get("dt.axis");
  if (axis == "rows") return ProfileAxis::Rows;
  if (axis == "cols") return ProfileAxis::Cols;
  bad("dt.axis", axis, "expected rows or cols");
}

std::optional<IndexRange> RunConfig::dt_band() const {
  const std::string& band = get("dt.band");
  if (band == "all") return std::nullopt;
  const auto colon = band.find(':');
  if (colon == std::string::npos) bad("dt.band", band, "expected 'all' or LO:HI");
  RunConfig scratch;
  scratch.values_ = {{"lo", band.substr(0, colon)}, {"hi", band.substr(colon + 1)}};
  IndexRange range;
  try {
    range = {scratch.get_size("lo"), scratch.get_size("hi")};
  } catch (const Error&) {
    bad("dt.band", band, "expected 'all' or LO:HI");
  }
  if (range.begin >= range.end) bad("dt.band", band, "need LO < HI");
  return range;
}

void RunConfig::validate() const {
  (void)seed();
  (void)corpus_spec();
  (void)registration_params();
  (void)fusion_config();
  (void)ssim_params();
  (void)score_kind();
  (void)dt_axis();
  if (get_double("score.bandwidth") < 0.0) bad("score.bandwidth", get("score.bandwidth"), "must be >= 0");
  if (get_double("score.sigma0_sq") < 0.0) bad("score.sigma0_sq", get("score.sigma0_sq"), "must be >= 0");
  const TuningGrid psi_grid = get_grid("tune.psi_grid");
  (void)get_grid("tune.eta_grid");
  const double psi0 = get_double("tune.psi0");
  if (psi0 < psi_grid.lo || psi0 > psi_grid.hi) {
    bad("tune.psi0", get("tune.psi0"), "must lie inside tune.psi_grid");
  }
  (void)get_size("tune.max_pairs");
  (void)get_size("dt.line");
  (void)dt_band();
}

}  // namespace ajfuse::app

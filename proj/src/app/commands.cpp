// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#include "ajfuse/app/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <map>
#include <ostream>

#include <fmt/core.h>

#include "ajfuse/app/run_manifest.hpp"
#include "ajfuse/app/surface.hpp"
#include "ajfuse/diffusion.hpp"
#include "ajfuse/error.hpp"
#include "ajfuse/image_io.hpp"
#include "ajfuse/manifest.hpp"
#include "ajfuse/metrics.hpp"
#include "ajfuse/parallel.hpp"
#include "ajfuse/synthgen.hpp"
#include "ajfuse/tuning.hpp"
#include "json.hpp"

namespace ajfuse::app {

namespace {

constexpr const char* kPairsIndex = "pairs.csv";
constexpr const char* kRegistrationInfo = "registration.txt";
constexpr const char* kFusedIndex = "fused.csv";

std::string pair_id(std::size_t i) { return fmt::format("pair_{:03}", i); }

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot read {}", path.string()));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields{""};
    for (char c : line) {
      if (c == ',') {
        fields.emplace_back();
      } else if (c != '\r') {
        fields.back().push_back(c);
      }
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::map<std::string, std::string> read_key_values(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot read {}", path.string()));
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

template <typename T>
T parse_number(const std::string& s, const fs::path& source) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::IoError, fmt::format("{}: bad number '{}'", source.string(), s));
  }
  return v;
}

const std::string& field(const std::map<std::string, std::string>& kv, const std::string& key,
                         const fs::path& source) {
  const auto it = kv.find(key);
  if (it == kv.end()) {
    throw Error(ErrorCode::IoError, fmt::format("{}: missing '{}'", source.string(), key));
  }
  return it->second;
}

fs::path require_input(const CommandOptions& opt, std::string_view what) {
  if (opt.input.empty()) {
    throw Error(ErrorCode::ConfigError, fmt::format("--input is required: {}", what));
  }
  return opt.input;
}

Image midpoint(const RoiPair& pair) {
  Image mid = pair.roi_om;
  for (std::size_t i = 0; i < mid.size(); ++i) {
    mid.pixels[i] = 0.5 * (pair.roi_om.pixels[i] + pair.roi_cp.pixels[i]);
  }
  return mid;
}

void copy_registration_info(RunWriter& writer, const fs::path& registration_dir) {
  std::ifstream in(registration_dir / kRegistrationInfo, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "registration info missing");
  writer.write_text(kRegistrationInfo, std::string(std::istreambuf_iterator<char>(in),
                                                   std::istreambuf_iterator<char>()));
}

// ---------------------------------------------------------------------------

void cmd_synth(const CommandOptions& opt, RunWriter& writer, std::ostream& log) {
  const CorpusSpec spec = opt.config.corpus_spec();
  const SyntheticCorpus corpus = generate_corpus(spec);
  write_corpus(writer.dir(), corpus);
  for (std::size_t k = 0; k < corpus.om_frames.size(); ++k) {
    writer.adopt(fmt::format("om/frame_{:03}.pgm", k));
    writer.adopt(fmt::format("cp/frame_{:03}.csv", k));
    writer.adopt(fmt::format("cp/frame_{:03}.csv.meta", k));
  }
  writer.adopt("manifest.csv");
  writer.adopt("truth.csv");
  log << fmt::format("synth: {} frames x {} lines written to {}\n", spec.n_frames,
                     spec.lines_per_frame, writer.dir().string());
}

void cmd_register(const CommandOptions& opt, RunWriter& writer, std::ostream& log) {
  fs::path manifest = require_input(opt, "corpus manifest or directory");
  if (fs::is_directory(manifest)) manifest /= "manifest.csv";
  writer.add_input(manifest);
  LoadedCorpus corpus = load_corpus(manifest);
  for (const auto& e : read_manifest(manifest)) writer.add_input(manifest.parent_path() / e.path);

  const RegistrationParams params = opt.config.registration_params();
  const RegisteredCorpus reg =
      register_corpus(std::move(corpus.om_frames), std::move(corpus.cp_maps), params);

  std::string index =
      "pair_id,time_index,line_index,timestamp,dy,dx,score,warning,om_row,om_col,rows,cols,"
      "om_path,cp_path\n";
  for (std::size_t i = 0; i < reg.pairs.size(); ++i) {
    const RoiPair& p = reg.pairs[i];
    const std::string om_rel = fmt::format("pairs/{}_om.pgm", pair_id(i));
    const std::string cp_rel = fmt::format("pairs/{}_cp.pgm", pair_id(i));
    writer.write_image(om_rel, p.roi_om);
    writer.write_image(cp_rel, p.roi_cp);
    index += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", pair_id(i), p.time_index,
                         p.line_index, format_exact(p.timestamp_h), p.alignment.dy,
                         p.alignment.dx, format_exact(p.alignment.score),
                         p.alignment.warning ? 1 : 0, p.om_rows.begin, p.om_cols.begin,
                         p.om_rows.size(), p.om_cols.size(), om_rel, cp_rel);
  }
  writer.write_text(kPairsIndex, index);

  std::string alignment = "time_index,timestamp,dy,dx,score,warning\n";
  std::size_t warnings = 0;
  for (std::size_t k = 0; k < reg.frame_alignments.size(); ++k) {
    const auto& a = reg.frame_alignments[k];
    const double ts = std::find_if(reg.pairs.begin(), reg.pairs.end(), [&](const RoiPair& p) {
                        return p.time_index == k;
                      })->timestamp_h;
    alignment += fmt::format("{},{},{},{},{},{}\n", k, format_exact(ts), a.dy, a.dx,
                             format_exact(a.score), a.warning ? 1 : 0);
    warnings += a.warning ? 1 : 0;
  }
  writer.write_text("alignment.csv", alignment);

  const double pitch = reg.pairs.empty() ? kDefaultPitchUm : reg.pairs.front().roi_om.pitch_um;
  writer.write_text(kRegistrationInfo,
                    fmt::format("z_min = {}\nz_max = {}\npitch_um = {}\nn_pairs = {}\n",
                                format_exact(reg.height_range.z_min),
                                format_exact(reg.height_range.z_max), format_exact(pitch),
                                reg.pairs.size()));
  log << fmt::format("register: {} frames, {} ROI pairs, {} alignment warnings\n",
                     reg.frame_alignments.size(), reg.pairs.size(), warnings);
}

std::vector<RoiPair> load_pairs_for(const CommandOptions& opt, RunWriter& writer,
                                    HeightRange* range = nullptr) {
  const fs::path dir = require_input(opt, "registration directory");
  RegisteredPairs reg = load_registered(dir);
  writer.add_input(dir / kPairsIndex);
  writer.add_input(dir / kRegistrationInfo);
  if (range) *range = reg.height_range;
  return std::move(reg.pairs);
}

void cmd_tune(const CommandOptions& opt, RunWriter& writer, std::ostream& log) {
  std::vector<RoiPair> pairs = load_pairs_for(opt, writer);
  const std::size_t max_pairs = opt.config.get_size("tune.max_pairs");
  if (max_pairs > 0 && pairs.size() > max_pairs) pairs.resize(max_pairs);
  const auto score = build_score(opt.config, pairs);
  const TuningResult result =
      tune(pairs, opt.config.get_grid("tune.eta_grid"), opt.config.get_grid("tune.psi_grid"),
           opt.config.get_double("tune.psi0"), opt.config.fusion_config(), *score,
           opt.config.ssim_params());

  std::string stage1 = "eta,average_ssim\n";
  for (const auto& row : result.stage1) {
    stage1 += fmt::format("{},{}\n", format_exact(row.candidate), format_exact(row.average_ssim));
  }
  std::string stage2 = "psi,average_ssim\n";
  for (const auto& row : result.stage2) {
    stage2 += fmt::format("{},{}\n", format_exact(row.candidate), format_exact(row.average_ssim));
  }
  writer.write_text("stage1.csv", stage1);
  writer.write_text("stage2.csv", stage2);
  writer.write_text("summary.txt",
                    fmt::format("eta_star = {}\npsi_star = {}\npsi0 = {}\nn_pairs = {}\n"
                                "evaluations = {}\nscore = {}\n",
                                format_exact(result.eta_star), format_exact(result.psi_star),
                                format_exact(result.psi0), result.n_pairs, result.evaluations,
                                score->name()));
  log << fmt::format("tune: eta* = {}, psi* = {} over {} pairs\n", result.eta_star,
                     result.psi_star, result.n_pairs);
}

void cmd_fuse(const CommandOptions& opt, RunWriter& writer, std::ostream& log) {
  const std::vector<RoiPair> pairs = load_pairs_for(opt, writer);
  if (pairs.empty()) throw Error(ErrorCode::EmptyCorpus, "no ROI pairs to fuse");
  if (!opt.tuned.empty()) writer.add_input(opt.tuned);
  const FusionConfig cfg = opt.config.fusion_config();
  const SsimParams ssim = opt.config.ssim_params();
  const auto score = build_score(opt.config, pairs);

  const auto start = std::chrono::steady_clock::now();
  std::vector<FusionResult> results(pairs.size());
  std::vector<SsimReport> reports(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    try {
      Rng rng(Rng::derive(cfg.seed, i));
      results[i] = fuse_pair(pairs[i], cfg, *score, rng);
      reports[i] = fusion_ssim(pairs[i].roi_om, pairs[i].roi_cp, results[i].fused, ssim);
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("{}: {}", pair_id(i), e.what()));
    }
  });
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::string ssim_csv = "pair_id,ssim_om_f,ssim_cp_f,total\n";
  std::string index = "pair_id,time_index,line_index,timestamp,path\n";
  std::vector<double> totals;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string rel = fmt::format("fused/{}.pgm", pair_id(i));
    writer.write_image(rel, results[i].fused);
    for (const auto& snap : results[i].trajectory) {
      writer.write_image(fmt::format("trajectory/{}/f0hat_t{:03}.pgm", pair_id(i), snap.t),
                         snap.estimate.clamped_copy());
    }
    ssim_csv += fmt::format("{},{},{},{}\n", pair_id(i), format_exact(reports[i].ssim_om_f),
                            format_exact(reports[i].ssim_cp_f), format_exact(reports[i].total));
    index += fmt::format("{},{},{},{},{}\n", pair_id(i), pairs[i].time_index, pairs[i].line_index,
                         format_exact(pairs[i].timestamp_h), rel);
    totals.push_back(reports[i].total);
  }
  writer.write_text("ssim.csv", ssim_csv);
  writer.write_text(kFusedIndex, index);
  copy_registration_info(writer, opt.input);
  const double avg = average_ssim(totals);
  writer.write_text("summary.txt",
                    fmt::format("eta = {}\npsi = {}\naverage_ssim = {}\nn_pairs = {}\n",
                                format_exact(cfg.eta), format_exact(cfg.psi), format_exact(avg),
                                pairs.size()));
  log << fmt::format("fuse: {} pairs at eta={} psi={}, average SSIM {:.4f} ({:.2f} s)\n",
                     pairs.size(), cfg.eta, cfg.psi, avg, elapsed);
}

void cmd_ablate(const CommandOptions& opt, RunWriter& writer, std::ostream& log) {
  const std::vector<RoiPair> pairs = load_pairs_for(opt, writer);
  if (pairs.empty()) throw Error(ErrorCode::EmptyCorpus, "no ROI pairs to compare");
  if (!opt.tuned.empty()) writer.add_input(opt.tuned);
  const FusionConfig cfg = opt.config.fusion_config();
  const SsimParams ssim = opt.config.ssim_params();
  const auto score = build_score(opt.config, pairs);

  const double diffusion =
      evaluate_candidates(pairs, {{cfg.eta, cfg.psi}}, cfg, *score, ssim).front();
  std::vector<double> baseline_totals(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const Image fused = fuse_baseline(pairs[i], cfg.eta, cfg.psi);
    baseline_totals[i] = fusion_ssim(pairs[i].roi_om, pairs[i].roi_cp, fused, ssim).total;
  });
  const double baseline = average_ssim(baseline_totals);

  writer.write_text("ablation.csv", fmt::format("method,average_ssim\ndiffusion,{}\nbaseline,{}\n",
                                                format_exact(diffusion), format_exact(baseline)));
  writer.write_text("summary.txt",
                    fmt::format("eta = {}\npsi = {}\nn_pairs = {}\ndelta = {}\n",
                                format_exact(cfg.eta), format_exact(cfg.psi), pairs.size(),
                                format_exact(diffusion - baseline)));
  log << fmt::format("ablate: diffusion {:.4f} vs baseline {:.4f} (delta {:+.4f})\n", diffusion,
                     baseline, diffusion - baseline);
}

void cmd_evaluate(const CommandOptions& opt, RunWriter& writer, std::ostream& log) {
  const std::vector<RoiPair> pairs = load_pairs_for(opt, writer);
  if (opt.fused.empty()) throw Error(ErrorCode::ConfigError, "--fused is required");
  const SsimParams ssim = opt.config.ssim_params();
  writer.add_input(opt.fused / kFusedIndex);
  const auto rows = read_csv(opt.fused / kFusedIndex);
  std::map<std::string, fs::path> fused_paths;
  for (const auto& r : rows) {
    if (r.size() != 5) throw Error(ErrorCode::IoError, "malformed fused index");
    fused_paths[r[0]] = opt.fused / r[4];
  }
  std::string csv = "pair_id,ssim_om_f,ssim_cp_f,total\n";
  std::vector<double> totals;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto it = fused_paths.find(pair_id(i));
    if (it == fused_paths.end()) {
      throw Error(ErrorCode::IoError, fmt::format("no fused image for {}", pair_id(i)));
    }
    writer.add_input(it->second);
    const Image fused = read_pgm(it->second, pairs[i].roi_om.pitch_um);
    const SsimReport r = fusion_ssim(pairs[i].roi_om, pairs[i].roi_cp, fused, ssim);
    csv += fmt::format("{},{},{},{}\n", pair_id(i), format_exact(r.ssim_om_f),
                       format_exact(r.ssim_cp_f), format_exact(r.total));
    totals.push_back(r.total);
  }
  writer.write_text("ssim.csv", csv);
  log << fmt::format("evaluate: {} pairs, average SSIM {:.4f}\n", pairs.size(),
                     average_ssim(totals));
}

void cmd_export_dt(const CommandOptions& opt, RunWriter& writer, std::ostream& log) {
  const fs::path dir = require_input(opt, "fused directory");
  writer.add_input(dir / kFusedIndex);
  writer.add_input(dir / kRegistrationInfo);
  const auto info = read_key_values(dir / kRegistrationInfo);
  const HeightRange range{
      parse_number<double>(field(info, "z_min", dir / kRegistrationInfo), dir),
      parse_number<double>(field(info, "z_max", dir / kRegistrationInfo), dir)};
  const double pitch = parse_number<double>(field(info, "pitch_um", dir / kRegistrationInfo), dir);
  const std::size_t line = opt.config.get_size("dt.line");

  struct Entry {
    std::size_t time_index;
    double t_h;
    fs::path path;
  };
  std::vector<Entry> entries;
  for (const auto& r : read_csv(dir / kFusedIndex)) {
    if (r.size() != 5) throw Error(ErrorCode::IoError, "malformed fused index");
    if (parse_number<std::size_t>(r[2], dir) != line) continue;
    entries.push_back({parse_number<std::size_t>(r[1], dir), parse_number<double>(r[3], dir),
                       dir / r[4]});
  }
  if (entries.empty()) {
    throw Error(ErrorCode::EmptyCorpus, fmt::format("no fused images for line {}", line));
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.time_index < b.time_index; });
  std::vector<SurfaceFrame> frames;
  for (const auto& e : entries) {
    writer.add_input(e.path);
    frames.push_back({e.t_h, read_pgm(e.path, pitch)});
  }
  const SurfaceStack stack(std::move(frames), opt.config.dt_axis(), opt.config.dt_band(), range);
  writer.write_text("surface.csv", stack.to_csv());
  log << fmt::format("export-dt: {} frames x {} samples\n", stack.frames().size(),
                     stack.profile_length());
}

}  // namespace

RegisteredPairs load_registered(const fs::path& dir) {
  RegisteredPairs out;
  const fs::path info_path = dir / kRegistrationInfo;
  const auto info = read_key_values(info_path);
  out.height_range = {parse_number<double>(field(info, "z_min", info_path), info_path),
                      parse_number<double>(field(info, "z_max", info_path), info_path)};
  const double pitch = parse_number<double>(field(info, "pitch_um", info_path), info_path);
  const fs::path index = dir / kPairsIndex;
  for (const auto& r : read_csv(index)) {
    if (r.size() != 14) throw Error(ErrorCode::IoError, fmt::format("malformed {}", index.string()));
    RoiPair p;
    p.time_index = parse_number<std::size_t>(r[1], index);
    p.line_index = parse_number<std::size_t>(r[2], index);
    p.timestamp_h = parse_number<double>(r[3], index);
    p.alignment.dy = parse_number<int>(r[4], index);
    p.alignment.dx = parse_number<int>(r[5], index);
    p.alignment.score = parse_number<double>(r[6], index);
    p.alignment.warning = r[7] == "1";
    const auto row0 = parse_number<std::size_t>(r[8], index);
    const auto col0 = parse_number<std::size_t>(r[9], index);
    p.om_rows = {row0, row0 + parse_number<std::size_t>(r[10], index)};
    p.om_cols = {col0, col0 + parse_number<std::size_t>(r[11], index)};
    p.roi_om = read_pgm(dir / r[12], pitch);
    p.roi_cp = read_pgm(dir / r[13], pitch);
    require_same_shape(p.roi_om, p.roi_cp, fmt::format("{} ROIs", r[0]));
    out.pairs.push_back(std::move(p));
  }
  return out;
}

std::unique_ptr<ScoreModel> build_score(const RunConfig& config,
                                        const std::vector<RoiPair>& pairs) {
  std::vector<Image> bank;
  const std::string& patch_dir = config.get("score.patch_dir");
  if (!patch_dir.empty()) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(patch_dir)) {
      if (e.path().extension() == ".pgm") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    const double pitch = pairs.empty() ? kDefaultPitchUm : pairs.front().roi_om.pitch_um;
    for (const auto& f : files) bank.push_back(read_pgm(f, pitch));
  } else {
    for (const auto& p : pairs) bank.push_back(midpoint(p));
  }
  if (bank.empty()) throw Error(ErrorCode::EmptyCorpus, "no images to build the score model from");

  if (config.score_kind() == ScoreKind::Gmm) {
    const double bw = config.get_double("score.bandwidth");
    return std::make_unique<GmmScore>(GmmScoreParams{std::move(bank), bw * bw});
  }
  Image mu = bank.front();
  std::fill(mu.pixels.begin(), mu.pixels.end(), 0.0);
  for (const auto& img : bank) {
    require_same_shape(mu, img, "gaussian score mean");
    for (std::size_t i = 0; i < mu.size(); ++i) mu.pixels[i] += img.pixels[i];
  }
  for (double& v : mu.pixels) v /= static_cast<double>(bank.size());
  return std::make_unique<GaussianScore>(
      GaussianScoreParams{std::move(mu), config.get_double("score.sigma0_sq")});
}

TunedValues read_tuned_summary(const fs::path& path) {
  const auto kv = read_key_values(path);
  return {parse_number<double>(field(kv, "eta_star", path), path),
          parse_number<double>(field(kv, "psi_star", path), path)};
}

int run_command(const CommandOptions& options, std::ostream& log, std::ostream& err) {
  CommandOptions opt = options;
  try {
    // Tuned weights become part of the effective configuration, so the run
    // manifest and --check see the values actually used.
    if (!opt.tuned.empty()) {
      const TunedValues tuned = read_tuned_summary(opt.tuned);
      opt.config.set("fusion.eta", format_exact(tuned.eta));
      opt.config.set("fusion.psi", format_exact(tuned.psi));
    }
    opt.config.validate();
    if (opt.out.empty()) throw Error(ErrorCode::ConfigError, "--out is required");
    if (opt.check) {
      check_run(opt.out, opt.command, opt.config);
      log << fmt::format("{}: {} is consistent with the configuration\n", opt.command,
                         opt.out.string());
      return 0;
    }
    RunWriter writer(opt.out);
    if (opt.command == "synth") {
      cmd_synth(opt, writer, log);
    } else if (opt.command == "register") {
      cmd_register(opt, writer, log);
    } else if (opt.command == "tune") {
      cmd_tune(opt, writer, log);
    } else if (opt.command == "fuse") {
      cmd_fuse(opt, writer, log);
    } else if (opt.command == "ablate") {
      cmd_ablate(opt, writer, log);
    } else if (opt.command == "evaluate") {
      cmd_evaluate(opt, writer, log);
    } else if (opt.command == "export-dt") {
      cmd_export_dt(opt, writer, log);
    } else {
      throw Error(ErrorCode::ConfigError, fmt::format("unknown command '{}'", opt.command));
    }
    writer.finalize(opt.command, opt.config);
    return 0;
  } catch (const Error& e) {
    err << nlohmann::json{{"stage", opt.command},
                          {"error", std::string(to_string(e.code()))},
                          {"message", e.what()}}
               .dump()
        << '\n';
  } catch (const std::exception& e) {
    err << nlohmann::json{{"stage", opt.command}, {"error", "Internal"}, {"message", e.what()}}
               .dump()
        << '\n';
  }
  return 1;
}

}  // namespace ajfuse::app

#include "camfield/pipeline.hpp"

#include "camfield/image_io.hpp"
#include "camfield/parallel.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace camfield {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kCrossStream = 0x43524f5353564945ull;    // "CROSSVIE"
constexpr std::uint64_t kGuidanceStream = 0x4755494445414e43ull; // "GUIDANCE"
constexpr std::uint64_t kSplitStream = 0x53504c4954535452ull;    // "SPLITSTR"

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s = buf;
  if (s == "-0.0000") s = "0.0000";
  return s;
}

double wrap360(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  if (w >= 360.0) w -= 360.0;
  return w;
}

void check_range(const DegreeRange &r, const char *name) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.lo < r.hi)) {
    std::ostringstream msg;
    msg << name << " range [" << r.lo << ", " << r.hi << ") is empty or not finite";
    throw ConfigError(msg.str());
  }
}

void fill_terms(ManifestRecord &record, std::optional<TermLabel> &terms, const CameraParams &params) {
  try {
    terms = params_to_terms(params);
    record.roll_term = slug(terms->roll);
    record.pitch_term = slug(terms->pitch);
    record.fov_term = slug(terms->fov);
  } catch (const DomainError &) {
    terms.reset();
    record.roll_term = record.pitch_term = record.fov_term = "n/a";
  }
}

ViewArtifacts render_artifacts(const EquirectPanorama &pano, const CameraParams &params,
                               const SamplingConfig &config, const std::string &pano_id,
                               const std::string &id, RecordKind kind, const fs::path &out_root,
                               const std::string &split, unsigned threads) {
  ViewArtifacts a;
  a.view = render_view(pano, params, config.size, threads);
  a.map = encode_camera_map(field_from_params(params, config.size, threads));

  ManifestRecord &r = a.record;
  r.id = id;
  r.pano = pano_id;
  r.kind = kind;
  r.split = split;
  r.roll = rad2deg(params.roll);
  r.pitch = rad2deg(params.pitch);
  r.yaw = rad2deg(params.yaw);
  r.vfov = rad2deg(params.vfov);
  fill_terms(r, a.terms, params);
  r.image = "images/" + id + ".png";
  r.map = "maps/" + id + ".pfld";

  if (!out_root.empty()) {
    fs::create_directories(out_root / "images");
    fs::create_directories(out_root / "maps");
    write_png(out_root / r.image, a.view.pixels);
    write_camera_map(out_root / r.map, a.map);
  }
  return a;
}

} // namespace

void validate(const SamplingConfig &config) {
  check_range(config.roll, "roll");
  check_range(config.pitch, "pitch");
  check_range(config.vfov, "vfov");
  check_range(config.yaw, "yaw");
  if (config.vfov.lo <= 0.0 || config.vfov.hi >= 180.0) {
    throw ConfigError("vfov range must lie inside (0, 180) degrees");
  }
  if (config.size.width < 1 || config.size.height < 1) {
    throw ConfigError("output size must be positive");
  }
  if (config.min_crops < 1 || config.pano_width_per_crop < 1) {
    throw ConfigError("crop rule parameters must be positive");
  }
}

std::uint64_t sub_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) + index);
}

SampleRng::SampleRng(std::uint64_t seed) : engine_(seed) {}

double SampleRng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::vector<CameraParams> sample_configs(const SamplingConfig &config, std::size_t n) {
  validate(config);
  if (n < 1) throw ConfigError("sample count must be at least 1");
  std::vector<CameraParams> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    SampleRng rng(sub_seed(config.seed, i));
    const double roll = rng.uniform(config.roll);
    const double pitch = rng.uniform(config.pitch);
    const double vfov = rng.uniform(config.vfov);
    out.push_back(CameraParams::from_degrees(roll, pitch, 0.0, vfov));
  }
  return out;
}

int crops_per_panorama(int pano_width, const SamplingConfig &config) {
  return std::max(config.min_crops, pano_width / config.pano_width_per_crop);
}

int crops_per_panorama(const EquirectPanorama &pano, const SamplingConfig &config) {
  return crops_per_panorama(pano.width(), config);
}

std::string_view to_string(RecordKind kind) {
  switch (kind) {
  case RecordKind::Single: return "single";
  case RecordKind::CrossInitial: return "cross-initial";
  case RecordKind::CrossTarget: return "cross-target";
  case RecordKind::GuidanceInitial: return "guidance-initial";
  case RecordKind::GuidanceCandidate: return "guidance-candidate";
  }
  return {};
}

std::optional<RecordKind> record_kind_from_string(std::string_view s) {
  for (RecordKind k : {RecordKind::Single, RecordKind::CrossInitial, RecordKind::CrossTarget,
                       RecordKind::GuidanceInitial, RecordKind::GuidanceCandidate}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string format_record(const ManifestRecord &r) {
  std::string out;
  auto kv = [&](std::string_view key, const std::string &value) {
    if (!out.empty()) out += ' ';
    out.append(key).append("=").append(value);
  };
  kv("id", r.id);
  kv("pano", r.pano);
  kv("kind", std::string(to_string(r.kind)));
  kv("split", r.split);
  kv("roll", fixed4(r.roll));
  kv("pitch", fixed4(r.pitch));
  kv("yaw", fixed4(r.yaw));
  kv("vfov", fixed4(r.vfov));
  kv("roll_term", r.roll_term);
  kv("pitch_term", r.pitch_term);
  kv("fov_term", r.fov_term);
  kv("image", r.image);
  kv("map", r.map);
  kv("partner", r.partner);
  kv("dpitch", r.dpitch ? fixed4(*r.dpitch) : "");
  kv("dyaw", r.dyaw ? fixed4(*r.dyaw) : "");
  kv("candidates", r.candidates ? std::to_string(*r.candidates) : "");
  kv("caption", r.caption);
  return out;
}

ManifestRecord parse_record(const std::string &line) {
  ManifestRecord r;
  bool have_id = false, have_roll = false, have_pitch = false, have_vfov = false;
  std::size_t pos = 0;
  auto number = [&](const std::string &key, const std::string &value) {
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception &) {
      throw ConfigError("manifest field " + key + " has non-numeric value '" + value + "'");
    }
  };
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size()) break;
    const std::size_t eq = line.find('=', pos);
    if (eq == std::string::npos) {
      throw ConfigError("manifest token without '=': " + line.substr(pos));
    }
    const std::string key = line.substr(pos, eq - pos);
    std::size_t end = key == "caption" ? line.size() : line.find(' ', eq + 1);
    if (end == std::string::npos) end = line.size();
    const std::string value = line.substr(eq + 1, end - eq - 1);
    pos = end;

    if (key == "id") { r.id = value; have_id = true; }
    else if (key == "pano") r.pano = value;
    else if (key == "kind") {
      const auto k = record_kind_from_string(value);
      if (!k) throw ConfigError("unknown record kind '" + value + "'");
      r.kind = *k;
    }
    else if (key == "split") r.split = value;
    else if (key == "roll") { r.roll = number(key, value); have_roll = true; }
    else if (key == "pitch") { r.pitch = number(key, value); have_pitch = true; }
    else if (key == "yaw") r.yaw = number(key, value);
    else if (key == "vfov") { r.vfov = number(key, value); have_vfov = true; }
    else if (key == "roll_term") r.roll_term = value;
    else if (key == "pitch_term") r.pitch_term = value;
    else if (key == "fov_term") r.fov_term = value;
    else if (key == "image") r.image = value;
    else if (key == "map") r.map = value;
    else if (key == "partner") r.partner = value;
    else if (key == "dpitch") { if (!value.empty()) r.dpitch = number(key, value); }
    else if (key == "dyaw") { if (!value.empty()) r.dyaw = number(key, value); }
    else if (key == "candidates") {
      if (!value.empty()) r.candidates = static_cast<int>(number(key, value));
    }
    else if (key == "caption") r.caption = value;
    else throw ConfigError("unknown manifest key '" + key + "'");
  }
  if (!have_id || !have_roll || !have_pitch || !have_vfov) {
    throw ConfigError("manifest record needs id, roll, pitch and vfov: " + line);
  }
  return r;
}

void write_manifest(const fs::path &path, const std::vector<ManifestRecord> &records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const auto &r : records) out << format_record(r) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<ManifestRecord> read_manifest(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<ManifestRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    try {
      records.push_back(parse_record(line));
    } catch (const ConfigError &e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

ViewArtifacts build_single_view(const EquirectPanorama &pano, const CameraParams &params,
                                const SamplingConfig &config, const SampleContext &ctx,
                                unsigned threads) {
  return render_artifacts(pano, params, config, ctx.pano_id, ctx.sample_id, RecordKind::Single,
                          ctx.out_root, ctx.split, threads);
}

CrossViewPair build_cross_view(const EquirectPanorama &pano, const CameraParams &target,
                               const SamplingConfig &config, const SampleContext &ctx,
                               unsigned threads) {
  validate(target);
  const double yaw_deg = rad2deg(target.yaw);
  if (!(yaw_deg >= 0.0 && yaw_deg < 360.0)) {
    throw DomainError("cross-view target yaw must lie in [0, 360) degrees, got " +
                      std::to_string(yaw_deg));
  }
  const CameraParams standard{0.0, 0.0, 0.0, target.vfov};
  const std::string init_id = ctx.sample_id + "_init";
  const std::string tgt_id = ctx.sample_id + "_tgt";

  CrossViewPair pair{
      render_artifacts(pano, standard, config, ctx.pano_id, init_id, RecordKind::CrossInitial,
                       ctx.out_root, ctx.split, threads),
      render_artifacts(pano, target, config, ctx.pano_id, tgt_id, RecordKind::CrossTarget,
                       ctx.out_root, ctx.split, threads)};
  pair.initial.record.partner = tgt_id;
  pair.target.record.partner = init_id;
  pair.target.record.dpitch = rad2deg(target.pitch);
  pair.target.record.dyaw = yaw_deg;
  return pair;
}

GuidanceScorer index_stub_scorer() {
  return [](const std::vector<fs::path> &candidates) {
    std::vector<double> scores(candidates.size());
    for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = static_cast<double>(i);
    return scores;
  };
}

GuidanceScorer command_scorer(std::string command) {
  return [command = std::move(command)](const std::vector<fs::path> &candidates) {
    std::string cmd = command;
    for (const auto &p : candidates) cmd += " '" + p.string() + "'";
    std::unique_ptr<FILE, int (*)(FILE *)> pipe(popen(cmd.c_str(), "r"), pclose);
    if (!pipe) throw std::runtime_error("cannot run scorer: " + command);
    std::string output;
    std::array<char, 256> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe.get())) output += buf.data();
    const int status = pclose(pipe.release());
    if (status != 0) {
      throw std::runtime_error("scorer '" + command + "' exited with status " +
                               std::to_string(status));
    }
    std::vector<double> scores;
    std::istringstream lines(output);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        scores.push_back(std::stod(line));
      } catch (const std::exception &) {
        throw std::runtime_error("scorer printed a non-numeric line: " + line);
      }
    }
    if (scores.size() != candidates.size()) {
      throw std::runtime_error("scorer returned " + std::to_string(scores.size()) +
                               " scores for " + std::to_string(candidates.size()) + " candidates");
    }
    return scores;
  };
}

GuidanceSet build_guidance_candidates(const EquirectPanorama &pano, double initial_pitch_deg,
                                      int n_candidates, std::uint64_t seed,
                                      const SamplingConfig &config, const SampleContext &ctx,
                                      const GuidanceScorer &scorer, unsigned threads) {
  if (!(std::abs(initial_pitch_deg) <= kGuidanceRange)) {
    throw DomainError("guidance initial pitch must lie in [-20, 20] degrees, got " +
                      std::to_string(initial_pitch_deg));
  }
  if (n_candidates < 1) throw DomainError("guidance needs at least one candidate");
  validate(config);

  SampleRng rng(seed);
  const double vfov_deg = rng.uniform(config.vfov);
  const CameraParams initial = CameraParams::from_degrees(0.0, initial_pitch_deg, 0.0, vfov_deg);

  GuidanceSet set;
  const std::string init_id = ctx.sample_id + "_init";
  set.initial = render_artifacts(pano, initial, config, ctx.pano_id, init_id,
                                 RecordKind::GuidanceInitial, ctx.out_root, ctx.split, threads);

  std::vector<fs::path> paths;
  for (int i = 0; i < n_candidates; ++i) {
    const GuidanceOffset off{rng.uniform(-kGuidanceRange, kGuidanceRange),
                             rng.uniform(-kGuidanceRange, kGuidanceRange)};
    const CameraParams cand = CameraParams::from_degrees(
        0.0, initial_pitch_deg + off.dpitch, wrap360(off.dyaw), vfov_deg);
    char suffix[32];
    std::snprintf(suffix, sizeof suffix, "_c%02d", i);
    ViewArtifacts a = render_artifacts(pano, cand, config, ctx.pano_id, ctx.sample_id + suffix,
                                       RecordKind::GuidanceCandidate, ctx.out_root, ctx.split,
                                       threads);
    a.record.partner = init_id;
    a.record.dpitch = off.dpitch;
    a.record.dyaw = off.dyaw;
    paths.push_back(ctx.out_root / a.record.image);
    set.offsets.push_back(off);
    set.candidates.push_back(std::move(a));
  }

  const std::vector<double> scores = scorer(paths);
  if (scores.size() != set.candidates.size()) {
    throw std::runtime_error("guidance scorer returned the wrong number of scores");
  }
  int winner = 0;
  for (int i = 1; i < n_candidates; ++i) {
    if (scores[i] >= scores[winner]) winner = i;
  }
  set.label = {set.offsets[winner], winner, n_candidates};
  set.initial.record.partner = set.candidates[winner].record.id;
  set.initial.record.dpitch = set.label.offset.dpitch;
  set.initial.record.dyaw = set.label.offset.dyaw;
  set.initial.record.candidates = n_candidates;
  return set;
}

std::string sanitize_id(std::string_view raw) {
  std::string out(raw);
  for (char &c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) c = '_';
  }
  if (out.empty()) out = "pano";
  return out;
}

std::vector<ManifestRecord> run_pipeline(const std::vector<PanoramaSource> &panoramas,
                                         const PipelineOptions &options) {
  const SamplingConfig &cfg = options.sampling;
  validate(cfg);
  if (options.out.empty()) throw ConfigError("pipeline needs an output directory");
  if (options.crops && *options.crops < 1) throw ConfigError("crop count must be at least 1");
  if (options.guidance && options.candidates < 1) {
    throw ConfigError("guidance needs at least one candidate");
  }
  if (!(options.val_fraction >= 0.0 && options.val_fraction <= 1.0)) {
    throw ConfigError("validation fraction must lie in [0, 1]");
  }
  fs::create_directories(options.out / "images");
  fs::create_directories(options.out / "maps");

  const GuidanceScorer scorer = options.scorer_command.empty()
                                    ? index_stub_scorer()
                                    : command_scorer(options.scorer_command);

  enum class Job { Single, Cross, Guidance };
  struct WorkItem {
    Job job;
    std::size_t pano;
    std::uint64_t index; // global sample index, or panorama index for guidance
  };
  std::vector<WorkItem> items;
  std::vector<std::string> splits;
  std::uint64_t sample_index = 0;
  for (std::size_t p = 0; p < panoramas.size(); ++p) {
    SampleRng split_rng(sub_seed(cfg.seed ^ kSplitStream, fnv1a(panoramas[p].id)));
    splits.push_back(split_rng.uniform01() < options.val_fraction ? "val" : "train");
    const int crops = options.crops.value_or(crops_per_panorama(panoramas[p].pano, cfg));
    for (int k = 0; k < crops; ++k, ++sample_index) {
      items.push_back({Job::Single, p, sample_index});
      if (options.cross_view) items.push_back({Job::Cross, p, sample_index});
    }
    if (options.guidance) items.push_back({Job::Guidance, p, p});
  }

  std::vector<std::vector<ManifestRecord>> results(items.size());
  parallel_for(items.size(), options.threads, [&](std::size_t i) {
    const WorkItem &item = items[i];
    const PanoramaSource &src = panoramas[item.pano];
    char num[32];
    std::snprintf(num, sizeof num, "%06llu", static_cast<unsigned long long>(item.index));
    SampleContext ctx{src.id, {}, options.out, splits[item.pano]};
    auto &out = results[i];
    switch (item.job) {
    case Job::Single: {
      ctx.sample_id = src.id + "_s" + num;
      SampleRng rng(sub_seed(cfg.seed, item.index));
      const double roll = rng.uniform(cfg.roll);
      const double pitch = rng.uniform(cfg.pitch);
      const double vfov = rng.uniform(cfg.vfov);
      out.push_back(build_single_view(src.pano, CameraParams::from_degrees(roll, pitch, 0.0, vfov),
                                      cfg, ctx)
                        .record);
      break;
    }
    case Job::Cross: {
      ctx.sample_id = src.id + "_x" + num;
      SampleRng rng(sub_seed(cfg.seed ^ kCrossStream, item.index));
      const double roll = rng.uniform(cfg.roll);
      const double pitch = rng.uniform(cfg.pitch);
      const double vfov = rng.uniform(cfg.vfov);
      const double yaw = wrap360(rng.uniform(cfg.yaw));
      const CrossViewPair pair = build_cross_view(
          src.pano, CameraParams::from_degrees(roll, pitch, yaw, vfov), cfg, ctx);
      out.push_back(pair.initial.record);
      out.push_back(pair.target.record);
      break;
    }
    case Job::Guidance: {
      ctx.sample_id = src.id + "_g" + num;
      const std::uint64_t base = sub_seed(cfg.seed ^ kGuidanceStream, item.index);
      SampleRng rng(base);
      const double initial_pitch = rng.uniform(-kGuidanceRange, kGuidanceRange);
      const GuidanceSet set = build_guidance_candidates(
          src.pano, initial_pitch, options.candidates, sub_seed(base, 1), cfg, ctx, scorer);
      out.push_back(set.initial.record);
      for (const auto &c : set.candidates) out.push_back(c.record);
      break;
    }
    }
  });

  std::vector<ManifestRecord> records;
  for (auto &r : results) {
    for (auto &rec : r) records.push_back(std::move(rec));
  }
  write_manifest(options.out / "manifest.txt", records);
  return records;
}

} // namespace camfield

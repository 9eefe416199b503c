#pragma once

// Dataset construction: parameter sampling, single-view samples, cross-view
// pairs, photographic-guidance candidates and the line-oriented manifest.

#include "camfield/panorama.hpp"
#include "camfield/perspective_field.hpp"
#include "camfield/terms.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace camfield {

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Half-open [lo, hi) in degrees.
struct DegreeRange {
  double lo;
  double hi;
};

struct SamplingConfig {
  DegreeRange roll{-45.0, 45.0};
  DegreeRange pitch{-45.0, 45.0};
  DegreeRange vfov{20.0, 105.0};
  DegreeRange yaw{0.0, 360.0};
  int min_crops = 4;
  int pano_width_per_crop = 1024;
  PixelGridSpec size{512, 512};
  std::uint64_t seed = 0;
};

/// Throws ConfigError for empty ranges, vfov outside (0, 180) or a bad size.
void validate(const SamplingConfig &config);

/// Per-item seed: splitmix64(splitmix64(master) + index).
std::uint64_t sub_seed(std::uint64_t master, std::uint64_t index);

/// Uniform doubles from a 64-bit Mersenne Twister seeded with a sub-seed.
/// The 53-bit mantissa conversion is done here so that the stream is the
/// same on every standard library.
class SampleRng {
public:
  explicit SampleRng(std::uint64_t seed);
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double uniform(DegreeRange r) { return uniform(r.lo, r.hi); }

private:
  std::mt19937_64 engine_;
};

/// Sample i draws roll, pitch, vfov (in that order) from sub_seed(seed, i).
/// Yaw is 0.
std::vector<CameraParams> sample_configs(const SamplingConfig &config, std::size_t n);

/// max(min_crops, floor(W / pano_width_per_crop)).
int crops_per_panorama(const EquirectPanorama &pano, const SamplingConfig &config = {});
int crops_per_panorama(int pano_width, const SamplingConfig &config = {});

enum class RecordKind { Single, CrossInitial, CrossTarget, GuidanceInitial, GuidanceCandidate };

std::string_view to_string(RecordKind kind);
std::optional<RecordKind> record_kind_from_string(std::string_view s);

struct ManifestRecord {
  std::string id;
  std::string pano;
  RecordKind kind = RecordKind::Single;
  std::string split = "train";
  double roll = 0.0; // degrees
  double pitch = 0.0;
  double yaw = 0.0;
  double vfov = 0.0;
  std::string roll_term, pitch_term, fov_term; // "n/a" outside the term table
  std::string image;                           // relative to the output root
  std::string map;
  std::string partner;
  std::optional<double> dpitch, dyaw;
  std::optional<int> candidates;
  std::string caption;

  CameraParams params() const { return CameraParams::from_degrees(roll, pitch, yaw, vfov); }
};

/// Fixed key order, space separated, degrees with 4 decimals. The caption is
/// always last and runs to the end of the line.
std::string format_record(const ManifestRecord &record);
ManifestRecord parse_record(const std::string &line);

void write_manifest(const std::filesystem::path &path, const std::vector<ManifestRecord> &records);
std::vector<ManifestRecord> read_manifest(const std::filesystem::path &path);

struct ViewArtifacts {
  RenderedView view;
  CameraMapEncoding map;
  std::optional<TermLabel> terms;
  ManifestRecord record;
};

/// Identifies a sample and where its files go (images/<id>.png, maps/<id>.pfld).
struct SampleContext {
  std::string pano_id;
  std::string sample_id;
  std::filesystem::path out_root;
  std::string split = "train";
};

ViewArtifacts build_single_view(const EquirectPanorama &pano, const CameraParams &params,
                                const SamplingConfig &config, const SampleContext &ctx,
                                unsigned threads = 1);

struct CrossViewPair {
  ViewArtifacts initial;
  ViewArtifacts target;
};

/// Initial view at the standard pose with the target's vfov; ids are
/// <sample_id>_init and <sample_id>_tgt.
CrossViewPair build_cross_view(const EquirectPanorama &pano, const CameraParams &target,
                               const SamplingConfig &config, const SampleContext &ctx,
                               unsigned threads = 1);

struct GuidanceOffset {
  double dpitch; // degrees
  double dyaw;
};

struct GuidanceLabel {
  GuidanceOffset offset;
  int winner = 0;
  int candidate_count = 0;
};

/// Receives candidate image paths, returns one score per candidate.
using GuidanceScorer = std::function<std::vector<double>(const std::vector<std::filesystem::path> &)>;

/// Not an aesthetic judgement: scores each candidate by its index, so the
/// last candidate always wins. Lets the pipeline run without a rating model.
GuidanceScorer index_stub_scorer();

/// Runs `command path...` through the shell and reads one score per line.
GuidanceScorer command_scorer(std::string command);

struct GuidanceSet {
  ViewArtifacts initial;
  std::vector<ViewArtifacts> candidates;
  std::vector<GuidanceOffset> offsets;
  GuidanceLabel label;
};

constexpr double kGuidanceRange = 20.0;

/// Initial view (roll 0, given pitch, yaw 0, vfov drawn from config) plus
/// n candidates perturbed by uniform offsets in [-20, 20]^2 degrees.
GuidanceSet build_guidance_candidates(const EquirectPanorama &pano, double initial_pitch_deg,
                                      int n_candidates, std::uint64_t seed,
                                      const SamplingConfig &config, const SampleContext &ctx,
                                      const GuidanceScorer &scorer, unsigned threads = 1);

struct PanoramaSource {
  std::string id;
  EquirectPanorama pano;
};

struct PipelineOptions {
  SamplingConfig sampling;
  std::optional<int> crops; // overrides crops_per_panorama
  bool cross_view = false;
  bool guidance = false;
  int candidates = 4;
  std::string scorer_command; // empty: index stub
  double val_fraction = 0.0;
  unsigned threads = 1;
  std::filesystem::path out;
};

/// Writes images/, maps/ and manifest.txt under options.out and returns the
/// records in manifest order. Output bytes do not depend on options.threads.
std::vector<ManifestRecord> run_pipeline(const std::vector<PanoramaSource> &panoramas,
                                         const PipelineOptions &options);

/// Replaces characters outside [A-Za-z0-9_-] with '_'.
std::string sanitize_id(std::string_view raw);

} // namespace camfield

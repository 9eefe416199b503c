#include "camfield/cli.hpp"

#include "camfield/calibrator.hpp"
#include "camfield/image_io.hpp"
#include "camfield/metrics.hpp"
#include "camfield/pipeline.hpp"
#include "camfield/terms.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

namespace camfield {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
  return s;
}

DegreeRange parse_range(const std::string &text, const char *name) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw ConfigError(std::string("--") + name + " expects LO,HI, got '" + text + "'");
  }
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception &) {
    throw ConfigError(std::string("--") + name + " expects two numbers, got '" + text + "'");
  }
}

/// key=value lines -> "--key value" tokens; booleans become bare flags.
std::vector<std::string> config_tokens(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value == "true") {
      tokens.push_back("--" + key);
    } else if (value != "false") {
      tokens.push_back("--" + key + "=" + value);
    }
  }
  return tokens;
}

PixelGridSpec square(int size) { return {size, size}; }

EquirectPanorama load_panorama(const std::string &path, int synthetic) {
  if (!path.empty()) return EquirectPanorama(read_png(path));
  return procedural_panorama(synthetic, PanoramaPattern::Checker);
}

struct PoseFlags {
  double roll = 0.0, pitch = 0.0, yaw = 0.0, fov = 60.0;
  int size = 512;

  void add(CLI::App *cmd, bool with_yaw) {
    cmd->add_option("--roll", roll, "roll in degrees")->capture_default_str();
    cmd->add_option("--pitch", pitch, "pitch in degrees")->capture_default_str();
    if (with_yaw) cmd->add_option("--yaw", yaw, "yaw in degrees")->capture_default_str();
    cmd->add_option("--fov", fov, "vertical field of view in degrees")->capture_default_str();
    cmd->add_option("--size", size, "square output size in pixels")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
  CameraParams params() const { return CameraParams::from_degrees(roll, pitch, yaw, fov); }
};

std::vector<CameraParams> paired_params(const std::vector<ManifestRecord> &records) {
  std::vector<CameraParams> out;
  for (const auto &r : records) out.push_back(r.params());
  return out;
}

} // namespace

int cli_main(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Pinhole camera fields, calibration and dataset construction", "camfield"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  // render
  PoseFlags render_pose;
  std::string render_pano, render_out;
  int render_synthetic = 512;
  unsigned render_threads = 1;
  auto *render = app.add_subcommand("render", "render a pinhole view from a panorama");
  render_pose.add(render, true);
  render->add_option("--pano", render_pano, "equirectangular PNG (2:1)");
  render->add_option("--synthetic", render_synthetic, "height of the procedural panorama used without --pano")
      ->check(CLI::PositiveNumber);
  render->add_option("--out", render_out, "output PNG")->required();
  render->add_option("--threads", render_threads)->check(CLI::PositiveNumber);

  // field
  PoseFlags field_pose;
  std::string field_out;
  auto *field = app.add_subcommand("field", "write the camera map of a pose as PFLD");
  field_pose.add(field, false);
  field->add_option("--out", field_out, "output PFLD file")->required();

  // calibrate
  std::string calib_map;
  CalibrationSettings calib;
  auto *calibrate = app.add_subcommand("calibrate", "recover roll, pitch and vfov from a PFLD map");
  calibrate->add_option("--map", calib_map, "PFLD camera map")->required();
  calibrate->add_option("--max-iters", calib.max_iterations)->check(CLI::PositiveNumber)->capture_default_str();
  calibrate->add_option("--tol", calib.step_tolerance, "step-norm tolerance in radians")->capture_default_str();
  calibrate->add_option("--subgrid", calib.subgrid, "refinement subgrid per axis")->check(CLI::PositiveNumber)->capture_default_str();

  // terms
  PoseFlags terms_pose;
  std::string caption;
  bool want_caption = false;
  auto *terms = app.add_subcommand("terms", "map parameters to photographic terms");
  terms->add_option("--roll", terms_pose.roll)->required();
  terms->add_option("--pitch", terms_pose.pitch)->required();
  terms->add_option("--fov", terms_pose.fov)->required();
  terms->add_option("--caption", caption, "scene text; prints the reasoning skeleton")
      ->each([&](const std::string &) { want_caption = true; });

  // eval
  std::string eval_pred, eval_gt;
  int eval_field_size = 64;
  auto *eval = app.add_subcommand("eval", "compare predicted and ground-truth parameter files");
  eval->add_option("--pred", eval_pred, "manifest-format predictions")->required();
  eval->add_option("--gt", eval_gt, "manifest-format ground truth")->required();
  eval->add_option("--field-size", eval_field_size, "field resolution for up/latitude errors")
      ->check(CLI::PositiveNumber)->capture_default_str();

  // horizon
  PoseFlags horizon_pose;
  auto *horizon = app.add_subcommand("horizon", "horizon line endpoints for a pose");
  horizon_pose.add(horizon, false);

  // pipeline
  PipelineOptions pipe;
  std::string config_file, roll_range, pitch_range, fov_range, yaw_range;
  std::vector<std::string> pano_paths;
  int pipe_size = 512, pipe_synthetic = 0, count = 0;
  std::uint64_t seed = 0;
  auto *pipeline = app.add_subcommand("pipeline", "build a dataset with manifest");
  pipeline->add_option("--config", config_file, "key=value file mirroring these flags");
  pipeline->add_option("--seed", seed)->capture_default_str();
  pipeline->add_option("--count", count, "crops per panorama (default: adaptive)")->check(CLI::PositiveNumber);
  pipeline->add_option("--out", pipe.out, "output directory")->required();
  pipeline->add_option("--size", pipe_size)->check(CLI::PositiveNumber)->capture_default_str();
  pipeline->add_option("--roll-range", roll_range, "LO,HI degrees (default -45,45)");
  pipeline->add_option("--pitch-range", pitch_range, "LO,HI degrees (default -45,45)");
  pipeline->add_option("--fov-range", fov_range, "LO,HI degrees (default 20,105)");
  pipeline->add_option("--yaw-range", yaw_range, "LO,HI degrees (default 0,360)");
  pipeline->add_flag("--cross-view", pipe.cross_view, "add cross-view pairs");
  pipeline->add_flag("--guidance", pipe.guidance, "add photographic-guidance candidates");
  pipeline->add_option("--candidates", pipe.candidates)->check(CLI::PositiveNumber)->capture_default_str();
  pipeline->add_option("--scorer", pipe.scorer_command, "command scoring candidate images");
  pipeline->add_option("--val-fraction", pipe.val_fraction)->capture_default_str();
  pipeline->add_option("--threads", pipe.threads)->check(CLI::PositiveNumber)->capture_default_str();
  pipeline->add_option("--pano", pano_paths, "equirectangular PNG inputs")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  pipeline->add_option("--synthetic", pipe_synthetic, "add a procedural panorama of this height")
      ->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> argv = args;
    // Splice config-file tokens in front of the explicit pipeline flags so
    // that flags win.
    const auto sub = std::find(argv.begin(), argv.end(), "pipeline");
    if (sub != argv.end()) {
      std::string cfg;
      for (auto it = sub + 1; it != argv.end(); ++it) {
        if (*it == "--config" && it + 1 != argv.end()) cfg = *(it + 1);
        else if (it->rfind("--config=", 0) == 0) cfg = it->substr(9);
      }
      if (!cfg.empty()) {
        const auto tokens = config_tokens(cfg);
        argv.insert(sub + 1, tokens.begin(), tokens.end());
      }
    }
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n";
    const auto chosen = app.get_subcommands();
    err << (chosen.empty() ? app.help() : chosen.front()->help());
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*render) {
      const EquirectPanorama pano = load_panorama(render_pano, render_synthetic);
      const RenderedView view =
          render_view(pano, render_pose.params(), square(render_pose.size), render_threads);
      write_png(render_out, view.pixels);
      out << "wrote " << render_out << "\n";
    } else if (*field) {
      const auto map = encode_camera_map(field_from_params(field_pose.params(), square(field_pose.size)));
      write_camera_map(field_out, map);
      out << "wrote " << field_out << "\n";
    } else if (*calibrate) {
      const PerspectiveField f = decode_camera_map(read_camera_map(calib_map));
      const CalibrationResult r = calibrate_from_field(f, calib);
      out << "roll=" << fixed(rad2deg(r.params.roll), 4) << " pitch=" << fixed(rad2deg(r.params.pitch), 4)
          << " yaw=0.0000 vfov=" << fixed(rad2deg(r.params.vfov), 4)
          << " residual_rms_rad=" << r.residual_rms << " iterations=" << r.iterations
          << " converged=" << (r.converged ? "true" : "false") << "\n";
    } else if (*terms) {
      const CameraParams p = terms_pose.params();
      const TermLabel label = params_to_terms(p);
      if (want_caption) {
        out << caption_skeleton(p, caption) << "\n";
      } else {
        out << "roll: " << phrase(label.roll) << "\n";
        out << "pitch: " << phrase(label.pitch) << "\n";
        out << "fov: " << phrase(label.fov) << "\n";
      }
    } else if (*eval) {
      const auto pred = read_manifest(eval_pred);
      const auto gt = read_manifest(eval_gt);
      std::map<std::string, const ManifestRecord *> by_id;
      for (const auto &r : pred) by_id[r.id] = &r;
      std::vector<ManifestRecord> matched;
      for (const auto &r : gt) {
        const auto it = by_id.find(r.id);
        if (it == by_id.end()) throw std::runtime_error("no prediction for sample " + r.id);
        matched.push_back(*it->second);
      }
      const EvalReport report =
          evaluate(paired_params(matched), paired_params(gt), square(eval_field_size));
      out << format_report_table(report) << "\n" << format_report_kv(report);
    } else if (*horizon) {
      const HorizonLine line = horizon_from_params(horizon_pose.params(), square(horizon_pose.size));
      if (line.visible) {
        out << "visible start=" << fixed(line.start.x(), 3) << "," << fixed(line.start.y(), 3)
            << " end=" << fixed(line.end.x(), 3) << "," << fixed(line.end.y(), 3) << "\n";
      } else {
        out << "not-visible\n";
      }
    } else if (*pipeline) {
      SamplingConfig &cfg = pipe.sampling;
      cfg.seed = seed;
      cfg.size = square(pipe_size);
      if (!roll_range.empty()) cfg.roll = parse_range(roll_range, "roll-range");
      if (!pitch_range.empty()) cfg.pitch = parse_range(pitch_range, "pitch-range");
      if (!fov_range.empty()) cfg.vfov = parse_range(fov_range, "fov-range");
      if (!yaw_range.empty()) cfg.yaw = parse_range(yaw_range, "yaw-range");
      if (count > 0) pipe.crops = count;

      std::vector<PanoramaSource> sources;
      for (const auto &p : pano_paths) {
        sources.push_back({sanitize_id(fs::path(p).stem().string()), EquirectPanorama(read_png(p))});
      }
      if (pipe_synthetic > 0 || sources.empty()) {
        sources.push_back({"synthetic", procedural_panorama(pipe_synthetic > 0 ? pipe_synthetic : 1024,
                                                            PanoramaPattern::Checker)});
      }
      const auto records = run_pipeline(sources, pipe);
      out << "wrote " << records.size() << " records to " << (pipe.out / "manifest.txt").string() << "\n";
    }
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

} // namespace camfield

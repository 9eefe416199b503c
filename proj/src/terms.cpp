#include "camfield/terms.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace camfield {

namespace {

// Shared bins for roll and pitch: [-45,-20) [-20,-5) [-5,5] (5,20] (20,45].
constexpr DegreeInterval kTiltBins[5] = {
    {-45.0, -20.0, true, false}, {-20.0, -5.0, true, false}, {-5.0, 5.0, true, true},
    {5.0, 20.0, false, true},    {20.0, 45.0, false, true},
};
constexpr DegreeInterval kFovBins[4] = {
    {20.0, 35.0, true, false},
    {35.0, 65.0, true, false},
    {65.0, 90.0, true, false},
    {90.0, 105.0, true, true},
};

// Radian round trips leave values like 4.999999999999999 for 5 degrees.
double snap_degrees(double deg) { return std::round(deg * 1e9) / 1e9; }

template <std::size_t N>
std::size_t bin_index(const DegreeInterval (&bins)[N], double deg, const char *name) {
  const double d = snap_degrees(deg);
  for (std::size_t i = 0; i < N; ++i) {
    if (bins[i].contains(d)) return i;
  }
  std::ostringstream msg;
  msg << name << " = " << deg << " deg is outside the term table range ["
      << bins[0].lo << ", " << bins[N - 1].hi << "]";
  throw DomainError(msg.str());
}

std::string fmt_rad(double rad) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", rad);
  std::string s = buf;
  if (s == "-0.0000") s = "0.0000";
  return s;
}

} // namespace

std::string DegreeInterval::to_string() const {
  std::ostringstream out;
  out << (lo_closed ? '[' : '(') << lo << ", " << hi << (hi_closed ? ']' : ')');
  return out.str();
}

RollTerm roll_term_from_degrees(double roll_deg) {
  return static_cast<RollTerm>(bin_index(kTiltBins, roll_deg, "roll"));
}

PitchTerm pitch_term_from_degrees(double pitch_deg) {
  return static_cast<PitchTerm>(bin_index(kTiltBins, pitch_deg, "pitch"));
}

FovTerm fov_term_from_degrees(double vfov_deg) {
  return static_cast<FovTerm>(bin_index(kFovBins, vfov_deg, "vfov"));
}

TermLabel params_to_terms(const CameraParams &params) {
  validate(params);
  return {roll_term_from_degrees(rad2deg(params.roll)),
          pitch_term_from_degrees(rad2deg(params.pitch)),
          fov_term_from_degrees(rad2deg(params.vfov))};
}

DegreeInterval term_range(RollTerm t) { return kTiltBins[static_cast<int>(t)]; }
DegreeInterval term_range(PitchTerm t) { return kTiltBins[static_cast<int>(t)]; }
DegreeInterval term_range(FovTerm t) { return kFovBins[static_cast<int>(t)]; }

TermRanges terms_to_range(const TermLabel &label) {
  return {term_range(label.roll), term_range(label.pitch), term_range(label.fov)};
}

std::string_view slug(RollTerm t) {
  switch (t) {
  case RollTerm::LargeCcwDutch: return "large-ccw-dutch";
  case RollTerm::SmallCcwDutch: return "small-ccw-dutch";
  case RollTerm::NearLevel: return "near-level";
  case RollTerm::SmallCwDutch: return "small-cw-dutch";
  case RollTerm::LargeCwDutch: return "large-cw-dutch";
  }
  return {};
}

std::string_view slug(PitchTerm t) {
  switch (t) {
  case PitchTerm::LargeTiltDown: return "large-tilt-down";
  case PitchTerm::SmallTiltDown: return "small-tilt-down";
  case PitchTerm::NearStraightOn: return "near-straight-on";
  case PitchTerm::SmallTiltUp: return "small-tilt-up";
  case PitchTerm::LargeTiltUp: return "large-tilt-up";
  }
  return {};
}

std::string_view slug(FovTerm t) {
  switch (t) {
  case FovTerm::CloseUp: return "close-up";
  case FovTerm::MediumShot: return "medium-shot";
  case FovTerm::WideAngle: return "wide-angle";
  case FovTerm::UltraWideAngle: return "ultra-wide-angle";
  }
  return {};
}

std::optional<RollTerm> roll_term_from_slug(std::string_view s) {
  for (RollTerm t : kRollTerms)
    if (slug(t) == s) return t;
  return std::nullopt;
}

std::optional<PitchTerm> pitch_term_from_slug(std::string_view s) {
  for (PitchTerm t : kPitchTerms)
    if (slug(t) == s) return t;
  return std::nullopt;
}

std::optional<FovTerm> fov_term_from_slug(std::string_view s) {
  for (FovTerm t : kFovTerms)
    if (slug(t) == s) return t;
  return std::nullopt;
}

std::string_view phrase(RollTerm t) {
  switch (t) {
  case RollTerm::LargeCcwDutch: return "large counterclockwise Dutch angle";
  case RollTerm::SmallCcwDutch: return "small counterclockwise Dutch angle";
  case RollTerm::NearLevel: return "near level shot";
  case RollTerm::SmallCwDutch: return "small clockwise Dutch angle";
  case RollTerm::LargeCwDutch: return "large clockwise Dutch angle";
  }
  return {};
}

std::string_view phrase(PitchTerm t) {
  switch (t) {
  case PitchTerm::LargeTiltDown: return "large tilt-down";
  case PitchTerm::SmallTiltDown: return "small tilt-down";
  case PitchTerm::NearStraightOn: return "near straight-on shot";
  case PitchTerm::SmallTiltUp: return "small tilt-up";
  case PitchTerm::LargeTiltUp: return "large tilt-up";
  }
  return {};
}

std::string_view phrase(FovTerm t) {
  switch (t) {
  case FovTerm::CloseUp: return "close-up";
  case FovTerm::MediumShot: return "medium shot";
  case FovTerm::WideAngle: return "wide-angle";
  case FovTerm::UltraWideAngle: return "ultra wide-angle";
  }
  return {};
}

std::string caption_skeleton(const CameraParams &params, std::string_view scene_text) {
  const TermLabel terms = params_to_terms(params);
  std::ostringstream out;
  out << "<think>\n";
  out << "Scene: " << scene_text << "\n";
  out << "Roll: " << phrase(terms.roll) << ". Visual cues: {roll_cues}\n";
  out << "Pitch: " << phrase(terms.pitch) << ". Visual cues: {pitch_cues}\n";
  out << "FoV: " << phrase(terms.fov) << ". Visual cues: {fov_cues}\n";
  out << "</think>\n";
  out << "<answer>" << fmt_rad(params.roll) << ", " << fmt_rad(params.pitch) << ", "
      << fmt_rad(params.vfov) << "</answer>";
  return out.str();
}

} // namespace camfield

#pragma once

// Camera parameters <-> professional photographic terms.

#include "camfield/geometry.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace camfield {

enum class RollTerm { LargeCcwDutch, SmallCcwDutch, NearLevel, SmallCwDutch, LargeCwDutch };
enum class PitchTerm { LargeTiltDown, SmallTiltDown, NearStraightOn, SmallTiltUp, LargeTiltUp };
enum class FovTerm { CloseUp, MediumShot, WideAngle, UltraWideAngle };

struct TermLabel {
  RollTerm roll;
  PitchTerm pitch;
  FovTerm fov;

  bool operator==(const TermLabel &) const = default;
};

/// Interval in degrees with explicit bracket types.
struct DegreeInterval {
  double lo;
  double hi;
  bool lo_closed;
  bool hi_closed;

  bool contains(double deg) const {
    return (lo_closed ? deg >= lo : deg > lo) && (hi_closed ? deg <= hi : deg < hi);
  }
  double midpoint() const { return 0.5 * (lo + hi); }
  std::string to_string() const;
};

struct TermRanges {
  DegreeInterval roll;
  DegreeInterval pitch;
  DegreeInterval fov;
};

RollTerm roll_term_from_degrees(double roll_deg);
PitchTerm pitch_term_from_degrees(double pitch_deg);
FovTerm fov_term_from_degrees(double vfov_deg);

/// Throws DomainError naming the parameter when it is outside the table.
TermLabel params_to_terms(const CameraParams &params);

DegreeInterval term_range(RollTerm t);
DegreeInterval term_range(PitchTerm t);
DegreeInterval term_range(FovTerm t);
TermRanges terms_to_range(const TermLabel &label);

// Manifest spellings, e.g. "small-ccw-dutch", "near-straight-on", "close-up".
std::string_view slug(RollTerm t);
std::string_view slug(PitchTerm t);
std::string_view slug(FovTerm t);
std::optional<RollTerm> roll_term_from_slug(std::string_view s);
std::optional<PitchTerm> pitch_term_from_slug(std::string_view s);
std::optional<FovTerm> fov_term_from_slug(std::string_view s);

// Prose spellings, e.g. "small counterclockwise Dutch angle".
std::string_view phrase(RollTerm t);
std::string_view phrase(PitchTerm t);
std::string_view phrase(FovTerm t);

inline constexpr std::array kRollTerms{RollTerm::LargeCcwDutch, RollTerm::SmallCcwDutch,
                                       RollTerm::NearLevel, RollTerm::SmallCwDutch,
                                       RollTerm::LargeCwDutch};
inline constexpr std::array kPitchTerms{PitchTerm::LargeTiltDown, PitchTerm::SmallTiltDown,
                                        PitchTerm::NearStraightOn, PitchTerm::SmallTiltUp,
                                        PitchTerm::LargeTiltUp};
inline constexpr std::array kFovTerms{FovTerm::CloseUp, FovTerm::MediumShot,
                                      FovTerm::WideAngle, FovTerm::UltraWideAngle};

/// Reasoning text with a <think> block (one line per parameter, visual-cue
/// slots left as named placeholders) and an <answer> block holding
/// "roll, pitch, vfov" in radians with 4 decimals.
std::string caption_skeleton(const CameraParams &params, std::string_view scene_text);

} // namespace camfield

#include "rantail/types.hpp"

#include <cmath>

#include "rantail/error.hpp"

namespace rantail {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptyTrace: return "EmptyTrace";
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::EmptySequence: return "EmptySequence";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::RunTooShort: return "RunTooShort";
    case ErrorKind::SplitOutOfRange: return "SplitOutOfRange";
    case ErrorKind::EmptyPhase: return "EmptyPhase";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

UeKind UeKind::parse(const std::string& text) {
  if (text == "smartphone") return {UeType::Smartphone, {}};
  if (text == "modem") return {UeType::Modem, {}};
  if (text.empty()) throw Error(ErrorKind::InvalidSpec, "empty ue_type");
  return {UeType::Other, text};
}

std::string UeKind::name() const {
  switch (type) {
    case UeType::Smartphone: return "smartphone";
    case UeType::Modem: return "modem";
    case UeType::Other: return label;
  }
  return label;
}

ScenarioKind ScenarioKind::parse(const std::string& text) {
  if (text == "baseline") return {Scenario::Baseline, {}};
  if (text == "dynamic_people") return {Scenario::DynamicPeople, {}};
  if (text == "static_long") return {Scenario::StaticLong, {}};
  if (text.empty()) throw Error(ErrorKind::InvalidSpec, "empty scenario");
  return {Scenario::Other, text};
}

std::string ScenarioKind::name() const {
  switch (type) {
    case Scenario::Baseline: return "baseline";
    case Scenario::DynamicPeople: return "dynamic_people";
    case Scenario::StaticLong: return "static_long";
    case Scenario::Other: return label;
  }
  return label;
}

void RunMetadata::validate() const {
  if (run_id.empty()) throw Error(ErrorKind::InvalidSpec, "run_id must be non-empty");
  if (!(ping_interval_s > 0.0) || !std::isfinite(ping_interval_s))
    throw Error(ErrorKind::InvalidSpec, "ping_interval_s must be positive");
  if (!(nominal_duration_s > 0.0) || !std::isfinite(nominal_duration_s))
    throw Error(ErrorKind::InvalidSpec, "nominal_duration_s must be positive");
  if (packet_size_b < 1) throw Error(ErrorKind::InvalidSpec, "packet_size_b must be >= 1");
  if (!(distance_m >= 0.0)) throw Error(ErrorKind::InvalidSpec, "distance_m must be >= 0");
  if (!std::isfinite(sched_offset_s)) throw Error(ErrorKind::InvalidSpec, "sched_offset_s must be finite");
}

}  // namespace rantail

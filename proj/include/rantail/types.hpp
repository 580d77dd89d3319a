#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rantail {

enum class UeType { Smartphone, Modem, Other };
enum class Scenario { Baseline, DynamicPeople, StaticLong, Other };

// Enums with an "other" arm keep the free-form label next to the tag.
struct UeKind {
  UeType type = UeType::Smartphone;
  std::string label;  // only meaningful for UeType::Other

  static UeKind parse(const std::string& text);
  std::string name() const;
  bool operator==(const UeKind&) const = default;
};

struct ScenarioKind {
  Scenario type = Scenario::Baseline;
  std::string label;

  static ScenarioKind parse(const std::string& text);
  std::string name() const;
  bool operator==(const ScenarioKind&) const = default;
};

struct RunMetadata {
  std::string run_id;
  UeKind ue;
  double distance_m = 0.0;
  std::uint32_t packet_size_b = 30;
  ScenarioKind scenario;
  double ping_interval_s = 0.2;
  double nominal_duration_s = 1800.0;
  // Constant shift added to scheduler times to line them up with the ping
  // time base.
  double sched_offset_s = 0.0;
  // Set on the halves produced by split_phases; empty otherwise.
  std::string phase;

  // Throws InvalidSpec when an invariant does not hold.
  void validate() const;
  bool operator==(const RunMetadata&) const = default;
};

struct LatencySample {
  double t_s = 0.0;
  std::uint64_t seq = 0;
  double rtt_ms = 0.0;

  bool operator==(const LatencySample&) const = default;
};

struct SchedulerSnapshot {
  double t_s = 0.0;
  std::uint32_t rnti = 0;
  double dl_bler = 0.0;
  std::optional<double> ul_bler;
  std::optional<int> dl_mcs;
  std::optional<int> ul_mcs;
  std::optional<double> snr_db;
  std::optional<double> rsrp_dbm;
  std::optional<std::uint64_t> dl_retx;
  std::optional<std::uint64_t> dl_total;

  bool operator==(const SchedulerSnapshot&) const = default;
};

struct Run {
  RunMetadata meta;
  std::vector<LatencySample> latency;
  std::vector<SchedulerSnapshot> scheduler;
};

}  // namespace rantail

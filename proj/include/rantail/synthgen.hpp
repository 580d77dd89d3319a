#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rantail/canonical_io.hpp"
#include "rantail/types.hpp"

namespace rantail::synth {

// Latency model for one device class. Base RTT is log-normal with median
// base_median_ms and log-scale jitter_scale / base_median_ms, truncated at
// six standard deviations. A stall of magnitude S (Pareto, tail index 1.5,
// scale stall_scale_ms, capped at stall_cap_ms) holds the link: the sample
// that triggers it sees base + S and each following sample sees the
// remaining hold, base + S - k * interval, until it drains.
struct UeProfile {
  std::string label = "smartphone";
  UeType type = UeType::Smartphone;
  double base_median_ms = 10.0;
  double jitter_scale = 2.1;
  double stall_prob = 0.0;
  double stall_scale_ms = 150.0;
  double stall_cap_ms = std::numeric_limits<double>::infinity();

  void validate() const;

  static UeProfile smartphone();
  static UeProfile modem();
};

struct ScenarioSpec {
  std::string run_id = "run";
  Scenario scenario = Scenario::Baseline;
  double duration_s = 1800.0;
  std::optional<double> obstruction_start_s;
  std::uint64_t seed = 1;
  UeProfile ue;
  double bler_baseline = 0.0;
  double bler_excursion_prob = 0.0;
  double stall_bler_coupling = 0.0;

  double ping_interval_s = 0.2;
  double loss_prob = 0.0;
  std::uint32_t packet_size_b = 30;
  double distance_m = 6.0;
  // Independent excursions are this much more likely once the obstruction
  // phase starts.
  double obstruction_excursion_gain = 2.0;
  // A ping sent while BLER is b needs one HARQ retransmission with
  // probability b, adding this much delay.
  double harq_retx_ms = 8.0;
  double excursion_min = 0.6;
  double excursion_max = 0.9;
  std::uint32_t rnti = 17921;
  int mcs_start = 10;
  int mcs_max = 28;
  int mcs_up_after = 3;
  double snr_base_db = 28.0;
  double rsrp_base_dbm = -80.0;
  bool quantize_bler = false;

  void validate() const;
  RunMetadata metadata() const;
};

struct GroundTruth {
  std::vector<double> stall_times_s;
  // Parallel to stall_times_s; not part of the sidecar file.
  std::vector<double> stall_magnitude_ms;
  // Scheduler snapshot times carrying an excursion.
  std::vector<double> excursion_times_s;
};

struct LatencyTrace {
  std::vector<LatencySample> samples;
  GroundTruth truth;
};

LatencyTrace gen_latency_trace(const ScenarioSpec& spec);

// 1 s snapshots for spec.rnti. Excursions come from independent draws and
// from stalls in `truth` (each coupled with probability
// spec.stall_bler_coupling); a coupled stall raises BLER from the second
// before its onset through two seconds after it drains. Excursion times are
// appended to truth.excursion_times_s.
std::vector<SchedulerSnapshot> gen_sched_trace(const ScenarioSpec& spec, GroundTruth& truth);

// Truth sidecar: header `kind,t_s`, stall rows then excursion rows.
void write_truth_csv(std::ostream& out, const GroundTruth& truth);
GroundTruth read_truth_csv(std::istream& in);

struct GeneratedRun {
  Run run;
  GroundTruth truth;
  std::filesystem::path manifest_path;
  std::filesystem::path truth_path;
};

struct Campaign {
  std::vector<GeneratedRun> runs;
  std::filesystem::path manifest_path;  // campaign.manifest listing the runs
};

Campaign gen_campaign(std::span<const ScenarioSpec> presets, const std::filesystem::path& out_dir);

// Named preset families. "paperlike": smartphone 6 m / 30 B baseline,
// dynamic people and one hour static. "ue-compare": the paperlike baseline
// for smartphone and modem side by side.
std::vector<std::string> preset_names();
std::optional<std::vector<ScenarioSpec>> preset(const std::string& name, std::uint64_t seed);

}  // namespace rantail::synth

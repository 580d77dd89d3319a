#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rantail/canonical_io.hpp"
#include "rantail/flags.hpp"
#include "rantail/ingest.hpp"
#include "rantail/stats.hpp"
#include "rantail/synthgen.hpp"
#include "rantail/windows.hpp"

namespace rantail::cli {

struct Thresholds {
  std::vector<double> exceed_ms{100.0, 1000.0};
  double outlier_ms = 1000.0;
};

struct CampaignConfig {
  std::vector<RunManifest> runs;
  WindowSpec window;
  FlagPolicy policy;
  Thresholds thresholds;
  ColumnMap column_map = identity_column_map();
  FullstatsOptions fullstats;
  std::filesystem::path output_dir = "out";
  std::map<std::string, std::vector<synth::ScenarioSpec>> presets;

  void validate() const;
  const RunManifest& find_run(const std::string& run_id) const;
};

// JSON config. Relative paths resolve against the config file's directory.
CampaignConfig load_config(const std::filesystem::path& path);
CampaignConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir);

struct SchedSummary {
  std::size_t n = 0;
  double bler_median = 0.0;
  double bler_p95 = 0.0;
  std::optional<int> mcs_median;
  std::optional<double> snr_median_db;
};

std::optional<SchedSummary> sched_summary(std::span<const SchedulerSnapshot> snapshots);

struct RunReport {
  LatencySummary summary;
  std::optional<SchedSummary> sched;
  std::filesystem::path summary_path;
  std::filesystem::path cdf_path;
};

struct CompareReport {
  KsResult ks;
  double p95_a_ms = 0.0;
  double p95_b_ms = 0.0;
  bool packet_size_mismatch = false;
  std::filesystem::path path;
};

struct WindowsReport {
  std::vector<JoinedWindow> joined;
  CouplingReport coupling;
  std::filesystem::path windows_path;
  std::filesystem::path coupling_path;
};

struct FlagsReport {
  std::vector<DegradationFlag> flags;
  std::optional<double> rate;  // empty when nothing joined
  std::filesystem::path timeline_path;
  std::filesystem::path rate_path;
};

struct PhasesReport {
  PhaseComparison first;
  PhaseComparison second;
  std::filesystem::path path;
};

struct IngestReport {
  std::vector<std::filesystem::path> manifests;
};

// Loads a run from canonical files when the manifest names them, otherwise
// parses the raw ping log / fullstats pair. Diagnostics go to `diag`.
Run load_run(const RunManifest& manifest, const CampaignConfig& config, std::ostream& diag);

IngestReport cmd_ingest(const CampaignConfig& config, const std::optional<std::string>& run_id,
                        std::ostream& out, std::ostream& diag);
RunReport cmd_summarize(const CampaignConfig& config, const std::string& run_id,
                        std::ostream& out, std::ostream& diag);
CompareReport cmd_compare(const CampaignConfig& config, const std::string& run_a,
                          const std::string& run_b, std::ostream& out, std::ostream& diag);
WindowsReport cmd_windows(const CampaignConfig& config, const std::string& run_id,
                          std::ostream& out, std::ostream& diag);
FlagsReport cmd_flags(const CampaignConfig& config, const std::string& run_id, std::ostream& out,
                      std::ostream& diag);
PhasesReport cmd_phases(const CampaignConfig& config, const std::string& run_id,
                        std::optional<double> split_s, std::ostream& out, std::ostream& diag);
synth::Campaign cmd_synth(const CampaignConfig& config, const std::string& preset_name,
                          std::uint64_t seed, std::ostream& out, std::ostream& diag);

// Entry point behind the `rantail` binary. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& diag);

}  // namespace rantail::cli

#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rantail/types.hpp"

namespace rantail {

inline constexpr std::string_view kLatencyHeader = "t_s,seq,rtt_ms";
inline constexpr std::string_view kSchedulerHeader =
    "t_s,rnti,dl_bler,ul_bler,dl_mcs,ul_mcs,snr_db,rsrp_dbm,dl_retx,dl_total";

// Shortest decimal text that parses back to the same double.
std::string format_exact(double value);
double parse_double(std::string_view text);

void write_latency_csv(std::ostream& out, std::span<const LatencySample> samples);
std::vector<LatencySample> read_latency_csv(std::istream& in);

void write_scheduler_csv(std::ostream& out, std::span<const SchedulerSnapshot> snapshots);
std::vector<SchedulerSnapshot> read_scheduler_csv(std::istream& in);

// A run on disk. Canonical paths take precedence over the raw ones when a
// loader has the choice.
struct RunManifest {
  RunMetadata meta;
  std::filesystem::path latency_path;
  std::filesystem::path scheduler_path;
  std::filesystem::path ping_log_path;
  std::filesystem::path fullstats_path;
};

// key = value lines, '#' comments. Relative paths resolve against `base_dir`.
RunManifest read_manifest(std::istream& in, const std::filesystem::path& base_dir);
RunManifest read_manifest_file(const std::filesystem::path& path);
// Paths are written relative to `base_dir` when they live below it.
void write_manifest(std::ostream& out, const RunManifest& manifest,
                    const std::filesystem::path& base_dir);

// Writes to a sibling temp file and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace rantail

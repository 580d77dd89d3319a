#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rantail/types.hpp"

namespace rantail {

struct LineIssue {
  std::size_t line_no = 0;  // 1-based
  std::string text;
};

struct PingParseResult {
  std::vector<LatencySample> samples;
  // Non-blank lines seen; every one of them ends up in exactly one of
  // samples, skipped or malformed.
  std::size_t candidate_lines = 0;
  std::size_t skipped = 0;
  std::vector<LineIssue> malformed;
};

// Parses `ping` output. Reply lines look like
//   [1700000000.500000] 64 bytes from 10.0.0.1: icmp_seq=3 ttl=64 time=12.4 ms
// with the bracketed epoch optional. Headers, statistics trailers and
// timeout notices are skipped. Throws EmptyTrace when no reply parses.
PingParseResult parse_ping_log(std::istream& in, const RunMetadata& meta);

// Canonical scheduler fields that can be mapped onto fullstats headers.
enum class SchedField {
  Timestamp,
  Rnti,
  DlBler,
  UlBler,
  DlMcs,
  UlMcs,
  SnrDb,
  RsrpDbm,
  DlRetx,
  DlTotal,
};

const char* field_name(SchedField field) noexcept;
std::optional<SchedField> parse_field_name(const std::string& name);

// Canonical field -> header name in the vendor CSV. Rnti and DlBler are
// mandatory.
using ColumnMap = std::map<SchedField, std::string>;

// Maps every canonical field onto a header of the same name.
ColumnMap identity_column_map();

struct FullstatsOptions {
  double stats_period_s = 1.0;
  char delimiter = ',';
};

struct FullstatsParseResult {
  std::vector<SchedulerSnapshot> snapshots;
  std::size_t data_rows = 0;
  std::size_t skipped_rows = 0;
};

FullstatsParseResult parse_fullstats(std::istream& in, const ColumnMap& columns,
                                     const RunMetadata& meta,
                                     const FullstatsOptions& options = {});

struct DominantRnti {
  std::uint32_t rnti = 0;
  std::vector<SchedulerSnapshot> snapshots;
};

// Picks the RNTI with the most records, smallest RNTI on ties.
DominantRnti select_dominant_rnti(std::span<const SchedulerSnapshot> snapshots);

struct RunSummary {
  std::size_t latency_samples = 0;
  double latency_first_s = 0.0;
  double latency_last_s = 0.0;
  std::size_t sched_snapshots = 0;
  double sched_first_s = 0.0;
  double sched_last_s = 0.0;
  std::optional<std::uint32_t> dominant_rnti;
};

// Sorts both layers by time, applies meta.sched_offset_s to the scheduler
// layer (dropping rows pushed before zero) and keeps only the dominant RNTI.
Run consolidate_run(std::vector<LatencySample> latency,
                    std::vector<SchedulerSnapshot> scheduler, RunMetadata meta);

RunSummary summarize_run(const Run& run);

}  // namespace rantail

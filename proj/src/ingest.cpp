#include "rantail/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <string_view>

#include "rantail/error.hpp"

namespace rantail {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Parses a floating-point prefix of `s`; advances `s` past it.
std::optional<double> take_double(std::string_view& s) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr == s.data()) return std::nullopt;
  s.remove_prefix(static_cast<std::size_t>(ptr - s.data()));
  return value;
}

std::optional<double> whole_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  auto rest = s;
  auto v = take_double(rest);
  if (!v || !rest.empty() || !std::isfinite(*v)) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> whole_uint(std::string_view s) {
  s = trim(s);
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s.remove_prefix(2);
    base = 16;
  }
  if (s.empty()) return std::nullopt;
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value, base);
  if (ec == std::errc() && ptr == s.data() + s.size()) return value;
  // Integral values written as reals, e.g. "9.0".
  if (base == 10) {
    if (auto d = whole_double(s); d && *d >= 0.0 && std::floor(*d) == *d && *d < 1.8e19)
      return static_cast<std::uint64_t>(*d);
  }
  return std::nullopt;
}

struct RawReply {
  std::optional<double> epoch;
  std::uint64_t seq = 0;
  double rtt_ms = 0.0;
};

enum class LineKind { Reply, NotReply, Malformed };

LineKind classify_ping_line(std::string_view line, RawReply& reply) {
  std::optional<double> epoch;
  bool bad_epoch = false;
  if (!line.empty() && line.front() == '[') {
    const auto close = line.find(']');
    if (close == std::string_view::npos) {
      bad_epoch = true;
    } else {
      epoch = whole_double(line.substr(1, close - 1));
      bad_epoch = !epoch.has_value();
      line = trim(line.substr(close + 1));
    }
  }
  if (line.find(" bytes from ") == std::string_view::npos) return LineKind::NotReply;
  if (line.find("(DUP!)") != std::string_view::npos) return LineKind::NotReply;
  if (bad_epoch) return LineKind::Malformed;

  auto seq_pos = line.find("icmp_seq=");
  std::size_t seq_len = 9;
  if (seq_pos == std::string_view::npos) {
    seq_pos = line.find("icmp_req=");
  }
  const auto time_pos = line.find("time=");
  if (seq_pos == std::string_view::npos || time_pos == std::string_view::npos)
    return LineKind::Malformed;

  auto seq_text = line.substr(seq_pos + seq_len);
  seq_text = seq_text.substr(0, seq_text.find_first_of(" \t"));
  const auto seq = whole_uint(seq_text);

  auto time_text = line.substr(time_pos + 5);
  const auto rtt = take_double(time_text);
  if (!seq || !rtt || !std::isfinite(*rtt) || *rtt <= 0.0) return LineKind::Malformed;

  reply.epoch = epoch;
  reply.seq = *seq;
  reply.rtt_ms = *rtt;
  return LineKind::Reply;
}

std::vector<std::string> split_row(std::string_view line, char delimiter) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    auto cell = trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos
                                                                       : pos - start));
    if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"')
      cell = cell.substr(1, cell.size() - 2);
    cells.emplace_back(cell);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

constexpr SchedField kAllFields[] = {
    SchedField::Timestamp, SchedField::Rnti,  SchedField::DlBler, SchedField::UlBler,
    SchedField::DlMcs,     SchedField::UlMcs, SchedField::SnrDb,  SchedField::RsrpDbm,
    SchedField::DlRetx,    SchedField::DlTotal,
};

std::optional<int> parse_mcs(std::string_view text, bool& ok) {
  if (trim(text).empty()) return std::nullopt;
  const auto v = whole_uint(text);
  if (!v || *v > 28) {
    ok = false;
    return std::nullopt;
  }
  return static_cast<int>(*v);
}

std::optional<double> parse_unit_interval(std::string_view text, bool& ok) {
  if (trim(text).empty()) return std::nullopt;
  const auto v = whole_double(text);
  if (!v || *v < 0.0 || *v > 1.0) {
    ok = false;
    return std::nullopt;
  }
  return v;
}

std::optional<double> parse_real(std::string_view text, bool& ok) {
  if (trim(text).empty()) return std::nullopt;
  const auto v = whole_double(text);
  if (!v) ok = false;
  return v;
}

std::optional<std::uint64_t> parse_count(std::string_view text, bool& ok) {
  if (trim(text).empty()) return std::nullopt;
  const auto v = whole_uint(text);
  if (!v) ok = false;
  return v;
}

}  // namespace

PingParseResult parse_ping_log(std::istream& in, const RunMetadata& meta) {
  if (!(meta.ping_interval_s > 0.0)) throw Error(ErrorKind::InvalidSpec, "ping_interval_s must be positive");

  PingParseResult result;
  std::vector<RawReply> replies;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    ++result.candidate_lines;
    RawReply reply;
    switch (classify_ping_line(text, reply)) {
      case LineKind::Reply: replies.push_back(reply); break;
      case LineKind::NotReply: ++result.skipped; break;
      case LineKind::Malformed: result.malformed.push_back({line_no, std::string(text)}); break;
    }
  }
  if (replies.empty()) throw Error(ErrorKind::EmptyTrace, "no ping reply parsed for run '" + meta.run_id + "'");

  std::optional<double> first_epoch;
  for (const auto& r : replies) {
    if (r.epoch && (!first_epoch || *r.epoch < *first_epoch)) first_epoch = r.epoch;
  }

  result.samples.reserve(replies.size());
  for (const auto& r : replies) {
    const double t = r.epoch ? *r.epoch - *first_epoch : static_cast<double>(r.seq) * meta.ping_interval_s;
    result.samples.push_back({t, r.seq, r.rtt_ms});
  }
  std::stable_sort(result.samples.begin(), result.samples.end(),
                   [](const LatencySample& a, const LatencySample& b) { return a.t_s < b.t_s; });
  return result;
}

const char* field_name(SchedField field) noexcept {
  switch (field) {
    case SchedField::Timestamp: return "t_s";
    case SchedField::Rnti: return "rnti";
    case SchedField::DlBler: return "dl_bler";
    case SchedField::UlBler: return "ul_bler";
    case SchedField::DlMcs: return "dl_mcs";
    case SchedField::UlMcs: return "ul_mcs";
    case SchedField::SnrDb: return "snr_db";
    case SchedField::RsrpDbm: return "rsrp_dbm";
    case SchedField::DlRetx: return "dl_retx";
    case SchedField::DlTotal: return "dl_total";
  }
  return "?";
}

std::optional<SchedField> parse_field_name(const std::string& name) {
  for (auto f : kAllFields) {
    if (name == field_name(f)) return f;
  }
  if (name == "timestamp") return SchedField::Timestamp;
  return std::nullopt;
}

ColumnMap identity_column_map() {
  ColumnMap map;
  for (auto f : kAllFields) map[f] = field_name(f);
  return map;
}

FullstatsParseResult parse_fullstats(std::istream& in, const ColumnMap& columns,
                                     const RunMetadata& meta, const FullstatsOptions& options) {
  for (auto required : {SchedField::Rnti, SchedField::DlBler}) {
    if (!columns.contains(required))
      throw Error(ErrorKind::MissingColumn, std::string("column map lacks mandatory field ") + field_name(required));
  }
  if (!(options.stats_period_s > 0.0)) throw Error(ErrorKind::InvalidSpec, "stats_period_s must be positive");

  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) {
      header = split_row(line, options.delimiter);
      break;
    }
  }
  if (header.empty()) throw Error(ErrorKind::EmptyTrace, "fullstats for run '" + meta.run_id + "' has no header");

  std::map<SchedField, std::size_t> index;
  for (const auto& [field, name] : columns) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw Error(ErrorKind::MissingColumn, "header '" + name + "' (" + field_name(field) + ") not found");
    index[field] = static_cast<std::size_t>(it - header.begin());
  }
  const auto cell = [&](const std::vector<std::string>& row, SchedField f) -> std::string_view {
    const auto it = index.find(f);
    if (it == index.end()) return {};
    return row[it->second];
  };

  FullstatsParseResult result;
  std::vector<double> raw_times;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto row_index = result.data_rows++;
    const auto row = split_row(line, options.delimiter);
    if (row.size() != header.size()) {
      ++result.skipped_rows;
      continue;
    }

    bool ok = true;
    SchedulerSnapshot snap;
    double raw_t = static_cast<double>(row_index) * options.stats_period_s;
    if (index.contains(SchedField::Timestamp)) {
      const auto t = whole_double(cell(row, SchedField::Timestamp));
      if (!t) ok = false;
      else raw_t = *t;
    }
    const auto rnti = whole_uint(cell(row, SchedField::Rnti));
    if (!rnti || *rnti > 0xFFFFFFFFu) ok = false;
    else snap.rnti = static_cast<std::uint32_t>(*rnti);
    const auto dl_bler = whole_double(cell(row, SchedField::DlBler));
    if (!dl_bler || *dl_bler < 0.0 || *dl_bler > 1.0) ok = false;
    else snap.dl_bler = *dl_bler;

    snap.ul_bler = parse_unit_interval(cell(row, SchedField::UlBler), ok);
    snap.dl_mcs = parse_mcs(cell(row, SchedField::DlMcs), ok);
    snap.ul_mcs = parse_mcs(cell(row, SchedField::UlMcs), ok);
    snap.snr_db = parse_real(cell(row, SchedField::SnrDb), ok);
    snap.rsrp_dbm = parse_real(cell(row, SchedField::RsrpDbm), ok);
    snap.dl_retx = parse_count(cell(row, SchedField::DlRetx), ok);
    snap.dl_total = parse_count(cell(row, SchedField::DlTotal), ok);
    if (snap.dl_retx && snap.dl_total && *snap.dl_total > 0 && *snap.dl_retx > *snap.dl_total) ok = false;

    if (!ok) {
      ++result.skipped_rows;
      continue;
    }
    raw_times.push_back(raw_t);
    result.snapshots.push_back(snap);
  }
  if (result.snapshots.empty())
    throw Error(ErrorKind::EmptyTrace, "no valid fullstats row for run '" + meta.run_id + "'");

  // A timestamp column is rebased to its first record; the row-index clock
  // already starts at zero.
  const double origin = index.contains(SchedField::Timestamp)
                            ? *std::min_element(raw_times.begin(), raw_times.end())
                            : 0.0;
  for (std::size_t i = 0; i < raw_times.size(); ++i) result.snapshots[i].t_s = raw_times[i] - origin;
  std::stable_sort(result.snapshots.begin(), result.snapshots.end(),
                   [](const SchedulerSnapshot& a, const SchedulerSnapshot& b) { return a.t_s < b.t_s; });
  return result;
}

DominantRnti select_dominant_rnti(std::span<const SchedulerSnapshot> snapshots) {
  if (snapshots.empty()) throw Error(ErrorKind::EmptyTrace, "no scheduler snapshots to select from");
  std::map<std::uint32_t, std::size_t> counts;
  for (const auto& s : snapshots) ++counts[s.rnti];

  DominantRnti result;
  std::size_t best = 0;
  for (const auto& [rnti, count] : counts) {  // ascending RNTI, so ties keep the smallest
    if (count > best) {
      best = count;
      result.rnti = rnti;
    }
  }
  result.snapshots.reserve(best);
  std::copy_if(snapshots.begin(), snapshots.end(), std::back_inserter(result.snapshots),
               [&](const SchedulerSnapshot& s) { return s.rnti == result.rnti; });
  return result;
}

Run consolidate_run(std::vector<LatencySample> latency, std::vector<SchedulerSnapshot> scheduler,
                    RunMetadata meta) {
  meta.validate();
  std::stable_sort(latency.begin(), latency.end(),
                   [](const LatencySample& a, const LatencySample& b) { return a.t_s < b.t_s; });

  if (meta.sched_offset_s != 0.0) {
    for (auto& s : scheduler) s.t_s += meta.sched_offset_s;
    std::erase_if(scheduler, [](const SchedulerSnapshot& s) { return s.t_s < 0.0; });
  }
  std::stable_sort(scheduler.begin(), scheduler.end(),
                   [](const SchedulerSnapshot& a, const SchedulerSnapshot& b) { return a.t_s < b.t_s; });
  if (!scheduler.empty()) scheduler = select_dominant_rnti(scheduler).snapshots;

  return Run{std::move(meta), std::move(latency), std::move(scheduler)};
}

RunSummary summarize_run(const Run& run) {
  RunSummary s;
  s.latency_samples = run.latency.size();
  if (!run.latency.empty()) {
    s.latency_first_s = run.latency.front().t_s;
    s.latency_last_s = run.latency.back().t_s;
  }
  s.sched_snapshots = run.scheduler.size();
  if (!run.scheduler.empty()) {
    s.sched_first_s = run.scheduler.front().t_s;
    s.sched_last_s = run.scheduler.back().t_s;
    s.dominant_rnti = run.scheduler.front().rnti;
  }
  return s;
}

}  // namespace rantail

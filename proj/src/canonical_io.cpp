#include "rantail/canonical_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "rantail/error.hpp"

namespace rantail {
namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

[[noreturn]] void bad_line(std::size_t line_no, const std::string& why) {
  throw Error(ErrorKind::MalformedLine, "line " + std::to_string(line_no) + ": " + why);
}

template <typename Int>
Int parse_int(std::string_view text, std::size_t line_no) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    bad_line(line_no, "bad integer '" + std::string(text) + "'");
  return value;
}

double parse_double_at(std::string_view text, std::size_t line_no) {
  try {
    return parse_double(text);
  } catch (const Error&) {
    bad_line(line_no, "bad number '" + std::string(text) + "'");
  }
}

template <typename T>
std::optional<T> opt_field(std::string_view text, std::size_t line_no) {
  if (text.empty()) return std::nullopt;
  if constexpr (std::is_floating_point_v<T>) return parse_double_at(text, line_no);
  else return parse_int<T>(text, line_no);
}

template <typename T>
void put_opt(std::string& out, const std::optional<T>& v) {
  out += ',';
  if (!v) return;
  if constexpr (std::is_floating_point_v<T>) out += format_exact(*v);
  else out += std::to_string(*v);
}

// Reads the header line and checks it against `expected`.
void expect_header(std::istream& in, std::string_view expected) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::EmptyTrace, "missing header");
  if (trim(line) != expected)
    throw Error(ErrorKind::MissingColumn, "expected header '" + std::string(expected) + "', got '" + line + "'");
}

std::string path_text(const fs::path& p, const fs::path& base_dir) {
  if (p.empty()) return {};
  if (!base_dir.empty()) {
    const auto rel = p.lexically_normal().lexically_relative(base_dir.lexically_normal());
    if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  }
  return p.generic_string();
}

}  // namespace

std::string format_exact(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw Error(ErrorKind::Io, "cannot format number");
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() || !std::isfinite(value))
    throw Error(ErrorKind::MalformedLine, "bad number '" + std::string(text) + "'");
  return value;
}

void write_latency_csv(std::ostream& out, std::span<const LatencySample> samples) {
  std::string text;
  text.reserve(samples.size() * 24 + 16);
  text += kLatencyHeader;
  text += '\n';
  for (const auto& s : samples) {
    text += format_exact(s.t_s);
    text += ',';
    text += std::to_string(s.seq);
    text += ',';
    text += format_exact(s.rtt_ms);
    text += '\n';
  }
  out << text;
}

std::vector<LatencySample> read_latency_csv(std::istream& in) {
  expect_header(in, kLatencyHeader);
  std::vector<LatencySample> samples;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(trim(line));
    if (cells.size() != 3) bad_line(line_no, "expected 3 fields");
    LatencySample s;
    s.t_s = parse_double_at(cells[0], line_no);
    s.seq = parse_int<std::uint64_t>(cells[1], line_no);
    s.rtt_ms = parse_double_at(cells[2], line_no);
    if (s.t_s < 0.0 || !(s.rtt_ms > 0.0)) bad_line(line_no, "t_s must be >= 0 and rtt_ms > 0");
    samples.push_back(s);
  }
  return samples;
}

void write_scheduler_csv(std::ostream& out, std::span<const SchedulerSnapshot> snapshots) {
  std::string text;
  text += kSchedulerHeader;
  text += '\n';
  for (const auto& s : snapshots) {
    text += format_exact(s.t_s);
    text += ',';
    text += std::to_string(s.rnti);
    text += ',';
    text += format_exact(s.dl_bler);
    put_opt(text, s.ul_bler);
    put_opt(text, s.dl_mcs);
    put_opt(text, s.ul_mcs);
    put_opt(text, s.snr_db);
    put_opt(text, s.rsrp_dbm);
    put_opt(text, s.dl_retx);
    put_opt(text, s.dl_total);
    text += '\n';
  }
  out << text;
}

std::vector<SchedulerSnapshot> read_scheduler_csv(std::istream& in) {
  expect_header(in, kSchedulerHeader);
  std::vector<SchedulerSnapshot> snapshots;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(trim(line));
    if (cells.size() != 10) bad_line(line_no, "expected 10 fields");
    SchedulerSnapshot s;
    s.t_s = parse_double_at(cells[0], line_no);
    s.rnti = parse_int<std::uint32_t>(cells[1], line_no);
    s.dl_bler = parse_double_at(cells[2], line_no);
    s.ul_bler = opt_field<double>(cells[3], line_no);
    s.dl_mcs = opt_field<int>(cells[4], line_no);
    s.ul_mcs = opt_field<int>(cells[5], line_no);
    s.snr_db = opt_field<double>(cells[6], line_no);
    s.rsrp_dbm = opt_field<double>(cells[7], line_no);
    s.dl_retx = opt_field<std::uint64_t>(cells[8], line_no);
    s.dl_total = opt_field<std::uint64_t>(cells[9], line_no);
    if (s.dl_bler < 0.0 || s.dl_bler > 1.0) bad_line(line_no, "dl_bler outside [0,1]");
    snapshots.push_back(s);
  }
  return snapshots;
}

RunManifest read_manifest(std::istream& in, const fs::path& base_dir) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) bad_line(line_no, "expected key = value");
    kv[std::string(trim(text.substr(0, eq)))] = std::string(trim(text.substr(eq + 1)));
  }

  const auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    auto v = it->second;
    kv.erase(it);
    return v;
  };
  const auto require = [&](const std::string& key) {
    auto v = take(key);
    if (!v) throw Error(ErrorKind::InvalidConfig, "manifest lacks '" + key + "'");
    return *v;
  };
  const auto number = [](const std::string& key, const std::string& v) {
    try {
      return parse_double(v);
    } catch (const Error&) {
      throw Error(ErrorKind::InvalidConfig, "manifest key '" + key + "' is not a number: " + v);
    }
  };
  const auto path_of = [&](const std::string& key) -> fs::path {
    auto v = take(key);
    if (!v || v->empty()) return {};
    fs::path p(*v);
    return p.is_relative() ? base_dir / p : p;
  };

  RunManifest m;
  m.meta.run_id = require("run_id");
  m.meta.ue = UeKind::parse(require("ue_type"));
  m.meta.distance_m = number("distance_m", require("distance_m"));
  const double packet = number("packet_size_b", require("packet_size_b"));
  if (packet < 1.0 || std::floor(packet) != packet || packet > 65535.0)
    throw Error(ErrorKind::InvalidConfig, "packet_size_b must be a positive integer");
  m.meta.packet_size_b = static_cast<std::uint32_t>(packet);
  m.meta.scenario = ScenarioKind::parse(require("scenario"));
  if (auto v = take("ping_interval_s")) m.meta.ping_interval_s = number("ping_interval_s", *v);
  m.meta.nominal_duration_s = number("nominal_duration_s", require("nominal_duration_s"));
  if (auto v = take("sched_offset_s")) m.meta.sched_offset_s = number("sched_offset_s", *v);
  if (auto v = take("phase")) m.meta.phase = *v;
  m.latency_path = path_of("latency_path");
  m.scheduler_path = path_of("scheduler_path");
  m.ping_log_path = path_of("ping_log_path");
  m.fullstats_path = path_of("fullstats_path");
  if (!kv.empty()) throw Error(ErrorKind::InvalidConfig, "unknown manifest key '" + kv.begin()->first + "'");
  if (m.latency_path.empty() && m.ping_log_path.empty())
    throw Error(ErrorKind::InvalidConfig, "manifest for '" + m.meta.run_id + "' names no latency source");
  try {
    m.meta.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidConfig, e.what());
  }
  return m;
}

RunManifest read_manifest_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open manifest " + path.string());
  return read_manifest(in, path.parent_path());
}

void write_manifest(std::ostream& out, const RunManifest& m, const fs::path& base_dir) {
  out << "run_id = " << m.meta.run_id << '\n'
      << "ue_type = " << m.meta.ue.name() << '\n'
      << "distance_m = " << format_exact(m.meta.distance_m) << '\n'
      << "packet_size_b = " << m.meta.packet_size_b << '\n'
      << "scenario = " << m.meta.scenario.name() << '\n'
      << "ping_interval_s = " << format_exact(m.meta.ping_interval_s) << '\n'
      << "nominal_duration_s = " << format_exact(m.meta.nominal_duration_s) << '\n'
      << "sched_offset_s = " << format_exact(m.meta.sched_offset_s) << '\n';
  if (!m.meta.phase.empty()) out << "phase = " << m.meta.phase << '\n';
  const auto put_path = [&](const char* key, const fs::path& p) {
    if (!p.empty()) out << key << " = " << path_text(p, base_dir) << '\n';
  };
  put_path("latency_path", m.latency_path);
  put_path("scheduler_path", m.scheduler_path);
  put_path("ping_log_path", m.ping_log_path);
  put_path("fullstats_path", m.fullstats_path);
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "short write to " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::Io, "cannot rename onto " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace rantail

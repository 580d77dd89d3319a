#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rantail/cli.hpp"
#include "rantail/error.hpp"

namespace rantail::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); }

template <typename T>
void read_opt(const json& obj, const char* key, T& target) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    invalid(std::string("config key '") + key + "': " + e.what());
  }
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
  fs::path path(p);
  return path.is_relative() ? base_dir / path : path;
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_exact(v.get<double>());
  invalid("manifest values must be strings or numbers");
}

// Inline runs reuse the manifest reader so both spellings share validation.
RunManifest inline_run(const json& obj, const fs::path& base_dir) {
  std::string text;
  for (const auto& [key, value] : obj.items()) text += key + " = " + scalar_text(value) + '\n';
  std::istringstream in(text);
  return read_manifest(in, base_dir);
}

std::vector<RunManifest> campaign_runs(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open campaign manifest " + path.string());
  std::vector<RunManifest> runs;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (line.empty() || line.front() == '#' || eq == std::string::npos) continue;
    auto value = line.substr(eq + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    runs.push_back(read_manifest_file(path.parent_path() / value));
  }
  return runs;
}

synth::UeProfile ue_profile(const json& v) {
  if (v.is_string()) {
    const auto name = v.get<std::string>();
    if (name == "smartphone") return synth::UeProfile::smartphone();
    if (name == "modem") return synth::UeProfile::modem();
    invalid("unknown UE profile '" + name + "'");
  }
  synth::UeProfile p;
  if (v.contains("base")) p = ue_profile(v.at("base"));
  if (v.contains("label")) {
    p.label = v.at("label").get<std::string>();
    p.type = UeKind::parse(p.label).type;
  }
  read_opt(v, "base_median_ms", p.base_median_ms);
  read_opt(v, "jitter_scale", p.jitter_scale);
  read_opt(v, "stall_prob", p.stall_prob);
  read_opt(v, "stall_scale_ms", p.stall_scale_ms);
  read_opt(v, "stall_cap_ms", p.stall_cap_ms);
  return p;
}

synth::ScenarioSpec scenario_spec(const json& v, std::size_t index) {
  synth::ScenarioSpec s;
  read_opt(v, "run_id", s.run_id);
  if (v.contains("scenario")) {
    const auto kind = ScenarioKind::parse(v.at("scenario").get<std::string>());
    if (kind.type == Scenario::Other) invalid("synthetic scenarios are baseline, dynamic_people or static_long");
    s.scenario = kind.type;
  }
  read_opt(v, "duration_s", s.duration_s);
  if (v.contains("obstruction_start_s")) s.obstruction_start_s = v.at("obstruction_start_s").get<double>();
  s.seed = index;
  read_opt(v, "seed_offset", s.seed);
  if (v.contains("ue")) s.ue = ue_profile(v.at("ue"));
  read_opt(v, "bler_baseline", s.bler_baseline);
  read_opt(v, "bler_excursion_prob", s.bler_excursion_prob);
  read_opt(v, "stall_bler_coupling", s.stall_bler_coupling);
  read_opt(v, "ping_interval_s", s.ping_interval_s);
  read_opt(v, "loss_prob", s.loss_prob);
  read_opt(v, "packet_size_b", s.packet_size_b);
  read_opt(v, "distance_m", s.distance_m);
  read_opt(v, "obstruction_excursion_gain", s.obstruction_excursion_gain);
  read_opt(v, "harq_retx_ms", s.harq_retx_ms);
  read_opt(v, "excursion_min", s.excursion_min);
  read_opt(v, "excursion_max", s.excursion_max);
  read_opt(v, "rnti", s.rnti);
  read_opt(v, "mcs_start", s.mcs_start);
  read_opt(v, "mcs_max", s.mcs_max);
  read_opt(v, "mcs_up_after", s.mcs_up_after);
  read_opt(v, "snr_base_db", s.snr_base_db);
  read_opt(v, "rsrp_base_dbm", s.rsrp_base_dbm);
  read_opt(v, "quantize_bler", s.quantize_bler);
  return s;
}

}  // namespace

void CampaignConfig::validate() const {
  std::set<std::string> ids;
  for (const auto& r : runs) {
    if (!ids.insert(r.meta.run_id).second) invalid("duplicate run_id '" + r.meta.run_id + "'");
  }
  window.validate();
  policy.validate();
  for (double t : thresholds.exceed_ms) {
    if (!(t > 0.0)) invalid("exceedance thresholds must be positive");
  }
  if (!(thresholds.outlier_ms > 0.0)) invalid("outlier threshold must be positive");
  if (!column_map.contains(SchedField::Rnti) || !column_map.contains(SchedField::DlBler))
    invalid("column_map must name rnti and dl_bler");
  if (!(fullstats.stats_period_s > 0.0)) invalid("stats_period_s must be positive");
}

const RunManifest& CampaignConfig::find_run(const std::string& run_id) const {
  for (const auto& r : runs) {
    if (r.meta.run_id == run_id) return r;
  }
  invalid("no run '" + run_id + "' in config");
}

CampaignConfig parse_config(const std::string& json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) invalid("config must be a JSON object");

  CampaignConfig c;
  if (doc.contains("campaign")) {
    for (auto& r : campaign_runs(resolve(base_dir, doc.at("campaign").get<std::string>()))) c.runs.push_back(std::move(r));
  }
  if (doc.contains("runs")) {
    for (const auto& entry : doc.at("runs")) {
      if (entry.is_string()) c.runs.push_back(read_manifest_file(resolve(base_dir, entry.get<std::string>())));
      else if (entry.is_object() && entry.contains("manifest"))
        c.runs.push_back(read_manifest_file(resolve(base_dir, entry.at("manifest").get<std::string>())));
      else if (entry.is_object()) c.runs.push_back(inline_run(entry, base_dir));
      else invalid("runs entries must be manifest paths or objects");
    }
  }
  if (doc.contains("window")) {
    const auto& w = doc.at("window");
    read_opt(w, "width_s", c.window.width_s);
    read_opt(w, "stride_s", c.window.stride_s);
    read_opt(w, "min_latency_samples", c.window.min_latency_samples);
    read_opt(w, "min_sched_samples", c.window.min_sched_samples);
  }
  if (doc.contains("policy")) {
    const auto& p = doc.at("policy");
    read_opt(p, "lat_p95_threshold_ms", c.policy.lat_p95_threshold_ms);
    read_opt(p, "bler_mean_threshold", c.policy.bler_mean_threshold);
    if (p.contains("combine")) {
      const auto mode = p.at("combine").get<std::string>();
      if (mode == "AND" || mode == "and") c.policy.combine = Combine::And;
      else if (mode == "OR" || mode == "or") c.policy.combine = Combine::Or;
      else invalid("policy.combine must be AND or OR");
    }
  }
  if (doc.contains("thresholds")) {
    read_opt(doc.at("thresholds"), "exceed_ms", c.thresholds.exceed_ms);
    read_opt(doc.at("thresholds"), "outlier_ms", c.thresholds.outlier_ms);
  }
  if (doc.contains("column_map")) {
    c.column_map.clear();
    for (const auto& [key, value] : doc.at("column_map").items()) {
      const auto field = parse_field_name(key);
      if (!field) invalid("unknown canonical field '" + key + "' in column_map");
      c.column_map[*field] = value.get<std::string>();
    }
  }
  read_opt(doc, "stats_period_s", c.fullstats.stats_period_s);
  if (doc.contains("delimiter")) {
    const auto d = doc.at("delimiter").get<std::string>();
    if (d.size() != 1) invalid("delimiter must be a single character");
    c.fullstats.delimiter = d.front();
  }
  if (doc.contains("output_dir")) c.output_dir = resolve(base_dir, doc.at("output_dir").get<std::string>());
  else c.output_dir = base_dir / "out";
  if (doc.contains("presets")) {
    for (const auto& [name, list] : doc.at("presets").items()) {
      std::vector<synth::ScenarioSpec> specs;
      std::size_t index = 0;
      for (const auto& spec : list) specs.push_back(scenario_spec(spec, index++));
      c.presets[name] = std::move(specs);
    }
  }
  c.validate();
  return c;
}

CampaignConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace rantail::cli

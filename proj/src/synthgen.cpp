#include "rantail/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "rantail/error.hpp"
#include "rantail/ingest.hpp"

namespace rantail::synth {
namespace fs = std::filesystem;

namespace {

constexpr double kStallTailIndex = 1.5;
constexpr double kBaseTruncation = 6.0;
constexpr double kSchedPeriodS = 1.0;
constexpr double kMcsDownAbove = 0.10;
constexpr double kMcsUpBelow = 0.05;
constexpr double kSnrNoiseDb = 0.3;
constexpr double kSnrDipPerBler = 8.0;
constexpr double kRsrpNoiseDb = 0.5;
constexpr std::uint64_t kDlTotalPerSnapshot = 200;

enum class Stream : std::uint32_t { Latency = 1, Scheduler = 2, Coupling = 3 };

// One independent generator per (seed, stream, index): changing a knob that
// only affects sample i never shifts the draws of any other sample.
class Substream {
 public:
  Substream(std::uint64_t seed, Stream stream, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    engine_.seed(seq);
  }

  // [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

std::size_t slot_count(double duration_s, double period_s) {
  return static_cast<std::size_t>(std::ceil(duration_s / period_s - 1e-9));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidSpec, what);
}

bool unit(double p) { return p >= 0.0 && p <= 1.0; }

struct SlotDraws {
  bool independent = false;
  double u_level = 0.0;
  double snr_noise = 0.0;
  double rsrp_noise = 0.0;
};

// Scheduler slot j draws; the latency generator reads the same values to
// know which slots carry an independent excursion.
SlotDraws slot_draws(const ScenarioSpec& spec, std::size_t j) {
  Substream rng(spec.seed, Stream::Scheduler, j);
  SlotDraws d;
  const double u_exc = rng.uniform();
  d.u_level = rng.uniform();
  d.snr_noise = rng.normal();
  d.rsrp_noise = rng.normal();
  double p = spec.bler_excursion_prob;
  if (spec.obstruction_start_s && static_cast<double>(j) * kSchedPeriodS >= *spec.obstruction_start_s)
    p = std::min(1.0, p * spec.obstruction_excursion_gain);
  d.independent = u_exc < p;
  return d;
}

double excursion_level(const ScenarioSpec& spec, double u) {
  return spec.excursion_min + u * (spec.excursion_max - spec.excursion_min);
}

}  // namespace

void UeProfile::validate() const {
  require(base_median_ms > 0.0 && std::isfinite(base_median_ms), "base_median_ms must be positive");
  require(jitter_scale > 0.0 && std::isfinite(jitter_scale), "jitter_scale must be positive");
  require(stall_prob >= 0.0 && stall_prob < 0.2, "stall_prob must lie in [0, 0.2)");
  require(stall_scale_ms > 0.0 && std::isfinite(stall_scale_ms), "stall_scale_ms must be positive");
  require(stall_cap_ms > 0.0, "stall_cap_ms must be positive");
}

UeProfile UeProfile::smartphone() {
  UeProfile p;
  p.label = "smartphone";
  p.type = UeType::Smartphone;
  p.base_median_ms = 10.0;
  p.jitter_scale = 2.1;
  p.stall_prob = 0.0015;
  p.stall_scale_ms = 150.0;
  p.stall_cap_ms = 850.0;
  return p;
}

UeProfile UeProfile::modem() {
  UeProfile p;
  p.label = "modem";
  p.type = UeType::Modem;
  p.base_median_ms = 35.0;
  p.jitter_scale = 7.0;
  p.stall_prob = 0.018;
  p.stall_scale_ms = 300.0;
  p.stall_cap_ms = 8000.0;
  return p;
}

void ScenarioSpec::validate() const {
  require(!run_id.empty(), "run_id must be non-empty");
  require(duration_s > 0.0 && std::isfinite(duration_s), "duration_s must be positive");
  require(ping_interval_s > 0.0 && std::isfinite(ping_interval_s), "ping_interval_s must be positive");
  require(!obstruction_start_s || scenario == Scenario::DynamicPeople,
          "obstruction_start_s is only meaningful for dynamic_people");
  require(!obstruction_start_s || (*obstruction_start_s >= 0.0 && *obstruction_start_s <= duration_s),
          "obstruction_start_s must lie inside the run");
  require(unit(bler_baseline), "bler_baseline must lie in [0,1]");
  require(unit(bler_excursion_prob), "bler_excursion_prob must lie in [0,1]");
  require(unit(stall_bler_coupling), "stall_bler_coupling must lie in [0,1]");
  require(loss_prob >= 0.0 && loss_prob < 1.0, "loss_prob must lie in [0,1)");
  require(packet_size_b >= 1, "packet_size_b must be >= 1");
  require(distance_m >= 0.0, "distance_m must be >= 0");
  require(obstruction_excursion_gain >= 0.0, "obstruction_excursion_gain must be >= 0");
  require(harq_retx_ms >= 0.0 && std::isfinite(harq_retx_ms), "harq_retx_ms must be >= 0");
  require(unit(excursion_min) && unit(excursion_max) && excursion_min <= excursion_max,
          "excursion levels must satisfy 0 <= min <= max <= 1");
  require(mcs_max >= 0 && mcs_max <= 28, "mcs_max must lie in [0,28]");
  require(mcs_start >= 0 && mcs_start <= 28, "mcs_start must lie in [0,28]");
  require(mcs_up_after >= 1, "mcs_up_after must be >= 1");
  ue.validate();
}

RunMetadata ScenarioSpec::metadata() const {
  RunMetadata m;
  m.run_id = run_id;
  m.ue = UeKind{ue.type, ue.type == UeType::Other ? ue.label : std::string{}};
  m.distance_m = distance_m;
  m.packet_size_b = packet_size_b;
  m.scenario = ScenarioKind{scenario, {}};
  m.ping_interval_s = ping_interval_s;
  m.nominal_duration_s = duration_s;
  return m;
}

LatencyTrace gen_latency_trace(const ScenarioSpec& spec) {
  spec.validate();
  const auto& ue = spec.ue;
  const double interval_ms = spec.ping_interval_s * 1000.0;
  const double log_sigma = ue.jitter_scale / ue.base_median_ms;
  const std::size_t n = slot_count(spec.duration_s, spec.ping_interval_s);

  LatencyTrace out;
  out.samples.reserve(n);
  double hold_ms = 0.0;
  SlotDraws draws;
  std::size_t draws_slot = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < n; ++i) {
    Substream rng(spec.seed, Stream::Latency, i);
    const double u_loss = rng.uniform();
    const double u_stall = rng.uniform();
    const double u_size = rng.uniform();
    const double z = std::clamp(rng.normal(), -kBaseTruncation, kBaseTruncation);
    const double u_harq = rng.uniform();
    const double t = static_cast<double>(i) * spec.ping_interval_s;

    const auto slot = static_cast<std::size_t>(std::floor(t / kSchedPeriodS));
    if (slot != draws_slot) {
      draws = slot_draws(spec, slot);
      draws_slot = slot;
    }
    double bler = spec.bler_baseline;
    if (draws.independent) bler += excursion_level(spec, draws.u_level);
    double base = ue.base_median_ms * std::exp(log_sigma * z);
    if (u_harq < std::min(1.0, bler)) base += spec.harq_retx_ms;
    hold_ms = std::max(hold_ms - interval_ms, 0.0);
    if (u_stall < ue.stall_prob) {
      const double size = std::min(ue.stall_cap_ms, ue.stall_scale_ms * std::pow(1.0 - u_size, -1.0 / kStallTailIndex));
      hold_ms = std::max(hold_ms, size);
      out.truth.stall_times_s.push_back(t);
      out.truth.stall_magnitude_ms.push_back(size);
    }
    if (u_loss < spec.loss_prob) continue;
    out.samples.push_back({t, static_cast<std::uint64_t>(i), base + hold_ms});
  }
  return out;
}

std::vector<SchedulerSnapshot> gen_sched_trace(const ScenarioSpec& spec, GroundTruth& truth) {
  spec.validate();
  if (truth.stall_magnitude_ms.size() != truth.stall_times_s.size())
    throw Error(ErrorKind::InvalidSpec, "ground truth stall times and magnitudes differ in length");
  const std::size_t m = slot_count(spec.duration_s, kSchedPeriodS);
  const auto last = static_cast<std::int64_t>(m) - 1;

  std::vector<bool> active(m, false);
  std::vector<double> u_level(m);
  std::vector<double> snr_noise(m);
  std::vector<double> rsrp_noise(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto d = slot_draws(spec, j);
    active[j] = d.independent;
    u_level[j] = d.u_level;
    snr_noise[j] = d.snr_noise;
    rsrp_noise[j] = d.rsrp_noise;
  }

  for (std::size_t k = 0; k < truth.stall_times_s.size(); ++k) {
    const double t0 = truth.stall_times_s[k];
    const auto sample_index = static_cast<std::uint64_t>(std::llround(t0 / spec.ping_interval_s));
    Substream rng(spec.seed, Stream::Coupling, sample_index);
    if (!(rng.uniform() < spec.stall_bler_coupling)) continue;
    const double t1 = t0 + truth.stall_magnitude_ms[k] / 1000.0;
    const auto from = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(t0)) - 1);
    const auto to = std::min<std::int64_t>(last, static_cast<std::int64_t>(std::floor(t1)) + 2);
    for (auto j = from; j <= to; ++j) active[static_cast<std::size_t>(j)] = true;
  }

  std::vector<SchedulerSnapshot> out;
  out.reserve(m);
  int mcs = std::min(spec.mcs_start, spec.mcs_max);
  int low_streak = 0;
  truth.excursion_times_s.clear();
  for (std::size_t j = 0; j < m; ++j) {
    const double t = static_cast<double>(j) * kSchedPeriodS;
    if (j > 0) {
      const double prev = out.back().dl_bler;
      if (prev > kMcsDownAbove) {
        mcs = std::max(0, mcs - 1);
        low_streak = 0;
      } else if (prev < kMcsUpBelow) {
        if (++low_streak >= spec.mcs_up_after) {
          mcs = std::min(spec.mcs_max, mcs + 1);
          low_streak = 0;
        }
      } else {
        low_streak = 0;
      }
    }

    double level = 0.0;
    if (active[j]) {
      level = excursion_level(spec, u_level[j]);
      truth.excursion_times_s.push_back(t);
    }
    double bler = std::min(1.0, spec.bler_baseline + level);
    if (spec.quantize_bler) bler = std::round(bler * 10.0) / 10.0;

    SchedulerSnapshot s;
    s.t_s = t;
    s.rnti = spec.rnti;
    s.dl_bler = bler;
    s.ul_bler = bler * 0.5;
    s.dl_mcs = mcs;
    s.ul_mcs = mcs;
    s.snr_db = spec.snr_base_db + kSnrNoiseDb * snr_noise[j] - kSnrDipPerBler * level;
    s.rsrp_dbm = spec.rsrp_base_dbm + kRsrpNoiseDb * rsrp_noise[j];
    s.dl_total = kDlTotalPerSnapshot;
    s.dl_retx = static_cast<std::uint64_t>(std::llround(bler * static_cast<double>(kDlTotalPerSnapshot)));
    out.push_back(s);
  }
  return out;
}

void write_truth_csv(std::ostream& out, const GroundTruth& truth) {
  std::string text = "kind,t_s\n";
  for (double t : truth.stall_times_s) text += "stall," + format_exact(t) + '\n';
  for (double t : truth.excursion_times_s) text += "excursion," + format_exact(t) + '\n';
  out << text;
}

GroundTruth read_truth_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "kind,t_s") throw Error(ErrorKind::MissingColumn, "truth sidecar header");
  GroundTruth truth;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw Error(ErrorKind::MalformedLine, "truth line " + std::to_string(line_no));
    const auto kind = line.substr(0, comma);
    const double t = parse_double(std::string_view(line).substr(comma + 1));
    if (kind == "stall") truth.stall_times_s.push_back(t);
    else if (kind == "excursion") truth.excursion_times_s.push_back(t);
    else throw Error(ErrorKind::MalformedLine, "truth line " + std::to_string(line_no) + ": kind '" + kind + "'");
  }
  return truth;
}

Campaign gen_campaign(std::span<const ScenarioSpec> presets, const fs::path& out_dir) {
  std::set<std::string> ids;
  for (const auto& spec : presets) {
    spec.validate();
    if (!ids.insert(spec.run_id).second) throw Error(ErrorKind::InvalidSpec, "duplicate run_id '" + spec.run_id + "'");
  }

  Campaign campaign;
  std::string listing = "# rantail synthetic campaign\n";
  for (const auto& spec : presets) {
    auto latency = gen_latency_trace(spec);
    auto sched = gen_sched_trace(spec, latency.truth);

    GeneratedRun g;
    g.run = consolidate_run(std::move(latency.samples), std::move(sched), spec.metadata());
    g.truth = std::move(latency.truth);

    RunManifest manifest;
    manifest.meta = g.run.meta;
    manifest.latency_path = out_dir / (spec.run_id + ".latency.csv");
    manifest.scheduler_path = out_dir / (spec.run_id + ".sched.csv");
    g.manifest_path = out_dir / (spec.run_id + ".manifest");
    g.truth_path = out_dir / (spec.run_id + ".truth.csv");

    std::ostringstream lat;
    write_latency_csv(lat, g.run.latency);
    write_file_atomic(manifest.latency_path, lat.str());
    std::ostringstream sch;
    write_scheduler_csv(sch, g.run.scheduler);
    write_file_atomic(manifest.scheduler_path, sch.str());
    std::ostringstream tru;
    write_truth_csv(tru, g.truth);
    write_file_atomic(g.truth_path, tru.str());
    std::ostringstream man;
    write_manifest(man, manifest, out_dir);
    write_file_atomic(g.manifest_path, man.str());

    listing += "run = " + spec.run_id + ".manifest\n";
    campaign.runs.push_back(std::move(g));
  }
  campaign.manifest_path = out_dir / "campaign.manifest";
  write_file_atomic(campaign.manifest_path, listing);
  return campaign;
}

std::vector<std::string> preset_names() { return {"paperlike", "ue-compare"}; }

namespace {

ScenarioSpec paperlike_baseline(std::uint64_t seed) {
  ScenarioSpec s;
  s.run_id = "baseline";
  s.scenario = Scenario::Baseline;
  s.duration_s = 1800.0;
  s.seed = seed;
  s.ue = UeProfile::smartphone();
  s.bler_baseline = 0.03;
  s.bler_excursion_prob = 0.03;
  s.stall_bler_coupling = 0.8;
  s.loss_prob = 0.006;
  s.mcs_start = 6;
  s.mcs_max = 9;
  s.snr_base_db = 27.5;
  return s;
}

}  // namespace

std::optional<std::vector<ScenarioSpec>> preset(const std::string& name, std::uint64_t seed) {
  if (name == "paperlike") {
    auto baseline = paperlike_baseline(seed);

    ScenarioSpec dynamic = baseline;
    dynamic.run_id = "dynamic_people";
    dynamic.scenario = Scenario::DynamicPeople;
    dynamic.seed = seed + 1;
    dynamic.obstruction_start_s = 900.0;
    dynamic.bler_baseline = 0.0;
    dynamic.bler_excursion_prob = 0.02;
    dynamic.obstruction_excursion_gain = 3.0;
    dynamic.stall_bler_coupling = 0.0;
    dynamic.mcs_start = 9;
    dynamic.snr_base_db = 28.5;

    ScenarioSpec stat = baseline;
    stat.run_id = "static_1h";
    stat.scenario = Scenario::StaticLong;
    stat.seed = seed + 2;
    stat.duration_s = 3600.0;
    stat.bler_baseline = 0.0;
    stat.bler_excursion_prob = 0.0;
    stat.stall_bler_coupling = 0.0;
    stat.mcs_start = 9;
    stat.snr_base_db = 30.5;
    return std::vector<ScenarioSpec>{baseline, dynamic, stat};
  }
  if (name == "ue-compare") {
    auto phone = paperlike_baseline(seed);
    phone.run_id = "smartphone_baseline";
    auto modem = paperlike_baseline(seed + 1);
    modem.run_id = "modem_baseline";
    modem.ue = UeProfile::modem();
    modem.loss_prob = 0.005;
    return std::vector<ScenarioSpec>{phone, modem};
  }
  return std::nullopt;
}

}  // namespace rantail::synth

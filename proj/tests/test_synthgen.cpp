#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "rantail/canonical_io.hpp"
#include "rantail/error.hpp"
#include "rantail/flags.hpp"
#include "rantail/stats.hpp"
#include "rantail/synthgen.hpp"
#include "rantail/windows.hpp"

using namespace rantail;
using namespace rantail::synth;
namespace fs = std::filesystem;

namespace {

std::vector<double> rtts(const std::vector<LatencySample>& s) {
  std::vector<double> v;
  v.reserve(s.size());
  for (const auto& x : s) v.push_back(x.rtt_ms);
  return v;
}

std::vector<double> blers(const std::vector<SchedulerSnapshot>& s) {
  std::vector<double> v;
  for (const auto& x : s) v.push_back(x.dl_bler);
  return v;
}

ScenarioSpec quiet_spec() {
  ScenarioSpec s;
  s.duration_s = 600.0;
  s.seed = 11;
  s.ue = UeProfile::smartphone();
  s.ue.stall_prob = 0.0;
  return s;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path(RANTAIL_TEST_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Synth, Deterministic) {
  auto spec = quiet_spec();
  spec.ue.stall_prob = 0.01;
  spec.bler_excursion_prob = 0.05;
  spec.stall_bler_coupling = 0.5;
  auto a = gen_latency_trace(spec);
  auto b = gen_latency_trace(spec);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_EQ(a.samples[i].rtt_ms, b.samples[i].rtt_ms);
  EXPECT_EQ(a.truth.stall_times_s, b.truth.stall_times_s);
  const auto sa = gen_sched_trace(spec, a.truth);
  const auto sb = gen_sched_trace(spec, b.truth);
  EXPECT_EQ(blers(sa), blers(sb));
  EXPECT_EQ(a.truth.excursion_times_s, b.truth.excursion_times_s);

  spec.seed = 12;
  EXPECT_NE(rtts(gen_latency_trace(spec).samples), rtts(a.samples));
}

TEST(Synth, NoStallsMeansBoundedSupport) {
  const auto spec = quiet_spec();
  const auto trace = gen_latency_trace(spec);
  EXPECT_EQ(trace.samples.size(), 3000u);
  EXPECT_TRUE(trace.truth.stall_times_s.empty());
  const auto v = rtts(trace.samples);
  const double bound = spec.ue.base_median_ms * std::exp(6.0 * spec.ue.jitter_scale / spec.ue.base_median_ms);
  for (double x : v) {
    EXPECT_GT(x, 0.0);
    EXPECT_LE(x, bound);
  }
  EXPECT_EQ(summary_stats(v).exceed_1s, 0.0);
  EXPECT_NEAR(percentile(v, 0.5), spec.ue.base_median_ms, 0.5);
}

TEST(Synth, ModemTailIsHeavier) {
  auto phone = quiet_spec();
  phone.ue = UeProfile::smartphone();
  phone.duration_s = 1800.0;
  auto modem = phone;
  modem.ue = UeProfile::modem();
  const auto p = summary_stats(rtts(gen_latency_trace(phone).samples));
  const auto m = summary_stats(rtts(gen_latency_trace(modem).samples));
  EXPECT_GT(m.median_ms, p.median_ms);
  EXPECT_GT(m.p95_ms, 100.0);
  EXPECT_GT(m.exceed_1s, 0.0);
  EXPECT_EQ(p.exceed_1s, 0.0);
}

TEST(Synth, StallProbabilityRaisesTail) {
  auto spec = quiet_spec();
  spec.duration_s = 1800.0;
  double prev = -1.0;
  for (double prob : {0.0, 0.002, 0.01, 0.05, 0.1}) {
    spec.ue.stall_prob = prob;
    const double e = exceedance_prob(rtts(gen_latency_trace(spec).samples), 100.0);
    // common random numbers: a higher stall probability only adds stalls
    EXPECT_GE(e, prev) << prob;
    prev = e;
  }
  EXPECT_GT(prev, 0.0);
}

TEST(Synth, McsClimbsToCapWithoutErrors) {
  auto spec = quiet_spec();
  spec.mcs_start = 4;
  spec.mcs_max = 12;
  GroundTruth truth;
  const auto s = gen_sched_trace(spec, truth);
  ASSERT_EQ(s.size(), 600u);
  EXPECT_TRUE(truth.excursion_times_s.empty());
  EXPECT_EQ(*s.front().dl_mcs, 4);
  EXPECT_EQ(*s.back().dl_mcs, 12);
  int prev = *s.front().dl_mcs;
  bool reached = false;
  for (const auto& x : s) {
    EXPECT_GE(*x.dl_mcs, prev);
    reached = reached || *x.dl_mcs == 12;
    if (reached) EXPECT_EQ(*x.dl_mcs, 12);
    prev = *x.dl_mcs;
  }
}

TEST(Synth, ExcursionsPushMcsDown) {
  auto spec = quiet_spec();
  spec.bler_excursion_prob = 0.1;
  spec.mcs_start = 20;
  GroundTruth truth;
  const auto s = gen_sched_trace(spec, truth);
  EXPECT_FALSE(truth.excursion_times_s.empty());
  for (std::size_t j = 1; j < s.size(); ++j) {
    EXPECT_LE(std::abs(*s[j].dl_mcs - *s[j - 1].dl_mcs), 1);
    EXPECT_GE(*s[j].dl_mcs, 0);
    EXPECT_LE(*s[j].dl_mcs, 28);
    if (s[j - 1].dl_bler > 0.10) {
      EXPECT_EQ(*s[j].dl_mcs, std::max(0, *s[j - 1].dl_mcs - 1));
    }
    ASSERT_TRUE(s[j].dl_retx && s[j].dl_total);
    EXPECT_LE(*s[j].dl_retx, *s[j].dl_total);
  }
  for (double t : truth.excursion_times_s) {
    const auto& snap = s[static_cast<std::size_t>(t)];
    EXPECT_GE(snap.dl_bler, spec.excursion_min);
    EXPECT_LE(snap.dl_bler, spec.excursion_max);
  }
}

TEST(Synth, QuantizedBlerUsesTenthSteps) {
  auto spec = quiet_spec();
  spec.bler_baseline = 0.03;
  spec.bler_excursion_prob = 0.1;
  spec.quantize_bler = true;
  GroundTruth truth;
  for (const auto& s : gen_sched_trace(spec, truth)) {
    EXPECT_NEAR(s.dl_bler * 10.0, std::round(s.dl_bler * 10.0), 1e-12);
  }
}

TEST(Synth, StaticPresetHasZeroBler) {
  const auto specs = *preset("paperlike", 3);
  const auto& stat = specs.at(2);
  EXPECT_EQ(stat.scenario, Scenario::StaticLong);
  GroundTruth truth;
  const auto s = gen_sched_trace(stat, truth);
  const auto b = blers(s);
  EXPECT_EQ(percentile(b, 0.5), 0.0);
  EXPECT_EQ(percentile(b, 0.95), 0.0);
}

TEST(Synth, CoupledStallsRaiseSchedulerEvidence) {
  auto spec = quiet_spec();
  spec.duration_s = 1800.0;
  spec.ue.stall_prob = 0.004;
  spec.stall_bler_coupling = 1.0;
  auto lat = gen_latency_trace(spec);
  ASSERT_FALSE(lat.truth.stall_times_s.empty());
  auto sched = gen_sched_trace(spec, lat.truth);
  rantail::Run run;
  run.meta = spec.metadata();
  run.latency = lat.samples;
  run.scheduler = sched;
  const auto joined = windowed_join(run, WindowSpec{});
  const FlagPolicy policy;
  std::size_t hot = 0;
  for (const auto& w : joined) {
    if (w.latency.p95_ms <= policy.lat_p95_threshold_ms) continue;
    ++hot;
    EXPECT_TRUE(evaluate_flag(w, policy).raised) << w.start_s;
  }
  EXPECT_GT(hot, 0u);

  spec.stall_bler_coupling = 0.0;
  GroundTruth t2 = lat.truth;
  run.scheduler = gen_sched_trace(spec, t2);
  EXPECT_TRUE(t2.excursion_times_s.empty());
  EXPECT_EQ(flag_rate(evaluate_flags(windowed_join(run, WindowSpec{}), policy)), 0.0);
}

TEST(Synth, InvalidSpecs) {
  auto spec = quiet_spec();
  spec.ue.stall_prob = 0.2;
  EXPECT_THROW(gen_latency_trace(spec), Error);
  spec = quiet_spec();
  spec.bler_excursion_prob = 1.5;
  GroundTruth truth;
  EXPECT_THROW(gen_sched_trace(spec, truth), Error);
  spec = quiet_spec();
  spec.duration_s = 0.0;
  EXPECT_THROW(gen_latency_trace(spec), Error);
}

TEST(Synth, TruthSidecarRoundTrip) {
  GroundTruth t;
  t.stall_times_s = {1.2, 33.4};
  t.stall_magnitude_ms = {200.0, 300.0};
  t.excursion_times_s = {0.0, 1.0, 7.0};
  std::ostringstream out;
  write_truth_csv(out, t);
  std::istringstream in(out.str());
  const auto back = read_truth_csv(in);
  EXPECT_EQ(back.stall_times_s, t.stall_times_s);
  EXPECT_EQ(back.excursion_times_s, t.excursion_times_s);
  std::istringstream bad("kind,t_s\nfoo,1\n");
  EXPECT_THROW(read_truth_csv(bad), Error);
}

TEST(Campaign, EmptyPresetListWritesEmptyManifest) {
  const auto dir = fresh_dir("campaign_empty");
  const auto c = gen_campaign({}, dir);
  EXPECT_TRUE(c.runs.empty());
  const auto text = read_file(c.manifest_path);
  EXPECT_EQ(text.find("run ="), std::string::npos);
}

TEST(Campaign, PaperlikeLabelsAndRegeneration) {
  EXPECT_FALSE(preset("nope", 1).has_value());
  const auto specs = *preset("paperlike", 5);
  ASSERT_EQ(specs.size(), 3u);
  EXPECT_EQ(specs[0].scenario, Scenario::Baseline);
  EXPECT_EQ(specs[1].scenario, Scenario::DynamicPeople);
  EXPECT_EQ(specs[2].scenario, Scenario::StaticLong);
  for (const auto& s : specs) {
    EXPECT_EQ(s.ue.type, UeType::Smartphone);
    EXPECT_EQ(s.packet_size_b, 30u);
    EXPECT_EQ(s.distance_m, 6.0);
  }

  const auto dir = fresh_dir("campaign_paperlike");
  const auto c = gen_campaign(specs, dir);
  ASSERT_EQ(c.runs.size(), 3u);
  std::vector<std::string> first;
  for (const auto& r : c.runs) {
    const auto m = read_manifest_file(r.manifest_path);
    EXPECT_EQ(m.meta, r.run.meta);
    first.push_back(read_file(m.latency_path) + read_file(m.scheduler_path) + read_file(r.truth_path));
    std::istringstream in(read_file(m.latency_path));
    EXPECT_EQ(read_latency_csv(in).size(), r.run.latency.size());
  }
  const auto again = gen_campaign(specs, dir);
  for (std::size_t i = 0; i < again.runs.size(); ++i) {
    const auto m = read_manifest_file(again.runs[i].manifest_path);
    EXPECT_EQ(read_file(m.latency_path) + read_file(m.scheduler_path) + read_file(again.runs[i].truth_path),
              first[i]);
  }

  auto dup = specs;
  dup[1].run_id = dup[0].run_id;
  EXPECT_THROW(gen_campaign(dup, dir), Error);
}

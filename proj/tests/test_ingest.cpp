#include <gtest/gtest.h>

#include <sstream>

#include "rantail/error.hpp"
#include "rantail/ingest.hpp"

using namespace rantail;

namespace {

RunMetadata meta() {
  RunMetadata m;
  m.run_id = "r1";
  m.ping_interval_s = 0.2;
  m.nominal_duration_s = 1800.0;
  return m;
}

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected rantail::Error";
  return ErrorKind::Io;
}

PingParseResult parse_ping(const std::string& text) {
  std::istringstream in(text);
  return parse_ping_log(in, meta());
}

FullstatsParseResult parse_stats(const std::string& text, ColumnMap map = {{SchedField::Rnti, "rnti"},
                                                                             {SchedField::DlBler, "dl_bler"}}) {
  std::istringstream in(text);
  return parse_fullstats(in, map, meta());
}

}  // namespace

TEST(PingLog, SequenceClock) {
  const auto r = parse_ping("64 bytes from 10.0.0.1: icmp_seq=3 ttl=64 time=12.4 ms\n");
  ASSERT_EQ(r.samples.size(), 1u);
  EXPECT_DOUBLE_EQ(r.samples[0].t_s, 0.6);
  EXPECT_EQ(r.samples[0].seq, 3u);
  EXPECT_DOUBLE_EQ(r.samples[0].rtt_ms, 12.4);
}

TEST(PingLog, EpochClock) {
  const auto r = parse_ping(
      "[1700000000.500000] 1008 bytes from h: icmp_seq=0 ttl=64 time=8.1 ms\n"
      "[1700000000.700000] 1008 bytes from h: icmp_seq=1 ttl=64 time=9.0 ms\n");
  ASSERT_EQ(r.samples.size(), 2u);
  EXPECT_DOUBLE_EQ(r.samples[0].t_s, 0.0);
  EXPECT_NEAR(r.samples[1].t_s, 0.2, 1e-6);
  EXPECT_DOUBLE_EQ(r.samples[1].rtt_ms, 9.0);
}

TEST(PingLog, SkipsNonRepliesAndReportsMalformed) {
  const auto r = parse_ping(
      "PING 10.0.0.1 (10.0.0.1) 30(58) bytes of data.\n"
      "38 bytes from 10.0.0.1: icmp_seq=1 ttl=64 time=11.0 ms\n"
      "Request timeout for icmp_seq 2\n"
      "38 bytes from 10.0.0.1: icmp_seq=3 ttl=64 time=abc ms\n"
      "\n"
      "38 bytes from 10.0.0.1: icmp_seq=4 ttl=64\n"
      "38 bytes from 10.0.0.1: icmp_seq=5 ttl=64 time=10.5 ms\n"
      "--- 10.0.0.1 ping statistics ---\n"
      "5 packets transmitted, 3 received, 40% packet loss, time 4005ms\n"
      "rtt min/avg/max/mdev = 10.5/10.7/11.0/0.2 ms\n");
  EXPECT_EQ(r.samples.size(), 2u);
  ASSERT_EQ(r.malformed.size(), 2u);
  EXPECT_EQ(r.malformed[0].line_no, 4u);
  EXPECT_EQ(r.malformed[1].line_no, 6u);
  EXPECT_EQ(r.skipped, 5u);
  EXPECT_EQ(r.samples.size() + r.skipped + r.malformed.size(), r.candidate_lines);
}

TEST(PingLog, EmptyTrace) {
  EXPECT_EQ(kind_of([] { parse_ping("PING host\n--- stats ---\n"); }), ErrorKind::EmptyTrace);
  EXPECT_EQ(kind_of([] { parse_ping(""); }), ErrorKind::EmptyTrace);
}

TEST(PingLog, ThirtyMinuteTraceWithLosses) {
  // 9000 sends at 0.2 s; every seq divisible by 163 times out (55 of them).
  std::ostringstream log;
  log << "PING 10.0.0.1 (10.0.0.1) 30(58) bytes of data.\n";
  std::size_t lost = 0;
  for (int seq = 1; seq <= 9000; ++seq) {
    if (seq % 163 == 0) {
      log << "Request timeout for icmp_seq " << seq << '\n';
      ++lost;
    } else {
      log << "38 bytes from 10.0.0.1: icmp_seq=" << seq << " ttl=64 time=" << 10 + seq % 7 << ".3 ms\n";
    }
  }
  ASSERT_EQ(lost, 55u);
  const auto r = parse_ping(log.str());
  EXPECT_EQ(r.samples.size(), 8945u);
  EXPECT_EQ(r.skipped, 56u);
  EXPECT_TRUE(r.malformed.empty());
  for (std::size_t i = 1; i < r.samples.size(); ++i) EXPECT_LE(r.samples[i - 1].t_s, r.samples[i].t_s);
}

TEST(PingLog, OutputSortedByTime) {
  const auto r = parse_ping(
      "64 bytes from h: icmp_seq=5 ttl=64 time=1.0 ms\n"
      "64 bytes from h: icmp_seq=2 ttl=64 time=2.0 ms\n");
  ASSERT_EQ(r.samples.size(), 2u);
  EXPECT_EQ(r.samples[0].seq, 2u);
  EXPECT_GE(r.samples[0].t_s, 0.0);
}

TEST(Fullstats, RowIndexClock) {
  const auto r = parse_stats("rnti,dl_bler\n17,0.05\n17,0.10\n");
  ASSERT_EQ(r.snapshots.size(), 2u);
  EXPECT_DOUBLE_EQ(r.snapshots[0].t_s, 0.0);
  EXPECT_DOUBLE_EQ(r.snapshots[1].t_s, 1.0);
  EXPECT_EQ(r.snapshots[1].rnti, 17u);
  EXPECT_DOUBLE_EQ(r.snapshots[1].dl_bler, 0.10);
  EXPECT_FALSE(r.snapshots[0].dl_mcs.has_value());
  EXPECT_FALSE(r.snapshots[0].snr_db.has_value());
}

TEST(Fullstats, OutOfRangeRowsSkipped) {
  const auto r = parse_stats("rnti,dl_bler\n17,0.05\n17,1.7\n17,x\n17,0.2\n");
  EXPECT_EQ(r.snapshots.size(), 2u);
  EXPECT_EQ(r.skipped_rows, 2u);
  EXPECT_EQ(r.data_rows, 4u);
  // Rejected rows still occupy their slot on the row-index clock.
  EXPECT_DOUBLE_EQ(r.snapshots[1].t_s, 3.0);
}

TEST(Fullstats, MappedVendorHeadersAndTimestamps) {
  ColumnMap map{{SchedField::Timestamp, "ts"},  {SchedField::Rnti, "RNTI"},  {SchedField::DlBler, "dlBLER"},
                {SchedField::DlMcs, "dlMCS"},   {SchedField::SnrDb, "SNR"},  {SchedField::DlRetx, "retx"},
                {SchedField::DlTotal, "total"}};
  std::istringstream in(
      "ts;RNTI;dlBLER;dlMCS;SNR;retx;total;extra\n"
      "1000.5;0x4601;0.1;9;27.5;2;20;foo\n"
      "1001.5;0x4601;0.0;;28;0;20;foo\n"
      "1002.5;0x4601;0.0;29;28;0;20;foo\n"
      "1003.5;0x4601;0.3;8;28;9;5;foo\n");
  FullstatsOptions options;
  options.delimiter = ';';
  const auto s = parse_fullstats(in, map, meta(), options);
  ASSERT_EQ(s.snapshots.size(), 2u);
  EXPECT_EQ(s.skipped_rows, 2u);  // mcs 29 and retx > total
  EXPECT_DOUBLE_EQ(s.snapshots[0].t_s, 0.0);
  EXPECT_DOUBLE_EQ(s.snapshots[1].t_s, 1.0);
  EXPECT_EQ(s.snapshots[0].rnti, 0x4601u);
  EXPECT_EQ(s.snapshots[0].dl_mcs, 9);
  EXPECT_FALSE(s.snapshots[1].dl_mcs.has_value());
  EXPECT_EQ(s.snapshots[0].dl_retx, 2u);
}

TEST(Fullstats, Errors) {
  EXPECT_EQ(kind_of([] { parse_stats("rnti,bler\n17,0.1\n"); }), ErrorKind::MissingColumn);
  EXPECT_EQ(kind_of([] { parse_stats("rnti,dl_bler\n17,1.5\n"); }), ErrorKind::EmptyTrace);
  EXPECT_EQ(kind_of([] { parse_stats(""); }), ErrorKind::EmptyTrace);
  EXPECT_EQ(kind_of([] { parse_stats("rnti,dl_bler\n17,0.1\n", {{SchedField::Rnti, "rnti"}}); }),
            ErrorKind::MissingColumn);
}

TEST(DominantRnti, Examples) {
  std::vector<SchedulerSnapshot> all17(4);
  for (auto& s : all17) s.rnti = 17;
  auto d = select_dominant_rnti(all17);
  EXPECT_EQ(d.rnti, 17u);
  EXPECT_EQ(d.snapshots.size(), 4u);

  std::vector<SchedulerSnapshot> mixed;
  for (int i = 0; i < 103; ++i) {
    SchedulerSnapshot s;
    s.rnti = (i % 34 == 5) ? 42 : 17;
    s.t_s = i;
    mixed.push_back(s);
  }
  // brute-force counts
  const auto n17 = std::count_if(mixed.begin(), mixed.end(), [](auto& s) { return s.rnti == 17; });
  const auto n42 = std::count_if(mixed.begin(), mixed.end(), [](auto& s) { return s.rnti == 42; });
  ASSERT_EQ(n17, 100);
  ASSERT_EQ(n42, 3);
  d = select_dominant_rnti(mixed);
  EXPECT_EQ(d.rnti, 17u);
  EXPECT_EQ(d.snapshots.size(), 100u);

  std::vector<SchedulerSnapshot> tie;
  for (int i = 0; i < 20; ++i) {
    SchedulerSnapshot s;
    s.rnti = i % 2 ? 5 : 9;
    tie.push_back(s);
  }
  EXPECT_EQ(select_dominant_rnti(tie).rnti, 5u);
  EXPECT_EQ(kind_of([] { select_dominant_rnti({}); }), ErrorKind::EmptyTrace);
}

TEST(Consolidate, SortsFiltersAndConserves) {
  std::vector<LatencySample> lat{{2.0, 10, 5.0}, {0.4, 2, 6.0}, {1.0, 5, 7.0}};
  std::vector<SchedulerSnapshot> sched(3);
  sched[0].t_s = 2.0;
  sched[0].rnti = 7;
  sched[1].t_s = 1.0;
  sched[1].rnti = 7;
  sched[2].t_s = 0.0;
  sched[2].rnti = 8;

  const auto run = consolidate_run(lat, sched, meta());
  ASSERT_EQ(run.latency.size(), 3u);
  EXPECT_DOUBLE_EQ(run.latency[0].t_s, 0.4);
  EXPECT_DOUBLE_EQ(run.latency[2].t_s, 2.0);
  ASSERT_EQ(run.scheduler.size(), 2u);
  EXPECT_EQ(run.scheduler[0].rnti, 7u);
  EXPECT_DOUBLE_EQ(run.scheduler[0].t_s, 1.0);

  const auto latency_only = consolidate_run(lat, {}, meta());
  EXPECT_TRUE(latency_only.scheduler.empty());
  EXPECT_EQ(summarize_run(latency_only).latency_samples, 3u);
  EXPECT_FALSE(summarize_run(latency_only).dominant_rnti.has_value());
}

TEST(Consolidate, SchedulerOffset) {
  auto m = meta();
  m.sched_offset_s = -1.5;
  std::vector<SchedulerSnapshot> sched(4);
  for (int i = 0; i < 4; ++i) sched[i].t_s = i;
  const auto run = consolidate_run({{0.0, 0, 1.0}}, sched, m);
  ASSERT_EQ(run.scheduler.size(), 2u);
  EXPECT_DOUBLE_EQ(run.scheduler[0].t_s, 0.5);
}

TEST(Consolidate, RejectsInvalidMetadata) {
  auto m = meta();
  m.ping_interval_s = 0.0;
  EXPECT_EQ(kind_of([&] { consolidate_run({{0.0, 0, 1.0}}, {}, m); }), ErrorKind::InvalidSpec);
}

#include "rantail/windows.hpp"

#include <algorithm>
#include <cmath>

#include "rantail/error.hpp"
#include "rantail/stats.hpp"

namespace rantail {
namespace {

// Absorbs representation error in (duration - width) / stride so that
// e.g. 60 s / 10 s / 5 s yields exactly 11 windows.
constexpr double kGridEps = 1e-9;

template <typename T>
std::span<const T> members(std::span<const T> sorted, const Window& w) {
  const auto by_time = [](const T& item, double t) { return item.t_s < t; };
  const auto first = std::lower_bound(sorted.begin(), sorted.end(), w.start_s, by_time);
  const auto last = std::lower_bound(first, sorted.end(), w.end_s, by_time);
  return {first, last};
}

}  // namespace

void WindowSpec::validate() const {
  if (!(width_s > 0.0) || !(stride_s > 0.0) || !std::isfinite(width_s) || !std::isfinite(stride_s))
    throw Error(ErrorKind::InvalidSpec, "window width and stride must be positive");
  if (stride_s > width_s) throw Error(ErrorKind::InvalidSpec, "window stride must not exceed width");
  if (min_latency_samples < 1 || min_sched_samples < 1)
    throw Error(ErrorKind::InvalidSpec, "minimum window occupancy must be positive");
}

std::size_t window_count(double run_duration_s, const WindowSpec& spec) {
  spec.validate();
  if (!(run_duration_s + kGridEps >= spec.width_s))
    throw Error(ErrorKind::RunTooShort, "run of " + std::to_string(run_duration_s) +
                                            " s is shorter than one window");
  const double slack = std::max(0.0, run_duration_s - spec.width_s);
  return static_cast<std::size_t>(std::floor(slack / spec.stride_s + kGridEps)) + 1;
}

std::vector<Window> make_windows(double run_duration_s, const WindowSpec& spec) {
  const auto count = window_count(run_duration_s, spec);
  std::vector<Window> grid;
  grid.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double start = static_cast<double>(i) * spec.stride_s;
    grid.push_back({start, start + spec.width_s});
  }
  return grid;
}

std::optional<LatencyWindow> aggregate_latency_window(std::span<const LatencySample> samples,
                                                      const Window& window, const WindowSpec& spec) {
  const auto in = members(samples, window);
  if (in.size() < spec.min_latency_samples) return std::nullopt;

  std::vector<double> rtt;
  rtt.reserve(in.size());
  for (const auto& s : in) rtt.push_back(s.rtt_ms);
  std::sort(rtt.begin(), rtt.end());

  LatencyWindow w;
  w.start_s = window.start_s;
  w.end_s = window.end_s;
  w.n = rtt.size();
  w.p95_ms = percentile_sorted(rtt, 0.95);
  w.median_ms = percentile_sorted(rtt, 0.5);
  w.exceed_100ms = exceedance_prob(rtt, 100.0);
  return w;
}

std::optional<SchedWindow> aggregate_sched_window(std::span<const SchedulerSnapshot> snapshots,
                                                  const Window& window, const WindowSpec& spec) {
  const auto in = members(snapshots, window);
  if (in.size() < spec.min_sched_samples || in.empty()) return std::nullopt;

  std::vector<double> bler;
  std::vector<int> mcs;
  std::vector<double> snr;
  for (const auto& s : in) {
    bler.push_back(s.dl_bler);
    if (s.dl_mcs) mcs.push_back(*s.dl_mcs);
    if (s.snr_db) snr.push_back(*s.snr_db);
  }

  SchedWindow w;
  w.start_s = window.start_s;
  w.end_s = window.end_s;
  w.n = bler.size();
  w.bler_mean = std::clamp(mean(bler), 0.0, 1.0);
  w.bler_p95 = percentile(bler, 0.95);
  if (!mcs.empty()) {
    // Lower median keeps the result an MCS index that was actually used.
    std::sort(mcs.begin(), mcs.end());
    w.mcs_median = mcs[(mcs.size() - 1) / 2];
  }
  if (!snr.empty()) w.snr_median_db = percentile(snr, 0.5);
  return w;
}

std::vector<LatencyWindow> latency_windows(std::span<const LatencySample> samples,
                                           std::span<const Window> grid, const WindowSpec& spec) {
  std::vector<LatencyWindow> out;
  for (const auto& w : grid) {
    if (auto agg = aggregate_latency_window(samples, w, spec)) out.push_back(*agg);
  }
  return out;
}

std::vector<SchedWindow> sched_windows(std::span<const SchedulerSnapshot> snapshots,
                                       std::span<const Window> grid, const WindowSpec& spec) {
  std::vector<SchedWindow> out;
  for (const auto& w : grid) {
    if (auto agg = aggregate_sched_window(snapshots, w, spec)) out.push_back(*agg);
  }
  return out;
}

std::vector<JoinedWindow> join_windows(std::span<const LatencyWindow> latency,
                                       std::span<const SchedWindow> sched) {
  std::vector<JoinedWindow> out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < latency.size() && j < sched.size()) {
    if (latency[i].start_s < sched[j].start_s) {
      ++i;
    } else if (sched[j].start_s < latency[i].start_s) {
      ++j;
    } else {
      out.push_back({latency[i].start_s, latency[i], sched[j]});
      ++i;
      ++j;
    }
  }
  return out;
}

std::vector<JoinedWindow> windowed_join(const Run& run, const WindowSpec& spec) {
  const auto grid = make_windows(run.meta.nominal_duration_s, spec);
  const auto lat = latency_windows(run.latency, grid, spec);
  const auto sched = sched_windows(run.scheduler, grid, spec);
  return join_windows(lat, sched);
}

PhaseSplit split_phases(const Run& run, double split_s, const PhaseLabels& labels) {
  const double duration = run.meta.nominal_duration_s;
  if (!(split_s > 0.0 && split_s < duration))
    throw Error(ErrorKind::SplitOutOfRange, "split at " + std::to_string(split_s) +
                                                " s is outside (0, " + std::to_string(duration) + ")");

  PhaseSplit out;
  out.first.meta = run.meta;
  out.first.meta.phase = labels.first;
  out.first.meta.nominal_duration_s = split_s;
  out.second.meta = run.meta;
  out.second.meta.phase = labels.second;
  out.second.meta.nominal_duration_s = duration - split_s;

  // The second phase is rebased so both halves start at t = 0.
  for (const auto& s : run.latency) {
    if (s.t_s < split_s) {
      out.first.latency.push_back(s);
    } else {
      out.second.latency.push_back(s);
      out.second.latency.back().t_s -= split_s;
    }
  }
  for (const auto& s : run.scheduler) {
    if (s.t_s < split_s) {
      out.first.scheduler.push_back(s);
    } else {
      out.second.scheduler.push_back(s);
      out.second.scheduler.back().t_s -= split_s;
    }
  }
  out.degenerate = out.first.latency.empty() || out.second.latency.empty();
  return out;
}

}  // namespace rantail

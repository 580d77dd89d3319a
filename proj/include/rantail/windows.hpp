#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rantail/types.hpp"

namespace rantail {

struct WindowSpec {
  double width_s = 10.0;
  double stride_s = 5.0;
  std::size_t min_latency_samples = 5;
  std::size_t min_sched_samples = 1;

  void validate() const;
};

// Half-open [start_s, end_s).
struct Window {
  double start_s = 0.0;
  double end_s = 0.0;
};

struct LatencyWindow {
  double start_s = 0.0;
  double end_s = 0.0;
  std::size_t n = 0;
  double p95_ms = 0.0;
  double median_ms = 0.0;
  double exceed_100ms = 0.0;
};

struct SchedWindow {
  double start_s = 0.0;
  double end_s = 0.0;
  std::size_t n = 0;
  double bler_mean = 0.0;
  double bler_p95 = 0.0;
  std::optional<int> mcs_median;
  std::optional<double> snr_median_db;
};

struct JoinedWindow {
  double start_s = 0.0;
  LatencyWindow latency;
  SchedWindow sched;
};

std::size_t window_count(double run_duration_s, const WindowSpec& spec);

// Windows start at 0 and step by stride; only windows fully inside
// [0, run_duration_s] are produced. Throws RunTooShort.
std::vector<Window> make_windows(double run_duration_s, const WindowSpec& spec);

// `samples` must be sorted by t_s. Empty when fewer than
// spec.min_latency_samples fall inside the window.
std::optional<LatencyWindow> aggregate_latency_window(std::span<const LatencySample> samples,
                                                      const Window& window,
                                                      const WindowSpec& spec);

std::optional<SchedWindow> aggregate_sched_window(std::span<const SchedulerSnapshot> snapshots,
                                                  const Window& window,
                                                  const WindowSpec& spec);

// Sufficient windows only, in start order.
std::vector<LatencyWindow> latency_windows(std::span<const LatencySample> samples,
                                           std::span<const Window> grid, const WindowSpec& spec);
std::vector<SchedWindow> sched_windows(std::span<const SchedulerSnapshot> snapshots,
                                       std::span<const Window> grid, const WindowSpec& spec);

// Inner join on start_s.
std::vector<JoinedWindow> join_windows(std::span<const LatencyWindow> latency,
                                       std::span<const SchedWindow> sched);

// Grid over meta.nominal_duration_s, aggregate both layers, join.
std::vector<JoinedWindow> windowed_join(const Run& run, const WindowSpec& spec);

struct PhaseLabels {
  std::string first = "LOS";
  std::string second = "People";
};

struct PhaseSplit {
  Run first;
  Run second;
  // Either half has no latency samples.
  bool degenerate = false;
};

// Partitions both layers at t_s < split_s / t_s >= split_s. Requires
// 0 < split_s < meta.nominal_duration_s, else SplitOutOfRange.
PhaseSplit split_phases(const Run& run, double split_s, const PhaseLabels& labels = {});

}  // namespace rantail

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rantail/types.hpp"
#include "rantail/windows.hpp"

namespace rantail {

enum class Combine { And, Or };

struct FlagPolicy {
  double lat_p95_threshold_ms = 100.0;
  double bler_mean_threshold = 0.10;
  Combine combine = Combine::And;

  void validate() const;
};

struct DegradationFlag {
  double start_s = 0.0;
  bool raised = false;
  bool lat_evidence = false;
  bool sched_evidence = false;
  double lat_p95_ms = 0.0;
  double bler_mean = 0.0;
};

struct PhaseComparison {
  std::string phase_label;
  double lat_p95_ms = 0.0;
  double exceed_100ms = 0.0;
  std::optional<double> bler_p95;
};

struct CouplingReport {
  std::optional<double> rho_bler;
  std::optional<double> rho_mcs;
  std::size_t n_windows = 0;
};

DegradationFlag evaluate_flag(const JoinedWindow& window, const FlagPolicy& policy);

std::vector<DegradationFlag> evaluate_flags(std::span<const JoinedWindow> windows,
                                            const FlagPolicy& policy);

std::size_t raised_count(std::span<const DegradationFlag> flags);

// Throws EmptySequence.
double flag_rate(std::span<const DegradationFlag> flags);

struct PhaseOptions {
  PhaseLabels labels;
  double exceed_threshold_ms = 100.0;
};

// Latency p95 and exceedance per phase, plus dl_bler p95 over the raw
// dominant-RNTI snapshots of each phase. Throws EmptyPhase when a phase has
// no latency samples.
std::pair<PhaseComparison, PhaseComparison> compare_phases(const Run& run, double split_s,
                                                           const PhaseOptions& options = {});

// Spearman rho of per-window latency p95 against bler_mean and against
// mcs_median. The MCS correlation uses the windows that carry an MCS median.
CouplingReport coupling_report(std::span<const JoinedWindow> joined);

}  // namespace rantail

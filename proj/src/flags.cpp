#include "rantail/flags.hpp"

#include <algorithm>

#include "rantail/error.hpp"
#include "rantail/stats.hpp"

namespace rantail {

void FlagPolicy::validate() const {
  if (!(lat_p95_threshold_ms > 0.0)) throw Error(ErrorKind::InvalidSpec, "latency threshold must be positive");
  if (!(bler_mean_threshold > 0.0 && bler_mean_threshold < 1.0))
    throw Error(ErrorKind::InvalidSpec, "BLER threshold must lie in (0,1)");
}

DegradationFlag evaluate_flag(const JoinedWindow& window, const FlagPolicy& policy) {
  DegradationFlag f;
  f.start_s = window.start_s;
  f.lat_p95_ms = window.latency.p95_ms;
  f.bler_mean = window.sched.bler_mean;
  f.lat_evidence = f.lat_p95_ms > policy.lat_p95_threshold_ms;
  f.sched_evidence = f.bler_mean > policy.bler_mean_threshold;
  f.raised = policy.combine == Combine::And ? (f.lat_evidence && f.sched_evidence)
                                            : (f.lat_evidence || f.sched_evidence);
  return f;
}

std::vector<DegradationFlag> evaluate_flags(std::span<const JoinedWindow> windows, const FlagPolicy& policy) {
  policy.validate();
  std::vector<DegradationFlag> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(evaluate_flag(w, policy));
  return out;
}

std::size_t raised_count(std::span<const DegradationFlag> flags) {
  return static_cast<std::size_t>(
      std::count_if(flags.begin(), flags.end(), [](const DegradationFlag& f) { return f.raised; }));
}

double flag_rate(std::span<const DegradationFlag> flags) {
  if (flags.empty()) throw Error(ErrorKind::EmptySequence, "flag rate of no windows");
  return static_cast<double>(raised_count(flags)) / static_cast<double>(flags.size());
}

namespace {

PhaseComparison compare_one(const Run& phase, const PhaseOptions& options) {
  if (phase.latency.empty())
    throw Error(ErrorKind::EmptyPhase, "phase '" + phase.meta.phase + "' has no latency samples");
  std::vector<double> rtt;
  rtt.reserve(phase.latency.size());
  for (const auto& s : phase.latency) rtt.push_back(s.rtt_ms);

  PhaseComparison row;
  row.phase_label = phase.meta.phase;
  row.lat_p95_ms = percentile(rtt, 0.95);
  row.exceed_100ms = exceedance_prob(rtt, options.exceed_threshold_ms);
  if (!phase.scheduler.empty()) {
    std::vector<double> bler;
    bler.reserve(phase.scheduler.size());
    for (const auto& s : phase.scheduler) bler.push_back(s.dl_bler);
    row.bler_p95 = percentile(bler, 0.95);
  }
  return row;
}

}  // namespace

std::pair<PhaseComparison, PhaseComparison> compare_phases(const Run& run, double split_s,
                                                           const PhaseOptions& options) {
  const auto halves = split_phases(run, split_s, options.labels);
  return {compare_one(halves.first, options), compare_one(halves.second, options)};
}

CouplingReport coupling_report(std::span<const JoinedWindow> joined) {
  if (joined.empty()) throw Error(ErrorKind::EmptySequence, "coupling report over no windows");
  CouplingReport r;
  r.n_windows = joined.size();
  if (joined.size() < 2) return r;

  std::vector<double> p95;
  std::vector<double> bler;
  std::vector<double> p95_with_mcs;
  std::vector<double> mcs;
  for (const auto& w : joined) {
    p95.push_back(w.latency.p95_ms);
    bler.push_back(w.sched.bler_mean);
    if (w.sched.mcs_median) {
      p95_with_mcs.push_back(w.latency.p95_ms);
      mcs.push_back(*w.sched.mcs_median);
    }
  }
  r.rho_bler = spearman_rho(p95, bler);
  if (mcs.size() >= 2) r.rho_mcs = spearman_rho(p95_with_mcs, mcs);
  return r;
}

}  // namespace rantail

#include "rantail/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "rantail/error.hpp"
#include "rantail/format.hpp"

namespace rantail::cli {
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kMalformedShown = 5;

std::vector<double> rtts(const Run& run) {
  std::vector<double> v;
  v.reserve(run.latency.size());
  for (const auto& s : run.latency) v.push_back(s.rtt_ms);
  return v;
}

std::string threshold_column(double ms) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "p_gt_%gms", ms);
  return buf;
}

template <typename T>
std::string opt_text(const std::optional<T>& v, std::string (*fmt)(double)) {
  return v ? fmt(static_cast<double>(*v)) : std::string("N/A");
}

std::string opt_exact(const std::optional<double>& v) { return v ? format_exact(*v) : std::string(); }

std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

void require_latency(const Run& run) {
  if (run.latency.empty()) throw Error(ErrorKind::EmptyTrace, "run '" + run.meta.run_id + "' has no latency samples");
}

}  // namespace

std::optional<SchedSummary> sched_summary(std::span<const SchedulerSnapshot> snapshots) {
  if (snapshots.empty()) return std::nullopt;
  std::vector<double> bler;
  std::vector<int> mcs;
  std::vector<double> snr;
  for (const auto& s : snapshots) {
    bler.push_back(s.dl_bler);
    if (s.dl_mcs) mcs.push_back(*s.dl_mcs);
    if (s.snr_db) snr.push_back(*s.snr_db);
  }
  SchedSummary out;
  out.n = snapshots.size();
  out.bler_median = percentile(bler, 0.5);
  out.bler_p95 = percentile(bler, 0.95);
  if (!mcs.empty()) {
    std::sort(mcs.begin(), mcs.end());
    out.mcs_median = mcs[(mcs.size() - 1) / 2];
  }
  if (!snr.empty()) out.snr_median_db = percentile(snr, 0.5);
  return out;
}

Run load_run(const RunManifest& manifest, const CampaignConfig& config, std::ostream& diag) {
  const auto& meta = manifest.meta;
  std::vector<LatencySample> latency;
  if (!manifest.latency_path.empty()) {
    std::ifstream in(manifest.latency_path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + manifest.latency_path.string());
    latency = read_latency_csv(in);
  } else {
    std::ifstream in(manifest.ping_log_path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + manifest.ping_log_path.string());
    auto parsed = parse_ping_log(in, meta);
    if (!parsed.malformed.empty()) {
      diag << "warning: " << meta.run_id << ": " << parsed.malformed.size() << " malformed ping line(s)\n";
      for (std::size_t i = 0; i < std::min(kMalformedShown, parsed.malformed.size()); ++i)
        diag << "  line " << parsed.malformed[i].line_no << ": " << parsed.malformed[i].text << '\n';
    }
    latency = std::move(parsed.samples);
  }
  if (latency.empty()) throw Error(ErrorKind::EmptyTrace, "run '" + meta.run_id + "' has no latency samples");

  std::vector<SchedulerSnapshot> scheduler;
  if (!manifest.scheduler_path.empty()) {
    std::ifstream in(manifest.scheduler_path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + manifest.scheduler_path.string());
    scheduler = read_scheduler_csv(in);
  } else if (!manifest.fullstats_path.empty()) {
    std::ifstream in(manifest.fullstats_path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + manifest.fullstats_path.string());
    auto parsed = parse_fullstats(in, config.column_map, meta, config.fullstats);
    if (parsed.skipped_rows > 0)
      diag << "warning: " << meta.run_id << ": skipped " << parsed.skipped_rows << " of " << parsed.data_rows
           << " fullstats row(s)\n";
    scheduler = std::move(parsed.snapshots);
  }
  return consolidate_run(std::move(latency), std::move(scheduler), meta);
}

IngestReport cmd_ingest(const CampaignConfig& config, const std::optional<std::string>& run_id,
                        std::ostream& out, std::ostream& diag) {
  std::vector<const RunManifest*> selected;
  if (run_id) selected.push_back(&config.find_run(*run_id));
  else for (const auto& r : config.runs) selected.push_back(&r);

  // Parse everything before the first write.
  std::vector<Run> runs;
  for (const auto* m : selected) runs.push_back(load_run(*m, config, diag));

  IngestReport report;
  for (const auto& run : runs) {
    const auto& id = run.meta.run_id;
    RunManifest canonical;
    canonical.meta = run.meta;
    canonical.latency_path = config.output_dir / (id + ".latency.csv");
    std::ostringstream lat;
    write_latency_csv(lat, run.latency);
    write_file_atomic(canonical.latency_path, lat.str());
    if (!run.scheduler.empty()) {
      canonical.scheduler_path = config.output_dir / (id + ".sched.csv");
      std::ostringstream sch;
      write_scheduler_csv(sch, run.scheduler);
      write_file_atomic(canonical.scheduler_path, sch.str());
    }
    const auto manifest_path = config.output_dir / (id + ".manifest");
    std::ostringstream man;
    write_manifest(man, canonical, config.output_dir);
    write_file_atomic(manifest_path, man.str());
    report.manifests.push_back(manifest_path);

    const auto s = summarize_run(run);
    out << id << ": " << s.latency_samples << " latency samples over [" << fmt_ms(s.latency_first_s) << ", "
        << fmt_ms(s.latency_last_s) << "] s";
    if (s.dominant_rnti)
      out << ", " << s.sched_snapshots << " scheduler snapshots (rnti " << *s.dominant_rnti << ")";
    else
      out << ", no scheduler data";
    out << " -> " << manifest_path.string() << '\n';
  }
  return report;
}

RunReport cmd_summarize(const CampaignConfig& config, const std::string& run_id, std::ostream& out,
                        std::ostream& diag) {
  const auto run = load_run(config.find_run(run_id), config, diag);
  require_latency(run);
  auto values = rtts(run);

  RunReport report;
  report.summary = summary_stats(values, config.thresholds.outlier_ms);
  report.sched = sched_summary(run.scheduler);

  std::string header = "run_id,ue_type,distance_m,packet_size_b,scenario,n,median_ms,p95_ms,mean_ms";
  std::string row = run.meta.run_id + ',' + run.meta.ue.name() + ',' + format_exact(run.meta.distance_m) + ',' +
                    std::to_string(run.meta.packet_size_b) + ',' + run.meta.scenario.name() + ',' +
                    std::to_string(report.summary.n) + ',' + fmt_ms(report.summary.median_ms) + ',' +
                    fmt_ms(report.summary.p95_ms) + ',' + fmt_ms(report.summary.mean_ms);
  for (double t : config.thresholds.exceed_ms) {
    header += ',' + threshold_column(t);
    row += ',' + fmt_rate(exceedance_prob(values, t));
  }
  header += ",outlier_rate,sched_n,bler_median,bler_p95,mcs_median,snr_median_db";
  row += ',' + fmt_rate(report.summary.outlier_rate);
  if (report.sched) {
    const auto& s = *report.sched;
    row += ',' + std::to_string(s.n) + ',' + fmt_rate(s.bler_median) + ',' + fmt_rate(s.bler_p95) + ',' +
           (s.mcs_median ? std::to_string(*s.mcs_median) : "N/A") + ',' + opt_text(s.snr_median_db, fmt_ms);
  } else {
    row += ",0,N/A,N/A,N/A,N/A";
  }

  std::sort(values.begin(), values.end());
  std::string cdf = "rtt_ms,ecdf\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    cdf += format_exact(values[i]) + ',' +
           format_exact(static_cast<double>(i + 1) / static_cast<double>(values.size())) + '\n';
  }

  report.summary_path = config.output_dir / (run_id + "_summary.csv");
  report.cdf_path = config.output_dir / (run_id + "_cdf.csv");
  write_file_atomic(report.summary_path, header + '\n' + row + '\n');
  write_file_atomic(report.cdf_path, cdf);

  out << run_id << ": n=" << report.summary.n << " median=" << fmt_ms(report.summary.median_ms)
      << " ms p95=" << fmt_ms(report.summary.p95_ms) << " ms P(>100ms)=" << fmt_rate(report.summary.exceed_100ms)
      << " P(>1s)=" << fmt_rate(report.summary.exceed_1s);
  if (report.sched)
    out << " | sched n=" << report.sched->n << " BLER med=" << fmt_rate(report.sched->bler_median)
        << " p95=" << fmt_rate(report.sched->bler_p95);
  else
    out << " | no scheduler data";
  out << '\n';
  return report;
}

CompareReport cmd_compare(const CampaignConfig& config, const std::string& run_a, const std::string& run_b,
                          std::ostream& out, std::ostream& diag) {
  const auto a = load_run(config.find_run(run_a), config, diag);
  const auto b = load_run(config.find_run(run_b), config, diag);
  require_latency(a);
  require_latency(b);
  const auto va = rtts(a);
  const auto vb = rtts(b);

  CompareReport report;
  report.ks = ks_two_sample(va, vb);
  report.p95_a_ms = percentile(va, 0.95);
  report.p95_b_ms = percentile(vb, 0.95);
  report.packet_size_mismatch = a.meta.packet_size_b != b.meta.packet_size_b;
  std::string packet = std::to_string(a.meta.packet_size_b) + " B";
  if (report.packet_size_mismatch) {
    diag << "warning: comparing different packet sizes (" << a.meta.packet_size_b << " B vs "
         << b.meta.packet_size_b << " B)\n";
    packet += "/" + std::to_string(b.meta.packet_size_b) + " B";
  }

  const std::string text = "packet,n1,n2,ks_stat,p_value,p95_1_ms,p95_2_ms\n" + packet + ',' +
                           std::to_string(report.ks.n1) + ',' + std::to_string(report.ks.n2) + ',' +
                           fmt_rate(report.ks.d_stat) + ',' + fmt_pvalue(report.ks.p_value) + ',' +
                           fmt_ms(report.p95_a_ms) + ',' + fmt_ms(report.p95_b_ms) + '\n';
  report.path = config.output_dir / ("compare_" + run_a + "_vs_" + run_b + ".csv");
  write_file_atomic(report.path, text);

  out << run_a << " vs " << run_b << ": D=" << fmt_rate(report.ks.d_stat) << " p=" << fmt_pvalue(report.ks.p_value)
      << " (n1=" << report.ks.n1 << ", n2=" << report.ks.n2 << ")\n";
  return report;
}

WindowsReport cmd_windows(const CampaignConfig& config, const std::string& run_id, std::ostream& out,
                          std::ostream& diag) {
  const auto run = load_run(config.find_run(run_id), config, diag);
  WindowsReport report;
  report.joined = windowed_join(run, config.window);

  const auto span = summarize_run(run);
  diag << run_id << ": latency coverage [" << fmt_ms(span.latency_first_s) << ", " << fmt_ms(span.latency_last_s)
       << "] s";
  if (span.sched_snapshots > 0)
    diag << ", scheduler coverage [" << fmt_ms(span.sched_first_s) << ", " << fmt_ms(span.sched_last_s) << "] s\n";
  else
    diag << ", no scheduler data\n";

  std::string table = "start_s,lat_n,lat_p95_ms,lat_median_ms,lat_exceed_100ms,sched_n,bler_mean,bler_p95,mcs_median,snr_median_db\n";
  for (const auto& w : report.joined) {
    table += format_exact(w.start_s) + ',' + std::to_string(w.latency.n) + ',' + format_exact(w.latency.p95_ms) + ',' +
             format_exact(w.latency.median_ms) + ',' + format_exact(w.latency.exceed_100ms) + ',' +
             std::to_string(w.sched.n) + ',' + format_exact(w.sched.bler_mean) + ',' + format_exact(w.sched.bler_p95) +
             ',' + opt_int(w.sched.mcs_median) + ',' + opt_exact(w.sched.snr_median_db) + '\n';
  }
  if (!report.joined.empty()) report.coupling = coupling_report(report.joined);

  const std::string coupling = "metric,value\nspearman_rho_p95_bler_mean," + fmt_rho(report.coupling.rho_bler) +
                               "\nspearman_rho_p95_mcs_median," + fmt_rho(report.coupling.rho_mcs) +
                               "\nwindows_joined," + std::to_string(report.coupling.n_windows) + '\n';
  report.windows_path = config.output_dir / (run_id + "_windows.csv");
  report.coupling_path = config.output_dir / (run_id + "_coupling.csv");
  write_file_atomic(report.windows_path, table);
  write_file_atomic(report.coupling_path, coupling);

  if (report.joined.empty()) {
    out << run_id << ": 0 joined windows\n";
  } else {
    out << run_id << ": " << report.coupling.n_windows << " joined windows, rho(p95, BLER mean)="
        << fmt_rho(report.coupling.rho_bler) << ", rho(p95, MCS median)=" << fmt_rho(report.coupling.rho_mcs) << '\n';
  }
  return report;
}

FlagsReport cmd_flags(const CampaignConfig& config, const std::string& run_id, std::ostream& out,
                      std::ostream& diag) {
  const auto run = load_run(config.find_run(run_id), config, diag);
  const auto joined = windowed_join(run, config.window);

  FlagsReport report;
  report.flags = evaluate_flags(joined, config.policy);
  if (!report.flags.empty()) report.rate = flag_rate(report.flags);

  std::string timeline = "start_s,raised,lat_evidence,sched_evidence,lat_p95_ms,bler_mean\n";
  for (const auto& f : report.flags) {
    timeline += format_exact(f.start_s) + ',' + (f.raised ? '1' : '0') + ',' + (f.lat_evidence ? '1' : '0') + ',' +
                (f.sched_evidence ? '1' : '0') + ',' + format_exact(f.lat_p95_ms) + ',' +
                format_exact(f.bler_mean) + '\n';
  }
  const std::string rate_text = report.rate ? fmt_rate(*report.rate) : std::string("N/A");
  const std::string rate_row = "run_id,scenario,windows,flag_rate\n" + run_id + ',' + run.meta.scenario.name() + ',' +
                               std::to_string(report.flags.size()) + ',' + rate_text + '\n';

  report.timeline_path = config.output_dir / (run_id + "_flags.csv");
  report.rate_path = config.output_dir / (run_id + "_flag_rate.csv");
  write_file_atomic(report.timeline_path, timeline);
  write_file_atomic(report.rate_path, rate_row);

  out << run_id << ": " << raised_count(report.flags) << " of " << report.flags.size()
      << " windows flagged, flag rate " << rate_text << '\n';
  return report;
}

PhasesReport cmd_phases(const CampaignConfig& config, const std::string& run_id, std::optional<double> split_s,
                        std::ostream& out, std::ostream& diag) {
  const auto run = load_run(config.find_run(run_id), config, diag);
  const double split = split_s.value_or(run.meta.nominal_duration_s / 2.0);
  const auto [first, second] = compare_phases(run, split);

  PhasesReport report{first, second, config.output_dir / (run_id + "_phases.csv")};
  std::string text = "phase,lat_p95_ms,p_gt_100ms,bler_p95\n";
  for (const auto* row : {&report.first, &report.second}) {
    text += row->phase_label + ',' + fmt_ms(row->lat_p95_ms) + ',' + fmt_rate(row->exceed_100ms) + ',' +
            opt_text(row->bler_p95, fmt_rate) + '\n';
  }
  write_file_atomic(report.path, text);

  for (const auto* row : {&report.first, &report.second}) {
    out << row->phase_label << ": p95=" << fmt_ms(row->lat_p95_ms) << " ms P(>100ms)=" << fmt_rate(row->exceed_100ms)
        << " BLER p95=" << opt_text(row->bler_p95, fmt_rate) << '\n';
  }
  return report;
}

synth::Campaign cmd_synth(const CampaignConfig& config, const std::string& preset_name, std::uint64_t seed,
                          std::ostream& out, std::ostream& /*diag*/) {
  std::vector<synth::ScenarioSpec> specs;
  if (auto it = config.presets.find(preset_name); it != config.presets.end()) {
    specs = it->second;
    for (auto& s : specs) s.seed += seed;
  } else if (auto builtin = synth::preset(preset_name, seed)) {
    specs = std::move(*builtin);
  } else {
    std::string valid;
    for (const auto& name : synth::preset_names()) valid += (valid.empty() ? "" : ", ") + name;
    for (const auto& [name, _] : config.presets) valid += ", " + name;
    throw Error(ErrorKind::InvalidConfig, "unknown preset '" + preset_name + "' (valid: " + valid + ")");
  }

  auto campaign = synth::gen_campaign(specs, config.output_dir);
  std::string runs;
  for (const auto& r : campaign.runs) {
    runs += std::string(runs.empty() ? "" : ", ") + '"' + r.manifest_path.filename().string() + '"';
    out << r.manifest_path.string() << '\n';
  }
  write_file_atomic(config.output_dir / "campaign.json",
                    "{\n  \"runs\": [" + runs + "],\n  \"output_dir\": \"reports\"\n}\n");
  return campaign;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& diag) {
  CLI::App app{"Tail-aware latency and scheduler diagnostics for RAN measurement logs", "rantail"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 1;
  std::optional<double> width_s;
  std::optional<double> stride_s;
  std::optional<double> lat_threshold_ms;
  std::optional<double> bler_threshold;
  app.add_option("--config", config_path, "campaign config (JSON)");
  app.add_option("--output-dir", output_dir, "override the config's output directory");
  app.add_option("--seed", seed, "base seed for synth");
  app.add_option("--window-width-s", width_s, "window width in seconds");
  app.add_option("--stride-s", stride_s, "window stride in seconds");
  app.add_option("--lat-threshold-ms", lat_threshold_ms, "flag latency p95 threshold");
  app.add_option("--bler-threshold", bler_threshold, "flag BLER mean threshold");

  std::string run_a;
  std::string run_b;
  std::string preset_name;
  std::optional<double> split_s;
  auto* ingest = app.add_subcommand("ingest", "parse raw logs into canonical files");
  ingest->add_option("run_id", run_a, "single run to ingest (default: all)");
  auto* summarize = app.add_subcommand("summarize", "latency and scheduler summary of one run");
  summarize->add_option("run_id", run_a)->required();
  auto* compare = app.add_subcommand("compare", "two-sample KS comparison of two runs");
  compare->add_option("run_a", run_a)->required();
  compare->add_option("run_b", run_b)->required();
  auto* windows = app.add_subcommand("windows", "windowed cross-layer join and coupling");
  windows->add_option("run_id", run_a)->required();
  auto* flags = app.add_subcommand("flags", "per-window degradation flags");
  flags->add_option("run_id", run_a)->required();
  auto* phases = app.add_subcommand("phases", "phase-wise comparison around a split time");
  phases->add_option("run_id", run_a)->required();
  phases->add_option("--split-s", split_s, "split time (default: half the nominal duration)");
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic campaign");
  synth_cmd->add_option("preset", preset_name)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, diag);
  }

  try {
    CampaignConfig config;
    if (!config_path.empty()) {
      config = load_config(config_path);
    } else if (!synth_cmd->parsed()) {
      diag << "error: --config is required for this command\n";
      return 2;
    }
    if (!output_dir.empty()) config.output_dir = output_dir;
    if (width_s) config.window.width_s = *width_s;
    if (stride_s) config.window.stride_s = *stride_s;
    if (lat_threshold_ms) config.policy.lat_p95_threshold_ms = *lat_threshold_ms;
    if (bler_threshold) config.policy.bler_mean_threshold = *bler_threshold;
    config.validate();

    if (ingest->parsed()) cmd_ingest(config, run_a.empty() ? std::nullopt : std::optional(run_a), out, diag);
    else if (summarize->parsed()) cmd_summarize(config, run_a, out, diag);
    else if (compare->parsed()) cmd_compare(config, run_a, run_b, out, diag);
    else if (windows->parsed()) cmd_windows(config, run_a, out, diag);
    else if (flags->parsed()) cmd_flags(config, run_a, out, diag);
    else if (phases->parsed()) cmd_phases(config, run_a, split_s, out, diag);
    else if (synth_cmd->parsed()) cmd_synth(config, preset_name, seed, out, diag);
  } catch (const Error& e) {
    diag << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace rantail::cli

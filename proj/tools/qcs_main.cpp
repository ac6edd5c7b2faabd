// Command-line front end: loads a declarative scenario file, runs the
// requested experiment, and writes CSV tables (plus JSON mirrors on demand).
//
// Exit codes: 0 success, 2 configuration error, 3 runtime failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcs/geometry.hpp"
#include "qcs/link_budget.hpp"
#include "qcs/scenario.hpp"
#include "qcs/sync_experiment.hpp"
#include "qcs/traces.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qcs;

namespace {

// Failures of the experiment itself (as opposed to bad configuration).
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw RunError("cannot write '" + path.string() + "'");
}

void write_json_file(const fs::path& csv_path, const json& j) {
  fs::path p = csv_path;
  p.replace_extension(".json");
  write_text_file(p, j.dump(2) + "\n");
}

double round6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return std::atof(buf);
}

std::vector<std::vector<LinkTrace>> station_link_traces(const Scenario& sc) {
  if (sc.stations.empty())
    throw ScenarioError("scenario needs a 'stations' block for this command");
  if (sc.constellation.total_satellites() == 0)
    std::cerr << "warning: empty constellation, all traces are zero\n";
  std::vector<std::vector<LinkTrace>> per_station;
  per_station.reserve(sc.stations.size());
  for (const auto& gs : sc.stations)
    per_station.push_back(
        compute_link_traces(sc.constellation, gs, sc.channel, sc.grid));
  return per_station;
}

int cmd_trace(const Scenario& sc, const fs::path& out, bool json_mirror) {
  const auto per_station = station_link_traces(sc);

  json summary = json::array();
  std::ostringstream summary_csv;
  summary_csv << "gs_name,connected_pct,minutes_per_day\n";
  for (std::size_t i = 0; i < sc.stations.size(); ++i) {
    const auto& name = sc.stations[i].name;
    for (auto dir : {LinkDirection::Up, LinkDirection::Down}) {
      std::ostringstream csv;
      write_connection_trace_csv(csv, per_station[i], dir, sc.grid);
      const char* suffix = dir == LinkDirection::Up ? "up" : "down";
      write_text_file(out / ("trace_" + name + "_" + suffix + ".csv"),
                      csv.str());
    }
    const double frac =
        connection_support_fraction(per_station[i], sc.sync.min_rate_ebits);
    const double min_per_day = frac * 1440.0;
    char row[160];
    std::snprintf(row, sizeof(row), "%s,%.4f,%.2f\n", name.c_str(),
                  100.0 * frac, min_per_day);
    summary_csv << row;
    summary.push_back({{"gs_name", name},
                       {"connected_pct", round6(100.0 * frac)},
                       {"minutes_per_day", round6(min_per_day)}});
    std::printf("station %-8s above %.0f ebits/s for %.2f min/day (%.4f%%)\n",
                name.c_str(), sc.sync.min_rate_ebits, min_per_day,
                100.0 * frac);
  }
  write_text_file(out / "trace_summary.csv", summary_csv.str());
  if (json_mirror) write_json_file(out / "trace_summary.csv", summary);
  return 0;
}

struct PairRun {
  std::string label;
  std::size_t a = 0, b = 0;
  PairSyncTrace trace;
  PairFom fom;
};

std::vector<PairRun> run_all_pairs(const Scenario& sc,
                                   const std::vector<std::vector<LinkTrace>>&
                                       per_station) {
  std::vector<PairRun> runs;
  for (std::size_t i = 0; i < sc.stations.size(); ++i) {
    for (std::size_t j = i + 1; j < sc.stations.size(); ++j) {
      PairRun r;
      r.a = i;
      r.b = j;
      r.label = sc.stations[i].name + "/" + sc.stations[j].name;
      r.trace = build_sync_trace(per_station[i], per_station[j], sc.sync, sc.grid);
      r.fom = compute_pair_fom(r.trace, per_station[i], per_station[j],
                               sc.channel, sc.grid, sc.loss_of_mean_rate);
      runs.push_back(std::move(r));
    }
  }
  if (runs.empty())
    throw ScenarioError("need at least two stations for pair commands");
  return runs;
}

int cmd_sync(const Scenario& sc, const fs::path& out, bool json_mirror) {
  const auto per_station = station_link_traces(sc);
  const auto runs = run_all_pairs(sc, per_station);

  json summary = json::array();
  std::ostringstream summary_csv;
  summary_csv << "pair,connected_pct,longest_gap_h\n";
  for (const auto& r : runs) {
    const std::string base = "sync_" + sc.stations[r.a].name + "_" +
                             sc.stations[r.b].name + "_";
    for (int k = 0; k < 2; ++k) {
      std::ostringstream csv;
      write_sync_trace_csv(csv, r.trace, k, sc.grid);
      const auto& who = sc.stations[k == 0 ? r.a : r.b].name;
      write_text_file(out / (base + who + ".csv"), csv.str());
    }
    char row[160];
    std::snprintf(row, sizeof(row), "%s,%.4f,%.3f\n", r.label.c_str(),
                  100.0 * r.fom.connected_fraction,
                  r.fom.longest_gap_s / 3600.0);
    summary_csv << row;
    summary.push_back({{"pair", r.label},
                       {"connected_pct", round6(100.0 * r.fom.connected_fraction)},
                       {"longest_gap_h", round6(r.fom.longest_gap_s / 3600.0)}});
    std::printf("pair %-12s connected %.2f%% of span, longest gap %.3f h\n",
                r.label.c_str(), 100.0 * r.fom.connected_fraction,
                r.fom.longest_gap_s / 3600.0);
  }
  write_text_file(out / "sync_summary.csv", summary_csv.str());
  if (json_mirror) write_json_file(out / "sync_summary.csv", summary);
  return 0;
}

int cmd_fom(const Scenario& sc, const fs::path& out, bool json_mirror) {
  const auto per_station = station_link_traces(sc);
  const auto runs = run_all_pairs(sc, per_station);

  std::vector<FomRow> rows;
  json mirror = json::array();
  for (const auto& r : runs) {
    rows.push_back({r.label, r.fom});
    mirror.push_back(
        {{"pair", r.label},
         {"up_loss_db", {r.fom.avg_uplink_loss_db[0], r.fom.avg_uplink_loss_db[1]}},
         {"down_loss_db",
          {r.fom.avg_downlink_loss_db[0], r.fom.avg_downlink_loss_db[1]}},
         {"connected_pct", round6(100.0 * r.fom.connected_fraction)},
         {"longest_gap_h", round6(r.fom.longest_gap_s / 3600.0)}});
    std::printf(
        "pair %-12s up %.1f/%.1f dB  down %.1f/%.1f dB  connected %.2f%%  "
        "gap %.3f h\n",
        r.label.c_str(), r.fom.avg_uplink_loss_db[0],
        r.fom.avg_uplink_loss_db[1], r.fom.avg_downlink_loss_db[0],
        r.fom.avg_downlink_loss_db[1], 100.0 * r.fom.connected_fraction,
        r.fom.longest_gap_s / 3600.0);
  }
  std::ostringstream csv;
  write_fom_csv(csv, rows);
  write_text_file(out / "fom.csv", csv.str());
  if (json_mirror) write_json_file(out / "fom.csv", mirror);
  return 0;
}

int cmd_static(const Scenario& sc, const fs::path& out, bool json_mirror) {
  if (!sc.static_suite)
    throw ScenarioError("scenario needs a 'static' block for this command");
  const StaticSuite& suite = *sc.static_suite;

  std::vector<SyncSummary> summaries;
  summaries.reserve(suite.rows.size());
  for (std::size_t i = 0; i < suite.rows.size(); ++i) {
    const SyncExperimentConfig cfg = sc.static_config(suite.rows[i]);
    const std::uint64_t stream_base = static_cast<std::uint64_t>(i) * 1000000;
    const SyncSummary s = run_sync_experiment(cfg, sc.seed, stream_base);
    std::printf(
        "row %zu/%zu: loss %.1f dB, T_a %.0f ms -> success %.1f%%, "
        "rate %.1f ebits/s, snr %.1f +- %.1f\n",
        i + 1, suite.rows.size(), s.loss_db, 1e3 * s.duration_s, s.success_pct,
        s.mean_ebit_rate, s.snr_mean, s.snr_sd);
    std::fflush(stdout);
    summaries.push_back(s);
  }

  std::ostringstream csv;
  write_sync_summary_csv(csv, summaries);
  write_text_file(out / "static.csv", csv.str());
  if (json_mirror) {
    json mirror = json::array();
    for (const auto& s : summaries)
      mirror.push_back({{"loss_db", s.loss_db},
                        {"duration_s", s.duration_s},
                        {"success_pct", s.success_pct},
                        {"mean_ebit_rate", round6(s.mean_ebit_rate)},
                        {"snr_mean", round6(s.snr_mean)},
                        {"snr_sd", round6(s.snr_sd)},
                        {"err_mean_ps", round6(s.err_mean_ps)},
                        {"err_sd_ps", round6(s.err_sd_ps)},
                        {"err_success_mean_ps", round6(s.err_success_mean_ps)},
                        {"err_success_sd_ps", round6(s.err_success_sd_ps)}});
    write_json_file(out / "static.csv", mirror);
  }
  return 0;
}

int cmd_sweep(const Scenario& sc, const fs::path& out, bool json_mirror) {
  if (!sc.sweep)
    throw ScenarioError("scenario needs a 'sweep' block for this command");
  const SweepSpec& sw = *sc.sweep;

  std::vector<SweepPoint> points;
  for (double alt_km : sw.altitudes_km) {
    for (double sep_km : sw.separations_km) {
      points.push_back(sweep_separation_point(
          alt_km * 1e3, sep_km, sc.channel, sw.min_rate_ebits, sw.holdover_s,
          sw.day_samples, sw.period_samples));
    }
    std::printf("altitude %.0f km done (%zu separations)\n", alt_km,
                sw.separations_km.size());
    std::fflush(stdout);
  }

  std::ostringstream csv;
  write_sweep_csv(csv, points);
  write_text_file(out / "sweep.csv", csv.str());
  if (json_mirror) {
    json mirror = json::array();
    for (const auto& p : points)
      mirror.push_back({{"altitude_km", p.altitude_m / 1e3},
                        {"separation_km", p.separation_km},
                        {"avg_rate_product", p.avg_rate_product},
                        {"connected_ratio", round6(p.connected_ratio)}});
    write_json_file(out / "sweep.csv", mirror);
  }
  return 0;
}

int cmd_shadow(const Scenario& sc, const fs::path& out, bool json_mirror) {
  if (!sc.shadow)
    throw ScenarioError("scenario needs a 'shadow' block for this command");
  const ShadowRequest& rq = *sc.shadow;

  const double altitude_m = rq.altitude_km * 1e3;
  const double diameter =
      shadow_diameter_deg(altitude_m, sc.channel, rq.min_rate_ebits);
  if (diameter == 0.0)
    throw RunError("empty shadow: the rate threshold exceeds the best "
                   "achievable rate");

  json mirror = json::array();
  std::ostringstream csv;
  csv << "altitude_km,min_rate_ebits,holdover_s,angular_length_deg\n";
  for (double tau : rq.holdovers_s) {
    const double len = elongated_shadow_deg(diameter, tau, altitude_m);
    char row[160];
    std::snprintf(row, sizeof(row), "%.1f,%.1f,%.1f,%.4f\n", rq.altitude_km,
                  rq.min_rate_ebits, tau, len);
    csv << row;
    mirror.push_back({{"altitude_km", rq.altitude_km},
                      {"min_rate_ebits", rq.min_rate_ebits},
                      {"holdover_s", tau},
                      {"angular_length_deg", round6(len)}});
    std::printf("holdover %6.1f s -> angular length %.4f deg\n", tau, len);
  }
  std::printf("instantaneous shadow diameter %.4f deg\n", diameter);
  write_text_file(out / "shadow.csv", csv.str());
  if (json_mirror) write_json_file(out / "shadow.csv", mirror);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"satellite entanglement-link clock-sync network simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  std::uint64_t seed_override = 0;
  bool json_mirror = false;

  const char* names[] = {"trace", "sync", "fom", "static", "sweep", "shadow"};
  const char* descs[] = {
      "per-station connection traces (uplink/downlink rates vs time)",
      "pairwise holdover-windowed sync traces",
      "pair figures of merit (losses, connected %, longest gap)",
      "timestamp-level Monte Carlo synchronization suite",
      "two-station separation sweep (rate product, connected ratio)",
      "satellite coverage shadow geometry"};
  std::vector<CLI::Option*> seed_opts;
  for (int i = 0; i < 6; ++i) {
    auto* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("--scenario", scenario_path, "scenario JSON file")
        ->required();
    sub->add_option("--out", out_dir, "output directory (created if missing)");
    seed_opts.push_back(
        sub->add_option("--seed", seed_override, "override the scenario seed"));
    sub->add_flag("--json", json_mirror, "also write JSON mirrors of tables");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    Scenario sc = load_scenario(scenario_path);
    const auto* sub = app.get_subcommands().front();
    if (!seed_opts.empty() && sub->count("--seed") > 0) sc.seed = seed_override;

    const fs::path out(out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec && !fs::is_directory(out))
      throw ScenarioError("cannot create output directory '" + out_dir + "'");

    if (cmd == "trace") return cmd_trace(sc, out, json_mirror);
    if (cmd == "sync") return cmd_sync(sc, out, json_mirror);
    if (cmd == "fom") return cmd_fom(sc, out, json_mirror);
    if (cmd == "static") return cmd_static(sc, out, json_mirror);
    if (cmd == "sweep") return cmd_sweep(sc, out, json_mirror);
    if (cmd == "shadow") return cmd_shadow(sc, out, json_mirror);
    std::cerr << "error: unhandled command '" << cmd << "'\n";
    return 2;
  } catch (const ScenarioError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

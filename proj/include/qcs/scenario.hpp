#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qcs/geometry.hpp"
#include "qcs/link_budget.hpp"
#include "qcs/sync_experiment.hpp"
#include "qcs/traces.hpp"

namespace qcs {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Strict object reader: every key must be consumed, unknown keys are reported
// with their full path so typos never pass silently.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& j, std::string path)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw ScenarioError(where() + " must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  double number(const char* key) {
    const auto& v = field(key);
    if (!v.is_number())
      throw ScenarioError("'" + joined(key) + "' must be a number");
    return v.get<double>();
  }

  double number_or(const char* key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  std::uint64_t count(const char* key) {
    const auto& v = field(key);
    if (!v.is_number_unsigned())
      throw ScenarioError("'" + joined(key) + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::uint64_t count_or(const char* key, std::uint64_t fallback) {
    return has(key) ? count(key) : fallback;
  }

  bool flag_or(const char* key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = field(key);
    if (!v.is_boolean())
      throw ScenarioError("'" + joined(key) + "' must be true or false");
    return v.get<bool>();
  }

  std::string text(const char* key) {
    const auto& v = field(key);
    if (!v.is_string())
      throw ScenarioError("'" + joined(key) + "' must be a string");
    return v.get<std::string>();
  }

  const nlohmann::json& array(const char* key) {
    const auto& v = field(key);
    if (!v.is_array())
      throw ScenarioError("'" + joined(key) + "' must be an array");
    return v;
  }

  std::vector<double> numbers(const char* key) {
    const auto& a = array(key);
    std::vector<double> out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_number())
        throw ScenarioError("'" + joined(key) + "[" + std::to_string(i) +
                            "]' must be a number");
      out.push_back(a[i].get<double>());
    }
    return out;
  }

  const nlohmann::json& child(const char* key) { return field(key); }

  std::string joined(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& el : j_.items())
      if (!seen_.count(el.key()))
        throw ScenarioError("unknown key '" + joined(el.key()) + "'");
  }

 private:
  std::string where() const { return path_.empty() ? "scenario root" : "'" + path_ + "'"; }

  const nlohmann::json& field(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end())
      throw ScenarioError("missing key '" + joined(key) + "'");
    return *it;
  }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Scenario schema
// ---------------------------------------------------------------------------

struct StaticRow {
  double loss_db = 34.0;
  double duration_s = 0.25;
};

struct StaticSuite {
  double pair_rate_hz = 1e7;
  double resolution_s = 50e-12;
  double jitter_sigma_s = 0.0;
  double dark_rate_hz = 1000.0;
  double detector_eff = 0.5;
  double clock_skew = 3e-10;
  double max_offset_s = 1e-6;
  double success_threshold_s = 1e-9;
  double lag_window_s = 0.0;  // 0 = search the full lag range
  double propagation_delay_s = 0.0;
  int instances = 100;
  bool accounting_only = false;
  bool dense_fft = false;
  std::vector<StaticRow> rows;
};

struct SweepSpec {
  std::vector<double> altitudes_km;
  std::vector<double> separations_km;
  double min_rate_ebits = 200.0;
  double holdover_s = 0.0;
  std::size_t day_samples = 86400;
  std::size_t period_samples = 86400;
};

struct ShadowRequest {
  double altitude_km = 500.0;
  double min_rate_ebits = 200.0;
  std::vector<double> holdovers_s = {0.0, 100.0, 450.0, 600.0};
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 1;

  std::vector<GroundStation> stations;
  Constellation constellation;
  ChannelParams channel;
  SyncParams sync;
  TraceGrid grid;
  bool loss_of_mean_rate = false;

  std::optional<StaticSuite> static_suite;
  std::optional<SweepSpec> sweep;
  std::optional<ShadowRequest> shadow;

  bool has_geometry() const { return !stations.empty(); }

  SyncExperimentConfig static_config(const StaticRow& row) const {
    SyncExperimentConfig cfg;
    const StaticSuite& s = *static_suite;
    cfg.pair_rate_hz = s.pair_rate_hz;
    cfg.total_loss_db = row.loss_db;
    cfg.duration_s = row.duration_s;
    cfg.resolution_s = s.resolution_s;
    cfg.detector_eff = s.detector_eff;
    cfg.detector.jitter_sigma_s = s.jitter_sigma_s;
    cfg.detector.dark_rate_hz = s.dark_rate_hz;
    cfg.clock_skew = s.clock_skew;
    cfg.max_offset_s = s.max_offset_s;
    cfg.success_threshold_s = s.success_threshold_s;
    cfg.lag_window_s = s.lag_window_s;
    cfg.propagation_delay_s = s.propagation_delay_s;
    cfg.instances = s.instances;
    cfg.accounting_only = s.accounting_only;
    cfg.dense_fft = s.dense_fft;
    cfg.validate();
    return cfg;
  }
};

inline Scenario parse_scenario(const std::string& text,
                               const std::string& origin) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::string msg = e.what();
    const auto cut = msg.find("] ");  // drop the library's exception tag
    if (cut != std::string::npos) msg = msg.substr(cut + 2);
    throw ScenarioError(origin + ": " + msg);
  }

  Scenario sc;
  // Domain validation throws invalid_argument; surface it as a config error.
  auto checked = [](auto&& fn) {
    try {
      fn();
    } catch (const ScenarioError&) {
      throw;
    } catch (const std::exception& e) {
      throw ScenarioError(e.what());
    }
  };
  detail::ObjectReader r(root, "");
  sc.name = r.text("name");
  sc.seed = r.count("seed");

  if (r.has("stations")) {
    const auto& arr = r.array("stations");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      detail::ObjectReader s(arr[i], "stations[" + std::to_string(i) + "]");
      GroundStation gs;
      gs.name = s.text("name");
      gs.latitude_deg = s.number("lat_deg");
      gs.longitude_deg = s.number("lon_deg");
      gs.altitude_m = s.number_or("alt_m", 0.0);
      s.finish();
      checked([&] { gs.validate(); });
      sc.stations.push_back(std::move(gs));
    }
  }

  if (r.has("orbits")) {
    const auto& arr = r.array("orbits");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      detail::ObjectReader o(arr[i], "orbits[" + std::to_string(i) + "]");
      CircularOrbit orbit;
      orbit.altitude_m = o.number("altitude_km") * 1e3;
      orbit.tilt_deg = o.number("tilt_deg");
      orbit.raan_deg = o.number_or("raan_deg", 0.0);
      orbit.phase_deg = o.number_or("phase_deg", 0.0);
      const std::uint64_t n_sats = o.count("satellites");
      if (n_sats > 100000)
        throw ScenarioError("'" + o.joined("satellites") + "' is implausibly large");
      orbit.n_satellites = static_cast<int>(n_sats);
      o.finish();
      checked([&] { orbit.validate(); });
      sc.constellation.orbits.push_back(orbit);
    }
  }

  if (r.has("channel")) {
    detail::ObjectReader c(r.child("channel"), "channel");
    ChannelParams& ch = sc.channel;
    ch.source_rate_pairs_per_s =
        c.number_or("source_rate_pairs_per_s", ch.source_rate_pairs_per_s);
    ch.wavelength_m = c.number_or("wavelength_nm", ch.wavelength_m * 1e9) * 1e-9;
    ch.sat_aperture_diameter_m =
        c.number_or("sat_aperture_m", ch.sat_aperture_diameter_m);
    ch.fill_factor = c.number_or("fill_factor", ch.fill_factor);
    ch.ground_aperture_diameter_m =
        c.number_or("ground_aperture_m", ch.ground_aperture_diameter_m);
    ch.detector_eff_sat = c.number_or("detector_eff_sat", ch.detector_eff_sat);
    ch.detector_eff_ground =
        c.number_or("detector_eff_ground", ch.detector_eff_ground);
    ch.zenith_transmittance =
        c.number_or("zenith_transmittance", ch.zenith_transmittance);
    ch.zenith_mask_deg = c.number_or("zenith_mask_deg", ch.zenith_mask_deg);
    ch.pointing_jitter_rad = c.number_or("pointing_jitter_urad", 0.0) * 1e-6;
    ch.uplink_waist_override_m = c.number_or("uplink_waist_m", 0.0);
    c.finish();
    checked([&] { ch.validate(); });
  }

  if (r.has("network")) {
    detail::ObjectReader n(r.child("network"), "network");
    sc.sync.min_rate_ebits = n.number_or("min_rate_ebits", 200.0);
    sc.sync.holdover_window_s = n.number_or("holdover_s", 100.0);
    sc.grid.span_s = n.number_or("span_s", 172800.0);
    sc.grid.step_s = n.number_or("step_s", 1.0);
    sc.loss_of_mean_rate = n.flag_or("loss_of_mean_rate", false);
    n.finish();
    if (sc.grid.step_s <= 0.0)
      throw ScenarioError("'network.step_s' must be > 0");
    if (sc.grid.span_s < sc.grid.step_s)
      throw ScenarioError("'network.span_s' must be >= step_s");
    if (sc.sync.min_rate_ebits < 0.0 || sc.sync.holdover_window_s < 0.0)
      throw ScenarioError("'network' thresholds must be >= 0");
  }

  if (r.has("static")) {
    detail::ObjectReader s(r.child("static"), "static");
    StaticSuite suite;
    suite.pair_rate_hz = s.number_or("pair_rate_hz", suite.pair_rate_hz);
    suite.resolution_s = s.number_or("resolution_ps", 50.0) * 1e-12;
    suite.jitter_sigma_s = s.number_or("jitter_sigma_ps", 0.0) * 1e-12;
    suite.dark_rate_hz = s.number_or("dark_rate_hz", suite.dark_rate_hz);
    suite.detector_eff = s.number_or("detector_eff", suite.detector_eff);
    suite.clock_skew = s.number_or("clock_skew", suite.clock_skew);
    suite.max_offset_s = s.number_or("max_offset_us", 1.0) * 1e-6;
    suite.success_threshold_s = s.number_or("success_threshold_ns", 1.0) * 1e-9;
    suite.lag_window_s = s.number_or("lag_window_us", 0.0) * 1e-6;
    suite.propagation_delay_s = s.number_or("propagation_delay_us", 0.0) * 1e-6;
    suite.instances = static_cast<int>(s.count_or("instances", 100));
    suite.accounting_only = s.flag_or("accounting_only", false);
    suite.dense_fft = s.flag_or("dense_fft", false);
    const auto& rows = s.array("rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      detail::ObjectReader row(rows[i], "static.rows[" + std::to_string(i) + "]");
      StaticRow sr;
      sr.loss_db = row.number("loss_db");
      sr.duration_s = row.number_or("duration_ms", 250.0) * 1e-3;
      row.finish();
      if (sr.duration_s <= 0.0)
        throw ScenarioError("'static.rows[" + std::to_string(i) +
                            "].duration_ms' must be > 0");
      suite.rows.push_back(sr);
    }
    s.finish();
    if (suite.rows.empty())
      throw ScenarioError("'static.rows' must not be empty");
    if (suite.instances < 1)
      throw ScenarioError("'static.instances' must be >= 1");
    sc.static_suite = std::move(suite);
    checked([&] { sc.static_config(sc.static_suite->rows.front()); });
  }

  if (r.has("sweep")) {
    detail::ObjectReader w(r.child("sweep"), "sweep");
    SweepSpec sweep;
    sweep.altitudes_km = w.numbers("altitudes_km");
    sweep.separations_km = w.numbers("separations_km");
    sweep.min_rate_ebits = w.number_or("min_rate_ebits", 200.0);
    sweep.holdover_s = w.number_or("holdover_s", 0.0);
    sweep.day_samples = w.count_or("day_samples", 86400);
    sweep.period_samples = w.count_or("period_samples", 86400);
    w.finish();
    if (sweep.altitudes_km.empty() || sweep.separations_km.empty())
      throw ScenarioError("'sweep' grids must not be empty");
    for (double a : sweep.altitudes_km)
      if (a <= 0.0) throw ScenarioError("'sweep.altitudes_km' must be > 0");
    if (sweep.day_samples == 0 || sweep.period_samples == 0)
      throw ScenarioError("'sweep' sample counts must be >= 1");
    sc.sweep = std::move(sweep);
  }

  if (r.has("shadow")) {
    detail::ObjectReader h(r.child("shadow"), "shadow");
    ShadowRequest shadow;
    shadow.altitude_km = h.number_or("altitude_km", 500.0);
    shadow.min_rate_ebits = h.number_or("min_rate_ebits", 200.0);
    if (h.has("holdovers_s")) shadow.holdovers_s = h.numbers("holdovers_s");
    h.finish();
    if (shadow.altitude_km <= 0.0)
      throw ScenarioError("'shadow.altitude_km' must be > 0");
    sc.shadow = std::move(shadow);
  }

  r.finish();

  if (!sc.stations.empty()) {
    std::set<std::string> names;
    for (const auto& gs : sc.stations)
      if (!names.insert(gs.name).second)
        throw ScenarioError("duplicate station name '" + gs.name + "'");
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

}  // namespace qcs

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcs/geometry.hpp"
#include "qcs/link_budget.hpp"

namespace qcs {

// ---------------------------------------------------------------------------
// Sampled link-rate traces
// ---------------------------------------------------------------------------

struct TraceGrid {
  double span_s = 172800.0;  // two days
  double step_s = 1.0;

  std::size_t samples() const {
    return static_cast<std::size_t>(span_s / step_s) + 1;
  }
  double time_at(std::size_t i) const { return static_cast<double>(i) * step_s; }
  std::size_t window_samples(double tau_s) const {
    return static_cast<std::size_t>(tau_s / step_s + 1e-9);
  }
};

// Uplink/downlink ebit rates between one station and one satellite on the
// sample grid. Zero where the satellite is below the elevation mask.
struct LinkTrace {
  std::vector<double> uplink;
  std::vector<double> downlink;
};

inline std::vector<LinkTrace> compute_link_traces(const Constellation& cons,
                                                  const GroundStation& gs,
                                                  const ChannelParams& ch,
                                                  const TraceGrid& grid) {
  const int n_sats = cons.total_satellites();
  const std::size_t n = grid.samples();
  std::vector<LinkTrace> traces(static_cast<std::size_t>(n_sats));
  for (auto& t : traces) {
    t.uplink.assign(n, 0.0);
    t.downlink.assign(n, 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid.time_at(i);
    for (int s = 0; s < n_sats; ++s) {
      const auto [orbit, idx] = cons.locate(s);
      const auto geom = link_geometry(satellite_position(*orbit, idx, t), gs, t,
                                      ch.zenith_mask_deg);
      if (!geom.visible) continue;
      traces[static_cast<std::size_t>(s)].uplink[i] =
          ebit_rate(geom, ch, LinkDirection::Up);
      traces[static_cast<std::size_t>(s)].downlink[i] =
          ebit_rate(geom, ch, LinkDirection::Down);
    }
  }
  return traces;
}

// Fraction of samples where at least one uplink clears the threshold - the
// single-station connectivity figure.
inline double connection_support_fraction(const std::vector<LinkTrace>& traces,
                                          double min_rate_ebits) {
  if (traces.empty() || traces.front().uplink.empty()) return 0.0;
  const std::size_t n = traces.front().uplink.size();
  std::size_t hit = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& tr : traces) {
      if (tr.uplink[i] > min_rate_ebits) {
        ++hit;
        break;
      }
    }
  }
  return static_cast<double>(hit) / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Pairwise synchronization trace
// ---------------------------------------------------------------------------

struct SyncParams {
  double min_rate_ebits = 200.0;     // R_c: usable-link threshold
  double holdover_window_s = 100.0;  // tau: the partner must reach the same
                                     // satellite somewhere in [t-tau, t+tau]
};

// For each station of a pair: a satellite qualifies at sample t when this
// station's uplink to it clears R_c at t and the partner's uplink to the same
// satellite clears R_c somewhere in the closed holdover window around t.
// Among qualifying satellites the strongest own uplink wins, lowest index on
// ties.
struct PairSyncTrace {
  std::vector<double> rate[2];    // winning uplink rate, 0 when unsynced
  std::vector<int> satellite[2];  // winner index, -1 when unsynced
};

namespace detail {

// Sliding maximum over the closed index window [i-w, i+w] (monotone deque).
inline std::vector<double> window_max(const std::vector<double>& d,
                                      std::size_t w) {
  const std::size_t n = d.size();
  std::vector<double> m(n, 0.0);
  std::vector<std::size_t> deque;
  deque.reserve(64);
  std::size_t head = 0;
  std::size_t hi = 0;  // next sample to admit
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lim = std::min(n - 1, i + w);
    for (; hi <= lim; ++hi) {
      while (deque.size() > head && d[deque.back()] <= d[hi]) deque.pop_back();
      deque.push_back(hi);
    }
    const std::size_t lo = i >= w ? i - w : 0;
    while (deque[head] < lo) ++head;
    m[i] = d[deque[head]];
  }
  return m;
}

}  // namespace detail

inline PairSyncTrace build_sync_trace(const std::vector<LinkTrace>& tr1,
                                      const std::vector<LinkTrace>& tr2,
                                      const SyncParams& sp,
                                      const TraceGrid& grid) {
  if (tr1.size() != tr2.size())
    throw std::invalid_argument("sync trace: satellite sets differ");
  const std::size_t n = grid.samples();
  const std::size_t n_sats = tr1.size();
  const std::size_t w = grid.window_samples(sp.holdover_window_s);

  std::vector<std::vector<double>> wm1(n_sats), wm2(n_sats);
  for (std::size_t s = 0; s < n_sats; ++s) {
    if (tr1[s].uplink.size() != n || tr2[s].uplink.size() != n)
      throw std::invalid_argument("sync trace: grid mismatch");
    wm1[s] = detail::window_max(tr1[s].uplink, w);
    wm2[s] = detail::window_max(tr2[s].uplink, w);
  }

  PairSyncTrace out;
  for (int k = 0; k < 2; ++k) {
    out.rate[k].assign(n, 0.0);
    out.satellite[k].assign(n, -1);
  }
  const std::vector<LinkTrace>* own[2] = {&tr1, &tr2};
  const std::vector<std::vector<double>>* partner_wm[2] = {&wm2, &wm1};

  for (int k = 0; k < 2; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = 0.0;
      int best_sat = -1;
      for (std::size_t s = 0; s < n_sats; ++s) {
        const double up = (*own[k])[s].uplink[i];
        if (up > sp.min_rate_ebits &&
            (*partner_wm[k])[s][i] > sp.min_rate_ebits && up > best) {
          best = up;
          best_sat = static_cast<int>(s);
        }
      }
      if (best_sat >= 0) {
        out.rate[k][i] = best;
        out.satellite[k][i] = best_sat;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pair figures of merit
// ---------------------------------------------------------------------------

struct PairFom {
  double connected_fraction = 0.0;  // samples where either station is synced
  double longest_gap_s = 0.0;       // longest run with neither station synced
  double avg_uplink_loss_db[2] = {0.0, 0.0};
  double avg_downlink_loss_db[2] = {0.0, 0.0};
  std::size_t synced_samples[2] = {0, 0};
};

// Losses average the dB values over each station's own synced samples: the
// uplink of the chosen satellite (the sync-trace rate itself) and the
// downlink of that same satellite at the same instant. A never-synced station
// reports infinite loss. With loss_of_mean_rate the dB of the mean rate is
// reported instead of the mean of the dB values.
inline PairFom compute_pair_fom(const PairSyncTrace& st,
                                const std::vector<LinkTrace>& tr1,
                                const std::vector<LinkTrace>& tr2,
                                const ChannelParams& ch, const TraceGrid& grid,
                                bool loss_of_mean_rate = false) {
  PairFom fom;
  const std::size_t n = st.rate[0].size();
  const std::vector<LinkTrace>* own[2] = {&tr1, &tr2};

  std::size_t connected = 0, gap = 0, longest = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (st.satellite[0][i] >= 0 || st.satellite[1][i] >= 0) {
      ++connected;
      gap = 0;
    } else {
      ++gap;
      longest = std::max(longest, gap);
    }
  }
  fom.connected_fraction = n ? static_cast<double>(connected) / n : 0.0;
  fom.longest_gap_s =
      std::min(static_cast<double>(longest) * grid.step_s, grid.span_s);

  for (int k = 0; k < 2; ++k) {
    double up_acc = 0.0, down_acc = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int sat = st.satellite[k][i];
      if (sat < 0) continue;
      ++m;
      const double up = st.rate[k][i];
      const double down = (*own[k])[static_cast<std::size_t>(sat)].downlink[i];
      if (loss_of_mean_rate) {
        up_acc += up;
        down_acc += down;
      } else {
        up_acc += loss_db(up, ch.source_rate_pairs_per_s);
        down_acc += loss_db(down, ch.source_rate_pairs_per_s);
      }
    }
    fom.synced_samples[k] = m;
    if (m == 0) {
      fom.avg_uplink_loss_db[k] = std::numeric_limits<double>::infinity();
      fom.avg_downlink_loss_db[k] = std::numeric_limits<double>::infinity();
      continue;
    }
    const double dm = static_cast<double>(m);
    if (loss_of_mean_rate) {
      fom.avg_uplink_loss_db[k] =
          loss_db(up_acc / dm, ch.source_rate_pairs_per_s);
      fom.avg_downlink_loss_db[k] =
          loss_db(down_acc / dm, ch.source_rate_pairs_per_s);
    } else {
      fom.avg_uplink_loss_db[k] = up_acc / dm;
      fom.avg_downlink_loss_db[k] = down_acc / dm;
    }
  }
  return fom;
}

// ---------------------------------------------------------------------------
// Coverage shadow of a single satellite pass
// ---------------------------------------------------------------------------

// Rate toward/from a satellite at a given Earth-central angle, ignoring the
// elevation mask (the shadow boundary usually sits beyond it).
inline double rate_at_central_angle(double gamma_deg, double altitude_m,
                                    const ChannelParams& ch,
                                    LinkDirection dir) {
  GroundStation gs{"probe", 0.0, 0.0, 0.0};
  const double r = kEarthRadiusM + altitude_m;
  const double g = deg2rad(gamma_deg);
  const Vec3 sat{r * std::cos(g), r * std::sin(g), 0.0};
  const auto geom = link_geometry(sat, gs, 0.0, ch.zenith_mask_deg);
  return ebit_rate(geom, ch, dir, /*masked=*/false);
}

// Largest central angle where both directions still clear min_rate; the
// "shadow" a satellite casts on the ground spans twice this angle.
inline double shadow_boundary_gamma_deg(double altitude_m,
                                        const ChannelParams& ch,
                                        double min_rate_ebits) {
  auto worse = [&](double gamma_deg) {
    return std::min(
        rate_at_central_angle(gamma_deg, altitude_m, ch, LinkDirection::Up),
        rate_at_central_angle(gamma_deg, altitude_m, ch, LinkDirection::Down));
  };
  double lo = 1e-9;
  double hi = rad2deg(std::acos(kEarthRadiusM / (kEarthRadiusM + altitude_m)));
  if (worse(lo) <= min_rate_ebits) return 0.0;  // never usable
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (worse(mid) > min_rate_ebits ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double shadow_diameter_deg(double altitude_m, const ChannelParams& ch,
                                  double min_rate_ebits) {
  return 2.0 * shadow_boundary_gamma_deg(altitude_m, ch, min_rate_ebits);
}

// Ground-track advance stretches the usable footprint along-track: a holdover
// allowance of tau adds (360 / T) * tau degrees.
inline double elongated_shadow_deg(double shadow_deg, double holdover_s,
                                   double altitude_m) {
  return shadow_deg + 360.0 * holdover_s / orbital_period_s(altitude_m);
}

// ---------------------------------------------------------------------------
// Two-station separation sweep (equatorial geometry)
// ---------------------------------------------------------------------------

struct SweepPoint {
  double altitude_m = 0.0;
  double separation_km = 0.0;
  double avg_rate_product = 0.0;  // day-mean of uplinkA * uplinkB, (ebits/s)^2
  double connected_ratio = 0.0;   // fraction of a repeat period with both
                                  // stations serviceable within the holdover
};

// Repeat period of an equatorial orbit over a rotating equatorial station.
inline double relative_period_s(double altitude_m) {
  const double w_orb = 2.0 * kPi / orbital_period_s(altitude_m);
  return 2.0 * kPi / (w_orb - kEarthOmegaRadS);
}

inline SweepPoint sweep_separation_point(double altitude_m,
                                         double separation_km,
                                         const ChannelParams& ch,
                                         double min_rate_ebits,
                                         double holdover_s = 0.0,
                                         std::size_t day_samples = 86400,
                                         std::size_t period_samples = 86400) {
  SweepPoint pt;
  pt.altitude_m = altitude_m;
  pt.separation_km = separation_km;

  const double sep_deg = rad2deg(separation_km * 1e3 / kEarthRadiusM);
  const GroundStation sa{"a", 0.0, 0.0, 0.0};
  const GroundStation sb{"b", 0.0, sep_deg, 0.0};
  CircularOrbit orbit;
  orbit.altitude_m = altitude_m;
  orbit.tilt_deg = 90.0;  // equatorial plane

  double acc = 0.0;
  for (std::size_t i = 0; i < day_samples; ++i) {
    const double t = static_cast<double>(i);
    const Vec3 sat = satellite_position(orbit, 0, t);
    const auto ga = link_geometry(sat, sa, t, ch.zenith_mask_deg);
    const auto gb = link_geometry(sat, sb, t, ch.zenith_mask_deg);
    acc += ebit_rate(ga, ch, LinkDirection::Up) *
           ebit_rate(gb, ch, LinkDirection::Up);
  }
  pt.avg_rate_product = acc / static_cast<double>(day_samples);

  // One satellite-over-ground period captures the whole visibility pattern;
  // the holdover window wraps around it.
  const double period = relative_period_s(altitude_m);
  const std::size_t m = period_samples;
  const double step = period / static_cast<double>(m);
  std::vector<char> ea(m), eb(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = step * static_cast<double>(i);
    const Vec3 sat = satellite_position(orbit, 0, t);
    const auto ga = link_geometry(sat, sa, t, ch.zenith_mask_deg);
    const auto gb = link_geometry(sat, sb, t, ch.zenith_mask_deg);
    ea[i] = ebit_rate(ga, ch, LinkDirection::Up) > min_rate_ebits;
    eb[i] = ebit_rate(gb, ch, LinkDirection::Up) > min_rate_ebits;
  }

  const std::size_t w = static_cast<std::size_t>(holdover_s / step + 1e-9);
  std::size_t both = 0;
  if (2 * w + 1 >= m) {
    const bool any_b = std::find(eb.begin(), eb.end(), char(1)) != eb.end();
    for (std::size_t i = 0; i < m; ++i) both += ea[i] && any_b;
  } else {
    std::vector<std::size_t> prefix(m + 1, 0);
    for (std::size_t i = 0; i < m; ++i)
      prefix[i + 1] = prefix[i] + static_cast<std::size_t>(eb[i]);
    auto count_circular = [&](std::size_t lo, std::size_t hi) {  // inclusive
      if (lo <= hi) return prefix[hi + 1] - prefix[lo];
      return (prefix[m] - prefix[lo]) + prefix[hi + 1];
    };
    for (std::size_t i = 0; i < m; ++i) {
      if (!ea[i]) continue;
      const std::size_t lo = (i + m - w) % m;
      const std::size_t hi = (i + w) % m;
      if (count_circular(lo, hi) > 0) ++both;
    }
  }
  pt.connected_ratio = static_cast<double>(both) / static_cast<double>(m);
  return pt;
}

// ---------------------------------------------------------------------------
// CSV emitters (fixed formats, byte-stable across runs)
// ---------------------------------------------------------------------------

inline void write_connection_trace_csv(std::ostream& out,
                                       const std::vector<LinkTrace>& traces,
                                       LinkDirection dir,
                                       const TraceGrid& grid) {
  out << "t_s,sat_id,rate\n";
  char buf[128];
  const std::size_t n = grid.samples();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < traces.size(); ++s) {
      const double r = dir == LinkDirection::Up ? traces[s].uplink[i]
                                                : traces[s].downlink[i];
      std::snprintf(buf, sizeof(buf), "%.3f,%zu,%.6f\n", grid.time_at(i), s, r);
      out << buf;
    }
  }
}

inline void write_sync_trace_csv(std::ostream& out, const PairSyncTrace& st,
                                 int station, const TraceGrid& grid) {
  out << "t_s,sat_id,rate\n";
  char buf[128];
  for (std::size_t i = 0; i < st.rate[station].size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.3f,%d,%.6f\n", grid.time_at(i),
                  st.satellite[station][i], st.rate[station][i]);
    out << buf;
  }
}

struct FomRow {
  std::string pair;
  PairFom fom;
};

inline void write_fom_csv(std::ostream& out, const std::vector<FomRow>& rows) {
  out << "pair,up_loss_db_a,up_loss_db_b,down_loss_db_a,down_loss_db_b,"
         "connected_pct,longest_gap_h\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.2f,%.2f,%.2f,%.2f,%.2f,%.3f\n",
                  r.pair.c_str(), r.fom.avg_uplink_loss_db[0],
                  r.fom.avg_uplink_loss_db[1], r.fom.avg_downlink_loss_db[0],
                  r.fom.avg_downlink_loss_db[1],
                  100.0 * r.fom.connected_fraction,
                  r.fom.longest_gap_s / 3600.0);
    out << buf;
  }
}

inline void write_sweep_csv(std::ostream& out,
                            const std::vector<SweepPoint>& points) {
  out << "altitude_km,separation_km,avg_rate_product,connected_ratio\n";
  char buf[192];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof(buf), "%.1f,%.1f,%.6e,%.8f\n",
                  p.altitude_m / 1e3, p.separation_km, p.avg_rate_product,
                  p.connected_ratio);
    out << buf;
  }
}

}  // namespace qcs

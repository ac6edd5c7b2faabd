#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <stdexcept>
#include <vector>

#include "qcs/fft.hpp"
#include "qcs/rng.hpp"

namespace qcs {

// ---------------------------------------------------------------------------
// Clock and detector models
// ---------------------------------------------------------------------------

// Affine local clock: reading(t) = (1 + skew) * (t - epoch) + epoch + offset.
// The reference station runs the identity clock (skew = offset = 0).
struct ClockModel {
  double skew = 0.0;
  double offset_s = 0.0;
  double epoch_s = 0.0;

  double read(double t_true_s) const {
    return (1.0 + skew) * (t_true_s - epoch_s) + epoch_s + offset_s;
  }
};

// Gaussian detector timing jitter is quoted as FWHM in data sheets but the
// simulation works in standard deviations.
inline double fwhm_to_sigma(double fwhm) {
  return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}
inline double sigma_to_fwhm(double sigma) {
  return sigma * (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

struct DetectorModel {
  double jitter_sigma_s = 0.0;
  double dark_rate_hz = 0.0;

  static DetectorModel from_fwhm(double jitter_fwhm_s, double dark_rate_hz) {
    return DetectorModel{fwhm_to_sigma(jitter_fwhm_s), dark_rate_hz};
  }
};

// ---------------------------------------------------------------------------
// Event series generation
// ---------------------------------------------------------------------------

// Poisson arrival times on [0, duration) at a fixed rate, via exponential
// gaps (already sorted by construction). Rate 0 yields an empty stream.
inline std::vector<double> poisson_stream(RandomEngine& rng, double rate_hz,
                                          double duration_s) {
  std::vector<double> out;
  if (rate_hz <= 0.0) return out;
  out.reserve(static_cast<std::size_t>(rate_hz * duration_s * 1.1) + 16);
  const double mean_gap = 1.0 / rate_hz;
  double t = rng.exponential(mean_gap);
  while (t < duration_s) {
    out.push_back(t);
    t += rng.exponential(mean_gap);
  }
  return out;
}

// One direction of the exchange: a pair source whose near photon is detected
// locally and whose far photon crosses the lossy channel.
//
// Per-pair detection is two independent coin flips (local kappa, far
// channel * kappa), so the pair process thins into three independent Poisson
// streams -- both-detected, near-only, far-only -- which we generate directly
// instead of flipping coins for every emitted pair. The two constructions
// are the same process; this one touches ~3x fewer random numbers.
struct DirectionEvents {
  std::vector<double> near_times_s;  // local detections, source-side truth time
  std::vector<double> far_times_s;   // far detections, truth time at emission
  std::size_t coincidences = 0;      // pairs detected on both sides
};

inline DirectionEvents generate_direction(RandomEngine& rng, double pair_rate_hz,
                                          double p_near, double p_far,
                                          double duration_s) {
  if (p_near < 0.0 || p_near > 1.0 || p_far < 0.0 || p_far > 1.0)
    throw std::invalid_argument("detection probabilities must be in [0, 1]");

  auto both = poisson_stream(rng, pair_rate_hz * p_near * p_far, duration_s);
  auto near_only =
      poisson_stream(rng, pair_rate_hz * p_near * (1.0 - p_far), duration_s);
  auto far_only =
      poisson_stream(rng, pair_rate_hz * (1.0 - p_near) * p_far, duration_s);

  DirectionEvents ev;
  ev.coincidences = both.size();
  ev.near_times_s.resize(both.size() + near_only.size());
  std::merge(both.begin(), both.end(), near_only.begin(), near_only.end(),
             ev.near_times_s.begin());
  ev.far_times_s.resize(both.size() + far_only.size());
  std::merge(both.begin(), both.end(), far_only.begin(), far_only.end(),
             ev.far_times_s.begin());
  return ev;
}

// Nearly-sorted input is the common case (jitter is tiny next to the mean
// event gap), where insertion sort runs in linear time.
inline void insertion_sort_ticks(std::vector<std::int64_t>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    const std::int64_t key = v[i];
    std::size_t j = i;
    while (j > 0 && v[j - 1] > key) {
      v[j] = v[j - 1];
      --j;
    }
    v[j] = key;
  }
}

// Detection pipeline for one detector: truth time -> local clock -> jitter ->
// dark counts -> quantized ticks. Jitter perturbs real detections only; dark
// counts are detector noise with no optical timing spread of their own.
inline std::vector<std::int64_t> detect_and_quantize(
    RandomEngine& rng, const std::vector<double>& truth_times_s,
    const ClockModel& clock, const DetectorModel& det, double duration_s,
    double resolution_s) {
  std::vector<std::int64_t> ticks;
  const auto darks = poisson_stream(rng, det.dark_rate_hz, duration_s);
  ticks.reserve(truth_times_s.size() + darks.size());

  const double inv_res = 1.0 / resolution_s;
  if (det.jitter_sigma_s > 0.0) {
    for (double t : truth_times_s) {
      const double local =
          clock.read(t) + det.jitter_sigma_s * rng.gaussian_truncated(5.0);
      ticks.push_back(std::llround(local * inv_res));
    }
  } else {
    for (double t : truth_times_s)
      ticks.push_back(std::llround(clock.read(t) * inv_res));
  }
  for (double t : darks) ticks.push_back(std::llround(clock.read(t) * inv_res));

  insertion_sort_ticks(ticks);
  return ticks;
}

// ---------------------------------------------------------------------------
// Exact sparse cross-correlation over a tick-lag range
// ---------------------------------------------------------------------------

struct CorrelationResult {
  std::int64_t peak_lag_ticks = 0;
  std::int64_t peak_count = 0;
  double lag_bins = 0.0;       // bins searched
  double sum_counts = 0.0;     // total pairs landing in the range
  double sum_sq_counts = 0.0;  // sum of squared per-bin counts
  double offpeak_mean = 0.0;   // peak neighborhood (+/-3 bins) excluded
  double offpeak_sd = 0.0;
  double snr = 0.0;
  bool found = false;
};

namespace detail {

// Exact count of pairs (i, j) with b[j] - a[i] == lag.
inline std::int64_t pairs_at_lag(const std::vector<std::int64_t>& a,
                                 const std::vector<std::int64_t>& b,
                                 std::int64_t lag) {
  std::int64_t n = 0;
  for (const std::int64_t bj : b) {
    const auto range = std::equal_range(a.begin(), a.end(), bj - lag);
    n += range.second - range.first;
  }
  return n;
}

}  // namespace detail

// Histogram of pairwise tick differences b[j] - a[i] over [lag_lo, lag_hi],
// exact argmax plus moments for the noise-floor statistics.
//
// The lag axis is far too long for a dense array (10^10 bins for a 250 ms
// acquisition at 50 ps), so it is swept in fixed-size chunks of uint8 counts.
// Chunks run from the highest lag downward; each b[j] keeps a cursor into a
// that only ever moves forward, so every (i, j) pair is binned exactly once
// and the whole sweep costs O(pairs + bins). Ties on the maximum break toward
// the smallest lag. The rare bin that overflows a uint8 (the true peak at low
// loss) spills into an exact side map.
class TickCorrelator {
 public:
  explicit TickCorrelator(int chunk_bits = 20) : chunk_bits_(chunk_bits) {
    if (chunk_bits < 8 || chunk_bits > 26)
      throw std::invalid_argument("correlator: chunk_bits out of range");
    counts_.resize(std::size_t{1} << chunk_bits_);
  }

  CorrelationResult correlate(const std::vector<std::int64_t>& a,
                              const std::vector<std::int64_t>& b,
                              std::int64_t lag_lo, std::int64_t lag_hi) {
    CorrelationResult res;
    if (a.empty() || b.empty() || lag_lo > lag_hi) return res;

    const std::int64_t chunk = std::int64_t{1} << chunk_bits_;
    const std::int64_t n_bins = lag_hi - lag_lo + 1;
    const std::size_t na = a.size(), nb = b.size();

    // Cursor per b: first a not yet consumed for that b, i.e. the first
    // a >= b[j] - lag_hi. Chunks then advance it monotonically.
    cursors_.resize(nb);
    for (std::size_t j = 0; j < nb; ++j) {
      cursors_[j] = static_cast<std::uint32_t>(
          std::lower_bound(a.begin(), a.end(), b[j] - lag_hi) - a.begin());
    }

    std::map<std::int64_t, std::int64_t> overflow;  // lag -> hits past 255
    std::int64_t best_count = 0, best_lag = lag_lo;
    std::uint64_t collisions = 0;  // sum of pre-increment counts == sum C(c,2)
    double total_pairs = 0.0;
    // The slow path fires when a bin could tie or beat the running maximum
    // (or saturate); after the first chunk or two this is a cold branch and
    // the hot loop is load / saturating store / collision add.
    std::int64_t cut = 0;

    const std::int64_t n_chunks = (n_bins + chunk - 1) / chunk;
    for (std::int64_t ci = n_chunks - 1; ci >= 0; --ci) {
      const std::int64_t k0 = lag_lo + ci * chunk;
      const std::int64_t k_top = std::min(k0 + chunk - 1, lag_hi);
      std::memset(counts_.data(), 0, static_cast<std::size_t>(k_top - k0 + 1));

      std::uint64_t chunk_pairs = 0;
      for (std::size_t j = 0; j < nb; ++j) {
        const std::int64_t top = b[j] - k0;  // largest a in this chunk's window
        std::size_t i = cursors_[j];
        const std::size_t start = i;
        for (; i < na && a[i] <= top; ++i) {
          const std::size_t idx = static_cast<std::size_t>(top - a[i]);
          const std::uint8_t c = counts_[idx];
          counts_[idx] = static_cast<std::uint8_t>(c + (c != 255));
          collisions += c;
          if (c >= cut) {
            if (c == 255) {
              ++overflow[k0 + static_cast<std::int64_t>(idx)];
            } else {
              const std::int64_t cc = c + 1;
              const std::int64_t lagv = k0 + static_cast<std::int64_t>(idx);
              if (cc > best_count || (cc == best_count && lagv < best_lag)) {
                best_count = cc;
                best_lag = lagv;
              }
              cut = best_count < 256 ? best_count - 1 : 255;
            }
          }
        }
        cursors_[j] = static_cast<std::uint32_t>(i);
        chunk_pairs += i - start;
      }
      total_pairs += static_cast<double>(chunk_pairs);
    }

    // Saturated bins (the true peak at low loss) are recounted exactly: fix
    // the maximum and swap their flat-255 collision contributions for the
    // exact pair sums.
    double pair_sum = static_cast<double>(collisions);
    for (const auto& [lag, extra] : overflow) {
      const double t =
          static_cast<double>(detail::pairs_at_lag(a, b, lag));
      pair_sum += 0.5 * t * (t - 1.0) -
                  (0.5 * 255.0 * 254.0 + 255.0 * static_cast<double>(extra));
      const std::int64_t ti = static_cast<std::int64_t>(t);
      if (ti > best_count || (ti == best_count && lag < best_lag)) {
        best_count = ti;
        best_lag = lag;
      }
    }
    if (best_count <= 0) return res;

    res.found = true;
    res.peak_lag_ticks = best_lag;
    res.peak_count = best_count;
    res.lag_bins = static_cast<double>(n_bins);
    res.sum_counts = total_pairs;
    res.sum_sq_counts = total_pairs + 2.0 * pair_sum;

    // Noise-floor moments with the peak neighborhood excluded; the handful of
    // excluded bins are recounted exactly.
    double excl_sum = 0.0, excl_sq = 0.0;
    std::int64_t excl_bins = 0;
    for (std::int64_t lag = best_lag - 3; lag <= best_lag + 3; ++lag) {
      if (lag < lag_lo || lag > lag_hi) continue;
      const double c = static_cast<double>(detail::pairs_at_lag(a, b, lag));
      excl_sum += c;
      excl_sq += c * c;
      ++excl_bins;
    }
    const double n_off = static_cast<double>(n_bins - excl_bins);
    if (n_off > 1.0) {
      const double mean = (res.sum_counts - excl_sum) / n_off;
      const double var =
          std::max(0.0, (res.sum_sq_counts - excl_sq) / n_off - mean * mean);
      res.offpeak_mean = mean;
      res.offpeak_sd = std::sqrt(var);
      if (res.offpeak_sd > 0.0)
        res.snr = (static_cast<double>(res.peak_count) - mean) / res.offpeak_sd;
    }
    return res;
  }

  // Full-overlap search: every pairwise difference is in range.
  CorrelationResult correlate_full(const std::vector<std::int64_t>& a,
                                   const std::vector<std::int64_t>& b) {
    if (a.empty() || b.empty()) return {};
    return correlate(a, b, b.front() - a.back(), b.back() - a.front());
  }

 private:
  int chunk_bits_;
  std::vector<std::uint8_t> counts_;
  std::vector<std::uint32_t> cursors_;
};

// Dense FFT evaluation of the same histogram, for lag spans that fit in
// memory. Counts are small integers, so rounding the inverse transform
// recovers them exactly; used to cross-check the sparse path.
inline CorrelationResult correlate_dense_fft(const std::vector<std::int64_t>& a,
                                             const std::vector<std::int64_t>& b,
                                             std::int64_t lag_lo,
                                             std::int64_t lag_hi) {
  CorrelationResult res;
  if (a.empty() || b.empty() || lag_lo > lag_hi) return res;

  const std::int64_t a0 = a.front(), b0 = b.front();
  std::vector<double> da(static_cast<std::size_t>(a.back() - a0) + 1, 0.0);
  std::vector<double> db(static_cast<std::size_t>(b.back() - b0) + 1, 0.0);
  for (auto t : a) da[static_cast<std::size_t>(t - a0)] += 1.0;
  for (auto t : b) db[static_cast<std::size_t>(t - b0)] += 1.0;

  // r[k] at index (na-1) + k counts pairs with (b - b0) - (a - a0) = k,
  // i.e. lag = k + (b0 - a0).
  const auto r = cross_correlate_fft(da, db);
  const std::int64_t base = b0 - a0 - (static_cast<std::int64_t>(da.size()) - 1);

  std::int64_t best = -1, best_lag = 0;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const std::int64_t lag = base + static_cast<std::int64_t>(k);
    if (lag < lag_lo || lag > lag_hi) continue;
    const std::int64_t c = std::llround(r[k]);
    sum += static_cast<double>(c);
    sum_sq += static_cast<double>(c) * static_cast<double>(c);
    if (c > best) {
      best = c;
      best_lag = lag;
    }
  }
  if (best < 0) return res;

  res.found = best > 0;
  res.peak_lag_ticks = best_lag;
  res.peak_count = best;
  res.lag_bins = static_cast<double>(lag_hi - lag_lo + 1);
  res.sum_counts = sum;
  res.sum_sq_counts = sum_sq;

  double excl_sum = 0.0, excl_sq = 0.0;
  std::int64_t excl_bins = 0;
  for (std::int64_t lag = best_lag - 3; lag <= best_lag + 3; ++lag) {
    if (lag < lag_lo || lag > lag_hi) continue;
    const double c = static_cast<double>(detail::pairs_at_lag(a, b, lag));
    excl_sum += c;
    excl_sq += c * c;
    ++excl_bins;
  }
  const double n_off = res.lag_bins - static_cast<double>(excl_bins);
  if (n_off > 1.0) {
    const double mean = (sum - excl_sum) / n_off;
    const double var = std::max(0.0, (sum_sq - excl_sq) / n_off - mean * mean);
    res.offpeak_mean = mean;
    res.offpeak_sd = std::sqrt(var);
    if (res.offpeak_sd > 0.0)
      res.snr = (static_cast<double>(res.peak_count) - mean) / res.offpeak_sd;
  }
  return res;
}

}  // namespace qcs

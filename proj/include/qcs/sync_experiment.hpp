#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "qcs/timestamp_sim.hpp"

namespace qcs {

// Two-way clock synchronization between station A (reference clock) and
// station B (skewed, offset clock) over a symmetric lossy channel.
//
// Each direction has its own pair source: the near photon is detected at the
// source station, the far photon at the other end. Correlating the two tick
// series of a direction gives the peak lag
//     A->B : propagation + offset (+ skew drift)
//     B->A : propagation - offset (- skew drift)
// so half the difference estimates B's clock offset without knowing the
// (symmetric) propagation delay.
struct SyncExperimentConfig {
  double pair_rate_hz = 1e7;
  double total_loss_db = 34.0;  // end-to-end: coincidence rate / pair rate
  double duration_s = 0.25;
  double resolution_s = 50e-12;
  double detector_eff = 0.5;
  DetectorModel detector;  // same model at all four detectors
  double propagation_delay_s = 0.0;
  double clock_skew = 3e-10;  // magnitude; sign is drawn per instance
  double max_offset_s = 1e-6;  // offset drawn uniformly from [0, this)
  double success_threshold_s = 1e-9;  // |estimate - truth| below this counts
  double lag_window_s = 0.0;   // 0 = search the full overlap range
  int instances = 100;
  bool accounting_only = false;  // generate and count, skip correlation
  bool dense_fft = false;        // dense evaluation (short acquisitions only)

  void validate() const {
    if (pair_rate_hz <= 0.0 || duration_s <= 0.0 || resolution_s <= 0.0)
      throw std::invalid_argument("sync: rate/duration/resolution must be > 0");
    if (detector_eff <= 0.0 || detector_eff > 1.0)
      throw std::invalid_argument("sync: detector efficiency must be in (0, 1]");
    if (instances < 1) throw std::invalid_argument("sync: instances must be >= 1");
    const double p_far =
        std::pow(10.0, -total_loss_db / 10.0) * detector_eff;
    if (p_far > 1.0)
      throw std::invalid_argument("sync: loss too small for the detector eff");
  }
};

struct SyncInstanceResult {
  bool success = false;
  bool peaks_found = false;
  double true_offset_s = 0.0;
  double est_offset_s = 0.0;
  double offset_error_s = 0.0;
  double snr = 0.0;  // mean of the two directions
  std::int64_t coincidences_ab = 0;
  std::int64_t coincidences_ba = 0;
  CorrelationResult corr_ab, corr_ba;
};

struct SyncSummary {
  double loss_db = 0.0;
  double duration_s = 0.0;
  double success_pct = 0.0;
  double mean_ebit_rate = 0.0;  // detected pairs per second
  double snr_mean = 0.0, snr_sd = 0.0;
  double err_mean_ps = 0.0, err_sd_ps = 0.0;          // |error|, all instances
  double err_success_mean_ps = 0.0, err_success_sd_ps = 0.0;
};

namespace detail {

struct MeanSd {
  double mean = 0.0, sd = 0.0;
};

inline MeanSd mean_sd(const std::vector<double>& v) {
  MeanSd r;
  if (v.empty()) return r;
  double s = 0.0;
  for (double x : v) s += x;
  r.mean = s / static_cast<double>(v.size());
  if (v.size() > 1) {
    double q = 0.0;
    for (double x : v) q += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(q / static_cast<double>(v.size() - 1));
  }
  return r;
}

}  // namespace detail

// One independent realization. The stream index fully determines the draw
// sequence, so results do not depend on scheduling.
inline SyncInstanceResult run_sync_instance(const SyncExperimentConfig& cfg,
                                            std::uint64_t seed,
                                            std::uint64_t stream) {
  RandomEngine rng(seed, stream);
  SyncInstanceResult out;

  const double offset = rng.uniform(0.0, cfg.max_offset_s);
  const double skew = rng.bernoulli(0.5) ? cfg.clock_skew : -cfg.clock_skew;
  const ClockModel clock_a;  // reference
  const ClockModel clock_b{skew, offset, 0.0};
  out.true_offset_s = offset;

  const double eta_channel = std::pow(10.0, -cfg.total_loss_db / 10.0);
  const double p_near = cfg.detector_eff;
  const double p_far = eta_channel * cfg.detector_eff;
  const double dt = cfg.propagation_delay_s;

  if (cfg.accounting_only) {
    // Only the coincidence streams matter for the rate books; skipping the
    // singles keeps accounting runs ~1000x cheaper than full ones.
    const double both_rate = cfg.pair_rate_hz * p_near * p_far;
    out.coincidences_ab = static_cast<std::int64_t>(
        poisson_stream(rng, both_rate, cfg.duration_s).size());
    out.coincidences_ba = static_cast<std::int64_t>(
        poisson_stream(rng, both_rate, cfg.duration_s).size());
    return out;
  }

  auto dir_ab = generate_direction(rng, cfg.pair_rate_hz, p_near, p_far,
                                   cfg.duration_s);
  auto dir_ba = generate_direction(rng, cfg.pair_rate_hz, p_near, p_far,
                                   cfg.duration_s);
  out.coincidences_ab = static_cast<std::int64_t>(dir_ab.coincidences);
  out.coincidences_ba = static_cast<std::int64_t>(dir_ba.coincidences);

  for (double& t : dir_ab.far_times_s) t += dt;
  for (double& t : dir_ba.far_times_s) t += dt;

  auto a1 = detect_and_quantize(rng, dir_ab.near_times_s, clock_a,
                                cfg.detector, cfg.duration_s, cfg.resolution_s);
  auto b2 = detect_and_quantize(rng, dir_ab.far_times_s, clock_b, cfg.detector,
                                cfg.duration_s, cfg.resolution_s);
  auto b1 = detect_and_quantize(rng, dir_ba.near_times_s, clock_b, cfg.detector,
                                cfg.duration_s, cfg.resolution_s);
  auto a2 = detect_and_quantize(rng, dir_ba.far_times_s, clock_a, cfg.detector,
                                cfg.duration_s, cfg.resolution_s);

  if (cfg.lag_window_s > 0.0) {
    // Bounded search: propagation is known coarsely and the offset bound is
    // part of the protocol contract, so both peaks lie in one shared window.
    const std::int64_t lo = std::llround(
        (dt - cfg.max_offset_s - cfg.lag_window_s) / cfg.resolution_s);
    const std::int64_t hi = std::llround(
        (dt + cfg.max_offset_s + cfg.lag_window_s) / cfg.resolution_s);
    if (cfg.dense_fft) {
      out.corr_ab = correlate_dense_fft(a1, b2, lo, hi);
      out.corr_ba = correlate_dense_fft(b1, a2, lo, hi);
    } else {
      TickCorrelator corr;
      out.corr_ab = corr.correlate(a1, b2, lo, hi);
      out.corr_ba = corr.correlate(b1, a2, lo, hi);
    }
  } else if (cfg.dense_fft) {
    if (!a1.empty() && !b2.empty())
      out.corr_ab = correlate_dense_fft(a1, b2, b2.front() - a1.back(),
                                        b2.back() - a1.front());
    if (!b1.empty() && !a2.empty())
      out.corr_ba = correlate_dense_fft(b1, a2, a2.front() - b1.back(),
                                        a2.back() - b1.front());
  } else {
    TickCorrelator corr;
    out.corr_ab = corr.correlate_full(a1, b2);
    out.corr_ba = corr.correlate_full(b1, a2);
  }

  out.peaks_found = out.corr_ab.found && out.corr_ba.found;
  if (out.peaks_found) {
    const double tau_ab =
        static_cast<double>(out.corr_ab.peak_lag_ticks) * cfg.resolution_s;
    const double tau_ba =
        static_cast<double>(out.corr_ba.peak_lag_ticks) * cfg.resolution_s;
    out.est_offset_s = 0.5 * (tau_ab - tau_ba);
    out.offset_error_s = out.est_offset_s - offset;
    out.snr = 0.5 * (out.corr_ab.snr + out.corr_ba.snr);
    // A missed peak lands on a noise excursion somewhere in the lag window
    // (microseconds off), so the default 1 ns gate separates locks from
    // misses cleanly even with several bins of jitter smearing.
    out.success = std::fabs(out.offset_error_s) < cfg.success_threshold_s;
  }
  return out;
}

inline int worker_threads_from_env() {
  const char* v = std::getenv("QCS_THREADS");
  if (!v) return 1;
  const int n = std::atoi(v);
  return n < 1 ? 1 : n;
}

// Runs cfg.instances independent realizations on stream indices
// stream_base .. stream_base + instances - 1 and aggregates the summary.
inline SyncSummary run_sync_experiment(
    const SyncExperimentConfig& cfg, std::uint64_t seed,
    std::uint64_t stream_base = 0,
    std::vector<SyncInstanceResult>* per_instance = nullptr, int threads = 0) {
  cfg.validate();
  if (threads <= 0) threads = worker_threads_from_env();
  const int n = cfg.instances;
  std::vector<SyncInstanceResult> results(static_cast<std::size_t>(n));

  if (threads <= 1 || n == 1) {
    for (int i = 0; i < n; ++i)
      results[static_cast<std::size_t>(i)] =
          run_sync_instance(cfg, seed, stream_base + static_cast<std::uint64_t>(i));
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    const int workers = std::min(threads, n);
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
          results[static_cast<std::size_t>(i)] = run_sync_instance(
              cfg, seed, stream_base + static_cast<std::uint64_t>(i));
      });
    }
    for (auto& t : pool) t.join();
  }

  SyncSummary s;
  s.loss_db = cfg.total_loss_db;
  s.duration_s = cfg.duration_s;

  std::vector<double> snrs, errs, errs_succ, rates;
  snrs.reserve(results.size());
  errs.reserve(results.size());
  rates.reserve(results.size());
  int n_success = 0;
  for (const auto& r : results) {
    // An ebit is a pair detected on both sides, so the measured ebit rate is
    // the per-direction coincidence count over the acquisition time.
    const double coinc =
        0.5 * static_cast<double>(r.coincidences_ab + r.coincidences_ba);
    rates.push_back(coinc / cfg.duration_s);
    if (cfg.accounting_only) continue;
    if (r.success) ++n_success;
    snrs.push_back(r.snr);
    const double abs_err_ps = std::fabs(r.offset_error_s) * 1e12;
    errs.push_back(abs_err_ps);
    if (r.success) errs_succ.push_back(abs_err_ps);
  }
  s.mean_ebit_rate = detail::mean_sd(rates).mean;
  if (!cfg.accounting_only) {
    s.success_pct = 100.0 * static_cast<double>(n_success) / n;
    const auto sn = detail::mean_sd(snrs);
    s.snr_mean = sn.mean;
    s.snr_sd = sn.sd;
    const auto er = detail::mean_sd(errs);
    s.err_mean_ps = er.mean;
    s.err_sd_ps = er.sd;
    const auto es = detail::mean_sd(errs_succ);
    s.err_success_mean_ps = es.mean;
    s.err_success_sd_ps = es.sd;
  }
  if (per_instance) *per_instance = std::move(results);
  return s;
}

// CSV with one row per summary; fixed formatting so identical runs are
// byte-identical across platforms.
inline void write_sync_summary_csv(std::ostream& out,
                                   const std::vector<SyncSummary>& rows) {
  out << "loss_db,duration_s,success_pct,mean_ebit_rate,snr_mean,snr_sd,"
         "err_mean_ps,err_sd_ps,err_success_mean_ps,err_success_sd_ps\n";
  char buf[320];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%.2f,%.3f,%.1f,%.3f,%.4f,%.4f,%.3f,%.3f,%.3f,%.3f\n",
                  r.loss_db, r.duration_s, r.success_pct, r.mean_ebit_rate,
                  r.snr_mean, r.snr_sd, r.err_mean_ps, r.err_sd_ps,
                  r.err_success_mean_ps, r.err_success_sd_ps);
    out << buf;
  }
}

// Raw timestamp dump: text header, then fixed-width little-endian records of
// (detector id, tick). Detector ids: 0=A1, 1=B2, 2=B1, 3=A2.
inline void write_timestamp_dump(std::ostream& out, double resolution_s,
                                 double duration_s,
                                 const std::vector<std::int64_t>* series[4]) {
  std::size_t total = 0;
  for (int d = 0; d < 4; ++d) total += series[d]->size();
  char head[128];
  std::snprintf(head, sizeof(head),
                "qcs-timestamps v1 resolution_ps=%.3f duration_s=%.6f records=%zu\n",
                resolution_s * 1e12, duration_s, total);
  out << head;
  for (int d = 0; d < 4; ++d) {
    for (const std::int64_t tick : *series[d]) {
      unsigned char rec[9];
      rec[0] = static_cast<unsigned char>(d);
      std::uint64_t u = static_cast<std::uint64_t>(tick);
      for (int k = 0; k < 8; ++k) rec[1 + k] = static_cast<unsigned char>(u >> (8 * k));
      out.write(reinterpret_cast<const char*>(rec), 9);
    }
  }
}

}  // namespace qcs

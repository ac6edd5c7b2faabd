#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qcs/constants.hpp"
#include "qcs/geometry.hpp"

namespace qcs {

// Hardware and atmosphere knobs for one bidirectional optical link.
//
// The transmitted beam is modeled as a Gaussian whose waist is half the
// effective transmit aperture. The fill factor derates the satellite
// transmit aperture only; the ground telescope transmits its full aperture.
// uplink_waist_override_m, when positive, replaces the uplink waist so that
// scenario files can tune the uplink/downlink asymmetry without code changes.
struct ChannelParams {
  double source_rate_pairs_per_s = 1e7;
  double wavelength_m = 810e-9;
  double sat_aperture_diameter_m = 0.10;
  double fill_factor = 0.8;
  double ground_aperture_diameter_m = 0.60;
  double detector_eff_sat = 0.5;
  double detector_eff_ground = 0.5;
  double zenith_transmittance = 0.8;
  double zenith_mask_deg = kDefaultZenithMaskDeg;
  double pointing_jitter_rad = 0.0;
  double uplink_waist_override_m = 0.0;  // 0 = use ground aperture / 2

  void validate() const {
    auto in01 = [](double v) { return v > 0.0 && v <= 1.0; };
    if (source_rate_pairs_per_s <= 0.0)
      throw std::invalid_argument("channel: source rate must be > 0");
    if (wavelength_m <= 0.0 || sat_aperture_diameter_m <= 0.0 ||
        ground_aperture_diameter_m <= 0.0)
      throw std::invalid_argument("channel: wavelength/apertures must be > 0");
    if (!in01(fill_factor) || !in01(detector_eff_sat) ||
        !in01(detector_eff_ground) || !in01(zenith_transmittance))
      throw std::invalid_argument(
          "channel: efficiencies/transmittances must be in (0, 1]");
  }
};

enum class LinkDirection { Down, Up };

struct LinkRates {
  double downlink_ebits_per_s = 0.0;
  double uplink_ebits_per_s = 0.0;
  double downlink_loss_db = 0.0;
  double uplink_loss_db = 0.0;
};

// Gaussian-beam capture fraction between a transmit waist w0 and a circular
// receive aperture at range L. Monotone decreasing in L, -> 1 as L -> 0 for
// receivers large compared to the waist.
inline double eta_freespace_w0(double L_m, double w0_m, double rx_diameter_m,
                               double wavelength_m,
                               double pointing_jitter_rad = 0.0) {
  const double rayleigh = kPi * w0_m * w0_m / wavelength_m;
  double w2 = w0_m * w0_m * (1.0 + (L_m / rayleigh) * (L_m / rayleigh));
  if (pointing_jitter_rad > 0.0) {
    const double spread = pointing_jitter_rad * L_m;
    w2 += spread * spread;  // jitter folded in as extra beam divergence
  }
  const double r_rx = rx_diameter_m / 2.0;
  return 1.0 - std::exp(-2.0 * r_rx * r_rx / w2);
}

inline double eta_freespace(double L_m, double tx_diameter_m,
                            double rx_diameter_m, double wavelength_m,
                            double fill_factor = 1.0) {
  return eta_freespace_w0(L_m, fill_factor * tx_diameter_m / 2.0, rx_diameter_m,
                          wavelength_m);
}

// Airmass secant law with a validity mask: zero beyond the mask (and at or
// past the horizon). set masked=false to evaluate the bare secant curve, which
// the shadow root-find needs beyond the mask.
inline double eta_atmosphere(double zenith_angle_rad, double eta_zenith,
                             double zenith_mask_deg = kDefaultZenithMaskDeg,
                             bool masked = true) {
  const double zen_deg = rad2deg(zenith_angle_rad);
  if (masked && zen_deg > zenith_mask_deg) return 0.0;
  if (zen_deg >= 90.0) return 0.0;
  return std::pow(eta_zenith, 1.0 / std::cos(zenith_angle_rad));
}

inline double transmit_waist_m(const ChannelParams& p, LinkDirection dir) {
  if (dir == LinkDirection::Down)
    return p.fill_factor * p.sat_aperture_diameter_m / 2.0;
  if (p.uplink_waist_override_m > 0.0) return p.uplink_waist_override_m;
  return p.ground_aperture_diameter_m / 2.0;
}

inline double receive_aperture_m(const ChannelParams& p, LinkDirection dir) {
  return dir == LinkDirection::Down ? p.ground_aperture_diameter_m
                                    : p.sat_aperture_diameter_m;
}

// Instantaneous ebit rate R * eta_fs * eta_atm * kappa_sat * kappa_grd.
// Both detector efficiencies always apply: one photon of each pair is
// detected locally at the source, the other at the far end.
inline double ebit_rate(const LinkGeometry& geom, const ChannelParams& p,
                        LinkDirection dir, bool masked = true) {
  if (masked && !geom.visible) return 0.0;
  const double fs =
      eta_freespace_w0(geom.distance_m, transmit_waist_m(p, dir),
                       receive_aperture_m(p, dir), p.wavelength_m,
                       p.pointing_jitter_rad);
  const double atm = eta_atmosphere(geom.zenith_angle_rad,
                                    p.zenith_transmittance, p.zenith_mask_deg,
                                    masked);
  return p.source_rate_pairs_per_s * fs * atm * p.detector_eff_sat *
         p.detector_eff_ground;
}

inline LinkRates link_rates(const LinkGeometry& geom, const ChannelParams& p);

// Total loss in dB relative to the source rate; zero rate reports infinite
// loss (never-connected pairs print as "inf").
inline double loss_db(double rate_ebits_per_s, double source_rate) {
  if (rate_ebits_per_s <= 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(rate_ebits_per_s / source_rate);
}

inline LinkRates link_rates(const LinkGeometry& geom, const ChannelParams& p) {
  LinkRates r;
  r.downlink_ebits_per_s = ebit_rate(geom, p, LinkDirection::Down);
  r.uplink_ebits_per_s = ebit_rate(geom, p, LinkDirection::Up);
  r.downlink_loss_db = loss_db(r.downlink_ebits_per_s, p.source_rate_pairs_per_s);
  r.uplink_loss_db = loss_db(r.uplink_ebits_per_s, p.source_rate_pairs_per_s);
  return r;
}

}  // namespace qcs

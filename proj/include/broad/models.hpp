#ifndef BROAD_MODELS_HPP
#define BROAD_MODELS_HPP

// Link-level models for a drone base station (DBS) that relays an FSO
// backhaul from a macro base station (MBS) to ground users over RF.
//
// Everything here is a pure function templated on the scalar type, so the
// same expressions can be evaluated in double for the solvers and in
// long double by test oracles.

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace broad {

template <typename Scalar>
struct Position3 {
  Scalar x{0};  // m
  Scalar y{0};  // m
  Scalar h{0};  // m, altitude above ground
};
using Position3D = Position3<double>;

template <typename Scalar>
struct User {
  Scalar x{0};    // m
  Scalar y{0};    // m
  Scalar phi{0};  // required data rate, bit/s
};
using UserProfile = User<double>;

template <typename Scalar>
struct AccessChannel {
  Scalar carrier_hz{2e9};
  Scalar xi_los_db{1};
  Scalar xi_nlos_db{20};
  Scalar alpha{9.6};
  Scalar beta{0.28};
  Scalar dbs_power_w{0.1};
  Scalar noise_w{3.981071705534973e-14};  // -104 dBm
  Scalar bandwidth_hz{20e6};
  Scalar speed_of_light{299792458.0};
};
using AccessChannelParams = AccessChannel<double>;

template <typename Scalar>
struct FsoLink {
  Scalar power_w{1e-3};
  Scalar tau_tx{0.9};
  Scalar tau_rx{0.7};
  Scalar aperture_diameter_m{0.0425};
  // Full cone angle. A 1 mrad beam carries ~2 Mbps at 5 km, too little to
  // serve a single typical user, so the default is narrowed to 60 urad.
  Scalar divergence_rad{60e-6};
  Scalar wavelength_m{1550e-9};
  Scalar planck{6.626e-34};
  Scalar receiver_sensitivity{67885};  // photons per bit
  Scalar visibility_km{20};
  Scalar speed_of_light{299792458.0};
  // When set, overrides the visibility-derived attenuation (dB/km).
  std::optional<Scalar> fixed_attenuation_db_per_km{Scalar(1)};
};
using FsoLinkParams = FsoLink<double>;

template <typename Scalar>
struct AltitudeRange {
  Scalar h_min{50};
  Scalar h_max{500};
};
using AltitudeBounds = AltitudeRange<double>;

template <typename Scalar>
inline Scalar dbm_to_watts(Scalar dbm) {
  using std::pow;
  return pow(Scalar(10), dbm / Scalar(10)) * Scalar(1e-3);
}

template <typename Scalar>
inline Scalar horizontal_distance(const Position3<Scalar>& dbs, const User<Scalar>& user) {
  using std::hypot;
  return hypot(dbs.x - user.x, dbs.y - user.y);
}

template <typename Scalar>
inline Scalar distance_3d(const Position3<Scalar>& dbs, const User<Scalar>& user) {
  using std::hypot;
  return hypot(horizontal_distance(dbs, user), dbs.h);
}

template <typename Scalar>
inline Scalar distance_3d(const Position3<Scalar>& a, const Position3<Scalar>& b) {
  using std::sqrt;
  const Scalar dx = a.x - b.x;
  const Scalar dy = a.y - b.y;
  const Scalar dh = a.h - b.h;
  return sqrt(dx * dx + dy * dy + dh * dh);
}

// Elevation angle in degrees; a user directly below the DBS sees 90 degrees.
template <typename Scalar>
inline Scalar elevation_deg(const Position3<Scalar>& dbs, const User<Scalar>& user) {
  using std::atan;
  const Scalar l = horizontal_distance(dbs, user);
  if (l == Scalar(0)) {
    if (dbs.h == Scalar(0)) {
      throw std::invalid_argument("elevation undefined for a DBS co-located with the user");
    }
    return Scalar(90);
  }
  return Scalar(180) / std::numbers::pi_v<Scalar> * atan(dbs.h / l);
}

template <typename Scalar>
inline Scalar los_probability(const Position3<Scalar>& dbs, const User<Scalar>& user,
                              const AccessChannel<Scalar>& p) {
  using std::exp;
  const Scalar theta = elevation_deg(dbs, user);
  return Scalar(1) / (Scalar(1) + p.alpha * exp(-p.beta * (theta - p.alpha)));
}

template <typename Scalar>
inline Scalar free_space_pathloss_db(Scalar distance_m, const AccessChannel<Scalar>& p) {
  using std::log10;
  return Scalar(20) *
         log10(Scalar(4) * std::numbers::pi_v<Scalar> * p.carrier_hz * distance_m / p.speed_of_light);
}

// Pathloss for a given LoS probability, exposed so the convex-combination
// term can be pinned independently of the geometry.
template <typename Scalar>
inline Scalar average_pathloss_db(Scalar distance_m, Scalar los_prob, const AccessChannel<Scalar>& p) {
  if (!(distance_m > Scalar(0))) {
    throw std::invalid_argument("pathloss needs a positive distance");
  }
  return free_space_pathloss_db(distance_m, p) + los_prob * p.xi_los_db +
         (Scalar(1) - los_prob) * p.xi_nlos_db;
}

template <typename Scalar>
inline Scalar average_pathloss_db(const Position3<Scalar>& dbs, const User<Scalar>& user,
                                  const AccessChannel<Scalar>& p) {
  const Scalar d = distance_3d(dbs, user);
  if (!(d > Scalar(0))) {
    throw std::invalid_argument("pathloss needs a positive distance");
  }
  return average_pathloss_db(d, los_probability(dbs, user, p), p);
}

template <typename Scalar>
inline Scalar snr(Scalar pathloss_db, const AccessChannel<Scalar>& p) {
  using std::pow;
  return p.dbs_power_w * pow(Scalar(10), -pathloss_db / Scalar(10)) / p.noise_w;
}

// Spectral efficiency in bit/s/Hz.
template <typename Scalar>
inline Scalar spectral_efficiency(Scalar pathloss_db, const AccessChannel<Scalar>& p) {
  using std::log2;
  return log2(Scalar(1) + snr(pathloss_db, p));
}

template <typename Scalar>
inline Scalar access_rate(Scalar bandwidth_hz, Scalar pathloss_db, const AccessChannel<Scalar>& p) {
  if (bandwidth_hz < Scalar(0)) {
    throw std::invalid_argument("bandwidth must be non-negative");
  }
  return bandwidth_hz * spectral_efficiency(pathloss_db, p);
}

// Smallest bandwidth at which the user's access rate meets its requirement.
template <typename Scalar>
inline Scalar required_bandwidth(const User<Scalar>& user, Scalar pathloss_db,
                                 const AccessChannel<Scalar>& p) {
  const Scalar eff = spectral_efficiency(pathloss_db, p);
  if (!(eff > Scalar(0))) {
    throw std::invalid_argument("required_bandwidth needs a positive SNR");
  }
  return user.phi / eff;
}

template <typename Scalar>
inline Scalar required_bandwidth(const Position3<Scalar>& dbs, const User<Scalar>& user,
                                 const AccessChannel<Scalar>& p) {
  return required_bandwidth(user, average_pathloss_db(dbs, user, p), p);
}

// Particle size-distribution exponent as a piecewise function of visibility (km).
// Each boundary belongs to the branch whose inequality includes it.
template <typename Scalar>
inline Scalar scattering_exponent_q(Scalar visibility_km) {
  const Scalar v = visibility_km;
  if (v > Scalar(50)) return Scalar(1.6);
  if (v > Scalar(6)) return Scalar(1.3);
  if (v > Scalar(1)) return Scalar(0.16) * v + Scalar(0.34);
  if (v > Scalar(0.5)) return v - Scalar(0.5);
  return Scalar(0);
}

// Atmospheric attenuation in dB/km from visibility, ignoring any fixed override.
template <typename Scalar>
inline Scalar attenuation_from_visibility(Scalar visibility_km, Scalar wavelength_m) {
  using std::pow;
  if (!(visibility_km > Scalar(0))) {
    throw std::invalid_argument("visibility must be positive");
  }
  const Scalar wavelength_nm = wavelength_m * Scalar(1e9);
  return Scalar(3.91) / visibility_km *
         pow(wavelength_nm / Scalar(550), -scattering_exponent_q(visibility_km));
}

template <typename Scalar>
inline Scalar attenuation_gamma(const FsoLink<Scalar>& p) {
  return attenuation_from_visibility(p.visibility_km, p.wavelength_m);
}

// The attenuation actually applied to the link: the fixed override when set.
template <typename Scalar>
inline Scalar effective_attenuation(const FsoLink<Scalar>& p) {
  return p.fixed_attenuation_db_per_km ? *p.fixed_attenuation_db_per_km : attenuation_gamma(p);
}

template <typename Scalar>
inline Scalar photon_energy(const FsoLink<Scalar>& p) {
  return p.planck * p.speed_of_light / p.wavelength_m;
}

// FSO data rate (bit/s) over a link of length `link_m`. Attenuation uses the
// length in km, geometric spreading uses it in meters.
template <typename Scalar>
inline Scalar fso_rate(Scalar link_m, const FsoLink<Scalar>& p) {
  using std::pow;
  if (!(link_m > Scalar(0))) {
    throw std::invalid_argument("FSO link needs distinct endpoints");
  }
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar half_div = p.divergence_rad / Scalar(2);
  const Scalar gain = pow(Scalar(10), -effective_attenuation(p) * (link_m / Scalar(1000)) / Scalar(10));
  const Scalar received = p.power_w * p.tau_tx * p.tau_rx * gain * p.aperture_diameter_m * p.aperture_diameter_m;
  const Scalar spread = pi * half_div * half_div * link_m * link_m;
  return received / (spread * photon_energy(p) * p.receiver_sensitivity);
}

template <typename Scalar>
inline Scalar fso_rate(const Position3<Scalar>& mbs, const Position3<Scalar>& dbs, const FsoLink<Scalar>& p) {
  return fso_rate(distance_3d(mbs, dbs), p);
}

}  // namespace broad

#endif  // BROAD_MODELS_HPP

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "broad/simharness.hpp"

namespace broad {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) {
    throw std::invalid_argument("malformed number for '" + key + "': " + value);
  }
  return v;
}

std::size_t to_count(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw std::invalid_argument("'" + key + "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Setter = std::function<void(ScenarioParams&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  auto num = [](double ScenarioParams::*field) -> Setter {
    return [field](ScenarioParams& p, const std::string& k, const std::string& v) { p.*field = to_double(k, v); };
  };
  auto acc = [](double AccessChannelParams::*field) -> Setter {
    return [field](ScenarioParams& p, const std::string& k, const std::string& v) {
      p.config.access.*field = to_double(k, v);
    };
  };
  auto fso = [](double FsoLinkParams::*field) -> Setter {
    return [field](ScenarioParams& p, const std::string& k, const std::string& v) {
      p.config.fso.*field = to_double(k, v);
    };
  };
  static const std::map<std::string, Setter> table = {
      {"users", [](ScenarioParams& p, const std::string& k, const std::string& v) { p.users = to_count(k, v); }},
      {"delta_km", num(&ScenarioParams::delta_km)},
      {"poi_width", num(&ScenarioParams::poi_width_m)},
      {"poi_height", num(&ScenarioParams::poi_height_m)},
      {"poi_center_x", num(&ScenarioParams::poi_center_x_m)},
      {"poi_center_y", num(&ScenarioParams::poi_center_y_m)},
      {"phi_mean", num(&ScenarioParams::phi_mean_bps)},
      {"phi_min", num(&ScenarioParams::phi_min_bps)},
      {"phi_max", num(&ScenarioParams::phi_max_bps)},
      {"initial_altitude", num(&ScenarioParams::initial_altitude_m)},
      {"f_c", acc(&AccessChannelParams::carrier_hz)},
      {"xi_los", acc(&AccessChannelParams::xi_los_db)},
      {"xi_nlos", acc(&AccessChannelParams::xi_nlos_db)},
      {"alpha", acc(&AccessChannelParams::alpha)},
      {"beta", acc(&AccessChannelParams::beta)},
      {"p_d", acc(&AccessChannelParams::dbs_power_w)},
      {"n0", acc(&AccessChannelParams::noise_w)},
      {"B", acc(&AccessChannelParams::bandwidth_hz)},
      {"c",
       [](ScenarioParams& p, const std::string& k, const std::string& v) {
         p.config.access.speed_of_light = p.config.fso.speed_of_light = to_double(k, v);
       }},
      {"p_fso", fso(&FsoLinkParams::power_w)},
      {"tau_tx", fso(&FsoLinkParams::tau_tx)},
      {"tau_rx", fso(&FsoLinkParams::tau_rx)},
      {"aperture_diameter", fso(&FsoLinkParams::aperture_diameter_m)},
      {"divergence", fso(&FsoLinkParams::divergence_rad)},
      {"wavelength", fso(&FsoLinkParams::wavelength_m)},
      {"planck", fso(&FsoLinkParams::planck)},
      {"receiver_sensitivity", fso(&FsoLinkParams::receiver_sensitivity)},
      {"visibility", fso(&FsoLinkParams::visibility_km)},
      {"gamma",
       [](ScenarioParams& p, const std::string& k, const std::string& v) {
         if (v == "visibility" || v == "none") {
           p.config.fso.fixed_attenuation_db_per_km.reset();
         } else {
           p.config.fso.fixed_attenuation_db_per_km = to_double(k, v);
         }
       }},
      {"h_min", [](ScenarioParams& p, const std::string& k, const std::string& v) { p.config.altitude.h_min = to_double(k, v); }},
      {"h_max", [](ScenarioParams& p, const std::string& k, const std::string& v) { p.config.altitude.h_max = to_double(k, v); }},
      {"h_m", [](ScenarioParams& p, const std::string& k, const std::string& v) { p.config.mbs_height_m = to_double(k, v); }},
  };
  return table;
}

void write_config(std::ostream& out, const NetworkConfig& c) {
  const auto& a = c.access;
  const auto& f = c.fso;
  out << "f_c = " << full(a.carrier_hz) << '\n'
      << "xi_los = " << full(a.xi_los_db) << '\n'
      << "xi_nlos = " << full(a.xi_nlos_db) << '\n'
      << "alpha = " << full(a.alpha) << '\n'
      << "beta = " << full(a.beta) << '\n'
      << "p_d = " << full(a.dbs_power_w) << '\n'
      << "n0 = " << full(a.noise_w) << '\n'
      << "B = " << full(a.bandwidth_hz) << '\n'
      << "c = " << full(a.speed_of_light) << '\n'
      << "p_fso = " << full(f.power_w) << '\n'
      << "tau_tx = " << full(f.tau_tx) << '\n'
      << "tau_rx = " << full(f.tau_rx) << '\n'
      << "aperture_diameter = " << full(f.aperture_diameter_m) << '\n'
      << "divergence = " << full(f.divergence_rad) << '\n'
      << "wavelength = " << full(f.wavelength_m) << '\n'
      << "planck = " << full(f.planck) << '\n'
      << "receiver_sensitivity = " << full(f.receiver_sensitivity) << '\n'
      << "visibility = " << full(f.visibility_km) << '\n'
      << "gamma = " << (f.fixed_attenuation_db_per_km ? full(*f.fixed_attenuation_db_per_km) : "visibility") << '\n'
      << "h_min = " << full(c.altitude.h_min) << '\n'
      << "h_max = " << full(c.altitude.h_max) << '\n'
      << "h_m = " << full(c.mbs_height_m) << '\n';
}

}  // namespace

KeyValues read_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_values_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return read_key_values(in);
}

void apply_key_values(const KeyValues& kv, ScenarioParams& params) {
  const auto& table = setters();
  for (const auto& [key, value] : kv) {
    const auto it = table.find(key);
    if (it == table.end()) throw std::invalid_argument("unknown key '" + key + "'");
    it->second(params, key, value);
  }
  const auto& alt = params.config.altitude;
  if (!(alt.h_min > 0) || !(alt.h_max >= alt.h_min)) {
    throw std::invalid_argument("altitude bounds must satisfy 0 < h_min <= h_max");
  }
}

void write_plan_file(std::ostream& out, const Network& net, const BroadPlan& plan) {
  out << "# DBS plan\n";
  write_config(out, net.config);
  out << "mbs_x = " << full(net.mbs.x) << '\n'
      << "mbs_y = " << full(net.mbs.y) << '\n'
      << "mbs_h = " << full(net.mbs.h) << '\n'
      << "user_count = " << net.users.size() << '\n';
  for (std::size_t i = 0; i < net.users.size(); ++i) {
    const auto& u = net.users[i];
    out << "user." << i << " = " << full(u.x) << ' ' << full(u.y) << ' ' << full(u.phi) << '\n';
  }
  out << "dbs_x_m = " << full(plan.dbs_position.x) << '\n'
      << "dbs_y_m = " << full(plan.dbs_position.y) << '\n'
      << "dbs_h_m = " << full(plan.dbs_position.h) << '\n'
      << "satisfied_count = " << plan.satisfied_count << '\n'
      << "iterations = " << plan.iterations << '\n'
      << "z = ";
  for (auto bit : plan.z) out << (bit ? '1' : '0');
  out << '\n';
  for (std::size_t i = 0; i < plan.per_user_bandwidth.size(); ++i) {
    if (plan.per_user_bandwidth[i] != 0) out << "bandwidth." << i << " = " << full(plan.per_user_bandwidth[i]) << '\n';
  }
}

void read_plan_file(std::istream& in, Network& net, BroadPlan& plan) {
  KeyValues kv = read_key_values(in);
  auto take = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("plan file is missing '" + key + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  const std::size_t n = to_count("user_count", take("user_count"));
  net.users.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    const std::string key = "user." + std::to_string(i);
    std::istringstream is(take(key));
    auto& u = net.users[i];
    if (!(is >> u.x >> u.y >> u.phi)) throw std::invalid_argument("malformed '" + key + "'");
  }
  net.mbs = {to_double("mbs_x", take("mbs_x")), to_double("mbs_y", take("mbs_y")), to_double("mbs_h", take("mbs_h"))};

  plan = BroadPlan{};
  plan.dbs_position = {to_double("dbs_x_m", take("dbs_x_m")), to_double("dbs_y_m", take("dbs_y_m")),
                       to_double("dbs_h_m", take("dbs_h_m"))};
  plan.satisfied_count = to_count("satisfied_count", take("satisfied_count"));
  plan.iterations = to_count("iterations", take("iterations"));
  const std::string bits = kv.count("z") ? take("z") : std::string();
  for (char ch : bits) {
    if (ch != '0' && ch != '1') throw std::invalid_argument("selection 'z' must be a string of 0 and 1");
    plan.z.push_back(ch == '1' ? 1 : 0);
  }
  plan.per_user_bandwidth.assign(n, 0.0);
  for (auto it = kv.begin(); it != kv.end();) {
    if (it->first.rfind("bandwidth.", 0) == 0) {
      const std::size_t i = to_count(it->first, it->first.substr(10));
      if (i >= n) throw std::invalid_argument("bandwidth index out of range: " + it->first);
      plan.per_user_bandwidth[i] = to_double(it->first, it->second);
      it = kv.erase(it);
    } else {
      ++it;
    }
  }

  ScenarioParams params;
  apply_key_values(kv, params);
  net.config = params.config;
  if (plan.dbs_position.h >= 0 && n > 0 && plan.z.size() == n) {
    plan.utilization = path_utilization(plan.dbs_position, plan.z, net);
  }
}

}  // namespace broad

#ifndef BROAD_NETWORK_HPP
#define BROAD_NETWORK_HPP

#include <cstdint>
#include <vector>

#include "broad/models.hpp"

namespace broad {

struct NetworkConfig {
  AccessChannelParams access;
  FsoLinkParams fso;
  AltitudeBounds altitude;
  double mbs_height_m = 20;
};

// Everything a placement or access-control solve needs to evaluate links.
struct Network {
  std::vector<UserProfile> users;
  Position3D mbs;
  NetworkConfig config;
};

using Selection = std::vector<std::uint8_t>;

inline std::size_t selected_count(const Selection& z) {
  std::size_t n = 0;
  for (auto bit : z) n += bit ? 1 : 0;
  return n;
}

}  // namespace broad

#endif  // BROAD_NETWORK_HPP

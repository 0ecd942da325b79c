#include "relayris/system_config.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace relayris {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts * 1000.0); }

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) {
    throw std::invalid_argument("SystemConfig: " + what);
  }
}

}  // namespace

void SystemConfig::validate() const {
  require(users >= 1, "user count must be at least 1");
  require(bs_antennas >= users, "BS antenna count must be at least the user count");
  require(relay_antennas >= users, "relay antenna count must be at least the user count");
  require(ris_elements >= 1, "RIS element count must be at least 1");
  require(phase_bits >= 1 && phase_bits <= 16, "phase bits must lie in [1, 16]");
  require(noise_power_w > 0.0, "noise power must be positive");
  require(rate_threshold > 0.0, "rate threshold must be positive");
  require(bs_user_distance_m > 0.0, "BS-user distance must be positive");
  require(relay_distance_m > 0.0 && relay_distance_m < bs_user_distance_m,
          "relay distance must lie strictly between the BS and the user circle center");
  require(user_radius_m >= 0.0, "user radius must be nonnegative");
  require(rician_factor >= 0.0, "Rician factor must be nonnegative");
  require(ris_offset_m >= 0.0, "RIS offset must be nonnegative");
}

}  // namespace relayris

#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>

#include "uavpower/params.hpp"

namespace uavpower {

/// Vehicle configuration read from flat `key=value` lines. `#` starts a
/// comment. Keys are the AirframeParams field names plus the optional fit
/// settings `tol`, `max_iters` and `seed`. Missing airframe keys keep the
/// reference values; a missing `v0` is derived from weight, density and
/// disc area.
struct Config {
  AirframeParamsd params = reference_params();
  bool v0_override = false;
  std::optional<double> tol;
  std::optional<int> max_iters;
  std::optional<std::uint64_t> seed;
};

Config parse_config(std::istream& in, const std::string& source = "config");
Config load_config(const std::string& path);

/// Reference configuration (no file).
Config default_config();

/// Inverse of parse_config for the airframe keys.
std::string to_config_text(const AirframeParamsd& params);

}  // namespace uavpower

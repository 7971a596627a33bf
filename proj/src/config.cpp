#include "uavpower/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "uavpower/csv.hpp"
#include "uavpower/errors.hpp"
#include "uavpower/model.hpp"

namespace uavpower {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& text, const std::string& source, std::size_t line, const std::string& key) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(source, line, "key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

using Field = double AirframeParamsd::*;

const std::map<std::string, Field>& real_fields() {
  static const std::map<std::string, Field> fields = {
      {"weight_w", &AirframeParamsd::weight_w},
      {"rho", &AirframeParamsd::rho},
      {"disc_area_a", &AirframeParamsd::disc_area_a},
      {"solidity_s", &AirframeParamsd::solidity_s},
      {"profile_drag_delta", &AirframeParamsd::profile_drag_delta},
      {"induced_correction_k", &AirframeParamsd::induced_correction_k},
      {"thrust_coeff_ct", &AirframeParamsd::thrust_coeff_ct},
      {"rotor_radius_r", &AirframeParamsd::rotor_radius_r},
      {"v0", &AirframeParamsd::v0},
      {"s_fp_par", &AirframeParamsd::s_fp_par},
      {"s_fp_perp", &AirframeParamsd::s_fp_perp},
  };
  return fields;
}

}  // namespace

Config parse_config(std::istream& in, const std::string& source) {
  Config cfg;
  std::map<std::string, std::size_t> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(source, line_no, "expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (seen.count(key)) {
      throw ParseError(source, line_no, "duplicate key '" + key + "' (first on line " + std::to_string(seen[key]) + ")");
    }
    seen[key] = line_no;

    if (key == "n") {
      cfg.params.n = parse_number<int>(value, source, line_no, key);
    } else if (auto it = real_fields().find(key); it != real_fields().end()) {
      cfg.params.*(it->second) = parse_number<double>(value, source, line_no, key);
      if (key == "v0") cfg.v0_override = true;
    } else if (key == "tol") {
      cfg.tol = parse_number<double>(value, source, line_no, key);
    } else if (key == "max_iters") {
      cfg.max_iters = parse_number<int>(value, source, line_no, key);
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(value, source, line_no, key);
    } else {
      throw ParseError(source, line_no, "unknown key '" + key + "'");
    }
  }
  try {
    // derive_v0 validates, and v0 itself is still the reference value here.
    if (!cfg.v0_override) cfg.params.v0 = derive_v0(cfg.params);
    cfg.params.validate();
  } catch (const InvalidParams& e) {
    throw ParseError(source, line_no, e.what());
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open config '" + path + "'");
  }
  return parse_config(in, path);
}

Config default_config() {
  Config cfg;
  cfg.v0_override = true;
  return cfg;
}

std::string to_config_text(const AirframeParamsd& p) {
  std::ostringstream os;
  os << "n=" << p.n << '\n';
  for (const auto& [key, field] : real_fields()) os << key << '=' << csv::repr(p.*field) << '\n';
  return os.str();
}

}  // namespace uavpower

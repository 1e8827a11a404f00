#include "cfxl/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace cfxl {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as a number");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as an integer");
  }
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void apply_system_key(SystemParams& p, const std::string& key, const std::string& value) {
  if (key == "K") p.K = static_cast<int>(parse_int(key, value));
  else if (key == "L") p.L = static_cast<int>(parse_int(key, value));
  else if (key == "M") p.M = static_cast<int>(parse_int(key, value));
  else if (key == "N") p.N = static_cast<int>(parse_int(key, value));
  else if (key == "C_F") p.C_F = parse_double(key, value);
  else if (key == "fc") p.fc = parse_double(key, value);
  else if (key == "bandwidth") p.bandwidth = parse_double(key, value);
  else if (key == "tx_power_dbm") p.tx_power_dbm = parse_double(key, value);
  else if (key == "noise_psd_dbm_hz") p.noise_psd_dbm_hz = parse_double(key, value);
  else if (key == "area_radius_m") p.area_radius_m = parse_double(key, value);
  else if (key == "min_dist_m") p.min_dist_m = parse_double(key, value);
  else if (key == "shadowing_sigma_db") p.shadowing_sigma_db = parse_double(key, value);
  else throw ConfigError("unknown system parameter '" + key + "'");
}

void apply_afp_key(AfpConfig& a, const std::string& key, const std::string& value) {
  if (key == "delta0") a.delta0 = parse_double(key, value);
  else if (key == "decay_r") a.decay_r = parse_double(key, value);
  else if (key == "delta_in") a.delta_in = parse_double(key, value);
  else if (key == "delta_out") a.delta_out = parse_double(key, value);
  else if (key == "max_outer") a.max_outer = static_cast<int>(parse_int(key, value));
  else if (key == "max_inner") a.max_inner = static_cast<int>(parse_int(key, value));
  else if (key == "mu_floor") a.mu_floor = parse_double(key, value);
  else if (key == "ridge") a.ridge = parse_double(key, value);
  else if (key == "bisect_tol") a.bisect_tol = parse_double(key, value);
  else throw ConfigError("unknown [afp] key '" + key + "'");
}

void apply_experiment_key(FileConfig& c, const std::string& key, const std::string& value) {
  if (key == "schemes") c.scheme_tokens = split_csv(value);
  else if (key == "init") c.default_init = value;
  else if (key == "trials") c.trials = static_cast<int>(parse_int(key, value));
  else if (key == "base_seed") c.base_seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "out_dir") c.out_dir = value;
  else if (key == "sweep_var") c.sweep_var = value;
  else if (key == "sweep_values") c.sweep_values = parse_value_list(value);
  else if (key == "mode") c.mode = value;
  else if (key == "threads") c.threads = static_cast<int>(parse_int(key, value));
  else throw ConfigError("unknown [experiment] key '" + key + "'");
}

}  // namespace

std::vector<double> parse_value_list(const std::string& csv) {
  std::vector<double> out;
  for (const auto& tok : split_csv(csv)) out.push_back(parse_double("sweep_values", tok));
  return out;
}

FileConfig parse_config(const std::string& text) {
  FileConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;  // "" = top level
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "afp" && section != "experiment")
        throw ConfigError("unknown config section '[" + section + "]'");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");

    if (section.empty()) apply_system_key(cfg.params, key, value);
    else if (section == "afp") apply_afp_key(cfg.afp, key, value);
    else apply_experiment_key(cfg, key, value);
  }
  return cfg;
}

FileConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

}  // namespace cfxl

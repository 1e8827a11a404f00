#ifndef CFXL_CONFIG_HPP
#define CFXL_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cfxl/afp.hpp"
#include "cfxl/scenario.hpp"

namespace cfxl {

// Parsed contents of a config file. System parameters live at the top level
// under their field names; solver settings under [afp]; harness settings
// under [experiment]. Missing keys keep their defaults, unknown keys are
// rejected.
struct FileConfig {
  SystemParams params;
  AfpConfig afp;

  std::vector<std::string> scheme_tokens{"afp"};  // afp[:init], evd, mf, random
  std::string default_init = "evd";               // A-FP initialization
  int trials = 200;
  std::uint64_t base_seed = 1;
  std::string out_dir = "results";
  std::string sweep_var = "cf";
  std::vector<double> sweep_values;  // empty: use the base params' value
  std::string mode = "centralized";  // or "decentralized"
  int threads = 0;                   // 0 = hardware concurrency
};

FileConfig load_config(const std::string& path);
FileConfig parse_config(const std::string& text);  // same, from a string

std::vector<double> parse_value_list(const std::string& csv);  // "1,2,4" -> {1,2,4}

}  // namespace cfxl

#endif  // CFXL_CONFIG_HPP

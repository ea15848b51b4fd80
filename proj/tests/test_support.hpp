#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "pcbench/config_io.hpp"

namespace pcbench::test {

inline std::string data_path(const std::string& rel) { return std::string(PCBENCH_TEST_DATA_DIR) + "/" + rel; }

inline Scenario bundled(const std::string& name) { return load_scenario(data_path("scenarios/" + name + ".json")); }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Unique scratch directory under the system temp dir, removed by the caller if wanted.
inline std::string scratch_dir(const std::string& tag) {
  std::string tmpl = "/tmp/pcbench_" + tag + "_XXXXXX";
  char* p = ::mkdtemp(tmpl.data());
  return p ? std::string(p) : std::string();
}

// Minimal scenario document used by tests that need a small, fast environment.
inline const char* tiny_cstr_json = R"({
  "name": "tiny_cstr",
  "version": 1,
  "model": "cstr",
  "T": 10,
  "tsim": 5,
  "setpoints": {"Ca": [0.85, 0.85, 0.85, 0.85, 0.85, 0.9, 0.9, 0.9, 0.9, 0.9]},
  "a_space": {"low": [295], "high": [302]},
  "o_space": {"low": [0.7, 300, 0.8], "high": [1.0, 350, 0.9]},
  "x0": [0.8, 330, 0.85],
  "noise_percentage": 0.0,
  "reward": {"kind": "tracking_quadratic", "Q": [1.0], "R": [0.0]},
  "oracle": {"N": 5}
})";

}  // namespace pcbench::test

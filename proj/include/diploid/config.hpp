#ifndef DIPLOID_CONFIG_HPP
#define DIPLOID_CONFIG_HPP

#include <string>

#include "diploid/params.hpp"

namespace diploid {

struct FileConfig {
  ModelParams model;
  AnalysisParams analysis;
};

// Flat key = value format, one pair per line; '#' starts a comment, blank
// lines are skipped.  Keys f, D, delta, c, K, mu are required; eps, theta,
// alpha, delta_fix, rho are optional and default as in AnalysisParams.
// Throws std::runtime_error with messages
//   "cannot open config file: <path>"
//   "unknown key: <key>"
//   "duplicate key: <key>"
//   "invalid value for key: <key>"
//   "missing required key: <key>"
//   "malformed line in config: <line>"
// Values are parsed but not validated; call validate() on the result.
FileConfig parse_config_file(const std::string& path);

}  // namespace diploid

#endif

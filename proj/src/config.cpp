#include "diploid/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <stdexcept>

namespace diploid {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_value(const std::string& key, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw std::runtime_error("invalid value for key: " + key);
  return v;
}

}  // namespace

FileConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);

  FileConfig cfg;
  std::set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("malformed line in config: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value_text = trim(line.substr(eq + 1));
    if (key.empty()) throw std::runtime_error("malformed line in config: " + line);
    if (!seen.insert(key).second)
      throw std::runtime_error("duplicate key: " + key);

    const double v = parse_value(key, value_text);
    if (key == "f")
      cfg.model.f = v;
    else if (key == "D")
      cfg.model.D = v;
    else if (key == "delta")
      cfg.model.delta = v;
    else if (key == "c")
      cfg.model.c = v;
    else if (key == "K")
      cfg.model.K = v;
    else if (key == "mu")
      cfg.model.mu = v;
    else if (key == "eps")
      cfg.analysis.eps = v;
    else if (key == "theta")
      cfg.analysis.theta = v;
    else if (key == "alpha")
      cfg.analysis.alpha = v;
    else if (key == "delta_fix")
      cfg.analysis.delta_fix = v;
    else if (key == "rho")
      cfg.analysis.rho = v;
    else
      throw std::runtime_error("unknown key: " + key);
  }

  for (const char* required : {"f", "D", "delta", "c", "K", "mu"})
    if (!seen.count(required))
      throw std::runtime_error(std::string("missing required key: ") + required);

  return cfg;
}

}  // namespace diploid

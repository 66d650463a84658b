#ifndef DIPLOID_IO_HPP
#define DIPLOID_IO_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "diploid/experiments.hpp"
#include "diploid/ode.hpp"
#include "diploid/ssa.hpp"

namespace diploid {

// Shortest decimal representation that parses back to the same double;
// locale-independent ('.' separator, no grouping).
std::string format_double(double v);

// key/value pairs echoed into CSV headers as "# key = value" lines so every
// output file carries the configuration that produced it.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;
ConfigEcho config_echo(const ModelParams& p, const AnalysisParams& a);

// Columns t,N_aa,N_aA,N_AA (counts), LF line endings.
void write_trajectory_csv(std::ostream& os,
                          const std::vector<TrajectoryPoint>& rows,
                          const ConfigEcho& echo = {});

// Columns t,x_aa,y_aA,z_AA (densities) on a fixed grid plus the final time.
void write_ode_csv(std::ostream& os, const OdeSolution& sol, double dt,
                   const ConfigEcho& echo = {});

// JSON conversions (nlohmann ADL).  Non-finite doubles serialize as null
// and parse back as NaN; all finite values round-trip exactly.
void to_json(nlohmann::json& j, const ModelParams& p);
void from_json(const nlohmann::json& j, ModelParams& p);
void to_json(nlohmann::json& j, const AnalysisParams& a);
void from_json(const nlohmann::json& j, AnalysisParams& a);
void to_json(nlohmann::json& j, const StoppingRecord& r);
void from_json(const nlohmann::json& j, StoppingRecord& r);
void to_json(nlohmann::json& j, const FixationEstimate& e);
void from_json(const nlohmann::json& j, FixationEstimate& e);
void to_json(nlohmann::json& j, const SurvivalPoint& p);
void from_json(const nlohmann::json& j, SurvivalPoint& p);
void to_json(nlohmann::json& j, const SurvivalScalingReport& r);
void from_json(const nlohmann::json& j, SurvivalScalingReport& r);
void to_json(nlohmann::json& j, const DecayComparison& c);
void from_json(const nlohmann::json& j, DecayComparison& c);
void to_json(nlohmann::json& j, const LadderSchedule& l);
void from_json(const nlohmann::json& j, LadderSchedule& l);
void to_json(nlohmann::json& j, const MutationWindow& w);
void from_json(const nlohmann::json& j, MutationWindow& w);
void to_json(nlohmann::json& j, const FixedPointReport& r);

const char* to_string(LevelRule rule);
LevelRule level_rule_from_string(const std::string& s);

}  // namespace diploid

#endif

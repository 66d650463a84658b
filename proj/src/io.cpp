#include "diploid/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <stdexcept>

namespace diploid {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

ConfigEcho config_echo(const ModelParams& p, const AnalysisParams& a) {
  return {
      {"f", format_double(p.f)},
      {"D", format_double(p.D)},
      {"delta", format_double(p.delta)},
      {"c", format_double(p.c)},
      {"K", format_double(p.K)},
      {"mu", format_double(p.mu)},
      {"eps", format_double(a.eps)},
      {"theta", format_double(a.theta)},
      {"alpha", format_double(a.alpha)},
      {"delta_fix", format_double(a.delta_fix)},
      {"rho", format_double(a.rho)},
  };
}

void write_trajectory_csv(std::ostream& os,
                          const std::vector<TrajectoryPoint>& rows,
                          const ConfigEcho& echo) {
  for (const auto& [key, value] : echo) os << "# " << key << " = " << value << "\n";
  os << "t,N_aa,N_aA,N_AA\n";
  for (const auto& row : rows) {
    os << format_double(row.t) << ',' << row.n.aa << ',' << row.n.aA << ','
       << row.n.AA << '\n';
  }
}

void write_ode_csv(std::ostream& os, const OdeSolution& sol, double dt,
                   const ConfigEcho& echo) {
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  for (const auto& [key, value] : echo) os << "# " << key << " = " << value << "\n";
  os << "t,x_aa,y_aA,z_AA\n";
  const double t0 = sol.t_begin();
  const double t1 = sol.t_end();
  double t = t0;
  for (std::int64_t i = 0;; ++i) {
    t = t0 + static_cast<double>(i) * dt;
    if (t >= t1) break;
    const Vec3 v = sol.at(t);
    os << format_double(t) << ',' << format_double(v[0]) << ','
       << format_double(v[1]) << ',' << format_double(v[2]) << '\n';
  }
  const Vec3 v = sol.at(t1);
  os << format_double(t1) << ',' << format_double(v[0]) << ','
     << format_double(v[1]) << ',' << format_double(v[2]) << '\n';
}

namespace {

// Non-finite values have no JSON number representation; they are written as
// null and read back as NaN.
nlohmann::json num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double num_or_nan(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

}  // namespace

void to_json(nlohmann::json& j, const ModelParams& p) {
  j = nlohmann::json{{"f", p.f},   {"D", p.D}, {"delta", p.delta},
                     {"c", p.c},   {"K", p.K}, {"mu", p.mu}};
}

void from_json(const nlohmann::json& j, ModelParams& p) {
  j.at("f").get_to(p.f);
  j.at("D").get_to(p.D);
  j.at("delta").get_to(p.delta);
  j.at("c").get_to(p.c);
  j.at("K").get_to(p.K);
  j.at("mu").get_to(p.mu);
}

void to_json(nlohmann::json& j, const AnalysisParams& a) {
  j = nlohmann::json{{"eps", a.eps},
                     {"theta", a.theta},
                     {"alpha", a.alpha},
                     {"delta_fix", a.delta_fix},
                     {"rho", a.rho}};
}

void from_json(const nlohmann::json& j, AnalysisParams& a) {
  j.at("eps").get_to(a.eps);
  j.at("theta").get_to(a.theta);
  j.at("alpha").get_to(a.alpha);
  j.at("delta_fix").get_to(a.delta_fix);
  j.at("rho").get_to(a.rho);
}

void to_json(nlohmann::json& j, const StoppingRecord& r) {
  nlohmann::json hits = nlohmann::json::object();
  for (const auto& [level, t] : r.tau_hit) hits[format_double(level)] = num(t);
  j = nlohmann::json{{"tau_delta_mut", num(r.tau_delta_mut)},
                     {"tau_0_mut", num(r.tau_0_mut)},
                     {"tau_hit", std::move(hits)},
                     {"tau_1", num(r.tau_1)},
                     {"t_end", num(r.t_end)},
                     {"reason", r.reason},
                     {"seed", r.seed}};
  j["replica"] = r.replica ? nlohmann::json(*r.replica) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, StoppingRecord& r) {
  r.tau_delta_mut = num_or_nan(j.at("tau_delta_mut"));
  r.tau_0_mut = num_or_nan(j.at("tau_0_mut"));
  r.tau_hit.clear();
  for (const auto& [key, value] : j.at("tau_hit").items())
    r.tau_hit.emplace_back(std::strtod(key.c_str(), nullptr), num_or_nan(value));
  r.tau_1 = num_or_nan(j.at("tau_1"));
  r.t_end = num_or_nan(j.at("t_end"));
  j.at("reason").get_to(r.reason);
  j.at("seed").get_to(r.seed);
  if (j.at("replica").is_null())
    r.replica.reset();
  else
    r.replica = j.at("replica").get<std::int64_t>();
}

void to_json(nlohmann::json& j, const FixationEstimate& e) {
  j = nlohmann::json{{"replicas", e.replicas},
                     {"successes", e.successes},
                     {"estimate", num(e.estimate)},
                     {"std_error", num(e.std_error)},
                     {"target", num(e.target)},
                     {"params", e.params},
                     {"analysis", e.analysis},
                     {"base_seed", e.base_seed}};
}

void from_json(const nlohmann::json& j, FixationEstimate& e) {
  j.at("replicas").get_to(e.replicas);
  j.at("successes").get_to(e.successes);
  e.estimate = num_or_nan(j.at("estimate"));
  e.std_error = num_or_nan(j.at("std_error"));
  e.target = num_or_nan(j.at("target"));
  j.at("params").get_to(e.params);
  j.at("analysis").get_to(e.analysis);
  j.at("base_seed").get_to(e.base_seed);
}

void to_json(nlohmann::json& j, const SurvivalPoint& p) {
  j = nlohmann::json{{"K", p.K},
                     {"level", num(p.level)},
                     {"attempts", p.attempts},
                     {"conditioned", p.conditioned},
                     {"flagged", p.flagged},
                     {"fixing_fraction", num(p.fixing_fraction)},
                     {"fixing_std_error", num(p.fixing_std_error)},
                     {"median_tau_sur", num(p.median_tau_sur)},
                     {"iqr_tau_sur", num(p.iqr_tau_sur)},
                     {"median_tau_hit_eps", num(p.median_tau_hit_eps)},
                     {"unreliable", p.unreliable}};
}

void from_json(const nlohmann::json& j, SurvivalPoint& p) {
  j.at("K").get_to(p.K);
  p.level = num_or_nan(j.at("level"));
  j.at("attempts").get_to(p.attempts);
  j.at("conditioned").get_to(p.conditioned);
  j.at("flagged").get_to(p.flagged);
  p.fixing_fraction = num_or_nan(j.at("fixing_fraction"));
  p.fixing_std_error = num_or_nan(j.at("fixing_std_error"));
  p.median_tau_sur = num_or_nan(j.at("median_tau_sur"));
  p.iqr_tau_sur = num_or_nan(j.at("iqr_tau_sur"));
  p.median_tau_hit_eps = num_or_nan(j.at("median_tau_hit_eps"));
  j.at("unreliable").get_to(p.unreliable);
}

const char* to_string(LevelRule rule) {
  return rule == LevelRule::floor ? "floor" : "eps-scaled";
}

LevelRule level_rule_from_string(const std::string& s) {
  if (s == "floor") return LevelRule::floor;
  if (s == "eps-scaled") return LevelRule::eps_scaled;
  throw std::invalid_argument("unknown level rule: " + s);
}

void to_json(nlohmann::json& j, const SurvivalScalingReport& r) {
  j = nlohmann::json{{"per_k", r.per_k},
                     {"slope", num(r.slope)},
                     {"slope_stderr", num(r.slope_stderr)},
                     {"intercept", num(r.intercept)},
                     {"hit_eps_slope", num(r.hit_eps_slope)},
                     {"hit_eps_intercept", num(r.hit_eps_intercept)},
                     {"hit_eps_r2", num(r.hit_eps_r2)},
                     {"rule", to_string(r.rule)},
                     {"replicas_per_k", r.replicas_per_k},
                     {"params", r.params},
                     {"analysis", r.analysis},
                     {"base_seed", r.base_seed}};
}

void from_json(const nlohmann::json& j, SurvivalScalingReport& r) {
  r.per_k = j.at("per_k").get<std::vector<SurvivalPoint>>();
  r.slope = num_or_nan(j.at("slope"));
  r.slope_stderr = num_or_nan(j.at("slope_stderr"));
  r.intercept = num_or_nan(j.at("intercept"));
  r.hit_eps_slope = num_or_nan(j.at("hit_eps_slope"));
  r.hit_eps_intercept = num_or_nan(j.at("hit_eps_intercept"));
  r.hit_eps_r2 = num_or_nan(j.at("hit_eps_r2"));
  r.rule = level_rule_from_string(j.at("rule").get<std::string>());
  j.at("replicas_per_k").get_to(r.replicas_per_k);
  j.at("params").get_to(r.params);
  j.at("analysis").get_to(r.analysis);
  j.at("base_seed").get_to(r.base_seed);
}

void to_json(nlohmann::json& j, const DecayComparison& c) {
  j = nlohmann::json{{"K", c.K},
                     {"margin", c.margin},
                     {"dt", c.dt},
                     {"horizon", c.horizon},
                     {"attempts", c.attempts},
                     {"tau_eps", num(c.tau_eps)},
                     {"eps_realized", num(c.eps_realized)},
                     {"t", c.t},
                     {"y_stoch", c.y_stoch},
                     {"y_ode", c.y_ode},
                     {"lower", c.lower},
                     {"upper", c.upper},
                     {"frac_in_band", num(c.frac_in_band)},
                     {"sup_distance", num(c.sup_distance)},
                     {"ode_in_bracket", c.ode_in_bracket},
                     {"params", c.params},
                     {"analysis", c.analysis},
                     {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, DecayComparison& c) {
  j.at("K").get_to(c.K);
  j.at("margin").get_to(c.margin);
  j.at("dt").get_to(c.dt);
  j.at("horizon").get_to(c.horizon);
  j.at("attempts").get_to(c.attempts);
  c.tau_eps = num_or_nan(j.at("tau_eps"));
  c.eps_realized = num_or_nan(j.at("eps_realized"));
  j.at("t").get_to(c.t);
  j.at("y_stoch").get_to(c.y_stoch);
  j.at("y_ode").get_to(c.y_ode);
  j.at("lower").get_to(c.lower);
  j.at("upper").get_to(c.upper);
  c.frac_in_band = num_or_nan(j.at("frac_in_band"));
  c.sup_distance = num_or_nan(j.at("sup_distance"));
  j.at("ode_in_bracket").get_to(c.ode_in_bracket);
  j.at("params").get_to(c.params);
  j.at("analysis").get_to(c.analysis);
  j.at("seed").get_to(c.seed);
}

void to_json(nlohmann::json& j, const LadderSchedule& l) {
  nlohmann::json brackets = nlohmann::json::array();
  for (const auto& [lo, hi] : l.rung_bracket)
    brackets.push_back({num(lo), num(hi)});
  j = nlohmann::json{{"K", l.K},
                     {"x", num(l.x)},
                     {"i_max", l.i_max},
                     {"degenerate", l.degenerate},
                     {"level_floor", num(l.level_floor)},
                     {"levels", l.levels},
                     {"rung_bracket", std::move(brackets)},
                     {"total_lower", num(l.total_lower)},
                     {"total_upper", num(l.total_upper)},
                     {"C_l", l.C_l},
                     {"C_u", l.C_u},
                     {"params", l.params},
                     {"analysis", l.analysis}};
}

void from_json(const nlohmann::json& j, LadderSchedule& l) {
  j.at("K").get_to(l.K);
  l.x = num_or_nan(j.at("x"));
  j.at("i_max").get_to(l.i_max);
  j.at("degenerate").get_to(l.degenerate);
  l.level_floor = num_or_nan(j.at("level_floor"));
  j.at("levels").get_to(l.levels);
  l.rung_bracket.clear();
  for (const auto& pair : j.at("rung_bracket"))
    l.rung_bracket.emplace_back(num_or_nan(pair.at(0)), num_or_nan(pair.at(1)));
  l.total_lower = num_or_nan(j.at("total_lower"));
  l.total_upper = num_or_nan(j.at("total_upper"));
  j.at("C_l").get_to(l.C_l);
  j.at("C_u").get_to(l.C_u);
  j.at("params").get_to(l.params);
  j.at("analysis").get_to(l.analysis);
}

void to_json(nlohmann::json& j, const MutationWindow& w) {
  j = nlohmann::json{{"K", w.K},
                     {"mu", w.mu},
                     {"r1", num(w.r1)},
                     {"r2", num(w.r2)},
                     {"threshold", w.threshold},
                     {"window_ok", w.window_ok},
                     {"vacuous", w.vacuous},
                     {"t_first", num(w.t_first)},
                     {"note", w.note},
                     {"params", w.params},
                     {"analysis", w.analysis}};
}

void from_json(const nlohmann::json& j, MutationWindow& w) {
  j.at("K").get_to(w.K);
  j.at("mu").get_to(w.mu);
  w.r1 = num_or_nan(j.at("r1"));
  w.r2 = num_or_nan(j.at("r2"));
  j.at("threshold").get_to(w.threshold);
  j.at("window_ok").get_to(w.window_ok);
  j.at("vacuous").get_to(w.vacuous);
  w.t_first = num_or_nan(j.at("t_first"));
  j.at("note").get_to(w.note);
  j.at("params").get_to(w.params);
  j.at("analysis").get_to(w.analysis);
}

void to_json(nlohmann::json& j, const FixedPointReport& r) {
  nlohmann::json jac = nlohmann::json::array();
  for (int row = 0; row < 3; ++row)
    jac.push_back({r.jacobian.m[row][0], r.jacobian.m[row][1], r.jacobian.m[row][2]});
  j = nlohmann::json{{"point", r.point},
                     {"jacobian", std::move(jac)},
                     {"eigenvalues", r.eigenvalues},
                     {"classification", r.classification},
                     {"residual", r.residual}};
}

}  // namespace diploid

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "diploid/chains.hpp"
#include "diploid/config.hpp"
#include "diploid/experiments.hpp"
#include "diploid/io.hpp"
#include "diploid/ode.hpp"
#include "diploid/params.hpp"
#include "diploid/population.hpp"
#include "diploid/ssa.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  std::int64_t replicas = 0;  // 0 = subcommand default
  double t_max = 100;
  std::string record = "sampled";
  std::optional<double> f, D, delta, c, K, mu;
  std::optional<double> eps, theta, alpha, delta_fix, rho;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path,
                  "config file with key = value lines");
  cmd->add_option("--out", o.out_dir, "output directory")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "base RNG seed")->capture_default_str();
  cmd->add_option("--replicas", o.replicas,
                  "replica count (0 = subcommand default)");
  cmd->add_option("--t-max", o.t_max, "time cap for stochastic runs")
      ->capture_default_str();
  cmd->add_option("--record", o.record, "trajectory record mode")
      ->check(CLI::IsMember({"events", "sampled", "stops"}))
      ->capture_default_str();
  cmd->add_option("--f", o.f, "per-capita birth rate");
  cmd->add_option("--D", o.D, "baseline death rate");
  cmd->add_option("--delta", o.delta, "extra aa death rate");
  cmd->add_option("--c", o.c, "competition coefficient");
  cmd->add_option("--K", o.K, "carrying capacity");
  cmd->add_option("--mu", o.mu, "mutation probability per birth");
  cmd->add_option("--eps", o.eps, "macroscopic density threshold");
  cmd->add_option("--theta", o.theta, "ladder contraction offset");
  cmd->add_option("--alpha", o.alpha, "level exponent offset");
  cmd->add_option("--delta-fix", o.delta_fix, "fixation density threshold");
  cmd->add_option("--rho", o.rho, "decay-rate slack (0 = f*delta/2)");
}

std::pair<diploid::ModelParams, diploid::AnalysisParams> resolve(
    const CommonOpts& o) {
  diploid::ModelParams p;
  diploid::AnalysisParams a;
  if (!o.config_path.empty()) {
    const diploid::FileConfig cfg = diploid::parse_config_file(o.config_path);
    p = cfg.model;
    a = cfg.analysis;
  }
  if (o.f) p.f = *o.f;
  if (o.D) p.D = *o.D;
  if (o.delta) p.delta = *o.delta;
  if (o.c) p.c = *o.c;
  if (o.K) p.K = *o.K;
  if (o.mu) p.mu = *o.mu;
  if (o.eps) a.eps = *o.eps;
  if (o.theta) a.theta = *o.theta;
  if (o.alpha) a.alpha = *o.alpha;
  if (o.delta_fix) a.delta_fix = *o.delta_fix;
  if (o.rho) a.rho = *o.rho;
  diploid::validate(p, a);
  return {p, a};
}

fs::path prepare_out(const CommonOpts& o) {
  fs::path dir(o.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_json_file(const fs::path& file, const nlohmann::json& j) {
  std::ofstream out(file, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open output file: " + file.string());
  out << j.dump(2) << '\n';
}

nlohmann::json config_json(const diploid::ModelParams& p,
                           const diploid::AnalysisParams& a) {
  return nlohmann::json{{"model", p}, {"analysis", a}};
}

diploid::RecordMode record_mode(const std::string& name) {
  if (name == "events") return diploid::RecordMode::events;
  if (name == "sampled") return diploid::RecordMode::sampled;
  return diploid::RecordMode::stops;
}

// --- simulate ---------------------------------------------------------

struct SimulateOpts {
  std::optional<std::int64_t> init_aa;  // default round(nbar_a * K)
  std::int64_t init_aA = 1;
  std::int64_t init_AA = 0;
  double dt = 1.0;
};

void run_simulate(const CommonOpts& common, const SimulateOpts& o) {
  const auto [p, a] = resolve(common);
  const fs::path dir = prepare_out(common);
  const diploid::Derived d = diploid::derived(p, a);

  diploid::PopCount init{
      o.init_aa ? *o.init_aa
                : static_cast<std::int64_t>(std::llround(d.nbar_a * p.K)),
      o.init_aA, o.init_AA};

  diploid::StopSpec stop;
  stop.t_max = common.t_max;
  stop.delta_mut = a.delta_fix;  // records tau_delta_mut without stopping
  stop.hit_levels = {a.eps};
  const diploid::SimResult res = diploid::simulate(
      p, init, stop, common.seed, record_mode(common.record), o.dt);

  std::ofstream csv(dir / "trajectory.csv", std::ios::binary);
  if (!csv) throw std::runtime_error("cannot open output file: trajectory.csv");
  diploid::write_trajectory_csv(csv, res.trajectory, diploid::config_echo(p, a));

  nlohmann::json j = res.record;
  j["config"] = config_json(p, a);
  write_json_file(dir / "stopping.json", j);

  std::cout << "simulate: reason=" << res.record.reason
            << " t_end=" << diploid::format_double(res.record.t_end)
            << " final=(" << res.final_state.aa << ',' << res.final_state.aA
            << ',' << res.final_state.AA << ")\n";
}

// --- ode --------------------------------------------------------------

struct OdeOpts {
  std::optional<double> init_x;  // default nbar_a - delta_fix
  std::optional<double> init_y;  // default delta_fix
  double init_z = 0;
  double t_end = 500;
  double dt = 0.5;
  bool codominant = false;
  std::optional<double> delta_het;  // default delta/2 when codominant
};

void run_ode(const CommonOpts& common, const OdeOpts& o) {
  const auto [p, a] = resolve(common);
  const fs::path dir = prepare_out(common);
  const diploid::Derived d = diploid::derived(p, a);

  const diploid::Vec3 init{o.init_x ? *o.init_x : d.nbar_a - a.delta_fix,
                           o.init_y ? *o.init_y : a.delta_fix, o.init_z};
  const double het = o.codominant
                         ? (o.delta_het ? *o.delta_het : p.delta / 2)
                         : 0.0;
  const diploid::OdeSolution sol =
      diploid::integrate(p, init, o.t_end, 1e-9, 1e-12, het);

  std::ofstream csv(dir / "ode.csv", std::ios::binary);
  if (!csv) throw std::runtime_error("cannot open output file: ode.csv");
  diploid::write_ode_csv(csv, sol, o.dt, diploid::config_echo(p, a));

  const auto [fp_aa, fp_AA] = diploid::fixed_points(p);
  nlohmann::json j{{"aa", fp_aa}, {"AA", fp_AA}};
  if (p.D > 0) {
    const diploid::CenterManifold cm = diploid::center_manifold(p);
    j["center_manifold"] = {{"h1", cm.h1},
                            {"h2", cm.h2},
                            {"flow_coeff", cm.flow_coeff}};
  }
  j["config"] = config_json(p, a);
  write_json_file(dir / "fixed_points.json", j);

  const diploid::Vec3 final_state = sol.final_state();
  std::cout << "ode: t_end=" << diploid::format_double(sol.t_end())
            << " final=(" << diploid::format_double(final_state[0]) << ','
            << diploid::format_double(final_state[1]) << ','
            << diploid::format_double(final_state[2]) << ")\n";
}

// --- fixation ---------------------------------------------------------

void run_fixation(const CommonOpts& common) {
  const auto [p, a] = resolve(common);
  const fs::path dir = prepare_out(common);
  const std::int64_t n = common.replicas > 0 ? common.replicas : 10000;

  const diploid::FixationEstimate est =
      diploid::estimate_fixation(p, a, n, common.seed);
  write_json_file(dir / "fixation.json", est);

  std::cout << "fixation: estimate=" << diploid::format_double(est.estimate)
            << " +- " << diploid::format_double(est.std_error)
            << " target=" << diploid::format_double(est.target) << " ("
            << est.successes << "/" << est.replicas << ")\n";
}

// --- survival ---------------------------------------------------------

struct SurvivalOpts {
  std::vector<double> Ks{1000, 10000, 100000};
  std::string level_rule = "floor";
};

void run_survival(const CommonOpts& common, const SurvivalOpts& o) {
  const auto [p, a] = resolve(common);
  const fs::path dir = prepare_out(common);
  const std::int64_t n = common.replicas > 0 ? common.replicas : 50;

  const diploid::SurvivalScalingReport rep = diploid::survival_scaling(
      p, a, o.Ks, n, common.seed,
      diploid::level_rule_from_string(o.level_rule));
  write_json_file(dir / "survival.json", rep);

  std::cout << "survival: rule=" << o.level_rule
            << " slope=" << diploid::format_double(rep.slope)
            << " hit_eps_slope=" << diploid::format_double(rep.hit_eps_slope)
            << "\n";
}

// --- decay ------------------------------------------------------------

struct DecayOpts {
  double horizon = 400;
  double dt = 1;
  double margin = 10;
};

void run_decay(const CommonOpts& common, const DecayOpts& o) {
  const auto [p, a] = resolve(common);
  const fs::path dir = prepare_out(common);

  const diploid::DecayComparison cmp = diploid::decay_comparison(
      p, a, p.K, common.seed, o.horizon, o.dt, o.margin);
  write_json_file(dir / "decay.json", cmp);

  std::ofstream csv(dir / "decay.csv", std::ios::binary);
  if (!csv) throw std::runtime_error("cannot open output file: decay.csv");
  for (const auto& [key, value] : diploid::config_echo(p, a))
    csv << "# " << key << " = " << value << "\n";
  csv << "t,y_stoch,y_ode,lower,upper\n";
  for (std::size_t i = 0; i < cmp.t.size(); ++i) {
    csv << diploid::format_double(cmp.t[i]) << ','
        << diploid::format_double(cmp.y_stoch[i]) << ','
        << diploid::format_double(cmp.y_ode[i]) << ','
        << diploid::format_double(cmp.lower[i]) << ','
        << diploid::format_double(cmp.upper[i]) << '\n';
  }

  std::cout << "decay: frac_in_band=" << diploid::format_double(cmp.frac_in_band)
            << " sup_distance=" << diploid::format_double(cmp.sup_distance)
            << " ode_in_bracket=" << (cmp.ode_in_bracket ? "true" : "false")
            << "\n";
}

// --- ladder -----------------------------------------------------------

struct LadderOpts {
  double C_l = 1;
  double C_u = 1;
};

void run_ladder(const CommonOpts& common, const LadderOpts& o) {
  const auto [p, a] = resolve(common);
  const fs::path dir = prepare_out(common);

  const diploid::LadderSchedule sched =
      diploid::ladder(p, a, p.K, o.C_l, o.C_u);
  write_json_file(dir / "ladder.json", sched);

  std::cout << "ladder: i_max=" << sched.i_max
            << " degenerate=" << (sched.degenerate ? "true" : "false")
            << " levels=" << sched.levels.size() << "\n";
}

// --- chain ------------------------------------------------------------

struct ChainOpts {
  double b = 4;
  double d = 1;
  std::int64_t lo = 0;
  std::int64_t hi = 200;
  std::int64_t n0 = 1;
  double t = 1;
};

void run_chain(const CommonOpts& common, const ChainOpts& o) {
  const fs::path dir = prepare_out(common);
  if (o.b <= 0) throw std::runtime_error("b must be > 0");
  if (o.d < 0) throw std::runtime_error("d must be >= 0");
  if (o.n0 < o.lo || o.n0 > o.hi)
    throw std::runtime_error("n0 must lie in [lo, hi]");

  const double up = o.b / (o.b + o.d);
  diploid::ChainSpec spec;
  spec.lo = o.lo;
  spec.hi = o.hi;
  spec.up_prob = [up](std::int64_t) { return up; };
  const std::vector<double> h = diploid::hitting_probability(spec);
  const double hit_hi = h[static_cast<std::size_t>(o.n0 - o.lo)];

  const diploid::BranchingParams bp{o.b, o.d};
  const double survival = diploid::branching_survival(bp, o.n0);
  const double cdf = o.b == o.d
                         ? std::numeric_limits<double>::quiet_NaN()
                         : diploid::extinction_cdf(bp, o.n0, o.t);

  nlohmann::json j{{"b", o.b},
                   {"d", o.d},
                   {"lo", o.lo},
                   {"hi", o.hi},
                   {"n0", o.n0},
                   {"t", o.t},
                   {"up_prob", up},
                   {"hit_hi_prob", hit_hi},
                   {"survival", survival},
                   {"extinction_cdf_at_t",
                    std::isfinite(cdf) ? nlohmann::json(cdf)
                                       : nlohmann::json(nullptr)}};
  write_json_file(dir / "chain.json", j);

  std::cout << "chain: hit_hi_prob=" << diploid::format_double(hit_hi)
            << " survival=" << diploid::format_double(survival) << "\n";
}

// --- window -----------------------------------------------------------

void run_window(const CommonOpts& common, double threshold) {
  const auto [p, a] = resolve(common);
  const fs::path dir = prepare_out(common);

  const diploid::MutationWindow win =
      diploid::mutation_window(p, a, p.K, p.mu, threshold);
  write_json_file(dir / "window.json", win);

  std::cout << "window: r1=" << diploid::format_double(win.r1)
            << " r2=" << diploid::format_double(win.r2)
            << " ok=" << (win.window_ok ? "true" : "false") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "exact stochastic simulation and numerical analysis of a "
      "three-genotype diploid birth-death model with competition"};
  app.require_subcommand(1);

  CommonOpts common;

  auto* sim_cmd = app.add_subcommand(
      "simulate", "run one exact stochastic path with a stopping record");
  SimulateOpts sim_opts;
  add_common(sim_cmd, common);
  sim_cmd->add_option("--init-aa", sim_opts.init_aa,
                      "initial aa count (default: resident equilibrium)");
  sim_cmd->add_option("--init-aA", sim_opts.init_aA, "initial aA count")
      ->capture_default_str();
  sim_cmd->add_option("--init-AA", sim_opts.init_AA, "initial AA count")
      ->capture_default_str();
  sim_cmd->add_option("--dt", sim_opts.dt, "sampling interval")
      ->capture_default_str();
  sim_cmd->callback([&] { run_simulate(common, sim_opts); });

  auto* ode_cmd = app.add_subcommand(
      "ode", "integrate the density dynamics and report fixed points");
  OdeOpts ode_opts;
  add_common(ode_cmd, common);
  ode_cmd->add_option("--init-x", ode_opts.init_x,
                      "initial aa density (default: nbar_a - delta_fix)");
  ode_cmd->add_option("--init-y", ode_opts.init_y,
                      "initial aA density (default: delta_fix)");
  ode_cmd->add_option("--init-z", ode_opts.init_z, "initial AA density")
      ->capture_default_str();
  ode_cmd->add_option("--t-end", ode_opts.t_end, "integration end time")
      ->capture_default_str();
  ode_cmd->add_option("--dt", ode_opts.dt, "output grid spacing")
      ->capture_default_str();
  ode_cmd->add_flag("--codominant", ode_opts.codominant,
                    "give heterozygotes their own death penalty");
  ode_cmd->add_option("--delta-het", ode_opts.delta_het,
                      "heterozygote death penalty (default: delta/2)");
  ode_cmd->callback([&] { run_ode(common, ode_opts); });

  auto* fix_cmd = app.add_subcommand(
      "fixation", "estimate the mutant fixation probability");
  add_common(fix_cmd, common);
  fix_cmd->callback([&] { run_fixation(common); });

  auto* sur_cmd = app.add_subcommand(
      "survival", "survival-window scaling across carrying capacities");
  SurvivalOpts sur_opts;
  add_common(sur_cmd, common);
  sur_cmd->add_option("--Ks", sur_opts.Ks, "carrying capacities")
      ->delimiter(',');
  sur_cmd->add_option("--level-rule", sur_opts.level_rule,
                      "lower level rule")
      ->check(CLI::IsMember({"floor", "eps-scaled"}))
      ->capture_default_str();
  sur_cmd->callback([&] { run_survival(common, sur_opts); });

  auto* dec_cmd = app.add_subcommand(
      "decay", "compare one conditioned path with the decay bracket");
  DecayOpts dec_opts;
  add_common(dec_cmd, common);
  dec_cmd->add_option("--horizon", dec_opts.horizon,
                      "comparison window after the eps hit")
      ->capture_default_str();
  dec_cmd->add_option("--dt", dec_opts.dt, "sampling interval")
      ->capture_default_str();
  dec_cmd->add_option("--margin", dec_opts.margin,
                      "band widening in units of K^(-1/2)")
      ->capture_default_str();
  dec_cmd->callback([&] { run_decay(common, dec_opts); });

  auto* lad_cmd = app.add_subcommand(
      "ladder", "geometric level ladder for the heterozygote decay");
  LadderOpts lad_opts;
  add_common(lad_cmd, common);
  lad_cmd->add_option("--Cl", lad_opts.C_l, "lower rung constant")
      ->capture_default_str();
  lad_cmd->add_option("--Cu", lad_opts.C_u, "upper rung constant")
      ->capture_default_str();
  lad_cmd->callback([&] { run_ladder(common, lad_opts); });

  auto* chn_cmd = app.add_subcommand(
      "chain", "birth-death chain hitting and extinction quantities");
  ChainOpts chn_opts;
  add_common(chn_cmd, common);
  chn_cmd->add_option("--b", chn_opts.b, "per-individual birth rate")
      ->capture_default_str();
  chn_cmd->add_option("--d", chn_opts.d, "per-individual death rate")
      ->capture_default_str();
  chn_cmd->add_option("--lo", chn_opts.lo, "absorbing lower state")
      ->capture_default_str();
  chn_cmd->add_option("--hi", chn_opts.hi, "absorbing upper state")
      ->capture_default_str();
  chn_cmd->add_option("--n0", chn_opts.n0, "start state")
      ->capture_default_str();
  chn_cmd->add_option("--t", chn_opts.t, "extinction CDF evaluation time")
      ->capture_default_str();
  chn_cmd->callback([&] { run_chain(common, chn_opts); });

  auto* win_cmd = app.add_subcommand(
      "window", "mutation-rate window diagnostics for the configured K, mu");
  double win_threshold = 0.1;
  add_common(win_cmd, common);
  win_cmd->add_option("--threshold", win_threshold,
                      "ratio threshold for the window test")
      ->capture_default_str();
  win_cmd->callback([&] { run_window(common, win_threshold); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#ifndef DIPLOID_EXPERIMENTS_HPP
#define DIPLOID_EXPERIMENTS_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "diploid/params.hpp"
#include "diploid/ssa.hpp"

namespace diploid {

inline constexpr double experiments_nan =
    std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------------------
// Fixation probability of a single aA mutant in an aa resident population.

struct FixationEstimate {
  std::int64_t replicas = 0;
  std::int64_t successes = 0;  // mutant alleles reached delta_fix * K
  double estimate = 0;
  double std_error = 0;  // sqrt(p(1-p)/n); 0 for a single replica
  double target = 0;     // delta / f

  ModelParams params;
  AnalysisParams analysis;
  std::uint64_t base_seed = 0;
};

// Each replica starts from (round(nbar_a*K), 1, 0) and runs until the
// mutant allele count reaches delta_fix*K ("success") or drops to zero.
// Requires mu = 0: the branching heuristic behind the delta/f target has
// no mutation inflow.
FixationEstimate estimate_fixation(const ModelParams& p,
                                   const AnalysisParams& a,
                                   std::int64_t replicas,
                                   std::uint64_t base_seed,
                                   Execution exec = Execution::openmp);

// ---------------------------------------------------------------------------
// Scaling of the heterozygote survival window with K.

// Which lower level pairs with eps to bound the survival window
// tau_sur = tau_hit(level) - tau_hit(eps):
//   floor      level = K^(alpha - 1/4), the decay ladder's terminal level
//              itself.  At desk-size K this exceeds eps, the level fires
//              first and every tau_sur is negative; kept because it is the
//              stated rule for the scaling target.
//   eps_scaled level = eps * K^(alpha - 1/4) < eps, which preserves the
//              K-exponent but starts the window at the eps-crossing;
//              usable as a scaling diagnostic at reachable K.
enum class LevelRule { floor, eps_scaled };

struct SurvivalPoint {
  double K = 0;
  double level = 0;  // the K-dependent hit level paired with eps
  std::int64_t attempts = 0;
  std::int64_t conditioned = 0;  // runs where the mutant fixed
  std::int64_t flagged = 0;      // a-allele already extinct at the last hit
  double fixing_fraction = 0;
  double fixing_std_error = 0;
  double median_tau_sur = experiments_nan;
  double iqr_tau_sur = experiments_nan;
  double median_tau_hit_eps = experiments_nan;
  bool unreliable = false;  // fewer than 10 conditioned replicas
};

struct SurvivalScalingReport {
  std::vector<SurvivalPoint> per_k;

  // log(median tau_sur) ~ log K, over Ks with positive median and at least
  // three such points; NaN otherwise.
  double slope = experiments_nan;
  double slope_stderr = experiments_nan;
  double intercept = experiments_nan;

  // median tau_hit(eps) ~ ln K (invasion-time diagnostic).
  double hit_eps_slope = experiments_nan;
  double hit_eps_intercept = experiments_nan;
  double hit_eps_r2 = experiments_nan;

  LevelRule rule = LevelRule::floor;
  std::int64_t replicas_per_k = 0;
  ModelParams params;
  AnalysisParams analysis;
  std::uint64_t base_seed = 0;
};

// For each K: run invasion replicas from (round(nbar_a*K), 1, 0), keep the
// ones where the mutant reaches delta_fix*K (the rest count as attempts
// only), and record the hit times of n_aA at eps and at the rule's level.
// Medians are taken over all conditioned replicas, flagged or not.
SurvivalScalingReport survival_scaling(const ModelParams& p,
                                       const AnalysisParams& a,
                                       const std::vector<double>& Ks,
                                       std::int64_t replicas_per_k,
                                       std::uint64_t base_seed,
                                       LevelRule rule = LevelRule::floor,
                                       Execution exec = Execution::openmp);

// ---------------------------------------------------------------------------
// One conditioned stochastic path against the deterministic decay bracket.

struct DecayComparison {
  double K = 0;
  double margin = 10;   // band widening in units of K^{-1/2}
  double dt = 1;        // sampling interval
  double horizon = 400; // comparison window after the eps hit
  std::int64_t attempts = 0;
  double tau_eps = experiments_nan;  // absolute time of the eps hit
  double eps_realized = 0;           // n_aA density at the matched state

  // Aligned series on the restarted clock (t = 0 at the eps hit).
  std::vector<double> t;
  std::vector<double> y_stoch;  // heterozygote density of the SSA path
  std::vector<double> y_ode;    // same component of the matched ODE run
  std::vector<double> lower, upper;  // decay bracket anchored at eps_realized

  double frac_in_band = 0;   // y_stoch within bracket +- margin*K^{-1/2}
  double sup_distance = 0;   // sup over t <= min(20, horizon) of the
                             // max-component density distance SSA vs ODE
  bool ode_in_bracket = true;

  ModelParams params;
  AnalysisParams analysis;
  std::uint64_t seed = 0;
};

// Conditions an invasion run on fixation, lets it sweep until n_aA first
// drops to eps, then compares the continued stochastic path with the ODE
// started from the identical state, on a shared sampling grid.
DecayComparison decay_comparison(const ModelParams& p, const AnalysisParams& a,
                                 double K, std::uint64_t seed,
                                 double horizon = 400, double dt = 1,
                                 double margin = 10);

// ---------------------------------------------------------------------------
// Geometric level ladder for the heterozygote decay.

struct LadderSchedule {
  double K = 0;
  double x = 0;              // contraction factor sqrt((f+theta)/(f+delta))
  std::int64_t i_max = 0;    // floor(-ln(eps*K^(1/4-alpha)) / ln x)
  bool degenerate = false;   // i_max < 0: no levels fit above the floor
  double level_floor = 0;    // K^(alpha - 1/4)
  std::vector<double> levels;  // x^i * eps for i = 0..i_max
  std::vector<std::pair<double, double>> rung_bracket;  // [C_l, C_u]/(x^i eps)
  double total_lower = 0;  // (C x/(1-x)) (K^(1/4-alpha) - 1/eps), C = C_l
  double total_upper = 0;  // same with C_u
  double C_l = 1, C_u = 1;

  ModelParams params;
  AnalysisParams analysis;
};

LadderSchedule ladder(const ModelParams& p, const AnalysisParams& a, double K,
                      double C_l = 1, double C_u = 1);

// ---------------------------------------------------------------------------
// Mutation-rate window ln K << 1/(K mu) << K^(1/4-alpha).

struct MutationWindow {
  double K = 0;
  double mu = 0;
  double r1 = 0;  // ln K / (1/(K mu)):   << 1 means the left side holds
  double r2 = 0;  // (1/(K mu)) / K^(1/4-alpha): << 1 means the right side
  double threshold = 0.1;
  bool window_ok = false;  // both ratios below the threshold
  bool vacuous = false;    // mu = 0
  double t_first = 0;      // expected first-mutation time 1/(f nbar_A K mu)
  std::string note;

  ModelParams params;
  AnalysisParams analysis;
};

MutationWindow mutation_window(const ModelParams& p, const AnalysisParams& a,
                               double K, double mu, double threshold = 0.1);

// ---------------------------------------------------------------------------
// Small shared statistics helpers (exposed for tests).

double quantile(std::vector<double> v, double q);  // linear interpolation

struct LinFit {
  double slope = experiments_nan;
  double intercept = experiments_nan;
  double r2 = experiments_nan;
  double slope_stderr = experiments_nan;
};
LinFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace diploid

#endif

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "diploid/experiments.hpp"
#include "diploid/params.hpp"

using namespace diploid;

TEST_CASE("quantile interpolates linearly") {
  CHECK(std::isnan(quantile({}, 0.5)));
  CHECK(quantile({7}, 0.5) == 7.0);
  CHECK(quantile({5, 1, 3, 2, 4}, 0.5) == 3.0);
  CHECK(quantile({5, 1, 3, 2, 4}, 0.0) == 1.0);
  CHECK(quantile({5, 1, 3, 2, 4}, 1.0) == 5.0);
  CHECK(quantile({1, 2, 3, 4, 5}, 0.25) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(quantile({1, 2}, 0.75) == doctest::Approx(1.75).epsilon(1e-15));
}

TEST_CASE("line fitting recovers exact lines and flags degenerate input") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(2 * v + 1);
  const LinFit fit = fit_line(x, y);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.slope_stderr == doctest::Approx(0.0).scale(1).epsilon(1e-10));

  CHECK(std::isnan(fit_line({1}, {2}).slope));
  CHECK(std::isnan(fit_line({1, 1, 1}, {1, 2, 3}).slope));  // vertical

  const LinFit noisy = fit_line({0, 1, 2, 3}, {0, 1.2, 1.7, 3.1});
  CHECK(noisy.r2 < 1.0);
  CHECK(noisy.r2 > 0.9);
  CHECK(noisy.slope_stderr > 0);
}

TEST_CASE("fixation estimate approaches delta / f") {
  ModelParams p;
  p.K = 300;
  AnalysisParams a;
  const FixationEstimate est = estimate_fixation(p, a, 3000, 9001);

  CHECK(est.replicas == 3000);
  CHECK(est.target == doctest::Approx(0.075).epsilon(1e-15));
  CHECK(est.estimate ==
        doctest::Approx(est.successes / 3000.0).epsilon(1e-15));
  CHECK(est.std_error > 0);
  // The branching approximation carries O(1/K) bias; four standard errors
  // plus a small absolute allowance keeps the check sharp but stable.
  CHECK(std::abs(est.estimate - est.target) < 4 * est.std_error + 0.01);
  CHECK(est.base_seed == 9001);
  CHECK(est.params.K == 300);
}

TEST_CASE("fixation estimate is reproducible and validates its input") {
  ModelParams p;
  p.K = 150;
  AnalysisParams a;
  const FixationEstimate e1 = estimate_fixation(p, a, 400, 7);
  const FixationEstimate e2 = estimate_fixation(p, a, 400, 7);
  CHECK(e1.successes == e2.successes);
  CHECK(e1.estimate == e2.estimate);

  const FixationEstimate serial =
      estimate_fixation(p, a, 400, 7, Execution::serial);
  CHECK(serial.successes == e1.successes);

  ModelParams bad = p;
  bad.mu = 1e-4;
  CHECK_THROWS_WITH_AS(estimate_fixation(bad, a, 10, 1),
                       "fixation experiment requires mu = 0",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(estimate_fixation(p, a, 0, 1),
                       "replicas must be >= 1", std::invalid_argument);
}

TEST_CASE("survival scaling, floor rule: conditioning matches fixation") {
  // With the floor level K^(alpha-1/4) >= delta_fix at this K, the
  // level fires the instant the arming threshold does, so conditioned runs
  // cost no more than fixation runs and the conditioned fraction is an
  // independent estimate of the fixation probability.
  ModelParams p;
  AnalysisParams a;
  const double K = 200;
  const SurvivalScalingReport rep =
      survival_scaling(p, a, {K}, 30, 4321, LevelRule::floor);

  REQUIRE(rep.per_k.size() == 1);
  const SurvivalPoint& pt = rep.per_k[0];
  CHECK(pt.K == K);
  CHECK(pt.level == doctest::Approx(std::pow(K, 0.05 - 0.25)).epsilon(1e-14));
  CHECK(pt.conditioned >= 30);
  CHECK(pt.attempts > pt.conditioned);
  CHECK(pt.fixing_fraction ==
        doctest::Approx(static_cast<double>(pt.conditioned) / pt.attempts)
            .epsilon(1e-15));
  CHECK(!pt.unreliable);

  ModelParams pf;
  pf.K = K;
  const FixationEstimate est = estimate_fixation(pf, a, 3000, 999);
  const double se = std::hypot(pt.fixing_std_error, est.std_error);
  CHECK(std::abs(pt.fixing_fraction - est.estimate) < 3 * se);

  // The level fires at the arming instant, so the survival window is the
  // (negative) gap back to the earlier eps hit.
  CHECK(pt.median_tau_sur <= 0);
}

TEST_CASE("survival scaling, eps-scaled rule: windows are nonnegative") {
  ModelParams p;
  AnalysisParams a;
  const SurvivalScalingReport rep =
      survival_scaling(p, a, {150}, 5, 777, LevelRule::eps_scaled);

  REQUIRE(rep.per_k.size() == 1);
  const SurvivalPoint& pt = rep.per_k[0];
  CHECK(pt.level ==
        doctest::Approx(a.eps * std::pow(150.0, -0.2)).epsilon(1e-14));
  CHECK(pt.conditioned >= 5);
  CHECK(pt.unreliable);  // fewer than 10 conditioned replicas requested
  CHECK(pt.median_tau_sur >= 0);
  CHECK(std::isfinite(pt.median_tau_sur));
  CHECK(pt.median_tau_hit_eps > 0);
  CHECK(pt.iqr_tau_sur >= 0);
  CHECK(rep.rule == LevelRule::eps_scaled);

  // One K: no power-law fit is possible.
  CHECK(std::isnan(rep.slope));
}

TEST_CASE("survival scaling validates its input") {
  ModelParams p;
  AnalysisParams a;
  CHECK_THROWS_WITH_AS(survival_scaling(p, a, {}, 5, 1),
                       "Ks must be nonempty", std::invalid_argument);
  CHECK_THROWS_WITH_AS(survival_scaling(p, a, {1000}, 0, 1),
                       "replicas_per_k must be >= 1", std::invalid_argument);
  CHECK_THROWS_WITH_AS(survival_scaling(p, a, {50}, 5, 1),
                       "each K must be >= 100", std::invalid_argument);
}

TEST_CASE("decay comparison on a small population") {
  ModelParams p;
  AnalysisParams a;
  const DecayComparison cmp = decay_comparison(p, a, 1000, 2718, 10, 1, 10);

  CHECK(cmp.K == 1000);
  CHECK(cmp.attempts >= 1);
  CHECK(cmp.tau_eps > 0);
  CHECK(cmp.eps_realized > 0.02);
  CHECK(cmp.eps_realized <= a.eps + 1e-12);

  REQUIRE(cmp.t.size() == 11);
  REQUIRE(cmp.y_stoch.size() == 11);
  REQUIRE(cmp.y_ode.size() == 11);
  REQUIRE(cmp.lower.size() == 11);
  REQUIRE(cmp.upper.size() == 11);

  CHECK(cmp.t.front() == 0.0);
  CHECK(cmp.t.back() == 10.0);

  // Both series and the bracket share the matched state at t = 0.
  CHECK(cmp.y_stoch[0] == doctest::Approx(cmp.eps_realized).epsilon(1e-12));
  CHECK(cmp.y_ode[0] == doctest::Approx(cmp.eps_realized).epsilon(1e-9));
  CHECK(cmp.lower[0] == doctest::Approx(cmp.eps_realized).epsilon(1e-12));
  CHECK(cmp.upper[0] == doctest::Approx(cmp.eps_realized).epsilon(1e-12));

  // The strict-containment flag is an asymptotic, on-manifold property; at
  // K = 10^3 the matched start is off the slow manifold by O(K^{-1/2})
  // fluctuations while the band near t = 0 is only O(eps^2 t) wide, so the
  // flag is typically false here.  The ODE must still track the envelope to
  // within the matched-state fluctuation scale.
  const double slack = 1.0 / std::sqrt(cmp.K);
  for (std::size_t i = 0; i < cmp.t.size(); ++i) {
    CHECK(cmp.lower[i] <= cmp.upper[i] + 1e-15);
    CHECK(cmp.y_stoch[i] >= 0);
    CHECK(cmp.y_ode[i] >= cmp.lower[i] - slack);
    CHECK(cmp.y_ode[i] <= cmp.upper[i] + slack);
  }
  CHECK(cmp.frac_in_band >= 0);
  CHECK(cmp.frac_in_band <= 1);
  CHECK(cmp.sup_distance >= 0);
  CHECK(cmp.sup_distance < 0.5);
  CHECK(cmp.seed == 2718);

  CHECK_THROWS_WITH_AS(decay_comparison(p, a, 500, 1), "K must be >= 1000",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(decay_comparison(p, a, 1000, 1, -1),
                       "horizon must be positive", std::invalid_argument);
  CHECK_THROWS_WITH_AS(decay_comparison(p, a, 1000, 1, 10, 0),
                       "dt must be positive", std::invalid_argument);
  CHECK_THROWS_WITH_AS(decay_comparison(p, a, 1000, 1, 10, 1, -2),
                       "margin must be >= 0", std::invalid_argument);
}

TEST_CASE("ladder: degenerate at K = 10^6, proper at K = 10^8") {
  ModelParams p;
  AnalysisParams a;

  const LadderSchedule small = ladder(p, a, 1e6);
  CHECK(small.i_max == -20);
  CHECK(small.degenerate);
  CHECK(small.levels.empty());
  CHECK(small.level_floor ==
        doctest::Approx(std::pow(1e6, -0.2)).epsilon(1e-14));

  const LadderSchedule big = ladder(p, a, 1e8);
  CHECK(big.i_max == 58);
  CHECK(!big.degenerate);
  REQUIRE(big.levels.size() == 59);
  CHECK(big.x == doctest::Approx(0.988303691203524).epsilon(1e-14));
  CHECK(big.levels.front() == doctest::Approx(a.eps).epsilon(1e-14));

  // Levels are geometric, decreasing, and stop exactly at the floor.
  for (std::size_t i = 0; i < big.levels.size(); ++i) {
    CHECK(big.levels[i] ==
          doctest::Approx(a.eps * std::pow(big.x, double(i))).epsilon(1e-12));
    if (i > 0) CHECK(big.levels[i] < big.levels[i - 1]);
    CHECK(big.levels[i] >= big.level_floor);
  }
  CHECK(big.levels.back() * big.x < big.level_floor);

  // Rung brackets are C / level.
  for (std::size_t i = 0; i < big.levels.size(); ++i) {
    CHECK(big.rung_bracket[i].first ==
          doctest::Approx(1.0 / big.levels[i]).epsilon(1e-12));
    CHECK(big.rung_bracket[i].second ==
          doctest::Approx(1.0 / big.levels[i]).epsilon(1e-12));
  }

  // The actual rung sum is pinched between the closed form and the same
  // expression with one extra factor 1/x (the floor can only drop the
  // exponent by less than one rung).
  double sum = 0;
  for (const auto& [lo, hi] : big.rung_bracket) sum += lo;
  const double span = std::pow(1e8, 0.2) - 1 / a.eps;
  const double closed = big.x / (1 - big.x) * span;
  const double slack = big.x / (1 - big.x) * (std::pow(1e8, 0.2) / big.x - 1 / a.eps);
  CHECK(big.total_lower == doctest::Approx(closed).epsilon(1e-12));
  CHECK(sum >= closed);
  CHECK(sum <= slack);

  // Constants scale the brackets and totals linearly.
  const LadderSchedule scaled = ladder(p, a, 1e8, 0.5, 2.0);
  CHECK(scaled.rung_bracket[3].first ==
        doctest::Approx(0.5 / scaled.levels[3]).epsilon(1e-12));
  CHECK(scaled.rung_bracket[3].second ==
        doctest::Approx(2.0 / scaled.levels[3]).epsilon(1e-12));
  CHECK(scaled.total_upper ==
        doctest::Approx(4 * scaled.total_lower).epsilon(1e-12));

  CHECK_THROWS_WITH_AS(ladder(p, a, 1e8, 0.0, 1.0),
                       "rung constants must be positive",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(ladder(p, a, 1e8, 2.0, 1.0), "C_l must be <= C_u",
                       std::invalid_argument);
}

TEST_CASE("mutation window ratios") {
  ModelParams p;
  AnalysisParams a;

  // mu = 1/(K ln K) sits exactly on the left edge: r1 = 1.
  {
    const double K = 1e6;
    const double mu = 1 / (K * std::log(K));
    const MutationWindow win = mutation_window(p, a, K, mu);
    CHECK(win.r1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(!win.window_ok);
    CHECK(!win.vacuous);
  }

  // mu = K^(-9/8) at K = 10^6: independently computed ratios.
  {
    const double K = 1e6;
    const MutationWindow win = mutation_window(p, a, K, std::pow(K, -1.125));
    CHECK(win.r1 == doctest::Approx(2.4567837964403214).epsilon(1e-12));
    CHECK(win.r2 == doctest::Approx(0.35481338923357547).epsilon(1e-12));
    CHECK(!win.window_ok);
  }

  // Same exponent at K = 10^4.
  {
    const double K = 1e4;
    const MutationWindow win = mutation_window(p, a, K, std::pow(K, -1.125));
    CHECK(win.r1 == doctest::Approx(2.9125653600847206).epsilon(1e-12));
    CHECK(win.r2 == doctest::Approx(0.5011872336272721).epsilon(1e-12));
    CHECK(!win.window_ok);
  }

  // A genuinely open window needs an astronomically large K.
  {
    const double K = 1e20;
    const double mu = 1 / (600 * K);
    const MutationWindow win = mutation_window(p, a, K, mu);
    CHECK(win.r1 == doctest::Approx(0.07675283643313487).epsilon(1e-12));
    CHECK(win.r2 == doctest::Approx(0.06).epsilon(1e-12));
    CHECK(win.window_ok);
    CHECK(win.t_first == doctest::Approx(50.0).epsilon(1e-12));
  }

  // mu = 0 is vacuous.
  {
    const MutationWindow win = mutation_window(p, a, 1e6, 0.0);
    CHECK(win.vacuous);
    CHECK(win.r1 == 0.0);
    CHECK(std::isinf(win.r2));
    CHECK(!win.window_ok);
    CHECK(std::isinf(win.t_first));
    CHECK(!win.note.empty());
  }

  CHECK_THROWS_WITH_AS(mutation_window(p, a, 1e6, 1e-7, 0.0),
                       "threshold must be positive", std::invalid_argument);
}

#include "diploid/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

#include "diploid/ode.hpp"

namespace diploid {

namespace {

constexpr double nan_ = experiments_nan;

// Seed for sub-stream idx of a batch rooted at base; matches the stream
// replica_stream(base, idx) would produce, but usable through simulate().
std::uint64_t stream_seed(std::uint64_t base, std::uint64_t idx) {
  return mix64(base + 0x9e3779b97f4a7c15ULL * (idx + 1));
}

PopCount invasion_init(const ModelParams& p) {
  const double nbar_a = (p.f - p.D - p.delta) / p.c;
  return {std::llround(nbar_a * p.K), 1, 0};
}

double binom_se(double fraction, std::int64_t n) {
  return n > 0 ? std::sqrt(fraction * (1 - fraction) / n) : 0.0;
}

}  // namespace

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return nan_;
  std::sort(v.begin(), v.end());
  q = std::clamp(q, 0.0, 1.0);
  const double pos = q * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = pos - lo;
  return v[lo] * (1 - frac) + v[lo + 1] * frac;
}

LinFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LinFit fit;
  if (x.size() != y.size() || x.size() < 2) return fit;
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r2 = syy > 0 ? 1 - ss_res / syy : (ss_res == 0 ? 1.0 : nan_);
  if (x.size() > 2) fit.slope_stderr = std::sqrt(ss_res / (n - 2) / sxx);
  return fit;
}

FixationEstimate estimate_fixation(const ModelParams& p,
                                   const AnalysisParams& a,
                                   std::int64_t replicas,
                                   std::uint64_t base_seed, Execution exec) {
  validate(p, a);
  if (p.mu != 0)
    throw std::invalid_argument("fixation experiment requires mu = 0");
  if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");

  StopSpec stop;
  stop.delta_mut = a.delta_fix;
  stop.stop_at_delta_mut = true;
  stop.stop_at_mutant_extinction = true;

  const auto results = run_replicas(p, invasion_init(p), stop, base_seed,
                                    replicas, RecordMode::none, exec);

  FixationEstimate est;
  est.replicas = replicas;
  for (const auto& r : results)
    if (r.record.reason == "mutant-delta") ++est.successes;
  est.estimate = static_cast<double>(est.successes) / replicas;
  est.std_error = binom_se(est.estimate, replicas);
  est.target = p.delta / p.f;
  est.params = p;
  est.analysis = a;
  est.base_seed = base_seed;
  return est;
}

namespace {

// Runs invasion attempts [first, first+count) for the survival experiment
// and appends the results (indexed by attempt) to out.
void run_attempt_batch(const ModelParams& pk, const PopCount& init,
                       const StopSpec& stop, std::uint64_t lane_seed,
                       std::int64_t first, std::int64_t count,
                       Execution exec, std::vector<SimResult>& out) {
  const std::size_t base = out.size();
  out.resize(base + count);
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (exec == Execution::openmp)
  for (std::int64_t j = 0; j < count; ++j) {
    try {
      SimResult r = simulate(pk, init, stop,
                             stream_seed(lane_seed, first + j),
                             RecordMode::none);
      r.record.replica = first + j;
      out[base + j] = std::move(r);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace

SurvivalScalingReport survival_scaling(const ModelParams& p,
                                       const AnalysisParams& a,
                                       const std::vector<double>& Ks,
                                       std::int64_t replicas_per_k,
                                       std::uint64_t base_seed,
                                       LevelRule rule, Execution exec) {
  if (Ks.empty()) throw std::invalid_argument("Ks must be nonempty");
  if (replicas_per_k < 1)
    throw std::invalid_argument("replicas_per_k must be >= 1");

  SurvivalScalingReport rep;
  rep.rule = rule;
  rep.replicas_per_k = replicas_per_k;
  rep.params = p;
  rep.analysis = a;
  rep.base_seed = base_seed;

  for (std::size_t ki = 0; ki < Ks.size(); ++ki) {
    ModelParams pk = p;
    pk.K = Ks[ki];
    if (!(pk.K >= 100)) throw std::invalid_argument("each K must be >= 100");
    validate(pk, a);

    SurvivalPoint pt;
    pt.K = pk.K;
    pt.level = std::pow(pk.K, a.alpha - 0.25);
    if (rule == LevelRule::eps_scaled) pt.level *= a.eps;

    StopSpec stop;
    stop.delta_mut = a.delta_fix;
    stop.stop_at_mutant_extinction = true;
    stop.hit_levels = {pt.level, a.eps};
    stop.stop_when_hits_complete = true;

    const PopCount init = invasion_init(pk);
    const std::uint64_t lane_seed = stream_seed(base_seed, ki);
    const std::int64_t cap =
        std::max<std::int64_t>(replicas_per_k * 200, 1000);
    // Size the first batch by the branching fixation probability; further
    // batches top up the shortfall.
    const double pfix_guess = std::max(p.delta / p.f, 0.01);

    // Every executed attempt is scanned, so the fixing fraction stays an
    // unbiased fixation estimate; extra successes in the last batch simply
    // add data.
    std::vector<double> tau_sur, tau_eps;
    while (pt.conditioned < replicas_per_k && pt.attempts < cap) {
      const std::int64_t want = replicas_per_k - pt.conditioned;
      std::int64_t batch = static_cast<std::int64_t>(
          std::ceil(static_cast<double>(want) / pfix_guess * 1.3));
      batch = std::min(std::max<std::int64_t>(batch, want), cap - pt.attempts);
      std::vector<SimResult> results;
      run_attempt_batch(pk, init, stop, lane_seed, pt.attempts, batch, exec,
                        results);
      pt.attempts += batch;
      for (const SimResult& r : results) {
        if (r.record.reason != "hits-complete") continue;
        ++pt.conditioned;
        const double t_eps = r.record.hit_time(a.eps);
        tau_eps.push_back(t_eps);
        tau_sur.push_back(r.record.hit_time(pt.level) - t_eps);
        if (r.final_state.aa == 0 && r.final_state.aA == 0) ++pt.flagged;
      }
    }

    pt.fixing_fraction =
        pt.attempts > 0
            ? static_cast<double>(pt.conditioned) / pt.attempts
            : 0.0;
    pt.fixing_std_error = binom_se(pt.fixing_fraction, pt.attempts);
    pt.median_tau_sur = quantile(tau_sur, 0.5);
    pt.iqr_tau_sur = quantile(tau_sur, 0.75) - quantile(tau_sur, 0.25);
    pt.median_tau_hit_eps = quantile(tau_eps, 0.5);
    pt.unreliable = pt.conditioned < 10;
    rep.per_k.push_back(pt);
  }

  // Scaling fit: only Ks whose median window is positive can enter the
  // log-log regression, and at least three are needed for a slope.
  std::vector<double> lx, ly, ex, ey;
  for (const auto& pt : rep.per_k) {
    if (pt.median_tau_sur > 0) {
      lx.push_back(std::log(pt.K));
      ly.push_back(std::log(pt.median_tau_sur));
    }
    if (std::isfinite(pt.median_tau_hit_eps)) {
      ex.push_back(std::log(pt.K));
      ey.push_back(pt.median_tau_hit_eps);
    }
  }
  if (lx.size() >= 3) {
    const LinFit f = fit_line(lx, ly);
    rep.slope = f.slope;
    rep.slope_stderr = f.slope_stderr;
    rep.intercept = f.intercept;
  }
  if (ex.size() >= 2) {
    const LinFit f = fit_line(ex, ey);
    rep.hit_eps_slope = f.slope;
    rep.hit_eps_intercept = f.intercept;
    rep.hit_eps_r2 = f.r2;
  }
  return rep;
}

DecayComparison decay_comparison(const ModelParams& p, const AnalysisParams& a,
                                 double K, std::uint64_t seed, double horizon,
                                 double dt, double margin) {
  ModelParams pk = p;
  pk.K = K;
  if (!(pk.K >= 1000)) throw std::invalid_argument("K must be >= 1000");
  validate(pk, a);
  if (!(horizon > 0)) throw std::invalid_argument("horizon must be positive");
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  if (!(margin >= 0)) throw std::invalid_argument("margin must be >= 0");

  DecayComparison cmp;
  cmp.K = pk.K;
  cmp.margin = margin;
  cmp.dt = dt;
  cmp.horizon = horizon;
  cmp.params = p;
  cmp.analysis = a;
  cmp.seed = seed;

  // Condition on fixation, then let the sweep run until n_aA drops to eps.
  StopSpec cond;
  cond.delta_mut = a.delta_fix;
  cond.stop_at_mutant_extinction = true;
  cond.hit_levels = {a.eps};
  cond.stop_when_hits_complete = true;

  const PopCount init = invasion_init(pk);
  constexpr std::int64_t attempt_cap = 100000;
  PopCount matched;
  std::uint64_t phase2_seed = 0;
  bool have_match = false;
  for (std::int64_t i = 0; i < attempt_cap && !have_match; ++i) {
    // Even sub-streams drive the attempts, odd ones the continuation.
    SimResult r = simulate(pk, init, cond, stream_seed(seed, 2 * i),
                           RecordMode::none);
    ++cmp.attempts;
    if (r.record.reason == "hits-complete") {
      matched = r.final_state;
      cmp.tau_eps = r.record.hit_time(a.eps);
      phase2_seed = stream_seed(seed, 2 * i + 1);
      have_match = true;
    }
  }
  if (!have_match)
    throw std::runtime_error(
        "conditioning failed: mutant never fixed within attempt budget");

  cmp.eps_realized = static_cast<double>(matched.aA) / pk.K;

  StopSpec cap;
  cap.t_max = horizon;
  SimResult path = simulate(pk, matched, cap, phase2_seed,
                            RecordMode::sampled, dt);

  const Vec3 y0 = {static_cast<double>(matched.aa) / pk.K,
                   static_cast<double>(matched.aA) / pk.K,
                   static_cast<double>(matched.AA) / pk.K};
  const OdeSolution sol = integrate(pk, y0, horizon);

  const double rho = resolved_rho(pk, a);
  const double band = margin / std::sqrt(pk.K);
  const double sup_window = std::min(20.0, horizon);
  std::int64_t in_band = 0;
  for (const TrajectoryPoint& row : path.trajectory) {
    const DecayBracket br = decay_bounds(pk, cmp.eps_realized, rho, row.t);
    const Vec3 ode = sol.at(row.t);
    const double ys = static_cast<double>(row.n.aA) / pk.K;
    cmp.t.push_back(row.t);
    cmp.y_stoch.push_back(ys);
    cmp.y_ode.push_back(ode[1]);
    cmp.lower.push_back(br.lower);
    cmp.upper.push_back(br.upper);
    if (ys >= br.lower - band && ys <= br.upper + band) ++in_band;
    if (ode[1] < br.lower - 1e-9 || ode[1] > br.upper + 1e-9)
      cmp.ode_in_bracket = false;
    if (row.t <= sup_window) {
      const double dx = std::abs(static_cast<double>(row.n.aa) / pk.K - ode[0]);
      const double dy = std::abs(ys - ode[1]);
      const double dz = std::abs(static_cast<double>(row.n.AA) / pk.K - ode[2]);
      cmp.sup_distance = std::max({cmp.sup_distance, dx, dy, dz});
    }
  }
  cmp.frac_in_band = cmp.t.empty()
                         ? 0.0
                         : static_cast<double>(in_band) / cmp.t.size();
  return cmp;
}

LadderSchedule ladder(const ModelParams& p, const AnalysisParams& a, double K,
                      double C_l, double C_u) {
  ModelParams pk = p;
  pk.K = K;
  validate(pk, a);
  if (!(C_l > 0) || !(C_u > 0))
    throw std::invalid_argument("rung constants must be positive");
  if (C_l > C_u) throw std::invalid_argument("C_l must be <= C_u");

  LadderSchedule lad;
  lad.K = pk.K;
  lad.C_l = C_l;
  lad.C_u = C_u;
  lad.params = p;
  lad.analysis = a;
  lad.x = derived(pk, a).x_ladder;
  lad.level_floor = std::pow(pk.K, a.alpha - 0.25);

  const double k_pow = std::pow(pk.K, 0.25 - a.alpha);
  lad.i_max = static_cast<std::int64_t>(
      std::floor(-std::log(a.eps * k_pow) / std::log(lad.x)));
  lad.degenerate = lad.i_max < 0;
  if (!lad.degenerate) {
    lad.levels.reserve(lad.i_max + 1);
    for (std::int64_t i = 0; i <= lad.i_max; ++i) {
      const double level = a.eps * std::pow(lad.x, static_cast<double>(i));
      lad.levels.push_back(level);
      lad.rung_bracket.emplace_back(C_l / level, C_u / level);
    }
  }
  const double span = k_pow - 1 / a.eps;
  lad.total_lower = C_l * lad.x / (1 - lad.x) * span;
  lad.total_upper = C_u * lad.x / (1 - lad.x) * span;
  return lad;
}

MutationWindow mutation_window(const ModelParams& p, const AnalysisParams& a,
                               double K, double mu, double threshold) {
  ModelParams pk = p;
  pk.K = K;
  pk.mu = mu;
  validate(pk, a);
  if (!(threshold > 0))
    throw std::invalid_argument("threshold must be positive");

  MutationWindow win;
  win.K = K;
  win.mu = mu;
  win.threshold = threshold;
  win.params = p;
  win.analysis = a;

  const double nbar_A = (p.f - p.D) / p.c;
  if (mu == 0) {
    win.vacuous = true;
    win.r1 = 0;
    win.r2 = std::numeric_limits<double>::infinity();
    win.t_first = std::numeric_limits<double>::infinity();
    win.note = "no mutation; window vacuous";
    return win;
  }
  win.r1 = std::log(K) * K * mu;
  win.r2 = (1 / (K * mu)) / std::pow(K, 0.25 - a.alpha);
  win.window_ok = win.r1 < threshold && win.r2 < threshold;
  win.t_first = 1 / (p.f * nbar_A * K * mu);
  return win;
}

}  // namespace diploid

#include "diploid/ssa.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>

namespace diploid {

double StoppingRecord::hit_time(double level) const {
  for (const auto& [lvl, t] : tau_hit)
    if (lvl == level) return t;
  return never;
}

StepResult step(const PopCount& n, const ModelParams& p, Xoshiro256pp& rng) {
  if (n.total() == 0)
    throw std::runtime_error("stepping an extinct population");
  const RateBundle rb = rates(n, p);
  const double total = rb.total();
  StepResult r;
  r.wait = rng.exponential(total);
  EventKind k = select_event(rb, rng.uniform() * total);
  if (is_birth(k) && p.mu > 0 && rng.uniform() < p.mu)
    k = EventKind::mutation_birth;
  r.kind = k;
  r.next = n;
  apply(r.next, k);
  return r;
}

namespace {

void validate_stop(const StopSpec& stop) {
  if (!(stop.t_max > 0))
    throw std::invalid_argument("t_max must be positive");
  if (stop.delta_mut < 0)
    throw std::invalid_argument("delta_mut must be nonnegative");
  if (stop.stop_at_delta_mut && stop.delta_mut == 0)
    throw std::invalid_argument("stop_at_delta_mut requires delta_mut > 0");
  for (double lvl : stop.hit_levels)
    if (!(lvl > 0))
      throw std::invalid_argument("hit levels must be positive");
  if (stop.stop_when_hits_complete && stop.hit_levels.empty())
    throw std::invalid_argument("stop_when_hits_complete requires hit levels");
  const bool terminating =
      std::isfinite(stop.t_max) || stop.stop_at_delta_mut ||
      stop.stop_at_mutant_extinction || stop.stop_when_hits_complete ||
      stop.stop_at_first_mutation || stop.detect_extinction;
  if (!terminating)
    throw std::invalid_argument("no terminating condition enabled");
}

SimResult simulate_with(const ModelParams& p, PopCount n,
                        const StopSpec& stop, Xoshiro256pp rng,
                        RecordMode mode, double sample_dt) {
  validate(p);
  validate_stop(stop);
  if (n.aa < 0 || n.aA < 0 || n.AA < 0)
    throw std::invalid_argument("initial counts must be nonnegative");
  if (n.total() == 0 && !stop.detect_extinction)
    throw std::invalid_argument(
        "empty initial population requires extinction detection");
  if (mode == RecordMode::sampled && !(sample_dt > 0))
    throw std::invalid_argument("sample_dt must be positive");

  // Density thresholds as integer counts.  The 1e-9 fuzz keeps exact
  // products like 0.05 * 10^4 from flickering across the boundary.
  const std::int64_t delta_thresh =
      stop.delta_mut > 0
          ? static_cast<std::int64_t>(std::ceil(stop.delta_mut * p.K - 1e-9))
          : -1;
  std::vector<std::int64_t> hit_thresh(stop.hit_levels.size());
  for (std::size_t i = 0; i < stop.hit_levels.size(); ++i)
    hit_thresh[i] =
        static_cast<std::int64_t>(std::floor(stop.hit_levels[i] * p.K + 1e-9));
  std::vector<char> hit_done(stop.hit_levels.size(), 0);
  std::size_t hits_left = stop.hit_levels.size();

  SimResult out;
  StoppingRecord& rec = out.record;
  bool got_delta = false, got_tau0 = false, got_tau1 = false;

  double t = 0;
  const char* reason = nullptr;

  auto push_row = [&](double tt) {
    if (out.trajectory.empty() || out.trajectory.back().t < tt)
      out.trajectory.push_back({tt, n});
  };

  std::int64_t grid_idx = 0;  // next sampled-mode grid index to emit
  auto flush_grid_before = [&](double tt) {
    for (; grid_idx * sample_dt < tt; ++grid_idx)
      out.trajectory.push_back({grid_idx * sample_dt, n});
  };

  // Record detections at the current state; true if anything fired.
  auto update_trackers = [&](double tt) {
    bool any = false;
    const std::int64_t A = n.mutant_alleles();
    if (!got_delta && delta_thresh >= 0 && A >= delta_thresh) {
      rec.tau_delta_mut = tt;
      got_delta = true;
      any = true;
    }
    if (!got_tau0 && A == 0) {
      rec.tau_0_mut = tt;
      got_tau0 = true;
      any = true;
    }
    if (got_delta && hits_left > 0) {
      for (std::size_t i = 0; i < hit_thresh.size(); ++i)
        if (!hit_done[i] && n.aA <= hit_thresh[i]) {
          hit_done[i] = 1;
          --hits_left;
          rec.tau_hit.emplace_back(stop.hit_levels[i], tt);
          any = true;
        }
    }
    return any;
  };
  auto stop_reason = [&]() -> const char* {
    if (n.total() == 0 && stop.detect_extinction) return "extinct";
    if (stop.stop_when_hits_complete && hits_left == 0) return "hits-complete";
    if (stop.stop_at_delta_mut && got_delta) return "mutant-delta";
    if (stop.stop_at_mutant_extinction && got_tau0) return "mutant-extinct";
    return nullptr;
  };

  // Conditions that already hold at t = 0 are recorded at t = 0.
  if (mode == RecordMode::events) out.trajectory.push_back({0.0, n});
  {
    const bool any = update_trackers(0.0);
    if (mode == RecordMode::stops && any) push_row(0.0);
    reason = stop_reason();
  }

  while (reason == nullptr) {
    const RateBundle rb = rates(n, p);
    const double total_rate = rb.total();
    if (total_rate <= 0) {
      // Extinct with detection disabled: nothing can happen any more.
      if (std::isfinite(stop.t_max)) {
        t = stop.t_max;
        reason = "time-cap";
        break;
      }
      throw std::runtime_error("stepping an extinct population");
    }

    const double wait = rng.exponential(total_rate);
    const double t_next = t + wait;
    if (t_next > stop.t_max) {
      t = stop.t_max;
      reason = "time-cap";
      break;
    }
    EventKind k = select_event(rb, rng.uniform() * total_rate);
    bool mutated = false;
    if (is_birth(k) && p.mu > 0 && rng.uniform() < p.mu) {
      k = EventKind::mutation_birth;
      mutated = true;
    }

    if (mode == RecordMode::sampled) flush_grid_before(t_next);

    t = t_next;
    apply(n, k);
    if (mode == RecordMode::events && k != EventKind::mutation_birth)
      out.trajectory.push_back({t, n});

    bool any = false;
    if (mutated && !got_tau1) {
      rec.tau_1 = t;
      got_tau1 = true;
      any = true;
    }
    any |= update_trackers(t);
    if (mode == RecordMode::stops && any) push_row(t);

    reason = stop_reason();
    if (reason == nullptr && mutated && stop.stop_at_first_mutation)
      reason = "mutation";
  }

  if (mode == RecordMode::sampled) {
    flush_grid_before(t);
    push_row(t);
  } else if (mode == RecordMode::stops) {
    push_row(t);
  }

  rec.t_end = t;
  rec.reason = reason;
  out.final_state = n;
  return out;
}

}  // namespace

SimResult simulate(const ModelParams& p, PopCount init, const StopSpec& stop,
                   std::uint64_t seed, RecordMode mode, double sample_dt) {
  SimResult r =
      simulate_with(p, init, stop, Xoshiro256pp(seed), mode, sample_dt);
  r.record.seed = seed;
  return r;
}

std::vector<SimResult> run_replicas(const ModelParams& p, PopCount init,
                                    const StopSpec& stop,
                                    std::uint64_t base_seed,
                                    std::int64_t count, RecordMode mode,
                                    Execution exec, double sample_dt) {
  if (count < 1) throw std::invalid_argument("replica count must be >= 1");
  std::vector<SimResult> out(count);

  auto one = [&](std::int64_t i) {
    SimResult r = simulate_with(p, init, stop, replica_stream(base_seed, i),
                                mode, sample_dt);
    r.record.seed = base_seed;
    r.record.replica = i;
    out[i] = std::move(r);
  };

  if (exec == Execution::serial) {
    for (std::int64_t i = 0; i < count; ++i) one(i);
    return out;
  }

  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      one(i);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace diploid

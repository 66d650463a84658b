#ifndef DIPLOID_SSA_HPP
#define DIPLOID_SSA_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "diploid/params.hpp"
#include "diploid/population.hpp"
#include "diploid/rng.hpp"

namespace diploid {

enum class EventKind {
  birth_aa,
  birth_aA,
  birth_AA,
  death_aa,
  death_aA,
  death_AA,
  // A birth carrying a mutation at the second locus.  The newborn leaves
  // the three-genotype state space, so counts are unchanged; only the time
  // of the first such birth (tau_1) is of interest.
  mutation_birth,
};

inline bool is_birth(EventKind k) {
  return k == EventKind::birth_aa || k == EventKind::birth_aA ||
         k == EventKind::birth_AA;
}

// Categorical event choice.  u_scaled is uniform on [0, total rate); the
// cumulative walk runs in the fixed order b_aa, b_aA, b_AA, d_aa, d_aA,
// d_AA so that a given random stream always reproduces the same events.
inline EventKind select_event(const RateBundle& r, double u_scaled) {
  double acc = r.b_aa;
  if (u_scaled < acc) return EventKind::birth_aa;
  acc += r.b_aA;
  if (u_scaled < acc) return EventKind::birth_aA;
  acc += r.b_AA;
  if (u_scaled < acc) return EventKind::birth_AA;
  acc += r.d_aa;
  if (u_scaled < acc) return EventKind::death_aa;
  acc += r.d_aA;
  if (u_scaled < acc) return EventKind::death_aA;
  return EventKind::death_AA;
}

inline void apply(PopCount& n, EventKind k) {
  switch (k) {
    case EventKind::birth_aa: ++n.aa; break;
    case EventKind::birth_aA: ++n.aA; break;
    case EventKind::birth_AA: ++n.AA; break;
    case EventKind::death_aa: --n.aa; break;
    case EventKind::death_aA: --n.aA; break;
    case EventKind::death_AA: --n.AA; break;
    case EventKind::mutation_birth: break;
  }
}

struct StepResult {
  double wait = 0;  // exponential waiting time to this event
  EventKind kind = EventKind::birth_aa;
  PopCount next;
};

// One jump of the process: waiting time ~ Exponential(total rate), then a
// categorical event; a birth is re-flagged as mutation_birth with
// probability mu.  Draw order (wait, selection, mutation flag) is part of
// the reproducibility contract.  Throws std::runtime_error on an empty
// population.
StepResult step(const PopCount& n, const ModelParams& p, Xoshiro256pp& rng);

// Which conditions are detected and which of them terminate the run.
// Detected-only conditions are recorded in the StoppingRecord and the run
// continues; at least one terminating condition must be enabled.
struct StopSpec {
  double t_max = std::numeric_limits<double>::infinity();

  // Mutant-allele threshold: tau_delta_mut = first t with
  // 2 N_AA + N_aA >= delta_mut * K.  Zero disables detection.
  double delta_mut = 0;
  bool stop_at_delta_mut = false;

  // tau_0_mut (mutant allele count back to zero) is always detected.
  bool stop_at_mutant_extinction = false;

  // Heterozygote levels eta: tau_eta_hit = first t >= tau_delta_mut with
  // N_aA <= floor(eta * K).  Armed only once tau_delta_mut has fired.
  std::vector<double> hit_levels;
  bool stop_when_hits_complete = false;

  // tau_1 (first mutation birth) is always detected when mu > 0.
  bool stop_at_first_mutation = false;

  // Total extinction terminates when detected.  With detection disabled an
  // extinct population can only coast to a finite t_max.
  bool detect_extinction = true;
};

struct StoppingRecord {
  static constexpr double never = std::numeric_limits<double>::quiet_NaN();

  double tau_delta_mut = never;
  double tau_0_mut = never;
  // (level, time) for each hit level that fired, in firing order.
  std::vector<std::pair<double, double>> tau_hit;
  double tau_1 = never;
  double t_end = 0;
  std::string reason;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> replica;

  // Time recorded for a given hit level, or NaN if it never fired.
  double hit_time(double level) const;
};

enum class RecordMode {
  none,     // stopping record only
  events,   // every count-changing event
  sampled,  // piecewise-constant state at 0, dt, 2dt, ...
  stops,    // state at each time a stopping condition records
};

struct TrajectoryPoint {
  double t = 0;
  PopCount n;
};

struct SimResult {
  StoppingRecord record;
  PopCount final_state;
  std::vector<TrajectoryPoint> trajectory;
};

// Run the process from init until a terminating condition fires.
// Deterministic given (p, init, stop, seed, mode, sample_dt).
// Termination reasons: "mutant-delta", "mutant-extinct", "hits-complete",
// "mutation", "extinct", "time-cap".
SimResult simulate(const ModelParams& p, PopCount init, const StopSpec& stop,
                   std::uint64_t seed, RecordMode mode = RecordMode::stops,
                   double sample_dt = 1.0);

enum class Execution { serial, openmp };

// count independent replicas; replica i draws from the stream derived from
// (base_seed, i) so results do not depend on scheduling or execution
// policy.  The OpenMP policy and the serial one produce identical output.
std::vector<SimResult> run_replicas(const ModelParams& p, PopCount init,
                                    const StopSpec& stop,
                                    std::uint64_t base_seed,
                                    std::int64_t count,
                                    RecordMode mode = RecordMode::stops,
                                    Execution exec = Execution::openmp,
                                    double sample_dt = 1.0);

}  // namespace diploid

#endif

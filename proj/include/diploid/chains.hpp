#ifndef DIPLOID_CHAINS_HPP
#define DIPLOID_CHAINS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "diploid/rng.hpp"

namespace diploid {

// A nearest-neighbour chain on {lo, ..., hi} with state-dependent up-step
// probability p(k).  Both ends absorb unless reflect_at_lo is set, in which
// case the chain is pushed from lo to lo+1 with probability one.
struct ChainSpec {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::function<double(std::int64_t)> up_prob;  // p(k) for lo < k < hi
  bool reflect_at_lo = false;
};

// h(z) = P_z[hit hi before lo] for z = lo..hi, via the equilibrium-potential
// representation
//   h(z) = sum_{n=lo+1}^{z} prod_{k=lo+1}^{n-1} q(k)/p(k)
//        / sum_{n=lo+1}^{hi} prod_{k=lo+1}^{n-1} q(k)/p(k).
// Products are accumulated in log space and the two sums are formed by
// pairwise summation, so strongly drifted chains with hi - lo in the
// millions neither overflow nor lose the small terms.
// With reflect_at_lo the lower boundary cannot absorb and h is identically
// one.  Throws std::invalid_argument if hi <= lo or p(k) leaves (0,1).
std::vector<double> hitting_probability(const ChainSpec& spec);

// Same quantity from the boundary-value problem
//   h(z) = p(z) h(z+1) + q(z) h(z-1),  h(lo)=0 (or reflecting), h(hi)=1,
// solved directly as a tridiagonal linear system.  Kept deliberately
// independent of hitting_probability() so the two can check each other.
// Refuses ranges above 10000 states.
std::vector<double> hitting_oracle(const ChainSpec& spec);

// A linear (density-independent) birth-death process: each individual
// branches at rate b and dies at rate d.
struct BranchingParams {
  double b = 0;
  double d = 0;
};

// Probability that the line of n0 founders never dies out:
// 1 - (d/b)^n0 for b > d, zero otherwise.
double branching_survival(const BranchingParams& bp, std::int64_t n0);

// P_n0[T_0 <= t], the probability the whole family is gone by time t:
//   ( d (1 - e^{-(b-d)t}) / (b - d e^{-(b-d)t}) )^n0.
// Throws std::domain_error for b == d (the formula degenerates).
double extinction_cdf(const BranchingParams& bp, std::int64_t n0, double t);

// One stochastic realisation: did the family founded by n0 individuals die
// out by time t?  Used as a Monte-Carlo check of extinction_cdf.
bool extinct_by(const BranchingParams& bp, std::int64_t n0, double t,
                Xoshiro256pp& rng);

}  // namespace diploid

#endif

#ifndef DIPLOID_POPULATION_HPP
#define DIPLOID_POPULATION_HPP

#include <cstdint>

#include "diploid/params.hpp"

namespace diploid {

// Individual counts per genotype.
struct PopCount {
  std::int64_t aa = 0;
  std::int64_t aA = 0;
  std::int64_t AA = 0;

  std::int64_t total() const { return aa + aA + AA; }
  // Number of A alleles; the "mutant process" coordinate.
  std::int64_t mutant_alleles() const { return 2 * AA + aA; }

  bool operator==(const PopCount&) const = default;
};

// Counts rescaled by carrying capacity.
struct PopDensity {
  double aa = 0, aA = 0, AA = 0;
};

inline PopDensity density(const PopCount& n, const ModelParams& p) {
  return {static_cast<double>(n.aa) / p.K, static_cast<double>(n.aA) / p.K,
          static_cast<double>(n.AA) / p.K};
}

// The six event propensities of the process.
struct RateBundle {
  double b_aa = 0, b_aA = 0, b_AA = 0;
  double d_aa = 0, d_aA = 0, d_AA = 0;

  double total_birth() const { return b_aa + b_aA + b_AA; }
  double total_death() const { return d_aa + d_aA + d_AA; }
  double total() const { return total_birth() + total_death(); }
};

// Birth rates follow Mendelian random mating: with allele-weighted counts
// wa = N_aa + N_aA/2 and wA = N_AA + N_aA/2,
//   b_aa = f * wa^2 / N,   b_aA = 2 f * wa * wA / N,   b_AA = f * wA^2 / N,
// so offspring are Hardy-Weinberg distributed and births total f * N.
// Death rates are D (+delta for aa) plus competition c * N / K per head.
// An empty population returns all zeros (the state is absorbing).
RateBundle rates(const PopCount& n, const ModelParams& p);

// Aggregated rates for the total-mass process Sigma = N/K and the mutant
// allele process A = 2 N_AA + N_aA (allele copies born / dying per time):
//   b_Sigma = f N,  d_Sigma = D N + c N Sigma + delta N_aa,
//   b_A = f A,      d_A     = A (D + c Sigma).
struct SumMutantRates {
  double b_sigma = 0, d_sigma = 0;
  double b_A = 0, d_A = 0;
};
SumMutantRates sum_mutant_rates(const PopCount& n, const ModelParams& p);

// Frequency of the A allele, (N_AA + N_aA/2) / N.  Throws on an empty
// population.
double allele_frequency(const PopCount& n);

}  // namespace diploid

#endif

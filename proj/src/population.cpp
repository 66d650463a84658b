#include "diploid/population.hpp"

#include <stdexcept>

namespace diploid {

RateBundle rates(const PopCount& n, const ModelParams& p) {
  RateBundle r;
  const std::int64_t tot = n.total();
  if (tot == 0) return r;
  const double N = static_cast<double>(tot);
  const double wa = static_cast<double>(n.aa) + 0.5 * static_cast<double>(n.aA);
  const double wA = static_cast<double>(n.AA) + 0.5 * static_cast<double>(n.aA);
  r.b_aa = p.f * wa * wa / N;
  r.b_aA = 2.0 * p.f * wa * wA / N;
  r.b_AA = p.f * wA * wA / N;
  const double crowd = p.D + p.c * (N / p.K);
  r.d_aa = static_cast<double>(n.aa) * (crowd + p.delta);
  r.d_aA = static_cast<double>(n.aA) * crowd;
  r.d_AA = static_cast<double>(n.AA) * crowd;
  return r;
}

SumMutantRates sum_mutant_rates(const PopCount& n, const ModelParams& p) {
  SumMutantRates s;
  const double N = static_cast<double>(n.total());
  const double sigma = N / p.K;
  const double A = static_cast<double>(n.mutant_alleles());
  s.b_sigma = p.f * N;
  s.d_sigma = p.D * N + p.c * N * sigma + p.delta * static_cast<double>(n.aa);
  s.b_A = p.f * A;
  s.d_A = A * (p.D + p.c * sigma);
  return s;
}

double allele_frequency(const PopCount& n) {
  const std::int64_t tot = n.total();
  if (tot == 0)
    throw std::domain_error("allele_frequency undefined for empty population");
  return (static_cast<double>(n.AA) + 0.5 * static_cast<double>(n.aA)) /
         static_cast<double>(tot);
}

}  // namespace diploid

#include "diploid/chains.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace diploid {

namespace {

void check_range(const ChainSpec& spec) {
  if (spec.hi <= spec.lo)
    throw std::invalid_argument("chain range requires hi > lo");
  if (!spec.up_prob) throw std::invalid_argument("up_prob not set");
}

double interior_p(const ChainSpec& spec, std::int64_t k) {
  const double p = spec.up_prob(k);
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("up_prob must lie in (0,1) at k = " +
                                std::to_string(k));
  return p;
}

}  // namespace

std::vector<double> hitting_probability(const ChainSpec& spec) {
  check_range(spec);
  const std::size_t states = static_cast<std::size_t>(spec.hi - spec.lo + 1);
  std::vector<double> h(states);
  if (spec.reflect_at_lo) {
    std::fill(h.begin(), h.end(), 1.0);
    return h;
  }

  // log of prod_{k=lo+1}^{n-1} q(k)/p(k) for n = lo+1 .. hi; first term 1.
  std::vector<double> logpi(states - 1);
  logpi[0] = 0.0;
  for (std::size_t i = 1; i < logpi.size(); ++i) {
    const std::int64_t k = spec.lo + static_cast<std::int64_t>(i);
    const double p = interior_p(spec, k);
    logpi[i] = logpi[i - 1] + std::log1p(-p) - std::log(p);
  }
  const double lmax = *std::max_element(logpi.begin(), logpi.end());
  std::vector<double> terms(logpi.size());
  for (std::size_t i = 0; i < terms.size(); ++i)
    terms[i] = std::exp(logpi[i] - lmax);

  // Compensated running prefix sums: every h(z) is a ratio of positive
  // partial sums whose rounding error stays O(machine eps) independent of
  // the number of states, at linear cost.
  double sum = 0.0, comp = 0.0;
  h[0] = 0.0;
  for (std::size_t z = 1; z < states; ++z) {
    const double y = terms[z - 1] - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    h[z] = sum;
  }
  const double denom = h[states - 1];
  for (std::size_t z = 1; z + 1 < states; ++z) h[z] /= denom;
  h[states - 1] = 1.0;
  return h;
}

std::vector<double> hitting_oracle(const ChainSpec& spec) {
  check_range(spec);
  const std::int64_t span = spec.hi - spec.lo;
  if (span > 10000)
    throw std::invalid_argument("hitting_oracle limited to 10000 states");
  const std::size_t states = static_cast<std::size_t>(span + 1);
  std::vector<double> h(states);
  if (states == 2) {
    h[0] = spec.reflect_at_lo ? 1.0 : 0.0;
    h[1] = 1.0;
    return h;
  }

  // Unknowns h(lo+1..hi-1); Thomas algorithm on
  //   q(z) h(z-1) - h(z) + p(z) h(z+1) = 0,
  // with h(hi) = 1 and either h(lo) = 0 or, reflecting, h(lo) = h(lo+1)
  // (from lo the chain moves to lo+1 with probability one).
  // Quad precision throughout: with strong drifts the boundary-value system
  // is badly conditioned (kappa ~ e^(max drift excursion) can exceed 1e13 on
  // a couple hundred states), so double or even 80-bit elimination loses six
  // or more digits in the back substitution.  128-bit arithmetic keeps the
  // forward error near 1e-20, far below the 1e-10 the cross-checks demand.
  using quad = __float128;
  const std::size_t m = states - 2;
  std::vector<quad> diag(m), upper(m), rhs(m, quad(0));
  for (std::size_t i = 0; i < m; ++i) {
    const std::int64_t z = spec.lo + 1 + static_cast<std::int64_t>(i);
    const quad p = interior_p(spec, z);
    const quad q = quad(1) - p;
    diag[i] = quad(-1);
    upper[i] = p;
    if (i == 0 && spec.reflect_at_lo) diag[i] += q;  // h(lo) = h(lo+1)
    if (i + 1 == m) rhs[i] = -p;                     // h(hi) = 1
    if (i > 0) {
      // forward elimination with sub-diagonal q
      const quad w = q / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
  }
  std::vector<quad> x(m);
  x[m - 1] = rhs[m - 1] / diag[m - 1];
  for (std::size_t i = m - 1; i-- > 0;)
    x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];

  h[0] = spec.reflect_at_lo ? static_cast<double>(x[0]) : 0.0;
  for (std::size_t i = 0; i < m; ++i) h[i + 1] = static_cast<double>(x[i]);
  h[states - 1] = 1.0;
  return h;
}

double branching_survival(const BranchingParams& bp, std::int64_t n0) {
  if (bp.b < 0 || bp.d < 0)
    throw std::invalid_argument("branching rates must be nonnegative");
  if (n0 < 0) throw std::invalid_argument("n0 must be nonnegative");
  if (n0 == 0 || bp.b <= bp.d) return 0.0;
  return 1.0 - std::pow(bp.d / bp.b, static_cast<double>(n0));
}

double extinction_cdf(const BranchingParams& bp, std::int64_t n0, double t) {
  if (bp.b < 0 || bp.d < 0)
    throw std::invalid_argument("branching rates must be nonnegative");
  if (n0 <= 0) throw std::invalid_argument("n0 must be positive");
  if (t < 0) throw std::invalid_argument("t must be nonnegative");
  if (bp.b == bp.d)
    throw std::domain_error("extinction_cdf: critical case b == d not covered");
  if (bp.d == 0.0) return 0.0;
  const double r = bp.b - bp.d;
  double ratio;
  if (r > 0) {
    const double e = std::exp(-r * t);  // decays, safe
    ratio = bp.d * (1.0 - e) / (bp.b - bp.d * e);
  } else {
    // subcritical: rescale by e^{rt} to avoid overflowing e^{-rt}
    const double e = std::exp(r * t);
    ratio = bp.d * (e - 1.0) / (bp.b * e - bp.d);
  }
  return std::pow(ratio, static_cast<double>(n0));
}

bool extinct_by(const BranchingParams& bp, std::int64_t n0, double t,
                Xoshiro256pp& rng) {
  std::int64_t n = n0;
  double now = 0.0;
  while (n > 0) {
    const double rate = static_cast<double>(n) * (bp.b + bp.d);
    now += rng.exponential(rate);
    if (now > t) return false;
    if (rng.uniform() * (bp.b + bp.d) < bp.b)
      ++n;
    else
      --n;
  }
  return true;
}

}  // namespace diploid

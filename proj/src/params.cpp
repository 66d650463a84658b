#include "diploid/params.hpp"

#include <cmath>
#include <stdexcept>

namespace diploid {

void validate(const ModelParams& p) {
  if (!(p.f > 0)) throw std::invalid_argument("f must be > 0");
  if (!(p.D >= 0)) throw std::invalid_argument("D must be >= 0");
  if (!(p.delta > 0)) throw std::invalid_argument("delta must be > 0");
  if (!(p.c > 0)) throw std::invalid_argument("c must be > 0");
  if (!(p.K >= 1)) throw std::invalid_argument("K must be >= 1");
  if (!(p.mu >= 0 && p.mu <= 1))
    throw std::invalid_argument("mu must be in [0, 1]");
  if (!(p.f - p.D > 0)) throw std::invalid_argument("f - D must be > 0");
  if (!(p.f - p.D - p.delta > 0))
    throw std::invalid_argument("f - D - delta must be > 0");
}

void validate(const ModelParams& p, const AnalysisParams& a) {
  validate(p);
  if (!(a.eps > 0)) throw std::invalid_argument("eps must be > 0");
  if (!(a.eps < p.delta / 2))
    throw std::invalid_argument("eps must be < delta/2");
  if (!(a.theta > p.delta / 2))
    throw std::invalid_argument("theta must be > delta/2");
  if (!(a.theta < p.delta))
    throw std::invalid_argument("theta must be < delta");
  if (!(a.alpha > 0 && a.alpha < 0.25))
    throw std::invalid_argument("alpha must be in (0, 1/4)");
  const double rho = resolved_rho(p, a);
  if (!(rho > 0 && rho < p.f * p.delta))
    throw std::invalid_argument("rho must be in (0, f*delta)");
  const double nbar_A = (p.f - p.D) / p.c;
  if (!(a.delta_fix > 0 && a.delta_fix < nbar_A))
    throw std::invalid_argument("delta_fix must be in (0, nbar_A)");
}

double resolved_rho(const ModelParams& p, const AnalysisParams& a) {
  return a.rho == 0.0 ? p.f * p.delta / 2 : a.rho;
}

Derived derived(const ModelParams& p, const AnalysisParams& a) {
  Derived d;
  d.nbar_a = (p.f - p.D - p.delta) / p.c;
  d.nbar_A = (p.f - p.D) / p.c;
  d.s_mut_in_res = p.delta;
  d.s_res_in_mut = -p.delta;
  d.gamma_delta = (p.f + p.delta / 2) / (4 * d.nbar_A * (p.f + p.delta));
  d.x_ladder = std::sqrt((p.f + a.theta) / (p.f + p.delta));
  d.pfix = p.delta / p.f;
  d.h2 = p.f / (4 * d.nbar_A * (p.f + p.delta));
  d.h1 = p.D > 0 ? p.f * p.delta * (2 * p.D + p.delta) /
                       (4 * d.nbar_A * p.D * (p.f + p.delta) * (p.D + p.delta))
                 : std::nan("");
  d.flow_coeff = p.f * p.delta / (2 * d.nbar_A * (p.f + p.delta));
  return d;
}

}  // namespace diploid

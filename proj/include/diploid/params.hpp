#ifndef DIPLOID_PARAMS_HPP
#define DIPLOID_PARAMS_HPP

#include <cstdint>

namespace diploid {

// Demographic parameters of the three-genotype (aa, aA, AA) birth-death
// model.  Individuals reproduce at rate f via random Mendelian mating,
// die naturally at rate D (aa carries the extra penalty delta), and feel
// logistic competition c * N_tot / K.  A fraction mu of births carries a
// mutation at a second locus and is tracked but not added to the counts.
struct ModelParams {
  double f = 4.0;      // per-capita fertility
  double D = 1.0;      // natural death rate of aA and AA
  double delta = 0.3;  // extra death rate of aa
  double c = 1.0;      // competition kernel
  double K = 1000.0;   // carrying capacity (density = count / K)
  double mu = 0.0;     // mutation probability per birth
};

// Knobs of the numerical analysis (threshold levels, scaling exponents,
// decay-bound slack).  They are constrained relative to ModelParams:
//   0 < eps < delta/2 < theta < delta,  0 < alpha < 1/4,
//   0 < delta_fix < nbar_A,             0 < rho < f*delta.
struct AnalysisParams {
  double eps = 0.05;        // macroscopic aA reference level
  double theta = 0.2;       // ladder contraction exponent knob
  double alpha = 0.05;      // survival-window scaling exponent
  double delta_fix = 0.1;   // mutant density declared "fixated"
  double rho = 0.0;         // decay-bound slack; 0 means use f*delta/2
};

// Quantities derived in closed form from the parameters.
struct Derived {
  double nbar_a;        // resident equilibrium (f - D - delta) / c
  double nbar_A;        // mutant equilibrium (f - D) / c
  double s_mut_in_res;  // invasion fitness of aA/AA in the aa resident: +delta
  double s_res_in_mut;  // invasion fitness of aa in the AA resident: -delta
  double gamma_delta;   // quadratic coefficient of the aa slaving relation
  double x_ladder;      // ladder contraction factor sqrt((f+theta)/(f+delta))
  double pfix;          // branching fixation probability delta / f
  double h1, h2;        // center-manifold coefficients at the AA equilibrium
  double flow_coeff;    // quadratic coefficient of the reduced flow on the
                        // center manifold: f*delta / (2*nbar_A*(f+delta))
};

// Throw std::invalid_argument naming the first violated invariant.
void validate(const ModelParams& p);
void validate(const ModelParams& p, const AnalysisParams& a);

// rho = 0 is shorthand for the midpoint slack f*delta/2.
double resolved_rho(const ModelParams& p, const AnalysisParams& a);

// Preconditions: validate(p) passes.  h1 additionally needs D > 0; it is
// set to NaN when D == 0 (see center_manifold() for the strict version).
Derived derived(const ModelParams& p, const AnalysisParams& a);

}  // namespace diploid

#endif

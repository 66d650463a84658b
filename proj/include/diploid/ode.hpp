#ifndef DIPLOID_ODE_HPP
#define DIPLOID_ODE_HPP

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "diploid/params.hpp"

namespace diploid {

using Vec3 = std::array<double, 3>;  // densities (x_aa, y_aA, z_AA)

struct Mat3 {
  double m[3][3] = {};
};

// Large-population vector field.  het_extra_death adds an extra death rate
// to the heterozygote only; the model proper has het_extra_death = 0, and
// the nonzero variant exists for the dominance/co-dominance contrast
// diagnostic (distinct aA fitness turns the algebraic tail of the aA decay
// into an exponential one).  At Sigma = 0 the field is (0,0,0).
Vec3 rhs(const Vec3& v, const ModelParams& p, double het_extra_death = 0.0);

// Central finite-difference Jacobian of rhs.
Mat3 jacobian_numeric(const Vec3& v, const ModelParams& p, double h = 1e-6,
                      double het_extra_death = 0.0);

// Closed-form Jacobians at the two boundary equilibria.
Mat3 jacobian_at_resident(const ModelParams& p);  // at (nbar_a, 0, 0)
Mat3 jacobian_at_mutant(const ModelParams& p);    // at (0, 0, nbar_A)

// Real eigenvalues of a 3x3 matrix via its characteristic cubic (Cardano /
// trigonometric form), sorted ascending.  Throws std::domain_error when a
// complex pair is present.  Used to cross-check the closed forms.
std::array<double, 3> real_eigenvalues_3x3(const Mat3& M);

struct FixedPointReport {
  Vec3 point;
  Mat3 jacobian;
  std::array<double, 3> eigenvalues;  // ascending
  std::string classification;  // "unstable" / "stable-degenerate" / "other"
  double residual;             // max-norm of rhs at the point
};

// The monomorphic equilibria (nbar_a, 0, 0) and (0, 0, nbar_A), with
// spectra {-(f-D-delta), delta, -(f-delta)} and {-(f+delta), 0, -(f-D)}.
std::pair<FixedPointReport, FixedPointReport> fixed_points(
    const ModelParams& p);

// Quadratic data of the center manifold at the AA equilibrium, in the
// translated/reordered coordinates (z~, y~, x~):
//   manifold graph (z~, x~) = (h1, h2) y~^2 + O(y~^3),
//   reduced flow  y~' = -flow_coeff * y~^2 + O(y~^3),
// and the coordinate transform T to those coordinates.
struct CenterManifold {
  double h1 = 0, h2 = 0;
  double flow_coeff = 0;
  Mat3 T;
};
CenterManifold center_manifold(const ModelParams& p);  // throws if D == 0

// Two-sided envelope for the slow aA decay, clock started when the
// heterozygote density equals eps:
//   lower(t) = 2 nbar_A (f+delta) / ((f delta + rho) t + 2 nbar_A (f+delta)/eps)
// and upper(t) likewise with (f delta - rho).  Requires 0 < rho < f*delta.
struct DecayBracket {
  double lower = 0, upper = 0;
};
DecayBracket decay_bounds(const ModelParams& p, double eps, double rho,
                          double t);

// Adaptive Dormand-Prince 5(4) solution with a dense (continuously
// evaluable) representation of every accepted step.
class OdeSolution {
 public:
  Vec3 at(double t) const;  // clamped to [t0, t_end]
  double t_begin() const { return t0_; }
  double t_end() const { return t_end_; }
  const Vec3& final_state() const { return y_end_; }
  std::size_t steps() const { return seg_.size(); }

  // First time >= from at which component comp crosses level downwards
  // (value >= level before, < level after).  Returns a refined crossing
  // time; throws std::runtime_error if no crossing exists.
  double find_down_crossing(int comp, double level, double from) const;

 private:
  friend OdeSolution integrate(const ModelParams&, Vec3, double, double,
                               double, double, double);
  struct Segment {
    double t, h;
    Vec3 rc1, rc2, rc3, rc4, rc5;  // quartic dense-output coefficients
  };
  Vec3 eval(const Segment& s, double t) const;

  double t0_ = 0, t_end_ = 0;
  Vec3 y_end_{};
  std::vector<Segment> seg_;
};

// Integrate from state init at time t0 = 0 up to t_end.  Per-step error is
// controlled to atol + rtol*|y|; tiny negative components (an artifact of
// the polynomial tail) are clamped to zero.  Throws std::runtime_error
// ("stiff region; reduce tol or t_end") on step-size underflow.
OdeSolution integrate(const ModelParams& p, Vec3 init, double t_end,
                      double rtol = 1e-9, double atol = 1e-12,
                      double het_extra_death = 0.0, double t0 = 0.0);

}  // namespace diploid

#endif

#include "diploid/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace diploid {

Vec3 rhs(const Vec3& v, const ModelParams& p, double het_extra_death) {
  const double x = v[0], y = v[1], z = v[2];
  const double S = x + y + z;
  if (S <= 0) return {0.0, 0.0, 0.0};
  const double wa = x + y / 2;
  const double wA = z + y / 2;
  const double crowd = p.D + p.c * S;
  return {p.f * wa * wa / S - x * (crowd + p.delta),
          2 * p.f * wa * wA / S - y * (crowd + het_extra_death),
          p.f * wA * wA / S - z * crowd};
}

Mat3 jacobian_numeric(const Vec3& v, const ModelParams& p, double h,
                      double het_extra_death) {
  Mat3 J;
  for (int j = 0; j < 3; ++j) {
    Vec3 vp = v, vm = v;
    vp[j] += h;
    vm[j] -= h;
    const Vec3 fp = rhs(vp, p, het_extra_death);
    const Vec3 fm = rhs(vm, p, het_extra_death);
    for (int i = 0; i < 3; ++i) J.m[i][j] = (fp[i] - fm[i]) / (2 * h);
  }
  return J;
}

Mat3 jacobian_at_resident(const ModelParams& p) {
  const double g = p.f - p.D - p.delta;  // growth rate = c * nbar_a
  Mat3 J;
  J.m[0][0] = -g;
  J.m[0][1] = -g;
  J.m[0][2] = -(2 * p.f - p.D - p.delta);
  J.m[1][1] = p.delta;
  J.m[1][2] = 2 * p.f;
  J.m[2][2] = -(p.f - p.delta);
  return J;
}

Mat3 jacobian_at_mutant(const ModelParams& p) {
  Mat3 J;
  J.m[0][0] = -(p.f + p.delta);
  J.m[1][0] = 2 * p.f;
  J.m[2][0] = -(2 * p.f - p.D);
  J.m[2][1] = -(p.f - p.D);
  J.m[2][2] = -(p.f - p.D);
  return J;
}

std::array<double, 3> real_eigenvalues_3x3(const Mat3& M) {
  const auto& m = M.m;
  // Characteristic polynomial lambda^3 + a lambda^2 + b lambda + c.
  const double tr = m[0][0] + m[1][1] + m[2][2];
  const double minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] +
                        m[0][0] * m[2][2] - m[0][2] * m[2][0] +
                        m[1][1] * m[2][2] - m[1][2] * m[2][1];
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  const double a = -tr, b = minors, c = -det;

  // Depressed cubic u^3 + p u + q with lambda = u - a/3.
  const double pp = b - a * a / 3;
  const double q = 2 * a * a * a / 27 - a * b / 3 + c;
  const double scale = std::max({1.0, std::abs(a), std::sqrt(std::abs(b)),
                                 std::cbrt(std::abs(c))});
  const double s2 = scale * scale, s3 = s2 * scale;

  std::array<double, 3> u;
  if (std::abs(pp) < 1e-11 * s2 && std::abs(q) < 1e-11 * s3) {
    u = {0.0, 0.0, 0.0};  // (near-)triple root
  } else {
    const double disc = -4 * pp * pp * pp - 27 * q * q;
    if (disc < -1e-9 * s3 * s3)
      throw std::domain_error("matrix has a complex eigenvalue pair");
    if (pp >= 0)  // only reachable with disc ~ 0; treat as a triple root
      return {-a / 3, -a / 3, -a / 3};
    const double r = 2 * std::sqrt(-pp / 3);
    const double arg = std::clamp(3 * q / (pp * r), -1.0, 1.0);
    const double phi = std::acos(arg) / 3;
    constexpr double two_pi_3 = 2.0943951023931953;
    u = {r * std::cos(phi), r * std::cos(phi - two_pi_3),
         r * std::cos(phi - 2 * two_pi_3)};
  }
  std::array<double, 3> lam = {u[0] - a / 3, u[1] - a / 3, u[2] - a / 3};
  std::sort(lam.begin(), lam.end());
  return lam;
}

namespace {

std::string classify(const std::array<double, 3>& eig) {
  constexpr double tol = 1e-9;
  const double top = eig[2];  // ascending order
  if (top > tol) return "unstable";
  if (top >= -tol && eig[1] < -tol) return "stable-degenerate";
  return "other";
}

double max_abs(const Vec3& v) {
  return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

}  // namespace

std::pair<FixedPointReport, FixedPointReport> fixed_points(
    const ModelParams& p) {
  validate(p);
  FixedPointReport res, mut;
  res.point = {(p.f - p.D - p.delta) / p.c, 0.0, 0.0};
  res.jacobian = jacobian_at_resident(p);
  res.eigenvalues = {-(p.f - p.D - p.delta), p.delta, -(p.f - p.delta)};
  std::sort(res.eigenvalues.begin(), res.eigenvalues.end());
  res.classification = classify(res.eigenvalues);
  res.residual = max_abs(rhs(res.point, p));

  mut.point = {0.0, 0.0, (p.f - p.D) / p.c};
  mut.jacobian = jacobian_at_mutant(p);
  mut.eigenvalues = {-(p.f + p.delta), 0.0, -(p.f - p.D)};
  std::sort(mut.eigenvalues.begin(), mut.eigenvalues.end());
  mut.classification = classify(mut.eigenvalues);
  mut.residual = max_abs(rhs(mut.point, p));
  return {res, mut};
}

CenterManifold center_manifold(const ModelParams& p) {
  validate(p);
  if (p.D == 0)
    throw std::domain_error(
        "center manifold expansion requires D > 0 (the aa direction loses "
        "its spectral gap at D = 0)");
  const AnalysisParams a;
  const Derived d = derived(p, a);
  CenterManifold cm;
  cm.h1 = d.h1;
  cm.h2 = d.h2;
  cm.flow_coeff = d.flow_coeff;
  // Rows express (z~, y~, x~) in terms of the shifted densities
  // (x, y, z - nbar_A).
  cm.T.m[0][0] = 1;
  cm.T.m[0][1] = 1;
  cm.T.m[0][2] = p.D / (p.D + p.delta);
  cm.T.m[1][1] = 1;
  cm.T.m[1][2] = 2 * p.f / (p.f + p.delta);
  cm.T.m[2][2] = 1;
  return cm;
}

DecayBracket decay_bounds(const ModelParams& p, double eps, double rho,
                          double t) {
  validate(p);
  if (!(eps > 0)) throw std::invalid_argument("eps must be > 0");
  if (!(rho > 0 && rho < p.f * p.delta))
    throw std::invalid_argument("rho must be in (0, f*delta)");
  if (!(t >= 0)) throw std::invalid_argument("t must be >= 0");
  const double nbar_A = (p.f - p.D) / p.c;
  const double num = 2 * nbar_A * (p.f + p.delta);
  DecayBracket br;
  br.lower = num / ((p.f * p.delta + rho) * t + num / eps);
  br.upper = num / ((p.f * p.delta - rho) * t + num / eps);
  return br;
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) with quartic dense output.

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                 a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// Difference between the 5th- and 4th-order weights (error estimate).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights for the quartic interpolant.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

Vec3 axpy(const Vec3& y, double h, const Vec3& k) {
  return {y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]};
}

}  // namespace

Vec3 OdeSolution::eval(const Segment& s, double t) const {
  const double th = (t - s.t) / s.h;
  const double th1 = 1 - th;
  Vec3 out;
  for (int i = 0; i < 3; ++i)
    out[i] = s.rc1[i] +
             th * (s.rc2[i] + th1 * (s.rc3[i] + th * (s.rc4[i] + th1 * s.rc5[i])));
  return out;
}

Vec3 OdeSolution::at(double t) const {
  if (seg_.empty()) return y_end_;
  t = std::clamp(t, t0_, t_end_);
  // Last segment whose start time is <= t.
  auto it = std::upper_bound(
      seg_.begin(), seg_.end(), t,
      [](double v, const Segment& s) { return v < s.t; });
  if (it != seg_.begin()) --it;
  return eval(*it, t);
}

double OdeSolution::find_down_crossing(int comp, double level,
                                       double from) const {
  for (const Segment& s : seg_) {
    const double t_lo = std::max(s.t, from);
    const double t_hi = s.t + s.h;
    if (t_hi <= from) continue;
    double a = t_lo, b = t_hi;
    double fa = eval(s, a)[comp] - level;
    const double fb = eval(s, b)[comp] - level;
    if (!(fa >= 0 && fb < 0)) continue;  // not a downward crossing here
    for (int iter = 0; iter < 200 && b - a > 1e-13 * std::max(1.0, b);
         ++iter) {
      const double mid = (a + b) / 2;
      const double fm = eval(s, mid)[comp] - level;
      if (fm >= 0) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    return (a + b) / 2;
  }
  throw std::runtime_error("no downward crossing of the requested level");
}

OdeSolution integrate(const ModelParams& p, Vec3 init, double t_end,
                      double rtol, double atol, double het_extra_death,
                      double t0) {
  validate(p);
  if (!(t_end >= t0)) throw std::invalid_argument("t_end must be >= t0");

  OdeSolution sol;
  sol.t0_ = t0;
  sol.t_end_ = t_end;
  sol.y_end_ = init;
  if (t_end == t0) return sol;

  const auto f = [&](const Vec3& v) { return rhs(v, p, het_extra_death); };
  const auto err_norm = [&](const Vec3& e, const Vec3& y0, const Vec3& y1) {
    double sum = 0;
    for (int i = 0; i < 3; ++i) {
      const double sk = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
      const double r = e[i] / sk;
      sum += r * r;
    }
    return std::sqrt(sum / 3);
  };

  double t = t0;
  Vec3 y = init;
  Vec3 k1 = f(y);

  // Starting step: crude ratio of state to slope, refined by the controller.
  double h;
  {
    const double ny = max_abs(y), nf = max_abs(k1);
    h = (nf > 1e-12) ? 0.01 * std::max(ny, atol / rtol) / nf : 1e-6;
    h = std::min(h, t_end - t0);
    if (h <= 0) h = 1e-6;
  }

  bool rejected = false;
  for (long step = 0; t < t_end; ++step) {
    if (step > 50'000'000)
      throw std::runtime_error("step budget exceeded");
    h = std::min(h, t_end - t);
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      throw std::runtime_error("stiff region; reduce tol or t_end");

    const Vec3 k2 = f(axpy(y, h * a21, k1));
    Vec3 tmp;
    for (int i = 0; i < 3; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const Vec3 k3 = f(tmp);
    for (int i = 0; i < 3; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    const Vec3 k4 = f(tmp);
    for (int i = 0; i < 3; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    const Vec3 k5 = f(tmp);
    for (int i = 0; i < 3; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                           a64 * k4[i] + a65 * k5[i]);
    const Vec3 k6 = f(tmp);
    Vec3 ynew;
    for (int i = 0; i < 3; ++i)
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                            a75 * k5[i] + a76 * k6[i]);
    const Vec3 k7 = f(ynew);

    Vec3 e;
    for (int i = 0; i < 3; ++i)
      e[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                  e6 * k6[i] + e7 * k7[i]);
    const double err = err_norm(e, y, ynew);

    if (err <= 1.0) {
      OdeSolution::Segment s;
      s.t = t;
      s.h = h;
      for (int i = 0; i < 3; ++i) {
        const double ydiff = ynew[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        s.rc1[i] = y[i];
        s.rc2[i] = ydiff;
        s.rc3[i] = bspl;
        s.rc4[i] = ydiff - h * k7[i] - bspl;
        s.rc5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                        d6 * k6[i] + d7 * k7[i]);
      }
      sol.seg_.push_back(s);

      t += h;
      y = ynew;
      // Densities are nonnegative; zero out roundoff-scale undershoot so the
      // quadratic competition term cannot feed on a sign error.
      for (double& yi : y)
        if (yi < 0 && yi > -1e-14) yi = 0;
      k1 = (y == ynew) ? k7 : f(y);  // FSAL unless the clamp touched y

      const double fac =
          std::min(rejected ? 1.0 : 5.0,
                   std::max(0.2, 0.9 * std::pow(err > 1e-30 ? err : 1e-30,
                                                -0.2)));
      h *= fac;
      rejected = false;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      rejected = true;
    }
  }
  sol.y_end_ = y;
  return sol;
}

}  // namespace diploid

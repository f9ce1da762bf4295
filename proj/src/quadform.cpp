#include "clab/quadform.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "clab/error.hpp"

namespace clab {

namespace {

constexpr double kPi = std::numbers::pi;

// Stable roots of c2*t^2 + c1*t + c0 = 0 with nonnegative discriminant and
// c1 != 0, as homogeneous pairs (w, t w) so that c2 = 0 yields the root at
// infinity (0, 1).
std::pair<std::array<double, 2>, std::array<double, 2>> stable_quadratic(double c2, double c1, double c0, double disc) {
  const double s = std::sqrt(std::max(disc, 0.0));
  const double t = -0.5 * (c1 + (c1 >= 0.0 ? s : -s));
  return {{c2, t}, {t, c0}};
}

std::array<double, 3> as_array(const QuadForm& q) { return {q.a0, q.a1, q.a2}; }

}  // namespace

Direction Direction::normalized(double du, double dv) {
  const double n = std::hypot(du, dv);
  Direction d{du / n, dv / n};
  if (d.du < 0.0 || (d.du == 0.0 && d.dv < 0.0)) {
    d.du = -d.du;
    d.dv = -d.dv;
  }
  if (d.du == 0.0) d.du = 0.0;  // drop negative zeros
  if (d.dv == 0.0) d.dv = 0.0;
  return d;
}

double Direction::line_angle() const {
  double t = std::atan2(dv, du);
  if (t < 0.0) t += kPi;
  if (t >= kPi) t -= kPi;
  return t;
}

double angular_distance(const Direction& a, const Direction& b) {
  const double c = std::abs(a.du * b.du + a.dv * b.dv);
  const double s = std::abs(a.du * b.dv - a.dv * b.du);
  return std::atan2(s, c);
}

double evaluate(const QuadForm& q, const Direction& d) { return evaluate(q, d.du, d.dv); }

double polarization(const QuadForm& q, const Direction& d1, const Direction& d2) {
  return q.a0 * d1.dv * d2.dv + 0.5 * q.a1 * (d1.du * d2.dv + d2.du * d1.dv) + q.a2 * d1.du * d2.du;
}

double max_abs(const QuadForm& q) { return std::max({std::abs(q.a0), std::abs(q.a1), std::abs(q.a2)}); }

double norm(const QuadForm& q) { return std::sqrt(q.a0 * q.a0 + q.a1 * q.a1 + q.a2 * q.a2); }

QuadForm normalized(const QuadForm& q) {
  const double n = norm(q);
  if (n == 0.0) return q;
  return (1.0 / n) * q;
}

bool is_zero(const QuadForm& q, double scale, double rel_tol) { return max_abs(q) <= rel_tol * scale; }

double projective_angle(const QuadForm& p, const QuadForm& q) {
  const auto a = as_array(p);
  const auto b = as_array(q);
  const double na = norm(p), nb = norm(q);
  if (na == 0.0 || nb == 0.0) return kPi / 2;
  const double c = std::abs(a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) / (na * nb);
  const std::array<double, 3> x = {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
  const double s = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (na * nb);
  return std::atan2(s, c);
}

RootSet roots(const QuadForm& q, double reference_scale) {
  const double s = max_abs(q);
  if (s == 0.0 || (reference_scale > 0.0 && is_zero(q, reference_scale))) {
    throw Error(ErrorCode::AllDirectionsNull, "every direction is a root of the zero form");
  }
  const QuadForm n = (1.0 / s) * q;
  const double disc = discriminant(n);
  RootSet out;
  if (disc < -1e-14) return out;

  const bool slope_dv = std::abs(n.a0) >= std::abs(n.a2);  // solve for p = dv/du
  if (std::abs(disc) <= 1e-14) {
    out.double_root = true;
    out.directions.push_back(slope_dv ? Direction::normalized(1.0, -0.5 * n.a1 / n.a0)
                                      : Direction::normalized(-0.5 * n.a1 / n.a2, 1.0));
    return out;
  }
  if (slope_dv) {
    const double c2 = n.a0, c1 = n.a1, c0 = n.a2;
    if (c1 == 0.0) {
      const double p = std::sqrt(-c0 / c2);
      out.directions = {Direction::normalized(1.0, p), Direction::normalized(1.0, -p)};
    } else {
      const auto [r1, r2] = stable_quadratic(c2, c1, c0, 4.0 * disc);
      out.directions = {Direction::normalized(r1[0], r1[1]), Direction::normalized(r2[0], r2[1])};
    }
  } else {
    const double c2 = n.a2, c1 = n.a1, c0 = n.a0;
    if (c1 == 0.0) {
      const double t = std::sqrt(-c0 / c2);
      out.directions = {Direction::normalized(t, 1.0), Direction::normalized(-t, 1.0)};
    } else {
      const auto [r1, r2] = stable_quadratic(c2, c1, c0, 4.0 * disc);
      out.directions = {Direction::normalized(r1[1], r1[0]), Direction::normalized(r2[1], r2[0])};
    }
  }
  std::sort(out.directions.begin(), out.directions.end(),
            [](const Direction& a, const Direction& b) { return a.line_angle() < b.line_angle(); });
  return out;
}

std::vector<EigenPair> generalized_eigenpairs(const QuadForm& q1, const QuadForm& q2) {
  // E = [[du^2 coeff, b], [b, dv^2 coeff]] acting on w = (du, dv).
  const double p00 = q1.a2, p01 = 0.5 * q1.a1, p11 = q1.a0;
  const double r00 = q2.a2, r01 = 0.5 * q2.a1, r11 = q2.a0;
  const double scale1 = max_abs(q1), scale2 = max_abs(q2);
  const double det_p = p00 * p11 - p01 * p01;
  if (scale1 == 0.0 || std::abs(det_p) <= 1e-14 * scale1 * scale1) {
    throw Error(ErrorCode::DegeneratePencil, "first form is degenerate");
  }
  if (projective_angle(q1, q2) <= 1e-12 || scale2 <= 1e-14 * scale1) {
    throw Error(ErrorCode::DegeneratePencil, "second form is a multiple of the first");
  }
  const double c2 = det_p;
  const double c1 = -(r00 * p11 + r11 * p00 - 2.0 * r01 * p01);
  const double c0 = r00 * r11 - r01 * r01;
  const double disc = c1 * c1 - 4.0 * c2 * c0;
  const double disc_scale = c1 * c1 + std::abs(4.0 * c2 * c0);
  std::vector<double> mus;
  if (disc < -1e-13 * disc_scale) return {};
  if (disc <= 1e-13 * disc_scale) {
    mus.push_back(-c1 / (2.0 * c2));
  } else {
    const auto [m1, m2] = stable_quadratic(c2, c1, c0, disc);
    mus = {m1[1] / m1[0], m2[1] / m2[0]};
    if (c1 == 0.0) mus = {std::sqrt(-c0 / c2), -std::sqrt(-c0 / c2)};
  }
  std::vector<EigenPair> out;
  for (double mu : mus) {
    const double m00 = r00 - mu * p00, m01 = r01 - mu * p01, m11 = r11 - mu * p11;
    // Null vector of the symmetric 2x2 matrix, taken from its larger row.
    Direction d;
    if (std::hypot(m00, m01) >= std::hypot(m01, m11)) {
      d = Direction::normalized(-m01, m00);
    } else {
      d = Direction::normalized(m11, -m01);
    }
    if (std::hypot(m00, m01) == 0.0 && std::hypot(m01, m11) == 0.0) d = Direction::normalized(1.0, 0.0);
    out.push_back({mu, d});
  }
  std::sort(out.begin(), out.end(), [](const EigenPair& a, const EigenPair& b) { return a.mu > b.mu; });
  return out;
}

double eigen_residual(const QuadForm& q1, const QuadForm& q2, const EigenPair& pair) {
  const double w0 = pair.dir.du, w1 = pair.dir.dv;
  const double e0 = (q2.a2 * w0 + 0.5 * q2.a1 * w1) - pair.mu * (q1.a2 * w0 + 0.5 * q1.a1 * w1);
  const double e1 = (0.5 * q2.a1 * w0 + q2.a0 * w1) - pair.mu * (0.5 * q1.a1 * w0 + q1.a0 * w1);
  return std::hypot(e0, e1);
}

SelfPolarCheck self_polar_check(const QuadForm& q1, const QuadForm& q2, const QuadForm& q3, double tol) {
  SelfPolarCheck r;
  const QuadForm f[3] = {normalized(q1), normalized(q2), normalized(q3)};
  r.max_pairing = std::max({std::abs(polar_pairing(f[0], f[1])), std::abs(polar_pairing(f[0], f[2])),
                            std::abs(polar_pairing(f[1], f[2]))});
  r.by_pairing = r.max_pairing <= tol;
  // Each vertex must be proportional to the Jacobian of the other two; the
  // Jacobian of two unit forms has norm bounded away from zero on a genuine
  // triangle, so the angular tolerance tracks the pairing tolerance.
  for (int k = 0; k < 3; ++k) {
    const QuadForm j = jacobian(f[(k + 1) % 3], f[(k + 2) % 3]);
    const double jn = norm(j);
    const double angle = jn <= 1e-12 ? kPi / 2 : projective_angle(f[k], j);
    r.max_jacobian_angle = std::max(r.max_jacobian_angle, angle);
  }
  r.by_jacobian = r.max_jacobian_angle <= 100.0 * tol;
  return r;
}

bool is_self_polar_triangle(const QuadForm& q1, const QuadForm& q2, const QuadForm& q3, double tol) {
  const SelfPolarCheck c = self_polar_check(q1, q2, q3, tol);
  return c.by_pairing && c.by_jacobian;
}

ExtremaScan quotient_extrema_oracle(const QuadForm& q1, const QuadForm& q2, int samples) {
  auto f = [&](double t) {
    const double c = std::cos(t), s = std::sin(t);
    return evaluate(q2, c, s) / evaluate(q1, c, s);
  };
  const int n = std::max(samples, 16);
  std::vector<double> val(n);
  for (int k = 0; k < n; ++k) val[k] = f(kPi * k / n);
  const auto [lo, hi] = std::minmax_element(val.begin(), val.end());
  ExtremaScan out;
  if (*hi - *lo <= 1e-12 * (std::abs(*hi) + std::abs(*lo) + 1e-300)) {
    out.flat = true;
    return out;
  }
  const double step = kPi / n;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int k = 0; k < n; ++k) {
    const double prev = val[(k + n - 1) % n], cur = val[k], next = val[(k + 1) % n];
    const bool is_max = cur > prev && cur >= next;
    const bool is_min = cur < prev && cur <= next;
    if (!is_max && !is_min) continue;
    const double sign = is_max ? -1.0 : 1.0;  // golden section minimizes sign*f
    double a = step * (k - 1), b = step * (k + 1);
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = sign * f(x1), f2 = sign * f(x2);
    for (int it = 0; it < 100 && b - a > 1e-13; ++it) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - inv_phi * (b - a);
        f1 = sign * f(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + inv_phi * (b - a);
        f2 = sign * f(x2);
      }
    }
    const Direction d = Direction::from_angle(0.5 * (a + b));
    const bool dup = std::any_of(out.directions.begin(), out.directions.end(),
                                 [&](const Direction& e) { return angular_distance(d, e) < 2.0 * step; });
    if (!dup) out.directions.push_back(d);
  }
  std::sort(out.directions.begin(), out.directions.end(),
            [](const Direction& a, const Direction& b) { return a.line_angle() < b.line_angle(); });
  return out;
}

}  // namespace clab

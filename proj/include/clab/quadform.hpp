#pragma once

#include <cmath>
#include <vector>

namespace clab {

// Binary quadratic form a0*dv^2 + a1*du*dv + a2*du^2. The middle coefficient
// is stored in full (twice the half-coefficient b of the (a : 2b : c) notation).
// The scalar type is double for pointwise work and Jet<N> for coefficient fields.
template <class S>
struct BinaryForm {
  S a0{};
  S a1{};
  S a2{};
};

using QuadForm = BinaryForm<double>;

template <class S>
BinaryForm<S> operator+(const BinaryForm<S>& p, const BinaryForm<S>& q) {
  return {p.a0 + q.a0, p.a1 + q.a1, p.a2 + q.a2};
}
template <class S>
BinaryForm<S> operator-(const BinaryForm<S>& p, const BinaryForm<S>& q) {
  return {p.a0 - q.a0, p.a1 - q.a1, p.a2 - q.a2};
}
template <class S>
BinaryForm<S> operator-(const BinaryForm<S>& p) {
  return {-p.a0, -p.a1, -p.a2};
}
template <class S, class T>
BinaryForm<S> operator*(const T& t, const BinaryForm<S>& q) {
  return {t * q.a0, t * q.a1, t * q.a2};
}

// (a1/2)^2 - a0*a2: positive for two real root directions, negative for none.
template <class S>
S discriminant(const BinaryForm<S>& q) {
  return 0.25 * (q.a1 * q.a1) - q.a0 * q.a2;
}

// Determinant with rows (dv^2, -du dv, du^2), (p_du2, p_b, p_dv2), (q_du2, q_b, q_dv2);
// its roots are the stationary directions of q/p. Antisymmetric and bilinear.
template <class S>
BinaryForm<S> jacobian(const BinaryForm<S>& p, const BinaryForm<S>& q) {
  const S pb = 0.5 * p.a1;
  const S qb = 0.5 * q.a1;
  return {pb * q.a0 - p.a0 * qb, p.a2 * q.a0 - p.a0 * q.a2, p.a2 * qb - pb * q.a2};
}

// Vanishes iff each form lies on the polar line of the other with respect to
// the conic of degenerate forms.
template <class S>
S polar_pairing(const BinaryForm<S>& p, const BinaryForm<S>& q) {
  return 0.5 * (p.a1 * q.a1) - p.a0 * q.a2 - q.a0 * p.a2;
}

template <class S>
S evaluate(const BinaryForm<S>& q, double du, double dv) {
  return q.a0 * (dv * dv) + q.a1 * (du * dv) + q.a2 * (du * du);
}

// Projective direction (du, dv), unit length, first nonzero component positive.
struct Direction {
  double du = 1.0;
  double dv = 0.0;

  static Direction normalized(double du, double dv);
  static Direction from_angle(double theta) { return normalized(std::cos(theta), std::sin(theta)); }
  // Angle of the line in [0, pi).
  double line_angle() const;
};

// Angle between two lines, in [0, pi/2].
double angular_distance(const Direction& a, const Direction& b);

double evaluate(const QuadForm& q, const Direction& d);

// Symmetric bilinear form of q evaluated on two directions.
double polarization(const QuadForm& q, const Direction& d1, const Direction& d2);

double max_abs(const QuadForm& q);
double norm(const QuadForm& q);
QuadForm normalized(const QuadForm& q);

// Zero relative to the scale of the inputs that produced q.
bool is_zero(const QuadForm& q, double scale, double rel_tol = 1e-12);

// Angle in coefficient space between the projective classes of p and q,
// in [0, pi/2]. Returns pi/2 when either form vanishes.
double projective_angle(const QuadForm& p, const QuadForm& q);

struct RootSet {
  std::vector<Direction> directions;  // sorted by line angle in [0, pi)
  bool double_root = false;
};

// Real root directions. Throws AllDirectionsNull when q vanishes relative to
// reference_scale (or identically when no scale is given).
RootSet roots(const QuadForm& q, double reference_scale = 0.0);

struct EigenPair {
  double mu = 0.0;
  Direction dir;
};

// Solutions of E2 w = mu E1 w with E_i the symmetric matrices of q1, q2 in the
// basis (du, dv). Real pairs only, sorted by decreasing mu. Throws
// DegeneratePencil when q2 is a multiple of q1 or q1 is degenerate.
std::vector<EigenPair> generalized_eigenpairs(const QuadForm& q1, const QuadForm& q2);

// |E2 w - mu E1 w| for a candidate pair.
double eigen_residual(const QuadForm& q1, const QuadForm& q2, const EigenPair& pair);

struct SelfPolarCheck {
  bool by_pairing = false;
  bool by_jacobian = false;
  double max_pairing = 0.0;         // on unit-normalized forms
  double max_jacobian_angle = 0.0;  // vertex vs Jacobian of the other two
};

SelfPolarCheck self_polar_check(const QuadForm& q1, const QuadForm& q2, const QuadForm& q3, double tol);
bool is_self_polar_triangle(const QuadForm& q1, const QuadForm& q2, const QuadForm& q3, double tol);

struct ExtremaScan {
  std::vector<Direction> directions;
  bool flat = false;  // q2/q1 constant: every direction is extremal
};

// Brute-force extremizers of q2/q1 over the circle of directions, refined by
// golden-section search. Requires q1 definite.
ExtremaScan quotient_extrema_oracle(const QuadForm& q1, const QuadForm& q2, int samples);

}  // namespace clab

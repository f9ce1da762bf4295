#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "clab/congruence.hpp"
#include "clab/quadform.hpp"

namespace clab {

enum class FormId { Q1, Q, Q2, Q3, Q4, Q5 };
const char* to_string(FormId id);

// The quadratic forms of a congruence at one point (or, with S = Jet<N>, as
// coefficient jets):
//   Q1 = |n'|^2, Q = x'.n', Q2 = Jac(Q1, Q) (principal), Q3 = Q2 - bbar Q1
//   (torsal), Q4 = Jac(Q1, Q2) (mean), Q5 = -d(Q2) Q1 - bbar d(Q1) Q2
//   (characteristic; equals Jac(Q3, Q4)).
template <class S>
struct FormSetT {
  BinaryForm<S> q1, q, q2, q3, q4, q5;
};
using FormSet = FormSetT<double>;

template <class S>
FormSetT<S> forms_of(const FundamentalsT<S>& f) {
  FormSetT<S> s;
  s.q1 = {f.C, 2.0 * f.B, f.A};
  s.q = {-f.c, 2.0 * f.b, -f.a};
  s.q2 = jacobian(s.q1, s.q);
  s.q3 = s.q2 - f.bbar * s.q1;
  s.q4 = jacobian(s.q1, s.q2);
  const S d1 = discriminant(s.q1);
  const S d2 = discriminant(s.q2);
  s.q5 = (-d2) * s.q1 - (f.bbar * d1) * s.q2;
  return s;
}

// Torsal form with the unit direction, [x', n, n']. Smooth across the singular
// set of n, where Q3 = det(n_u, n_v, n) * (this form) vanishes.
template <class S>
BinaryForm<S> torsal_unit_form(const Vec3<S>& n, const Vec3<S>& n_u, const Vec3<S>& n_v, const Vec3<S>& x_u,
                               const Vec3<S>& x_v) {
  return {triple(x_v, n, n_v), triple(x_u, n, n_v) + triple(x_v, n, n_u), triple(x_u, n, n_u)};
}

struct FormAtPoint {
  FormId which = FormId::Q1;
  QuadForm form;
  double u = 0.0, v = 0.0;
};

FormSet forms(const PointFrame& frame);
std::vector<FormAtPoint> q_forms(const PointFrame& frame);

// Jacobian route for Q5, kept for cross-checking the closed form.
QuadForm q5_via_jacobian(const PointFrame& frame);
QuadForm torsal_unit_form(const PointFrame& frame);

struct PointInvariants {
  std::optional<double> H, K, HsqMinusK;  // empty on the singular set of n
  double bbar = 0.0;
  std::array<double, 5> deltas{};  // discriminants of Q1..Q5
  double eq_residual = 0.0;       // |d(Q2) - (B^2-AC)^2 (H^2-K)| / scale
  bool on_sigma_n = false;
};

// Constant c in d(Q2) = c (B^2-AC)^2 (H^2-K) under the stored-coefficient
// convention; fixed by the symbolic oracle.
inline constexpr double kPrincipalDiscriminantConstant = 1.0;
// Constant k^2 in d(Q3) = d(Q2) + k^2 bbar^2 d(Q1).
inline constexpr double kTorsalDiscriminantConstant = 1.0;

PointInvariants point_invariants(const PointFrame& frame, double sigma_tol = 1e-10);

enum class Hyperbolicity { Hyperbolic, Parabolic, Elliptic };
const char* to_string(Hyperbolicity h);

// Sign of the torsal discriminant (extended across the singular set of n).
Hyperbolicity hyperbolicity(const PointFrame& frame, double tol = 1e-9);

// Field dump: u, v, Q1..Q5 coefficients (a0, a1, a2 each), d(Q1)..d(Q5),
// H^2-K, bbar; 17 significant digits. H^2-K is written as "nan" on the
// singular set of n.
// The BDE selected for tracing and classification. Q3 and Q5 are taken in
// their forms extended across the singular set of n: Q3 / det(n_u, n_v, n)
// and Q5 / det(n_u, n_v, n)^2. Off that set they have the same roots.
enum class Lens { Q2, Q3, Q4, Q5 };
const char* to_string(Lens lens);
std::optional<Lens> parse_lens(const std::string& name);

QuadForm lens_form(const PointFrame& frame, Lens lens);

// Second-order Taylor jets (in offsets from the base point) of the lens
// coefficients.
BinaryForm<Jet<2>> lens_jet(const LineJet& jet, Lens lens);
BinaryForm<Jet<2>> lens_jet(const PointFrame& frame, Lens lens);

// det(n_u, n_v, n) as a second-order jet.
Jet<2> sigma_jet(const LineJet& jet);

void write_field_csv_header(std::ostream& os);
void write_field_csv_row(std::ostream& os, const PointFrame& frame);

}  // namespace clab

#include "clab/formfields.hpp"

#include <cmath>
#include <cstdio>

namespace clab {

const char* to_string(FormId id) {
  switch (id) {
    case FormId::Q1: return "Q1";
    case FormId::Q: return "Q";
    case FormId::Q2: return "Q2";
    case FormId::Q3: return "Q3";
    case FormId::Q4: return "Q4";
    case FormId::Q5: return "Q5";
  }
  return "?";
}

const char* to_string(Hyperbolicity h) {
  switch (h) {
    case Hyperbolicity::Hyperbolic: return "hyperbolic";
    case Hyperbolicity::Parabolic: return "parabolic";
    case Hyperbolicity::Elliptic: return "elliptic";
  }
  return "?";
}

FormSet forms(const PointFrame& frame) { return forms_of(frame.fund); }

std::vector<FormAtPoint> q_forms(const PointFrame& frame) {
  const FormSet s = forms(frame);
  const std::pair<FormId, QuadForm> all[] = {{FormId::Q1, s.q1}, {FormId::Q, s.q},   {FormId::Q2, s.q2},
                                             {FormId::Q3, s.q3}, {FormId::Q4, s.q4}, {FormId::Q5, s.q5}};
  std::vector<FormAtPoint> out;
  for (const auto& [id, q] : all) out.push_back({id, q, frame.u, frame.v});
  return out;
}

QuadForm q5_via_jacobian(const PointFrame& frame) {
  const FormSet s = forms(frame);
  return jacobian(s.q3, s.q4);
}

QuadForm torsal_unit_form(const PointFrame& frame) {
  return torsal_unit_form(frame.n, frame.n_u, frame.n_v, frame.x_u, frame.x_v);
}

PointInvariants point_invariants(const PointFrame& frame, double sigma_tol) {
  const FormSet s = forms(frame);
  const Fundamentals& f = frame.fund;
  PointInvariants inv;
  inv.bbar = f.bbar;
  inv.deltas = {discriminant(s.q1), discriminant(s.q2), discriminant(s.q3), discriminant(s.q4),
                discriminant(s.q5)};
  const double g = f.B * f.B - f.A * f.C;
  const double q1_scale = max_abs(s.q1);
  inv.on_sigma_n = q1_scale == 0.0 || std::abs(g) <= sigma_tol * q1_scale * q1_scale;
  if (inv.on_sigma_n) return inv;

  // Pencil (Q1, -Q): its eigenvalues are the extreme values of r = -Q/Q1.
  const QuadForm minus_q = -s.q;
  const double p00 = s.q1.a2, p01 = 0.5 * s.q1.a1, p11 = s.q1.a0;
  const double r00 = minus_q.a2, r01 = 0.5 * minus_q.a1, r11 = minus_q.a0;
  const double det_p = p00 * p11 - p01 * p01;
  const double sum = (r00 * p11 + r11 * p00 - 2.0 * r01 * p01) / det_p;  // mu1 + mu2
  const double prod = (r00 * r11 - r01 * r01) / det_p;                   // mu1 * mu2
  inv.H = 0.5 * sum;
  inv.K = prod;
  // (mu1 - mu2)^2 / 4 from the closed form, then cross-checked against the
  // eigenpairs where the pencil is not degenerate.
  double hk = (*inv.H) * (*inv.H) - prod;
  if (hk < 0.0 && hk > -1e-12 * ((*inv.H) * (*inv.H) + std::abs(prod) + 1e-300)) hk = 0.0;
  inv.HsqMinusK = hk;
  const double predicted = kPrincipalDiscriminantConstant * g * g * hk;
  const double scale = std::max({std::abs(inv.deltas[1]), std::abs(predicted), 1e-300});
  inv.eq_residual = std::abs(inv.deltas[1] - predicted) / scale;
  return inv;
}

Hyperbolicity hyperbolicity(const PointFrame& frame, double tol) {
  const QuadForm t = torsal_unit_form(frame);
  const double d = discriminant(t);
  const double input_scale = std::max(norm(frame.n_u), norm(frame.n_v)) * std::max(norm(frame.x_u), norm(frame.x_v));
  if (is_zero(t, input_scale, 1e-10)) return Hyperbolicity::Parabolic;
  const double sc = max_abs(t);
  if (std::abs(d) <= tol * sc * sc) return Hyperbolicity::Parabolic;
  return d > 0.0 ? Hyperbolicity::Hyperbolic : Hyperbolicity::Elliptic;
}

void write_field_csv_header(std::ostream& os) {
  os << "u,v";
  for (int k = 1; k <= 5; ++k) os << ",Q" << k << "_a0,Q" << k << "_a1,Q" << k << "_a2";
  for (int k = 1; k <= 5; ++k) os << ",d" << k;
  os << ",HsqMinusK,bbar\n";
}

namespace {
void put(std::ostream& os, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  os << ',' << buf;
}
}  // namespace

void write_field_csv_row(std::ostream& os, const PointFrame& frame) {
  const FormSet s = forms(frame);
  const PointInvariants inv = point_invariants(frame);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", frame.u);
  os << buf;
  put(os, frame.v);
  for (const QuadForm* q : {&s.q1, &s.q2, &s.q3, &s.q4, &s.q5}) {
    put(os, q->a0);
    put(os, q->a1);
    put(os, q->a2);
  }
  for (double d : inv.deltas) put(os, d);
  if (inv.HsqMinusK) {
    put(os, *inv.HsqMinusK);
  } else {
    os << ",nan";
  }
  put(os, inv.bbar);
  os << '\n';
}

}  // namespace clab

namespace clab {

const char* to_string(Lens lens) {
  switch (lens) {
    case Lens::Q2: return "Q2";
    case Lens::Q3: return "Q3";
    case Lens::Q4: return "Q4";
    case Lens::Q5: return "Q5";
  }
  return "?";
}

std::optional<Lens> parse_lens(const std::string& name) {
  if (name == "Q2") return Lens::Q2;
  if (name == "Q3") return Lens::Q3;
  if (name == "Q4") return Lens::Q4;
  if (name == "Q5") return Lens::Q5;
  return std::nullopt;
}

namespace {

struct JetForms {
  FormSetT<Jet<2>> s;
  BinaryForm<Jet<2>> torsal;
  Jet<2> lambda;
};

JetForms jet_forms(const LineJet& j) {
  const Vec3<Jet<2>> n = truncate_vec<2>(j.n);
  const Vec3<Jet<2>> nu = partial_u(j.n), nv = partial_v(j.n);
  const Vec3<Jet<2>> xu = partial_u(j.x), xv = partial_v(j.x);
  JetForms out;
  out.s = forms_of(fundamentals_of(nu, nv, xu, xv));
  out.torsal = torsal_unit_form(n, nu, nv, xu, xv);
  out.lambda = triple(nu, nv, n);
  return out;
}

QuadForm value_form(const BinaryForm<Jet<2>>& f) { return {f.a0.value(), f.a1.value(), f.a2.value()}; }

// Q5 / lambda^2 = -Lambda Q1 + bbar Q2, Lambda = (pol(Q1, Q) / (2 lambda))^2 + d(Q).
// The quotient pol / lambda is removable on the singular set of n; there it
// is taken as the ratio of the derivatives across the set.
QuadForm extended_q5(const JetForms& f, double bbar) {
  const Jet<2> pol = polar_pairing(f.s.q1, f.s.q);
  const double lam = f.lambda.value();
  const double gu = f.lambda.coeff(1, 0), gv = f.lambda.coeff(0, 1);
  const double g2 = gu * gu + gv * gv;
  double ratio;
  if (lam * lam > 1e-16 * g2 && lam != 0.0) {
    ratio = pol.value() / lam;
  } else if (g2 > 0.0) {
    ratio = (pol.coeff(1, 0) * gu + pol.coeff(0, 1) * gv) / g2;
  } else {
    ratio = 0.0;
  }
  const double Lambda = 0.25 * ratio * ratio + discriminant(value_form(f.s.q));
  return (-Lambda) * value_form(f.s.q1) + bbar * value_form(f.s.q2);
}

}  // namespace

QuadForm lens_form(const PointFrame& frame, Lens lens) {
  switch (lens) {
    case Lens::Q2: return forms(frame).q2;
    case Lens::Q4: return forms(frame).q4;
    case Lens::Q3: return torsal_unit_form(frame);
    case Lens::Q5: {
      const JetForms f = jet_forms(jet_from_frame(frame));
      return extended_q5(f, frame.fund.bbar);
    }
  }
  return {};
}

Jet<2> sigma_jet(const LineJet& jet) { return jet_forms(jet).lambda; }

BinaryForm<Jet<2>> lens_jet(const LineJet& jet, Lens lens) {
  const JetForms f = jet_forms(jet);
  switch (lens) {
    case Lens::Q2: return f.s.q2;
    case Lens::Q4: return f.s.q4;
    case Lens::Q3: return f.torsal;
    case Lens::Q5: {
      if (f.lambda.value() == 0.0) return f.s.q5;
      const Jet<2> inv = reciprocal(f.lambda * f.lambda);
      return BinaryForm<Jet<2>>{f.s.q5.a0 * inv, f.s.q5.a1 * inv, f.s.q5.a2 * inv};
    }
  }
  return {};
}

BinaryForm<Jet<2>> lens_jet(const PointFrame& frame, Lens lens) { return lens_jet(jet_from_frame(frame), lens); }

}  // namespace clab

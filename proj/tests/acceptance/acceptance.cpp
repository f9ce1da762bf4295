// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "clab/commands.hpp"
#include "clab/error.hpp"
#include "clab/foliation.hpp"
#include "clab/formfields.hpp"
#include "clab/gallery.hpp"
#include "clab/geom3d.hpp"
#include "clab/singularities.hpp"
#include "support.hpp"

using namespace clab;
using clab::testing::random_point;

namespace {

using J2 = Jet<2>;

// Outcome of one criterion: failures keep their first few messages, measures
// keep the worst value seen against its bound.
class Criterion {
 public:
  explicit Criterion(std::string title) : title_(std::move(title)) {}

  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (messages_.size() < 5) messages_.push_back(what);
  }
  // Records value <= bound under `label`.
  void measure(const std::string& label, double value, double bound) {
    auto it = std::find_if(worst_.begin(), worst_.end(), [&](const Worst& w) { return w.label == label; });
    if (it == worst_.end()) {
      worst_.push_back({label, value, bound, 0});
      it = worst_.end() - 1;
    }
    ++it->count;
    if (!(value <= it->value)) it->value = value;
    expect(value <= bound, label + " = " + fmt(value) + " > " + fmt(bound));
  }
  void note(const std::string& n) { notes_.push_back(n); }
  bool pass() const { return failures_ == 0 && checks_ > 0; }

  void print(int index, double seconds) const {
    std::printf("criterion %2d: %s  %s (%.1f s)\n", index, pass() ? "PASS" : "FAIL", title_.c_str(), seconds);
    for (const auto& w : worst_)
      std::printf("    %-48s max %.3e  bound %.1e  n=%d\n", w.label.c_str(), w.value, w.bound, w.count);
    for (const auto& n : notes_) std::printf("    %s\n", n.c_str());
    for (const auto& m : messages_) std::printf("    failed: %s\n", m.c_str());
    if (failures_ > static_cast<int>(messages_.size()))
      std::printf("    ... %d failures in total\n", failures_);
    if (checks_ == 0) std::printf("    failed: no checks ran\n");
  }

  static std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
  }

 private:
  struct Worst {
    std::string label;
    double value, bound;
    int count;
  };
  std::string title_;
  int checks_ = 0, failures_ = 0;
  std::vector<std::string> messages_, notes_;
  std::vector<Worst> worst_;
};

template <class F>
void guarded(Criterion& c, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
}

QuadForm random_form(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  return {d(rng), d(rng), d(rng)};
}

QuadForm random_definite(std::mt19937_64& rng) {
  for (;;) {
    const QuadForm q = random_form(rng);
    if (discriminant(q) < -0.05) return q.a0 > 0 ? q : -q;
  }
}

QuadForm random_indefinite(std::mt19937_64& rng) {
  for (;;) {
    const QuadForm q = random_form(rng);
    if (discriminant(q) > 0.05) return q;
  }
}

double nearest(const Direction& d, const std::vector<Direction>& set) {
  double best = 10.0;
  for (const auto& x : set) best = std::min(best, angular_distance(d, x));
  return best;
}

// Resultant of the two forms as polynomials in t = du/dv.
double resultant(const QuadForm& p, const QuadForm& q) {
  const double x = p.a2 * q.a0 - p.a0 * q.a2;
  return x * x - (p.a2 * q.a1 - p.a1 * q.a2) * (p.a1 * q.a0 - p.a0 * q.a1);
}

// Product of two linear forms (l0 du + l1 dv)(m0 du + m1 dv).
QuadForm product(double l0, double l1, double m0, double m1) { return {l1 * m1, l0 * m1 + l1 * m0, l0 * m0}; }

// Angle between two directions in the metric of a definite form.
double metric_angle(const QuadForm& g, const Direction& x, const Direction& y) {
  const double c = polarization(g, x, y) / std::sqrt(evaluate(g, x) * evaluate(g, y));
  return std::acos(std::clamp(std::abs(c), 0.0, 1.0));
}

std::vector<CongruenceChart> gallery_charts() {
  std::vector<CongruenceChart> out;
  for (const auto& e : gallery()) out.push_back(e.make());
  return out;
}

bool is_jet_chart(const CongruenceChart& c) { return c.kind() != ChartKind::SurfaceNormal; }

// ---------------------------------------------------------------------------

void quotient_extrema(Criterion& c) {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 500; ++i) {
    const QuadForm q1 = random_definite(rng), q2 = random_form(rng);
    const auto scan = quotient_extrema_oracle(q1, q2, 4000);
    const auto rt = roots(jacobian(q1, q2)).directions;
    c.expect(!scan.flat && scan.directions.size() == rt.size(), "extremizer count differs from Jacobian roots");
    double worst = 0.0;
    for (const auto& d : rt) worst = std::max(worst, nearest(d, scan.directions));
    for (const auto& d : scan.directions) worst = std::max(worst, nearest(d, rt));
    c.measure("angular gap, Jacobian roots vs extremizers", worst, 1e-3);
    // discriminant of the Jacobian is a quarter of the resultant
    const QuadForm j = jacobian(q1, q2);
    c.measure("|d(Jac) - Res/4| relative", std::abs(discriminant(j) - 0.25 * resultant(q1, q2)) /
                                              (max_abs(q1) * max_abs(q1) * max_abs(q2) * max_abs(q2)),
              1e-12);
  }
  int distinct = 0;
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    // common root l = 0, other roots m, k
    const double l0 = d(rng), l1 = d(rng);
    const QuadForm q1 = product(l0, l1, d(rng), d(rng)), q2 = product(l0, l1, d(rng), d(rng));
    const QuadForm j = jacobian(q1, q2);
    const double scale = max_abs(q1) * max_abs(q1) * max_abs(q2) * max_abs(q2);
    c.measure("d(Jac) with a common root, relative", std::abs(discriminant(j)) / scale, 1e-8);
    const RootSet r = roots(j, max_abs(q1) * max_abs(q2));
    c.expect(r.double_root && r.directions.size() == 1, "common root: Jacobian roots not coincident");
    // and the converse on a perturbed pair without a common root
    const QuadForm q2b = q2 + QuadForm{0.0, 0.0, 0.3};
    if (std::abs(resultant(q1, q2b)) > 1e-3 * max_abs(q1) * max_abs(q1) * max_abs(q2b) * max_abs(q2b)) {
      c.expect(!roots(jacobian(q1, q2b)).double_root, "no common root but coincident Jacobian roots");
      ++distinct;
    }
  }
  c.note("500 random definite pairs, 100 common-root pairs, " + std::to_string(distinct) + " perturbed converses");
}

void eigen_structure(Criterion& c) {
  std::mt19937_64 rng(102);
  for (int i = 0; i < 500; ++i) {
    const QuadForm q1 = random_definite(rng), q2 = random_form(rng);
    const auto e = generalized_eigenpairs(q1, q2);
    c.expect(e.size() == 2, "definite q1 gave non-real eigenvalues");
    if (e.size() != 2) continue;
    for (const auto& p : e) c.measure("eigen residual |E2 w - mu E1 w|", eigen_residual(q1, q2, p), 1e-9);
    c.measure("q2-polarization of the eigen-directions", std::abs(polarization(q2, e[0].dir, e[1].dir)) / max_abs(q2),
              1e-8);
    c.measure("q1-polarization of the eigen-directions", std::abs(polarization(q1, e[0].dir, e[1].dir)) / max_abs(q1),
              1e-8);
    c.measure("eigen-directions vs Jacobian roots", std::max(nearest(e[0].dir, roots(jacobian(q1, q2)).directions),
                                                             nearest(e[1].dir, roots(jacobian(q1, q2)).directions)),
              1e-9);
  }
  // Bisection: q1 indefinite, q2 definite.
  for (int i = 0; i < 500; ++i) {
    const QuadForm q1 = random_indefinite(rng), q2 = random_definite(rng);
    const auto e = generalized_eigenpairs(q1, q2);
    const auto r = roots(q1).directions;
    c.expect(e.size() == 2 && r.size() == 2, "bisection case without two real pairs");
    if (e.size() != 2 || r.size() != 2) continue;
    c.measure("q2-orthogonality (bisection pairs)", std::abs(polarization(q2, e[0].dir, e[1].dir)) / max_abs(q2), 1e-8);
    for (const auto& p : e)
      c.measure("q2-angle difference to the roots of q1",
                std::abs(metric_angle(q2, p.dir, r[0]) - metric_angle(q2, p.dir, r[1])), 1e-6);
  }
}

void well_definedness(Criterion& c) {
  std::mt19937_64 rng(103);
  int compared = 0;
  for (const auto& chart : gallery_charts()) {
    for (int k = 0; k < 5; ++k) {
      const CubicPoly f = clab::testing::random_cubic(rng, 0.5);
      const CongruenceChart moved = recenter_directrix(chart, f);
      for (int i = 0; i < 100; ++i) {
        auto [u, v] = random_point(chart, rng);
        const PointFrame p = chart.frame(u, v), q = moved.frame(u, v);
        const FormSet a = forms(p), b = forms(q);
        const double scale = max_abs(a.q1) * std::max(max_abs(a.q), max_abs(b.q));
        const std::pair<const QuadForm*, const QuadForm*> pairs[] = {{&a.q2, &b.q2}, {&a.q3, &b.q3}, {&a.q4, &b.q4}};
        for (const auto& [x, y] : pairs) {
          if (is_zero(*x, scale, 1e-9)) continue;  // umbilic or Sigma(n): no class to compare
          c.measure("projective angle of Q2, Q3, Q4 after recentering", projective_angle(*x, *y), 1e-8);
          ++compared;
        }
      }
    }
  }
  c.note(std::to_string(gallery().size()) + " gallery charts x 5 recenterings x 100 points, " +
         std::to_string(compared) + " classes compared");
}

void discriminant_identities(Criterion& c) {
  std::mt19937_64 rng(104);
  std::vector<CongruenceChart> charts = gallery_charts();
  for (int k = 0; k < 10; ++k) charts.push_back(clab::testing::random_jet_chart(rng));
  int points = 0, signs = 0, skipped_sign = 0, principal = 0;
  while (points < 1000) {
    const CongruenceChart& chart = charts[points % charts.size()];
    auto [u, v] = random_point(chart, rng);
    const PointFrame f = chart.frame(u, v);
    const FormSet s = forms(f);
    const PointInvariants inv = point_invariants(f);
    ++points;
    const double d1 = inv.deltas[0], d2 = inv.deltas[1], d3 = inv.deltas[2], d4 = inv.deltas[3], d5 = inv.deltas[4];
    const double bb = f.fund.bbar;
    const double m = max_abs(s.q1) * max_abs(s.q);
    const double q2_scale = m * m;
    c.measure("d(Q4) + d(Q1) d(Q2), relative",
              std::abs(d4 + d1 * d2) / std::max(std::abs(d1) * std::max(std::abs(d2), q2_scale), 1e-300), 1e-7);
    c.measure("d(Q3) - d(Q2) - k^2 bbar^2 d(Q1), relative",
              std::abs(d3 - d2 - kTorsalDiscriminantConstant * bb * bb * d1) /
                  std::max(std::max(std::abs(d2), q2_scale) + bb * bb * std::abs(d1), 1e-300),
              1e-7);
    if (!inv.on_sigma_n && d2 > 1e-10 * q2_scale) {
      const double g = f.fund.B * f.fund.B - f.fund.A * f.fund.C;
      const double rhs = kPrincipalDiscriminantConstant * g * g * inv.HsqMinusK.value();
      c.measure("d(Q2) vs c (B^2-AC)^2 (H^2-K), relative", std::abs(d2 - rhs) / std::max(std::abs(d2), std::abs(rhs)),
                1e-7);
      ++principal;
    }
    const double prod = d1 * d2 * d3;
    const double prod_scale = std::abs(d1) * std::max(std::abs(d2), q2_scale) *
                              (std::max(std::abs(d2), q2_scale) + bb * bb * std::abs(d1));
    if (std::abs(prod) <= 1e-9 * prod_scale) {
      ++skipped_sign;
      continue;
    }
    ++signs;
    c.expect((d5 > 0) == (prod > 0), "sign d(Q5) != sign d(Q1) d(Q2) d(Q3) in " + chart.name());
  }
  c.note(std::to_string(points) + " points, " + std::to_string(principal) + " off umbilics and Sigma(n) for d(Q2), " +
         std::to_string(signs) + " sign comparisons (" + std::to_string(skipped_sign) +
         " with a vanishing product skipped)");
  c.note("convention constants: c = " + Criterion::fmt(kPrincipalDiscriminantConstant) +
         ", k^2 = " + Criterion::fmt(kTorsalDiscriminantConstant));
}

void self_polar(Criterion& c) {
  std::mt19937_64 rng(105);
  std::vector<CongruenceChart> charts;
  for (auto& ch : gallery_charts())
    if (is_jet_chart(ch)) charts.push_back(ch);
  for (int k = 0; k < 10; ++k) charts.push_back(clab::testing::random_jet_chart(rng));
  int used = 0, attempts = 0;
  while (used < 1000 && attempts < 20000) {
    const CongruenceChart& chart = charts[attempts++ % charts.size()];
    auto [u, v] = random_point(chart, rng);
    const PointFrame f = chart.frame(u, v);
    const FormSet s = forms(f);
    const PointInvariants inv = point_invariants(f);
    const double m = max_abs(s.q1) * max_abs(s.q);
    if (inv.on_sigma_n || inv.deltas[1] <= 1e-10 * m * m || max_abs(s.q3) <= 1e-8 * m) continue;
    ++used;
    const SelfPolarCheck a = self_polar_check(s.q1, s.q2, s.q4, 1e-8);
    const SelfPolarCheck b = self_polar_check(s.q3, s.q4, s.q5, 1e-8);
    c.measure("pairings of (Q1, Q2, Q4), unit-normalized", a.max_pairing, 1e-8);
    c.measure("pairings of (Q3, Q4, Q5), unit-normalized", b.max_pairing, 1e-8);
    c.expect(is_self_polar_triangle(s.q1, s.q2, s.q4, 1e-8), "(Q1, Q2, Q4) not self-polar in " + chart.name());
    c.expect(is_self_polar_triangle(s.q3, s.q4, s.q5, 1e-8), "(Q3, Q4, Q5) not self-polar in " + chart.name());
  }
  c.expect(used == 1000, "fewer than 1000 non-degenerate points");
  c.note(std::to_string(used) + " non-degenerate points");
}

BinaryForm<J2> folded_normal_jet(double lambda) {
  const J2 u = J2::variable_u(0), v = J2::variable_v(0);
  return {J2(1.0), J2(0.0), v + lambda * u * u};
}

// The same BDE in coordinates u = s U.
UmbilicJet stretched(const UmbilicJet& j, double s) {
  return {j.a1 * s, j.a2, j.b1 * s * s, j.b2 * s, j.c1 * s * s * s, j.c2 * s * s};
}

BdeField linear_field(const UmbilicJet& j) {
  BdeField f;
  f.domain = Domain{-1, 1, -1, 1};
  f.contains = [](double, double) { return true; };
  f.sample = [j](double u, double v) {
    FieldSample s;
    s.form = {j.a1 * u + j.a2 * v, 2 * (j.b1 * u + j.b2 * v), j.c1 * u + j.c2 * v};
    s.form_u = {j.a1, 2 * j.b1, j.c1};
    s.form_v = {j.a2, 2 * j.b2, j.c2};
    return s;
  };
  return f;
}

void classification_windows(Criterion& c) {
  const std::pair<double, SingularLabel> windows[] = {
      {-1.0, SingularLabel::FoldedSaddle}, {1.0 / 32, SingularLabel::FoldedNode}, {1.0, SingularLabel::FoldedFocus}};
  for (const auto& [lambda, label] : windows) {
    const SingularityReport r = classify_folded_jet(folded_normal_jet(lambda));
    c.expect(r.label == label, "lambda " + Criterion::fmt(lambda) + " gave " + to_string(r.label));
    c.measure("recovered lambda error", std::abs(r.diag.lambda.value_or(1e300) - lambda), 1e-12);
  }
  const J2 u = J2::variable_u(0), v = J2::variable_v(0);
  // b0 = 0 with a0 c1 != 0, and the a0 = 0 / c1 = 0 controls
  const BinaryForm<J2> cusps[] = {{J2(1.0), J2(0.0), u + 0.5 * v}, {J2(-2.0), 0.3 * v, -0.7 * u + v * v},
                                  {J2(0.5) + u, 2.0 * u, 3.0 * u - v}};
  for (const auto& f : cusps)
    c.expect(classify_folded_jet(f).label == SingularLabel::CuspFamily, "cusp-family jet not detected");
  c.expect(classify_folded_jet(folded_normal_jet(-1.0)).label != SingularLabel::CuspFamily,
           "c1 = 0 jet reported as cusp family");

  const UmbilicJet monstar{0, 1, 1, 0, 0, -3}, lemon{0, 1, 1, 0, 0, -1}, star{0, 1, -1, 0, 0, -1};
  const std::tuple<const char*, UmbilicJet, SingularLabel, int> cases[] = {
      {"monstar (v, 2u, -3v)", monstar, SingularLabel::Monstar, 3},
      {"monstar, u stretched by 2", stretched(monstar, 2.0), SingularLabel::Monstar, 3},
      {"monstar, u stretched by 1/3", stretched(monstar, 1.0 / 3), SingularLabel::Monstar, 3},
      {"lemon", lemon, SingularLabel::Lemon, 1},
      {"lemon, u stretched by 2", stretched(lemon, 2.0), SingularLabel::Lemon, 1},
      {"lemon, u stretched by 1/3", stretched(lemon, 1.0 / 3), SingularLabel::Lemon, 1},
      {"star", star, SingularLabel::Star, 3},
      {"star, u stretched by 2", stretched(star, 2.0), SingularLabel::Star, 3},
      {"star, u stretched by 1/3", stretched(star, 1.0 / 3), SingularLabel::Star, 3}};
  for (const auto& [name, jet, label, rays] : cases) {
    const SingularityReport r = classify_umbilic_jet(jet);
    c.expect(r.label == label, std::string(name) + " gave " + to_string(r.label));
    // independent check: radial solution lines on a small circle
    c.expect(radial_analysis(linear_field(jet), {0, 0}, 0.05, 2880).rays == rays,
             std::string(name) + ": radial ray count");
  }
  const SingularityReport m = classify_umbilic_jet(monstar);
  auto phi = m.diag.phi_roots;
  std::sort(phi.begin(), phi.end());
  c.expect(phi.size() == 3, "monstar: phi does not have three roots");
  if (phi.size() == 3) {
    c.measure("monstar phi roots vs {-1, 0, 1}",
              std::max({std::abs(phi[0] + 1), std::abs(phi[1]), std::abs(phi[2] - 1)}), 1e-12);
  }
}

void cross_lens(Criterion& c) {
  int folded = 0, umbilics = 0;
  for (const auto& chart : gallery_charts()) {
    for (const auto& p : find_folded_points(chart, Lens::Q3, 64)) {
      const SingularityReport r3 = classify_on_discriminant(chart, p, Lens::Q3);
      if (folded_index(r3.label) == 0) continue;
      const SingularityReport r5 = classify_on_discriminant(chart, p, Lens::Q5);
      ++folded;
      c.expect(folded_index(r3.label) * folded_index(r5.label) == -1,
               chart.name() + ": Q3 " + to_string(r3.label) + " vs Q5 " + to_string(r5.label));
    }
    const UmbilicSearch s = find_umbilics(chart);
    if (s.degenerate_everywhere) continue;
    for (const auto& p : s.points) {
      SingularityReport q2, q5;
      try {
        q2 = classify_umbilic(chart, p, Lens::Q2);
        q5 = classify_umbilic(chart, p, Lens::Q5);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NotMorse) continue;
        throw;
      }
      ++umbilics;
      c.expect(q2.label == q5.label,
               chart.name() + ": umbilic Q2 " + to_string(q2.label) + " vs Q5 " + to_string(q5.label));
    }
  }
  c.expect(folded > 0 && umbilics > 0, "no folded points or umbilics found on the gallery");
  c.note(std::to_string(folded) + " folded parabolic points, " + std::to_string(umbilics) + " umbilics");
}

// Curvature-line ODE of the ellipsoid X = (3 cos v cos u, 2 cos v sin u, sin v)
// from its fundamental forms: (EM - FL) du^2 + (EN - GL) du dv + (FN - GM) dv^2.
struct EllipsoidLines {
  double a = 3, b = 2, c = 1;

  std::array<double, 3> equation(double u, double v) const {
    const double cu = std::cos(u), su = std::sin(u), cv = std::cos(v), sv = std::sin(v);
    const Vec3<double> Xu{-a * cv * su, b * cv * cu, 0}, Xv{-a * sv * cu, -b * sv * su, c * cv};
    const Vec3<double> Xuu{-a * cv * cu, -b * cv * su, 0}, Xuv{a * sv * su, -b * sv * cu, 0},
        Xvv{-a * cv * cu, -b * cv * su, -c * sv};
    const Vec3<double> N = cross(Xu, Xv);
    const double n = norm(N);
    const double E = dot(Xu, Xu), F = dot(Xu, Xv), G = dot(Xv, Xv);
    const double L = dot(Xuu, N) / n, M = dot(Xuv, N) / n, Nn = dot(Xvv, N) / n;
    return {E * M - F * L, E * Nn - G * L, F * Nn - G * M};
  }

  std::array<double, 2> direction(double u, double v, const std::array<double, 2>& prev) const {
    const auto [P, Q, R] = equation(u, v);
    const double disc = std::sqrt(Q * Q - 4 * P * R);
    const double q = -0.5 * (Q + (Q >= 0 ? disc : -disc));
    const std::array<std::array<double, 2>, 2> cand{{{2 * R, 2 * q}, {q, P}}};
    std::array<double, 2> best{};
    double score = -1;
    for (auto d : cand) {
      const double n = std::hypot(d[0], d[1]);
      d = {d[0] / n, d[1] / n};
      const double s = d[0] * prev[0] + d[1] * prev[1];
      if (std::abs(s) > score) score = std::abs(s), best = s < 0 ? std::array<double, 2>{-d[0], -d[1]} : d;
    }
    return best;
  }
};

std::vector<Point2> oracle_line(const EllipsoidLines& e, Point2 p, std::array<double, 2> dir, const Domain& dom,
                                double h) {
  std::vector<Point2> out{p};
  for (int i = 0; i < 200000; ++i) {
    auto k1 = e.direction(p[0], p[1], dir);
    auto k2 = e.direction(p[0] + 0.5 * h * k1[0], p[1] + 0.5 * h * k1[1], k1);
    auto k3 = e.direction(p[0] + 0.5 * h * k2[0], p[1] + 0.5 * h * k2[1], k2);
    auto k4 = e.direction(p[0] + h * k3[0], p[1] + h * k3[1], k3);
    p = {p[0] + h * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6, p[1] + h * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6};
    dir = k1;
    out.push_back(p);
    if (!dom.contains(p[0], p[1])) break;
  }
  return out;
}

double distance_to_polyline(const std::vector<Point2>& pts, Point2 p) {
  double best = 1e300;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto& a = pts[i];
    const auto& b = pts[i + 1];
    const double dx = b[0] - a[0], dy = b[1] - a[1];
    const double l2 = dx * dx + dy * dy;
    const double t = l2 > 0 ? std::clamp(((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / l2, 0.0, 1.0) : 0.0;
    best = std::min(best, std::hypot(p[0] - a[0] - t * dx, p[1] - a[1] - t * dy));
  }
  return best;
}

void normal_congruences(Criterion& c) {
  std::mt19937_64 rng(108);
  for (const char* name : {"ellipsoid-normals", "torus-normals", "paraboloid-normals"}) {
    const CongruenceChart chart = gallery_chart(name);
    int umbilic = 0;
    for (int i = 0; i < 1000; ++i) {
      auto [u, v] = random_point(chart, rng);
      const PointFrame f = chart.frame(u, v);
      const FormSet s = forms(f);
      c.measure("|bbar|", std::abs(f.fund.bbar), 1e-9);
      c.measure("max |Q3 - Q2| coefficientwise", max_abs(s.q3 - s.q2), 1e-9);
      if (is_zero(s.q2, max_abs(s.q1) * max_abs(s.q), 1e-9)) {
        ++umbilic;
        continue;
      }
      c.expect(discriminant(s.q5) < 0.0 && roots(s.q5).directions.empty(),
               std::string(name) + ": Q5 has real roots at (" + Criterion::fmt(u) + ", " + Criterion::fmt(v) + ")");
      // principal directions against closed forms
      const auto p = roots(s.q2).directions;
      if (std::string(name) == "torus-normals") {
        // principal coordinates: the coordinate directions
        c.measure("torus principal directions vs coordinate lines",
                  std::max(nearest(Direction{1, 0}, p), nearest(Direction{0, 1}, p)), 1e-9);
      } else if (std::string(name) == "paraboloid-normals" && std::hypot(u, v) > 1e-3) {
        // surface of revolution: radial and circular directions
        c.measure("paraboloid principal directions vs radial/circular",
                  std::max(nearest(Direction::normalized(u, v), p), nearest(Direction::normalized(-v, u), p)), 1e-9);
      } else if (std::string(name) == "ellipsoid-normals") {
        const auto [P, Q, R] = EllipsoidLines{}.equation(u, v);
        // P du^2 + Q du dv + R dv^2 as a form (a0 dv^2 + a1 du dv + a2 du^2)
        c.measure("ellipsoid principal directions vs curvature-line equation",
                  std::max(nearest(p[0], roots(QuadForm{R, Q, P}).directions),
                           nearest(p[1], roots(QuadForm{R, Q, P}).directions)),
                  1e-8);
      }
    }
    if (umbilic) c.note(std::string(name) + ": " + std::to_string(umbilic) + " umbilic samples");
  }
  const CongruenceChart e = gallery_chart("ellipsoid-normals");
  const EllipsoidLines lines;
  for (const Point2 seed : {Point2{0.8, 0.3}, Point2{0.5, -0.4}, Point2{1.1, 0.1}}) {
    for (int branch : {1, 2}) {
      const TracedCurve t = trace(e, Lens::Q2, seed, branch);
      const double a = t.angles[t.seed_vertex];
      const std::array<double, 2> d{std::cos(a), std::sin(a)};
      std::vector<Point2> ref = oracle_line(lines, seed, d, e.domain(), 1e-4);
      const std::vector<Point2> back = oracle_line(lines, seed, {-d[0], -d[1]}, e.domain(), 1e-4);
      ref.insert(ref.begin(), back.rbegin(), back.rend());
      double worst = 0;
      for (const auto& p : t.points) worst = std::max(worst, distance_to_polyline(ref, p));
      c.measure("traced principal line vs integrated curvature line", worst, 1e-4);
    }
  }
}

void line_point_geometry(Criterion& c) {
  std::mt19937_64 rng(109);
  std::vector<CongruenceChart> charts;
  for (auto& ch : gallery_charts())
    if (is_jet_chart(ch)) charts.push_back(ch);
  int elliptic = 0, attempts = 0;
  while (elliptic < 1000 && attempts < 200000) {
    const CongruenceChart& chart = charts[attempts++ % charts.size()];
    auto [u, v] = random_point(chart, rng);
    const PointFrame f = chart.frame(u, v);
    if (point_invariants(f).on_sigma_n || hyperbolicity(f) != Hyperbolicity::Elliptic) continue;
    ++elliptic;
    const LinePoints p = line_points(f);
    c.expect(p.boundary.size() == 2 && p.characteristic.size() == 2 && p.characteristic_by_direction.size() == 2,
             chart.name() + ": missing boundary or characteristic pair");
    if (p.boundary.size() != 2 || p.characteristic.size() != 2 || p.characteristic_by_direction.size() != 2) continue;
    const double h = 1.0 + std::abs(p.middle);
    c.expect(p.boundary[0] < p.characteristic[0] && p.characteristic[1] < p.boundary[1],
             chart.name() + ": characteristic pair not strictly inside the boundary interval");
    c.measure("boundary midpoint - H", std::abs(0.5 * (p.boundary[0] + p.boundary[1]) - p.middle) / h, 1e-8);
    c.measure("characteristic midpoint - H", std::abs(0.5 * (p.characteristic[0] + p.characteristic[1]) - p.middle) / h,
              1e-8);
    c.measure("quadratic roots vs r on Q5 directions",
              std::max(std::abs(p.characteristic[0] - p.characteristic_by_direction[0]),
                       std::abs(p.characteristic[1] - p.characteristic_by_direction[1])) /
                  h,
              1e-8);
  }
  c.expect(elliptic == 1000, "fewer than 1000 elliptic points");
  c.note(std::to_string(elliptic) + " elliptic points from " + std::to_string(attempts) + " samples");
}

void sigma_handling(Criterion& c) {
  const CongruenceChart fold = gallery_chart("fold-chart");  // Sigma(n) = {v = 0}
  int real_pairs = 0;
  for (int i = 0; i <= 40; ++i) {
    const double u = -0.45 + 0.9 * i / 40.0;
    const PointFrame f = fold.frame(u, 0.0);
    const QuadForm t = torsal_unit_form(f);
    c.expect(std::abs(sigma_field(fold)(u, 0.0)) <= 1e-12, "fold-chart point off Sigma(n)");
    if (std::abs(parabolic_field(fold)(u, 0.0)) <= 1e-9 * max_abs(t) * max_abs(t)) continue;  // parabolic
    c.expect(discriminant(t) > 0.0 && roots(t).directions.size() == 2,
             "extended torsal form without two real directions at u = " + Criterion::fmt(u));
    ++real_pairs;
  }
  c.note(std::to_string(real_pairs) + " points of Sigma(n) with two real torsal directions");

  const SingularityReport r = classify_sigma_n(gallery_chart("fold-parabolic-chart"), {0.0, 0.0});
  c.expect(r.label == SingularLabel::SigmaFold && r.diag.parabolic_on_sigma, "beta11 = 0 point not a parabolic fold");
  c.expect(r.diag.tangency_order == 2, "parabolic / Sigma(n) tangency order is not 2");
  c.note("parabolic / Sigma(n) tangency order " +
         (r.diag.tangency_order ? std::to_string(*r.diag.tangency_order) : std::string("none")));

  int crossings = 0;
  for (double u0 : {-0.3, 0.0, 0.25}) {
    for (int branch : {1, 2}) {
      const TracedCurve t = trace(fold, Lens::Q2, {u0, 0.15}, branch);
      for (std::size_t i = 0; i + 1 < t.points.size(); ++i) {
        const double v0 = t.points[i][1], v1 = t.points[i + 1][1];
        if ((v0 > 0) == (v1 > 0)) continue;
        ++crossings;
        const double s = v0 / (v0 - v1);
        const double a = t.angles[i] + s * std::remainder(t.angles[i + 1] - t.angles[i], M_PI);
        c.measure("|cos| of leaf angle to ker dn at crossings", std::abs(std::cos(a)), 1e-3);
        c.expect(i + 2 < t.points.size(), "principal leaf stops on Sigma(n)");
      }
    }
  }
  c.expect(crossings >= 4, "too few principal leaves cross Sigma(n)");
  c.note(std::to_string(crossings) + " principal leaf crossings of Sigma(n)");
}

std::string portrait_bytes(const CongruenceChart& chart, Lens lens, const char* threads) {
  setenv("CLAB_THREADS", threads, 1);
  PortraitSpec spec;
  spec.lens = lens;
  spec.seed_density = 5;
  const Portrait p = portrait(chart, spec);
  std::ostringstream os;
  for (const auto& curve : p.curves) write_curve_csv(os, curve);
  write_svg(os, p, chart.domain(), lens, chart.name());
  unsetenv("CLAB_THREADS");
  return os.str();
}

void tracer_fidelity(Criterion& c) {
  const std::pair<QuadForm, Point2> constant[] = {
      {{1, 0, -1}, {0, 0}}, {{1, 0, -1}, {0.2, -0.1}}, {{0.5, 1.3, -2.0}, {-0.3, 0.4}}, {{0, 1, 0}, {0.1, 0.1}}};
  for (const auto& [q, seed] : constant) {
    const BdeField f = constant_field(q, Domain{-1, 1, -1, 1});
    for (int branch : {1, 2}) {
      const TracedCurve t = trace(f, seed, branch);
      const double a = t.angles[t.seed_vertex];
      const double nu = -std::sin(a), nv = std::cos(a);  // normal of the expected line
      double worst = 0;
      for (const auto& p : t.points) worst = std::max(worst, std::abs((p[0] - seed[0]) * nu + (p[1] - seed[1]) * nv));
      c.measure("constant BDE: distance from the straight line", worst, 1e-8);
      c.expect(t.points.size() > 10, "constant BDE: short trace");
    }
  }
  int curves = 0;
  for (const char* name : {"perturbed-jet", "lemon-jet", "fold-chart", "cusp-chart", "ellipsoid-normals"}) {
    const CongruenceChart chart = gallery_chart(name);
    for (Lens lens : {Lens::Q2, Lens::Q3, Lens::Q4, Lens::Q5}) {
      PortraitSpec spec;
      spec.lens = lens;
      spec.seed_density = 4;
      spec.overlays = false;
      const BdeField f = lens_field(chart, lens);
      for (const auto& curve : portrait(f, spec).curves) {
        c.measure("tangency residual of traced vertices", tangency_residual(f, curve), 1e-6);
        ++curves;
      }
    }
  }
  c.note(std::to_string(curves) + " traced curves checked");
  for (const char* name : {"perturbed-jet", "fold-parabolic-chart"}) {
    const CongruenceChart chart = gallery_chart(name);
    const std::string a = portrait_bytes(chart, Lens::Q3, "1"), b = portrait_bytes(chart, Lens::Q3, "4");
    c.expect(!a.empty() && a == b, std::string(name) + ": portrait bytes differ across thread counts");
  }
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void(Criterion&)>> suites[] = {
      {"quotient-extrema oracle agreement", quotient_extrema},
      {"eigen-structure", eigen_structure},
      {"well-definedness under recentering", well_definedness},
      {"discriminant identities", discriminant_identities},
      {"self-polar triples", self_polar},
      {"classification windows", classification_windows},
      {"cross-lens laws", cross_lens},
      {"normal-congruence degeneracies", normal_congruences},
      {"line-point geometry", line_point_geometry},
      {"Sigma(n) handling", sigma_handling},
      {"tracer fidelity", tracer_fidelity}};
  int failed = 0, index = 0;
  for (const auto& [title, run] : suites) {
    Criterion c(title);
    const auto t0 = std::chrono::steady_clock::now();
    guarded(c, [&] { run(c); });
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.print(++index, dt);
    if (dt > 60.0) std::printf("    warning: over 60 s\n");
    failed += !c.pass();
    std::fflush(stdout);
  }
  std::printf("acceptance: %d of %d criteria pass\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}

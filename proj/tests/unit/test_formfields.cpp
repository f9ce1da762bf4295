#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "clab/formfields.hpp"
#include "clab/gallery.hpp"
#include "support.hpp"

using namespace clab;
using clab::testing::random_jet_chart;
using clab::testing::random_point;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }
}  // namespace

TEST_CASE("sphere normals: Q2 vanishes") {
  const CongruenceChart c = gallery_chart("sphere-normals");
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    auto [u, v] = random_point(c, rng);
    const PointFrame f = c.frame(u, v);
    CHECK(max_abs(forms(f).q2) <= 1e-10);
    CHECK(point_invariants(f).HsqMinusK.value() <= 1e-12);
    CHECK(hyperbolicity(f) == Hyperbolicity::Parabolic);
  }
}

TEST_CASE("normal congruence in principal coordinates") {
  const CongruenceChart c = gallery_chart("torus-normals");
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    auto [u, v] = random_point(c, rng);
    if (std::abs(v - M_PI / 2) < 0.05) continue;
    const PointFrame f = c.frame(u, v);
    const FormSet s = forms(f);
    CHECK(std::abs(s.q2.a0) <= 1e-12 * max_abs(s.q2));
    CHECK(std::abs(s.q2.a2) <= 1e-12 * max_abs(s.q2));
    // Q4 proportional to C dv^2 - A du^2.
    CHECK(projective_angle(s.q4, QuadForm{f.fund.C, 0.0, -f.fund.A}) <= 1e-10);
    CHECK(max_abs(s.q3 - s.q2) <= 1e-12);
    CHECK(hyperbolicity(f) == Hyperbolicity::Hyperbolic);
  }
}

TEST_CASE("principal directions are the extremal central-point directions") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 10; ++k) {
    const CongruenceChart c = random_jet_chart(rng);
    auto [u, v] = random_point(c, rng);
    const FormSet s = forms(c.frame(u, v));
    const auto ex = quotient_extrema_oracle(s.q1, -s.q, 4000).directions;
    const auto rt = roots(s.q2).directions;
    REQUIRE(ex.size() == rt.size());
    for (const auto& d : rt) {
      double best = 10;
      for (const auto& e : ex) best = std::min(best, angular_distance(d, e));
      CHECK(best < 1e-3);
    }
  }
}

TEST_CASE("form identities at random points") {
  std::mt19937_64 rng(6);
  std::vector<CongruenceChart> charts;
  for (const auto& e : gallery()) charts.push_back(e.make());
  for (int k = 0; k < 10; ++k) charts.push_back(random_jet_chart(rng));
  for (const auto& c : charts) {
    CAPTURE(c.name());
    for (int i = 0; i < 40; ++i) {
      auto [u, v] = random_point(c, rng);
      const PointFrame f = c.frame(u, v);
      const FormSet s = forms(f);
      const PointInvariants inv = point_invariants(f);
      const double d1 = inv.deltas[0], d2 = inv.deltas[1], d3 = inv.deltas[2], d4 = inv.deltas[3],
                   d5 = inv.deltas[4];
      const double bb = f.fund.bbar;
      CHECK(max_abs(s.q3 - (s.q2 - bb * s.q1)) <= 1e-12 * (1 + max_abs(s.q2)));
      CHECK(std::abs(d3 - d2 - bb * bb * d1) <= 1e-9 * (std::abs(d2) + bb * bb * std::abs(d1) + 1e-300));
      CHECK(std::abs(d4 + d1 * d2) <= 1e-9 * std::abs(d1 * d2) + 1e-300);
      if (!inv.on_sigma_n && d2 > 1e-12 * max_abs(s.q1) * max_abs(s.q1) * max_abs(s.q) * max_abs(s.q)) {
        CHECK(inv.eq_residual <= 1e-7);
        const double g = f.fund.B * f.fund.B - f.fund.A * f.fund.C;
        CHECK(rel(d2, g * g * inv.HsqMinusK.value()) <= 1e-7);
        // The closed form and the Jacobian route for Q5 agree exactly.
        CHECK(max_abs(q5_via_jacobian(f) - s.q5) <= 1e-9 * max_abs(s.q5));
        CHECK(std::abs(d5 - d1 * d2 * d3) <= 1e-8 * std::abs(d1 * d2) * (std::abs(d2) + bb * bb * std::abs(d1)));
        CHECK(is_self_polar_triangle(s.q1, s.q2, s.q4, 1e-8));
        CHECK(is_self_polar_triangle(s.q3, s.q4, s.q5, 1e-8));
        CHECK(projective_angle(jacobian(s.q2, s.q4), s.q1) <= 1e-7);
        CHECK(projective_angle(jacobian(s.q1, s.q4), s.q2) <= 1e-7);
        CHECK(projective_angle(jacobian(s.q4, s.q5), s.q3) <= 1e-7);
        // Torsal form with unit direction times det(n_u, n_v, n).
        const double lam = triple(f.n_u, f.n_v, f.n);
        CHECK(max_abs(s.q3 - lam * torsal_unit_form(f)) <= 1e-10 * (1 + max_abs(s.q3)));
        // Mean directions are Q1-orthogonal.
        const auto m = roots(s.q4).directions;
        REQUIRE(m.size() == 2);
        CHECK(std::abs(polarization(s.q1, m[0], m[1])) <= 1e-9 * max_abs(s.q1));
        // Extended Q5 is Q5 / lambda^2.
        CHECK(max_abs(lens_form(f, Lens::Q5) - (1.0 / (lam * lam)) * s.q5) <=
              1e-8 * max_abs(lens_form(f, Lens::Q5)));
      }
    }
  }
}

TEST_CASE("lens jets match pointwise lens forms and their derivatives") {
  std::mt19937_64 rng(9);
  const CongruenceChart c = gallery_chart("perturbed-jet");
  for (int i = 0; i < 20; ++i) {
    auto [u, v] = random_point(c, rng, 0.05);
    for (Lens lens : {Lens::Q2, Lens::Q3, Lens::Q4, Lens::Q5}) {
      const BinaryForm<Jet<2>> j = lens_jet(c.line_jet(u, v), lens);
      const QuadForm q0 = lens_form(c.frame(u, v), lens);
      CHECK(std::abs(j.a0.value() - q0.a0) <= 1e-9 * (1 + max_abs(q0)));
      const double h = 1e-5;
      const QuadForm qp = lens_form(c.frame(u + h, v), lens), qm = lens_form(c.frame(u - h, v), lens);
      CHECK(std::abs((qp.a1 - qm.a1) / (2 * h) - j.a1.coeff(1, 0)) <= 1e-5 * (1 + max_abs(q0)));
      const QuadForm rp = lens_form(c.frame(u, v + h), lens), rm = lens_form(c.frame(u, v - h), lens);
      CHECK(std::abs((rp.a2 + rm.a2 - 2 * q0.a2) / (h * h) - 2 * j.a2.coeff(0, 2)) <= 1e-3 * (1 + max_abs(q0)));
    }
  }
}

TEST_CASE("umbilic jet chart: H^2 - K vanishes at the origin") {
  for (const char* name : {"lemon-jet", "star-jet", "monstar-jet"}) {
    const PointFrame f = gallery_chart(name).frame(0, 0);
    CHECK(point_invariants(f).HsqMinusK.value() <= 1e-14);
    CHECK(max_abs(forms(f).q2) <= 1e-14);
  }
}

TEST_CASE("field CSV") {
  std::ostringstream os;
  write_field_csv_header(os);
  write_field_csv_row(os, gallery_chart("identity-jet").frame(0.1, 0.2));
  std::string header, row;
  std::istringstream is(os.str());
  std::getline(is, header);
  std::getline(is, row);
  CHECK(std::count(header.begin(), header.end(), ',') == 23);
  CHECK(std::count(row.begin(), row.end(), ',') == 23);
  CHECK(header.rfind("u,v,Q1_a0", 0) == 0);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "clab/error.hpp"
#include "clab/formfields.hpp"
#include "clab/gallery.hpp"
#include "support.hpp"

using namespace clab;
using clab::testing::random_point;

TEST_CASE("jet chart frame at the origin") {
  JetChartParams p;
  p.x1 = CubicPoly::u();
  p.x2 = CubicPoly::v();
  const PointFrame f = make_jet_chart(p, {-0.5, 0.5, -0.5, 0.5}).frame(0, 0);
  CHECK(f.n[2] == doctest::Approx(1));
  CHECK(f.n_u[0] == doctest::Approx(1));
  CHECK(f.n_v[1] == doctest::Approx(1));
  CHECK(f.fund.A == doctest::Approx(1));
  CHECK(f.fund.C == doctest::Approx(1));
  CHECK(f.fund.B == doctest::Approx(0));
  CHECK(f.fund.a == doctest::Approx(-1));
  CHECK(f.fund.c == doctest::Approx(-1));
  CHECK(f.fund.b1 == 0);
  CHECK(f.fund.b2 == 0);
  CHECK(f.fund.bbar == 0);

  p.x1 = cubic({{"10", 0.3}, {"11", -0.7}});
  p.x2 = cubic({{"10", 1.1}, {"11", 0.4}});
  const Fundamentals g = make_jet_chart(p, {-0.5, 0.5, -0.5, 0.5}).frame(0, 0).fund;
  CHECK(g.a == doctest::Approx(-0.3));
  CHECK(g.b1 == doctest::Approx(0.7));
  CHECK(g.b2 == doctest::Approx(-1.1));
  CHECK(g.c == doctest::Approx(-0.4));
  CHECK(g.bbar == doctest::Approx((-0.7 - 1.1) / 2));
}

TEST_CASE("domain errors") {
  const CongruenceChart c = gallery_chart("identity-jet");
  CHECK_THROWS_AS(c.frame(0.6, 0.0), Error);
  const CongruenceChart weak = make_callable_chart(
      [](const Jet<3>& u, const Jet<3>& v) {
        LineJet j;
        j.n = {Jet<3>(0.0), Jet<3>(0.0), Jet<3>(1.0)};
        j.x = {u, v, Jet<3>(0.0)};
        return j;
      },
      {-1, 1, -1, 1}, 2);
  try {
    weak.frame(0, 0);
    FAIL("expected DerivativeUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DerivativeUnavailable);
  }
}

TEST_CASE("sphere normals are umbilic everywhere") {
  const CongruenceChart c = gallery_chart("sphere-normals");
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    auto [u, v] = random_point(c, rng);
    const PointFrame f = c.frame(u, v);
    CHECK(std::abs(f.fund.bbar) <= 1e-10);
    CHECK(std::abs(f.fund.b1 - f.fund.b2) <= 1e-10);
    CHECK(f.fund.a / f.fund.A == doctest::Approx(f.fund.c / f.fund.C));
  }
}

TEST_CASE("paraboloid normals: principal curvatures at the origin") {
  const CongruenceChart c = normal_congruence_of(make_graph(cubic({{"20", 0.5}, {"22", 0.5}})), {-1, 1, -1, 1});
  const PointFrame f = c.frame(0, 0);
  // E = G = 1, L = N = 1 at the vertex: A = k^2 E, a = k E.
  CHECK(f.fund.A == doctest::Approx(1));
  CHECK(f.fund.C == doctest::Approx(1));
  CHECK(f.fund.a == doctest::Approx(1));
  CHECK(f.fund.c == doctest::Approx(1));
  CHECK(point_invariants(f).HsqMinusK.value() == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("torus normals in principal coordinates") {
  const double R = 2, r = 1;
  const CongruenceChart c = normal_congruence_of(make_torus(R, r), {-1, 1, 0.6, 2.6});
  std::mt19937_64 rng(8);
  for (int i = 0; i < 40; ++i) {
    auto [u, v] = random_point(c, rng);
    const PointFrame f = c.frame(u, v);
    const double E = (R + r * std::cos(v)) * (R + r * std::cos(v)), G = r * r;
    const double k1 = std::cos(v) / (R + r * std::cos(v)), k2 = 1.0 / r;
    CHECK(std::abs(f.fund.B) <= 1e-12);
    CHECK(f.fund.A == doctest::Approx(k1 * k1 * E));
    CHECK(f.fund.C == doctest::Approx(k2 * k2 * G));
    CHECK(std::abs(f.fund.b) <= 1e-12);
    CHECK(std::abs(f.fund.a) == doctest::Approx(std::abs(k1 * E)));
    CHECK(std::abs(f.fund.c) == doctest::Approx(std::abs(k2 * G)));
    CHECK(f.fund.a * f.fund.c * k1 * k2 >= 0);
  }
}

TEST_CASE("frame invariants and finite-difference derivatives across the gallery") {
  std::mt19937_64 rng(17);
  for (const auto& entry : gallery()) {
    CAPTURE(entry.name);
    const CongruenceChart c = entry.make();
    for (int i = 0; i < 100; ++i) {
      auto [u, v] = random_point(c, rng, 0.05);
      const PointFrame f = c.frame(u, v);
      CHECK(std::abs(norm(f.n) - 1.0) <= 1e-12);
      CHECK(std::abs(dot(f.n, f.n_u)) <= 1e-10);
      CHECK(std::abs(dot(f.n, f.n_v)) <= 1e-10);
      CHECK(f.fund.B * f.fund.B - f.fund.A * f.fund.C <= 1e-10);
      CHECK(f.fund.b == -0.5 * (f.fund.b1 + f.fund.b2));
      CHECK(f.fund.bbar == -0.5 * (f.fund.b1 - f.fund.b2));
      if (i >= 20) continue;
      const double h = 1e-5;
      const PointFrame pu = c.frame(u + h, v), mu = c.frame(u - h, v);
      const PointFrame pv = c.frame(u, v + h), mv = c.frame(u, v - h);
      auto close = [](const Vec3<double>& fd, const Vec3<double>& ex) {
        return norm(fd - ex) <= 1e-6 * std::max(1.0, norm(ex));
      };
      CHECK(close((0.5 / h) * (pu.n - mu.n), f.n_u));
      CHECK(close((0.5 / h) * (pv.n - mv.n), f.n_v));
      CHECK(close((0.5 / h) * (pu.x - mu.x), f.x_u));
      CHECK(close((0.5 / h) * (pv.x - mv.x), f.x_v));
      CHECK(close((0.5 / h) * (pu.n_u - mu.n_u), f.n_uu));
      CHECK(close((0.5 / h) * (pv.n_u - mv.n_u), f.n_uv));
      CHECK(close((0.5 / h) * (pv.n_v - mv.n_v), f.n_vv));
      CHECK(close((0.5 / h) * (pu.x_u - mu.x_u), f.x_uu));
      CHECK(close((0.5 / h) * (pv.x_v - mv.x_v), f.x_vv));
      CHECK(close((0.5 / h) * (pu.n_uu - mu.n_uu), f.n_3[0]));
      CHECK(close((0.5 / h) * (pv.n_vv - mv.n_vv), f.n_3[3]));
    }
  }
}

TEST_CASE("normal congruences have bbar = 0") {
  std::mt19937_64 rng(23);
  for (const char* name : {"ellipsoid-normals", "torus-normals", "monkey-saddle-normals", "paraboloid-normals"}) {
    const CongruenceChart c = gallery_chart(name);
    for (int i = 0; i < 200; ++i) {
      auto [u, v] = random_point(c, rng);
      CHECK(std::abs(c.frame(u, v).fund.bbar) <= 1e-9);
    }
  }
}

TEST_CASE("recentering the directrix") {
  std::mt19937_64 rng(29);
  const CongruenceChart c = gallery_chart("perturbed-jet");
  const CongruenceChart same = recenter_directrix(c, CubicPoly{});
  const CongruenceChart moved = recenter_directrix(c, cubic({{"00", 1.0}, {"10", 1.0}}));
  for (int i = 0; i < 100; ++i) {
    auto [u, v] = random_point(c, rng);
    const PointFrame f = c.frame(u, v), g = same.frame(u, v), h = moved.frame(u, v);
    CHECK(norm(f.x - g.x) == 0);
    CHECK(f.fund.a == g.fund.a);
    const FormSet a = forms(f), b = forms(h);
    const double s = 1.0 + u;
    const QuadForm expected = a.q + s * a.q1;
    CHECK(max_abs(b.q - expected) <= 1e-12 * (1 + max_abs(expected)));
    CHECK(projective_angle(a.q2, b.q2) <= 1e-8);
    CHECK(projective_angle(a.q3, b.q3) <= 1e-8);
    CHECK(projective_angle(a.q4, b.q4) <= 1e-8);
  }
}

TEST_CASE("singular set functions") {
  const CongruenceChart j = gallery_chart("identity-jet");
  const auto g = sigma_n_function(j);
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    auto [u, v] = random_point(j, rng);
    CHECK(g(u, v) < 0);
  }
  // Graph normals: zero set is the parabolic set of the surface (K = 0).
  const CongruenceChart m = gallery_chart("torus-normals");
  CHECK(std::abs(sigma_n_function(m)(0.2, M_PI / 2)) <= 1e-12);
  CHECK(sigma_n_function(m)(0.2, 1.0) < -1e-3);
  const auto s = sigma_n_signed(m);
  CHECK(s(0.2, 1.4) * s(0.2, 1.8) < 0);
  const auto f = gallery_chart("fold-chart");
  CHECK(sigma_n_signed(f)(0.1, 0.05) * sigma_n_signed(f)(0.1, -0.05) < 0);
}

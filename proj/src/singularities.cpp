#include "clab/singularities.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "clab/error.hpp"
#include "clab/parallel.hpp"

namespace clab {

const char* to_string(LocusKind kind) {
  switch (kind) {
    case LocusKind::Parabolic: return "parabolic";
    case LocusKind::SigmaN: return "sigma-n";
    case LocusKind::Discriminant: return "discriminant";
    case LocusKind::Other: return "other";
  }
  return "?";
}

const char* to_string(SingularLabel label) {
  switch (label) {
    case SingularLabel::CuspFamily: return "CuspFamily";
    case SingularLabel::FoldedSaddle: return "FoldedSaddle";
    case SingularLabel::FoldedNode: return "FoldedNode";
    case SingularLabel::FoldedFocus: return "FoldedFocus";
    case SingularLabel::Lemon: return "Lemon";
    case SingularLabel::Star: return "Star";
    case SingularLabel::Monstar: return "Monstar";
    case SingularLabel::SigmaFold: return "SigmaFold";
    case SingularLabel::SigmaCusp: return "SigmaCusp";
    case SingularLabel::Degenerate: return "Degenerate";
  }
  return "?";
}

int folded_index(SingularLabel label) {
  switch (label) {
    case SingularLabel::FoldedSaddle: return 1;
    case SingularLabel::FoldedNode:
    case SingularLabel::FoldedFocus: return -1;
    default: return 0;
  }
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------- locus ----

double refine_edge(const ScalarField& f, Point2 a, double fa, Point2 b, double fb, Point2& out) {
  // Bisection on the segment a-b.
  double lo = 0.0, hi = 1.0, flo = fa;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Point2 m{a[0] + mid * (b[0] - a[0]), a[1] + mid * (b[1] - a[1])};
    const double fm = f(m[0], m[1]);
    if (std::isnan(fm)) break;
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-15) break;
  }
  (void)fb;
  const double t = 0.5 * (lo + hi);
  out = {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
  return t;
}

}  // namespace

std::vector<LocusCurve> extract_locus(const ScalarField& field, const Domain& domain, int nu, int nv,
                                      LocusKind kind) {
  nu = std::max(nu, 2);
  nv = std::max(nv, 2);
  const double hu = (domain.u_max - domain.u_min) / nu, hv = (domain.v_max - domain.v_min) / nv;
  auto node = [&](int i, int j) -> Point2 { return {domain.u_min + i * hu, domain.v_min + j * hv}; };
  const int NU = nu + 1, NV = nv + 1;
  std::vector<double> val(static_cast<std::size_t>(NU) * NV);
  parallel_for(val.size(), [&](std::size_t k) {
    const int i = static_cast<int>(k % NU), j = static_cast<int>(k / NU);
    const Point2 p = node(i, j);
    double f = kNaN;
    try {
      f = field(p[0], p[1]);
    } catch (const Error&) {
    }
    val[k] = f;
  });
  auto at = [&](int i, int j) { return val[static_cast<std::size_t>(j) * NU + i]; };
  auto neg = [](double f) { return f < 0.0; };

  // Edge ids: horizontal (i,j)-(i+1,j) -> 2*(j*NU+i), vertical (i,j)-(i,j+1) -> 2*(j*NU+i)+1.
  auto hid = [&](int i, int j) { return 2L * (static_cast<long>(j) * NU + i); };
  auto vid = [&](int i, int j) { return 2L * (static_cast<long>(j) * NU + i) + 1; };

  std::map<long, Point2> crossing;
  auto edge_point = [&](long id) -> Point2 {
    auto it = crossing.find(id);
    if (it != crossing.end()) return it->second;
    const long base = id / 2;
    const int i = static_cast<int>(base % NU), j = static_cast<int>(base / NU);
    const bool vertical = id % 2 == 1;
    const int i2 = vertical ? i : i + 1, j2 = vertical ? j + 1 : j;
    Point2 p;
    refine_edge(field, node(i, j), at(i, j), node(i2, j2), at(i2, j2), p);
    crossing[id] = p;
    return p;
  };

  std::vector<std::array<long, 2>> segments;
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nu; ++i) {
      const double f0 = at(i, j), f1 = at(i + 1, j), f2 = at(i + 1, j + 1), f3 = at(i, j + 1);
      if (std::isnan(f0) || std::isnan(f1) || std::isnan(f2) || std::isnan(f3)) continue;
      const bool s0 = neg(f0), s1 = neg(f1), s2 = neg(f2), s3 = neg(f3);
      const long e0 = hid(i, j), e1 = vid(i + 1, j), e2 = hid(i, j + 1), e3 = vid(i, j);
      std::vector<long> cut;
      if (s0 != s1) cut.push_back(e0);
      if (s1 != s2) cut.push_back(e1);
      if (s2 != s3) cut.push_back(e2);
      if (s3 != s0) cut.push_back(e3);
      if (cut.size() == 2) {
        segments.push_back({cut[0], cut[1]});
      } else if (cut.size() == 4) {
        const Point2 c{domain.u_min + (i + 0.5) * hu, domain.v_min + (j + 0.5) * hv};
        double fc = kNaN;
        try {
          fc = field(c[0], c[1]);
        } catch (const Error&) {
        }
        const bool sc = std::isnan(fc) ? s0 : neg(fc);
        if (sc == s0) {
          segments.push_back({e0, e1});
          segments.push_back({e2, e3});
        } else {
          segments.push_back({e3, e0});
          segments.push_back({e1, e2});
        }
      }
    }
  }

  // Chain segments through shared edges.
  std::map<long, std::vector<std::size_t>> by_edge;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    by_edge[segments[s][0]].push_back(s);
    by_edge[segments[s][1]].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<LocusCurve> out;
  auto walk = [&](std::size_t start, long from_edge, std::vector<long>& chain) {
    std::size_t s = start;
    long edge = from_edge;
    for (;;) {
      used[s] = true;
      const long next = segments[s][0] == edge ? segments[s][1] : segments[s][0];
      chain.push_back(next);
      std::size_t nxt = segments.size();
      for (std::size_t t : by_edge[next])
        if (!used[t]) nxt = t;
      if (nxt == segments.size()) return;
      s = nxt;
      edge = next;
    }
  };
  // Open chains first (start at edges with a single segment), then loops.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t s = 0; s < segments.size(); ++s) {
      if (used[s]) continue;
      long start_edge = segments[s][0];
      if (pass == 0) {
        if (by_edge[segments[s][0]].size() == 1) {
          start_edge = segments[s][0];
        } else if (by_edge[segments[s][1]].size() == 1) {
          start_edge = segments[s][1];
        } else {
          continue;
        }
      }
      std::vector<long> chain{start_edge};
      walk(s, start_edge, chain);
      LocusCurve c;
      c.kind = kind;
      c.closed = pass == 1 && chain.size() > 2 && chain.front() == chain.back();
      for (long e : chain) c.points.push_back(edge_point(e));
      out.push_back(std::move(c));
    }
  }
  return out;
}

namespace {

double frame_value(const CongruenceChart& chart, double u, double v, const std::function<double(const PointFrame&)>& g) {
  if (!chart.contains(u, v)) return kNaN;
  try {
    return g(chart.frame(u, v));
  } catch (const Error&) {
    return kNaN;
  }
}

int default_grid(int grid) { return std::max(grid, 8); }

}  // namespace

ScalarField sigma_field(const CongruenceChart& chart) {
  return [chart](double u, double v) {
    return frame_value(chart, u, v, [](const PointFrame& f) { return triple(f.n_u, f.n_v, f.n); });
  };
}

namespace {

double lens_input_scale(double dn, double dx, Lens lens) {
  const double base = std::max(dn * dx, dn * dn);
  switch (lens) {
    case Lens::Q3: return dn * dx;
    case Lens::Q2: return dn * dn * base;
    case Lens::Q4: return dn * dn * dn * dn * base;
    case Lens::Q5: return base * base * base;
  }
  return base;
}

}  // namespace

double lens_input_scale(const PointFrame& f, Lens lens) {
  return lens_input_scale(std::max(norm(f.n_u), norm(f.n_v)), std::max(norm(f.x_u), norm(f.x_v)), lens);
}

double lens_input_scale(const LineJet& j, Lens lens) {
  auto d = [](const Vec3<Jet<3>>& w, int i, int k) { return Vec3<double>{w[0].coeff(i, k), w[1].coeff(i, k), w[2].coeff(i, k)}; };
  const double dn = std::max(norm(d(j.n, 1, 0)), norm(d(j.n, 0, 1)));
  const double dx = std::max(norm(d(j.x, 1, 0)), norm(d(j.x, 0, 1)));
  return lens_input_scale(dn, dx, lens);
}

namespace {

double lens_discriminant(const PointFrame& f, Lens lens) {
  const QuadForm q = lens_form(f, lens);
  if (is_zero(q, lens_input_scale(f, lens), 1e-10)) return kNaN;
  return discriminant(q);
}

}  // namespace

ScalarField parabolic_field(const CongruenceChart& chart) {
  return [chart](double u, double v) {
    return frame_value(chart, u, v, [](const PointFrame& f) { return lens_discriminant(f, Lens::Q3); });
  };
}

ScalarField discriminant_field(const CongruenceChart& chart, Lens lens) {
  return [chart, lens](double u, double v) {
    return frame_value(chart, u, v, [lens](const PointFrame& f) { return lens_discriminant(f, lens); });
  };
}

std::vector<LocusCurve> parabolic_curves(const CongruenceChart& chart, int grid) {
  grid = default_grid(grid);
  return extract_locus(parabolic_field(chart), chart.domain(), grid, grid, LocusKind::Parabolic);
}

std::vector<LocusCurve> sigma_curves(const CongruenceChart& chart, int grid) {
  grid = default_grid(grid);
  return extract_locus(sigma_field(chart), chart.domain(), grid, grid, LocusKind::SigmaN);
}

std::vector<LocusCurve> discriminant_curves(const CongruenceChart& chart, Lens lens, int grid) {
  grid = default_grid(grid);
  auto curves = extract_locus(discriminant_field(chart, lens), chart.domain(), grid, grid, LocusKind::Discriminant);
  for (auto& c : curves) c.lens = lens;
  return curves;
}

// ------------------------------------------------------------- umbilics ----

namespace {

struct Q2Sample {
  double residual = kNaN;  // max |Q2| / (|Q1| |Q|)
};

double q2_scale(const FormSet& s) { return std::max(max_abs(s.q1) * max_abs(s.q), 1e-300); }

}  // namespace

UmbilicSearch find_umbilics(const CongruenceChart& chart, int grid) {
  grid = default_grid(grid);
  const Domain& d = chart.domain();
  const double hu = (d.u_max - d.u_min) / grid, hv = (d.v_max - d.v_min) / grid;
  const int N = grid + 1;
  std::vector<double> r(static_cast<std::size_t>(N) * N, kNaN);
  parallel_for(r.size(), [&](std::size_t k) {
    const double u = d.u_min + static_cast<int>(k % N) * hu, v = d.v_min + static_cast<int>(k / N) * hv;
    r[k] = frame_value(chart, u, v, [](const PointFrame& f) {
      const FormSet s = forms(f);
      return max_abs(s.q2) / q2_scale(s);
    });
  });
  UmbilicSearch out;
  bool all_zero = true;
  for (double x : r)
    if (!(x <= 1e-10)) all_zero = false;
  if (all_zero) {
    out.degenerate_everywhere = true;
    return out;
  }
  std::vector<Point2> seeds;
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      const double x = r[static_cast<std::size_t>(j) * N + i];
      if (std::isnan(x)) continue;
      bool minimum = true;
      for (int dj = -1; dj <= 1 && minimum; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const int a = i + di, b = j + dj;
          if ((di == 0 && dj == 0) || a < 0 || b < 0 || a >= N || b >= N) continue;
          const double y = r[static_cast<std::size_t>(b) * N + a];
          if (!std::isnan(y) && y < x) {
            minimum = false;
            break;
          }
        }
      if (minimum && x < 0.5) seeds.push_back({d.u_min + i * hu, d.v_min + j * hv});
    }
  }
  std::vector<std::optional<Point2>> found(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t k) {
    Point2 p = seeds[k];
    const double max_step = 2.0 * std::max(hu, hv);
    for (int it = 0; it < 60; ++it) {
      if (!chart.contains(p[0], p[1])) return;
      const LineJet lj = chart.line_jet(p[0], p[1]);
      const BinaryForm<Jet<2>> q = lens_jet(lj, Lens::Q2);
      const Jet<2>* c[3] = {&q.a0, &q.a1, &q.a2};
      double jtj[2][2] = {{0, 0}, {0, 0}}, jtr[2] = {0, 0}, res = 0;
      for (const Jet<2>* x : c) {
        const double g[2] = {x->coeff(1, 0), x->coeff(0, 1)};
        for (int a = 0; a < 2; ++a) {
          jtr[a] += g[a] * x->value();
          for (int b = 0; b < 2; ++b) jtj[a][b] += g[a] * g[b];
        }
        res = std::max(res, std::abs(x->value()));
      }
      const double det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
      if (!(std::abs(det) > 0)) return;
      double du = -(jtj[1][1] * jtr[0] - jtj[0][1] * jtr[1]) / det;
      double dv = -(jtj[0][0] * jtr[1] - jtj[1][0] * jtr[0]) / det;
      const double len = std::hypot(du, dv);
      if (len > max_step) {
        du *= max_step / len;
        dv *= max_step / len;
      }
      p = {p[0] + du, p[1] + dv};
      if (len < 1e-15) break;
    }
    if (!chart.contains(p[0], p[1])) return;
    const FormSet s = forms(chart.frame(p[0], p[1]));
    if (max_abs(s.q2) <= 1e-9 * std::max(1.0, q2_scale(s))) found[k] = p;
  });
  for (const auto& f : found) {
    if (!f) continue;
    bool dup = false;
    for (const auto& q : out.points)
      if (std::hypot(q[0] - (*f)[0], q[1] - (*f)[1]) < 1e-6) dup = true;
    if (!dup) out.points.push_back(*f);
  }
  std::sort(out.points.begin(), out.points.end());
  return out;
}

// ------------------------------------------------------ jet utilities ----

namespace {

// f(m00 U + m01 V, m10 U + m11 V) as a jet in (U, V).
template <int N>
Jet<N> compose_linear(const Jet<N>& f, double m00, double m01, double m10, double m11) {
  const Jet<N> U = Jet<N>::variable_u(0.0), V = Jet<N>::variable_v(0.0);
  const Jet<N> u = m00 * U + m01 * V, v = m10 * U + m11 * V;
  std::array<Jet<N>, N + 1> up, vp;
  up[0] = Jet<N>(1.0);
  vp[0] = Jet<N>(1.0);
  for (int k = 1; k <= N; ++k) {
    up[k] = up[k - 1] * u;
    vp[k] = vp[k - 1] * v;
  }
  Jet<N> r;
  for (int d = 0; d <= N; ++d)
    for (int j = 0; j <= d; ++j) r += f.coeff(d - j, j) * (up[d - j] * vp[j]);
  return r;
}

// The BDE in coordinates rotated by t: (u, v) = R(t)(U, V), (du, dv) = R(t)(dU, dV).
BinaryForm<Jet<2>> rotate_form(const BinaryForm<Jet<2>>& f, double t) {
  const double c = std::cos(t), s = std::sin(t);
  const Jet<2> P = compose_linear(f.a2, c, -s, s, c);  // du^2
  const Jet<2> A = compose_linear(f.a0, c, -s, s, c);  // dv^2
  const Jet<2> b = 0.5 * compose_linear(f.a1, c, -s, s, c);
  const Jet<2> m00 = (c * c) * P + (2 * c * s) * b + (s * s) * A;
  const Jet<2> m01 = (-c * s) * P + (c * c - s * s) * b + (c * s) * A;
  const Jet<2> m11 = (s * s) * P - (2 * c * s) * b + (c * c) * A;
  return {m11, 2.0 * m01, m00};
}

QuadForm value_of(const BinaryForm<Jet<2>>& f) { return {f.a0.value(), f.a1.value(), f.a2.value()}; }

// Unit vector spanning the eigenspace of the eigenvalue of smallest modulus of
// the symmetric matrix [[p, b], [b, a]].
std::array<double, 2> small_eigenvector(double p, double b, double a) {
  const double tr = 0.5 * (p + a), dif = 0.5 * (p - a);
  const double rad = std::hypot(dif, b);
  const double l1 = tr + rad, l2 = tr - rad;
  const double l = std::abs(l1) < std::abs(l2) ? l1 : l2;
  // (M - l) w = 0: rows (p - l, b), (b, a - l).
  std::array<double, 2> w1{b, l - p}, w2{l - a, b};
  auto& w = std::hypot(w1[0], w1[1]) >= std::hypot(w2[0], w2[1]) ? w1 : w2;
  const double n = std::hypot(w[0], w[1]);
  if (n == 0.0) return {1.0, 0.0};
  return {w[0] / n, w[1] / n};
}

std::vector<double> real_cubic_roots(double c3, double c2, double c1, double c0, double& disc) {
  const double s = std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
  c3 /= s;
  c2 /= s;
  c1 /= s;
  c0 /= s;
  disc = 18 * c3 * c2 * c1 * c0 - 4 * c2 * c2 * c2 * c0 + c2 * c2 * c1 * c1 - 4 * c3 * c1 * c1 * c1 -
         27 * c3 * c3 * c0 * c0;
  const double A = c2 / c3, B = c1 / c3, C = c0 / c3;
  const double P = B - A * A / 3.0, Q = 2 * A * A * A / 27.0 - A * B / 3.0 + C;
  std::vector<double> roots;
  const double D = 0.25 * Q * Q + P * P * P / 27.0;
  if (D > 0) {
    const double sq = std::sqrt(D);
    roots.push_back(std::cbrt(-0.5 * Q + sq) + std::cbrt(-0.5 * Q - sq) - A / 3.0);
  } else {
    const double r = std::sqrt(std::max(-P / 3.0, 0.0));
    const double arg = r > 0 ? std::clamp(-0.5 * Q / (r * r * r), -1.0, 1.0) : 0.0;
    const double th = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) roots.push_back(2 * r * std::cos(th - 2 * M_PI * k / 3.0) - A / 3.0);
  }
  for (double& x : roots) {
    for (int it = 0; it < 4; ++it) {
      const double f = ((c3 * x + c2) * x + c1) * x + c0, df = (3 * c3 * x + 2 * c2) * x + c1;
      if (df == 0) break;
      x -= f / df;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

BinaryForm<Jet<2>> form_of(const UmbilicJet& j) {
  BinaryForm<Jet<2>> f;
  f.a0.coeff(1, 0) = j.a1;
  f.a0.coeff(0, 1) = j.a2;
  f.a1.coeff(1, 0) = 2 * j.b1;
  f.a1.coeff(0, 1) = 2 * j.b2;
  f.a2.coeff(1, 0) = j.c1;
  f.a2.coeff(0, 1) = j.c2;
  return f;
}

}  // namespace

UmbilicJet umbilic_jet_of(const BinaryForm<Jet<2>>& f) {
  return {f.a0.coeff(1, 0),       f.a0.coeff(0, 1),       0.5 * f.a1.coeff(1, 0),
          0.5 * f.a1.coeff(0, 1), f.a2.coeff(1, 0),       f.a2.coeff(0, 1)};
}

SingularityReport classify_umbilic_jet(const UmbilicJet& j0) {
  SingularityReport r;
  r.kind = "umbilic";
  const double scale = std::max({std::abs(j0.a1), std::abs(j0.a2), std::abs(j0.b1), std::abs(j0.b2),
                                 std::abs(j0.c1), std::abs(j0.c2)});
  if (scale == 0.0) throw Error(ErrorCode::NotMorse, "the 1-jet of the BDE vanishes");
  const double h11 = j0.b1 * j0.b1 - j0.a1 * j0.c1;
  const double h12 = j0.b1 * j0.b2 - 0.5 * (j0.a1 * j0.c2 + j0.a2 * j0.c1);
  const double h22 = j0.b2 * j0.b2 - j0.a2 * j0.c2;
  if (!(h11 * h22 - h12 * h12 > 1e-10 * std::pow(scale, 4)))
    throw Error(ErrorCode::NotMorse, "the discriminant is not a Morse A1+ zero");

  // Rotate so that the dv^2 coefficient has a nonzero v-derivative (no root of
  // phi at infinity).
  UmbilicJet j = j0;
  if (std::abs(j.a2) < 0.1 * scale) {
    double best = -1;
    for (int k = 1; k < 12; ++k) {
      const double t = k * M_PI / 12.0;
      const UmbilicJet c = umbilic_jet_of(rotate_form(form_of(j0), t));
      if (std::abs(c.a2) > best) {
        best = std::abs(c.a2);
        j = c;
        r.diag.rotation = t;
      }
    }
  }
  auto phi_d = [&](double p) { return (3 * j.a2 * p + 2 * (2 * j.b2 + j.a1)) * p + (2 * j.b1 + j.c2); };
  auto alpha = [&](double p) { return (j.a2 * p + (j.b2 + j.a1)) * p + j.b1; };
  double disc = 0;
  const std::vector<double> roots = real_cubic_roots(j.a2, 2 * j.b2 + j.a1, 2 * j.b1 + j.c2, j.c1, disc);
  r.diag.phi_roots = roots;
  if (std::abs(disc) < 1e-10) {
    r.label = SingularLabel::Degenerate;
    return r;
  }
  if (disc < 0) {
    r.diag.phi_roots.resize(1);
    r.label = SingularLabel::Lemon;
    const double t = alpha(roots[0]) * phi_d(roots[0]);
    r.diag.alpha_signs = {t > 0 ? 1 : (t < 0 ? -1 : 0)};
    return r;
  }
  bool all_positive = true;
  for (double p : roots) {
    const double t = alpha(p) * phi_d(p);
    const double ts = std::abs(t) / (scale * scale * (1 + p * p) * (1 + p * p));
    const int sgn = ts < 1e-12 ? 0 : (t > 0 ? 1 : -1);
    r.diag.alpha_signs.push_back(sgn);
    if (sgn == 0) {
      r.label = SingularLabel::Degenerate;
      return r;
    }
    if (sgn < 0) all_positive = false;
  }
  r.label = all_positive ? SingularLabel::Star : SingularLabel::Monstar;
  return r;
}

SingularityReport classify_umbilic(const CongruenceChart& chart, Point2 at, Lens lens) {
  const BinaryForm<Jet<2>> f = lens_jet(chart.line_jet(at[0], at[1]), lens);
  const UmbilicJet j = umbilic_jet_of(f);
  const double grad = std::max({std::abs(j.a1), std::abs(j.a2), std::abs(j.b1), std::abs(j.b2), std::abs(j.c1),
                                std::abs(j.c2)});
  const double val = max_abs(value_of(f));
  if (!(val <= 1e-6 * grad) && val > 0.0)
    throw Error(ErrorCode::NotUmbilic, std::string(to_string(lens)) + " does not vanish at the point");
  SingularityReport r = classify_umbilic_jet(j);
  r.at = at;
  r.lens = lens;
  return r;
}

// ------------------------------------------------------------- folded ----

SingularityReport classify_folded_jet(const BinaryForm<Jet<2>>& form) {
  SingularityReport r;
  r.kind = "folded";
  const QuadForm q = value_of(form);
  const double s = max_abs(q);
  if (s == 0.0) throw Error(ErrorCode::AllCoefficientsZero, "all BDE coefficients vanish");
  if (std::abs(discriminant(q)) > 1e-6 * s * s)
    throw Error(ErrorCode::NotOnDiscriminant, "the point is not on the discriminant");
  // Double direction -> (1, 0), i.e. p = dv/du = 0.
  const auto w = small_eigenvector(q.a2, 0.5 * q.a1, q.a0);
  const double t = std::atan2(w[1], w[0]);
  r.diag.rotation = t;
  const BinaryForm<Jet<2>> g = rotate_form(form, t);
  const double a0 = g.a0.value();
  const double b1 = g.a1.coeff(1, 0);
  const double c1 = g.a2.coeff(1, 0), c2 = g.a2.coeff(0, 1), c3 = g.a2.coeff(2, 0);
  const double cs = std::max(std::abs(c1), std::abs(c2));
  if (std::abs(c1) > 1e-6 * std::max(cs, 1e-300) && std::abs(c1) > 1e-14 * s) {
    r.kind = "cusp-family";
    r.label = SingularLabel::CuspFamily;
    return r;
  }
  if (!(std::abs(c2) > 1e-12 * s)) {
    r.label = SingularLabel::Degenerate;
    return r;
  }
  const double lambda = (4 * a0 * c3 - b1 * b1 - b1 * c2) / (4 * c2 * c2);
  r.diag.lambda = lambda;
  if (std::abs(lambda) <= 1e-9 || std::abs(lambda - 1.0 / 16.0) <= 1e-9) {
    r.label = SingularLabel::Degenerate;
  } else if (lambda < 0) {
    r.label = SingularLabel::FoldedSaddle;
  } else if (lambda < 1.0 / 16.0) {
    r.label = SingularLabel::FoldedNode;
  } else {
    r.label = SingularLabel::FoldedFocus;
  }
  return r;
}

SingularityReport classify_on_discriminant(const CongruenceChart& chart, Point2 at, Lens lens) {
  SingularityReport r = classify_folded_jet(lens_jet(chart.line_jet(at[0], at[1]), lens));
  r.at = at;
  r.lens = lens;
  return r;
}

namespace {

struct FoldEval {
  double delta = 0, g = 0;
  double delta_grad[2] = {0, 0}, g_grad[2] = {0, 0};
  double grad_norm = 0;
  std::array<double, 2> kernel{};
};

// G = kernel . grad(delta) with the kernel taken as (a, -b) or (-b, c)
// (mode 0 / 1), both smooth.
FoldEval fold_eval(const CongruenceChart& chart, Point2 p, Lens lens, int mode) {
  const BinaryForm<Jet<2>> f = lens_jet(chart.line_jet(p[0], p[1]), lens);
  const Jet<2> b = 0.5 * f.a1;
  const Jet<2> delta = b * b - f.a0 * f.a2;
  const Jet<1> du = delta.du(), dv = delta.dv();
  const Jet<1> a1 = f.a0.truncate<1>(), b1 = b.truncate<1>(), c1 = f.a2.truncate<1>();
  // Kernel of [[c, b], [b, a]] on (du, dv): (a, -b) or (-b, c).
  const Jet<1> k0 = mode == 0 ? a1 : -b1;
  const Jet<1> k1 = mode == 0 ? -b1 : c1;
  const Jet<1> g = k0 * du + k1 * dv;
  FoldEval e;
  e.delta = delta.value();
  e.delta_grad[0] = delta.coeff(1, 0);
  e.delta_grad[1] = delta.coeff(0, 1);
  e.g = g.value();
  e.g_grad[0] = g.coeff(1, 0);
  e.g_grad[1] = g.coeff(0, 1);
  e.grad_norm = std::hypot(e.delta_grad[0], e.delta_grad[1]);
  e.kernel = {k0.value(), k1.value()};
  return e;
}

}  // namespace

std::vector<Point2> find_folded_points(const CongruenceChart& chart, Lens lens, int grid) {
  const auto curves = discriminant_curves(chart, lens, grid);
  std::vector<Point2> seeds;
  for (const auto& c : curves) {
    std::array<double, 2> prev_w{0, 0};
    double prev_g = kNaN;
    Point2 prev_p{};
    for (const Point2& p : c.points) {
      if (!chart.contains(p[0], p[1])) {
        prev_g = kNaN;
        continue;
      }
      const QuadForm q = lens_form(chart.frame(p[0], p[1]), lens);
      if (max_abs(q) == 0.0) continue;
      std::array<double, 2> w = small_eigenvector(q.a2, 0.5 * q.a1, q.a0);
      if (w[0] * prev_w[0] + w[1] * prev_w[1] < 0) w = {-w[0], -w[1]};
      const FoldEval e = fold_eval(chart, p, lens, 0);
      const double g = e.grad_norm > 0 ? (w[0] * e.delta_grad[0] + w[1] * e.delta_grad[1]) / e.grad_norm : kNaN;
      if (!std::isnan(prev_g) && !std::isnan(g) && (g < 0) != (prev_g < 0)) {
        const double t = prev_g / (prev_g - g);
        seeds.push_back({prev_p[0] + t * (p[0] - prev_p[0]), prev_p[1] + t * (p[1] - prev_p[1])});
      }
      prev_w = w;
      prev_g = g;
      prev_p = p;
    }
  }
  std::vector<std::optional<Point2>> found(seeds.size());
  const Domain& d = chart.domain();
  const double cell = std::max(d.u_max - d.u_min, d.v_max - d.v_min) / default_grid(grid);
  parallel_for(seeds.size(), [&](std::size_t k) {
    Point2 p = seeds[k];
    try {
      const QuadForm q0 = lens_form(chart.frame(p[0], p[1]), lens);
      const int mode = std::abs(q0.a0) >= std::abs(q0.a2) ? 0 : 1;
      for (int it = 0; it < 50; ++it) {
        const FoldEval e = fold_eval(chart, p, lens, mode);
        const double det = e.delta_grad[0] * e.g_grad[1] - e.delta_grad[1] * e.g_grad[0];
        if (det == 0.0) return;
        double du = -(e.g_grad[1] * e.delta - e.delta_grad[1] * e.g) / det;
        double dv = -(-e.g_grad[0] * e.delta + e.delta_grad[0] * e.g) / det;
        const double len = std::hypot(du, dv);
        if (len > cell) {
          du *= cell / len;
          dv *= cell / len;
        }
        p = {p[0] + du, p[1] + dv};
        if (!chart.contains(p[0], p[1])) return;
        if (len < 1e-14) break;
      }
      const FoldEval e = fold_eval(chart, p, lens, mode);
      const QuadForm q = lens_form(chart.frame(p[0], p[1]), lens);
      const double s = max_abs(q);
      const Jet<2> lam = sigma_jet(chart.line_jet(p[0], p[1]));
      const bool on_sigma = std::abs(lam.value()) <= 1e-6 * std::hypot(lam.coeff(1, 0), lam.coeff(0, 1));
      if (!on_sigma && std::abs(e.delta) <= 1e-10 * s * s && std::abs(e.g) <= 1e-8 * s * e.grad_norm + 1e-300)
        found[k] = p;
    } catch (const Error&) {
    }
  });
  std::vector<Point2> out;
  for (const auto& f : found) {
    if (!f) continue;
    bool dup = false;
    for (const auto& q : out)
      if (std::hypot(q[0] - (*f)[0], q[1] - (*f)[1]) < 1e-6) dup = true;
    if (!dup) out.push_back(*f);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ------------------------------------------------------------ Sigma(n) ----

std::optional<Point2> common_zero(const ScalarField& f, const ScalarField& g, Point2 p, double tol, int iterations) {
  for (int it = 0; it < iterations; ++it) {
    const double fv = f(p[0], p[1]), gv = g(p[0], p[1]);
    if (std::isnan(fv) || std::isnan(gv)) return std::nullopt;
    const double h = 1e-6 * (1.0 + std::max(std::abs(p[0]), std::abs(p[1])));
    const double fu = (f(p[0] + h, p[1]) - f(p[0] - h, p[1])) / (2 * h);
    const double fw = (f(p[0], p[1] + h) - f(p[0], p[1] - h)) / (2 * h);
    const double gu = (g(p[0] + h, p[1]) - g(p[0] - h, p[1])) / (2 * h);
    const double gw = (g(p[0], p[1] + h) - g(p[0], p[1] - h)) / (2 * h);
    // Already on both zero sets to within tol (this also covers tangencies,
    // where the Jacobian is singular at the solution).
    if (std::abs(fv) <= tol * std::hypot(fu, fw) && std::abs(gv) <= tol * std::hypot(gu, gw)) return p;
    const double det = fu * gw - fw * gu;
    if (!(std::abs(det) > 0)) return std::nullopt;
    const double du = -(gw * fv - fw * gv) / det, dv = -(-gu * fv + fu * gv) / det;
    p = {p[0] + du, p[1] + dv};
    if (std::hypot(du, dv) < tol) return p;
  }
  return std::nullopt;
}

namespace {

// Kernel direction of dn at a point (null direction of Q1).
std::array<double, 2> kernel_direction(const PointFrame& f) {
  return small_eigenvector(f.fund.A, f.fund.B, f.fund.C);
}

// det(n_u, n_v, n) and its gradient.
struct SigmaEval {
  double value, gu, gv;
};
SigmaEval sigma_eval(const CongruenceChart& chart, Point2 p) {
  const Jet<2> l = sigma_jet(chart.line_jet(p[0], p[1]));
  return {l.value(), l.coeff(1, 0), l.coeff(0, 1)};
}

// grad(lambda) . k with k = (-B, A) or (C, -B): smooth, zero where the kernel is
// tangent to the singular set.
ScalarField kernel_tangency_field(const CongruenceChart& chart, int mode) {
  return [chart, mode](double u, double v) {
    if (!chart.contains(u, v)) return kNaN;
    const PointFrame f = chart.frame(u, v);
    const SigmaEval s = sigma_eval(chart, {u, v});
    const double k0 = mode == 0 ? -f.fund.B : f.fund.C, k1 = mode == 0 ? f.fund.A : -f.fund.B;
    return s.gu * k0 + s.gv * k1;
  };
}

// Slope dy/ds of the principal direction on sheet `sheet` in the frame
// (e1, e2) based at the point; the square root carries the sign of lambda so
// that each sheet continues smoothly across the singular set.
double principal_slope(const CongruenceChart& chart, double u, double v, const std::array<double, 2>& e1,
                       const std::array<double, 2>& e2, int sheet) {
  const PointFrame f = chart.frame(u, v);
  const QuadForm q = forms(f).q2;
  const double lam = triple(f.n_u, f.n_v, f.n);
  const double P = q.a2, b = 0.5 * q.a1, A = q.a0;
  auto quad = [&](const std::array<double, 2>& x, const std::array<double, 2>& y) {
    return P * x[0] * y[0] + b * (x[0] * y[1] + x[1] * y[0]) + A * x[1] * y[1];
  };
  const double c_ = quad(e1, e1), b_ = quad(e1, e2), a_ = quad(e2, e2);
  const double disc = std::max(b_ * b_ - a_ * c_, 0.0);
  const double sg = lam < 0 ? -1.0 : 1.0;
  return (-b_ + sheet * sg * std::sqrt(disc)) / a_;
}

double integrate_sheet(const CongruenceChart& chart, Point2 p, const std::array<double, 2>& e1,
                       const std::array<double, 2>& e2, int sheet, double h) {
  const int steps = 200;
  const double ds = h / steps;
  double s = 0, y = 0;
  auto slope = [&](double s_, double y_) {
    return principal_slope(chart, p[0] + s_ * e1[0] + y_ * e2[0], p[1] + s_ * e1[1] + y_ * e2[1], e1, e2, sheet);
  };
  for (int i = 0; i < steps; ++i) {
    const double k1 = slope(s, y), k2 = slope(s + 0.5 * ds, y + 0.5 * ds * k1);
    const double k3 = slope(s + 0.5 * ds, y + 0.5 * ds * k2), k4 = slope(s + ds, y + ds * k3);
    y += ds * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
    s += ds;
  }
  return y;
}

std::optional<int> measured_order(const std::function<double(double)>& gap, double h) {
  const double d1 = gap(h), d2 = gap(0.5 * h);
  if (!(d1 > 0) || !(d2 > 0)) return std::nullopt;
  const double m = std::log2(d1 / d2);
  if (!std::isfinite(m)) return std::nullopt;
  return static_cast<int>(std::lround(m));
}

double step_scale(const CongruenceChart& chart) {
  const Domain& d = chart.domain();
  return 0.02 * std::min(d.u_max - d.u_min, d.v_max - d.v_min);
}

// Offset y along `normal` from base + s * tangent where field vanishes.
std::optional<double> normal_offset(const ScalarField& field, Point2 base, const std::array<double, 2>& t,
                                    const std::array<double, 2>& n, double s, double span) {
  auto at = [&](double y) { return field(base[0] + s * t[0] + y * n[0], base[1] + s * t[1] + y * n[1]); };
  // Bracket outward from 0, then bisect.
  double lo = -span, hi = span;
  double flo = at(lo), fhi = at(hi);
  if (std::isnan(flo) || std::isnan(fhi) || (flo < 0) == (fhi < 0)) {
    // Search a smaller symmetric bracket containing a sign change.
    bool ok = false;
    const int n_probe = 64;
    double prev = at(-span), prev_y = -span;
    for (int i = 1; i <= n_probe; ++i) {
      const double y = -span + 2 * span * i / n_probe, fy = at(y);
      if (!std::isnan(prev) && !std::isnan(fy) && (prev < 0) != (fy < 0)) {
        lo = prev_y;
        hi = y;
        flo = prev;
        ok = true;
        break;
      }
      prev = fy;
      prev_y = y;
    }
    if (!ok) return std::nullopt;
  }
  for (int it = 0; it < 100 && hi - lo > 1e-16; ++it) {
    const double m = 0.5 * (lo + hi), fm = at(m);
    if ((fm < 0) == (flo < 0)) {
      lo = m;
      flo = fm;
    } else {
      hi = m;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::optional<int> parabolic_sigma_tangency(const CongruenceChart& chart, Point2 at) {
  const ScalarField sig = sigma_field(chart), par = parabolic_field(chart);
  const auto p = common_zero(sig, par, at);
  if (!p) return std::nullopt;
  const SigmaEval s = sigma_eval(chart, *p);
  const double g = std::hypot(s.gu, s.gv);
  const std::array<double, 2> n{s.gu / g, s.gv / g}, t{-n[1], n[0]};
  const double h = step_scale(chart);
  auto gap = [&](double step) {
    double total = 0;
    for (double sgn : {1.0, -1.0}) {
      const auto ys = normal_offset(sig, *p, t, n, sgn * step, step);
      const auto yp = normal_offset(par, *p, t, n, sgn * step, step);
      if (!ys || !yp) return kNaN;
      total += std::abs(*ys - *yp);
    }
    return total;
  };
  return measured_order(gap, h);
}

SingularityReport classify_sigma_n(const CongruenceChart& chart, Point2 at) {
  SingularityReport r;
  r.kind = "sigma";
  r.at = at;
  r.lens = Lens::Q2;
  const SigmaEval s = sigma_eval(chart, at);
  const double g = std::hypot(s.gu, s.gv);
  if (!(g > 0) || std::abs(s.value) > 1e-6 * g)
    throw Error(ErrorCode::NotOnSigmaN, "the point is not on the singular set of n");
  const PointFrame f = chart.frame(at[0], at[1]);
  const auto k = kernel_direction(f);
  const double trans = std::abs(s.gu * k[0] + s.gv * k[1]) / g;
  r.diag.transversality = trans;
  if (trans > 1e-4) {
    r.label = SingularLabel::SigmaFold;
  } else {
    const int mode = std::abs(f.fund.A) >= std::abs(f.fund.C) ? 0 : 1;
    const ScalarField eta = kernel_tangency_field(chart, mode);
    const double h = 1e-5;
    const double eu = (eta(at[0] + h, at[1]) - eta(at[0] - h, at[1])) / (2 * h);
    const double ev = (eta(at[0], at[1] + h) - eta(at[0], at[1] - h)) / (2 * h);
    const double along = std::abs(-s.gv * eu + s.gu * ev) / g;
    r.label = along > 1e-3 * std::max(std::hypot(eu, ev), 1e-300) && along > 1e-9 ? SingularLabel::SigmaCusp
                                                                                    : SingularLabel::Degenerate;
  }

  // Contact of the two extended principal leaves through the point, both
  // tangent to the kernel direction.
  const std::array<double, 2> e1 = k, e2{-k[1], k[0]};
  const double hstep = step_scale(chart);
  auto gap = [&](double h) {
    try {
      double total = 0;
      for (double sgn : {1.0, -1.0}) {
        const std::array<double, 2> d1{sgn * e1[0], sgn * e1[1]};
        total += std::abs(integrate_sheet(chart, at, d1, e2, 1, h) - integrate_sheet(chart, at, d1, e2, -1, h));
      }
      return total;
    } catch (const Error&) {
      return kNaN;
    }
  };
  r.diag.contact_order = measured_order(gap, hstep);

  const QuadForm t = torsal_unit_form(f);
  const double ts = max_abs(t);
  if (ts > 0 && std::abs(discriminant(t)) <= 1e-8 * ts * ts) {
    r.diag.parabolic_on_sigma = true;
    r.diag.tangency_order = parabolic_sigma_tangency(chart, at);
  }
  return r;
}

std::vector<Point2> sigma_special_points(const CongruenceChart& chart, int grid) {
  std::vector<Point2> out;
  const ScalarField sig = sigma_field(chart), par = parabolic_field(chart);
  for (const auto& c : sigma_curves(chart, grid)) {
    if (c.points.size() < 3) continue;
    out.push_back(c.points[c.points.size() / 2]);
    std::array<double, 2> prev_k{0, 0};
    double prev_eta = kNaN, prev_par = kNaN;
    Point2 prev{};
    for (const Point2& p : c.points) {
      if (!chart.contains(p[0], p[1])) continue;
      const PointFrame f = chart.frame(p[0], p[1]);
      auto k = kernel_direction(f);
      if (k[0] * prev_k[0] + k[1] * prev_k[1] < 0) k = {-k[0], -k[1]};
      const SigmaEval s = sigma_eval(chart, p);
      const double eta = (s.gu * k[0] + s.gv * k[1]) / std::max(std::hypot(s.gu, s.gv), 1e-300);
      const double pv = par(p[0], p[1]);
      if (!std::isnan(prev_eta) && (eta < 0) != (prev_eta < 0)) {
        const int mode = std::abs(f.fund.A) >= std::abs(f.fund.C) ? 0 : 1;
        if (auto z = common_zero(sig, kernel_tangency_field(chart, mode), p)) out.push_back(*z);
      }
      if (!std::isnan(prev_par) && !std::isnan(pv) && (pv < 0) != (prev_par < 0)) {
        if (auto z = common_zero(sig, par, {0.5 * (p[0] + prev[0]), 0.5 * (p[1] + prev[1])})) out.push_back(*z);
      }
      prev_k = k;
      prev_eta = eta;
      prev_par = pv;
      prev = p;
    }
  }
  std::vector<Point2> uniq;
  for (const auto& p : out) {
    if (!chart.contains(p[0], p[1])) continue;
    bool dup = false;
    for (const auto& q : uniq)
      if (std::hypot(p[0] - q[0], p[1] - q[1]) < 1e-6) dup = true;
    if (!dup) uniq.push_back(p);
  }
  return uniq;
}

std::vector<SingularityReport> classify_chart(const CongruenceChart& chart, Lens lens, int grid) {
  std::vector<SingularityReport> out;
  if (lens == Lens::Q2 || lens == Lens::Q4 || lens == Lens::Q5) {
    const UmbilicSearch us = find_umbilics(chart, grid);
    for (const Point2& p : us.points) {
      try {
        out.push_back(classify_umbilic(chart, p, lens));
      } catch (const Error&) {
        SingularityReport r;
        r.kind = "umbilic";
        r.at = p;
        r.lens = lens;
        r.label = SingularLabel::Degenerate;
        out.push_back(r);
      }
    }
  }
  if (lens == Lens::Q3 || lens == Lens::Q5) {
    for (const Point2& p : find_folded_points(chart, lens, grid)) {
      try {
        out.push_back(classify_on_discriminant(chart, p, lens));
      } catch (const Error&) {
      }
    }
  }
  for (const Point2& p : sigma_special_points(chart, grid)) {
    try {
      out.push_back(classify_sigma_n(chart, p));
    } catch (const Error&) {
    }
  }
  return out;
}

void write_report_header(std::ostream& os) {
  os << "kind\tlens\tu\tv\tlabel\tlambda\tphi_roots\talpha_signs\tcontact_order\tflags\n";
}

void write_report_row(std::ostream& os, const SingularityReport& r) {
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::string(buf);
  };
  os << r.kind << '\t' << to_string(r.lens) << '\t' << num(r.at[0]) << '\t' << num(r.at[1]) << '\t'
     << to_string(r.label) << '\t' << (r.diag.lambda ? num(*r.diag.lambda) : "-") << '\t';
  if (r.diag.phi_roots.empty()) os << '-';
  for (std::size_t i = 0; i < r.diag.phi_roots.size(); ++i) os << (i ? "," : "") << num(r.diag.phi_roots[i]);
  os << '\t';
  if (r.diag.alpha_signs.empty()) os << '-';
  for (std::size_t i = 0; i < r.diag.alpha_signs.size(); ++i)
    os << (i ? "," : "") << (r.diag.alpha_signs[i] > 0 ? "+" : (r.diag.alpha_signs[i] < 0 ? "-" : "0"));
  os << '\t' << (r.diag.contact_order ? std::to_string(*r.diag.contact_order) : "-") << '\t';
  std::string flags;
  if (r.diag.parabolic_on_sigma) flags += "parabolic";
  if (r.diag.tangency_order) flags += (flags.empty() ? "" : ",") + std::string("tangency=") + std::to_string(*r.diag.tangency_order);
  os << (flags.empty() ? "-" : flags) << '\n';
}

}  // namespace clab

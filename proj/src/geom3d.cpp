#include "clab/geom3d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "clab/error.hpp"
#include "clab/formfields.hpp"
#include "clab/parallel.hpp"
#include "clab/singularities.hpp"

namespace clab {

namespace {

// Roots of r^2 - 2 h r + p = 0 given d = h^2 - p >= 0, sign-matched so the
// smaller-magnitude root comes from the product.
std::vector<double> centred_roots(double h, double p, double d) {
  const double s = std::sqrt(std::max(d, 0.0));
  const double r1 = h + std::copysign(s, h);
  const double r2 = r1 != 0.0 ? p / r1 : h;
  std::vector<double> out{r1, r2};
  std::sort(out.begin(), out.end());
  return out;
}

// H^2 - K as d(Q2) / (B^2 - AC)^2. At umbilics Q2 is itself at rounding
// level, so this stays at rounding level squared where the pencil route does
// not, and the collapsed pair is exact to working precision.
double half_width_sq(const PointFrame& frame) {
  const Fundamentals& f = frame.fund;
  const double g = f.B * f.B - f.A * f.C;
  return std::max(discriminant(forms(frame).q2), 0.0) / (kPrincipalDiscriminantConstant * g * g);
}

double frame_scale(const Fundamentals& f) {
  return std::max({std::abs(f.a), std::abs(f.b1), std::abs(f.b2), std::abs(f.c)});
}

std::string format_g12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
  return buf;
}

std::string format_g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

RuledData ruled_data(const PointFrame& frame, const Direction& dir) {
  const FormSet s = forms(frame);
  const double q1 = evaluate(s.q1, dir);
  if (q1 <= 1e-12 * max_abs(s.q1) * (dir.du * dir.du + dir.dv * dir.dv) || q1 <= 0.0) {
    throw Error(ErrorCode::KernelDirection, "n' vanishes along the direction");
  }
  RuledData d;
  d.at = {frame.u, frame.v};
  d.dir = dir;
  d.r = -evaluate(s.q, dir) / q1;
  d.pitch = evaluate(torsal_unit_form(frame), dir) / q1;

  const Vec3<double> xp = dir.du * frame.x_u + dir.dv * frame.x_v;
  const Vec3<double> np = dir.du * frame.n_u + dir.dv * frame.n_v;
  const double nn = dot(np, np);
  d.r_direct = -dot(xp, np) / nn;
  d.pitch_direct = triple(xp, frame.n, np) / nn;
  return d;
}

double characteristic_shift(const PointFrame& frame) {
  const PointInvariants inv = point_invariants(frame);
  if (inv.on_sigma_n) throw Error(ErrorCode::OnSigmaN, "H and K are undefined on the singular set of n");
  const Fundamentals& f = frame.fund;
  if (std::abs(f.bbar) <= 1e-12 * frame_scale(f)) {
    throw Error(ErrorCode::NormalCongruenceDegenerate, "bbar vanishes; the characteristic quadratic is undefined");
  }
  const double hk = half_width_sq(frame);
  return (f.A * f.C - f.B * f.B) * hk * hk / (f.bbar * f.bbar);
}

LinePoints line_points(const PointFrame& frame) {
  const PointInvariants inv = point_invariants(frame);
  if (inv.on_sigma_n) throw Error(ErrorCode::OnSigmaN, "H and K are undefined on the singular set of n");
  LinePoints p;
  p.at = {frame.u, frame.v};
  const double H = *inv.H, K = *inv.K, hk = half_width_sq(frame);
  p.middle = H;
  p.boundary = centred_roots(H, H * H - hk, hk);

  const QuadForm t = torsal_unit_form(frame);
  if (is_zero(t, lens_input_scale(frame, Lens::Q3), 1e-10)) {
    p.focal = p.boundary;  // every direction is torsal
  } else {
    const RootSet rs = roots(t);
    for (const auto& d : rs.directions) p.focal.push_back(ruled_data(frame, d).r);
    if (rs.double_root) p.focal.push_back(p.focal.front());
    std::sort(p.focal.begin(), p.focal.end());
  }

  try {
    const double s = characteristic_shift(frame);
    const double d = hk - s;
    const double tol = 1e-12 * (H * H + std::abs(K));
    if (d >= -tol) p.characteristic = centred_roots(H, H * H - std::max(d, 0.0), d);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NormalCongruenceDegenerate) throw;
    p.characteristic_degenerate = true;
  }
  const QuadForm q5 = lens_form(frame, Lens::Q5);
  if (!is_zero(q5, lens_input_scale(frame, Lens::Q5), 1e-10)) {
    const RootSet rs = roots(q5);
    for (const auto& d : rs.directions) p.characteristic_by_direction.push_back(ruled_data(frame, d).r);
    if (rs.double_root) p.characteristic_by_direction.push_back(p.characteristic_by_direction.front());
    std::sort(p.characteristic_by_direction.begin(), p.characteristic_by_direction.end());
  }
  return p;
}

const char* to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::Boundary: return "boundary";
    case SurfaceKind::Middle: return "middle";
    case SurfaceKind::Focal: return "focal";
    case SurfaceKind::Characteristic: return "characteristic";
  }
  return "unknown";
}

std::optional<SurfaceKind> parse_surface_kind(const std::string& name) {
  for (SurfaceKind k : {SurfaceKind::Boundary, SurfaceKind::Middle, SurfaceKind::Focal, SurfaceKind::Characteristic})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

std::vector<double> surface_offsets(const LinePoints& p, SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::Boundary: return p.boundary;
    case SurfaceKind::Middle: return {p.middle};
    case SurfaceKind::Focal: return p.focal;
    case SurfaceKind::Characteristic: return p.characteristic;
  }
  return {};
}

LinePointGrid sample_line_points(const CongruenceChart& chart, int grid) {
  if (grid < 1) throw Error(ErrorCode::RangeError, "grid must be positive");
  LinePointGrid g;
  g.grid = grid;
  g.domain = chart.domain();
  const int n = grid + 1;
  g.nodes.resize(static_cast<std::size_t>(n) * n);
  g.lines.resize(g.nodes.size());
  const Domain& d = g.domain;
  parallel_for(g.nodes.size(), [&](std::size_t k) {
    const int i = static_cast<int>(k % n), j = static_cast<int>(k / n);
    const double u = d.u_min + (d.u_max - d.u_min) * i / grid;
    const double v = d.v_min + (d.v_max - d.v_min) * j / grid;
    if (!chart.contains(u, v)) return;
    try {
      const PointFrame f = chart.frame(u, v);
      g.lines[k] = std::array<Vec3<double>, 2>{f.x, f.n};
      g.nodes[k] = line_points(f);
    } catch (const Error&) {
      // hole: undefined frame or singular set of n
    }
  });
  return g;
}

Mesh sweep_surface(const LinePointGrid& samples, SurfaceKind kind) {
  if (samples.grid < 16) throw Error(ErrorCode::RangeError, "surface grid must be at least 16");
  const int n = samples.grid + 1;
  const std::size_t count = kind == SurfaceKind::Middle ? 1 : 2;
  Mesh mesh;
  mesh.kind = kind;
  for (std::size_t sheet = 0; sheet < count; ++sheet) {
    MeshSheet m;
    m.name = std::string(to_string(kind)) + "_" + std::to_string(sheet + 1);
    std::vector<int> index(samples.nodes.size(), -1);
    std::vector<Vec3<double>> pos(samples.nodes.size());
    std::vector<char> valid(samples.nodes.size(), 0);
    for (std::size_t k = 0; k < samples.nodes.size(); ++k) {
      if (!samples.nodes[k]) continue;
      const std::vector<double> r = surface_offsets(*samples.nodes[k], kind);
      if (r.size() != count) continue;
      const auto& [x, nv] = *samples.lines[k];
      pos[k] = x + r[sheet] * nv;
      valid[k] = 1;
    }
    auto vertex = [&](std::size_t k) {
      if (index[k] < 0) {
        index[k] = static_cast<int>(m.vertices.size());
        m.vertices.push_back(pos[k]);
      }
      return index[k];
    };
    for (int j = 0; j + 1 < n; ++j)
      for (int i = 0; i + 1 < n; ++i) {
        const std::size_t c[4] = {static_cast<std::size_t>(j * n + i), static_cast<std::size_t>(j * n + i + 1),
                                  static_cast<std::size_t>((j + 1) * n + i + 1),
                                  static_cast<std::size_t>((j + 1) * n + i)};
        const int live = valid[c[0]] + valid[c[1]] + valid[c[2]] + valid[c[3]];
        if (live < 3) continue;
        std::vector<int> face;
        for (std::size_t k : c)
          if (valid[k]) face.push_back(vertex(k));
        m.faces.push_back(std::move(face));
      }
    mesh.sheets.push_back(std::move(m));
  }
  return mesh;
}

std::vector<std::vector<Vec3<double>>> sheet_features(const CongruenceChart& chart, SurfaceKind kind, int grid) {
  auto at_middle = [&](double u, double v) -> std::optional<Vec3<double>> {
    try {
      const PointFrame f = chart.frame(u, v);
      const PointInvariants inv = point_invariants(f);
      if (!inv.H) return std::nullopt;
      return f.x + (*inv.H) * f.n;
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  std::vector<std::vector<Vec3<double>>> out;
  if (kind == SurfaceKind::Boundary) {
    const UmbilicSearch s = find_umbilics(chart);
    if (!s.degenerate_everywhere)
      for (const auto& p : s.points)
        if (auto q = at_middle(p[0], p[1])) out.push_back({*q});
  } else if (kind != SurfaceKind::Middle) {
    for (const auto& curve : parabolic_curves(chart, grid)) {
      std::vector<Vec3<double>> line;
      for (const auto& p : curve.points) {
        if (auto q = at_middle(p[0], p[1])) {
          line.push_back(*q);
        } else if (!line.empty()) {
          out.push_back(std::move(line));
          line.clear();
        }
      }
      if (!line.empty()) out.push_back(std::move(line));
    }
  }
  return out;
}

Mesh sweep_surface(const CongruenceChart& chart, SurfaceKind kind, int grid) {
  if (grid < 16) throw Error(ErrorCode::RangeError, "surface grid must be at least 16");
  Mesh mesh = sweep_surface(sample_line_points(chart, grid), kind);
  mesh.features = sheet_features(chart, kind, grid);
  return mesh;
}

void write_obj(std::ostream& os, const Mesh& mesh) {
  std::size_t base = 1;
  for (const auto& s : mesh.sheets) {
    os << "o " << s.name << '\n';
    for (const auto& v : s.vertices) os << "v " << format_g12(v[0]) << ' ' << format_g12(v[1]) << ' ' << format_g12(v[2]) << '\n';
    for (const auto& f : s.faces) {
      os << 'f';
      for (int k : f) os << ' ' << base + static_cast<std::size_t>(k);
      os << '\n';
    }
    base += s.vertices.size();
  }
}

void write_line_points_csv(std::ostream& os, const LinePointGrid& samples) {
  os << "u,v,boundary1,boundary2,middle,focal1,focal2,characteristic1,characteristic2\n";
  const int n = samples.grid + 1;
  const Domain& d = samples.domain;
  auto pair = [&](const std::vector<double>& r) {
    return r.size() == 2 ? format_g17(r[0]) + "," + format_g17(r[1]) : std::string("nan,nan");
  };
  for (std::size_t k = 0; k < samples.nodes.size(); ++k) {
    const int i = static_cast<int>(k % n), j = static_cast<int>(k / n);
    os << format_g17(d.u_min + (d.u_max - d.u_min) * i / samples.grid) << ','
       << format_g17(d.v_min + (d.v_max - d.v_min) * j / samples.grid) << ',';
    if (!samples.nodes[k]) {
      os << "nan,nan,nan,nan,nan,nan,nan\n";
      continue;
    }
    const LinePoints& p = *samples.nodes[k];
    os << pair(p.boundary) << ',' << format_g17(p.middle) << ',' << pair(p.focal) << ',' << pair(p.characteristic)
       << '\n';
  }
}

}  // namespace clab

#include "clab/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

#include "clab/error.hpp"
#include "clab/parallel.hpp"

namespace clab {

namespace {

constexpr double kPi = std::numbers::pi;

struct State {
  double u = 0, v = 0, t = 0;
};

State axpy(const State& y, double h, const std::array<double, 3>& k) {
  return {y.u + h * k[0], y.v + h * k[1], y.t + h * k[2]};
}

struct LeftDomain {};
struct Stalled {};

double lifted_value(const FieldSample& s, double t) { return evaluate(s.form, std::cos(t), std::sin(t)); }

double lifted_theta_derivative(const FieldSample& s, double t) {
  const QuadForm& q = s.form;
  return (q.a0 - q.a2) * std::sin(2 * t) + q.a1 * std::cos(2 * t);
}

double reference_scale(const FieldSample& s) { return s.scale > 0.0 ? s.scale : max_abs(s.form); }

// Unit-speed lifted field with a fixed orientation.
class Lift {
 public:
  Lift(const BdeField& field, double orientation) : field_(field), orientation_(orientation) {}

  FieldSample sample(double u, double v) const {
    if (!field_.contains(u, v)) throw LeftDomain{};
    try {
      return field_.sample(u, v);
    } catch (const Error&) {
      throw LeftDomain{};
    }
  }

  std::array<double, 3> operator()(const State& y) const {
    const FieldSample s = sample(y.u, y.v);
    auto x = lifted_field(s, y.t);
    const double n = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (!(n > 0.0) || !std::isfinite(n)) throw Stalled{};
    const double k = orientation_ * s.sheet / n;
    return {k * x[0], k * x[1], k * x[2]};
  }

  // Signed speed of the (u, v) motion along (cos t, sin t).
  double velocity(const State& y) const {
    const FieldSample s = sample(y.u, y.v);
    return orientation_ * s.sheet * lifted_theta_derivative(s, y.t);
  }

 private:
  const BdeField& field_;
  double orientation_;
};

State rk4(const Lift& f, const State& y, double h) {
  const auto k1 = f(y);
  const auto k2 = f(axpy(y, 0.5 * h, k1));
  const auto k3 = f(axpy(y, 0.5 * h, k2));
  const auto k4 = f(axpy(y, h, k3));
  return {y.u + h * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6.0,
          y.v + h * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6.0,
          y.t + h * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]) / 6.0};
}

// One Newton correction back onto F = 0 along grad F.
State project(const Lift& f, const State& y) {
  try {
    const FieldSample s = f.sample(y.u, y.v);
    const double c = std::cos(y.t), sn = std::sin(y.t);
    const double F = lifted_value(s, y.t);
    const double gu = evaluate(s.form_u, c, sn), gv = evaluate(s.form_v, c, sn);
    const double gt = lifted_theta_derivative(s, y.t);
    const double g2 = gu * gu + gv * gv + gt * gt;
    if (!(g2 > 0.0)) return y;
    const State z{y.u - F * gu / g2, y.v - F * gv / g2, y.t - F * gt / g2};
    f.sample(z.u, z.v);
    return z;
  } catch (const LeftDomain&) {
    return y;
  }
}

struct HalfTrace {
  std::vector<State> states;
  std::vector<Point2> turning_points;
  Termination termination = Termination::StepLimit;
  bool closed = false;
};

// A leaf that keeps folding back at the discriminant is spiralling into a
// folded singularity.
constexpr std::size_t kMaxTurns = 64;

double segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  const double l2 = dx * dx + dy * dy;
  double t = l2 > 0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p[0] - a[0] - t * dx, p[1] - a[1] - t * dy);
}

Termination stall_kind(const Lift& f, const State& y, double seed_scale) {
  try {
    const FieldSample s = f.sample(y.u, y.v);
    if (max_abs(s.form) <= 1e-6 * seed_scale) return Termination::SingularPoint;
    const double c = std::cos(y.t), sn = std::sin(y.t);
    const double gu = evaluate(s.form_u, c, sn), gv = evaluate(s.form_v, c, sn);
    if (std::abs(lifted_theta_derivative(s, y.t)) <= 1e-3 * std::hypot(gu, gv) * 1.0) return Termination::DiscriminantContact;
  } catch (const LeftDomain&) {
    return Termination::DomainExit;
  }
  return Termination::StepLimit;
}

bool near_singular(const BdeField& field, const State& y, double radius) {
  for (const auto& p : field.singular_points)
    if (std::hypot(y.u - p[0], y.v - p[1]) < radius) return true;
  return false;
}

// Cusp of the projected leaf inside the step y -> y(h): bisect on the step
// length for the zero of the (u, v) speed.
std::optional<Point2> locate_turn(const Lift& f, const State& y, double h, double w0) {
  double lo = 0.0, hi = h;
  State at = y;
  for (int i = 0; i < 60 && hi - lo > 1e-15 * h; ++i) {
    const double mid = 0.5 * (lo + hi);
    try {
      at = rk4(f, y, mid);
      const double w = f.velocity(at);
      if ((w > 0) == (w0 > 0)) lo = mid; else hi = mid;
    } catch (...) {
      return std::nullopt;
    }
  }
  at = project(f, at);
  return Point2{at.u, at.v};
}

HalfTrace trace_half(const BdeField& field, State y, double orientation, const StepControl& ctl, double seed_scale) {
  const Lift f(field, orientation);
  HalfTrace out;
  out.states.push_back(y);
  const Domain& d = field.domain;
  const double exit_step = 1e-9 * std::max(d.u_max - d.u_min, d.v_max - d.v_min);
  double h = ctl.initial_step;
  int steps = 0;
  double w_prev = f.velocity(y);
  const State start = y;
  const Point2 seed{y.u, y.v};
  double arc = 0.0;
  while (steps < ctl.max_steps) {
    State full, half;
    try {
      full = rk4(f, y, h);
      half = rk4(f, rk4(f, y, 0.5 * h), 0.5 * h);
      f.sample(half.u, half.v);
    } catch (const LeftDomain&) {
      if (h <= exit_step) {
        out.termination = Termination::DomainExit;
        return out;
      }
      h *= 0.5;
      continue;
    } catch (const Stalled&) {
      if (h <= ctl.min_step) {
        out.termination = stall_kind(f, y, seed_scale);
        return out;
      }
      h *= 0.5;
      continue;
    }
    const double err = std::max({std::abs(full.u - half.u), std::abs(full.v - half.v), std::abs(full.t - half.t)});
    if (!(err <= ctl.tolerance)) {
      h *= std::isfinite(err) ? std::max(0.1, 0.9 * std::pow(ctl.tolerance / err, 0.2)) : 0.1;
      if (h < ctl.min_step) {
        out.termination = stall_kind(f, y, seed_scale);
        return out;
      }
      continue;
    }
    const State next = project(f, half);
    double w = 0.0;
    try {
      w = f.velocity(next);
    } catch (const LeftDomain&) {
      h *= 0.5;
      continue;
    }
    if (w != 0.0 && w_prev != 0.0 && (w > 0) != (w_prev > 0)) {
      if (auto p = locate_turn(f, y, h, w_prev)) out.turning_points.push_back(*p);
    }
    if (w != 0.0) w_prev = w;
    const Point2 a{y.u, y.v}, b{next.u, next.v};
    const double seg = std::hypot(b[0] - a[0], b[1] - a[1]);
    y = next;
    out.states.push_back(y);
    ++steps;
    arc += seg;
    if (arc > 8.0 * ctl.max_step && segment_distance(seed, a, b) <= 1e-6 * std::max(seg, ctl.max_step)) {
      const double dt = std::remainder(y.t - start.t, kPi);
      if (std::abs(dt) < 1e-3) {
        out.states.back() = {seed[0], seed[1], start.t + (y.t - start.t - dt)};
        out.closed = true;
        return out;
      }
    }
    if (out.turning_points.size() >= kMaxTurns) {
      out.termination = Termination::DiscriminantContact;
      return out;
    }
    if (near_singular(field, y, ctl.singular_radius)) {
      out.termination = Termination::SingularPoint;
      return out;
    }
    const double grow = err > 0.0 ? 0.9 * std::pow(ctl.tolerance / err, 0.2) : 2.0;
    h = std::min(ctl.max_step, h * std::clamp(grow, 0.2, 2.0));
  }
  out.termination = Termination::StepLimit;
  return out;
}

double line_angle_of(const Direction& d) { return std::atan2(d.dv, d.du); }

}  // namespace

const char* to_string(Termination t) {
  switch (t) {
    case Termination::DomainExit: return "DomainExit";
    case Termination::DiscriminantContact: return "DiscriminantContact";
    case Termination::StepLimit: return "StepLimit";
    case Termination::SingularPoint: return "SingularPoint";
  }
  return "?";
}

BdeField constant_field(const QuadForm& q, const Domain& domain) {
  BdeField f;
  f.sample = [q](double, double) { return FieldSample{q, {}, {}, 1.0, 0.0}; };
  f.contains = [domain](double u, double v) { return domain.contains(u, v); };
  f.domain = domain;
  return f;
}

BdeField lens_field(const CongruenceChart& chart, Lens lens, bool locate_singular) {
  BdeField f;
  const bool signed_sheet = lens == Lens::Q2 || lens == Lens::Q4;
  f.sample = [chart, lens, signed_sheet](double u, double v) {
    const LineJet jet = chart.line_jet(u, v);
    const BinaryForm<Jet<2>> j = lens_jet(jet, lens);
    FieldSample s;
    s.form = {j.a0.value(), j.a1.value(), j.a2.value()};
    s.form_u = {j.a0.coeff(1, 0), j.a1.coeff(1, 0), j.a2.coeff(1, 0)};
    s.form_v = {j.a0.coeff(0, 1), j.a1.coeff(0, 1), j.a2.coeff(0, 1)};
    if (signed_sheet) s.sheet = sigma_jet(jet).value() < 0.0 ? -1.0 : 1.0;
    s.scale = lens_input_scale(jet, lens);
    return s;
  };
  f.contains = [chart](double u, double v) { return chart.contains(u, v); };
  f.domain = chart.domain();
  f.lens = lens;
  if (locate_singular && lens != Lens::Q3) {
    const UmbilicSearch s = find_umbilics(chart);
    if (!s.degenerate_everywhere) f.singular_points = s.points;
  }
  return f;
}

std::array<double, 3> lifted_field(const FieldSample& s, double theta) {
  const double c = std::cos(theta), sn = std::sin(theta);
  const double ft = lifted_theta_derivative(s, theta);
  const double fu = evaluate(s.form_u, c, sn), fv = evaluate(s.form_v, c, sn);
  return {ft * c, ft * sn, -(fu * c + fv * sn)};
}

std::vector<Direction> branch_fields(const QuadForm& form, double scale, std::optional<Direction> previous) {
  const double ref = scale > 0.0 ? scale : max_abs(form);
  if (max_abs(form) == 0.0 || is_zero(form, ref, 1e-10)) throw Error(ErrorCode::DegeneratePoint, "all coefficients vanish");
  const RootSet r = roots(form);
  if (r.directions.empty()) throw Error(ErrorCode::EllipticPoint, "no real direction (delta < 0)");
  std::vector<Direction> out = r.directions;
  if (previous && out.size() == 2 && angular_distance(out[1], *previous) < angular_distance(out[0], *previous))
    std::swap(out[0], out[1]);
  return out;
}

TracedCurve trace(const BdeField& field, Point2 seed, int branch, const StepControl& ctl) {
  if (branch != 1 && branch != 2) throw Error(ErrorCode::RangeError, "branch must be 1 or 2");
  if (!(ctl.initial_step > 0) || !(ctl.max_step > 0) || !(ctl.tolerance > 0) || ctl.max_steps <= 0)
    throw Error(ErrorCode::RangeError, "step controls must be positive");
  if (!field.contains(seed[0], seed[1])) throw Error(ErrorCode::OutOfDomain, "seed outside the region");
  const FieldSample s0 = field.sample(seed[0], seed[1]);
  const double scale = reference_scale(s0);
  if (max_abs(s0.form) == 0.0 || is_zero(s0.form, scale, 1e-10))
    throw Error(ErrorCode::SeedDegenerate, "lens form vanishes at the seed");
  const RootSet r = roots(s0.form);
  if (r.directions.empty()) throw Error(ErrorCode::SeedElliptic, "no real direction at the seed");
  const Direction dir = r.directions[std::min<std::size_t>(branch - 1, r.directions.size() - 1)];
  const State y0{seed[0], seed[1], line_angle_of(dir)};

  const double w = s0.sheet * lifted_theta_derivative(s0, y0.t);
  const double orientation = w < 0.0 ? -1.0 : 1.0;
  const HalfTrace fwd = trace_half(field, y0, orientation, ctl, scale);
  HalfTrace back;
  if (fwd.closed) {
    back.states = {y0};
    back.termination = fwd.termination;
  } else {
    back = trace_half(field, y0, -orientation, ctl, scale);
  }

  TracedCurve c;
  c.branch = branch;
  c.lens = field.lens;
  c.seed = seed;
  c.termination = fwd.termination;
  c.start_termination = back.termination;
  c.closed = fwd.closed;
  for (std::size_t i = back.states.size(); i-- > 1;) {
    c.points.push_back({back.states[i].u, back.states[i].v});
    c.angles.push_back(back.states[i].t);
  }
  c.seed_vertex = c.points.size();
  for (const State& y : fwd.states) {
    c.points.push_back({y.u, y.v});
    c.angles.push_back(y.t);
  }
  for (auto it = back.turning_points.rbegin(); it != back.turning_points.rend(); ++it) c.turning_points.push_back(*it);
  c.turning_points.insert(c.turning_points.end(), fwd.turning_points.begin(), fwd.turning_points.end());
  return c;
}

TracedCurve trace(const CongruenceChart& chart, Lens lens, Point2 seed, int branch, const StepControl& control) {
  return trace(lens_field(chart, lens), seed, branch, control);
}

double tangency_residual(const BdeField& field, const TracedCurve& curve) {
  double worst = 0.0;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const FieldSample s = field.sample(curve.points[i][0], curve.points[i][1]);
    const double m = max_abs(s.form);
    if (m == 0.0) continue;
    worst = std::max(worst, std::abs(lifted_value(s, curve.angles[i])) / m);
  }
  return worst;
}

void validate(const PortraitSpec& spec) {
  if (!(spec.seed_density > 0) || !std::isfinite(spec.seed_density))
    throw Error(ErrorCode::RangeError, "seed density must be positive");
  const StepControl& c = spec.steps;
  if (!(c.initial_step > 0) || !(c.min_step > 0) || !(c.max_step > 0) || !(c.tolerance > 0) || c.max_steps <= 0 ||
      !(c.singular_radius >= 0))
    throw Error(ErrorCode::RangeError, "step controls must be positive");
  if (spec.locus_grid < 2) throw Error(ErrorCode::RangeError, "locus grid must be at least 2");
  if (spec.region && (!(spec.region->u_max > spec.region->u_min) || !(spec.region->v_max > spec.region->v_min)))
    throw Error(ErrorCode::RangeError, "empty portrait region");
}

namespace {

// Vertex buckets of the accepted curves.
class CurveIndex {
 public:
  CurveIndex(const Domain& region, double cell) : region_(region), cell_(cell) {}

  void add(const TracedCurve& c, std::size_t id) {
    for (std::size_t k = 0; k < c.points.size(); ++k) buckets_[key(c.points[k])].push_back({id, k});
  }

  // True if an accepted curve passes within `radius` of p with a tangent
  // within `max_angle` of d.
  bool covers(const std::vector<TracedCurve>& curves, const Point2& p, double d_angle, double radius,
              double max_angle) const {
    const auto [i0, j0] = key(p);
    const Direction d = Direction::from_angle(d_angle);
    for (long i = i0 - 1; i <= i0 + 1; ++i) {
      for (long j = j0 - 1; j <= j0 + 1; ++j) {
        auto it = buckets_.find({i, j});
        if (it == buckets_.end()) continue;
        for (const auto& [id, k] : it->second) {
          const auto& pts = curves[id].points;
          for (std::size_t m = (k > 0 ? k - 1 : k); m + 1 < pts.size() && m <= k; ++m) {
            if (segment_distance(p, pts[m], pts[m + 1]) >= radius) continue;
            const double dx = pts[m + 1][0] - pts[m][0], dy = pts[m + 1][1] - pts[m][1];
            if (dx == 0.0 && dy == 0.0) continue;
            if (angular_distance(Direction::normalized(dx, dy), d) < max_angle) return true;
          }
        }
      }
    }
    return false;
  }

 private:
  std::pair<long, long> key(const Point2& p) const {
    return {static_cast<long>(std::floor((p[0] - region_.u_min) / cell_)),
            static_cast<long>(std::floor((p[1] - region_.v_min) / cell_))};
  }

  Domain region_;
  double cell_;
  std::map<std::pair<long, long>, std::vector<std::pair<std::size_t, std::size_t>>> buckets_;
};

}  // namespace

Portrait portrait(const BdeField& field, const PortraitSpec& spec) {
  validate(spec);
  Domain region = spec.region.value_or(field.domain);
  region.u_min = std::max(region.u_min, field.domain.u_min);
  region.u_max = std::min(region.u_max, field.domain.u_max);
  region.v_min = std::max(region.v_min, field.domain.v_min);
  region.v_max = std::min(region.v_max, field.domain.v_max);
  if (!(region.u_max > region.u_min) || !(region.v_max > region.v_min))
    throw Error(ErrorCode::RangeError, "portrait region misses the chart domain");

  const double wu = region.u_max - region.u_min, wv = region.v_max - region.v_min;
  const int nu = std::max(1, static_cast<int>(std::ceil(wu * spec.seed_density)));
  const int nv = std::max(1, static_cast<int>(std::ceil(wv * spec.seed_density)));
  const double spacing = std::min(wu / nu, wv / nv);

  StepControl ctl = spec.steps;
  ctl.max_step = std::min(ctl.max_step, 0.25 * spacing);
  ctl.initial_step = std::min(ctl.initial_step, ctl.max_step);

  BdeField restricted = field;
  restricted.domain = region;
  restricted.contains = [field, region](double u, double v) { return region.contains(u, v) && field.contains(u, v); };

  // Seeds are visited in grid order; a seed is traced only if no accepted
  // leaf of the same direction passes within half a spacing. Work is done in
  // parallel batches, and acceptance is decided sequentially, so the result
  // does not depend on the thread count.
  struct Item {
    Point2 seed{};
    double angle = 0.0;
    int branch = 1;
    std::size_t index = 0;
  };
  std::vector<Item> items;
  const std::size_t seeds = static_cast<std::size_t>(nu) * nv;
  for (std::size_t k = 0; k < seeds; ++k) {
    const Point2 seed{region.u_min + (static_cast<double>(k % nu) + 0.5) * wu / nu,
                      region.v_min + (static_cast<double>(k / nu) + 0.5) * wv / nv};
    try {
      if (!restricted.contains(seed[0], seed[1])) continue;
      const FieldSample s = restricted.sample(seed[0], seed[1]);
      const double m = max_abs(s.form);
      if (m == 0.0 || is_zero(s.form, reference_scale(s), 1e-10)) continue;
      if (discriminant((1.0 / m) * s.form) < 0.0) continue;
      const RootSet r = roots(s.form);
      for (std::size_t b = 0; b < r.directions.size(); ++b)
        items.push_back({seed, line_angle_of(r.directions[b]), static_cast<int>(b) + 1, k});
    } catch (const Error&) {
    }
  }

  const double radius = 0.5 * spacing, max_angle = 0.3;
  Portrait out;
  CurveIndex index(region, radius);
  const std::size_t batch = std::max<std::size_t>(8, 4 * static_cast<std::size_t>(thread_count()));
  for (std::size_t start = 0; start < items.size(); start += batch) {
    const std::size_t end = std::min(items.size(), start + batch);
    std::vector<std::optional<TracedCurve>> traced(end - start);
    std::vector<std::size_t> todo;
    for (std::size_t i = start; i < end; ++i)
      if (!index.covers(out.curves, items[i].seed, items[i].angle, radius, max_angle)) todo.push_back(i);
    parallel_for(todo.size(), [&](std::size_t j) {
      const Item& it = items[todo[j]];
      try {
        TracedCurve c = trace(restricted, it.seed, it.branch, ctl);
        c.seed_index = it.index;
        traced[todo[j] - start] = std::move(c);
      } catch (const Error&) {
      }
    });
    for (auto& c : traced) {
      if (!c || index.covers(out.curves, c->seed, c->angles[c->seed_vertex], radius, max_angle)) continue;
      out.curves.push_back(std::move(*c));
      index.add(out.curves.back(), out.curves.size() - 1);
    }
  }
  return out;
}

Portrait portrait(const CongruenceChart& chart, const PortraitSpec& spec) {
  validate(spec);
  Portrait out = portrait(lens_field(chart, spec.lens), spec);
  if (spec.overlays) {
    const CongruenceChart c = spec.region ? chart.with_domain(*spec.region) : chart;
    for (auto& l : discriminant_curves(c, spec.lens, spec.locus_grid)) out.loci.push_back(std::move(l));
    for (auto& l : sigma_curves(c, spec.locus_grid)) out.loci.push_back(std::move(l));
    out.singularities = classify_chart(c, spec.lens, spec.locus_grid);
  }
  return out;
}

RadialAnalysis radial_analysis(const BdeField& field, Point2 centre, double radius, int samples) {
  if (!(radius > 0) || samples < 8) throw Error(ErrorCode::RangeError, "radius and sample count must be positive");
  RadialAnalysis out;
  std::vector<double> g(samples);
  bool elliptic = false;
  double start = 0, angle = 0;
  for (int k = 0; k < samples; ++k) {
    const double phi = 2 * kPi * k / samples;
    const double c = std::cos(phi), s = std::sin(phi);
    const FieldSample fs = field.sample(centre[0] + radius * c, centre[1] + radius * s);
    g[k] = evaluate(fs.form, c, s) / max_abs(fs.form);
    const RootSet r = roots(fs.form);
    if (r.directions.empty()) {
      elliptic = true;
      continue;
    }
    if (k == 0) {
      start = angle = r.directions[0].line_angle();
      continue;
    }
    double best = 0;
    double best_gap = 1e300;
    for (const auto& d : r.directions) {
      double step = d.line_angle() - angle;
      step -= kPi * std::round(step / kPi);
      if (std::abs(step) < best_gap) best_gap = std::abs(step), best = step;
    }
    angle += best;
  }
  if (!elliptic) {
    // close the loop back at the first sample
    const FieldSample fs = field.sample(centre[0] + radius, centre[1]);
    const RootSet r = roots(fs.form);
    double best = 0, best_gap = 1e300;
    for (const auto& d : r.directions) {
      double step = d.line_angle() - angle;
      step -= kPi * std::round(step / kPi);
      if (std::abs(step) < best_gap) best_gap = std::abs(step), best = step;
    }
    angle += best;
    out.index = (angle - start) / (2 * kPi);
  } else {
    out.index = std::numeric_limits<double>::quiet_NaN();
  }
  for (int k = 0; k < samples; ++k) {
    const double a = g[k], b = g[(k + 1) % samples];
    if ((a > 0 && b <= 0) || (a < 0 && b >= 0)) ++out.sign_changes;
  }
  out.rays = out.sign_changes / 2;
  return out;
}

void write_curve_csv(std::ostream& os, const TracedCurve& curve) {
  os << "u,v,branch\n";
  char buf[96];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", p[0], p[1], curve.branch);
    os << buf;
  }
}

}  // namespace clab

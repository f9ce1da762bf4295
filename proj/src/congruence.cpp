#include "clab/congruence.hpp"

#include <cmath>
#include <utility>

#include "clab/error.hpp"

namespace clab {

namespace {

template <int N, int M>
Vec3<Jet<M>> truncate3(const Vec3<Jet<N>>& a) {
  return {a[0].template truncate<M>(), a[1].template truncate<M>(), a[2].template truncate<M>()};
}

template <int N>
Vec3<Jet<N - 1>> d_u(const Vec3<Jet<N>>& a) {
  return {a[0].du(), a[1].du(), a[2].du()};
}
template <int N>
Vec3<Jet<N - 1>> d_v(const Vec3<Jet<N>>& a) {
  return {a[0].dv(), a[1].dv(), a[2].dv()};
}

Vec3<double> partial(const Vec3<Jet<3>>& a, int i, int j) {
  return {a[0].derivative(i, j), a[1].derivative(i, j), a[2].derivative(i, j)};
}

class JetChartModel final : public ChartModel {
 public:
  explicit JetChartModel(JetChartParams p) : p_(std::move(p)) {}
  ChartKind kind() const override { return ChartKind::Jet; }
  bool valid_at(double u, double v) const override {
    const double a = p_.n1.eval(u, v), b = p_.n2.eval(u, v);
    return a * a + b * b < 1.0;
  }
  LineJet line_jet(double u, double v) const override {
    const auto ju = Jet<3>::variable_u(u), jv = Jet<3>::variable_v(v);
    const Jet<3> n1 = p_.n1.eval(ju, jv), n2 = p_.n2.eval(ju, jv);
    LineJet out;
    out.n = {n1, n2, sqrt(1.0 - n1 * n1 - n2 * n2)};
    out.x = {p_.x1.eval(ju, jv), p_.x2.eval(ju, jv), Jet<3>(0.0)};
    return out;
  }

 private:
  JetChartParams p_;
};

class SurfaceNormalModel final : public ChartModel {
 public:
  explicit SurfaceNormalModel(std::shared_ptr<const Surface> s) : s_(std::move(s)) {}
  ChartKind kind() const override { return ChartKind::SurfaceNormal; }
  LineJet line_jet(double u, double v) const override {
    const Vec3<Jet<4>> X = s_->point(Jet<4>::variable_u(u), Jet<4>::variable_v(v));
    const Vec3<Jet<3>> Xu = d_u(X), Xv = d_v(X);
    const Vec3<Jet<3>> N = cross(Xu, Xv);
    const Jet<3> len2 = dot(N, N);
    const double scale = std::sqrt(dot(Xu, Xu).value() * dot(Xv, Xv).value());
    if (!(len2.value() > 1e-24 * scale * scale)) {
      throw Error(ErrorCode::DegenerateImmersion, s_->name() + " is not immersive at (" + std::to_string(u) +
                                                      ", " + std::to_string(v) + ")");
    }
    const Jet<3> inv_len = reciprocal(sqrt(len2));
    LineJet out;
    out.n = {N[0] * inv_len, N[1] * inv_len, N[2] * inv_len};
    out.x = truncate3<4, 3>(X);
    return out;
  }

 private:
  std::shared_ptr<const Surface> s_;
};

class CallableModel final : public ChartModel {
 public:
  CallableModel(JetMap map, int order) : map_(std::move(map)), order_(order) {}
  ChartKind kind() const override { return ChartKind::Callable; }
  int derivative_order() const override { return order_; }
  LineJet line_jet(double u, double v) const override {
    return map_(Jet<3>::variable_u(u), Jet<3>::variable_v(v));
  }

 private:
  JetMap map_;
  int order_;
};

class RecenteredModel final : public ChartModel {
 public:
  RecenteredModel(std::shared_ptr<const ChartModel> base, CubicPoly f) : base_(std::move(base)), f_(f) {}
  ChartKind kind() const override { return base_->kind(); }
  bool valid_at(double u, double v) const override { return base_->valid_at(u, v); }
  int derivative_order() const override { return base_->derivative_order(); }
  LineJet line_jet(double u, double v) const override {
    LineJet j = base_->line_jet(u, v);
    const Jet<3> f = f_.eval(Jet<3>::variable_u(u), Jet<3>::variable_v(v));
    for (int k = 0; k < 3; ++k) j.x[k] += f * j.n[k];
    return j;
  }

 private:
  std::shared_ptr<const ChartModel> base_;
  CubicPoly f_;
};

class SphereSurface final : public Surface {
 public:
  explicit SphereSurface(double r) : r_(r) {}
  Vec3<Jet<4>> point(const Jet<4>& u, const Jet<4>& v) const override {
    const Jet<4> cv = cos(v);
    return {r_ * cv * cos(u), r_ * cv * sin(u), r_ * sin(v)};
  }
  std::string name() const override { return "sphere"; }

 private:
  double r_;
};

class EllipsoidSurface final : public Surface {
 public:
  EllipsoidSurface(double a, double b, double c) : a_(a), b_(b), c_(c) {}
  Vec3<Jet<4>> point(const Jet<4>& u, const Jet<4>& v) const override {
    const Jet<4> cv = cos(v);
    return {a_ * cv * cos(u), b_ * cv * sin(u), c_ * sin(v)};
  }
  std::string name() const override { return "ellipsoid"; }

 private:
  double a_, b_, c_;
};

class TorusSurface final : public Surface {
 public:
  TorusSurface(double major, double minor) : R_(major), r_(minor) {}
  Vec3<Jet<4>> point(const Jet<4>& u, const Jet<4>& v) const override {
    const Jet<4> rho = R_ + r_ * cos(v);
    return {rho * cos(u), rho * sin(u), r_ * sin(v)};
  }
  std::string name() const override { return "torus"; }

 private:
  double R_, r_;
};

class GraphSurface final : public Surface {
 public:
  GraphSurface(CubicPoly h, std::string name) : h_(h), name_(std::move(name)) {}
  Vec3<Jet<4>> point(const Jet<4>& u, const Jet<4>& v) const override { return {u, v, h_.eval(u, v)}; }
  std::string name() const override { return name_; }

 private:
  CubicPoly h_;
  std::string name_;
};

}  // namespace

CubicPoly CubicPoly::constant(double c) {
  CubicPoly p;
  p.c_[0] = c;
  return p;
}
CubicPoly CubicPoly::u() {
  CubicPoly p;
  p.coeff(1, 0) = 1.0;
  return p;
}
CubicPoly CubicPoly::v() {
  CubicPoly p;
  p.coeff(1, 1) = 1.0;
  return p;
}
bool CubicPoly::is_zero() const {
  for (double x : c_)
    if (x != 0.0) return false;
  return true;
}
CubicPoly operator+(CubicPoly a, const CubicPoly& b) {
  for (int k = 0; k < 10; ++k) a.c_[k] += b.c_[k];
  return a;
}
CubicPoly operator*(double s, CubicPoly a) {
  for (auto& x : a.c_) x *= s;
  return a;
}

const char* to_string(ChartKind kind) {
  switch (kind) {
    case ChartKind::Jet: return "jet";
    case ChartKind::SurfaceNormal: return "surface-normal";
    case ChartKind::Callable: return "callable";
  }
  return "unknown";
}

PointFrame frame_from_jet(const LineJet& jet, double u, double v) {
  PointFrame f;
  f.u = u;
  f.v = v;
  f.n = partial(jet.n, 0, 0);
  f.x = partial(jet.x, 0, 0);
  f.n_u = partial(jet.n, 1, 0);
  f.n_v = partial(jet.n, 0, 1);
  f.x_u = partial(jet.x, 1, 0);
  f.x_v = partial(jet.x, 0, 1);
  f.n_uu = partial(jet.n, 2, 0);
  f.n_uv = partial(jet.n, 1, 1);
  f.n_vv = partial(jet.n, 0, 2);
  f.x_uu = partial(jet.x, 2, 0);
  f.x_uv = partial(jet.x, 1, 1);
  f.x_vv = partial(jet.x, 0, 2);
  for (int k = 0; k < 4; ++k) {
    f.n_3[k] = partial(jet.n, 3 - k, k);
    f.x_3[k] = partial(jet.x, 3 - k, k);
  }
  f.fund = fundamentals_of(f.n_u, f.n_v, f.x_u, f.x_v);
  return f;
}

LineJet jet_from_frame(const PointFrame& f) {
  LineJet j;
  auto put = [&](Vec3<Jet<3>>& dst, int i, int k, const Vec3<double>& d) {
    const double fact[4] = {1.0, 1.0, 2.0, 6.0};
    for (int c = 0; c < 3; ++c) dst[c].coeff(i, k) = d[c] / (fact[i] * fact[k]);
  };
  put(j.n, 0, 0, f.n);
  put(j.x, 0, 0, f.x);
  put(j.n, 1, 0, f.n_u);
  put(j.n, 0, 1, f.n_v);
  put(j.x, 1, 0, f.x_u);
  put(j.x, 0, 1, f.x_v);
  put(j.n, 2, 0, f.n_uu);
  put(j.n, 1, 1, f.n_uv);
  put(j.n, 0, 2, f.n_vv);
  put(j.x, 2, 0, f.x_uu);
  put(j.x, 1, 1, f.x_uv);
  put(j.x, 0, 2, f.x_vv);
  for (int k = 0; k < 4; ++k) {
    put(j.n, 3 - k, k, f.n_3[k]);
    put(j.x, 3 - k, k, f.x_3[k]);
  }
  return j;
}

CongruenceChart::CongruenceChart(std::shared_ptr<const ChartModel> model, Domain domain, std::string name)
    : model_(std::move(model)), domain_(domain), name_(std::move(name)) {}

LineJet CongruenceChart::line_jet(double u, double v) const {
  if (!contains(u, v)) {
    throw Error(ErrorCode::OutOfDomain,
                "(" + std::to_string(u) + ", " + std::to_string(v) + ") is outside chart '" + name_ + "'");
  }
  if (model_->derivative_order() < 3) {
    throw Error(ErrorCode::DerivativeUnavailable, "chart '" + name_ + "' supplies only order " +
                                                      std::to_string(model_->derivative_order()) + " derivatives");
  }
  return model_->line_jet(u, v);
}

CongruenceChart make_jet_chart(const JetChartParams& params, Domain domain, std::string name) {
  return CongruenceChart(std::make_shared<JetChartModel>(params), domain, std::move(name));
}

std::shared_ptr<const Surface> make_sphere(double radius) { return std::make_shared<SphereSurface>(radius); }
std::shared_ptr<const Surface> make_ellipsoid(double a, double b, double c) {
  return std::make_shared<EllipsoidSurface>(a, b, c);
}
std::shared_ptr<const Surface> make_torus(double major, double minor) {
  return std::make_shared<TorusSurface>(major, minor);
}
std::shared_ptr<const Surface> make_graph(const CubicPoly& height, std::string name) {
  return std::make_shared<GraphSurface>(height, std::move(name));
}

CongruenceChart normal_congruence_of(std::shared_ptr<const Surface> surface, Domain domain) {
  std::string name = surface->name() + "-normals";
  return CongruenceChart(std::make_shared<SurfaceNormalModel>(std::move(surface)), domain, std::move(name));
}

CongruenceChart make_callable_chart(JetMap map, Domain domain, int order, std::string name) {
  return CongruenceChart(std::make_shared<CallableModel>(std::move(map), order), domain, std::move(name));
}

CongruenceChart recenter_directrix(const CongruenceChart& chart, const CubicPoly& f) {
  if (f.is_zero()) return chart;
  return CongruenceChart(std::make_shared<RecenteredModel>(chart.model_ptr(), f), chart.domain(),
                         chart.name() + "+recentered");
}

std::function<double(double, double)> sigma_n_function(const CongruenceChart& chart) {
  return [chart](double u, double v) {
    const Fundamentals f = chart.frame(u, v).fund;
    return f.B * f.B - f.A * f.C;
  };
}

std::function<double(double, double)> sigma_n_signed(const CongruenceChart& chart) {
  return [chart](double u, double v) {
    const PointFrame f = chart.frame(u, v);
    return triple(f.n_u, f.n_v, f.n);
  };
}

}  // namespace clab

#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>

#include "clab/jet.hpp"
#include "clab/vec3.hpp"

namespace clab {

// Cubic polynomial in (u, v). coeff(d, j) multiplies u^(d-j) v^j, so the
// subscript "dj" matches the usual directrix coefficient labels (alpha_21 is uv).
class CubicPoly {
 public:
  CubicPoly() = default;

  static CubicPoly constant(double c);
  static CubicPoly u();
  static CubicPoly v();

  double coeff(int degree, int j) const { return c_[slot(degree, j)]; }
  double& coeff(int degree, int j) { return c_[slot(degree, j)]; }
  bool is_zero() const;

  template <class S>
  S eval(const S& u, const S& v) const {
    const S u2 = u * u, v2 = v * v;
    S r = S(c_[0]);
    r += c_[1] * u + c_[2] * v;
    r += c_[3] * u2 + c_[4] * (u * v) + c_[5] * v2;
    r += c_[6] * (u2 * u) + c_[7] * (u2 * v) + c_[8] * (u * v2) + c_[9] * (v2 * v);
    return r;
  }

  friend CubicPoly operator+(CubicPoly a, const CubicPoly& b);
  friend CubicPoly operator*(double s, CubicPoly a);
  friend bool operator==(const CubicPoly&, const CubicPoly&) = default;

 private:
  static int slot(int degree, int j) { return degree * (degree + 1) / 2 + j; }
  std::array<double, 10> c_{};
};

struct Domain {
  double u_min = -1.0;
  double u_max = 1.0;
  double v_min = -1.0;
  double v_max = 1.0;

  bool contains(double u, double v) const { return u >= u_min && u <= u_max && v >= v_min && v <= v_max; }
  friend bool operator==(const Domain&, const Domain&) = default;
};

// Third-order jets of the unit direction n and of the directrix x at one point.
struct LineJet {
  Vec3<Jet<3>> n;
  Vec3<Jet<3>> x;
};

enum class ChartKind { Jet, SurfaceNormal, Callable };

const char* to_string(ChartKind kind);

class ChartModel {
 public:
  virtual ~ChartModel() = default;
  virtual ChartKind kind() const = 0;
  // Extra validity beyond the rectangular domain (e.g. the open unit disc).
  virtual bool valid_at(double, double) const { return true; }
  // Highest derivative order the model can supply.
  virtual int derivative_order() const { return 3; }
  virtual LineJet line_jet(double u, double v) const = 0;
};

template <class S>
struct FundamentalsT {
  S A{}, B{}, C{};
  S a{}, b1{}, b2{}, c{};
  S b{}, bbar{};
};
using Fundamentals = FundamentalsT<double>;

template <class S>
FundamentalsT<S> fundamentals_of(const Vec3<S>& n_u, const Vec3<S>& n_v, const Vec3<S>& x_u,
                                 const Vec3<S>& x_v) {
  FundamentalsT<S> f;
  f.A = dot(n_u, n_u);
  f.B = dot(n_u, n_v);
  f.C = dot(n_v, n_v);
  f.a = -dot(n_u, x_u);
  f.b1 = -dot(n_u, x_v);
  f.b2 = -dot(n_v, x_u);
  f.c = -dot(n_v, x_v);
  f.b = -0.5 * (f.b1 + f.b2);
  f.bbar = -0.5 * (f.b1 - f.b2);
  return f;
}

struct PointFrame {
  double u = 0.0, v = 0.0;
  Vec3<double> n{}, x{};
  Vec3<double> n_u{}, n_v{}, x_u{}, x_v{};
  Vec3<double> n_uu{}, n_uv{}, n_vv{}, x_uu{}, x_uv{}, x_vv{};
  std::array<Vec3<double>, 4> n_3{}, x_3{};  // uuu, uuv, uvv, vvv
  Fundamentals fund;
};

PointFrame frame_from_jet(const LineJet& jet, double u, double v);

// Inverse of frame_from_jet: the third-order jets rebuilt from the partials.
LineJet jet_from_frame(const PointFrame& frame);

template <int N>
Vec3<Jet<N - 1>> partial_u(const Vec3<Jet<N>>& a) {
  return {a[0].du(), a[1].du(), a[2].du()};
}
template <int N>
Vec3<Jet<N - 1>> partial_v(const Vec3<Jet<N>>& a) {
  return {a[0].dv(), a[1].dv(), a[2].dv()};
}
template <int M, int N>
Vec3<Jet<M>> truncate_vec(const Vec3<Jet<N>>& a) {
  return {a[0].template truncate<M>(), a[1].template truncate<M>(), a[2].template truncate<M>()};
}

// Immutable, cheaply copyable handle to a chart model plus its domain.
class CongruenceChart {
 public:
  CongruenceChart(std::shared_ptr<const ChartModel> model, Domain domain, std::string name = {});

  ChartKind kind() const { return model_->kind(); }
  const Domain& domain() const { return domain_; }
  const std::string& name() const { return name_; }
  const ChartModel& model() const { return *model_; }
  std::shared_ptr<const ChartModel> model_ptr() const { return model_; }

  bool contains(double u, double v) const { return domain_.contains(u, v) && model_->valid_at(u, v); }

  // Throws OutOfDomain outside the chart; DerivativeUnavailable when the model
  // supplies fewer than three derivative orders.
  LineJet line_jet(double u, double v) const;
  PointFrame frame(double u, double v) const { return frame_from_jet(line_jet(u, v), u, v); }

  CongruenceChart with_domain(Domain d) const { return CongruenceChart(model_, d, name_); }

 private:
  std::shared_ptr<const ChartModel> model_;
  Domain domain_;
  std::string name_;
};

inline PointFrame eval_frame(const CongruenceChart& chart, double u, double v) { return chart.frame(u, v); }

// Directrix x = (x1, x2, 0) and direction n = (n1, n2, sqrt(1 - n1^2 - n2^2)).
// The default n1 = u, n2 = v is the standard chart of the upper hemisphere.
struct JetChartParams {
  CubicPoly x1;
  CubicPoly x2;
  CubicPoly n1 = CubicPoly::u();
  CubicPoly n2 = CubicPoly::v();
  friend bool operator==(const JetChartParams&, const JetChartParams&) = default;
};

CongruenceChart make_jet_chart(const JetChartParams& params, Domain domain, std::string name = "jet");

// A parametrized surface evaluated on fourth-order jets, so that its unit
// normal is available to third order.
class Surface {
 public:
  virtual ~Surface() = default;
  virtual Vec3<Jet<4>> point(const Jet<4>& u, const Jet<4>& v) const = 0;
  virtual std::string name() const = 0;
};

std::shared_ptr<const Surface> make_sphere(double radius);
std::shared_ptr<const Surface> make_ellipsoid(double a, double b, double c);
std::shared_ptr<const Surface> make_torus(double major, double minor);
std::shared_ptr<const Surface> make_graph(const CubicPoly& height, std::string name = "graph");

// Congruence of normals: x = X(u,v), n = X_u x X_v / |X_u x X_v|.
// Throws DegenerateImmersion from line_jet where X_u x X_v vanishes.
CongruenceChart normal_congruence_of(std::shared_ptr<const Surface> surface, Domain domain);

using JetMap = std::function<LineJet(const Jet<3>& u, const Jet<3>& v)>;

// User-supplied smooth map evaluated on jets. `order` is the derivative order
// the map honours; frames need 3.
CongruenceChart make_callable_chart(JetMap map, Domain domain, int order = 3, std::string name = "callable");

// Same lines, directrix moved to x + f n.
CongruenceChart recenter_directrix(const CongruenceChart& chart, const CubicPoly& f);

// B^2 - AC: nonpositive, zero exactly on the singular set of n.
std::function<double(double, double)> sigma_n_function(const CongruenceChart& chart);

// det(n_u, n_v, n): signed local equation of the singular set of n; its square is AC - B^2.
std::function<double(double, double)> sigma_n_signed(const CongruenceChart& chart);

}  // namespace clab

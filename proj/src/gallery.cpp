#include "clab/gallery.hpp"

#include <cmath>

#include "clab/error.hpp"

namespace clab {

CubicPoly cubic(std::initializer_list<std::pair<const char*, double>> terms) {
  CubicPoly p;
  for (const auto& [key, value] : terms) {
    const int d = key[0] - '0', j = key[1] - '0';
    if (d < 0 || d > 3 || j < 0 || j > d || key[2] != '\0')
      throw Error(ErrorCode::SchemaError, std::string("bad coefficient subscript '") + key + "'");
    p.coeff(d, j) += value;
  }
  return p;
}

namespace {

CongruenceChart jet(const JetChartParams& p, std::string name, double half = 0.5) {
  return make_jet_chart(p, Domain{-half, half, -half, half}, std::move(name));
}

// Umbilic at the origin: beta10 = -alpha11, beta11 = alpha10.
JetChartParams umbilic_params(double a10, double a11, std::initializer_list<std::pair<const char*, double>> x1_2,
                              std::initializer_list<std::pair<const char*, double>> x2_2) {
  JetChartParams p;
  p.x1 = cubic({{"10", a10}, {"11", a11}}) + cubic(x1_2);
  p.x2 = cubic({{"10", -a11}, {"11", a10}}) + cubic(x2_2);
  return p;
}

std::vector<GalleryEntry> build() {
  std::vector<GalleryEntry> g;
  g.push_back({"sphere-normals", "normals of the unit sphere (umbilic everywhere)", [] {
                 return normal_congruence_of(make_sphere(1.0), Domain{-1.0, 1.0, -1.0, 1.0});
               }});
  g.push_back({"ellipsoid-normals", "normals of the ellipsoid with semi-axes 3, 2, 1 away from its umbilics", [] {
                 return normal_congruence_of(make_ellipsoid(3.0, 2.0, 1.0), Domain{0.3, 1.3, -0.8, 0.8});
               }});
  g.push_back({"torus-normals", "normals of a torus; the singular set of n is the top circle v = pi/2", [] {
                 return normal_congruence_of(make_torus(2.0, 1.0), Domain{-1.0, 1.0, 0.6, 2.6});
               }});
  g.push_back({"paraboloid-normals", "normals of z = (u^2 + v^2)/2", [] {
                 return normal_congruence_of(make_graph(cubic({{"20", 0.5}, {"22", 0.5}}), "paraboloid"),
                                             Domain{-1.0, 1.0, -1.0, 1.0});
               }});
  g.push_back({"monkey-saddle-normals", "normals of z = u^3 - 3 u v^2", [] {
                 return normal_congruence_of(make_graph(cubic({{"30", 1.0}, {"32", -3.0}}), "monkey-saddle"),
                                             Domain{-0.8, 0.8, -0.8, 0.8});
               }});
  g.push_back({"identity-jet", "directrix x = (u, v, 0)", [] {
                 JetChartParams p;
                 p.x1 = CubicPoly::u();
                 p.x2 = CubicPoly::v();
                 return jet(p, "identity-jet");
               }});
  g.push_back({"perturbed-jet", "non-normal jet chart with hyperbolic and elliptic regions", [] {
                 JetChartParams p;
                 p.x1 = cubic({{"10", 0.5}, {"11", 0.2}, {"20", -0.5}, {"21", 0.2}, {"22", 0.5}});
                 p.x2 = cubic({{"10", 0.2}, {"11", 0.2}, {"20", 1.0}, {"22", -1.0}});
                 return jet(p, "perturbed-jet");
               }});
  g.push_back({"elliptic-jet", "jet chart elliptic at the origin (alpha11 = 1, beta10 = -1)", [] {
                 JetChartParams p;
                 p.x1 = cubic({{"10", 0.5}, {"11", 1.0}, {"20", 0.3}, {"22", 0.2}});
                 p.x2 = cubic({{"10", -1.0}, {"11", 0.3}, {"21", 0.3}, {"22", -0.4}});
                 return jet(p, "elliptic-jet");
               }});
  g.push_back({"lemon-jet", "jet chart with a lemon umbilic at the origin", [] {
                 return jet(umbilic_params(1.0, 0.5, {{"20", -1.0}, {"22", -0.6}}, {{"20", -1.0}}), "lemon-jet", 0.3);
               }});
  g.push_back({"star-jet", "jet chart with a star umbilic at the origin", [] {
                 return jet(umbilic_params(1.0, 0.5, {{"20", -1.0}, {"21", 1.0}}, {{"20", 0.5}}), "star-jet", 0.3);
               }});
  g.push_back({"monstar-jet", "jet chart with a monstar umbilic at the origin", [] {
                 return jet(umbilic_params(1.0, 0.5, {{"20", -1.0}, {"22", -1.0}}, {{"21", -1.0}}), "monstar-jet", 0.3);
               }});
  g.push_back({"fold-chart", "n with a fold of its singular set along v = 0", [] {
                 JetChartParams p;
                 p.n1 = CubicPoly::u();
                 p.n2 = cubic({{"22", 1.0}, {"32", 0.3}, {"33", 0.2}, {"20", 0.25}});
                 p.x1 = cubic({{"10", 0.7}, {"11", 0.3}, {"22", 0.2}});
                 p.x2 = cubic({{"10", -0.4}, {"11", 0.9}, {"20", 0.1}});
                 return jet(p, "fold-chart");
               }});
  g.push_back({"fold-parabolic-chart", "fold of the singular set of n with a parabolic point at the origin", [] {
                 JetChartParams p;
                 p.n1 = CubicPoly::u();
                 p.n2 = cubic({{"22", 1.0}, {"32", 0.3}, {"33", 0.2}, {"20", 0.25}});
                 p.x1 = cubic({{"10", 0.7}, {"11", 0.3}, {"22", 0.2}});
                 p.x2 = cubic({{"10", -0.4}, {"11", 0.0}, {"20", 0.1}, {"22", 0.5}});
                 return jet(p, "fold-parabolic-chart");
               }});
  g.push_back({"cusp-chart", "n with a cusp of the spherical map at the origin", [] {
                 JetChartParams p;
                 p.n1 = CubicPoly::u();
                 p.n2 = cubic({{"33", 1.0}, {"21", 1.0}});
                 p.x1 = cubic({{"10", 0.7}, {"11", 0.3}});
                 p.x2 = cubic({{"10", -0.4}, {"11", 0.9}});
                 return jet(p, "cusp-chart");
               }});
  return g;
}

}  // namespace

const std::vector<GalleryEntry>& gallery() {
  static const std::vector<GalleryEntry> g = build();
  return g;
}

CongruenceChart gallery_chart(const std::string& name) {
  for (const auto& e : gallery())
    if (e.name == name) return e.make();
  throw Error(ErrorCode::SchemaError, "unknown gallery chart '" + name + "'");
}

}  // namespace clab

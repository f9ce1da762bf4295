#pragma once

#include <array>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "clab/congruence.hpp"
#include "clab/formfields.hpp"

namespace clab {

using Point2 = std::array<double, 2>;

// Scalar field on the parameter plane; NaN where undefined.
using ScalarField = std::function<double(double, double)>;

enum class LocusKind { Parabolic, SigmaN, Discriminant, Other };
const char* to_string(LocusKind kind);

struct LocusCurve {
  LocusKind kind = LocusKind::Other;
  std::optional<Lens> lens;  // for Discriminant curves
  std::vector<Point2> points;
  bool refined = true;
  bool closed = false;
};

// Zero set of `field` by marching squares on an nu x nv cell grid over the
// domain. Crossings are refined by bisection along grid edges; saddle cells are
// split by the sign at the cell centre.
std::vector<LocusCurve> extract_locus(const ScalarField& field, const Domain& domain, int nu, int nv,
                                      LocusKind kind = LocusKind::Other);

// Size of the products n' x' that build the lens; a lens below 1e-10 of it is
// treated as vanishing.
double lens_input_scale(const PointFrame& f, Lens lens);
double lens_input_scale(const LineJet& j, Lens lens);

// Standard fields. Each returns NaN outside the chart.
ScalarField sigma_field(const CongruenceChart& chart);           // det(n_u, n_v, n)
ScalarField parabolic_field(const CongruenceChart& chart);       // d(extended Q3)
ScalarField discriminant_field(const CongruenceChart& chart, Lens lens);

std::vector<LocusCurve> parabolic_curves(const CongruenceChart& chart, int grid);
std::vector<LocusCurve> sigma_curves(const CongruenceChart& chart, int grid);
std::vector<LocusCurve> discriminant_curves(const CongruenceChart& chart, Lens lens, int grid);

struct UmbilicSearch {
  std::vector<Point2> points;
  bool degenerate_everywhere = false;  // lens vanishes on the whole grid
};

// Common zeros of the Q2 coefficients: grid minima of the normalized
// coefficient size, refined by Gauss-Newton with jet derivatives.
UmbilicSearch find_umbilics(const CongruenceChart& chart, int grid = 48);

enum class SingularLabel {
  CuspFamily,
  FoldedSaddle,
  FoldedNode,
  FoldedFocus,
  Lemon,
  Star,
  Monstar,
  SigmaFold,
  SigmaCusp,
  Degenerate
};
const char* to_string(SingularLabel label);

// +1 for folded saddles, -1 for folded nodes and foci, 0 otherwise.
int folded_index(SingularLabel label);

struct Diagnostics {
  std::optional<double> lambda;     // folded-singularity invariant
  std::vector<double> phi_roots;    // umbilic cubic roots (rotated frame)
  std::vector<int> alpha_signs;     // sign of alpha(p) phi'(p) at each root
  std::optional<int> contact_order; // measured, Sigma(n) points
  double rotation = 0.0;            // normalizing rotation of the (u, v) plane
  std::optional<double> transversality;  // |grad lambda . k| / |grad lambda| on Sigma(n)
  bool parabolic_on_sigma = false;
  std::optional<int> tangency_order;  // parabolic curve vs Sigma(n)
};

struct SingularityReport {
  std::string kind;  // umbilic, folded, cusp-family, sigma
  Point2 at{};
  Lens lens = Lens::Q2;
  SingularLabel label = SingularLabel::Degenerate;
  Diagnostics diag;
};

// The 1-jet of a BDE a dv^2 + 2b du dv + c du^2 vanishing at the origin:
// a = a1 u + a2 v, b = b1 u + b2 v, c = c1 u + c2 v.
struct UmbilicJet {
  double a1 = 0, a2 = 0, b1 = 0, b2 = 0, c1 = 0, c2 = 0;
};

UmbilicJet umbilic_jet_of(const BinaryForm<Jet<2>>& form);

// Lemon / star / monstar from the cubic phi and the sign test on alpha.
// Throws NotMorse when the discriminant is not a Morse A1+ zero.
SingularityReport classify_umbilic_jet(const UmbilicJet& jet);

// Throws NotUmbilic when the lens coefficients do not vanish at `at`.
SingularityReport classify_umbilic(const CongruenceChart& chart, Point2 at, Lens lens);

// Folded-singularity test on a 2-jet of a BDE at a discriminant point.
SingularityReport classify_folded_jet(const BinaryForm<Jet<2>>& form);

SingularityReport classify_on_discriminant(const CongruenceChart& chart, Point2 at, Lens lens);

// Points of the lens discriminant where the double direction is tangent to it.
std::vector<Point2> find_folded_points(const CongruenceChart& chart, Lens lens, int grid);

// Fold / cusp of n, measured contact order of the two extended principal
// foliations, and whether the point is also parabolic.
SingularityReport classify_sigma_n(const CongruenceChart& chart, Point2 at);

// Points of Sigma(n) worth reporting: one fold sample per curve, kernel
// tangencies (cusps) and parabolic points.
std::vector<Point2> sigma_special_points(const CongruenceChart& chart, int grid);

// Measured tangency order between the extended parabolic curve and Sigma(n)
// at a common point (2 for a simple tangency).
std::optional<int> parabolic_sigma_tangency(const CongruenceChart& chart, Point2 at);

// Jet-free 2D Newton on two scalar fields with finite-difference Jacobian.
std::optional<Point2> common_zero(const ScalarField& f, const ScalarField& g, Point2 seed, double tol = 1e-12,
                                  int iterations = 60);

// Every singularity of a chart for one lens.
std::vector<SingularityReport> classify_chart(const CongruenceChart& chart, Lens lens, int grid);

// Tab-separated: kind, lens, u, v, label, lambda, phi_roots, alpha_signs,
// contact_order, flags.
void write_report_header(std::ostream& os);
void write_report_row(std::ostream& os, const SingularityReport& r);

}  // namespace clab

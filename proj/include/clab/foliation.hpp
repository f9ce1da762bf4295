#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "clab/congruence.hpp"
#include "clab/formfields.hpp"
#include "clab/quadform.hpp"
#include "clab/singularities.hpp"

namespace clab {

// Form value and first partials at one point. `sheet` multiplies the lifted
// field: for lenses whose discriminant has a double zero along Sigma(n) it is
// the sign of det(n_u, n_v, n), which keeps the two sheets smooth across it.
struct FieldSample {
  QuadForm form;
  QuadForm form_u;
  QuadForm form_v;
  double sheet = 1.0;
  double scale = 0.0;  // reference size for "form vanishes"; 0 uses max_abs(form)
};

struct BdeField {
  std::function<FieldSample(double, double)> sample;
  std::function<bool(double, double)> contains;
  Domain domain;
  std::vector<Point2> singular_points;  // traces stop near these
  std::optional<Lens> lens;
};

BdeField constant_field(const QuadForm& q, const Domain& domain);

// Lens field of a chart. Q2 and Q4 carry the Sigma(n) sheet sign; Q3 and Q5
// use the extended forms. Umbilics are located unless `locate_singular` is off.
BdeField lens_field(const CongruenceChart& chart, Lens lens, bool locate_singular = true);

// Root directions sorted by line angle, or ordered nearest-first to `previous`.
// Throws EllipticPoint when delta < 0 and DegeneratePoint when the form vanishes
// relative to `scale`.
std::vector<Direction> branch_fields(const QuadForm& form, double scale, std::optional<Direction> previous = {});

// Unnormalized lifted field (F_t cos t, F_t sin t, -(F_u cos t + F_v sin t)) of
// F(u, v, t) = form(u, v)(cos t, sin t).
std::array<double, 3> lifted_field(const FieldSample& s, double theta);

enum class Termination { DomainExit, DiscriminantContact, StepLimit, SingularPoint };
const char* to_string(Termination t);

struct StepControl {
  double initial_step = 1e-3;
  double min_step = 1e-10;
  double max_step = 0.02;
  double tolerance = 1e-8;  // local error per step
  int max_steps = 4000;     // per direction
  double singular_radius = 1e-4;
};

struct TracedCurve {
  std::vector<Point2> points;
  std::vector<double> angles;  // line angle of the leaf at each vertex
  int branch = 1;
  std::optional<Lens> lens;
  Termination termination = Termination::StepLimit;        // forward end
  Termination start_termination = Termination::StepLimit;  // backward end
  std::vector<Point2> turning_points;  // cusps where the leaf reverses in (u, v)
  bool closed = false;                 // leaf returned to its seed; the last vertex repeats the first
  Point2 seed{};
  std::size_t seed_vertex = 0;  // index of the seed in `points`
  std::size_t seed_index = 0;   // position in the portrait seed grid
};

// Traces the leaf through `seed` on sheet `branch` (1 or 2, by line angle at
// the seed) in both directions. Throws SeedElliptic / SeedDegenerate.
TracedCurve trace(const BdeField& field, Point2 seed, int branch, const StepControl& control = {});
TracedCurve trace(const CongruenceChart& chart, Lens lens, Point2 seed, int branch, const StepControl& control = {});

// Largest |form(vertex)(angle)| / max_abs(form(vertex)) over the vertices.
double tangency_residual(const BdeField& field, const TracedCurve& curve);

struct PortraitSpec {
  Lens lens = Lens::Q2;
  std::optional<Domain> region;  // defaults to the chart domain
  double seed_density = 8.0;     // seeds per unit length
  StepControl steps;
  int locus_grid = 96;
  bool overlays = true;
};

void validate(const PortraitSpec& spec);

struct Portrait {
  std::vector<TracedCurve> curves;
  std::vector<LocusCurve> loci;
  std::vector<SingularityReport> singularities;
};

Portrait portrait(const BdeField& field, const PortraitSpec& spec);
Portrait portrait(const CongruenceChart& chart, const PortraitSpec& spec);

// Solution directions of the field on a circle around `centre`: the number of
// lines through the centre along which a leaf is radial (sign changes of the
// form on the radial direction, halved) and the index of the line field.
struct RadialAnalysis {
  int rays = 0;
  int sign_changes = 0;
  double index = 0.0;  // NaN if the circle meets the elliptic region
};

RadialAnalysis radial_analysis(const BdeField& field, Point2 centre, double radius = 0.05, int samples = 1440);

// u,v,branch per vertex with a header line.
void write_curve_csv(std::ostream& os, const TracedCurve& curve);

}  // namespace clab

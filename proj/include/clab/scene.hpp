#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clab/congruence.hpp"
#include "clab/formfields.hpp"

namespace clab {

enum class ChartSource { Gallery, Jet, Surface };

struct ChartSpec {
  ChartSource source = ChartSource::Gallery;
  std::string gallery;    // Gallery
  JetChartParams jet;     // Jet: alpha -> x1, beta -> x2, optional n1, n2
  std::string surface;    // Surface: sphere | ellipsoid | torus | graph
  std::vector<double> params;  // radius; semi-axes a b c; major minor
  CubicPoly height;            // graph z = height(u, v)
  friend bool operator==(const ChartSpec&, const ChartSpec&) = default;
};

// Overrides for the module defaults.
struct Tolerances {
  double identity = 1e-7;     // relative residual of the form identities
  double pairing = 1e-8;      // self-polar pairings of unit forms
  double line_points = 1e-8;  // midpoints and the two characteristic routes
  double pitch = 1e-9;        // pitch along torsal directions
  double step = 1e-8;         // tracer local error
  double singular_radius = 1e-4;
  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct OutputSpec {
  std::string dir = "clab-out";
  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct Scene {
  ChartSpec chart;
  std::optional<Domain> region;  // defaults to the chart's own domain
  int grid = 96;
  Lens lens = Lens::Q2;
  double seed_density = 8.0;
  std::uint64_t seed = 1;  // sampling for verify
  OutputSpec outputs;
  Tolerances tolerances;
  friend bool operator==(const Scene&, const Scene&) = default;
};

// Strict JSON. Throws ParseError (syntax, duplicate keys), SchemaError (unknown
// or missing key, wrong type) and RangeError, each with line and column.
Scene parse_scene(const std::string& text);

// Canonical JSON with every field present; parse_scene(serialize_scene(s)) == s.
std::string serialize_scene(const Scene& scene);

// Throws RangeError when the region leaves the chart.
CongruenceChart make_chart(const Scene& scene);

// Range checks shared by the parser and command-line overrides.
void check_grid(int grid);
void check_seed_density(double d);

}  // namespace clab

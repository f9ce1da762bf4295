#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "clab/congruence.hpp"
#include "clab/quadform.hpp"
#include "clab/vec3.hpp"

namespace clab {

// Central point offset r and pitch of the ruled surface through the line at
// `at` in direction `dir`. The *_direct values come from x' and n' rather than
// from the quadratic forms.
struct RuledData {
  std::array<double, 2> at{};
  Direction dir;
  double r = 0.0;
  double pitch = 0.0;
  double r_direct = 0.0;
  double pitch_direct = 0.0;
};

// Throws KernelDirection when n' vanishes along `dir`.
RuledData ruled_data(const PointFrame& frame, const Direction& dir);

// Signed distances along n from x. Non-real pairs are left empty.
struct LinePoints {
  std::array<double, 2> at{};
  std::vector<double> boundary;        // r^2 - 2Hr + K = 0
  double middle = 0.0;                 // H
  std::vector<double> focal;           // r along the torsal directions
  std::vector<double> characteristic;  // roots of the characteristic quadratic
  std::vector<double> characteristic_by_direction;  // r along the Q5 directions
  bool characteristic_degenerate = false;           // bbar = 0: no characteristic quadratic
};

// Coefficient s of r^2 - 2Hr + K + s = 0, i.e. (AC - B^2)(H^2 - K)^2 / bbar^2.
// Throws OnSigmaN, NormalCongruenceDegenerate when bbar vanishes.
double characteristic_shift(const PointFrame& frame);

// Throws OnSigmaN.
LinePoints line_points(const PointFrame& frame);

enum class SurfaceKind { Boundary, Middle, Focal, Characteristic };
const char* to_string(SurfaceKind kind);
std::optional<SurfaceKind> parse_surface_kind(const std::string& name);

// r values of one kind at one line, ascending.
std::vector<double> surface_offsets(const LinePoints& p, SurfaceKind kind);

struct MeshSheet {
  std::string name;
  std::vector<Vec3<double>> vertices;
  std::vector<std::vector<int>> faces;  // 0-based, triangles or quads
};

struct Mesh {
  SurfaceKind kind = SurfaceKind::Middle;
  std::vector<MeshSheet> sheets;
  std::vector<std::vector<Vec3<double>>> features;  // where two sheets meet
};

// Line points on a (grid+1) x (grid+1) node lattice of the domain, row-major
// in v; nodes where the frame is undefined or on Sigma(n) are empty.
struct LinePointGrid {
  int grid = 0;
  Domain domain;
  std::vector<std::optional<LinePoints>> nodes;
  std::vector<std::optional<std::array<Vec3<double>, 2>>> lines;  // x, n per node
};

LinePointGrid sample_line_points(const CongruenceChart& chart, int grid);

// x + r n for every real r, stitched per sheet. Sheets are the sorted roots,
// which are continuous; non-real and undefined nodes leave holes. Throws
// RangeError for grid < 16.
Mesh sweep_surface(const CongruenceChart& chart, SurfaceKind kind, int grid);
Mesh sweep_surface(const LinePointGrid& samples, SurfaceKind kind);

// Where the two sheets of a kind meet: umbilics (boundary), the parabolic
// curve (focal, characteristic), as points x + H n. Empty for the middle.
std::vector<std::vector<Vec3<double>>> sheet_features(const CongruenceChart& chart, SurfaceKind kind, int grid);

// v/f records, one object per sheet, 12 significant digits.
void write_obj(std::ostream& os, const Mesh& mesh);

// u,v,boundary1,boundary2,middle,focal1,focal2,characteristic1,characteristic2
void write_line_points_csv(std::ostream& os, const LinePointGrid& samples);

}  // namespace clab

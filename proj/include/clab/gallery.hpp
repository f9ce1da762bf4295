#pragma once

#include <functional>
#include <string>
#include <vector>

#include "clab/congruence.hpp"

namespace clab {

struct GalleryEntry {
  std::string name;
  std::string description;
  std::function<CongruenceChart()> make;
};

// Built-in charts realizing the classification branches.
const std::vector<GalleryEntry>& gallery();

// Throws SchemaError for an unknown name.
CongruenceChart gallery_chart(const std::string& name);

// Cubic from subscript/value pairs, e.g. {{"10", 1.0}, {"21", 0.5}} = u + 0.5 u v.
CubicPoly cubic(std::initializer_list<std::pair<const char*, double>> terms);

}  // namespace clab

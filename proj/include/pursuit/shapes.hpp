#pragma once

#include <string>
#include <vector>

#include "pursuit/polyhedron.hpp"

namespace pursuit {

/// A named shape template: its development and the reference vertex
/// positions every generated constraint matrix must annihilate.
struct ShapeTemplate {
  std::string name;
  int robot_count = 0;
  Development development;
  VecX template_positions;  // stacked 3n reference coordinates
};

std::vector<std::string> shape_names();

/// Built-in templates: cube, octahedron, tetrahedron, hexagonal_box, dome.
/// Throws std::invalid_argument for unknown names.
ShapeTemplate make_shape(const std::string& name);

}  // namespace pursuit

#pragma once

#include <string>

#include "chiral/continuum.hpp"
#include "chiral/lattice.hpp"

namespace chiral {

// Triangles filled by their (w, z) label, one colour per ground state, with
// the jump set drawn on top. Output depends only on the mesh.
std::string mesh_svg(const MeshPotential& m, double pixels = 480.0);

// Cells coloured on a blue-white-red scale symmetric about zero.
std::string grid_svg(const ScalarGrid& g, const std::string& title, double pixels = 480.0);

}  // namespace chiral

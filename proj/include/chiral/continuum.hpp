#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chiral/lattice.hpp"

namespace chiral {

// A value (w, z) in {-1, 1}^2.
struct Label {
    int w = 1;
    int z = 1;
    friend bool operator==(Label, Label) = default;
};

// Continuous piecewise-affine potential phi; (w, z) = grad phi on each triangle.
struct MeshPotential {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<double> heights;
    Domain domain = Domain::unit_square();
};

struct MeshValidation {
    bool valid = true;
    std::vector<Label> labels;          // one per triangle; meaningless where invalid
    std::vector<std::size_t> offending;  // triangles with off-lattice gradients or bad geometry
    std::string message;
};

MeshValidation validate_mesh(const MeshPotential& m);
// Labels of a valid mesh; throws ValidationError naming the offending triangles otherwise.
std::vector<Label> mesh_labels(const MeshPotential& m);

struct JumpSegment {
    Vec2 p;
    Vec2 q;
    Vec2 nu;  // unit normal; first nonzero component positive
    Label plus;   // trace on the side nu points to
    Label minus;
    double length = 0.0;
};

std::vector<JumpSegment> jump_set(const MeshPotential& m);

enum class JumpClass { J1, J2, J3, inadmissible };
const char* to_string(JumpClass c);

JumpClass classify_triple(Label plus, Label minus, Vec2 nu);

struct TotalVariations {
    double d1w = 0.0;
    double d2w = 0.0;
    double d1z = 0.0;
    double d2z = 0.0;
};

TotalVariations total_variations(const std::vector<JumpSegment>& segments);
TotalVariations total_variations(const MeshPotential& m);

// Surface density (4/3)(|w+ - w-| |nu1| + |z+ - z-| |nu2|); inadmissible triples are rejected.
double sigma(Label a, Label b, Vec2 nu);

// (4/3)(|D1 w| + |D2 z|).
double limit_energy(const MeshPotential& m);
// Sum of sigma * length over the jump set; agrees with limit_energy.
double limit_energy_by_sigma(const MeshPotential& m);

enum class ExampleKind { affine, vertical_wall, horizontal_wall, diagonal_wall, four_quadrant, laminate, corner_junction };

ExampleKind parse_example_kind(const std::string& name);
std::string to_string(ExampleKind k);

// Builds a mesh for a named geometry on a rectangle. `laminate_walls` is the
// number of parallel walls of the laminate kind.
MeshPotential build_example(ExampleKind kind, const Domain& domain, int laminate_walls = 3);

// Triangulates the arrangement of full `cut_lines` (point, direction) inside a
// rectangle and samples `phi` at the vertices. phi must be affine on every
// piece of the arrangement.
MeshPotential mesh_from_function(const Domain& domain, const std::vector<std::pair<Vec2, Vec2>>& cut_lines,
                                 const std::function<double(Vec2)>& phi);

// Point location and affine evaluation on a mesh.
class MeshEvaluator {
public:
    explicit MeshEvaluator(const MeshPotential& m);

    // Triangle containing p (closed, with slack), if any.
    std::optional<std::size_t> locate(Vec2 p) const;
    double operator()(Vec2 p) const;
    Label label(std::size_t triangle) const { return labels_[triangle]; }
    const MeshPotential& mesh() const { return mesh_; }

private:
    MeshPotential mesh_;
    std::vector<Label> labels_;
    std::vector<Vec2> lo_, hi_;
    double tol_;
};

}  // namespace chiral

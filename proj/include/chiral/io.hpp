#pragma once

#include <json.hpp>
#include <string>

#include "chiral/chirality.hpp"
#include "chiral/continuum.hpp"
#include "chiral/energy.hpp"
#include "chiral/lattice.hpp"
#include "chiral/optimize.hpp"
#include "chiral/recovery.hpp"

namespace chiral {

using json = nlohmann::json;

// JSON forms. Readers throw ValidationError on missing keys, wrong types or
// inconsistent sizes.
json to_json(const Domain& d);
Domain domain_from_json(const json& j);

json to_json(const ModelParams& p);
ModelParams params_from_json(const json& j);

json to_json(const ScalarGrid& g);
ScalarGrid grid_from_json(const json& j);

json to_json(const SpinField& u);
SpinField spins_from_json(const json& j);

json to_json(const ChiralityPair& p);
ChiralityPair pair_from_json(const json& j);

// {"vertices": [[x,y]...], "triangles": [[a,b,c]...], "heights": [...], "domain": {...}}
json to_json(const MeshPotential& m);
MeshPotential mesh_from_json(const json& j);

json to_json(const EnergyReport& r);
json to_json(const JumpSegment& s);
json to_json(const TotalVariations& t);
json to_json(const SweepRow& r);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Serialization used for every artifact: two-space indent, trailing newline.
std::string dump(const json& j);

}  // namespace chiral

#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "fibrestab/complexes.hpp"
#include "fibrestab/homology.hpp"
#include "fibrestab/obstruction.hpp"
#include "fibrestab/sequences.hpp"

namespace fibrestab::io {

using Json = nlohmann::ordered_json;

/// Parses text, converting syntax errors into ParseError.
Json parse(const std::string& text);
Json read_file(const std::string& path);
/// Compact serialization with a trailing newline.
std::string dump(const Json& j);

/// {"name", "vertex_count", "facets"}. Structural problems (missing keys,
/// wrong types) raise ParseError; violations of the complex invariants raise
/// InvalidComplex.
complexes::SimplicialComplex complex_from_json(const Json& j);
Json complex_to_json(const complexes::SimplicialComplex& x);

Json group_to_json(const exactalg::AbelianGroup& g);
exactalg::AbelianGroup group_from_json(const Json& j);
Json profile_to_json(const homology::HomologyProfile& p);
homology::HomologyProfile profile_from_json(const Json& j);

/// A string names a catalog entry; an object is an inline complex.
complexes::SimplicialComplex complex_ref_from_json(const Json& j);

struct Cover {
  complexes::SimplicialComplex total;
  complexes::SimplicialComplex a;
  complexes::SimplicialComplex b;
};
/// {"total", "A", "B"}, each a complex reference.
Cover cover_from_json(const Json& j);
/// {"total", "sub"}, each a complex reference. Containment is not checked.
complexes::SimplicialPair pair_from_json(const Json& j);

/// {"M", "U", "E" (optional), "mode", "one_point", "sampling": {"samples",
/// "seed"}}. "U" may be omitted in global mode and then defaults to a point.
obstruction::StabilizationQuery query_from_json(const Json& j);
/// Inlines every complex, so the output reads back through query_from_json.
Json query_to_json(const obstruction::StabilizationQuery& q);
Json verdict_to_json(const obstruction::Verdict& v);

Json exactness_to_json(const sequences::ExactnessReport& r);
Json kunneth_to_json(const sequences::KunnethReport& r);

}  // namespace fibrestab::io

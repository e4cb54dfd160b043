#include "fibrestab/json_io.hpp"

#include <fstream>
#include <sstream>

#include "fibrestab/catalog.hpp"
#include "fibrestab/errors.hpp"

namespace fibrestab::io {

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string dump(const Json& j) { return j.dump() + "\n"; }

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
  return j.at(key);
}

}  // namespace

complexes::SimplicialComplex complex_from_json(const Json& j) {
  const Json& count = require(j, "vertex_count");
  const Json& facets = require(j, "facets");
  if (!count.is_number_unsigned()) throw ParseError("'vertex_count' must be a non-negative integer");
  if (!facets.is_array()) throw ParseError("'facets' must be an array");
  std::string name;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw ParseError("'name' must be a string");
    name = j.at("name").get<std::string>();
  }
  std::vector<complexes::Simplex> out;
  for (const Json& f : facets) {
    if (!f.is_array()) throw ParseError("each facet must be an array of vertex indices");
    complexes::Simplex s;
    for (const Json& v : f) {
      if (!v.is_number_integer()) throw ParseError("vertex indices must be integers");
      const auto value = v.get<std::int64_t>();
      if (value < 0 || value > INT32_MAX)
        throw InvalidComplex("vertex index " + std::to_string(value) + " out of range");
      s.push_back(static_cast<complexes::Vertex>(value));
    }
    out.push_back(std::move(s));
  }
  return complexes::SimplicialComplex(count.get<std::size_t>(), std::move(out), std::move(name));
}

Json complex_to_json(const complexes::SimplicialComplex& x) {
  Json j;
  j["name"] = x.name();
  j["vertex_count"] = x.vertex_count();
  j["facets"] = x.facets();
  return j;
}

namespace {

Json integer_to_json(const exactalg::Integer& v) {
  if (v.fits_slong_p()) return v.get_si();
  return v.get_str();
}

exactalg::Integer integer_from_json(const Json& j) {
  if (j.is_number_integer()) return exactalg::Integer(static_cast<long>(j.get<std::int64_t>()));
  if (j.is_string()) return exactalg::Integer(j.get<std::string>());
  throw ParseError("expected an integer");
}

}  // namespace

Json group_to_json(const exactalg::AbelianGroup& g) {
  Json j;
  j["rank"] = g.free_rank();
  Json torsion = Json::array();
  for (const auto& t : g.torsion()) torsion.push_back(integer_to_json(t));
  j["torsion"] = std::move(torsion);
  return j;
}

exactalg::AbelianGroup group_from_json(const Json& j) {
  const Json& rank = require(j, "rank");
  if (!rank.is_number_unsigned()) throw ParseError("'rank' must be a non-negative integer");
  std::vector<exactalg::Integer> orders;
  if (j.contains("torsion")) {
    if (!j.at("torsion").is_array()) throw ParseError("'torsion' must be an array");
    for (const Json& t : j.at("torsion")) orders.push_back(integer_from_json(t));
  }
  return exactalg::AbelianGroup::from_cyclic_orders(rank.get<std::size_t>(), std::move(orders));
}

Json profile_to_json(const homology::HomologyProfile& p) {
  Json j;
  j["ring"] = p.ring.to_string();
  Json groups = Json::array();
  for (const auto& g : p.groups) groups.push_back(group_to_json(g));
  j["groups"] = std::move(groups);
  return j;
}

homology::HomologyProfile profile_from_json(const Json& j) {
  homology::HomologyProfile p;
  const Json& ring = require(j, "ring");
  if (!ring.is_string()) throw ParseError("'ring' must be a string");
  p.ring = exactalg::Coefficients::parse(ring.get<std::string>());
  const Json& groups = require(j, "groups");
  if (!groups.is_array()) throw ParseError("'groups' must be an array");
  for (const Json& g : groups) p.groups.push_back(group_from_json(g));
  return p;
}

complexes::SimplicialComplex complex_ref_from_json(const Json& j) {
  if (j.is_string()) return complexes::catalog(j.get<std::string>());
  if (j.is_object()) return complex_from_json(j);
  throw ParseError("a complex is given by a catalog name or an inline object");
}

Cover cover_from_json(const Json& j) {
  return Cover{complex_ref_from_json(require(j, "total")), complex_ref_from_json(require(j, "A")),
               complex_ref_from_json(require(j, "B"))};
}

complexes::SimplicialPair pair_from_json(const Json& j) {
  return complexes::SimplicialPair{complex_ref_from_json(require(j, "total")),
                                   complex_ref_from_json(require(j, "sub"))};
}

obstruction::StabilizationQuery query_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("a query must be an object");
  obstruction::StabilizationQuery q;
  q.M = complex_ref_from_json(require(j, "M"));
  if (j.contains("one_point")) {
    if (!j.at("one_point").is_boolean()) throw ParseError("'one_point' must be a boolean");
    q.one_point = j.at("one_point").get<bool>();
  }
  if (j.contains("U")) {
    q.U = complex_ref_from_json(j.at("U"));
  } else if (q.one_point) {
    throw ParseError("missing key 'U'");
  } else {
    q.U = complexes::catalog("point");
  }
  if (j.contains("E") && !j.at("E").is_null()) q.E = complex_ref_from_json(j.at("E"));
  if (j.contains("mode")) {
    if (!j.at("mode").is_string()) throw ParseError("'mode' must be a string");
    q.mode = obstruction::parse_mode(j.at("mode").get<std::string>());
  }
  if (j.contains("sampling")) {
    const Json& s = j.at("sampling");
    if (!s.is_object()) throw ParseError("'sampling' must be an object");
    if (s.contains("samples")) {
      if (!s.at("samples").is_number_integer() || s.at("samples").get<long long>() < 1)
        throw ParseError("'sampling.samples' must be a positive integer");
      q.sampling.samples = s.at("samples").get<int>();
    }
    if (s.contains("seed")) {
      if (!s.at("seed").is_number_integer() || s.at("seed").get<long long>() < 0) throw ParseError("'sampling.seed' must be a non-negative integer");
      q.sampling.seed = s.at("seed").get<std::uint64_t>();
    }
  }
  return q;
}

Json query_to_json(const obstruction::StabilizationQuery& q) {
  Json j;
  j["M"] = complex_to_json(q.M);
  j["U"] = complex_to_json(q.U);
  j["E"] = q.E ? complex_to_json(*q.E) : Json(nullptr);
  j["mode"] = obstruction::to_string(q.mode);
  j["one_point"] = q.one_point;
  j["sampling"] = Json{{"samples", q.sampling.samples}, {"seed", q.sampling.seed}};
  return j;
}

Json verdict_to_json(const obstruction::Verdict& v) {
  Json evidence = Json::array();
  for (const obstruction::Evidence& e : v.evidence) {
    Json x;
    x["lemma"] = e.lemma;
    x["degree"] = e.degree;
    auto put = [&](const char* key, const std::optional<exactalg::AbelianGroup>& g) {
      if (g) x[key] = Json{{"group", g->to_string()}, {"value", group_to_json(*g)}};
    };
    put("group_M", e.group_M);
    put("group_E", e.group_E);
    put("group_U", e.group_U);
    put("group_E1", e.group_E1);
    x["witness"] = e.witness;
    x["detail"] = e.detail;
    evidence.push_back(std::move(x));
  }
  Json j;
  j["status"] = obstruction::to_string(v.status);
  j["evidence"] = std::move(evidence);
  j["narrative"] = v.narrative;
  return j;
}

Json exactness_to_json(const sequences::ExactnessReport& r) {
  Json nodes = Json::array();
  for (std::size_t i = 0; i < r.labels.size(); ++i) {
    Json n{{"label", r.labels[i]}, {"dimension", r.dimensions[i]}};
    if (i < r.map_ranks.size()) n["rank_out"] = r.map_ranks[i];
    nodes.push_back(std::move(n));
  }
  Json interior = Json::array();
  for (std::size_t k = 0; k < r.interior_nodes.size(); ++k)
    interior.push_back(Json{{"node", r.interior_nodes[k]},
                            {"label", r.labels[r.interior_nodes[k]]},
                            {"image_rank", r.rank_data[k].first},
                            {"kernel_dim", r.rank_data[k].second},
                            {"composite_zero", static_cast<bool>(r.composition_zero[k])},
                            {"exact", static_cast<bool>(r.exact_at[k])}});
  Json isos = Json::array();
  for (const auto& iso : r.isomorphisms)
    isos.push_back(Json{{"node", iso.node}, {"label", r.labels[iso.node]}, {"isomorphism", iso.isomorphism}});
  return Json{{"field", r.field.to_string()},
              {"nodes", nodes},
              {"exactness", interior},
              {"isomorphisms", isos},
              {"exact", r.verdict}};
}

Json kunneth_to_json(const sequences::KunnethReport& r) {
  return Json{{"degree", r.degree},
              {"ring", r.ring.to_string()},
              {"tensor_sum", r.lhs.to_string()},
              {"tor_sum", r.tor_term.to_string()},
              {"product", r.product_hom.to_string()},
              {"consistent", r.consistent}};
}

}  // namespace fibrestab::io

#include "fibrestab/catalog.hpp"

#include <algorithm>

#include "catalog_data.hpp"
#include "fibrestab/errors.hpp"
#include "fibrestab/json_io.hpp"

namespace fibrestab::complexes {

namespace {

std::vector<CatalogEntry> load() {
  std::vector<CatalogEntry> entries;
  for (const auto& [name, text] : detail::embedded_catalog()) {
    const io::Json j = io::parse(std::string(text));
    CatalogEntry e;
    e.name = j.at("name").get<std::string>();
    e.description = j.value("description", "");
    e.dimension = j.at("dimension").get<int>();
    e.closed = j.at("closed").get<bool>();
    e.orientable = j.at("orientable").get<bool>();
    e.complex = io::complex_from_json(j);
    entries.push_back(std::move(e));
  }
  std::sort(entries.begin(), entries.end(),
            [](const CatalogEntry& a, const CatalogEntry& b) { return a.name < b.name; });
  return entries;
}

}  // namespace

const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = load();
  return entries;
}

const CatalogEntry& catalog_entry(const std::string& name) {
  for (const CatalogEntry& e : catalog_entries())
    if (e.name == name) return e;
  throw UnknownName("no catalog entry named '" + name + "'");
}

SimplicialComplex catalog(const std::string& name) { return catalog_entry(name).complex; }

std::vector<std::string> catalog_names() {
  std::vector<std::string> out;
  for (const CatalogEntry& e : catalog_entries()) out.push_back(e.name);
  return out;
}

}  // namespace fibrestab::complexes

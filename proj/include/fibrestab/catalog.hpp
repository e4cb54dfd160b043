#pragma once

#include <string>
#include <vector>

#include "fibrestab/complexes.hpp"

namespace fibrestab::complexes {

/// A pinned triangulation shipped with the library.
struct CatalogEntry {
  std::string name;
  std::string description;
  int dimension = 0;
  /// Closed (pseudo)manifold: no boundary.
  bool closed = false;
  bool orientable = false;
  SimplicialComplex complex;
};

/// Entries in name order.
const std::vector<CatalogEntry>& catalog_entries();
/// Throws UnknownName.
const CatalogEntry& catalog_entry(const std::string& name);
SimplicialComplex catalog(const std::string& name);
std::vector<std::string> catalog_names();

}  // namespace fibrestab::complexes

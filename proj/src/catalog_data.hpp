#pragma once

#include <string_view>
#include <utility>
#include <vector>

namespace fibrestab::complexes::detail {

/// (name, JSON text) for every file under data/catalog, compiled in by the
/// build.
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_catalog();

}  // namespace fibrestab::complexes::detail

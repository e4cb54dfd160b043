#include "fibrestab/complexes.hpp"

#include <algorithm>
#include <numeric>

#include "fibrestab/errors.hpp"

namespace fibrestab::complexes {

namespace {

std::string describe(const Simplex& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

// Every nonempty subset of s, bucketed by dimension.
void add_faces(const Simplex& s, std::vector<std::vector<Simplex>>& by_dim) {
  const std::size_t n = s.size();
  if (by_dim.size() < n) by_dim.resize(n);
  const std::uint64_t subsets = std::uint64_t{1} << n;
  Simplex face;
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    face.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::uint64_t{1} << i)) face.push_back(s[i]);
    by_dim[face.size() - 1].push_back(face);
  }
}

}  // namespace

SimplicialComplex::SimplicialComplex() : data_(std::make_shared<const Data>()) {}

SimplicialComplex::SimplicialComplex(std::size_t vertex_count, std::vector<Simplex> facets,
                                     std::string name)
    : data_(build(vertex_count, std::move(facets), std::move(name), /*strict=*/true)) {}

SimplicialComplex SimplicialComplex::from_simplices(std::size_t vertex_count,
                                                    std::vector<Simplex> simplices, std::string name) {
  return SimplicialComplex(build(vertex_count, std::move(simplices), std::move(name), /*strict=*/false));
}

std::shared_ptr<const SimplicialComplex::Data> SimplicialComplex::build(
    std::size_t vertex_count, std::vector<Simplex> generators, std::string name, bool strict) {
  auto data = std::make_shared<Data>();
  data->name = std::move(name);
  data->vertex_count = vertex_count;

  for (Simplex& s : generators) {
    std::sort(s.begin(), s.end());
    if (s.empty()) {
      if (strict) throw InvalidComplex("empty facet");
      continue;
    }
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw InvalidComplex("facet " + describe(s) + " repeats a vertex");
    if (s.front() < 0 || static_cast<std::size_t>(s.back()) >= vertex_count)
      throw InvalidComplex("facet " + describe(s) + " has a vertex outside [0, " +
                           std::to_string(vertex_count) + ")");
  }
  std::erase_if(generators, [](const Simplex& s) { return s.empty(); });
  std::sort(generators.begin(), generators.end());
  if (strict && std::adjacent_find(generators.begin(), generators.end()) != generators.end())
    throw InvalidComplex("duplicated facet");
  generators.erase(std::unique(generators.begin(), generators.end()), generators.end());

  for (const Simplex& s : generators) add_faces(s, data->simplices);
  for (auto& layer : data->simplices) {
    std::sort(layer.begin(), layer.end());
    layer.erase(std::unique(layer.begin(), layer.end()), layer.end());
  }

  // A simplex is a facet iff no simplex one dimension up has it as a face.
  std::vector<std::vector<bool>> has_coface(data->simplices.size());
  for (std::size_t k = 0; k < data->simplices.size(); ++k)
    has_coface[k].assign(data->simplices[k].size(), false);
  Simplex face;
  for (std::size_t k = 1; k < data->simplices.size(); ++k) {
    const auto& lower = data->simplices[k - 1];
    for (const Simplex& s : data->simplices[k]) {
      for (std::size_t drop = 0; drop < s.size(); ++drop) {
        face.assign(s.begin(), s.end());
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(drop));
        auto it = std::lower_bound(lower.begin(), lower.end(), face);
        has_coface[k - 1][static_cast<std::size_t>(it - lower.begin())] = true;
      }
    }
  }
  for (std::size_t k = 0; k < data->simplices.size(); ++k)
    for (std::size_t i = 0; i < data->simplices[k].size(); ++i)
      if (!has_coface[k][i]) data->facets.push_back(data->simplices[k][i]);
  std::sort(data->facets.begin(), data->facets.end());

  if (strict && data->facets.size() != generators.size()) {
    for (const Simplex& s : generators)
      if (!std::binary_search(data->facets.begin(), data->facets.end(), s))
        throw InvalidComplex("facet " + describe(s) + " is contained in another facet");
  }
  return data;
}

SimplicialComplex SimplicialComplex::renamed(std::string name) const {
  auto data = std::make_shared<Data>(*data_);
  data->name = std::move(name);
  return SimplicialComplex(std::shared_ptr<const Data>(std::move(data)));
}

const std::vector<Simplex>& SimplicialComplex::simplices(int k) const {
  static const std::vector<Simplex> kNone;
  if (k < 0 || k > dimension()) return kNone;
  return data_->simplices[static_cast<std::size_t>(k)];
}

std::size_t SimplicialComplex::total_simplices() const {
  std::size_t n = 0;
  for (const auto& layer : data_->simplices) n += layer.size();
  return n;
}

std::optional<std::size_t> SimplicialComplex::index_of(const Simplex& s) const {
  if (s.empty()) return std::nullopt;
  const auto& layer = simplices(static_cast<int>(s.size()) - 1);
  auto it = std::lower_bound(layer.begin(), layer.end(), s);
  if (it == layer.end() || *it != s) return std::nullopt;
  return static_cast<std::size_t>(it - layer.begin());
}

std::vector<Vertex> SimplicialComplex::vertices() const {
  std::vector<Vertex> out;
  for (const Simplex& s : simplices(0)) out.push_back(s[0]);
  return out;
}

bool SimplicialComplex::has_vertex(Vertex v) const { return contains(Simplex{v}); }

long SimplicialComplex::euler_characteristic() const {
  long chi = 0;
  for (int k = 0; k <= dimension(); ++k)
    chi += (k % 2 == 0 ? 1L : -1L) * static_cast<long>(count(k));
  return chi;
}

bool is_subcomplex(const SimplicialComplex& sub, const SimplicialComplex& total) {
  return std::all_of(sub.facets().begin(), sub.facets().end(),
                     [&](const Simplex& s) { return total.contains(s); });
}

SimplicialPair make_pair(SimplicialComplex total, SimplicialComplex sub) {
  if (!is_subcomplex(sub, total))
    throw NotASubcomplex("'" + sub.name() + "' is not a subcomplex of '" + total.name() + "'");
  return SimplicialPair{std::move(total), std::move(sub)};
}

exactalg::SparseIntegerMatrix sparse_boundary(const SimplicialComplex& x, int k) {
  const auto& cells = x.simplices(k);
  if (k <= 0) return exactalg::SparseIntegerMatrix(0, cells.size());
  const auto& faces = x.simplices(k - 1);
  exactalg::SparseIntegerMatrix d(faces.size(), cells.size());
  Simplex face;
  for (std::size_t j = 0; j < cells.size(); ++j) {
    const Simplex& s = cells[j];
    std::vector<exactalg::SparseIntegerMatrix::Entry> col;
    col.reserve(s.size());
    for (std::size_t drop = 0; drop < s.size(); ++drop) {
      face.assign(s.begin(), s.end());
      face.erase(face.begin() + static_cast<std::ptrdiff_t>(drop));
      auto it = std::lower_bound(faces.begin(), faces.end(), face);
      col.emplace_back(static_cast<std::size_t>(it - faces.begin()), drop % 2 == 0 ? 1 : -1);
    }
    d.set_column(j, std::move(col));
  }
  return d;
}

exactalg::IntegerMatrix boundary_matrix(const SimplicialComplex& x, int k) {
  if (k < 0 || k > x.dimension())
    throw DegreeOutOfRange("boundary_matrix: degree " + std::to_string(k) + " outside [0, " +
                           std::to_string(x.dimension()) + "]");
  return sparse_boundary(x, k).to_dense();
}

SimplicialComplex product(const SimplicialComplex& x, const SimplicialComplex& y) {
  const auto ny = static_cast<Vertex>(y.vertex_count());
  std::vector<Simplex> out;
  for (const Simplex& s : x.facets()) {
    for (const Simplex& t : y.facets()) {
      const std::size_t p = s.size() - 1;
      const std::size_t q = t.size() - 1;
      // A lattice path from (0,0) to (p,q): true = step in x, false = in y.
      std::vector<bool> steps(p + q, false);
      std::fill(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(p), true);
      std::sort(steps.begin(), steps.end());
      do {
        Simplex cell;
        cell.reserve(p + q + 1);
        std::size_t i = 0;
        std::size_t j = 0;
        cell.push_back(s[0] * ny + t[0]);
        for (bool in_x : steps) {
          if (in_x) {
            ++i;
          } else {
            ++j;
          }
          cell.push_back(s[i] * ny + t[j]);
        }
        out.push_back(std::move(cell));
      } while (std::next_permutation(steps.begin(), steps.end()));
    }
  }
  std::string name;
  if (!x.name().empty() || !y.name().empty()) name = x.name() + " x " + y.name();
  return SimplicialComplex::from_simplices(x.vertex_count() * y.vertex_count(), std::move(out),
                                           std::move(name));
}

namespace {

void require_vertex(const SimplicialComplex& x, Vertex v, const char* op) {
  if (!x.has_vertex(v))
    throw UnknownVertex(std::string(op) + ": " + std::to_string(v) + " is not a vertex of '" +
                        x.name() + "'");
}

}  // namespace

SimplicialComplex puncture(const SimplicialComplex& x, Vertex v) {
  require_vertex(x, v, "puncture");
  std::vector<Simplex> keep;
  for (const Simplex& s : x.facets()) {
    Simplex t;
    std::copy_if(s.begin(), s.end(), std::back_inserter(t), [v](Vertex w) { return w != v; });
    if (!t.empty()) keep.push_back(std::move(t));
  }
  return SimplicialComplex::from_simplices(x.vertex_count(), std::move(keep),
                                           x.name().empty() ? "" : x.name() + " - " + std::to_string(v));
}

SimplicialComplex link(const SimplicialComplex& x, Vertex v) {
  require_vertex(x, v, "link");
  std::vector<Simplex> out;
  for (const Simplex& s : x.facets()) {
    if (!std::binary_search(s.begin(), s.end(), v)) continue;
    Simplex t;
    std::copy_if(s.begin(), s.end(), std::back_inserter(t), [v](Vertex w) { return w != v; });
    out.push_back(std::move(t));
  }
  return SimplicialComplex::from_simplices(x.vertex_count(), std::move(out));
}

SimplicialComplex star(const SimplicialComplex& x, Vertex v) {
  require_vertex(x, v, "star");
  std::vector<Simplex> out;
  for (const Simplex& s : x.facets())
    if (std::binary_search(s.begin(), s.end(), v)) out.push_back(s);
  return SimplicialComplex::from_simplices(x.vertex_count(), std::move(out));
}

SimplicialComplex cone(const SimplicialComplex& x) {
  const auto apex = static_cast<Vertex>(x.vertex_count());
  std::vector<Simplex> out;
  for (Simplex s : x.facets()) {
    s.push_back(apex);
    out.push_back(std::move(s));
  }
  if (out.empty()) out.push_back({apex});
  return SimplicialComplex::from_simplices(x.vertex_count() + 1, std::move(out),
                                           x.name().empty() ? "" : "cone(" + x.name() + ")");
}

SimplicialComplex barycentric_subdivision(const SimplicialComplex& x) {
  std::vector<std::size_t> offset(static_cast<std::size_t>(x.dimension() + 2), 0);
  for (int k = 0; k <= x.dimension(); ++k)
    offset[static_cast<std::size_t>(k) + 1] = offset[static_cast<std::size_t>(k)] + x.count(k);
  auto label = [&](const Simplex& s) {
    return static_cast<Vertex>(offset[s.size() - 1] + *x.index_of(s));
  };
  std::vector<Simplex> out;
  for (const Simplex& facet : x.facets()) {
    Simplex order = facet;
    do {
      Simplex chain;
      Simplex prefix;
      for (Vertex v : order) {
        prefix.insert(std::upper_bound(prefix.begin(), prefix.end(), v), v);
        chain.push_back(label(prefix));
      }
      out.push_back(std::move(chain));
    } while (std::next_permutation(order.begin(), order.end()));
  }
  return SimplicialComplex::from_simplices(x.total_simplices(), std::move(out),
                                           x.name().empty() ? "" : "sd(" + x.name() + ")");
}

StellarSubdivision stellar_subdivision(const SimplicialComplex& x, const Simplex& facet) {
  Simplex target = facet;
  std::sort(target.begin(), target.end());
  if (!std::binary_search(x.facets().begin(), x.facets().end(), target))
    throw InvalidComplex("stellar_subdivision: " + describe(target) + " is not a facet");
  const auto centre = static_cast<Vertex>(x.vertex_count());
  std::vector<Simplex> out;
  for (const Simplex& s : x.facets())
    if (s != target) out.push_back(s);
  for (std::size_t drop = 0; drop < target.size(); ++drop) {
    Simplex t = target;
    t.erase(t.begin() + static_cast<std::ptrdiff_t>(drop));
    t.push_back(centre);
    out.push_back(std::move(t));
  }
  return {SimplicialComplex::from_simplices(x.vertex_count() + 1, std::move(out), x.name()), centre};
}

SimplicialComplex union_of(const SimplicialComplex& a, const SimplicialComplex& b) {
  std::vector<Simplex> all = a.facets();
  all.insert(all.end(), b.facets().begin(), b.facets().end());
  return SimplicialComplex::from_simplices(std::max(a.vertex_count(), b.vertex_count()), std::move(all));
}

SimplicialComplex intersection_of(const SimplicialComplex& a, const SimplicialComplex& b) {
  std::vector<Simplex> common;
  for (int k = 0; k <= std::min(a.dimension(), b.dimension()); ++k) {
    std::set_intersection(a.simplices(k).begin(), a.simplices(k).end(), b.simplices(k).begin(),
                          b.simplices(k).end(), std::back_inserter(common));
  }
  return SimplicialComplex::from_simplices(std::max(a.vertex_count(), b.vertex_count()), std::move(common));
}

SimplicialComplex induced_subcomplex(const SimplicialComplex& x, const std::vector<Vertex>& vertices) {
  std::vector<Vertex> keep = vertices;
  std::sort(keep.begin(), keep.end());
  std::vector<Simplex> out;
  for (const Simplex& s : x.facets()) {
    Simplex t;
    std::copy_if(s.begin(), s.end(), std::back_inserter(t),
                 [&](Vertex w) { return std::binary_search(keep.begin(), keep.end(), w); });
    if (!t.empty()) out.push_back(std::move(t));
  }
  return SimplicialComplex::from_simplices(x.vertex_count(), std::move(out));
}

namespace {

// Number of facets containing each (d-1)-simplex, for pure complexes.
std::optional<std::vector<std::size_t>> ridge_degrees(const SimplicialComplex& x) {
  const int d = x.dimension();
  for (const Simplex& f : x.facets())
    if (static_cast<int>(f.size()) - 1 != d) return std::nullopt;
  std::vector<std::size_t> degree(x.count(d - 1), 0);
  Simplex face;
  for (const Simplex& f : x.facets()) {
    for (std::size_t drop = 0; drop < f.size(); ++drop) {
      face.assign(f.begin(), f.end());
      face.erase(face.begin() + static_cast<std::ptrdiff_t>(drop));
      ++degree[*x.index_of(face)];
    }
  }
  return degree;
}

}  // namespace

bool is_closed_pseudomanifold(const SimplicialComplex& x) {
  if (x.empty()) return false;
  if (x.dimension() == 0) return x.count(0) == x.facets().size();
  auto degree = ridge_degrees(x);
  if (!degree) return false;
  return std::all_of(degree->begin(), degree->end(), [](std::size_t n) { return n == 2; });
}

SimplicialComplex pseudomanifold_boundary(const SimplicialComplex& x) {
  auto degree = ridge_degrees(x);
  std::vector<Simplex> out;
  if (degree && x.dimension() >= 1) {
    const auto& ridges = x.simplices(x.dimension() - 1);
    for (std::size_t i = 0; i < ridges.size(); ++i)
      if ((*degree)[i] == 1) out.push_back(ridges[i]);
  }
  return SimplicialComplex::from_simplices(x.vertex_count(), std::move(out));
}

SimplicialComplex skeleton(const SimplicialComplex& x, int k) {
  std::vector<Simplex> out;
  for (int j = 0; j <= std::min(k, x.dimension()); ++j)
    out.insert(out.end(), x.simplices(j).begin(), x.simplices(j).end());
  return SimplicialComplex::from_simplices(x.vertex_count(), std::move(out));
}

}  // namespace fibrestab::complexes

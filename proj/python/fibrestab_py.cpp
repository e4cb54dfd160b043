// Python bindings. Complexes, groups and homology are native objects; queries,
// verdicts and experiments cross the boundary as plain dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fibrestab/bundlesim.hpp"
#include "fibrestab/catalog.hpp"
#include "fibrestab/errors.hpp"
#include "fibrestab/exactalg.hpp"
#include "fibrestab/experiment.hpp"
#include "fibrestab/homology.hpp"
#include "fibrestab/json_io.hpp"
#include "fibrestab/obstruction.hpp"
#include "fibrestab/sequences.hpp"

namespace py = pybind11;
using namespace fibrestab;

namespace {

py::int_ to_py(const exactalg::Integer& n) { return py::int_(py::str(n.get_str())); }

py::list to_py(const std::vector<exactalg::Integer>& v) {
  py::list out;
  for (const auto& n : v) out.append(to_py(n));
  return out;
}

/// Round-trips through the json module; the library's JSON readers do the validation.
io::Json from_dict(const py::object& o) {
  return io::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::object to_dict(const io::Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

complexes::SimplicialComplex complex_arg(const py::object& o) {
  if (py::isinstance<complexes::SimplicialComplex>(o)) return o.cast<complexes::SimplicialComplex>();
  if (py::isinstance<py::str>(o)) return complexes::catalog(o.cast<std::string>());
  return io::complex_from_json(from_dict(o));
}

bundlesim::FeedbackSystem shipped_system(const std::string& name) {
  if (name == "pendulum") return bundlesim::pendulum_system();
  if (name == "gated_pendulum") return bundlesim::gated_pendulum_system();
  if (name == "mobius") return bundlesim::mobius_system();
  if (name == "incompatible") return bundlesim::incompatible_system();
  if (name == "linear_patch") return bundlesim::linear_patch_system();
  if (name == "decay_patch") return bundlesim::decay_patch_system();
  throw UnknownName("unknown system '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_fibrestab, m) {
  m.doc() = "Homology-based obstructions to dynamic feedback stabilization";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
#define FIBRESTAB_PY_ERROR(Name) py::register_exception<Name>(m, #Name, base.ptr())
  FIBRESTAB_PY_ERROR(CompositeModulus);
  FIBRESTAB_PY_ERROR(DegreeOutOfRange);
  FIBRESTAB_PY_ERROR(UnknownVertex);
  FIBRESTAB_PY_ERROR(UnknownName);
  FIBRESTAB_PY_ERROR(InvalidComplex);
  FIBRESTAB_PY_ERROR(ParseError);
  FIBRESTAB_PY_ERROR(NotASubcomplex);
  FIBRESTAB_PY_ERROR(NotACover);
  FIBRESTAB_PY_ERROR(NotConnected);
  FIBRESTAB_PY_ERROR(DimensionMismatch);
  FIBRESTAB_PY_ERROR(NotClosed);
  FIBRESTAB_PY_ERROR(NotAManifoldDim);
  FIBRESTAB_PY_ERROR(CompatibilityNotVerified);
  FIBRESTAB_PY_ERROR(NonFiniteState);
  FIBRESTAB_PY_ERROR(NonConvergentSample);
#undef FIBRESTAB_PY_ERROR

  py::class_<exactalg::AbelianGroup>(m, "AbelianGroup")
      .def(py::init([](std::size_t free_rank, const std::vector<long>& orders) {
             return exactalg::AbelianGroup::from_cyclic_orders(free_rank, {orders.begin(), orders.end()});
           }),
           py::arg("free_rank") = 0, py::arg("torsion") = std::vector<long>{})
      .def_property_readonly("free_rank", &exactalg::AbelianGroup::free_rank)
      .def_property_readonly("torsion", [](const exactalg::AbelianGroup& g) { return to_py(g.torsion()); })
      .def("is_zero", &exactalg::AbelianGroup::is_zero)
      .def("__eq__", [](const exactalg::AbelianGroup& a, const exactalg::AbelianGroup& b) { return a == b; })
      .def("__str__", &exactalg::AbelianGroup::to_string)
      .def("__repr__", [](const exactalg::AbelianGroup& g) { return "AbelianGroup(" + g.to_string() + ")"; });

  py::class_<complexes::SimplicialComplex>(m, "SimplicialComplex")
      .def(py::init([](std::size_t n, const std::vector<complexes::Simplex>& facets, const std::string& name) {
             return complexes::SimplicialComplex::from_simplices(n, facets, name);
           }),
           py::arg("vertex_count"), py::arg("simplices"), py::arg("name") = "")
      .def_property_readonly("name", &complexes::SimplicialComplex::name)
      .def_property_readonly("vertex_count", &complexes::SimplicialComplex::vertex_count)
      .def_property_readonly("facets", &complexes::SimplicialComplex::facets)
      .def_property_readonly("dimension", &complexes::SimplicialComplex::dimension)
      .def("count", &complexes::SimplicialComplex::count)
      .def("euler_characteristic", &complexes::SimplicialComplex::euler_characteristic)
      .def("__eq__", [](const complexes::SimplicialComplex& a, const complexes::SimplicialComplex& b) { return a == b; })
      .def("__repr__", [](const complexes::SimplicialComplex& x) {
        return "SimplicialComplex('" + x.name() + "', dim=" + std::to_string(x.dimension()) + ")";
      });

  m.def("catalog", &complexes::catalog, py::arg("name"));
  m.def("catalog_names", &complexes::catalog_names);
  m.def("product", [](const py::object& x, const py::object& y) { return complexes::product(complex_arg(x), complex_arg(y)); });
  m.def("puncture", [](const py::object& x, int v) { return complexes::puncture(complex_arg(x), v); });
  m.def("barycentric_subdivision", [](const py::object& x) { return complexes::barycentric_subdivision(complex_arg(x)); });

  m.def(
      "invariant_factors",
      [](const std::vector<std::vector<py::int_>>& rows) {
        const std::size_t cols = rows.empty() ? 0 : rows.front().size();
        std::vector<exactalg::Integer> entries;
        for (const auto& row : rows) {
          if (row.size() != cols) throw DimensionMismatch("rows have different lengths");
          for (const auto& v : row) entries.emplace_back(py::str(static_cast<py::handle>(v)).cast<std::string>());
        }
        return to_py(exactalg::invariant_factors(exactalg::IntegerMatrix(rows.size(), cols, std::move(entries))));
      },
      py::arg("rows"));

  m.def(
      "homology",
      [](const py::object& x, const std::string& ring, bool reduced) {
        const auto cx = complex_arg(x);
        const auto coeffs = exactalg::Coefficients::parse(ring);
        return (reduced ? homology::reduced_homology(cx, coeffs) : homology::homology(cx, coeffs)).groups;
      },
      py::arg("complex"), py::arg("ring") = "Z", py::arg("reduced") = false);
  m.def("betti_numbers",
        [](const py::object& x, const std::string& ring) {
          return homology::homology(complex_arg(x), exactalg::Coefficients::parse(ring)).betti_numbers();
        },
        py::arg("complex"), py::arg("ring") = "Q");

  m.def(
      "kunneth_check",
      [](const py::object& x, const py::object& y, const std::string& ring, int lo, int hi) {
        py::list out;
        for (const auto& r : sequences::kunneth_check(complex_arg(x), complex_arg(y), exactalg::Coefficients::parse(ring), lo, hi))
          out.append(to_dict(io::kunneth_to_json(r)));
        return out;
      },
      py::arg("x"), py::arg("y"), py::arg("ring") = "Z", py::arg("lo") = 0, py::arg("hi") = 2);
  m.def(
      "mayer_vietoris",
      [](const py::object& x, const py::object& a, const py::object& b, const std::string& field, int lo, int hi) {
        return to_dict(io::exactness_to_json(sequences::mayer_vietoris(complex_arg(x), complex_arg(a), complex_arg(b),
                                                                        exactalg::Coefficients::parse(field), lo, hi)));
      },
      py::arg("total"), py::arg("a"), py::arg("b"), py::arg("field") = "Q", py::arg("lo") = 0, py::arg("hi") = 2);
  m.def(
      "pair_les_check",
      [](const py::object& x, const py::object& a, const std::string& field, int lo, int hi) {
        return to_dict(io::exactness_to_json(sequences::pair_les_check(
            complexes::make_pair(complex_arg(x), complex_arg(a)), exactalg::Coefficients::parse(field), lo, hi)));
      },
      py::arg("total"), py::arg("sub"), py::arg("field") = "Q", py::arg("lo") = 0, py::arg("hi") = 2);

  m.def("is_orientable_closed", [](const py::object& x, int n) { return obstruction::is_orientable_closed(complex_arg(x), n); });
  m.def("evaluate", [](const py::object& query) {
    return to_dict(io::verdict_to_json(obstruction::evaluate(io::query_from_json(from_dict(query)))));
  });

  m.def(
      "check_compatibility",
      [](const std::string& system, std::size_t samples, double tol) {
        return to_dict(bundlesim::compatibility_to_json(bundlesim::check_compatibility(shipped_system(system), samples, tol)));
      },
      py::arg("system"), py::arg("samples_per_component") = 5000, py::arg("tol") = 1e-9);
  m.def("run_experiment", [](const py::object& experiment) {
    const auto e = bundlesim::experiment_from_json(from_dict(experiment));
    bundlesim::ExperimentResult r;
    {
      py::gil_scoped_release release;
      r = bundlesim::run_experiment(e);
    }
    return to_dict(bundlesim::result_to_json(e, r));
  });
}

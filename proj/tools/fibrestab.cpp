// Command-line front end: homology, sequence checks, obstruction verdicts and
// bundle simulations.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fibrestab/bundlesim.hpp"
#include "fibrestab/catalog.hpp"
#include "fibrestab/errors.hpp"
#include "fibrestab/experiment.hpp"
#include "fibrestab/homology.hpp"
#include "fibrestab/json_io.hpp"
#include "fibrestab/obstruction.hpp"
#include "fibrestab/sequences.hpp"

namespace {

using fibrestab::io::Json;
namespace fs = std::filesystem;

enum Exit : int {
  kOk = 0,
  kCheckFailed = 1,
  kBadInput = 2,
  kNotAComplex = 3,
  kNotACover = 4,
  kIncompatible = 5,
};

/// A file path, or the name of a catalog entry when no such file exists.
fibrestab::complexes::SimplicialComplex load_complex(const std::string& ref) {
  if (fs::exists(ref)) return fibrestab::io::complex_from_json(fibrestab::io::read_file(ref));
  const auto names = fibrestab::complexes::catalog_names();
  if (std::find(names.begin(), names.end(), ref) != names.end()) return fibrestab::complexes::catalog(ref);
  throw fibrestab::ParseError("'" + ref + "' is neither a readable file nor a catalog name");
}

/// "lo..hi" or a single degree.
std::pair<int, int> parse_degrees(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int k = std::stoi(text);
      return {k, k};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::logic_error&) {
    throw fibrestab::ParseError("degrees must look like 'lo..hi' or 'k', got '" + text + "'");
  }
}

struct Output {
  std::string path;

  void write(const Json& j) const { write_text(fibrestab::io::dump(j)); }

  void write_text(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(path);
    if (!out) throw fibrestab::ParseError("cannot write '" + path + "'");
    out << text;
  }
};

int run_homology(const std::string& input, const std::string& ring, bool reduced, const Output& out) {
  const auto x = load_complex(input);
  const auto coeffs = fibrestab::exactalg::Coefficients::parse(ring);
  const auto profile = reduced ? fibrestab::homology::reduced_homology(x, coeffs) : fibrestab::homology::homology(x, coeffs);
  Json j{{"complex", x.name()}, {"reduced", reduced}};
  const Json body = fibrestab::io::profile_to_json(profile);
  for (const auto& [key, value] : body.items()) j[key] = value;
  out.write(j);
  return kOk;
}

int run_check(const std::string& kind, const std::vector<std::string>& inputs, const std::optional<std::string>& field,
              const std::string& degrees, const Output& out) {
  using namespace fibrestab;
  const auto [lo, hi] = parse_degrees(degrees);
  Json j{{"check", kind}};
  bool ok = false;
  if (kind == "kunneth") {
    if (inputs.size() != 2) throw ParseError("kunneth takes two complexes");
    const auto ring = exactalg::Coefficients::parse(field.value_or("Z"));
    const auto x = load_complex(inputs[0]);
    const auto y = load_complex(inputs[1]);
    Json degrees_json = Json::array();
    ok = true;
    for (const auto& r : sequences::kunneth_check(x, y, ring, lo, hi)) {
      ok = ok && r.consistent;
      degrees_json.push_back(io::kunneth_to_json(r));
    }
    j["inputs"] = {x.name(), y.name()};
    j["degrees"] = std::move(degrees_json);
    j["consistent"] = ok;
  } else if (kind == "mv") {
    const auto f = exactalg::Coefficients::parse(field.value_or("Q"));
    io::Cover cover;
    if (inputs.size() == 1) {
      cover = io::cover_from_json(io::read_file(inputs[0]));
    } else if (inputs.size() == 3) {
      cover = io::Cover{load_complex(inputs[0]), load_complex(inputs[1]), load_complex(inputs[2])};
    } else {
      throw ParseError("mv takes a cover file or three complexes X A B");
    }
    const auto r = sequences::mayer_vietoris(cover.total, cover.a, cover.b, f, lo, hi);
    ok = r.verdict;
    j["report"] = io::exactness_to_json(r);
  } else if (kind == "pair-les") {
    const auto f = exactalg::Coefficients::parse(field.value_or("Q"));
    complexes::SimplicialPair pair;
    if (inputs.size() == 1) {
      pair = io::pair_from_json(io::read_file(inputs[0]));
    } else if (inputs.size() == 2) {
      pair = complexes::SimplicialPair{load_complex(inputs[0]), load_complex(inputs[1])};
    } else {
      throw ParseError("pair-les takes a pair file or two complexes X A");
    }
    const auto r = sequences::pair_les_check(pair, f, lo, hi);
    ok = r.verdict;
    j["report"] = io::exactness_to_json(r);
  } else {
    throw ParseError("unknown check '" + kind + "' (expected kunneth, mv or pair-les)");
  }
  out.write(j);
  return ok ? kOk : kCheckFailed;
}

int run_obstruct(const std::string& input, const Output& out) {
  using namespace fibrestab;
  const auto query = io::query_from_json(io::read_file(input));
  const auto verdict = obstruction::evaluate(query);
  Json j{{"M", query.M.name()},
         {"U", query.U.name()},
         {"E", query.E ? Json(query.E->name()) : Json(nullptr)},
         {"mode", obstruction::to_string(query.mode)},
         {"one_point", query.one_point}};
  const Json body = io::verdict_to_json(verdict);
  for (const auto& [key, value] : body.items()) j[key] = value;
  out.write(j);
  return kOk;
}

struct SimulateOverrides {
  std::optional<double> eps;
  std::optional<double> step;
  std::optional<double> duration;
  std::optional<unsigned> threads;
};

int run_simulate(const std::string& input, const std::string& csv_path, const SimulateOverrides& o,
                 const Output& out) {
  using namespace fibrestab;
  bundlesim::Experiment e = bundlesim::experiment_from_json(io::read_file(input));
  if (o.eps) e.basin.criteria.eps = *o.eps;
  if (o.step) e.basin.step = *o.step;
  if (o.duration) e.basin.duration = *o.duration;
  if (o.threads) e.basin.threads = *o.threads;
  const bundlesim::ExperimentResult r = bundlesim::run_experiment(e);
  out.write(bundlesim::result_to_json(e, r));
  if (!r.compatibility.pass) {
    std::cerr << "compatibility check failed: max residual f = " << r.compatibility.max_residual_f
              << ", g = " << r.compatibility.max_residual_g << " (tolerance " << r.compatibility.tolerance << ")\n";
    return kIncompatible;
  }
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw ParseError("cannot write '" + csv_path + "'");
    bundlesim::write_trajectory_csv(csv, r.trajectories);
  }
  return kOk;
}

int run_catalog(const std::string& name, const Output& out) {
  using namespace fibrestab;
  if (!name.empty()) {
    out.write(io::complex_to_json(complexes::catalog(name)));
    return kOk;
  }
  Json list = Json::array();
  for (const auto& e : complexes::catalog_entries())
    list.push_back(Json{{"name", e.name},
                        {"description", e.description},
                        {"dimension", e.dimension},
                        {"closed", e.closed},
                        {"orientable", e.orientable},
                        {"vertices", e.complex.vertex_count()},
                        {"facets", e.complex.facets().size()}});
  out.write(list);
  return kOk;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const fibrestab::InvalidComplex& e) {
    std::cerr << "error: invalid complex: " << e.what() << "\n";
    return kNotAComplex;
  } catch (const fibrestab::NotACover& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNotACover;
  } catch (const fibrestab::NotASubcomplex& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNotACover;
  } catch (const fibrestab::CompatibilityNotVerified& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIncompatible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological obstructions to dynamic feedback stabilization"};
  app.require_subcommand(1);
  Output out;
  app.add_option("-o,--out", out.path, "Write the JSON result to this file instead of stdout");

  std::function<int()> action;

  auto* homology = app.add_subcommand("homology", "Homology of a complex (file or catalog name)");
  std::string h_input;
  std::string h_ring = "Z";
  bool h_reduced = false;
  homology->add_option("complex", h_input, "Complex JSON file or catalog name")->required();
  homology->add_option("--ring", h_ring, "Z, Q or Z/p")->capture_default_str();
  homology->add_flag("--reduced", h_reduced, "Reduced homology");
  homology->callback([&] { action = [&] { return run_homology(h_input, h_ring, h_reduced, out); }; });

  auto* check = app.add_subcommand("check", "Künneth, Mayer-Vietoris or pair long exact sequence checks");
  std::string c_kind;
  std::vector<std::string> c_inputs;
  std::optional<std::string> c_field;
  std::string c_degrees = "0..2";
  check->add_option("kind", c_kind, "kunneth, mv or pair-les")->required();
  check->add_option("inputs", c_inputs, "Complexes, a cover file or a pair file")->required();
  check->add_option("--field,--ring", c_field, "Coefficients (default Z for kunneth, Q otherwise)");
  check->add_option("--degrees", c_degrees, "Degree range lo..hi")->capture_default_str();
  check->callback([&] { action = [&] { return run_check(c_kind, c_inputs, c_field, c_degrees, out); }; });

  auto* obstruct = app.add_subcommand("obstruct", "Evaluate a stabilization query");
  std::string o_input;
  obstruct->add_option("query", o_input, "Query JSON file")->required();
  obstruct->callback([&] { action = [&] { return run_obstruct(o_input, out); }; });

  auto* simulate = app.add_subcommand("simulate", "Run a bundle simulation experiment");
  std::string s_input;
  std::string s_csv;
  SimulateOverrides s_over;
  simulate->add_option("experiment", s_input, "Experiment JSON file")->required();
  simulate->add_option("--csv-out", s_csv, "Write the listed trajectories as CSV");
  simulate->add_option("--eps", s_over.eps, "Convergence threshold");
  simulate->add_option("--step", s_over.step, "RK4 step in seconds");
  simulate->add_option("--duration", s_over.duration, "Simulated seconds per trajectory");
  simulate->add_option("--threads", s_over.threads, "Worker threads (default FIBRESTAB_THREADS or all cores)");
  simulate->callback([&] { action = [&] { return run_simulate(s_input, s_csv, s_over, out); }; });

  auto* catalog = app.add_subcommand("catalog", "List the shipped complexes or print one");
  std::string k_name;
  catalog->add_option("name", k_name, "Print this entry as complex JSON");
  catalog->callback([&] { action = [&] { return run_catalog(k_name, out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }
  return guarded(action);
}

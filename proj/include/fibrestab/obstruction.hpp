#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fibrestab/complexes.hpp"
#include "fibrestab/exactalg.hpp"

namespace fibrestab::obstruction {

using complexes::SimplicialComplex;
using exactalg::AbelianGroup;

enum class Status { kObstructed, kNotObstructedByTheseTests };
enum class Mode { kStrong, kWeak };

std::string to_string(Status s);
std::string to_string(Mode m);
/// Accepts "strong" and "weak"; throws ParseError otherwise.
Mode parse_mode(const std::string& text);

/// One computed fact behind a verdict. `witness` is true when the fact, on
/// its own, rules out the requested stabilization.
struct Evidence {
  std::string lemma;
  int degree = 0;
  std::optional<AbelianGroup> group_M;
  std::optional<AbelianGroup> group_E;
  std::optional<AbelianGroup> group_U;
  std::optional<AbelianGroup> group_E1;
  bool witness = false;
  std::string detail;
};

struct Verdict {
  Status status = Status::kNotObstructedByTheseTests;
  std::vector<Evidence> evidence;
  std::string narrative;
};

/// First k >= 1 with H_k(M; Z) != 0. Degree 1 doubles as a nonzero
/// abelianized fundamental group.
struct Certificate {
  int degree = 0;
  AbelianGroup group;
  std::string kind;
};

/// Empty when every H_k, k >= 1, vanishes (inconclusive). Throws NotConnected.
std::optional<Certificate> non_contractibility_certificate(const SimplicialComplex& m);

/// True iff H_n(M; Z) = Z. Throws NotAManifoldDim when dim M != n and
/// NotClosed when M is not a closed pseudomanifold.
bool is_orientable_closed(const SimplicialComplex& m, int n);

/// H_i = 0 for 0 < i < n and H_n = Z, with M connected. Throws NotClosed.
bool is_integral_homology_sphere(const SimplicialComplex& m);

/// How the punctured total space E - {z} is sampled: z ranges over the
/// barycentres of `samples` top-dimensional facets drawn with `seed`.
struct PunctureSampling {
  int samples = 3;
  std::uint64_t seed = 1;
};

/// Takes E = M x U. Throws NotClosed unless M is closed, NotConnected unless M
/// and U are connected.
Verdict trivial_bundle_one_point_obstruction(const SimplicialComplex& m, const SimplicialComplex& u, Mode mode,
                                             const PunctureSampling& sampling = {});

struct StabilizationQuery {
  SimplicialComplex M;
  SimplicialComplex U;
  /// Empty means the trivial product M x U.
  std::optional<SimplicialComplex> E;
  Mode mode = Mode::kStrong;
  bool one_point = false;
  PunctureSampling sampling;
};

/// Global modes certify non-contractibility of M. One-point modes test the
/// punctured total space. Throws DimensionMismatch when an explicit E has the
/// wrong dimension.
Verdict evaluate(const StabilizationQuery& query);

}  // namespace fibrestab::obstruction

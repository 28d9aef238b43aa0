#pragma once

#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "mmass/constructions.hpp"
#include "mmass/dist.hpp"
#include "mmass/extremal.hpp"
#include "mmass/mass.hpp"
#include "mmass/metric.hpp"
#include "mmass/sampling.hpp"

namespace mmass::io {

using nlohmann::json;

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

std::string read_file(const std::string& path);

// ProbVector: a JSON array of masses, {"masses": [...]}, or run-length
// {"runs": [{"mass": m, "count": c}, ...]}; CSV is one mass per line
// (blank lines and lines starting with '#' are skipped).
ProbVector prob_vector_from_json(const json& j, bool normalize = false);
ProbVector prob_vector_from_csv(std::string_view text, bool normalize = false);
/// Dispatches on a leading '[' or '{'.
ProbVector parse_prob_vector(std::string_view text, bool normalize = false);
json to_json(const ProbVector& d, bool run_length = false);
std::string to_csv(const ProbVector& d);

// CountableFamily: {"family": name, "params": {...}, "truncation_tol": tol}.
// Families: "geometric" {ratio}, "tight-countable" {a}, "explicit" {terms, tail},
// "rate-lb" {t_max, sequence: "inverse-log"} or {r: [...]}.
struct FamilySpec {
  CountableFamily family;
  double truncation_tol = 1e-12;
};
FamilySpec family_from_json(const json& j);
json to_json(const CountableFamily& f, double truncation_tol);

json to_json(const MassCurve& c);
std::string to_csv(const MassCurve& c);
MassCurve mass_curve_from_json(const json& j);
MassCurve mass_curve_from_csv(std::string_view text);

json to_json(const ExtremalSolution& s);
json to_json(const ThresholdResult& r);
json to_json(const McReport& r);
json to_json(const EpsNet& net);
json to_json(const RateConstruction& rc);

// PointCloud: JSON {"points": [[x...], ...], "masses": [...]} or
// {"matrix": [[...], ...], "masses": [...]}; CSV header id,mass,x1..xd.
PointCloud point_cloud_from_json(const json& j);
PointCloud point_cloud_from_csv(std::string_view text);
PointCloud parse_point_cloud(std::string_view text);

}  // namespace mmass::io

#pragma once

// Machine-readable artifacts. JSON numbers are written in the shortest form
// that parses back to the same double; CSV tables carry 13 significant digits.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "newton/optimizer.hpp"
#include "newton/restricted.hpp"

namespace newton::io {

using nlohmann::json;

json to_json(const ProblemConfig& c);
json to_json(const OptimizerOptions& o);
json to_json(const RunManifest& m);
json to_json(const RestrictedVars& v);
json points_to_json(std::span<const Point3> pts);

ProblemConfig config_from_json(const json& j);
OptimizerOptions options_from_json(const json& j);
RunManifest manifest_from_json(const json& j);
RestrictedVars restricted_from_json(const json& j);
std::vector<Point3> points_from_json(const json& j);

/// Solution file: {"kind": "free"|"restricted", "config", "points"|"vars", "objective"}.
json free_solution(std::span<const Point3> pts, const ProblemConfig& config, double objective);
json restricted_solution(const RestrictedVars& v, const ProblemConfig& config, double objective);

/// Facet list of an upper boundary with a variant tag per piece.
json boundary_to_json(const UpperBoundary& ub);

/// One row per manifest: solver,M,k,n,n2,objective,runtime_s,seeds,rounds.
void emit_table(std::ostream& os, std::span<const RunManifest> manifests);

/// Per-step history: iter,value.
void emit_history(std::ostream& os, const RunManifest& m);

json read_json(const std::string& path);
void write_json(const std::string& path, const json& j);

}  // namespace newton::io

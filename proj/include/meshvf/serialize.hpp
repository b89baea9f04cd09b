#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "meshvf/constraints.hpp"
#include "meshvf/mesh.hpp"
#include "meshvf/sim.hpp"

namespace meshvf {

/// {"boundary":n,"non_manifold":n,"flipped":n}
std::string to_json(const ValidationReport& report);

/// {"tick":n,"x":[...],"constraints":[{"n":[...],"p":[...],"tri":id,"cond":"C1"}, ...]}
std::string to_json(const ActiveConstraintSet& set);
ActiveConstraintSet active_set_from_json(std::string_view text);

/// One JSON object per line: {"t","desired","proxy","constrained","active","status"}.
std::string to_jsonl(const TrajectorySample& sample);
void write_trajectory_log(std::ostream& out, const TrajectoryLog& log);

/// Reads a JSON-lines log; the tick rate is recovered from the first two
/// timestamps. Throws ParseError on malformed lines or non-increasing time.
TrajectoryLog read_trajectory_log(std::istream& in);

/// A polyline as [[x,y,z], ...] or {"path": [[x,y,z], ...]}.
std::vector<Vector3d> parse_polyline(std::string_view text);

}  // namespace meshvf

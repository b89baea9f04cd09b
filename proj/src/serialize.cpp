#include "meshvf/serialize.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

namespace meshvf {

using nlohmann::json;

namespace {

json vec(const Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Vector3d to_vec(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("expected a 3-element array");
  Vector3d v;
  for (int i = 0; i < 3; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number()) throw ParseError("expected numeric coordinates");
    v[i] = j[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

SolveStatus status_from_string(const std::string& s) {
  if (s == "Optimal") return SolveStatus::Optimal;
  if (s == "FallbackZero") return SolveStatus::FallbackZero;
  throw ParseError("unknown solve status '" + s + "'");
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
}

}  // namespace

std::string to_json(const ValidationReport& report) {
  return json{{"boundary", report.boundary}, {"non_manifold", report.non_manifold}, {"flipped", report.flipped}}
      .dump();
}

std::string to_json(const ActiveConstraintSet& set) {
  json cs = json::array();
  for (const PlaneConstraint& c : set.constraints)
    cs.push_back({{"n", vec(c.normal)}, {"p", vec(c.point)}, {"tri", c.source}, {"cond", to_string(c.condition)}});
  return json{{"tick", set.tick}, {"x", vec(set.tool_position)}, {"constraints", cs}}.dump();
}

ActiveConstraintSet active_set_from_json(std::string_view text) {
  const json j = parse(text);
  try {
    ActiveConstraintSet set;
    set.tick = j.at("tick").get<std::int64_t>();
    set.tool_position = to_vec(j.at("x"));
    for (const json& c : j.at("constraints")) {
      set.constraints.push_back({to_vec(c.at("n")), to_vec(c.at("p")), c.at("tri").get<TriangleId>(),
                                 condition_from_string(c.at("cond").get<std::string>())});
    }
    return set;
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
}

std::string to_jsonl(const TrajectorySample& s) {
  return json{{"t", s.t},
              {"desired", vec(s.desired)},
              {"proxy", vec(s.proxy)},
              {"constrained", vec(s.constrained)},
              {"active", s.active},
              {"status", to_string(s.status)}}
      .dump();
}

void write_trajectory_log(std::ostream& out, const TrajectoryLog& log) {
  for (const TrajectorySample& s : log.samples) out << to_jsonl(s) << '\n';
}

TrajectoryLog read_trajectory_log(std::istream& in) {
  TrajectoryLog log;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      TrajectorySample s;
      s.t = j.at("t").get<double>();
      s.desired = to_vec(j.at("desired"));
      s.proxy = to_vec(j.at("proxy"));
      s.constrained = to_vec(j.at("constrained"));
      s.active = j.at("active").get<std::size_t>();
      s.status = status_from_string(j.at("status").get<std::string>());
      if (!log.samples.empty() && !(s.t > log.samples.back().t)) throw ParseError("timestamps must increase");
      log.samples.push_back(s);
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(number) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  if (log.samples.size() >= 2) log.tick_rate = 1.0 / (log.samples[1].t - log.samples[0].t);
  return log;
}

std::vector<Vector3d> parse_polyline(std::string_view text) {
  json j = parse(text);
  if (j.is_object()) {
    if (!j.contains("path")) throw ParseError("polyline object needs a \"path\" member");
    j = j["path"];
  }
  if (!j.is_array()) throw ParseError("polyline must be an array of points");
  std::vector<Vector3d> out;
  for (const json& p : j) out.push_back(to_vec(p));
  return out;
}

}  // namespace meshvf

#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "meshvf/serialize.hpp"
#include "meshvf/shapes.hpp"

using namespace meshvf;
using nlohmann::json;

TEST(Serialize, ValidationReport) {
  const json j = json::parse(to_json(ValidationReport{4, 1, 2}));
  EXPECT_EQ(j["boundary"], 4);
  EXPECT_EQ(j["non_manifold"], 1);
  EXPECT_EQ(j["flipped"], 2);
}

TEST(Serialize, ActiveSetRoundTripIsExact) {
  ActiveConstraintSet set;
  set.tick = 42;
  set.tool_position = {0.1, 1.0 / 3.0, -2e-17};
  set.constraints.push_back({Vector3d(0.6, 0.8, 0), Vector3d(1e-9, 2, 3), 5, ConstraintCondition::C2});
  set.constraints.push_back({Vector3d::UnitZ(), Vector3d(M_PI, 0, 0), 9, ConstraintCondition::Boundary});
  const std::string text = to_json(set);
  const ActiveConstraintSet back = active_set_from_json(text);
  EXPECT_EQ(back.tick, 42);
  EXPECT_EQ(back.tool_position, set.tool_position);
  ASSERT_EQ(back.constraints.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.constraints[i].normal, set.constraints[i].normal);
    EXPECT_EQ(back.constraints[i].point, set.constraints[i].point);
    EXPECT_EQ(back.constraints[i].source, set.constraints[i].source);
    EXPECT_EQ(back.constraints[i].condition, set.constraints[i].condition);
  }
  EXPECT_EQ(to_json(back), text);
  EXPECT_THROW(active_set_from_json("{\"tick\":1}"), ParseError);
  EXPECT_THROW(active_set_from_json("not json"), ParseError);
}

TEST(Serialize, TrajectoryLogRoundTrip) {
  TrajectoryLog log;
  log.tick_rate = 500.0;
  for (int k = 0; k < 20; ++k) {
    TrajectorySample s;
    s.t = k / 500.0;
    s.desired = {k * 0.1, 1.0 / (k + 1), 0};
    s.proxy = {k * 0.2, 0, 1};
    s.constrained = {k * 0.05, 0.5, 1e-300};
    s.active = static_cast<std::size_t>(k % 3);
    s.status = k == 7 ? SolveStatus::FallbackZero : SolveStatus::Optimal;
    log.samples.push_back(s);
  }
  std::stringstream ss;
  write_trajectory_log(ss, log);
  const TrajectoryLog back = read_trajectory_log(ss);
  ASSERT_EQ(back.samples.size(), log.samples.size());
  for (std::size_t k = 0; k < back.samples.size(); ++k) EXPECT_TRUE(back.samples[k] == log.samples[k]) << k;
  EXPECT_NEAR(back.tick_rate, 500.0, 1e-9);

  std::stringstream bad("{\"t\":0.1,\"desired\":[0,0,0],\"proxy\":[0,0,0],\"constrained\":[0,0,0],\"active\":0,"
                        "\"status\":\"Optimal\"}\n{\"t\":0.05,\"desired\":[0,0,0],\"proxy\":[0,0,0],"
                        "\"constrained\":[0,0,0],\"active\":0,\"status\":\"Optimal\"}\n");
  EXPECT_THROW(read_trajectory_log(bad), ParseError);
  std::stringstream garbage("{\"t\":\n");
  EXPECT_THROW(read_trajectory_log(garbage), ParseError);
}

TEST(Serialize, Polyline) {
  const auto a = parse_polyline("[[0,0,0],[1,2,3]]");
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[1], Vector3d(1, 2, 3));
  EXPECT_EQ(parse_polyline("{\"path\":[[0,0,0],[4,5,6]]}")[1], Vector3d(4, 5, 6));
  EXPECT_THROW(parse_polyline("[[0,0]]"), ParseError);
  EXPECT_THROW(parse_polyline("{\"points\":[]}"), ParseError);
}

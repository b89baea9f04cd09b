#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "meshvf/control_loop.hpp"
#include "meshvf/sim.hpp"

namespace meshvf {

struct BenchRecord {
  std::size_t triangle_count = 0;
  std::size_t vertex_count = 0;
  double mean_loop_hz = 0.0;
  double p99_loop_hz = 0.0;  // rate at the 99th-percentile tick period
  double query_ns = 0.0;
  double gen_ns = 0.0;
  double solve_ns = 0.0;
  double iterations = 0.0;  // mean solver iterations per tick
  std::string hardware_tag;
};

struct BenchOptions {
  double radius = 5.0;
  double clearance_fraction = 0.2;  // orbit clearance as a fraction of the radius
  std::size_t warmup_ticks = 200;
  std::size_t measured_ticks = 2000;
  std::string hardware_tag;
};

/// Near-surface slide used for every mesh of a series: starts above the point
/// of the mesh nearest to a fixed far-away direction, so all levels of one
/// shape see the same trajectory.
ScriptedScenario bench_scenario(const MeshModel& model, const BenchOptions& options);

/// Times the full loop (query, constraint generation, solve) per tick.
/// Throws Error when measured_ticks < 1000.
BenchRecord run_benchmark(std::shared_ptr<const MeshModel> model, const BenchOptions& options);
std::vector<BenchRecord> run_benchmark(const std::vector<std::shared_ptr<const MeshModel>>& series,
                                       const BenchOptions& options);

/// CSV with header triangleCount,vertexCount,meanLoopHz,p99LoopHz,queryNs,genNs,solveNs,iterations,hardwareTag.
void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records);
std::vector<BenchRecord> read_bench_csv(std::istream& in);

/// Frequency against triangle count on a log axis.
std::string bench_svg(const std::vector<BenchRecord>& records);

/// Each record's rate is at most (1 + tolerance) times the previous one's,
/// records taken in increasing triangle count.
bool monotone_non_increasing(std::vector<BenchRecord> records, double tolerance = 0.05);

/// Least-squares slope of log(period) against log(triangle count).
double loglog_period_slope(const std::vector<BenchRecord>& records);

/// CPU model name and logical core count, when the platform exposes them.
std::string default_hardware_tag();

/// The bench series shape: a bumpy sphere of radius 75 mm built at
/// 1,310,720 faces and decimated to each target count (descending order).
std::vector<TriangleMesh> bench_series(const std::vector<std::size_t>& targets);

/// Six targets from 50,000 to 1,000,000 triangles, ratio about 1.82.
std::vector<std::size_t> default_series_targets();

}  // namespace meshvf

// sim: run scripted scenarios against a mesh and score the resulting logs.
//
//   sim run --mesh part.stl --scenario RandomWalk --ticks 5000 --seed 3 --out log.jsonl
//   sim metrics --log log.jsonl --sal --deviation path.json

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "meshvf/metrics.hpp"
#include "meshvf/serialize.hpp"
#include "meshvf/shapes.hpp"
#include "meshvf/sim.hpp"

using namespace meshvf;

namespace {

TriangleMesh mesh_argument(const std::string& arg) {
  if (std::filesystem::exists(arg)) return load_mesh(arg);
  for (const auto& name : shapes::names())
    if (name == arg) return shapes::make(name);
  throw Error("'" + arg + "' is neither a mesh file nor a built-in shape");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scripted virtual-fixture simulation"};
  app.require_subcommand(1);

  std::string mesh_arg, scenario_name = "RandomWalk", out_path, waypoint_file;
  std::size_t ticks = 10000;
  double radius = 0.0, step = 0.0, tick_rate = 1000.0;
  std::uint64_t seed = 0;
  std::vector<double> start;
  bool no_verify = false;
  auto* run = app.add_subcommand("run", "Run one scenario and write a JSON-lines trajectory log");
  run->add_option("--mesh", mesh_arg, "Mesh file (.stl/.obj/.ply) or built-in shape name")->required();
  run->add_option("--scenario", scenario_name, "PushNormal, SlideTangent, OrbitEdge, RandomWalk or Waypoints");
  run->add_option("--ticks", ticks, "Number of control ticks");
  run->add_option("--radius", radius, "Motion-sphere radius in mm (default: 0.04 x bbox diagonal)");
  run->add_option("--step", step, "Per-tick step bound in mm (default: radius / 2)");
  run->add_option("--seed", seed, "Generator seed");
  run->add_option("--start", start, "Start point x y z (default: generator-specific)")->expected(3);
  run->add_option("--waypoints", waypoint_file, "JSON polyline for the Waypoints scenario");
  run->add_option("--tick-rate", tick_rate, "Nominal loop rate in Hz written to the log");
  run->add_flag("--no-verify", no_verify, "Skip the independent penetration check");
  run->add_option("--out", out_path, "Output log (default: stdout)");

  std::string log_path, deviation_path;
  bool want_sal = false;
  double cutoff = 20.0;
  auto* metrics = app.add_subcommand("metrics", "Smoothness and path deviation of a trajectory log");
  metrics->add_option("--log", log_path, "Trajectory log (JSON lines)")->required()->check(CLI::ExistingFile);
  metrics->add_flag("--sal", want_sal, "Spectral arc length of the constrained trajectory");
  metrics->add_option("--cutoff", cutoff, "SAL cutoff frequency in Hz");
  metrics->add_option("--deviation", deviation_path, "Planned path as a JSON polyline")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto model = make_model(mesh_arg, mesh_argument(mesh_arg));
      const double r = radius > 0 ? radius : default_radius(model->mesh);
      ScriptedScenario sc =
          standard_scenario(*model, generator_from_string(scenario_name), seed, ticks, step > 0 ? step : r / 2);
      if (!start.empty()) sc.start = Vector3d(start[0], start[1], start[2]);
      if (!waypoint_file.empty()) sc.waypoints = parse_polyline(read_file(waypoint_file));
      RunOptions opt;
      opt.tick_rate = tick_rate;
      opt.verify = !no_verify;
      const TrajectoryLog log = run_scenario(model, sc, r, opt);
      if (out_path.empty()) {
        write_trajectory_log(std::cout, log);
      } else {
        std::ofstream out(out_path);
        if (!out) throw Error("cannot write " + out_path);
        write_trajectory_log(out, log);
      }
      std::cerr << "ran " << log.samples.size() - 1 << " ticks on " << model->mesh.triangle_count()
                << " triangles, r = " << r << " mm\n";
      return 0;
    }

    std::ifstream in(log_path);
    const TrajectoryLog log = read_trajectory_log(in);
    nlohmann::json report = {{"samples", log.samples.size()}, {"tick_rate", log.tick_rate}};
    const auto constrained = log.constrained();
    if (want_sal) report["sal"] = spectral_arc_length(constrained, log.tick_rate, cutoff);
    if (!deviation_path.empty()) {
      const auto path = parse_polyline(read_file(deviation_path));
      const auto d = path_deviation(constrained, path);
      report["deviation"] = {{"mean", d.mean}, {"std", d.std}, {"max", d.max}};
    }
    std::cout << report.dump(2) << "\n";
  } catch (const PenetrationDetected& e) {
    std::cerr << "penetration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

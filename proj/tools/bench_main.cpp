// bench: control-loop frequency against mesh size.
//
//   bench series --out meshes/                 write the default decimation series
//   bench run --series meshes/ --ticks 5000 --out results.csv --svg results.svg

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "meshvf/bench.hpp"
#include "meshvf/mesh.hpp"

using namespace meshvf;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Virtual-fixture loop benchmark"};
  app.require_subcommand(1);

  std::vector<std::size_t> targets = default_series_targets();
  std::string series_out;
  auto* series = app.add_subcommand("series", "Generate the benchmark mesh series as binary STL files");
  series->add_option("--out", series_out, "Output directory")->required();
  series->add_option("--targets", targets, "Triangle counts (default: 50k to 1M)");

  std::string series_dir, csv_out, svg_out, tag;
  BenchOptions opt;
  auto* run = app.add_subcommand("run", "Benchmark every mesh of a series");
  run->add_option("--series", series_dir, "Directory of meshes (default: generate the series in memory)")
      ->check(CLI::ExistingDirectory);
  run->add_option("--ticks", opt.measured_ticks, "Measured ticks per mesh (>= 1000)");
  run->add_option("--warmup", opt.warmup_ticks, "Unmeasured ticks before timing");
  run->add_option("--radius", opt.radius, "Motion-sphere radius in mm");
  run->add_option("--targets", targets, "Triangle counts when generating in memory");
  run->add_option("--tag", tag, "Hardware tag (default: CPU model)");
  run->add_option("--out", csv_out, "CSV output (default: stdout)");
  run->add_option("--svg", svg_out, "Also write a frequency plot");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*series) {
      fs::create_directories(series_out);
      for (const TriangleMesh& m : bench_series(targets)) {
        const fs::path path = fs::path(series_out) / ("series_" + std::to_string(m.triangle_count()) + ".stl");
        save_mesh(m, path);
        std::cerr << path.string() << "\n";
      }
      return 0;
    }

    opt.hardware_tag = tag.empty() ? default_hardware_tag() : tag;
    std::vector<std::shared_ptr<const MeshModel>> models;
    if (series_dir.empty()) {
      for (TriangleMesh& m : bench_series(targets)) models.push_back(make_model("series", std::move(m)));
    } else {
      for (const auto& entry : fs::directory_iterator(series_dir)) {
        const std::string ext = entry.path().extension().string();
        if (ext != ".stl" && ext != ".obj" && ext != ".ply") continue;
        models.push_back(make_model(entry.path().stem().string(), load_mesh(entry.path())));
      }
    }
    if (models.empty()) throw Error("no meshes to benchmark");
    std::sort(models.begin(), models.end(),
              [](const auto& a, const auto& b) { return a->mesh.triangle_count() < b->mesh.triangle_count(); });

    std::vector<BenchRecord> records;
    for (const auto& m : models) {
      records.push_back(run_benchmark(m, opt));
      const auto& r = records.back();
      std::cerr << r.triangle_count << " triangles: " << r.mean_loop_hz << " Hz mean, " << r.p99_loop_hz
                << " Hz p99\n";
    }
    if (csv_out.empty()) {
      write_bench_csv(std::cout, records);
    } else {
      std::ofstream out(csv_out);
      if (!out) throw Error("cannot write " + csv_out);
      write_bench_csv(out, records);
    }
    if (!svg_out.empty()) std::ofstream(svg_out) << bench_svg(records);
    if (records.size() >= 2)
      std::cerr << "log-log period slope " << loglog_period_slope(records) << ", monotone "
                << (monotone_non_increasing(records) ? "yes" : "no") << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

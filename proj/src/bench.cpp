#include "meshvf/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "meshvf/mesh_series.hpp"
#include "meshvf/oracle.hpp"
#include "meshvf/shapes.hpp"

namespace meshvf {

ScriptedScenario bench_scenario(const MeshModel& model, const BenchOptions& options) {
  const auto& box = model.mesh.bounds();
  const Vector3d dir = Vector3d(1.0, 0.7, 0.4).normalized();
  const Vector3d far = box.center() + 2.0 * model.mesh.bbox_diagonal() * dir;
  const ClosestPointResult cp = DistanceOracle(model.mesh).closest(far);
  const double clearance = options.clearance_fraction * options.radius;

  ScriptedScenario sc;
  sc.mesh_id = model.id;
  sc.generator = GeneratorKind::SlideTangent;
  sc.start = cp.point + clearance * (far - cp.point).normalized();
  sc.ticks = options.warmup_ticks + options.measured_ticks;
  sc.step_bound = options.radius / 2.0;
  sc.axis = Vector3d::UnitZ();
  sc.clearance = clearance;
  return sc;
}

BenchRecord run_benchmark(std::shared_ptr<const MeshModel> model, const BenchOptions& options) {
  if (options.measured_ticks < 1000) throw Error("benchmark needs at least 1000 measured ticks");
  const ScriptedScenario sc = bench_scenario(*model, options);
  ControlLoop loop(model, sc.start, options.radius);
  DesiredGenerator generator(sc, *model);

  std::vector<std::int64_t> total;
  total.reserve(options.measured_ticks);
  double query = 0.0;
  double gen = 0.0;
  double solve = 0.0;
  double iterations = 0.0;
  for (std::size_t k = 0; k < sc.ticks; ++k) {
    const TickResult r = loop.step(generator.next(loop));
    if (k < options.warmup_ticks) continue;
    total.push_back(r.timing.total_ns);
    query += static_cast<double>(r.timing.query_ns);
    gen += static_cast<double>(r.timing.generate_ns);
    solve += static_cast<double>(r.timing.solve_ns);
    iterations += static_cast<double>(r.solution.iterations);
  }

  const auto n = static_cast<double>(total.size());
  const double mean_ns = std::accumulate(total.begin(), total.end(), 0.0) / n;
  std::sort(total.begin(), total.end());
  const std::size_t p99 = std::min(total.size() - 1, static_cast<std::size_t>(std::ceil(0.99 * n)) - 1);

  BenchRecord rec;
  rec.triangle_count = model->mesh.triangle_count();
  rec.vertex_count = model->mesh.vertex_count();
  rec.mean_loop_hz = 1e9 / mean_ns;
  rec.p99_loop_hz = 1e9 / static_cast<double>(std::max<std::int64_t>(1, total[p99]));
  rec.query_ns = query / n;
  rec.gen_ns = gen / n;
  rec.solve_ns = solve / n;
  rec.iterations = iterations / n;
  rec.hardware_tag = options.hardware_tag.empty() ? default_hardware_tag() : options.hardware_tag;
  return rec;
}

std::vector<BenchRecord> run_benchmark(const std::vector<std::shared_ptr<const MeshModel>>& series,
                                       const BenchOptions& options) {
  std::vector<BenchRecord> out;
  for (const auto& m : series) out.push_back(run_benchmark(m, options));
  return out;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << "triangleCount,vertexCount,meanLoopHz,p99LoopHz,queryNs,genNs,solveNs,iterations,hardwareTag\n";
  for (const BenchRecord& r : records) {
    std::string tag = r.hardware_tag;
    std::replace(tag.begin(), tag.end(), ',', ';');
    std::replace(tag.begin(), tag.end(), '\n', ' ');
    out << r.triangle_count << ',' << r.vertex_count << ',' << r.mean_loop_hz << ',' << r.p99_loop_hz << ','
        << r.query_ns << ',' << r.gen_ns << ',' << r.solve_ns << ',' << r.iterations << ',' << tag << '\n';
  }
}

std::vector<BenchRecord> read_bench_csv(std::istream& in) {
  std::vector<BenchRecord> out;
  std::string line;
  if (!std::getline(in, line)) return out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() == 8) f.emplace_back();
    if (f.size() != 9) throw ParseError("bench CSV row needs 9 fields: " + line);
    try {
      BenchRecord r;
      r.triangle_count = std::stoull(f[0]);
      r.vertex_count = std::stoull(f[1]);
      r.mean_loop_hz = std::stod(f[2]);
      r.p99_loop_hz = std::stod(f[3]);
      r.query_ns = std::stod(f[4]);
      r.gen_ns = std::stod(f[5]);
      r.solve_ns = std::stod(f[6]);
      r.iterations = std::stod(f[7]);
      r.hardware_tag = f[8];
      out.push_back(r);
    } catch (const std::logic_error&) {
      throw ParseError("bench CSV row has a malformed number: " + line);
    }
  }
  return out;
}

std::string bench_svg(const std::vector<BenchRecord>& records) {
  const double w = 640;
  const double h = 400;
  const double m = 60;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (records.empty()) {
    s << "</svg>\n";
    return s.str();
  }
  double lx0 = 1e300, lx1 = -1e300, y1 = 0;
  for (const auto& r : records) {
    lx0 = std::min(lx0, std::log10(static_cast<double>(r.triangle_count)));
    lx1 = std::max(lx1, std::log10(static_cast<double>(r.triangle_count)));
    y1 = std::max(y1, r.mean_loop_hz / 1000.0);
  }
  if (lx1 - lx0 < 1e-9) lx1 = lx0 + 1;
  y1 *= 1.1;
  const auto px = [&](double count) { return m + (std::log10(count) - lx0) / (lx1 - lx0) * (w - 2 * m); };
  const auto py = [&](double khz) { return h - m - khz / y1 * (h - 2 * m); };
  s << "<line x1=\"" << m << "\" y1=\"" << h - m << "\" x2=\"" << w - m << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << w / 2 << "\" y=\"" << h - 15 << "\" text-anchor=\"middle\">triangles (log scale)</text>\n";
  s << "<text x=\"15\" y=\"" << h / 2 << "\" transform=\"rotate(-90 15 " << h / 2
    << ")\" text-anchor=\"middle\">loop frequency (kHz)</text>\n";
  s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (const auto& r : records)
    s << px(static_cast<double>(r.triangle_count)) << ',' << py(r.mean_loop_hz / 1000.0) << ' ';
  s << "\"/>\n";
  for (const auto& r : records) {
    const double x = px(static_cast<double>(r.triangle_count));
    const double y = py(r.mean_loop_hz / 1000.0);
    s << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3\" fill=\"steelblue\"/>\n";
    s << "<text x=\"" << x << "\" y=\"" << y - 8 << "\" font-size=\"10\" text-anchor=\"middle\">" << r.triangle_count
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

bool monotone_non_increasing(std::vector<BenchRecord> records, double tolerance) {
  std::sort(records.begin(), records.end(),
            [](const BenchRecord& a, const BenchRecord& b) { return a.triangle_count < b.triangle_count; });
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].mean_loop_hz > (1.0 + tolerance) * records[i - 1].mean_loop_hz) return false;
  return true;
}

double loglog_period_slope(const std::vector<BenchRecord>& records) {
  if (records.size() < 2) throw Error("slope needs at least two records");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : records) {
    const double x = std::log(static_cast<double>(r.triangle_count));
    const double y = std::log(1.0 / r.mean_loop_hz);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const auto n = static_cast<double>(records.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string default_hardware_tag() {
  std::string model = "unknown-cpu";
  std::ifstream cpu("/proc/cpuinfo");
  std::string line;
  while (std::getline(cpu, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) model = line.substr(line.find_first_not_of(' ', colon + 1));
      break;
    }
  }
  return model + " x" + std::to_string(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<TriangleMesh> bench_series(const std::vector<std::size_t>& targets) {
  std::vector<std::size_t> sorted = targets;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::vector<TriangleMesh> out;
  TriangleMesh current = shapes::blob(8, 75.0);
  for (std::size_t t : sorted) {
    current = decimate(current, t);
    out.push_back(current);
  }
  return out;
}

std::vector<std::size_t> default_series_targets() {
  return {1000000, 549280, 301709, 165723, 91028, 50000};
}

}  // namespace meshvf

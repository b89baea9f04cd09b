// vf-service: WebSocket/HTTP front end for interactive steering.
//
//   vf-service --config service.conf --port 9000 --mesh-dir ./meshes

#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "meshvf/service.hpp"

using namespace meshvf;

namespace {
std::atomic<bool> g_quit{false};
}

int main(int argc, char** argv) {
  CLI::App app{"Virtual-fixture steering service"};
  std::string config_path, address, mesh_dir;
  int port = -1;
  double radius = -1.0;
  unsigned threads = 0;
  bool no_builtin = false;
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--address", address, "Listen address");
  app.add_option("--port", port, "Listen port (0 picks a free one)")->check(CLI::Range(0, 65535));
  app.add_option("--mesh-dir", mesh_dir, "Directory of .stl/.obj/.ply meshes")->check(CLI::ExistingDirectory);
  app.add_option("--radius", radius, "Default motion radius in mm (0: 0.04 x mesh diagonal)");
  app.add_option("--threads", threads, "I/O threads");
  app.add_flag("--no-builtin", no_builtin, "Do not serve the procedural test shapes");
  CLI11_PARSE(app, argc, argv);

  try {
    ServiceConfig cfg = config_path.empty() ? ServiceConfig{} : load_config(config_path);
    if (!address.empty()) cfg.address = address;
    if (port >= 0) cfg.port = static_cast<std::uint16_t>(port);
    if (!mesh_dir.empty()) cfg.mesh_dir = mesh_dir;
    if (radius >= 0) cfg.default_radius = radius;
    if (threads > 0) cfg.threads = threads;
    if (no_builtin) cfg.builtin_meshes = false;

    auto catalog = std::make_shared<MeshCatalog>();
    if (cfg.builtin_meshes) catalog->add_builtin();
    if (!cfg.mesh_dir.empty()) {
      std::vector<std::string> errors;
      const auto n = catalog->load_directory(cfg.mesh_dir, &errors);
      std::cerr << "loaded " << n << " meshes from " << cfg.mesh_dir.string() << "\n";
      for (const auto& e : errors) std::cerr << "  skipped " << e << "\n";
    }
    if (catalog->list().empty()) throw Error("no meshes to serve");

    Service service(cfg, catalog);
    const auto bound = service.start();
    std::cerr << "listening on " << cfg.address << ":" << bound << " (ws path /ws)\n";

    std::signal(SIGINT, [](int) { g_quit = true; });
    std::signal(SIGTERM, [](int) { g_quit = true; });
    while (!g_quit) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    service.stop();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

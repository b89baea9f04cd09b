#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "meshvf/control_loop.hpp"

namespace meshvf {

class SessionNotFound : public Error {
 public:
  using Error::Error;
};

class MeshNotLoaded : public Error {
 public:
  using Error::Error;
};

struct MeshInfo {
  std::string id;
  std::size_t triangles = 0;
  std::size_t vertices = 0;
  Vector3d lower = Vector3d::Zero();
  Vector3d upper = Vector3d::Zero();
};

/// Immutable meshes by id, with their trees; shared by all sessions.
class MeshCatalog {
 public:
  void add(std::shared_ptr<const MeshModel> model);

  /// Adds every .stl/.obj/.ply file in `dir`, keyed by file stem. Returns the
  /// number loaded; unreadable files are skipped and reported in `errors`.
  std::size_t load_directory(const std::filesystem::path& dir, std::vector<std::string>* errors = nullptr);

  /// Procedural shapes under their shape names.
  void add_builtin();

  std::shared_ptr<const MeshModel> find(std::string_view id) const;  // throws MeshNotLoaded
  std::vector<MeshInfo> list() const;

  /// Binary STL bytes of a mesh, for rendering clients.
  std::string stl(std::string_view id) const;

  /// Catalog as {"meshes":[{"id","triangles","vertices","bounds":[[lo],[hi]]}, ...]}.
  std::string catalog_json() const;

 private:
  std::map<std::string, std::shared_ptr<const MeshModel>, std::less<>> models_;
};

/// Sessions by id for programmatic use; each session serialises its own steps.
class SessionManager {
 public:
  explicit SessionManager(const MeshCatalog& catalog) : catalog_(&catalog) {}

  /// Throws MeshNotLoaded, StartInsideMeshError.
  std::uint64_t open(std::string_view mesh_id, const Vector3d& start, double radius);
  TickResult step(std::uint64_t id, const Vector3d& desired);  // throws SessionNotFound
  void reset(std::uint64_t id);
  void close(std::uint64_t id);
  std::size_t size() const;

  Vector3d constrained(std::uint64_t id) const;
  Vector3d proxy(std::uint64_t id) const;

 private:
  struct Slot {
    std::mutex mutex;
    ControlLoop loop;
    Slot(std::shared_ptr<const MeshModel> m, const Vector3d& s, double r) : loop(std::move(m), s, r) {}
  };
  std::shared_ptr<Slot> get(std::uint64_t id) const;

  const MeshCatalog* catalog_;
  mutable std::mutex mutex_;
  std::map<std::uint64_t, std::shared_ptr<Slot>> sessions_;
  std::uint64_t next_id_ = 1;
};

/// The wire protocol for one client connection, independent of transport.
///
/// Client frames: {"type":"open","mesh":id,"start":[x,y,z],"radius":r},
/// {"type":"step","desired":[x,y,z]}, {"type":"reset"}. Replies are either
/// {"type":"state",...} or {"type":"error","error":kind,"message":text}.
/// Output depends only on the frames received (no clocks), so replaying a
/// frame sequence reproduces every reply byte for byte.
class ProtocolSession {
 public:
  /// `default_radius` applies to open frames without a radius; when it is not
  /// positive, 0.04 x the mesh diagonal is used.
  ProtocolSession(const MeshCatalog& catalog, double default_radius = 0.0)
      : catalog_(&catalog), default_radius_(default_radius) {}

  std::string handle(std::string_view frame);

  bool is_open() const { return loop_.has_value(); }
  const ControlLoop* loop() const { return loop_ ? &*loop_ : nullptr; }

  /// Whether a frame is a step message (eligible for coalescing).
  static bool is_step_frame(std::string_view frame);

 private:
  std::string state(const TickResult* r) const;

  const MeshCatalog* catalog_;
  double default_radius_;
  std::optional<ControlLoop> loop_;
};

/// Pending client frames where a step replaces a step queued directly before
/// it: stale intermediate targets are dropped, ordering with open and reset
/// frames is kept.
class CoalescingQueue {
 public:
  void push(std::string frame);
  std::optional<std::string> pop();
  std::size_t size() const;
  std::size_t coalesced() const;

 private:
  mutable std::mutex mutex_;
  std::deque<std::pair<std::string, bool>> frames_;
  std::size_t coalesced_ = 0;
};

struct ServiceConfig {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8080;
  std::filesystem::path mesh_dir;
  double default_radius = 0.0;
  bool builtin_meshes = true;
  unsigned threads = 1;
};

/// key = value lines; '#' starts a comment. Keys: address, port, mesh_dir,
/// default_radius, builtin_meshes, threads. Throws ParseError.
ServiceConfig parse_config(std::string_view text, ServiceConfig base = {});
ServiceConfig load_config(const std::filesystem::path& path, ServiceConfig base = {});

}  // namespace meshvf

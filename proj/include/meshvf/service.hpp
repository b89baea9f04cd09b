#pragma once

#include <cstdint>
#include <memory>

#include "meshvf/protocol.hpp"

namespace meshvf {

/// HTTP + WebSocket front end over ProtocolSession.
///
///   GET /healthz        -> {"status":"ok","meshes":n}
///   GET /meshes         -> MeshCatalog::catalog_json()
///   GET /meshes/<id>    -> binary STL
///   GET /ws (upgrade)   -> one ProtocolSession per connection
///
/// Each connection runs on its own strand. Incoming frames go through a
/// CoalescingQueue; a frame is executed only when the previous reply has
/// been written, so under load consecutive steps collapse to the latest.
class Service {
 public:
  Service(ServiceConfig config, std::shared_ptr<const MeshCatalog> catalog);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and starts the worker threads; returns the bound port (useful when
  /// the configured port is 0).
  std::uint16_t start();

  /// Blocks until stop() is called from another thread.
  void wait();
  void stop();

  std::uint16_t port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace meshvf

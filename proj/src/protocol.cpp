#include "meshvf/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "meshvf/shapes.hpp"
#include "meshvf/sim.hpp"

namespace meshvf {

using nlohmann::json;

namespace {

json vec(const Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

class InvalidMessage : public Error {
 public:
  using Error::Error;
};

Vector3d point_member(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidMessage(std::string("missing \"") + key + "\"");
  const json& p = j[key];
  if (!p.is_array() || p.size() != 3) throw InvalidMessage(std::string("\"") + key + "\" must be [x, y, z]");
  Vector3d v;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!p[i].is_number()) throw InvalidMessage(std::string("\"") + key + "\" must be numeric");
    v[static_cast<Eigen::Index>(i)] = p[i].get<double>();
  }
  if (!v.allFinite()) throw InvalidMessage(std::string("\"") + key + "\" must be finite");
  return v;
}

std::string error_reply(std::string_view kind, std::string_view message) {
  return json{{"type", "error"}, {"error", kind}, {"message", message}}.dump();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

void MeshCatalog::add(std::shared_ptr<const MeshModel> model) {
  if (!model) throw Error("null mesh model");
  models_[model->id] = std::move(model);
}

std::size_t MeshCatalog::load_directory(const std::filesystem::path& dir, std::vector<std::string>* errors) {
  std::size_t loaded = 0;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".stl" || ext == ".obj" || ext == ".ply") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    try {
      const MeshFormat format = format_from_extension(path);
      add(make_model(path.stem().string(), load_mesh(path, format)));
      ++loaded;
    } catch (const std::exception& e) {
      if (errors) errors->push_back(path.string() + ": " + e.what());
    }
  }
  return loaded;
}

void MeshCatalog::add_builtin() {
  for (const std::string& name : shapes::names()) add(make_model(name, shapes::make(name)));
}

std::shared_ptr<const MeshModel> MeshCatalog::find(std::string_view id) const {
  auto it = models_.find(id);
  if (it == models_.end()) throw MeshNotLoaded("mesh '" + std::string(id) + "' is not loaded");
  return it->second;
}

std::vector<MeshInfo> MeshCatalog::list() const {
  std::vector<MeshInfo> out;
  for (const auto& [id, m] : models_)
    out.push_back({id, m->mesh.triangle_count(), m->mesh.vertex_count(), m->mesh.bounds().min(), m->mesh.bounds().max()});
  return out;
}

std::string MeshCatalog::stl(std::string_view id) const { return to_binary_stl(find(id)->mesh); }

std::string MeshCatalog::catalog_json() const {
  json meshes = json::array();
  for (const MeshInfo& m : list())
    meshes.push_back({{"id", m.id},
                      {"triangles", m.triangles},
                      {"vertices", m.vertices},
                      {"bounds", json::array({vec(m.lower), vec(m.upper)})}});
  return json{{"meshes", meshes}}.dump();
}

std::uint64_t SessionManager::open(std::string_view mesh_id, const Vector3d& start, double radius) {
  auto slot = std::make_shared<Slot>(catalog_->find(mesh_id), start, radius);
  std::lock_guard lock(mutex_);
  const std::uint64_t id = next_id_++;
  sessions_.emplace(id, std::move(slot));
  return id;
}

std::shared_ptr<SessionManager::Slot> SessionManager::get(std::uint64_t id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionNotFound("session " + std::to_string(id) + " not found");
  return it->second;
}

TickResult SessionManager::step(std::uint64_t id, const Vector3d& desired) {
  auto slot = get(id);
  std::lock_guard lock(slot->mutex);
  return slot->loop.step(desired);
}

void SessionManager::reset(std::uint64_t id) {
  auto slot = get(id);
  std::lock_guard lock(slot->mutex);
  slot->loop.reset();
}

void SessionManager::close(std::uint64_t id) {
  std::lock_guard lock(mutex_);
  if (sessions_.erase(id) == 0) throw SessionNotFound("session " + std::to_string(id) + " not found");
}

std::size_t SessionManager::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

Vector3d SessionManager::constrained(std::uint64_t id) const {
  auto slot = get(id);
  std::lock_guard lock(slot->mutex);
  return slot->loop.constrained();
}

Vector3d SessionManager::proxy(std::uint64_t id) const {
  auto slot = get(id);
  std::lock_guard lock(slot->mutex);
  return slot->loop.proxy();
}

bool ProtocolSession::is_step_frame(std::string_view frame) {
  try {
    const json j = json::parse(frame);
    return j.is_object() && j.value("type", "") == "step";
  } catch (const json::exception&) {
    return false;
  }
}

std::string ProtocolSession::state(const TickResult* r) const {
  json planes = json::array();
  if (r)
    for (const PlaneConstraint& c : r->constraints.constraints) planes.push_back({{"n", vec(c.normal)}, {"p", vec(c.point)}});
  const Vector3d& constrained = loop_->constrained();
  const Vector3d& proxy = loop_->proxy();
  return json{{"type", "state"},
              {"tick", loop_->tick()},
              {"constrained", vec(constrained)},
              {"proxy", vec(proxy)},
              {"feedback", vec(proxy - constrained)},
              {"planes", planes},
              {"status", r ? to_string(r->solution.status) : "Optimal"}}
      .dump();
}

std::string ProtocolSession::handle(std::string_view frame) {
  try {
    json j;
    try {
      j = json::parse(frame);
    } catch (const json::exception& e) {
      throw ParseError(e.what());
    }
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
      throw InvalidMessage("message needs a string \"type\"");
    const std::string type = j["type"].get<std::string>();

    if (type == "open") {
      if (!j.contains("mesh") || !j["mesh"].is_string()) throw InvalidMessage("open needs a string \"mesh\"");
      auto model = catalog_->find(j["mesh"].get<std::string>());
      const Vector3d start = point_member(j, "start");
      double radius = default_radius_ > 0.0 ? default_radius_ : default_radius(model->mesh);
      if (j.contains("radius")) {
        if (!j["radius"].is_number()) throw InvalidMessage("\"radius\" must be a number");
        radius = j["radius"].get<double>();
        if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidMessage("\"radius\" must be positive and finite");
      }
      ControlLoop fresh(std::move(model), start, radius);
      loop_.emplace(std::move(fresh));
      return state(nullptr);
    }
    if (type == "step") {
      const Vector3d desired = point_member(j, "desired");
      if (!loop_) throw SessionNotFound("no open session; send an open message first");
      const TickResult r = loop_->step(desired);
      return state(&r);
    }
    if (type == "reset") {
      if (!loop_) throw SessionNotFound("no open session; send an open message first");
      loop_->reset();
      return state(nullptr);
    }
    throw InvalidMessage("unknown message type '" + type + "'");
  } catch (const ParseError& e) {
    return error_reply("ParseError", e.what());
  } catch (const InvalidMessage& e) {
    return error_reply("InvalidMessage", e.what());
  } catch (const SessionNotFound& e) {
    return error_reply("SessionNotFound", e.what());
  } catch (const MeshNotLoaded& e) {
    return error_reply("MeshNotLoaded", e.what());
  } catch (const StartInsideMeshError& e) {
    return error_reply("StartInsideMeshError", e.what());
  } catch (const Error& e) {
    return error_reply("Error", e.what());
  }
}

void CoalescingQueue::push(std::string frame) {
  const bool step = ProtocolSession::is_step_frame(frame);
  std::lock_guard lock(mutex_);
  if (step && !frames_.empty() && frames_.back().second) {
    frames_.back().first = std::move(frame);
    ++coalesced_;
    return;
  }
  frames_.emplace_back(std::move(frame), step);
}

std::optional<std::string> CoalescingQueue::pop() {
  std::lock_guard lock(mutex_);
  if (frames_.empty()) return std::nullopt;
  std::string f = std::move(frames_.front().first);
  frames_.pop_front();
  return f;
}

std::size_t CoalescingQueue::size() const {
  std::lock_guard lock(mutex_);
  return frames_.size();
}

std::size_t CoalescingQueue::coalesced() const {
  std::lock_guard lock(mutex_);
  return coalesced_;
}

ServiceConfig parse_config(std::string_view text, ServiceConfig cfg) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto number_of = [&](auto& out) {
      const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
      if (ec != std::errc() || p != value.data() + value.size())
        throw ParseError("config line " + std::to_string(number) + ": bad number for '" + key + "'");
    };
    if (key == "address") {
      cfg.address = value;
    } else if (key == "port") {
      number_of(cfg.port);
    } else if (key == "mesh_dir") {
      cfg.mesh_dir = value;
    } else if (key == "default_radius") {
      number_of(cfg.default_radius);
    } else if (key == "threads") {
      number_of(cfg.threads);
    } else if (key == "builtin_meshes") {
      if (value == "true" || value == "1") {
        cfg.builtin_meshes = true;
      } else if (value == "false" || value == "0") {
        cfg.builtin_meshes = false;
      } else {
        throw ParseError("config line " + std::to_string(number) + ": builtin_meshes must be true or false");
      }
    } else {
      throw ParseError("config line " + std::to_string(number) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

ServiceConfig load_config(const std::filesystem::path& path, ServiceConfig base) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

}  // namespace meshvf

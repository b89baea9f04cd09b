#include "meshvf/service.hpp"

#include <condition_variable>
#include <optional>
#include <thread>

#include <boost/asio/dispatch.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <json.hpp>

namespace meshvf {
namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

constexpr std::size_t kMaxFrame = 64 * 1024;

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, const MeshCatalog& catalog, double radius)
      : ws_(std::move(socket)), protocol_(catalog, radius) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(kMaxFrame);
    ws_.text(true);
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (!ec) read();
  }

  void read() { ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this())); }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return;
    queue_.push(beast::buffers_to_string(buffer_.data()));
    buffer_.consume(buffer_.size());
    pump();
    read();
  }

  // Executes one pending frame unless a reply is still being written.
  void pump() {
    if (writing_) return;
    auto frame = queue_.pop();
    if (!frame) return;
    writing_ = true;
    reply_ = protocol_.handle(*frame);
    ws_.async_write(net::buffer(reply_), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    writing_ = false;
    if (!ec) pump();
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  ProtocolSession protocol_;
  CoalescingQueue queue_;
  std::string reply_;
  bool writing_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, const MeshCatalog& catalog, double radius)
      : stream_(std::move(socket)), catalog_(&catalog), radius_(radius) {}

  void run() { net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::read, shared_from_this())); }

 private:
  void read() {
    parser_.emplace();
    parser_->body_limit(kMaxFrame);
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, *parser_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) return close();
    if (ec) return;
    auto req = parser_->release();
    if (websocket::is_upgrade(req)) {
      if (req.target() == "/ws") {
        stream_.expires_never();
        std::make_shared<WsSession>(stream_.release_socket(), *catalog_, radius_)->run(std::move(req));
        return;
      }
    }
    response_ = std::make_shared<http::response<http::string_body>>(route(req));
    http::async_write(stream_, *response_, beast::bind_front_handler(&HttpSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) return;
    if (!response_->keep_alive()) return close();
    response_.reset();
    read();
  }

  void close() {
    beast::error_code ec;
    stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
  }

  http::response<http::string_body> route(const http::request<http::string_body>& req) const {
    const auto reply = [&](http::status status, const char* type, std::string body) {
      http::response<http::string_body> res{status, req.version()};
      res.set(http::field::server, "vf-service");
      res.set(http::field::content_type, type);
      res.set(http::field::access_control_allow_origin, "*");
      res.keep_alive(req.keep_alive());
      res.body() = std::move(body);
      res.prepare_payload();
      return res;
    };
    const auto error = [&](http::status status, const std::string& message) {
      return reply(status, "application/json", nlohmann::json{{"error", message}}.dump());
    };

    if (req.method() != http::verb::get) return error(http::status::method_not_allowed, "only GET is supported");
    const std::string_view target(req.target().data(), req.target().size());
    if (target == "/healthz")
      return reply(http::status::ok, "application/json",
                   nlohmann::json{{"status", "ok"}, {"meshes", catalog_->list().size()}}.dump());
    if (target == "/meshes") return reply(http::status::ok, "application/json", catalog_->catalog_json());
    constexpr std::string_view prefix = "/meshes/";
    if (target.starts_with(prefix)) {
      try {
        return reply(http::status::ok, "model/stl", catalog_->stl(target.substr(prefix.size())));
      } catch (const MeshNotLoaded& e) {
        return error(http::status::not_found, e.what());
      }
    }
    if (target == "/ws") return error(http::status::upgrade_required, "WebSocket upgrade expected");
    return error(http::status::not_found, "no route for " + std::string(target));
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
  std::shared_ptr<http::response<http::string_body>> response_;
  const MeshCatalog* catalog_;
  double radius_;
};

}  // namespace

struct Service::Impl {
  ServiceConfig config;
  std::shared_ptr<const MeshCatalog> catalog;
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::vector<std::thread> threads;
  std::uint16_t port = 0;

  std::mutex mutex;
  std::condition_variable stopped_cv;
  bool running = false;

  void accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec == net::error::operation_aborted) return;
      if (!ec) std::make_shared<HttpSession>(std::move(socket), *catalog, config.default_radius)->run();
      accept();
    });
  }
};

Service::Service(ServiceConfig config, std::shared_ptr<const MeshCatalog> catalog) : impl_(std::make_unique<Impl>()) {
  if (!catalog) throw Error("service needs a mesh catalog");
  impl_->config = std::move(config);
  impl_->catalog = std::move(catalog);
}

Service::~Service() { stop(); }

std::uint16_t Service::start() {
  Impl& s = *impl_;
  {
    std::lock_guard lock(s.mutex);
    if (s.running) return s.port;
  }
  beast::error_code ec;
  const auto address = net::ip::make_address(s.config.address, ec);
  if (ec) throw Error("bad listen address '" + s.config.address + "'");
  const tcp::endpoint endpoint(address, s.config.port);
  s.acceptor.open(endpoint.protocol());
  s.acceptor.set_option(net::socket_base::reuse_address(true));
  s.acceptor.bind(endpoint, ec);
  if (ec) throw Error("cannot bind " + s.config.address + ":" + std::to_string(s.config.port) + ": " + ec.message());
  s.acceptor.listen(net::socket_base::max_listen_connections);
  s.port = s.acceptor.local_endpoint().port();
  s.accept();

  std::lock_guard lock(s.mutex);
  s.running = true;
  for (unsigned i = 0; i < std::max(1u, s.config.threads); ++i) s.threads.emplace_back([&s] { s.ioc.run(); });
  return s.port;
}

void Service::wait() {
  std::unique_lock lock(impl_->mutex);
  impl_->stopped_cv.wait(lock, [this] { return !impl_->running; });
}

void Service::stop() {
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(impl_->mutex);
    if (!impl_->running) return;
    impl_->running = false;
    threads.swap(impl_->threads);
  }
  impl_->ioc.stop();
  for (auto& t : threads) t.join();
  impl_->stopped_cv.notify_all();
}

std::uint16_t Service::port() const { return impl_->port; }

}  // namespace meshvf

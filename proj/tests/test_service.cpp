#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <gtest/gtest.h>
#include <json.hpp>

#include "meshvf/mesh.hpp"
#include "meshvf/service.hpp"
#include "meshvf/shapes.hpp"

using namespace meshvf;
using nlohmann::json;

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

std::shared_ptr<MeshCatalog> catalog() {
  auto c = std::make_shared<MeshCatalog>();
  c->add(make_model("cube", shapes::cube(20.0)));
  c->add(make_model("torus", shapes::torus()));
  return c;
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ServiceConfig cfg;
    cfg.port = 0;
    cfg.threads = 2;
    cat_ = catalog();
    service_ = std::make_unique<Service>(cfg, cat_);
    port_ = service_->start();
  }

  http::response<http::string_body> get(const std::string& target) {
    net::io_context ioc;
    beast::tcp_stream stream(ioc);
    stream.connect(tcp::endpoint(net::ip::make_address("127.0.0.1"), port_));
    http::request<http::empty_body> req{http::verb::get, target, 11};
    req.set(http::field::host, "localhost");
    http::write(stream, req);
    beast::flat_buffer buffer;
    http::response<http::string_body> res;
    http::read(stream, buffer, res);
    return res;
  }

  std::unique_ptr<websocket::stream<tcp::socket>> connect_ws(net::io_context& ioc) {
    auto ws = std::make_unique<websocket::stream<tcp::socket>>(ioc);
    ws->next_layer().connect(tcp::endpoint(net::ip::make_address("127.0.0.1"), port_));
    ws->handshake("localhost", "/ws");
    ws->text(true);
    return ws;
  }

  static std::string exchange(websocket::stream<tcp::socket>& ws, const std::string& frame) {
    ws.write(net::buffer(frame));
    beast::flat_buffer buffer;
    ws.read(buffer);
    return beast::buffers_to_string(buffer.data());
  }

  std::shared_ptr<MeshCatalog> cat_;
  std::unique_ptr<Service> service_;
  std::uint16_t port_ = 0;
};

std::string step(double x, double y, double z) { return json{{"type", "step"}, {"desired", {x, y, z}}}.dump(); }

}  // namespace

TEST_F(ServiceTest, HttpRoutes) {
  auto res = get("/healthz");
  EXPECT_EQ(res.result(), http::status::ok);
  EXPECT_EQ(json::parse(res.body())["status"], "ok");

  res = get("/meshes");
  EXPECT_EQ(res.result(), http::status::ok);
  EXPECT_EQ(res.body(), cat_->catalog_json());

  res = get("/meshes/cube");
  EXPECT_EQ(res.result(), http::status::ok);
  EXPECT_EQ(parse_binary_stl(res.body()).triangle_count(), 12u);

  EXPECT_EQ(get("/meshes/bunny").result(), http::status::not_found);
  EXPECT_EQ(get("/nothing").result(), http::status::not_found);
  EXPECT_EQ(get("/ws").result(), http::status::upgrade_required);
}

TEST_F(ServiceTest, WebSocketRepliesMatchLocalSession) {
  net::io_context ioc;
  auto ws = connect_ws(ioc);
  ProtocolSession local(*cat_);
  std::vector<std::string> frames = {"{broken", step(0, 0, 1),
                                     R"({"type":"open","mesh":"cube","start":[0,0,30],"radius":1.0})"};
  for (int k = 0; k < 60; ++k) frames.push_back(step(0.3 * k, 0, 0));
  frames.push_back(R"({"type":"reset"})");
  for (int k = 0; k < 20; ++k) frames.push_back(step(0, 0, -50));
  for (const auto& f : frames) ASSERT_EQ(exchange(*ws, f), local.handle(f)) << f;
  ws->close(websocket::close_code::normal);
}

TEST_F(ServiceTest, ConnectionsAreIsolated) {
  net::io_context ioc;
  auto a = connect_ws(ioc);
  auto b = connect_ws(ioc);
  exchange(*a, R"({"type":"open","mesh":"cube","start":[0,0,30],"radius":1.0})");
  exchange(*b, R"({"type":"open","mesh":"torus","start":[0,0,20],"radius":1.0})");
  for (int k = 0; k < 30; ++k) exchange(*a, step(0, 0, 0));
  const json rb = json::parse(exchange(*b, step(0, 0, 20)));
  EXPECT_EQ(rb["tick"], 1);
  EXPECT_EQ(rb["constrained"], json({0.0, 0.0, 20.0}));
  const json ra = json::parse(exchange(*a, step(0, 0, 0)));
  EXPECT_EQ(ra["tick"], 31);
  EXPECT_NEAR(ra["constrained"][2].get<double>(), 10.0, 1e-9);
}

TEST_F(ServiceTest, FloodedStepsAreCoalescedAndTicksStayConsecutive) {
  net::io_context ioc;
  auto ws = connect_ws(ioc);
  exchange(*ws, R"({"type":"open","mesh":"torus","start":[0,0,20],"radius":1.0})");
  const int flood = 3000;
  for (int k = 0; k < flood; ++k) ws->write(net::buffer(step(0.01 * k, 0, 20 - 0.01 * k)));
  ws->write(net::buffer(std::string(R"({"type":"reset"})")));
  int expected_tick = 1;
  for (;;) {
    beast::flat_buffer buffer;
    ws->read(buffer);
    const json r = json::parse(beast::buffers_to_string(buffer.data()));
    ASSERT_EQ(r["type"], "state");
    if (r["tick"] == 0) break;
    ASSERT_EQ(r["tick"], expected_tick);
    ++expected_tick;
  }
  // Every reply reflects one executed tick; none exceed the frames sent.
  EXPECT_LE(expected_tick - 1, flood);
  EXPECT_GE(expected_tick - 1, 1);
}

TEST(Service, BadAddressIsRejected) {
  ServiceConfig cfg;
  cfg.address = "not-an-address";
  Service s(cfg, catalog());
  EXPECT_THROW(s.start(), Error);
}

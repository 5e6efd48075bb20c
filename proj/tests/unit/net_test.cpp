#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <thread>

#include "ibq/net.hpp"
#include "support.hpp"

using namespace ibq;
using namespace ibq::testing;

namespace {

// Blocking loopback client: sends `payload`, then reads `lines` response lines.
std::vector<std::string> exchange(std::uint16_t port, const std::string& payload, std::size_t lines) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(fd >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  std::size_t sent = 0;
  while (sent < payload.size()) {
    ssize_t n = ::send(fd, payload.data() + sent, payload.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) break;
    sent += static_cast<std::size_t>(n);
  }
  std::vector<std::string> out;
  std::string buf;
  char chunk[4096];
  while (out.size() < lines) {
    ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n <= 0) break;
    buf.append(chunk, static_cast<std::size_t>(n));
    for (auto nl = buf.find('\n'); nl != std::string::npos; nl = buf.find('\n')) {
      out.push_back(buf.substr(0, nl));
      buf.erase(0, nl + 1);
    }
  }
  ::close(fd);
  return out;
}

// One-shot server that answers every line with `reply`.
struct FakeServer {
  int fd = -1;
  std::uint16_t port = 0;
  std::thread worker;

  explicit FakeServer(std::string reply) {
    fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
    socklen_t len = sizeof addr;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    port = ntohs(addr.sin_port);
    ::listen(fd, 1);
    worker = std::thread([this, reply] {
      int c = ::accept(fd, nullptr, nullptr);
      if (c < 0) return;
      char buf[1024];
      if (::recv(c, buf, sizeof buf, 0) > 0) ::send(c, reply.data(), reply.size(), MSG_NOSIGNAL);
      ::close(c);
    });
  }
  ~FakeServer() {
    worker.join();
    ::close(fd);
  }
};

Endpoint loopback(std::uint16_t port) { return {"127.0.0.1", port}; }

}  // namespace

TEST_CASE("request encoding round trip") {
  for (const char* a : {"R(a,b); C(b)", "C(a)", "not C(a); R(a,b); inv S(b,c)", "a != b; R(a,b)",
                        "(some R C and not D)(a)", "not R(a,b); R(b,a)"}) {
    CAPTURE(a);
    Abox x = parse_abox(a);
    auto asat = decode_request(encode_asat(x));
    CHECK(asat.verb == WireRequest::Verb::Asat);
    CHECK(render_canonical(asat.abox) == render_canonical(x));
    Target t = parse_assertion("C(a)");
    auto aent = decode_request(encode_aent(x, t));
    CHECK(aent.verb == WireRequest::Verb::Aent);
    CHECK(render_canonical(aent.abox) == render_canonical(x));
    REQUIRE(aent.target);
    CHECK(render(*aent.target) == "C(a)");
    auto falsum = decode_request(encode_aent(x, std::nullopt));
    CHECK_FALSE(falsum.target.has_value());
  }
  auto c = decode_request(encode_csat(parse_concept("some R (C and not D)")));
  REQUIRE(c.query);
  CHECK(render(*c.query) == render(parse_concept("some R (C and not D)")));
  CHECK(decode_request(encode_hello()).verb == WireRequest::Verb::Hello);
  CHECK(encode_asat(parse_abox("R(a,b); C(b)")) == "ASAT C(b);R(a,b)");
  CHECK(encode_aent(parse_abox("R(a,b)"), std::nullopt) == "AENT R(a,b) ENTAILS FALSUM");
  CHECK_THROWS_AS(decode_request("asat C(a)"), BadSyntax);
}

TEST_CASE("round trip over every query the fixture runs emit") {
  Signature g = load_sig("medical.sig");
  auto [o, rec] = recording_oracle(load_kb("medical_hidden.dl"), g, OracleType::Aent);
  IbqOptions opt;
  opt.assume_admissible = true;
  import_entails(load_kb("medical_visible.dl"), g, o, Concept::atomic("EA_Patient"), Concept::atomic("TVD_Patient"),
                 std::nullopt, opt);
  auto qs = rec->queries();
  REQUIRE_FALSE(qs.empty());
  for (auto& q : qs) {
    auto back = decode_request(encode_aent(q.abox, q.target));
    CHECK(render_canonical(back.abox) == render_canonical(q.abox));
    CHECK(render_target(back.target) == render_target(q.target));
  }
}

TEST_CASE("answer_line against local oracles") {
  auto o = local_oracle(kb("some R some R C sub C."), sig({"C"}, {"R"}), OracleType::Asat);
  CHECK(answer_line(o, "ASAT R(a,b);C(b)") == "TRUE");
  CHECK(answer_line(o, "ASAT D(a)").rfind("ERR SIG_VIOLATION ", 0) == 0);
  CHECK(answer_line(o, "ASAT C(a);C(b)").rfind("ERR NOT_CONNECTED ", 0) == 0);
  CHECK(answer_line(o, "ASAT C(a").rfind("ERR BAD_SYNTAX ", 0) == 0);
  CHECK(answer_line(o, "AENT C(a) ENTAILS C(a)").rfind("ERR UNSUPPORTED ", 0) == 0);
  CHECK(answer_line(o, "HELLO") == "OK type=asat gamma=c:C,r:R logic=" + infer_profile(kb("some R some R C sub C.")).name());

  auto empty = local_oracle(kb(""), sig({}, {"R"}), OracleType::Aent);
  CHECK(answer_line(empty, "AENT R(a,b) ENTAILS FALSUM") == "FALSE");
}

TEST_CASE("served oracle: protocol over loopback") {
  auto o = local_oracle(kb("some R some R C sub C."), sig({"C"}, {"R"}), OracleType::Asat);
  auto server = serve(o, loopback(0));
  REQUIRE(server->port() != 0);
  auto replies = exchange(server->port(), "HELLO\nASAT R(a,b);C(b)\nASAT D(a)\nBOGUS\n", 4);
  REQUIRE(replies.size() == 4);
  CHECK(replies[0].rfind("OK type=asat gamma=c:C,r:R logic=", 0) == 0);
  CHECK(replies[1] == "TRUE");
  CHECK(replies[2].rfind("ERR SIG_VIOLATION ", 0) == 0);
  CHECK(replies[3].rfind("ERR BAD_SYNTAX ", 0) == 0);
  server->stop();
  server->wait();
}

TEST_CASE("line length guard") {
  auto o = local_oracle(kb(""), sig({"C"}, {}), OracleType::Asat);
  auto server = serve(o, loopback(0), 64);
  auto replies = exchange(server->port(), "ASAT " + std::string(200, 'C') + "(a)\n", 1);
  REQUIRE(replies.size() == 1);
  CHECK(replies[0].rfind("ERR BAD_SYNTAX ", 0) == 0);
  server->stop();
}

TEST_CASE("connect: metadata comes from HELLO") {
  Signature g = load_sig("medical.sig");
  auto local = local_oracle(load_kb("medical_hidden.dl"), g, OracleType::Aent);
  auto server = serve(local, loopback(0));
  auto remote = connect(loopback(server->port()));
  CHECK(remote.type() == OracleType::Aent);
  CHECK(remote.gamma() == g);
  CHECK(remote.logic() == local.logic());
  CHECK(remote.aent(parse_abox("VSD_Heart(a)"), parse_assertion("CHD(a)")) == false);
  CHECK(remote.aent(parse_abox("VSD_Heart(a)"), parse_assertion("Heart(a)")));
  CHECK_THROWS_AS(remote.aent(parse_abox("Treatment(a)"), std::nullopt), SigViolation);
  server->stop();
}

TEST_CASE("connect: concurrent clients share one server") {
  Signature g = sig({"C"}, {"R"});
  auto local = local_oracle(kb("some R top sub C."), g, OracleType::Aent);
  auto server = serve(local, loopback(0));
  std::vector<std::thread> ts;
  std::atomic<int> good{0};
  for (int i = 0; i < 4; ++i)
    ts.emplace_back([&] {
      auto remote = connect(loopback(server->port()));
      for (int k = 0; k < 20; ++k)
        if (remote.aent(parse_abox("R(a,b)"), parse_assertion("C(a)")) &&
            !remote.aent(parse_abox("R(a,b)"), parse_assertion("C(b)")))
          ++good;
    });
  for (auto& t : ts) t.join();
  CHECK(good == 80);
  server->stop();
}

TEST_CASE("connect: failures") {
  FakeServer garbage("WHAT\n");
  CHECK_THROWS_AS(connect(loopback(garbage.port)), ProtocolError);

  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  std::uint16_t closed = ntohs(addr.sin_port);
  ::close(fd);
  CHECK_THROWS_AS(connect(loopback(closed)), ConnectionFailed);
}

TEST_CASE("endpoint parsing") {
  auto e = parse_endpoint("tcp:localhost:4000");
  CHECK(e.host == "localhost");
  CHECK(e.port == 4000);
  CHECK(parse_endpoint("127.0.0.1:9").port == 9);
  CHECK_THROWS(parse_endpoint("nohost"));
  CHECK_THROWS(parse_endpoint("h:99999"));
}

TEST_CASE("import runs over the network match local runs") {
  struct Case {
    const char *visible, *hidden, *sig;
    OracleType type;
    IbqMode mode;
  };
  for (Case c : {Case{"el_chain_visible.dl", "el_chain_hidden1.dl", "el_chain.sig", OracleType::Aent, IbqMode::ElOmegaE},
                 Case{"el_chain_visible.dl", "el_chain_hidden2.dl", "el_chain.sig", OracleType::Aent, IbqMode::ElOmegaE},
                 Case{"worked_visible.dl", "worked_hidden.dl", "worked.sig", OracleType::Asat, IbqMode::AlchiqOmegaA},
                 Case{"worked_visible.dl", "worked_hidden.dl", "worked.sig", OracleType::Aent, IbqMode::HornOmegaE}}) {
    CAPTURE(c.visible);
    CAPTURE(c.hidden);
    Signature g = load_sig(c.sig);
    auto local = local_oracle(load_kb(c.hidden), g, c.type);
    auto direct = import_check_sat(load_kb(c.visible), g, local, c.mode);
    auto server = serve(local_oracle(load_kb(c.hidden), g, c.type), loopback(0));
    auto remote = import_check_sat(load_kb(c.visible), g, connect(loopback(server->port())), c.mode);
    CHECK(direct.sat == remote.sat);
    CHECK(direct.queries.queries == remote.queries.queries);
    CHECK(direct.queries.max_query_size == remote.queries.max_query_size);
    CHECK(direct.stats.rule_apps == remote.stats.rule_apps);
    server->stop();
  }
}

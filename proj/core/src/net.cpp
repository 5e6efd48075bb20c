#include "ibq/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <list>
#include <mutex>
#include <sstream>
#include <thread>

#include "ibq/text.hpp"

namespace ibq {

namespace {

constexpr std::string_view kEntails = " ENTAILS ";
constexpr std::string_view kFalsum = "FALSUM";

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

std::string encode_hello() { return "HELLO"; }
std::string encode_csat(const Concept& c) { return "CSAT " + render(c); }
std::string encode_asat(const Abox& a) { return "ASAT " + render_canonical(a, ";"); }

std::string encode_aent(const Abox& a, const Target& t) {
  std::string target = t ? render(*t) : std::string(kFalsum);
  if (a.empty()) return "AENT ENTAILS " + target;
  return "AENT " + render_canonical(a, ";") + std::string(kEntails) + target;
}

WireRequest decode_request(const std::string& raw) {
  std::string_view line = raw;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  WireRequest r;
  if (line == "HELLO") return r;
  if (starts_with(line, "CSAT ")) {
    r.verb = WireRequest::Verb::Csat;
    r.query = parse_concept(line.substr(5));
    return r;
  }
  if (line == "ASAT" || starts_with(line, "ASAT ")) {
    r.verb = WireRequest::Verb::Asat;
    r.abox = parse_abox(line.size() > 4 ? line.substr(5) : std::string_view{});
    return r;
  }
  if (starts_with(line, "AENT ")) {
    r.verb = WireRequest::Verb::Aent;
    std::string_view rest = line.substr(5);
    std::string_view abox, target;
    if (starts_with(rest, "ENTAILS ")) {
      target = rest.substr(8);
    } else {
      auto pos = rest.rfind(kEntails);
      if (pos == std::string_view::npos) throw BadSyntax(1, static_cast<int>(line.size()) + 1, "ENTAILS");
      abox = rest.substr(0, pos);
      target = rest.substr(pos + kEntails.size());
    }
    r.abox = parse_abox(abox);
    if (target != kFalsum) r.target = parse_assertion(target);
    return r;
  }
  throw BadSyntax(1, 1, "HELLO, CSAT, ASAT or AENT");
}

std::string encode_hello_response(OracleType type, const Signature& gamma, const LogicProfile& logic) {
  std::string g;
  for (auto& c : gamma.concepts) g += (g.empty() ? "" : ",") + std::string("c:") + c;
  for (auto& r : gamma.roles) g += (g.empty() ? "" : ",") + std::string("r:") + r;
  return "OK type=" + to_string(type) + " gamma=" + g + " logic=" + logic.name();
}

std::string answer_line(const OracleHandle& o, const std::string& line) {
  try {
    WireRequest q = decode_request(line);
    bool answer = false;
    switch (q.verb) {
      case WireRequest::Verb::Hello: return encode_hello_response(o.type(), o.gamma(), o.logic());
      case WireRequest::Verb::Csat: answer = o.csat(*q.query); break;
      case WireRequest::Verb::Asat: answer = o.asat(q.abox); break;
      case WireRequest::Verb::Aent: answer = o.aent(q.abox, q.target); break;
    }
    return answer ? "TRUE" : "FALSE";
  } catch (const BadSyntax& e) {
    return "ERR BAD_SYNTAX " + one_line(e.what());
  } catch (const SigViolation& e) {
    return "ERR SIG_VIOLATION " + one_line(e.what());
  } catch (const NotConnected& e) {
    return "ERR NOT_CONNECTED " + one_line(e.what());
  } catch (const std::exception& e) {
    return "ERR UNSUPPORTED " + one_line(e.what());
  }
}

Endpoint parse_endpoint(const std::string& text) {
  std::string s = starts_with(text, "tcp:") ? text.substr(4) : text;
  auto pos = s.rfind(':');
  if (pos == std::string::npos || pos == 0) throw std::invalid_argument("expected HOST:PORT, got '" + text + "'");
  Endpoint e;
  e.host = s.substr(0, pos);
  try {
    std::size_t used = 0;
    int port = std::stoi(s.substr(pos + 1), &used);
    if (used != s.size() - pos - 1 || port < 0 || port > 65535) throw std::out_of_range("port");
    e.port = static_cast<std::uint16_t>(port);
  } catch (const std::logic_error&) {
    throw std::invalid_argument("invalid port in '" + text + "'");
  }
  return e;
}

namespace {

// Blocking line reader over a socket.
class LineReader {
 public:
  LineReader(int fd, std::size_t max) : fd_(fd), max_(max) {}

  // nullopt on EOF; throws ProtocolError when the line is too long.
  std::optional<std::string> next() {
    while (true) {
      auto nl = buf_.find('\n');
      if (nl > max_ && buf_.size() > max_) throw ProtocolError("line exceeds " + std::to_string(max_) + " bytes");
      if (nl != std::string::npos) {
        std::string line = buf_.substr(0, nl);
        buf_.erase(0, nl + 1);
        return line;
      }
      if (buf_.size() > max_) throw ProtocolError("line exceeds " + std::to_string(max_) + " bytes");
      char chunk[4096];
      ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return std::nullopt;
      buf_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::size_t max_;
  std::string buf_;
};

bool send_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    off += static_cast<std::size_t>(n);
  }
  return true;
}

struct AddrInfo {
  addrinfo* list = nullptr;
  ~AddrInfo() {
    if (list) ::freeaddrinfo(list);
  }
};

void resolve(const Endpoint& e, bool passive, AddrInfo& out) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  std::string port = std::to_string(e.port);
  int rc = ::getaddrinfo(e.host.empty() ? nullptr : e.host.c_str(), port.c_str(), &hints, &out.list);
  if (rc != 0) throw ConnectionFailed("cannot resolve " + e.host + ": " + ::gai_strerror(rc));
}

class TcpServer : public Server {
 public:
  TcpServer(OracleHandle o, const Endpoint& listen, std::size_t max_line) : o_(std::move(o)), max_line_(max_line) {
    AddrInfo ai;
    resolve(listen, true, ai);
    std::string err = "no usable address";
    for (addrinfo* p = ai.list; p; p = p->ai_next) {
      int fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
      if (fd < 0) continue;
      int yes = 1;
      ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
      if (::bind(fd, p->ai_addr, p->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
        listen_fd_ = fd;
        break;
      }
      err = std::strerror(errno);
      ::close(fd);
    }
    if (listen_fd_ < 0) throw ConnectionFailed("cannot listen on " + listen.host + ":" + std::to_string(listen.port) + ": " + err);
    sockaddr_storage addr{};
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port
                                              : reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
    acceptor_ = std::thread([this] { accept_loop(); });
  }

  ~TcpServer() override { stop(); }

  std::uint16_t port() const override { return port_; }

  void stop() override {
    std::call_once(stopped_, [this] {
      stopping_ = true;
      ::shutdown(listen_fd_, SHUT_RDWR);
      ::close(listen_fd_);
      if (acceptor_.joinable()) acceptor_.join();
      std::list<Worker> workers;
      {
        std::lock_guard lock(mu_);
        for (auto& w : workers_)
          if (w.fd >= 0) ::shutdown(w.fd, SHUT_RDWR);
        workers.swap(workers_);
      }
      for (auto& w : workers) w.thread.join();
      std::lock_guard lock(mu_);
      done_ = true;
      done_cv_.notify_all();
    });
  }

  void wait() override {
    std::unique_lock lock(mu_);
    done_cv_.wait(lock, [this] { return done_; });
  }

 private:
  struct Worker {
    int fd;
    std::thread thread;
  };

  void accept_loop() {
    while (!stopping_) {
      int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) {
        if (errno == EINTR) continue;
        return;
      }
      std::lock_guard lock(mu_);
      if (stopping_) {
        ::close(fd);
        return;
      }
      workers_.push_back({fd, std::thread([this, fd] { session(fd); })});
    }
  }

  void session(int fd) {
    LineReader in(fd, max_line_);
    try {
      while (auto line = in.next())
        if (!send_all(fd, answer_line(o_, *line) + "\n")) break;
    } catch (const ProtocolError& e) {
      send_all(fd, "ERR BAD_SYNTAX " + one_line(e.what()) + "\n");
    }
    std::lock_guard lock(mu_);
    for (auto& w : workers_)
      if (w.fd == fd) w.fd = -1;
    ::shutdown(fd, SHUT_RDWR);
    ::close(fd);
  }

  OracleHandle o_;
  std::size_t max_line_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::condition_variable done_cv_;
  bool done_ = false;
  std::once_flag stopped_;
  std::list<Worker> workers_;
};

class RemoteBackend : public OracleBackend {
 public:
  explicit RemoteBackend(const Endpoint& e) {
    AddrInfo ai;
    resolve(e, false, ai);
    for (addrinfo* p = ai.list; p && fd_ < 0; p = p->ai_next) {
      int fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, p->ai_addr, p->ai_addrlen) == 0) fd_ = fd;
      else ::close(fd);
    }
    if (fd_ < 0) throw ConnectionFailed("cannot connect to " + e.host + ":" + std::to_string(e.port));
    reader_ = std::make_unique<LineReader>(fd_, kDefaultMaxLineBytes);
    parse_hello(request(encode_hello()));
  }

  ~RemoteBackend() override {
    if (fd_ >= 0) ::close(fd_);
  }

  OracleType type() const override { return type_; }
  const Signature& gamma() const override { return gamma_; }
  LogicProfile logic() const override { return logic_; }
  bool csat(const Concept& c) override { return truth(request(encode_csat(c))); }
  bool asat(const Abox& a) override { return truth(request(encode_asat(a))); }
  bool aent(const Abox& a, const Target& t) override { return truth(request(encode_aent(a, t))); }

 private:
  std::string request(const std::string& line) {
    std::lock_guard lock(mu_);
    if (!send_all(fd_, line + "\n")) throw ConnectionFailed("connection to oracle lost");
    auto reply = reader_->next();
    if (!reply) throw ConnectionFailed("oracle closed the connection");
    return *reply;
  }

  static bool truth(const std::string& reply) {
    if (reply == "TRUE") return true;
    if (reply == "FALSE") return false;
    if (starts_with(reply, "ERR ")) {
      std::string rest = reply.substr(4);
      auto sp = rest.find(' ');
      std::string code = rest.substr(0, sp), msg = sp == std::string::npos ? "" : rest.substr(sp + 1);
      if (code == "SIG_VIOLATION") throw SigViolation(msg);
      if (code == "NOT_CONNECTED") throw NotConnected(msg);
      if (code == "UNSUPPORTED") throw UnsupportedQueryForType(msg);
      if (code == "BAD_SYNTAX") throw ProtocolError("server rejected request: " + msg);
    }
    throw ProtocolError("malformed response: " + reply);
  }

  void parse_hello(const std::string& reply) {
    if (!starts_with(reply, "OK ")) throw ProtocolError("malformed HELLO response: " + reply);
    std::istringstream in(reply.substr(3));
    std::string field;
    bool seen_type = false, seen_logic = false;
    try {
      while (in >> field) {
        auto eq = field.find('=');
        if (eq == std::string::npos) throw ProtocolError("malformed HELLO field: " + field);
        std::string key = field.substr(0, eq), value = field.substr(eq + 1);
        if (key == "type") {
          type_ = parse_oracle_type(value);
          seen_type = true;
        } else if (key == "logic") {
          logic_ = LogicProfile::parse(value);
          seen_logic = true;
        } else if (key == "gamma") {
          std::istringstream items(value);
          std::string item;
          while (std::getline(items, item, ',')) {
            if (starts_with(item, "c:")) gamma_.concepts.insert(item.substr(2));
            else if (starts_with(item, "r:")) gamma_.roles.insert(item.substr(2));
            else throw ProtocolError("malformed gamma entry: " + item);
          }
        }
      }
    } catch (const std::invalid_argument& e) {
      throw ProtocolError(std::string("malformed HELLO response: ") + e.what());
    }
    if (!seen_type || !seen_logic) throw ProtocolError("HELLO response lacks type or logic: " + reply);
  }

  int fd_ = -1;
  std::unique_ptr<LineReader> reader_;
  std::mutex mu_;
  OracleType type_ = OracleType::Asat;
  Signature gamma_;
  LogicProfile logic_;
};

}  // namespace

std::unique_ptr<Server> serve(const OracleHandle& o, const Endpoint& listen, std::size_t max_line_bytes) {
  return std::make_unique<TcpServer>(o, listen, max_line_bytes);
}

OracleHandle connect(const Endpoint& server) { return OracleHandle(std::make_shared<RemoteBackend>(server)); }

}  // namespace ibq

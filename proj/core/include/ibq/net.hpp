#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "ibq/oracle.hpp"

namespace ibq {

struct ConnectionFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultMaxLineBytes = std::size_t{1} << 20;

struct WireRequest {
  enum class Verb : std::uint8_t { Hello, Csat, Asat, Aent } verb = Verb::Hello;
  std::optional<Concept> query;  // CSAT
  Abox abox;                       // ASAT / AENT
  Target target;                   // AENT; nullopt is FALSUM
};

std::string encode_hello();
std::string encode_csat(const Concept& c);
std::string encode_asat(const Abox& a);
std::string encode_aent(const Abox& a, const Target& t);
WireRequest decode_request(const std::string& line);  // throws BadSyntax

// OK line advertised for HELLO.
std::string encode_hello_response(OracleType type, const Signature& gamma, const LogicProfile& logic);

// Evaluates one request line against `o`; returns the response without '\n'.
std::string answer_line(const OracleHandle& o, const std::string& line);

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};
// Accepts "HOST:PORT" and "tcp:HOST:PORT".
Endpoint parse_endpoint(const std::string& text);

class Server {
 public:
  virtual ~Server() = default;
  virtual std::uint16_t port() const = 0;
  virtual void stop() = 0;
  virtual void wait() = 0;  // blocks until stop()
};

// Port 0 picks an ephemeral port; see Server::port().
std::unique_ptr<Server> serve(const OracleHandle& o, const Endpoint& listen,
                              std::size_t max_line_bytes = kDefaultMaxLineBytes);

// Handle whose type, Γ and logic come from the HELLO response.
OracleHandle connect(const Endpoint& server);

}  // namespace ibq

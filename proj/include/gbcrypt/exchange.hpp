#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gbcrypt/protocols.hpp"

namespace gbc {

/// Payload of one frame: {type, words[], round}.
struct FramedMessage {
  std::string type;  // hello | token | tokens | done
  std::vector<std::string> words;
  std::uint64_t round = 0;

  friend bool operator==(const FramedMessage&, const FramedMessage&) = default;
};

inline constexpr std::size_t kMaxFrameBytes = std::size_t{64} << 20;

/// 4-byte big-endian payload length followed by the JSON payload.
std::string encode_frame(const FramedMessage& msg);
/// Throws FrameError on invalid JSON, missing fields or an unknown type.
FramedMessage decode_payload(std::string_view payload);

/// A reliable byte stream between the two parties.
class Channel {
 public:
  virtual ~Channel() = default;
  virtual void write(std::string_view bytes) = 0;
  /// Reads up to `max` bytes, blocking until at least one is available.
  /// Returns an empty string once the peer has closed.
  virtual std::string read_some(std::size_t max) = 0;
  /// Signals end of stream to the peer.
  virtual void close() = 0;
};

void send_message(Channel& ch, const FramedMessage& msg);
/// Throws ConnectionError if the stream ends between frames and FrameError
/// if it ends inside one or the frame is malformed.
FramedMessage receive_message(Channel& ch);

/// Two connected in-process channel ends.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_inproc_pair();

/// Wraps a channel and records every frame that passes in either direction.
class TapChannel final : public Channel {
 public:
  explicit TapChannel(Channel& inner) : inner_(inner) {}
  void write(std::string_view bytes) override;
  std::string read_some(std::size_t max) override;
  void close() override { inner_.close(); }

  /// Complete frames seen so far, in order.
  const std::vector<FramedMessage>& frames() const { return frames_; }

 private:
  static void absorb(std::string& buffer, std::vector<FramedMessage>& out);

  Channel& inner_;
  std::string sent_;
  std::string received_;
  std::vector<FramedMessage> frames_;
};

class TcpListener {
 public:
  /// Binds 127.0.0.1 (or `host`) on `port`; port 0 picks a free port.
  explicit TcpListener(std::uint16_t port, const std::string& host = "127.0.0.1");
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  std::unique_ptr<Channel> accept();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// Throws ConnectionError when the peer is unreachable.
std::unique_ptr<Channel> tcp_connect(const std::string& host, std::uint16_t port);

/// Everything both parties must agree on before talking.
struct ExchangeSpec {
  Protocol protocol = Protocol::kolee;
  PlatformDescriptor platform;
  PublicParameters params;
  std::uint64_t seed = 0;
};

struct PartyResult {
  Transcript transcript;
  Key key{};
};

/// Runs one party of the message sequence
///   A hello, B hello, A token(s), B token(s), A done, B done.
/// Hello carries the published words; a mismatch raises ProtocolError.
PartyResult run_party(Channel& ch, const ExchangeSpec& spec, Role role);

/// Rebuilds the eavesdropper's transcript from recorded frames.
Transcript transcript_from_frames(const ExchangeSpec& spec, const std::vector<FramedMessage>& frames);

struct ExchangeResult {
  Transcript transcript;
  Key alice_key{};
  Key bob_key{};
  /// The transcript as reconstructed from the frames on the wire.
  Transcript tapped;
};

ExchangeResult exchange_inproc(const ExchangeSpec& spec);
/// Both parties in this process, talking over a loopback socket.
ExchangeResult exchange_tcp_loopback(const ExchangeSpec& spec);

}  // namespace gbc

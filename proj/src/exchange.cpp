#include "gbcrypt/exchange.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>

#include "gbcrypt/errors.hpp"
#include "json.hpp"

namespace gbc {

namespace {

bool known_type(const std::string& t) { return t == "hello" || t == "token" || t == "tokens" || t == "done"; }

std::uint32_t read_length(std::string_view four) {
  std::uint32_t n = 0;
  for (int i = 0; i < 4; ++i) n = (n << 8) | static_cast<unsigned char>(four[static_cast<std::size_t>(i)]);
  return n;
}

// Blocks until `n` bytes arrive. Returns fewer only at end of stream.
std::string read_exact(Channel& ch, std::size_t n) {
  std::string out;
  while (out.size() < n) {
    std::string chunk = ch.read_some(n - out.size());
    if (chunk.empty()) break;
    out += chunk;
  }
  return out;
}

struct Pipe {
  std::mutex mu;
  std::condition_variable cv;
  std::string data;
  bool closed = false;
};

class InprocChannel final : public Channel {
 public:
  InprocChannel(std::shared_ptr<Pipe> in, std::shared_ptr<Pipe> out) : in_(std::move(in)), out_(std::move(out)) {}
  ~InprocChannel() override { close(); }

  void write(std::string_view bytes) override {
    std::lock_guard lock(out_->mu);
    if (out_->closed) throw ConnectionError("write on closed channel");
    out_->data.append(bytes);
    out_->cv.notify_all();
  }

  std::string read_some(std::size_t max) override {
    std::unique_lock lock(in_->mu);
    in_->cv.wait(lock, [&] { return !in_->data.empty() || in_->closed; });
    const std::size_t n = std::min(max, in_->data.size());
    std::string out = in_->data.substr(0, n);
    in_->data.erase(0, n);
    return out;
  }

  void close() override {
    std::lock_guard lock(out_->mu);
    out_->closed = true;
    out_->cv.notify_all();
  }

 private:
  std::shared_ptr<Pipe> in_;
  std::shared_ptr<Pipe> out_;
};

class SocketChannel final : public Channel {
 public:
  explicit SocketChannel(int fd) : fd_(fd) {}
  ~SocketChannel() override { ::close(fd_); }
  SocketChannel(const SocketChannel&) = delete;
  SocketChannel& operator=(const SocketChannel&) = delete;

  void write(std::string_view bytes) override {
    while (!bytes.empty()) {
      const ssize_t n = ::send(fd_, bytes.data(), bytes.size(), MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ConnectionError(std::string("send failed: ") + std::strerror(errno));
      }
      bytes.remove_prefix(static_cast<std::size_t>(n));
    }
  }

  std::string read_some(std::size_t max) override {
    std::string buf(std::min<std::size_t>(max, 1 << 16), '\0');
    for (;;) {
      const ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
      if (n < 0 && errno == EINTR) continue;
      if (n < 0) throw ConnectionError(std::string("recv failed: ") + std::strerror(errno));
      buf.resize(static_cast<std::size_t>(n));
      return buf;
    }
  }

  void close() override { ::shutdown(fd_, SHUT_WR); }

 private:
  int fd_;
};

std::vector<std::string> format_all(const std::vector<Word>& words) {
  std::vector<std::string> out;
  for (const auto& w : words) out.push_back(format_word(w));
  return out;
}

std::vector<Word> parse_all(const std::vector<std::string>& words, const PlatformDescriptor& p) {
  std::vector<Word> out;
  try {
    for (const auto& w : words) out.push_back(parse_word(w, p.alphabet_size()));
  } catch (const ParseError& e) {
    throw ProtocolError(std::string("peer sent a word outside the platform: ") + e.what());
  }
  return out;
}

FramedMessage expect(Channel& ch, const std::string& type) {
  FramedMessage msg = receive_message(ch);
  if (msg.type != type) throw ProtocolError("expected '" + type + "' frame, got '" + msg.type + "'");
  if (msg.round != 0) throw ProtocolError("unexpected round " + std::to_string(msg.round));
  return msg;
}

std::vector<Word> published_words(const ExchangeSpec& spec, const KoLeeConfig* kolee, const AAGConfig* aag) {
  if (spec.protocol == Protocol::kolee) return {kolee->base};
  std::vector<Word> out = aag->alice_public;
  out.insert(out.end(), aag->bob_public.begin(), aag->bob_public.end());
  return out;
}

}  // namespace

std::string encode_frame(const FramedMessage& msg) {
  nlohmann::ordered_json doc;
  doc["type"] = msg.type;
  doc["words"] = msg.words;
  doc["round"] = msg.round;
  const std::string payload = doc.dump();
  if (payload.size() > kMaxFrameBytes) throw FrameError("frame exceeds the size limit");
  const auto n = static_cast<std::uint32_t>(payload.size());
  std::string out;
  out.reserve(4 + payload.size());
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((n >> shift) & 0xff));
  out += payload;
  return out;
}

FramedMessage decode_payload(std::string_view payload) {
  FramedMessage msg;
  try {
    const auto doc = nlohmann::json::parse(payload);
    msg.type = doc.at("type").get<std::string>();
    msg.words = doc.at("words").get<std::vector<std::string>>();
    msg.round = doc.at("round").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FrameError(std::string("malformed frame payload: ") + e.what());
  }
  if (!known_type(msg.type)) throw FrameError("unknown frame type '" + msg.type + "'");
  return msg;
}

void send_message(Channel& ch, const FramedMessage& msg) { ch.write(encode_frame(msg)); }

FramedMessage receive_message(Channel& ch) {
  const std::string header = read_exact(ch, 4);
  if (header.empty()) throw ConnectionError("peer closed the connection");
  if (header.size() < 4) throw FrameError("truncated frame header");
  const std::uint32_t n = read_length(header);
  if (n > kMaxFrameBytes) throw FrameError("frame length " + std::to_string(n) + " exceeds the limit");
  const std::string payload = read_exact(ch, n);
  if (payload.size() < n) throw FrameError("truncated frame payload");
  return decode_payload(payload);
}

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_inproc_pair() {
  auto ab = std::make_shared<Pipe>();
  auto ba = std::make_shared<Pipe>();
  return {std::make_unique<InprocChannel>(ba, ab), std::make_unique<InprocChannel>(ab, ba)};
}

void TapChannel::absorb(std::string& buffer, std::vector<FramedMessage>& out) {
  while (buffer.size() >= 4) {
    const std::uint32_t n = read_length(buffer);
    if (buffer.size() < 4 + static_cast<std::size_t>(n)) return;
    out.push_back(decode_payload(std::string_view(buffer).substr(4, n)));
    buffer.erase(0, 4 + static_cast<std::size_t>(n));
  }
}

void TapChannel::write(std::string_view bytes) {
  inner_.write(bytes);
  sent_.append(bytes);
  absorb(sent_, frames_);
}

std::string TapChannel::read_some(std::size_t max) {
  std::string chunk = inner_.read_some(max);
  received_ += chunk;
  // A malformed frame is the reader's problem, not the tap's.
  try {
    absorb(received_, frames_);
  } catch (const FrameError&) {
    received_.clear();
  }
  return chunk;
}

TcpListener::TcpListener(std::uint16_t port, const std::string& host) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw ConnectionError(std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw ConnectionError("bad listen address '" + host + "'");
  }
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd_, 1) < 0) {
    const std::string why = std::strerror(errno);
    ::close(fd_);
    throw ConnectionError("cannot listen on " + host + ":" + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() { ::close(fd_); }

std::unique_ptr<Channel> TcpListener::accept() {
  for (;;) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return std::make_unique<SocketChannel>(fd);
    if (errno != EINTR) throw ConnectionError(std::string("accept: ") + std::strerror(errno));
  }
}

std::unique_ptr<Channel> tcp_connect(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
    throw ConnectionError("cannot resolve '" + host + "': " + ::gai_strerror(rc));
  }
  std::string why = "no addresses";
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      ::freeaddrinfo(res);
      return std::make_unique<SocketChannel>(fd);
    }
    why = std::strerror(errno);
    ::close(fd);
  }
  ::freeaddrinfo(res);
  throw ConnectionError("cannot connect to " + host + ":" + service + ": " + why);
}

PartyResult run_party(Channel& ch, const ExchangeSpec& spec, Role role) {
  const bool alice = role == Role::alice;
  auto rng = party_rng(spec.seed, 0, role);
  const FramedMessage done{"done", {}, 0};
  const std::string token_type = spec.protocol == Protocol::kolee ? "token" : "tokens";

  std::optional<KoLeeConfig> kolee;
  std::optional<AAGConfig> aag;
  if (spec.protocol == Protocol::kolee) {
    kolee = make_kolee_config(spec.platform, spec.params, spec.seed);
  } else {
    aag = make_aag_config(spec.platform, spec.params, spec.seed);
  }
  const FramedMessage hello{"hello", format_all(published_words(spec, kolee ? &*kolee : nullptr, aag ? &*aag : nullptr)), 0};

  auto check_hello = [&](const FramedMessage& peer) {
    if (peer.words != hello.words) throw ProtocolError("peer published different public parameters");
  };
  if (alice) {
    send_message(ch, hello);
    check_hello(expect(ch, "hello"));
  } else {
    check_hello(expect(ch, "hello"));
    send_message(ch, hello);
  }

  std::vector<Word> own_tokens;
  std::function<Word(const std::vector<Word>&)> finish;
  std::size_t expected_peer_tokens = 1;
  if (kolee) {
    auto c = kolee_commit(*kolee, role, rng);
    own_tokens = {c.token};
    finish = [&, secret = c.secret](const std::vector<Word>& peer) { return kolee_shared(*kolee, secret, peer[0]); };
  } else {
    auto c = aag_commit(*aag, role, rng);
    own_tokens = c.tokens;
    expected_peer_tokens = alice ? aag->bob_public.size() : aag->alice_public.size();
    finish = [&, c](const std::vector<Word>& peer) {
      return aag_shared(*aag, role, c.secret_template, c.secret, peer);
    };
  }
  const FramedMessage mine{token_type, format_all(own_tokens), 0};

  std::vector<Word> peer_tokens;
  auto take_peer = [&] {
    peer_tokens = parse_all(expect(ch, token_type).words, spec.platform);
    if (peer_tokens.size() != expected_peer_tokens) {
      throw ProtocolError("peer sent " + std::to_string(peer_tokens.size()) + " tokens, expected " +
                          std::to_string(expected_peer_tokens));
    }
  };
  if (alice) {
    send_message(ch, mine);
    take_peer();
    send_message(ch, done);
    expect(ch, "done");
  } else {
    take_peer();
    send_message(ch, mine);
    expect(ch, "done");
    send_message(ch, done);
  }

  PartyResult result;
  const Word shared = finish(peer_tokens);
  result.key = derive_key(spec.platform, shared);
  const auto& alice_tokens = alice ? own_tokens : peer_tokens;
  const auto& bob_tokens = alice ? peer_tokens : own_tokens;
  result.transcript = kolee ? make_transcript(*kolee, alice_tokens.at(0), bob_tokens.at(0))
                            : make_transcript(*aag, alice_tokens, bob_tokens);
  return result;
}

Transcript transcript_from_frames(const ExchangeSpec& spec, const std::vector<FramedMessage>& frames) {
  Transcript t;
  t.protocol = spec.protocol;
  t.platform = spec.platform;
  int token_frames = 0;
  bool have_hello = false;
  for (const auto& f : frames) {
    if (f.type == "hello" && !have_hello) {
      t.published = parse_all(f.words, spec.platform);
      have_hello = true;
    } else if (f.type == "token" || f.type == "tokens") {
      (token_frames++ == 0 ? t.alice_tokens : t.bob_tokens) = parse_all(f.words, spec.platform);
    }
  }
  return t;
}

namespace {

ExchangeResult run_pair(Channel& alice_end, Channel& bob_end, const ExchangeSpec& spec) {
  TapChannel tap(alice_end);
  PartyResult bob;
  std::exception_ptr bob_error;
  std::thread bob_thread([&] {
    try {
      bob = run_party(bob_end, spec, Role::bob);
    } catch (...) {
      bob_error = std::current_exception();
      bob_end.close();
    }
  });
  PartyResult alice;
  std::exception_ptr alice_error;
  try {
    alice = run_party(tap, spec, Role::alice);
  } catch (...) {
    alice_error = std::current_exception();
    alice_end.close();
  }
  bob_thread.join();
  if (alice_error) std::rethrow_exception(alice_error);
  if (bob_error) std::rethrow_exception(bob_error);
  if (alice.transcript != bob.transcript) throw ProtocolError("parties disagree on the transcript");
  return {alice.transcript, alice.key, bob.key, transcript_from_frames(spec, tap.frames())};
}

}  // namespace

ExchangeResult exchange_inproc(const ExchangeSpec& spec) {
  auto [a, b] = make_inproc_pair();
  return run_pair(*a, *b, spec);
}

ExchangeResult exchange_tcp_loopback(const ExchangeSpec& spec) {
  TcpListener listener(0);
  std::unique_ptr<Channel> bob_end;
  std::exception_ptr accept_error;
  std::thread acceptor([&] {
    try {
      bob_end = listener.accept();
    } catch (...) {
      accept_error = std::current_exception();
    }
  });
  auto alice_end = tcp_connect("127.0.0.1", listener.port());
  acceptor.join();
  if (accept_error) std::rethrow_exception(accept_error);
  return run_pair(*alice_end, *bob_end, spec);
}

}  // namespace gbc

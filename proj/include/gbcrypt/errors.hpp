#pragma once

#include <stdexcept>

namespace gbc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input: words, descriptors, JSON documents.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// The peers disagree on the protocol, its public parameters, or the
/// message order.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// A length-prefixed frame was truncated, oversized, or not a valid message.
class FrameError : public Error {
 public:
  using Error::Error;
};

class ConnectionError : public Error {
 public:
  using Error::Error;
};

}  // namespace gbc

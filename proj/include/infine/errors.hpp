#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace infine {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed CSV content or view text.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t position)
      : Error(msg + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}
  explicit ParseError(const std::string& msg) : Error(msg) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_ = 0;
};

// Well-formed input that violates a schema or typing rule.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace infine

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace raggs {

/// Caller supplied something outside an operation's domain.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A record file could not be parsed or failed schema validation.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
        source_(source),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// Internal state broke an invariant that the algorithms maintain.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A judge (simulated, replayed or remote) failed to return an order.
class JudgeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An ablation could not be applied to a probe bundle.
class TransformError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file referenced by a manifest is missing or does not match its digest.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RAGGS_ENSURE(cond, msg)                                         \
  do {                                                                  \
    if (!(cond)) throw ::raggs::InvariantViolation(std::string(msg));   \
  } while (0)

}  // namespace raggs

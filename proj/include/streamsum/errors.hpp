#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace streamsum {

// Input broke the strict bounded-deletion contract (e.g. a delete of an item
// that was never inserted, or more deletes than inserts of one item).
class ModelViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed stream file; carries the 1-based line number of the offence.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace streamsum

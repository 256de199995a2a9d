#pragma once

#include <stdexcept>
#include <string>

namespace flowseg {

// Base for all library errors so callers can catch one type at the CLI edge.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input files; carries a 1-based line number when known.
class parse_error : public error {
 public:
  parse_error(const std::string& msg, long line = 0)
      : error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

// Invalid configuration (negative penalty, window longer than the series, ...).
class config_error : public error {
 public:
  using error::error;
};

// Structurally bad data: non-finite values, unordered dates, degenerate inputs.
class data_error : public error {
 public:
  using error::error;
};

// Estimation could not produce a usable result.
class fit_error : public error {
 public:
  using error::error;
};

}  // namespace flowseg

#pragma once

#include <stdexcept>
#include <string>

namespace gainloss {

// Base class for all library errors. The CLI maps these to exit code 1;
// anything argument/usage related is reported before work starts.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

class SizeError : public Error {
 public:
  explicit SizeError(const std::string& msg) : Error(msg) {}
};

class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& msg) : Error(msg) {}
};

class EmptyInputError : public Error {
 public:
  explicit EmptyInputError(const std::string& msg) : Error(msg) {}
};

class StationarityError : public Error {
 public:
  explicit StationarityError(const std::string& msg) : Error(msg) {}
};

// Simulation aborted mid-path (e.g. price positivity guard). Carries the
// step index so callers can report or re-seed.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& msg, long step) : Error(msg), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

class FitError : public Error {
 public:
  explicit FitError(const std::string& msg) : Error(msg) {}
};

// Requested density mode lies on the boundary (at 0+), no interior maximum.
class BoundaryModeError : public Error {
 public:
  explicit BoundaryModeError(const std::string& msg) : Error(msg) {}
};

// Malformed input file; message carries "path:line".
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Bad configuration or CLI usage; mapped to exit code 2.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace gainloss

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace teleop {

// Base of every error raised by the library. Callers that only care about
// "the simulation failed" catch this; the subclasses exist so that the
// drift compensator can react to a near-pi rotation specifically.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotSkewSymmetric : public Error {
 public:
  using Error::Error;
};

// log_so3 is undefined at a rotation angle of pi (tr(R) = -1).
class NearPiRotation : public Error {
 public:
  using Error::Error;
};

class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class FrameMismatch : public Error {
 public:
  using Error::Error;
};

class NotSPD : public Error {
 public:
  using Error::Error;
};

// Scenario or gains file problem. key_path is the dotted TOML path of the
// offending entry ("channel.delay_forward_ms"), empty when not applicable.
class ConfigError : public Error {
 public:
  ConfigError(std::string key_path, const std::string& what)
      : Error(key_path.empty() ? what : key_path + ": " + what),
        key_path_(std::move(key_path)) {}

  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

// Error raised while stepping a scenario; carries the tick it happened at.
class SimulationError : public Error {
 public:
  SimulationError(long long tick, const std::string& what)
      : Error("tick " + std::to_string(tick) + ": " + what), tick_(tick) {}

  long long tick() const noexcept { return tick_; }

 private:
  long long tick_;
};

}  // namespace teleop

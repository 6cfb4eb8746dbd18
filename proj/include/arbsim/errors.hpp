#pragma once

#include <stdexcept>
#include <string>

namespace arbsim {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct EgoOutOfBounds : std::runtime_error {
  explicit EgoOutOfBounds(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonFiniteActivation : std::runtime_error {
  explicit NonFiniteActivation(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonFiniteLoss : std::runtime_error {
  explicit NonFiniteLoss(const std::string& msg) : std::runtime_error(msg) {}
};

struct LengthMismatch : std::invalid_argument {
  explicit LengthMismatch(const std::string& msg) : std::invalid_argument(msg) {}
};

struct EmptyGroup : std::invalid_argument {
  explicit EmptyGroup(const std::string& msg) : std::invalid_argument(msg) {}
};

struct InsufficientData : std::invalid_argument {
  explicit InsufficientData(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace arbsim

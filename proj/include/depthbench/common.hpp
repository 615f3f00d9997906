#pragma once

#include <stdexcept>
#include <string>

namespace depthbench {

// Default cap on trusted depth readings, in meters. Pixels beyond it are
// treated as invalid ground truth.
inline constexpr double kMaxDepthMeters = 50.0;

// Default raw-unit scale for 16-bit depth rasters: millimeters to meters.
inline constexpr double kDefaultUnitScale = 0.001;

// Floor applied to non-positive predictions before log-domain metrics.
inline constexpr double kLogDepthFloorMeters = 1e-6;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two operands whose grid dimensions must agree do not.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// The shared validity mask contains no usable pixels.
class EmptyMaskError : public Error {
 public:
  using Error::Error;
};

// A masked-in depth value is zero or negative where positivity is required.
class NonPositiveDepthError : public Error {
 public:
  using Error::Error;
};

// Not enough well-conditioned point triplets to evaluate a normal-based loss.
class InsufficientGeometryError : public Error {
 public:
  using Error::Error;
};

// A linear block cannot be folded into a single kernel.
class NotCollapsibleError : public Error {
 public:
  using Error::Error;
};

// A file does not match its expected on-disk format.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A configuration value is inconsistent or infeasible.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A numeric argument lies outside the function's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A graph or weight store fails structural validation. Carries the id of the
// offending node where one exists.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& node_id, const std::string& message)
      : Error(node_id.empty() ? message : "node '" + node_id + "': " + message),
        node_id_(node_id) {}
  explicit ValidationError(const std::string& message) : ValidationError("", message) {}

  const std::string& node_id() const { return node_id_; }

 private:
  std::string node_id_;
};

}  // namespace depthbench

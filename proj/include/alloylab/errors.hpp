#pragma once

#include <stdexcept>
#include <string>

namespace alloylab {

struct SingularTransform : std::runtime_error {
  explicit SingularTransform(const std::string& what) : std::runtime_error(what) {}
};

struct NotAdmissible : std::runtime_error {
  explicit NotAdmissible(const std::string& what) : std::runtime_error(what) {}
};

struct IndexMismatch : std::runtime_error {
  explicit IndexMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct QuadratureFailure : std::runtime_error {
  explicit QuadratureFailure(const std::string& what) : std::runtime_error(what) {}
};

struct NotDifferentiable : std::runtime_error {
  explicit NotDifferentiable(const std::string& what) : std::runtime_error(what) {}
};

struct EnergyResonant : std::runtime_error {
  explicit EnergyResonant(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientData : std::runtime_error {
  explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

struct SizeOverflow : std::runtime_error {
  explicit SizeOverflow(const std::string& what) : std::runtime_error(what) {}
};

struct ConvergenceFailure : std::runtime_error {
  explicit ConvergenceFailure(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidCutoff : std::runtime_error {
  explicit InvalidCutoff(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace alloylab

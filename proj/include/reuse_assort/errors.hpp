#pragma once

#include <stdexcept>
#include <string>

namespace reuse_assort {

// Base for all library errors. The `where` prefix names the module that raised
// it so callers (the CLI in particular) can surface provenance.
class Error : public std::runtime_error {
 public:
  Error(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

class ModelError : public Error {
 public:
  explicit ModelError(const std::string& what) : Error("model", what) {}
};

// A size guard on an exhaustive routine was exceeded.
class GuardError : public Error {
 public:
  GuardError(const std::string& where, const std::string& what) : Error(where, what) {}
};

class LpError : public Error {
 public:
  enum class Status { kUnbounded, kInfeasible, kIterationLimit, kNumerical };
  LpError(Status status, const std::string& what) : Error("lp", what), status_(status) {}
  Status status() const { return status_; }

 private:
  Status status_;
};

class SamplingError : public Error {
 public:
  explicit SamplingError(const std::string& what) : Error("sampling", what) {}
};

class PolicyError : public Error {
 public:
  explicit PolicyError(const std::string& what) : Error("policies", what) {}
};

}  // namespace reuse_assort

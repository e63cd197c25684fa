#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cclab {

// Typed computation errors. name() is the machine-readable identifier that
// the CLI surfaces in reports (exit code 3).
class Error : public std::runtime_error {
public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(what), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

struct NotUnimodular : Error {
  explicit NotUnimodular(const std::string& w) : Error("NotUnimodular", w) {}
};

struct NotHyperbolic : Error {
  explicit NotHyperbolic(const std::string& w) : Error("NotHyperbolic", w) {}
};

struct NoPathWithinBound : Error {
  explicit NoPathWithinBound(const std::string& w) : Error("NoPathWithinBound", w) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& w) : Error("DimensionMismatch", w) {}
};

struct SingularProduct : Error {
  explicit SingularProduct(const std::string& w) : Error("SingularProduct", w) {}
};

struct InvalidTheta : Error {
  explicit InvalidTheta(const std::string& w) : Error("InvalidTheta", w) {}
};

struct NotBunched : Error {
  explicit NotBunched(const std::string& w) : Error("NotBunched", w) {}
};

// Raised when the holonomy tail envelope grows for 10 consecutive steps;
// converts failure of the fiber bunching hypothesis into a typed error.
struct Diverged : Error {
  Diverged(const std::string& w, int n_at, int leg_index = -1)
      : Error("Diverged", w), n_at(n_at), leg_index(leg_index) {}
  int n_at;
  int leg_index;  // offending leg in a path weight, -1 if not applicable
};

struct NotACycle : Error {
  explicit NotACycle(const std::string& w) : Error("NotACycle", w) {}
};

struct PremiseViolated : Error {
  PremiseViolated(const std::string& w, double residual)
      : Error("PremiseViolated", w), residual(residual) {}
  double residual;
};

struct CycleObstruction : Error {
  CycleObstruction(const std::string& w, double defect)
      : Error("CycleObstruction", w), defect(defect) {}
  double defect;
};

struct SingularConjugacy : Error {
  explicit SingularConjugacy(const std::string& w) : Error("SingularConjugacy", w) {}
};

struct NoDominatedSplitting : Error {
  explicit NoDominatedSplitting(const std::string& w) : Error("NoDominatedSplitting", w) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error("ConfigError", w) {}
};

}  // namespace cclab

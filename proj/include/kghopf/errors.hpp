#pragma once

#include <stdexcept>
#include <string>

namespace kghopf {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A potential (or derived quantity) produced a non-finite value.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// No periodic orbit exists for the requested (c, E).
class NoOrbitError : public Error {
  public:
    NoOrbitError(const std::string& what, bool separatrix)
        : Error(what), separatrix_(separatrix) {}
    [[nodiscard]] bool separatrix() const noexcept { return separatrix_; }

  private:
    bool separatrix_;
};

/// Adaptive integration or quadrature did not reach the requested accuracy.
class IntegrationError : public Error {
  public:
    using Error::Error;
};

/// The sampled profile violates its conservation or closure invariants.
class ProfileAccuracyError : public Error {
  public:
    ProfileAccuracyError(const std::string& what, double drift)
        : Error(what), drift_(drift) {}
    [[nodiscard]] double drift() const noexcept { return drift_; }

  private:
    double drift_;
};

/// The scan grid is too coarse to resolve the discriminant's oscillations.
class ScanResolutionError : public Error {
  public:
    using Error::Error;
};

/// Both the first and second derivative of the discriminant vanish.
class DegenerateDiscriminantError : public Error {
  public:
    using Error::Error;
};

/// A coefficient that should come from a traveling wave fails Delta(0) = 2.
class NotAWaveError : public Error {
  public:
    using Error::Error;
};

/// A computed quantity contradicts a property every Hill discriminant has.
class InconsistentTheoryError : public Error {
  public:
    using Error::Error;
};

/// Invalid user input (bad config value, out-of-range argument).
class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace kghopf

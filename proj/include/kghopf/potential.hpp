#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace kghopf {

/// Values of V, V' and V'' at one point.
struct PotentialValues {
    double V = 0.0;
    double Vp = 0.0;
    double Vpp = 0.0;
};

class PotentialModel {
  public:
    virtual ~PotentialModel() = default;
    [[nodiscard]] virtual PotentialValues eval(double u) const = 0;
};

/// An immutable C^2 potential V with its first two derivatives.
///
/// Copies share the underlying model, so passing by value is cheap and
/// evaluation is safe from several threads at once.
class Potential {
  public:
    using Params = std::map<std::string, double>;

    Potential(std::string name, Params params, std::optional<double> period,
              std::shared_ptr<const PotentialModel> model);

    /// V(u) = 1 - cos(u).
    static Potential sine_gordon();

    /// V(u) = sum_i coeffs[i] u^i.
    static Potential polynomial(std::vector<double> coeffs);

    /// Build a potential by name ("sine_gordon" or "polynomial").  Polynomial
    /// coefficients are read from params "c0", "c1", ... in order.
    static Potential from_name(const std::string& name, const Params& params);

    /// Throws DomainError when u or any returned value is not finite.
    [[nodiscard]] PotentialValues eval(double u) const;

    /// Unchecked evaluation for inner loops.
    [[nodiscard]] PotentialValues eval_unchecked(double u) const { return model_->eval(u); }

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const Params& params() const noexcept { return params_; }
    /// Spatial period of V in u, if V is periodic.
    [[nodiscard]] std::optional<double> period() const noexcept { return period_; }

  private:
    std::string name_;
    Params params_;
    std::optional<double> period_;
    std::shared_ptr<const PotentialModel> model_;
};

}  // namespace kghopf

#include "kghopf/potential.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "kghopf/errors.hpp"

namespace kghopf {
namespace {

class SineGordonModel final : public PotentialModel {
  public:
    PotentialValues eval(double u) const override {
        const double s = std::sin(u);
        const double c = std::cos(u);
        const double h = std::sin(0.5 * u);
        // 2 sin^2(u/2) keeps V accurate near the well bottom, where 1 - cos u cancels.
        return {2.0 * h * h, s, c};
    }
};

class PolynomialModel final : public PotentialModel {
  public:
    explicit PolynomialModel(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

    PotentialValues eval(double u) const override {
        // Horner for V, V', V'' simultaneously.
        double v = 0.0, vp = 0.0, vpp = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            vpp = vpp * u + 2.0 * vp;
            vp = vp * u + v;
            v = v * u + *it;
        }
        return {v, vp, vpp};
    }

  private:
    std::vector<double> coeffs_;
};

}  // namespace

Potential::Potential(std::string name, Params params, std::optional<double> period,
                     std::shared_ptr<const PotentialModel> model)
    : name_(std::move(name)),
      params_(std::move(params)),
      period_(period),
      model_(std::move(model)) {
    if (!model_) throw ConfigError("potential '" + name_ + "' has no model");
}

Potential Potential::sine_gordon() {
    return Potential("sine_gordon", {}, 2.0 * std::numbers::pi,
                     std::make_shared<SineGordonModel>());
}

Potential Potential::polynomial(std::vector<double> coeffs) {
    if (coeffs.empty()) throw ConfigError("polynomial potential needs at least one coefficient");
    Params params;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (!std::isfinite(coeffs[i]))
            throw ConfigError("polynomial coefficient c" + std::to_string(i) + " is not finite");
        params["c" + std::to_string(i)] = coeffs[i];
    }
    return Potential("polynomial", std::move(params), std::nullopt,
                     std::make_shared<PolynomialModel>(std::move(coeffs)));
}

Potential Potential::from_name(const std::string& name, const Params& params) {
    if (name == "sine_gordon") {
        if (!params.empty()) throw ConfigError("sine_gordon takes no parameters");
        return sine_gordon();
    }
    if (name == "polynomial") {
        std::vector<double> coeffs;
        for (std::size_t i = 0;; ++i) {
            auto it = params.find("c" + std::to_string(i));
            if (it == params.end()) break;
            coeffs.push_back(it->second);
        }
        if (coeffs.size() != params.size())
            throw ConfigError("polynomial parameters must be c0..cN without gaps");
        return polynomial(std::move(coeffs));
    }
    throw ConfigError("unknown potential '" + name + "'");
}

PotentialValues Potential::eval(double u) const {
    if (!std::isfinite(u)) throw DomainError("potential evaluated at non-finite u");
    const auto r = model_->eval(u);
    if (!std::isfinite(r.V) || !std::isfinite(r.Vp) || !std::isfinite(r.Vpp))
        throw DomainError(name_ + " potential is not finite at u = " + std::to_string(u));
    return r;
}

}  // namespace kghopf

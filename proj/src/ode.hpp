#pragma once

// Internal integration helpers shared by the waveform and Hill modules.

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "kghopf/errors.hpp"

namespace kghopf::detail {

inline bool finite(double x) { return std::isfinite(x); }
inline bool finite(std::complex<double> x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); }

template <class State>
bool all_finite(const State& x) {
    for (const auto& v : x)
        if (!finite(v)) return false;
    return true;
}

/// Adaptive Fehlberg 7(8) integration of x' = sys(x, z) from z0 to z1.
template <class State, class System>
std::size_t integrate_rk78(System&& sys, State& x, double z0, double z1, double rtol, double atol,
                           const char* what) {
    namespace odeint = boost::numeric::odeint;
    auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(atol, rtol);
    std::size_t steps = 0;
    try {
        steps = odeint::integrate_adaptive(stepper, sys, x, z0, z1, (z1 - z0) / 64.0);
    } catch (const std::exception& e) {
        throw IntegrationError(std::string(what) + ": " + e.what());
    }
    if (!all_finite(x)) throw IntegrationError(std::string(what) + ": non-finite state");
    return steps;
}

}  // namespace kghopf::detail

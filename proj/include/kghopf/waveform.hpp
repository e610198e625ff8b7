#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kghopf/potential.hpp"

namespace kghopf {

/// Wave speed c and orbit energy E = (c^2-1) f'^2 / 2 + V(f).
struct WaveParameters {
    double c = 0.0;
    double E = 0.0;

    /// Throws ConfigError for non-finite values or |c^2 - 1| <= 1e-12.
    void validate() const;
    [[nodiscard]] double c2m1() const noexcept { return c * c - 1.0; }
};

enum class Regime { librational, rotational };

[[nodiscard]] std::string to_string(Regime r);

struct WaveOptions {
    /// Seed for the well to librate in; defaults to the global minimum of
    /// the effective potential over one period, or to the lowest local
    /// minimum in [-10, 10] for non-periodic potentials.
    std::optional<double> well;
    /// Profile integrator tolerances.
    double rtol = 1e-10;
    double atol = 1e-12;
    /// Quadrature tolerance for the period integral.
    double quad_tol = 1e-12;
};

/// Where the orbit lives in the effective potential U = sgn(c^2-1) V with
/// effective energy sgn(c^2-1) E.
struct OrbitGeometry {
    Regime regime = Regime::librational;
    double sign = 1.0;       ///< sgn(c^2 - 1)
    double energy = 0.0;     ///< sign * E
    double center = 0.0;     ///< minimum of U; f(0) and max |f'| sit here
    double left = 0.0;       ///< turning points (librational only)
    double right = 0.0;
    double winding = 0.0;    ///< f(T) - f(0)
};

/// Throws NoOrbitError (separatrix flag set when E is a critical value).
[[nodiscard]] OrbitGeometry locate_orbit(const Potential& p, const WaveParameters& w,
                                         const WaveOptions& opt = {});

[[nodiscard]] Regime classify_regime(const Potential& p, const WaveParameters& w,
                                     const WaveOptions& opt = {});

/// Fundamental period of f', by quadrature of dz = df / |f'(f)|.
[[nodiscard]] double compute_period(const Potential& p, const WaveParameters& w,
                                    const WaveOptions& opt = {});

/// Sampled traveling-wave profile with cubic Hermite interpolation.
class WaveProfile {
  public:
    WaveProfile(Potential potential, WaveParameters params, OrbitGeometry orbit, double period,
                std::vector<double> f, std::vector<double> fp);

    [[nodiscard]] const Potential& potential() const noexcept { return potential_; }
    [[nodiscard]] const WaveParameters& params() const noexcept { return params_; }
    [[nodiscard]] Regime regime() const noexcept { return orbit_.regime; }
    [[nodiscard]] const OrbitGeometry& orbit() const noexcept { return orbit_; }
    [[nodiscard]] double period() const noexcept { return T_; }
    [[nodiscard]] double winding() const noexcept { return orbit_.winding; }

    /// Number of sub-intervals; there are nodes() + 1 samples including z = T.
    [[nodiscard]] std::size_t nodes() const noexcept { return f_.size() - 1; }
    [[nodiscard]] double node(std::size_t i) const noexcept { return T_ * double(i) / double(nodes()); }
    [[nodiscard]] const std::vector<double>& f_samples() const noexcept { return f_; }
    [[nodiscard]] const std::vector<double>& fp_samples() const noexcept { return fp_; }

    /// f and f' at arbitrary z (periodic extension, f shifted by the winding).
    [[nodiscard]] double f(double z) const;
    [[nodiscard]] double fp(double z) const;

    /// Max over nodes of |(c^2-1) f'^2/2 + V(f) - E| / (1 + |E|).
    [[nodiscard]] double energy_drift() const;

  private:
    // Returns the local interval index and the offset z - z_i.
    [[nodiscard]] std::pair<std::size_t, double> locate(double z, double& shift) const;

    Potential potential_;
    WaveParameters params_;
    OrbitGeometry orbit_;
    double T_;
    std::vector<double> f_;
    std::vector<double> fp_;
    std::vector<double> fpp_;
};

/// Integrates the profile ODE (c^2-1) f'' + V'(f) = 0 over one period and
/// samples it at N + 1 equally spaced nodes.  Throws ProfileAccuracyError
/// when energy drift or closure exceeds 1e-8.
[[nodiscard]] WaveProfile build_profile(const Potential& p, const WaveParameters& w,
                                        std::size_t N = 1024, const WaveOptions& opt = {});

/// The profile ODE state at z = 0 together with the potential, enough to
/// regenerate P(z) by co-integration.
struct WaveSeed {
    Potential potential;
    double c2m1;
    double f0;
    double fp0;
};

enum class CoefficientSource { wave, synthetic };

/// Periodic coefficient P(z) of Hill's equation y'' + P y = nu y.
class HillCoefficient {
  public:
    using Evaluator = std::function<double(double)>;

    /// Coefficient supplied directly (test fixtures, Mathieu-type problems).
    static HillCoefficient synthetic(double T, Evaluator P);
    static HillCoefficient constant(double T, double P0);

    [[nodiscard]] double period() const noexcept { return T_; }
    [[nodiscard]] CoefficientSource source() const noexcept { return source_; }
    /// P(z), periodically extended.
    [[nodiscard]] double operator()(double z) const;
    /// Present for wave coefficients; the Hill engine integrates the profile
    /// alongside the Hill system instead of interpolating P.
    [[nodiscard]] const std::optional<WaveSeed>& seed() const noexcept { return seed_; }
    /// Wave speed for wave coefficients.
    [[nodiscard]] std::optional<double> wave_speed() const noexcept { return speed_; }
    /// max_z P(z) over a dense sample (cached at construction).
    [[nodiscard]] double max_value() const noexcept { return pmax_; }
    [[nodiscard]] double min_value() const noexcept { return pmin_; }

  private:
    friend HillCoefficient hill_coefficient(const WaveProfile& prof);
    HillCoefficient(double T, CoefficientSource src, Evaluator P, std::optional<WaveSeed> seed,
                    std::optional<double> speed);

    double T_;
    CoefficientSource source_;
    Evaluator P_;
    std::optional<WaveSeed> seed_;
    std::optional<double> speed_;
    double pmax_ = 0.0;
    double pmin_ = 0.0;
};

/// P(z) = V''(f(z)) / (c^2 - 1).
[[nodiscard]] HillCoefficient hill_coefficient(const WaveProfile& prof);

}  // namespace kghopf

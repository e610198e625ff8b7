#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "kghopf/hh_criterion.hpp"

namespace kghopf {

/// Floquet multipliers of the linearized Klein-Gordon problem at lambda.
struct MultiplierPair {
    std::complex<double> lambda;
    std::complex<double> mu1;
    std::complex<double> mu2;
    double log_abs1 = 0.0;  ///< ln|mu1|, computed without forming exp(lambda c T / (c^2-1))
    double log_abs2 = 0.0;
    std::complex<double> hill_delta;  ///< Delta^H(nu(lambda))
    std::complex<double> hill_det;    ///< det M^H(nu(lambda)), 1 up to integration error

    /// ln|mu1| ln|mu2|; zero exactly on the spectrum, symmetric in the pair.
    [[nodiscard]] double indicator() const { return log_abs1 * log_abs2; }
};

[[nodiscard]] MultiplierPair multipliers(const HillCoefficient& coef, double c, std::complex<double> lambda,
                                         const HillOptions& opt = {});

/// det(M(lambda) - mu I) from the trace and determinant identities.
[[nodiscard]] std::complex<double> evaluate_evans(const HillCoefficient& coef, double c,
                                                  std::complex<double> lambda, std::complex<double> mu,
                                                  const HillOptions& opt = {});

struct Window {
    double re_min = -1.0;
    double re_max = 1.0;
    double im_min = 0.0;
    double im_max = 1.0;
};

using Polyline = std::vector<std::complex<double>>;

struct SpectralCurves {
    Window window;
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> values;                     ///< g on the grid, row-major (ny rows of nx)
    std::vector<Polyline> segments;                 ///< zero level set of g
    std::vector<std::pair<double, double>> axis_bands;  ///< beta intervals of spectrum on the axis
    std::size_t skipped_cells = 0;                  ///< cells with a non-finite corner
    bool axis_on_grid = false;                      ///< a grid column sits on Re lambda = 0

    [[nodiscard]] double dx() const { return (window.re_max - window.re_min) / double(nx - 1); }
    [[nodiscard]] double dy() const { return (window.im_max - window.im_min) / double(ny - 1); }
    [[nodiscard]] double value(std::size_t i, std::size_t j) const { return values[j * nx + i]; }

    /// Im lambda at which polylines cross Re lambda = 0, ascending.
    [[nodiscard]] std::vector<double> axis_crossings() const;
};

/// Samples g on an nx-by-ny grid and extracts {g = 0} by marching squares.
/// axis_bands comes from the 1-D Hill band structure pulled back to i R.
[[nodiscard]] SpectralCurves trace_spectrum(const HillCoefficient& coef, double c, const Window& window,
                                            std::size_t nx, std::size_t ny, const HillOptions& opt = {});

/// Marching squares on a precomputed row-major grid; exposed for testing.
[[nodiscard]] std::vector<Polyline> extract_zero_set(const std::vector<double>& values, std::size_t nx,
                                                     std::size_t ny, const Window& window,
                                                     std::size_t* skipped = nullptr);

/// Axis bands of the 1-D Hill spectrum, as beta intervals clipped to [im_lo, im_hi].
[[nodiscard]] std::vector<std::pair<double, double>> axis_bands_from_hill(const BandStructure& bands, double c,
                                                                          double im_lo, double im_hi);

/// Axis bands read off the multipliers directly: lambda = i beta is in the
/// spectrum when both |ln|mu|| fall below tol.  Sampled at n points.
[[nodiscard]] std::vector<std::pair<double, double>> axis_bands_from_multipliers(
    const HillCoefficient& coef, double c, double im_lo, double im_hi, std::size_t n, double tol = 1e-6,
    const HillOptions& opt = {});

enum class ProbeResult { unstable_nearby, stable_nearby, indeterminate };
[[nodiscard]] std::string to_string(ProbeResult r);

struct OffAxisProbe {
    ProbeResult result = ProbeResult::indeterminate;
    double g_min = 0.0;
    double g_max = 0.0;
};

/// Looks for a sign change of g on the open right half of the circle
/// |lambda - i beta| = radius.  radius <= 0 selects 1e-2 (1 + beta).
[[nodiscard]] OffAxisProbe off_axis_probe(const HillCoefficient& coef, double c, double beta, double radius = 0.0,
                                          std::size_t samples = 64, const HillOptions& opt = {});
[[nodiscard]] OffAxisProbe off_axis_probe(const HillCoefficient& coef, double c, const HHPoint& point,
                                          double radius = 0.0, std::size_t samples = 64, const HillOptions& opt = {});

}  // namespace kghopf

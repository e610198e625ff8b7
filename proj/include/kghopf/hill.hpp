#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "kghopf/waveform.hpp"

namespace kghopf {

struct HillOptions {
    double rtol = 1e-12;
    double atol = 1e-13;
};

/// Hill monodromy matrix [[y1, y2], [y1', y2']] at z = T together with its
/// first two nu-derivatives.  Entries are stored row-major.
template <class Scalar>
struct MonodromyResult {
    Scalar nu{};
    std::array<Scalar, 4> M{};
    std::array<Scalar, 4> dM{};
    std::array<Scalar, 4> d2M{};
    Scalar delta{};
    Scalar delta_nu{};
    Scalar delta_nunu{};

    [[nodiscard]] Scalar det() const { return M[0] * M[3] - M[1] * M[2]; }
    /// Delta^2 - 4 evaluated as (M11 - M22)^2 + 4 M12 M21, which stays
    /// accurate near double points where M is close to +-I.
    [[nodiscard]] Scalar disc() const { return (M[0] - M[3]) * (M[0] - M[3]) + Scalar(4) * M[1] * M[2]; }
};

using RealMonodromy = MonodromyResult<double>;
using ComplexMonodromy = MonodromyResult<std::complex<double>>;

/// Integrates y'' + P y = nu y with the canonical initial conditions and the
/// first and second variational equations in nu.  Real nu stays in real
/// arithmetic.
[[nodiscard]] RealMonodromy monodromy(const HillCoefficient& coef, double nu, const HillOptions& opt = {});
[[nodiscard]] ComplexMonodromy monodromy(const HillCoefficient& coef, std::complex<double> nu,
                                         const HillOptions& opt = {});

/// Monodromy entries only (no nu-derivatives); the inner loop of 2-D sweeps.
[[nodiscard]] std::array<std::complex<double>, 4> monodromy_matrix(const HillCoefficient& coef,
                                                                   std::complex<double> nu,
                                                                   const HillOptions& opt = {});

struct Discriminant {
    double delta = 0.0;
    double delta_nu = 0.0;
    double delta_nunu = 0.0;
    double disc = 0.0;  ///< delta^2 - 4, cancellation-free
};

[[nodiscard]] Discriminant discriminant(const HillCoefficient& coef, double nu, const HillOptions& opt = {});

enum class EdgeKind { periodic, antiperiodic, scan_boundary };
enum class Multiplicity { simple, double_point, none };

struct BandEdge {
    double nu = 0.0;
    EdgeKind kind = EdgeKind::scan_boundary;
    Multiplicity multiplicity = Multiplicity::none;
    Discriminant values;
};

/// Closed interval of the Hill spectrum on which Delta runs monotonically
/// between -2 and 2.  Adjacent bands touch at double points.
struct Band {
    BandEdge lower;
    BandEdge upper;
    [[nodiscard]] double width() const { return upper.nu - lower.nu; }
    [[nodiscard]] bool contains(double nu, double tol = 0.0) const {
        return nu >= lower.nu - tol && nu <= upper.nu + tol;
    }
};

/// Open interval where |Delta| > 2.
struct Gap {
    double lo = 0.0;
    double hi = 0.0;
    bool truncated = false;  ///< lower end is the scan boundary
    double critical_nu = 0.0;
};

struct BandOptions {
    /// Scan step in sqrt(|nu|), as a fraction of pi / T.
    double step_fraction = 1.0 / 16.0;
    double root_tol = 1e-12;
    /// Critical points with |Delta^2 - 4| below this are double points.
    double double_tol = 1e-7;
    HillOptions hill;
};

struct BandStructure {
    std::vector<Band> bands;  ///< ascending in nu
    std::vector<Gap> gaps;    ///< ascending, all below nu_max
    double nu_max = 0.0;
    double nu_min_scanned = 0.0;
    double nu_max_scanned = 0.0;
    std::vector<double> critical_points;  ///< zeros of Delta_nu found in the window

    /// Index of the band containing nu (closed, with tolerance), if any.
    [[nodiscard]] std::optional<std::size_t> band_containing(double nu, double tol = 1e-12) const;
    [[nodiscard]] std::vector<BandEdge> simple_edges() const;
    [[nodiscard]] std::vector<BandEdge> double_points() const;
};

/// Nodes uniform in sign(nu) sqrt(|nu|) covering [nu_lo, nu_hi].
[[nodiscard]] std::vector<double> sqrt_grid(double nu_lo, double nu_hi, double step);

/// Locates all band edges in [nu_min, max P + 1].  Throws ScanResolutionError
/// when consecutive critical values of Delta fail to alternate in sign,
/// which means the grid skipped an oscillation.
[[nodiscard]] BandStructure band_structure(const HillCoefficient& coef, double nu_min,
                                           const BandOptions& opt = {});

}  // namespace kghopf

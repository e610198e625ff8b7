#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "kghopf/hill.hpp"

namespace kghopf {

/// nu(lambda) = (lambda / (c^2 - 1))^2.
[[nodiscard]] std::complex<double> nu_of_lambda(std::complex<double> lambda, double c);

/// Upper-half-axis preimage i |c^2 - 1| sqrt(-nu) of a negative nu.
[[nodiscard]] std::complex<double> lambda_of_nu(double nu, double c);

struct CriterionOptions {
    /// |Delta_nu| <= crit_tol (1 + |nu|) marks a critical point of Delta.
    double crit_tol = 1e-7;
    /// ... and |Delta^2 - 4| <= double_tol additionally marks a double point.
    double double_tol = 1e-7;
    HillOptions hill;
};

enum class FKind { finite, plus_infinity, minus_infinity };

/// F(nu) = -c^2 T^2 (4 - Delta^2) / (4 Delta_nu^2), extended by +-infinity at
/// critical points and by continuity at double points.
struct ExtendedFValue {
    double nu = 0.0;
    FKind kind = FKind::finite;
    double value = 0.0;  ///< meaningful when kind == finite
    bool regularized = false;

    /// F(nu) - nu with infinities propagated.
    [[nodiscard]] double excess() const;
    /// tanh(F(nu) - nu), continuous in nu; +-1 at infinite F.
    [[nodiscard]] double g() const;
};

[[nodiscard]] std::string to_string(const ExtendedFValue& v);

/// Pure evaluation from precomputed discriminant data.
[[nodiscard]] ExtendedFValue extended_F(const Discriminant& d, double nu, double T, double c,
                                        const CriterionOptions& opt = {});
[[nodiscard]] ExtendedFValue extended_F(const HillCoefficient& coef, double c, double nu,
                                        const CriterionOptions& opt = {});

/// Local expansion data of the two Floquet multipliers at lambda = i beta.
struct TransversalityData {
    double t0 = 0.0;
    double t1 = 0.0;
    double theta0 = 0.0;
    double delta_plus = 0.0;
    double delta_minus = 0.0;
    bool double_point = false;
    double t2 = 0.0;
    double delta_hat_plus = 0.0;
    double delta_hat_minus = 0.0;

    /// min |delta_pm| (or min |delta_hat_pm| at a double point).
    [[nodiscard]] double min_abs() const;
};

[[nodiscard]] TransversalityData transversality(const Discriminant& d, double nu, double T, double c);
[[nodiscard]] TransversalityData transversality(const HillCoefficient& coef, double c, double nu,
                                                const CriterionOptions& opt = {});

/// A root of F(nu) - nu on the negative axis: a dynamical Hamiltonian-Hopf point.
struct HHPoint {
    double nu_star = 0.0;
    double beta = 0.0;
    std::size_t band_index = 0;
    double residual = 0.0;
    TransversalityData trans;
};

struct ScanOptions {
    /// Grid step in sqrt(-nu), as a fraction of pi / T.
    double step_fraction = 1.0 / 16.0;
    /// Stop refining once |F - nu| <= residual_tol (1 + |nu|).
    double residual_tol = 1e-9;
    /// Runs of G saturated at +1 (gap-like stretches) longer than this many
    /// nodes produce a warning.
    std::size_t saturation_run = 8;
    CriterionOptions criterion;
};

struct HHScan {
    std::vector<HHPoint> points;  ///< ascending in nu
    std::vector<std::string> warnings;
    std::size_t evaluations = 0;
};

/// Brackets sign changes of tanh(F - nu) over [bands.nu_min_scanned, 0) on a
/// grid uniform in sqrt(-nu), augmented with every band edge and gap
/// critical point, then refines each root.  Tangential roots are invisible.
[[nodiscard]] HHScan scan_hh_points(const HillCoefficient& coef, double c, const BandStructure& bands,
                                    const ScanOptions& opt = {});

/// Default scan depth -(40 / T)^2.
[[nodiscard]] double default_nu_min(double T);

struct Indices {
    int gamma_M = 0;
    int gamma_P = 0;
    double delta_at_0 = 0.0;
    double delta_nu_at_0 = 0.0;
    double delta_nunu_at_0 = 0.0;
    int evans_curvature_sign = 0;  ///< sgn(c^2 T^2 - Delta_nu(0)) = sgn D_lambda_lambda(0, 1)
    bool degenerate = false;       ///< Delta_nu(0) = c^2 T^2 within tolerance
    bool gamma_M_zero = false;     ///< Delta_nu(0) = 0 within tolerance
};

/// Throws NotAWaveError when |Delta(0) - 2| > 1e-6.
[[nodiscard]] Indices compute_indices(const HillCoefficient& coef, double c, const CriterionOptions& opt = {});

/// Pure sign arithmetic behind compute_indices.
[[nodiscard]] Indices indices_from(double delta0, double delta_nu0, double delta_nunu0, double T, double c,
                                   const CriterionOptions& opt = {});

enum class Outcome { not_fired, satisfied, violated, inconclusive };
[[nodiscard]] std::string to_string(Outcome o);

struct GapCheck {
    Gap gap;
    std::size_t hh_below = 0;  ///< HH points in the band just below the gap
    std::size_t hh_above = 0;
    Outcome outcome = Outcome::not_fired;
};

struct CorollaryReport {
    Outcome c2 = Outcome::not_fired;  ///< gamma_M gamma_P = -1  =>  HH point exists
    Outcome c3 = Outcome::not_fired;  ///< gamma_M gamma_P = +1, negative gap, c^2 > 1  =>  HH point exists
    Outcome c4 = Outcome::not_fired;  ///< c^2 > 1  =>  two HH points around each deep open gap
    std::vector<GapCheck> gaps;
    double c4_depth = 0.0;

    [[nodiscard]] bool consistent() const;
};

/// Gaps whose upper end lies at or below c4_depth are held to the
/// two-points-per-gap prediction; shallower gaps are reported inconclusive.
[[nodiscard]] CorollaryReport corollary_report(const Indices& idx, const BandStructure& bands, double c,
                                               const std::vector<HHPoint>& hh, double c4_depth);

/// Default depth for the gap prediction: -(4 pi / T)^2.
[[nodiscard]] double default_c4_depth(double T);

struct AsymptoticProbe {
    double nu = 0.0;
    bool accepted = false;  ///< |sin(T sqrt(-nu))| > 0.3
    double ratio = 0.0;     ///< (F - nu) / ((c^2 - 1) nu)
    double excess = 0.0;    ///< F - nu
};

[[nodiscard]] std::vector<AsymptoticProbe> asymptotic_check(const HillCoefficient& coef, double c,
                                                            const std::vector<double>& probes,
                                                            const CriterionOptions& opt = {});

struct SmallNuCheck {
    /// 1: Delta_nu(0) != 0, compares slopes of F - nu at 0-.
    /// 2: Delta_nu(0) == 0, compares the limit F(0-) = c^2 T^2 / (2 Delta_nunu(0)).
    int branch = 1;
    double predicted = 0.0;
    double measured = 0.0;
    [[nodiscard]] double relative_error() const;
};

/// Throws InconsistentTheoryError when Delta_nu(0) = 0 and Delta_nunu(0) >= 0.
[[nodiscard]] SmallNuCheck small_nu_check(const HillCoefficient& coef, double c, const CriterionOptions& opt = {});

}  // namespace kghopf

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kghopf/spectrum2d.hpp"

namespace kghopf::cli {

enum class Format { csv, json };

/// Everything a run needs.  Unset optionals are filled from the wave once
/// its period is known.
struct RunConfig {
    std::string potential = "sine_gordon";
    Potential::Params potential_params;
    double c = 0.0;
    double E = 0.0;
    std::optional<double> well;
    std::size_t nodes = 1024;

    std::optional<double> nu_min;  ///< default -(40 / T)^2
    double scan_step = 1.0 / 16.0; ///< fraction of pi / T in sqrt(-nu)
    std::optional<double> c4_depth;  ///< default -(4 pi / T)^2

    std::optional<Window> window;  ///< default: re in [-w, w], im in [0, beta_max]
    std::size_t nx = 256;
    std::size_t ny = 256;

    std::size_t curve_samples = 2000;

    std::filesystem::path out_dir = ".";
    std::optional<Format> format;  ///< default: json for analyze, csv for curve
    unsigned threads = 0;

    /// Throws ConfigError on non-finite values, c^2 = 1 or grids below 64.
    void validate() const;
};

/// Parses the INI-style config: sections [wave], [potential], [hill],
/// [criterion], [spectrum], [curve], [output].
[[nodiscard]] RunConfig parse_config(std::istream& in);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// The config rendered back in the same format; unset optionals are left out.
[[nodiscard]] std::string echo_config(const RunConfig& cfg);

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kConsistencyError = 2;
inline constexpr int kNumericalError = 3;

/// Fixed 17-significant-digit, locale-free formatting.
[[nodiscard]] std::string format_number(double x);

/// Runs waveform -> hill -> criterion and returns the report as JSON text.
/// consistent is cleared when a corollary or exclusion check fails.
struct AnalysisOutput {
    std::string json;
    bool consistent = true;
    std::string bands_csv;
    std::string hh_csv;
};
[[nodiscard]] AnalysisOutput analyze(const RunConfig& cfg);

/// beta,nu,F,kind table on the grid beta_k = k beta_max / n, k = 1..n, where
/// beta_max = |c^2 - 1| sqrt(-nu_min).
[[nodiscard]] std::string curve_csv(const RunConfig& cfg);
[[nodiscard]] std::string curve_csv(const HillCoefficient& coef, double c, double nu_min, std::size_t samples);

struct SpectrumOutput {
    std::string axis_bands_csv;
    std::string curves_json;
};
[[nodiscard]] SpectrumOutput spectrum(const RunConfig& cfg);

/// Tolerance multipliers per selftest row name; a factor below 1 tightens
/// the row (used to check that failures are reported).
struct SelftestHooks {
    std::vector<std::pair<std::string, double>> tolerance_scale;
};

struct SelftestRow {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

[[nodiscard]] std::vector<SelftestRow> selftest(const SelftestHooks& hooks = {});
[[nodiscard]] std::string format_selftest(const std::vector<SelftestRow>& rows);

/// Subcommand entry points; write files under cfg.out_dir and return an exit code.
int cmd_analyze(const RunConfig& cfg, std::ostream& log);
int cmd_curve(const RunConfig& cfg, std::ostream& log);
int cmd_spectrum(const RunConfig& cfg, std::ostream& log);
int cmd_selftest(std::ostream& out, const SelftestHooks& hooks = {});

/// Full command line front end (argv[0] is the program name).
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace kghopf::cli

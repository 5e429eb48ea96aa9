#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crw/bounds.hpp"
#include "crw/graph.hpp"
#include "crw/simulate.hpp"

namespace crw {

// ---------------------------------------------------------------------------
// Scaling fits

enum class ScalingModel {
    /// T ~ n^a: least squares of ln T on ln n.
    power,
    /// T ~ n ln n: spread of T / (n ln n).
    nlogn,
    /// T ~ ln n: spread of T / ln n.
    log,
};

std::string_view to_string(ScalingModel m) noexcept;
ScalingModel scaling_model_from_string(std::string_view s);

struct ScalingFit {
    ScalingModel model = ScalingModel::power;
    /// Power model: slope of ln T on ln n. Otherwise the slope of
    /// ln(T / model(n)) on ln n, i.e. the residual drift (0 for a perfect fit).
    double exponent = 0.0;
    double stderr_ = 0.0;
    double r_squared = 0.0;
    /// Extremes of T / model(n); for the power model model(n) = n^exponent.
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    std::size_t points = 0;

    double ratio_spread() const noexcept { return ratio_min > 0.0 ? ratio_max / ratio_min : 0.0; }
};

/// Needs at least 4 points with n > 1 and value > 0 (InsufficientPoints).
ScalingFit fit_scaling(std::span<const std::pair<double, double>> series, ScalingModel model);

// ---------------------------------------------------------------------------
// Batch runs

/// Quantities an experiment can request, named as in the CSV `quantity` column.
///   exact:  t_hit t_meet t_meet_pi t_mix t_sep lambda2 collision
///   Monte Carlo: t_coal voter t_meet_mc
/// "exact" and "all" expand to the groups; unknown names raise ConfigError.
std::vector<std::string> expand_quantities(std::span<const std::string> names);

bool is_monte_carlo(std::string_view quantity) noexcept;

struct Sweep {
    /// Family plus fixed parameters (dim, degree, alpha, ...).
    FamilySpec base;
    /// Strictly increasing values of the family's size knob.
    std::vector<std::size_t> sizes;
    ScalingModel model = ScalingModel::power;
};

struct ExperimentConfig {
    std::optional<std::uint64_t> seed;
    std::size_t trials = 200;
    /// 0 selects the default cap 50 n^3.
    Steps cap = 0;
    std::vector<std::string> quantities{"exact"};
    std::filesystem::path output = "crw-out";
    std::vector<Sweep> sweeps;
    /// Write files; when false run() only returns the results.
    bool write = true;

    /// Throws ConfigError on an invalid combination.
    void validate() const;
};

/// INI-style text:
///
///   [experiment]
///   seed = 7
///   trials = 500
///   quantities = exact, t_coal
///   output = out/cycle
///
///   [sweep cycle]
///   family = cycle
///   sizes = 16, 32, 64
///
/// Each section whose name starts with "sweep" adds one sweep; keys other
/// than family/sizes fill FamilySpec (dim, degree, alpha, alpha_floor) or
/// select the fit model (model = power | nlogn | log).
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct PointResult {
    FamilySpec spec;
    std::size_t n = 0;
    std::size_t m = 0;
    std::uint64_t graph_seed = 0;
    MeasuredQuantities measured;
    /// lower_bound family only: realised spectrum of the expander block.
    std::optional<ExpanderSpectrum> expander;
    /// Monte Carlo estimates keyed by quantity name, with the master seed used.
    std::map<std::string, std::pair<Estimate, std::uint64_t>> estimates;
    BoundReport bounds;

    std::string to_json() const;
};

struct FitResult {
    std::string family;
    std::string quantity;
    ScalingFit fit;
};

struct RunResult {
    std::vector<PointResult> points;
    std::vector<FitResult> fits;
    /// Header family,n,m,quantity,value,stderr,trials,censored,seed.
    std::string csv;
    std::string fits_csv;
    std::size_t explicit_failures = 0;

    int exit_code() const noexcept { return explicit_failures == 0 ? 0 : 2; }
};

/// Runs every (sweep, size) point in order. With config.write set, writes one
/// JSON record per point, results.csv and (when fits exist) fits.csv under
/// config.output; each file is written to a temporary name and renamed.
RunResult run(const ExperimentConfig& config);

/// Quantity values of one point, as CSV rows in a fixed order.
std::string csv_rows(const PointResult& p);

inline constexpr std::string_view kCsvHeader =
    "family,n,m,quantity,value,stderr,trials,censored,seed";

/// Writes `content` to `path` via a sibling temporary file and rename.
void write_atomic(const std::filesystem::path& path, std::string_view content);

} // namespace crw

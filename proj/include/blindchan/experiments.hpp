#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "blindchan/ofdm.hpp"

namespace blindchan {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class EstimatorKind { blind, pilot, blind_nearby_init };

std::string_view to_string(EstimatorKind e);
EstimatorKind parse_estimator(std::string_view s);

/// One BER curve: a fixed estimator, correlation and forgetting factor swept
/// over an SNR grid.
struct Scenario {
    std::string name = "custom";  // main_channel | nearby_assisted | forgetting_sweep | custom
    OfdmConfig cfg;
    double rho = 1.0;
    double ff = 0.98;
    std::vector<double> snr_grid_db = {0, 4, 8, 12, 16, 20};
    int trials = 100;
    std::uint64_t seed = 2019;
    EstimatorKind estimator = EstimatorKind::blind_nearby_init;

    std::vector<double> pdp = {0.2, 0.2, 0.2, 0.2, 0.2};
    int payload_bits = 10240;        // per trial, rounded up to whole blocks
    int ambiguity_pilots = 4;        // pilot blocks on the main channel fixing alpha
    bool perfect_csi = false;        // equalize with the true channel
    bool noiseless_nearby_pilots = false;
    int workers = 0;                 // 0 = hardware concurrency

    /// Throws ConfigError.
    void validate() const;
};

struct BerPoint {
    double snr_db = 0.0;
    std::int64_t bits = 0;
    std::int64_t bit_errors = 0;
    double ber = 0.0;        // NaN when every trial was invalid
    double mean_nmse = 0.0;  // over valid trials
    int invalid_trials = 0;
};

struct Curve {
    Scenario scenario;
    std::vector<BerPoint> points;
};

/// A named set of curves (one figure).
struct Experiment {
    std::string preset;
    std::vector<Scenario> curves;
};

/// Per-trial seed: splitmix64(seed ^ splitmix64(trial)). Independent of the
/// SNR point and the estimator, so every curve of a figure sees the same
/// channel realizations.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

struct TrialResult {
    std::int64_t bits = 0;
    std::int64_t bit_errors = 0;
    double nmse = 0.0;
    bool valid = true;
};

/// One end-to-end trial at a single SNR.
TrialResult run_trial(const Scenario& s, double snr_db, int trial);

std::vector<BerPoint> run_scenario(const Scenario& s);
std::vector<Curve> run_experiment(const Experiment& e);

Experiment scenario_fig12();
Experiment scenario_fig13();
Experiment scenario_fig14();
/// fig12 | fig13 | fig14 | custom (a single curve with defaults).
Experiment preset(std::string_view name);

/// key = value assignment shared by config files and CLI overrides.
void apply_setting(Scenario& s, std::string_view key, std::string_view value);
/// Parses "LO:STEP:HI" (inclusive) or a comma list.
std::vector<double> parse_snr_grid(std::string_view spec);

/// Flat key/value text; '#' starts a comment. Returns pairs in file order.
std::vector<std::pair<std::string, std::string>> read_config(const std::filesystem::path& path);
std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in);

inline constexpr std::string_view kCsvHeader =
    "scenario,estimator,rho,ff,seed,snr_db,bits,bit_errors,ber,mean_nmse,invalid_trials";

std::string format_csv(const std::vector<Curve>& curves);
void write_csv(const std::vector<Curve>& curves, const std::filesystem::path& path);
void write_csv(const std::vector<BerPoint>& points, const Scenario& meta,
               const std::filesystem::path& path);

struct CsvRow {
    std::string scenario;
    std::string estimator;
    double rho = 0.0;
    double ff = 0.0;
    std::uint64_t seed = 0;
    BerPoint point;
};

std::vector<CsvRow> parse_csv(std::istream& in);
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

}  // namespace blindchan

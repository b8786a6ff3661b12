#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hsps/dispersion.hpp"
#include "hsps/heralding.hpp"
#include "hsps/jsa.hpp"
#include "hsps/multiplexing.hpp"
#include "hsps/poling.hpp"
#include "hsps/purity.hpp"

namespace hsps::config {

struct CrystalConfig {
    double length = 2.0e-3;
    double period = 29.4e-6;
    int qpm_order = 1;
    double chi2_eff = 4.6e-12;
    double efficiency = 1.0;
    AxisMapping axes;
    std::string dispersion_model = "ktp_kw_fradkin";
    std::optional<double> temperature;
};

struct BeamsConfig {
    BeamGeometry::Kind kind = BeamGeometry::Kind::focal;
    std::array<double, 3> values{0.55, 0.55, 0.55};  // pump, signal, idler
};

struct GridConfig {
    std::size_t points = 512;
    double span_fwhm = 3.0;
};

struct FiltersConfig {
    FilterSpec::Shape shape = FilterSpec::Shape::gaussian;
    std::optional<double> signal_center;  // m; unset: matched signal wavelength
    std::optional<double> idler_center;
    std::vector<double> fwhm_values;      // m
    double threshold = 0.9;
    bool resample = true;
    std::size_t resample_points = 256;
    double gaussian_span = 6.0;
};

struct HeraldingConfig {
    double lambda_min = 900e-9;
    double lambda_max = 950e-9;
    std::size_t points = 51;
    std::vector<double> focal_values;  // xi list for both focal scans
    FocalMode focal_mode = FocalMode::symmetric;
    FocalTriples jsi_triples = FocalTriples::constrained;
    std::size_t jsi_grid_points = 96;
    double jsi_span_fwhm = 1.0;
};

struct PolingConfig {
    double sigma_fraction = 0.125;
    TargetScaling scaling = TargetScaling::end_amplitude;
    std::size_t grid_points = 256;
    double pump_span = 3.0;
    std::string structure_file;  // evaluate reads this; empty: optimize in place
    double pmf_half_width = 60000.0;  // rad/m
    std::size_t pmf_points = 4001;
    std::vector<double> landscape_pump_fwhm;  // m
    std::vector<double> landscape_length;     // m
};

struct FitConfig {
    std::string kind = "multiplexed";  // or "loop_loss"
    std::string data_file;
    MultiplexFitOptions options;
};

struct MultiplexConfig {
    MultiplexParams params;
    ChannelEfficiencies channels;
    MultiplexModel model = MultiplexModel::work_zone;
    int n_min = 1;
    int n_max = 100;
    std::uint64_t trials = 1000000;
    std::uint64_t seed = 20240611;
    FitConfig fit;

    /// Fit options with model, dead bins and seed taken from this section.
    MultiplexFitOptions fit_options() const;
};

struct IoConfig {
    std::string out_dir = "out";
    bool complex_jsa = false;  // also write Re/Im of psi
};

/// Parsed dispersion set as given in the file, kept for serialization.
struct DispersionEntry {
    std::string source;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    std::map<std::string, AxisDispersion> axes;
};

struct RunConfig {
    std::map<std::string, DispersionEntry> dispersion_models;  // user sets; built-ins are implicit
    CrystalConfig crystal;
    PumpSpec pump;
    BeamsConfig beams;
    GridConfig grid;
    FiltersConfig filters;
    HeraldingConfig heralding;
    PolingConfig poling;
    MultiplexConfig multiplex;
    IoConfig io;
    std::map<std::string, MultiplexParams> presets;  // named multiplex parameter sets

    /// Experimental defaults everywhere.
    static RunConfig defaults();

    CrystalSpec crystal_spec() const;
    BeamGeometry beam_geometry() const;
    /// Throws ConfigError naming the offending section and key.
    void validate() const;
};

/// Built-in presets, always available to `multiplex.preset`.
std::map<std::string, MultiplexParams> builtin_presets();
std::shared_ptr<const DispersionModel> builtin_dispersion(std::string_view name);

/// JSON with // and /* */ comments. Missing keys keep their defaults; unknown keys are rejected.
RunConfig parse(std::string_view text);
RunConfig load(const std::string& path);

/// Canonical JSON of every resolved value; parse(serialize(c)) reproduces c.
std::string serialize(const RunConfig& cfg);

}  // namespace hsps::config

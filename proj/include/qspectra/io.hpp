#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qspectra/classical.hpp"
#include "qspectra/estimation.hpp"
#include "qspectra/model_params.hpp"
#include "qspectra/scattering.hpp"
#include "qspectra/spectrum.hpp"
#include "qspectra/squid.hpp"

namespace qspectra::io {

using json = nlohmann::json;

// Every JSON document written carries this; readers accept any 1.x.
inline constexpr std::string_view schema_version = "1.0";

// Throws std::invalid_argument unless doc["schema_version"] has major 1.
void check_schema_version(const json& doc);

struct GridSpec
{
    Frequency start = 0.0;
    Frequency stop = 0.0;
    std::size_t n_points = 0;

    std::vector<Frequency> points() const { return make_frequency_grid(start, stop, n_points); }
    bool operator==(const GridSpec&) const = default;
};

// "start:stop:n". Throws std::invalid_argument on bad syntax or an empty range.
GridSpec parse_grid(std::string_view text);

struct NoiseSpec
{
    double sigma = 0.0;
    std::uint64_t seed = 0;
    bool operator==(const NoiseSpec&) const = default;
};

struct RunConfig
{
    std::optional<ModelKind> model;
    ModelParams params;
    std::optional<GridSpec> grid;
    std::optional<NoiseSpec> noise;
    std::string output;             // CSV path
    std::optional<std::string> svg; // optional plot path

    // Throws MissingParameter naming the first unset field, or
    // std::invalid_argument for other problems.
    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

json params_to_json(const ModelParams& p);
// Rejects unknown keys and non-numeric values.
ModelParams params_from_json(const json& j);

json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const json& j);
// Parse a JSON config file; throws IoError if unreadable.
RunConfig load_config_file(const std::filesystem::path& path);

// Spectrum CSV: '#' comment lines, then
// omega,T,phase_rad,re_t,im_t with 9 significant digits. Spectra without
// complex amplitudes write nan for re_t and im_t.
void write_spectrum_csv(std::ostream& os, const Spectrum& s, const std::vector<std::string>& comments);
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s,
                        const std::vector<std::string>& comments);

struct SpectrumFile
{
    Spectrum spectrum;
    std::vector<std::string> comments; // without the leading '#'
    std::optional<json> config;        // from a "config {...}" comment, if any
};

// Throws std::invalid_argument for malformed content, IoError if unreadable.
SpectrumFile read_spectrum_csv(std::istream& is);
SpectrumFile read_spectrum_csv(const std::filesystem::path& path);

// Classical oscillator response table:
// omega,amplitude_m,phase_rad,psd_m2s with 9 significant digits.
void write_classical_csv(std::ostream& os, const std::vector<Frequency>& grid, const classical::HOParams& p,
                         const std::vector<std::string>& comments);

json estimate_to_json(const Estimate& e);
json report_to_json(const EstimationReport& r);

json circuit_to_json(const squid::CircuitSpec& c);
json squid_summary_to_json(const squid::CircuitSpec& c, const squid::EigenSolution& sol,
                           const squid::TruncationReport& trunc);

// Write text to a file, replacing it; throws IoError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

} // namespace qspectra::io

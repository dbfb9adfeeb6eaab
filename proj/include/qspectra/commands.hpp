#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qspectra/estimation.hpp"
#include "qspectra/io.hpp"
#include "qspectra/squid.hpp"

namespace qspectra::cli {

// Worker budget: QSPECTRA_THREADS if set to a positive integer, otherwise
// the hardware concurrency (at least 1).
std::size_t thread_budget();

// Synthesize (plus optional noise) per cfg; cfg must already validate.
Spectrum make_spectrum(const io::RunConfig& cfg, std::size_t threads);

// Writes cfg.output (CSV) and cfg.svg if set.
void run_spectrum(const io::RunConfig& cfg);

struct EstimateOptions
{
    std::filesystem::path input;
    EstimateHints hints;
    std::optional<std::filesystem::path> output; // stdout when unset
};

// Returns the report that was written.
io::json run_estimate(const EstimateOptions& opts, std::ostream& out);

struct SquidOptions
{
    squid::CircuitSpec circuit;
    std::size_t n_states = 2;
    std::optional<std::filesystem::path> json_out; // stdout when unset
    std::optional<std::filesystem::path> csv_out;
    std::optional<std::filesystem::path> svg_out;
    std::vector<std::string> comments;
};

io::json run_squid(const SquidOptions& opts, std::ostream& out);

struct SweepOptions
{
    io::RunConfig base;
    Param param = Param::g_Q;
    io::GridSpec values; // start:stop:n over the swept parameter
    std::filesystem::path output;
};

// One CSV with a leading param_value column; rows ordered by parameter
// value then frequency regardless of thread count.
void run_sweep(const SweepOptions& opts);

// Names of the figure presets, in order.
std::vector<std::string> figure_names();

// Regenerate the data files (and SVGs) for one preset or "all" into dir.
// Returns the paths written.
std::vector<std::filesystem::path> run_figures(const std::string& which, const std::filesystem::path& dir);

} // namespace qspectra::cli

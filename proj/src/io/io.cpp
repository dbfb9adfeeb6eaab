#include "qspectra/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qspectra/errors.hpp"

namespace qspectra::io {

namespace {

double parse_double(std::string_view text, std::string_view what)
{
    const std::string s(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
        throw std::invalid_argument(std::string(what) + ": cannot parse '" + s + "' as a number");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = text.find(sep, pos);
        out.push_back(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) {
            return out;
        }
        pos = next + 1;
    }
}

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string sci(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.8e", v);
    return buf;
}

double number_field(const json& j, const char* key)
{
    if (!j.contains(key)) {
        throw MissingParameter(key);
    }
    if (!j.at(key).is_number()) {
        throw std::invalid_argument(std::string("field '") + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

} // namespace

void check_schema_version(const json& doc)
{
    if (!doc.is_object() || !doc.contains("schema_version") || !doc.at("schema_version").is_string()) {
        throw std::invalid_argument("document has no schema_version");
    }
    const auto v = doc.at("schema_version").get<std::string>();
    const auto major = v.substr(0, v.find('.'));
    if (major != schema_version.substr(0, schema_version.find('.'))) {
        throw std::invalid_argument("unsupported schema_version " + v);
    }
}

GridSpec parse_grid(std::string_view text)
{
    const auto parts = split(text, ':');
    if (parts.size() != 3) {
        throw std::invalid_argument("grid must be start:stop:n, got '" + std::string(text) + "'");
    }
    GridSpec g;
    g.start = parse_double(parts[0], "grid start");
    g.stop = parse_double(parts[1], "grid stop");
    std::size_t n = 0;
    const auto np = parts[2];
    const auto [ptr, ec] = std::from_chars(np.data(), np.data() + np.size(), n);
    if (ec != std::errc{} || ptr != np.data() + np.size()) {
        throw std::invalid_argument("grid point count must be a positive integer, got '" + std::string(np) + "'");
    }
    g.n_points = n;
    if (!(g.start < g.stop) || n < 2) {
        throw std::invalid_argument("grid needs start < stop and at least 2 points");
    }
    return g;
}

void RunConfig::validate() const
{
    if (!model) {
        throw MissingParameter("model");
    }
    params.validate();
    check_params(*model, params);
    if (!grid) {
        throw MissingParameter("grid");
    }
    if (!(grid->start < grid->stop) || grid->n_points < 2) {
        throw std::invalid_argument("grid needs start < stop and at least 2 points");
    }
    if (noise && !(noise->sigma >= 0.0 && std::isfinite(noise->sigma))) {
        throw std::invalid_argument("noise sigma must be finite and non-negative");
    }
}

json params_to_json(const ModelParams& p)
{
    json j = json::object();
    for (Param k : all_params) {
        if (const auto& v = p.field(k)) {
            j[std::string(param_name(k))] = *v;
        }
    }
    return j;
}

ModelParams params_from_json(const json& j)
{
    if (!j.is_object()) {
        throw std::invalid_argument("params must be a JSON object");
    }
    ModelParams p;
    for (const auto& [key, value] : j.items()) {
        const auto k = param_from_name(key);
        if (!k) {
            throw std::invalid_argument("unknown parameter '" + key + "'");
        }
        if (!value.is_number()) {
            throw std::invalid_argument("parameter '" + key + "' must be a number");
        }
        p.field(*k) = value.get<double>();
    }
    return p;
}

json config_to_json(const RunConfig& cfg)
{
    json j;
    j["schema_version"] = schema_version;
    if (cfg.model) {
        j["model"] = model_name(*cfg.model);
    }
    j["params"] = params_to_json(cfg.params);
    if (cfg.grid) {
        j["grid"] = {{"start", cfg.grid->start}, {"stop", cfg.grid->stop}, {"n_points", cfg.grid->n_points}};
    }
    if (cfg.noise) {
        j["noise"] = {{"sigma", cfg.noise->sigma}, {"seed", cfg.noise->seed}};
    }
    if (!cfg.output.empty()) {
        j["output"] = cfg.output;
    }
    if (cfg.svg) {
        j["svg"] = *cfg.svg;
    }
    return j;
}

RunConfig config_from_json(const json& j)
{
    if (!j.is_object()) {
        throw std::invalid_argument("config must be a JSON object");
    }
    if (j.contains("schema_version")) {
        check_schema_version(j);
    }
    static const std::vector<std::string> known{"schema_version", "model", "params", "grid", "noise", "output", "svg"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
    RunConfig cfg;
    if (j.contains("model")) {
        const auto name = j.at("model").get<std::string>();
        cfg.model = model_from_name(name);
        if (!cfg.model) {
            throw std::invalid_argument("unknown model '" + name + "'");
        }
    }
    if (j.contains("params")) {
        cfg.params = params_from_json(j.at("params"));
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (g.is_string()) {
            cfg.grid = parse_grid(g.get<std::string>());
        } else {
            GridSpec spec;
            spec.start = number_field(g, "start");
            spec.stop = number_field(g, "stop");
            if (!g.contains("n_points") || !g.at("n_points").is_number_unsigned()) {
                throw std::invalid_argument("grid.n_points must be a non-negative integer");
            }
            spec.n_points = g.at("n_points").get<std::size_t>();
            cfg.grid = spec;
        }
    }
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        NoiseSpec spec;
        spec.sigma = number_field(n, "sigma");
        if (n.contains("seed")) {
            if (!n.at("seed").is_number_unsigned()) {
                throw std::invalid_argument("noise.seed must be a non-negative integer");
            }
            spec.seed = n.at("seed").get<std::uint64_t>();
        }
        cfg.noise = spec;
    }
    if (j.contains("output")) {
        cfg.output = j.at("output").get<std::string>();
    }
    if (j.contains("svg")) {
        cfg.svg = j.at("svg").get<std::string>();
    }
    return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path)
{
    const auto text = read_text_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

void write_spectrum_csv(std::ostream& os, const Spectrum& s, const std::vector<std::string>& comments)
{
    for (const auto& c : comments) {
        os << "# " << c << '\n';
    }
    os << "omega,T,phase_rad,re_t,im_t\n";
    const bool amps = s.has_amplitudes();
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double re = amps ? s.amplitudes()[i].real() : std::numeric_limits<double>::quiet_NaN();
        const double im = amps ? s.amplitudes()[i].imag() : std::numeric_limits<double>::quiet_NaN();
        os << sci(s.freqs()[i]) << ',' << sci(s.transmission()[i]) << ',' << sci(s.phase()[i]) << ','
           << sci(re) << ',' << sci(im) << '\n';
    }
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s,
                        const std::vector<std::string>& comments)
{
    std::ostringstream os;
    write_spectrum_csv(os, s, comments);
    write_text_file(path, os.str());
}

SpectrumFile read_spectrum_csv(std::istream& is)
{
    std::vector<std::string> comments;
    std::optional<json> config;
    std::vector<double> f, T, ph, re, im;
    bool header_seen = false;
    bool amps = true;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty()) {
            continue;
        }
        if (t.front() == '#') {
            const auto body = trim(t.substr(1));
            comments.emplace_back(body);
            if (body.starts_with("config ")) {
                try {
                    config = json::parse(body.substr(7));
                } catch (const json::parse_error&) {
                    throw std::invalid_argument("line " + std::to_string(line_no) + ": malformed config comment");
                }
            }
            continue;
        }
        if (!header_seen) {
            if (t != "omega,T,phase_rad,re_t,im_t") {
                throw std::invalid_argument("line " + std::to_string(line_no) + ": expected header omega,T,phase_rad,re_t,im_t");
            }
            header_seen = true;
            continue;
        }
        const auto cells = split(t, ',');
        if (cells.size() != 5) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 5 columns");
        }
        const std::string where = "line " + std::to_string(line_no);
        f.push_back(parse_double(trim(cells[0]), where));
        T.push_back(parse_double(trim(cells[1]), where));
        ph.push_back(parse_double(trim(cells[2]), where));
        re.push_back(parse_double(trim(cells[3]), where));
        im.push_back(parse_double(trim(cells[4]), where));
        amps = amps && std::isfinite(re.back()) && std::isfinite(im.back());
    }
    if (!header_seen || f.size() < 2) {
        throw std::invalid_argument("spectrum CSV has no data rows");
    }
    const auto build = [&]() {
        if (!amps) {
            return Spectrum::from_measurements(std::move(f), std::move(T), std::move(ph));
        }
        std::vector<std::complex<double>> t(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            t[i] = {re[i], im[i]};
        }
        return Spectrum::from_amplitudes(std::move(f), std::move(t));
    };
    SpectrumFile out{build(), std::move(comments), std::move(config)};
    return out;
}

SpectrumFile read_spectrum_csv(const std::filesystem::path& path)
{
    std::istringstream is(read_text_file(path));
    return read_spectrum_csv(is);
}

void write_classical_csv(std::ostream& os, const std::vector<Frequency>& grid, const classical::HOParams& p,
                         const std::vector<std::string>& comments)
{
    p.validate();
    for (const auto& c : comments) {
        os << "# " << c << '\n';
    }
    os << "omega,amplitude_m,phase_rad,psd_m2s\n";
    for (double w : grid) {
        os << sci(w) << ',' << sci(classical::driven_amplitude(w, p)) << ',' << sci(classical::driven_phase(w, p))
           << ',' << sci(classical::thermal_displacement_psd(w, p)) << '\n';
    }
}

json estimate_to_json(const Estimate& e)
{
    return {{"value", e.value}, {"sigma", e.sigma}};
}

json report_to_json(const EstimationReport& r)
{
    json j;
    j["schema_version"] = schema_version;
    j["model_class"] = r.model_class ? std::string(class_name(*r.model_class)) : r.status;
    j["status"] = r.status;
    const auto put = [&](const char* key, const std::optional<Estimate>& e) {
        j[key] = e ? estimate_to_json(*e) : json(nullptr);
    };
    put("omega0_est", r.omega0_est);
    put("omega_b_est", r.omega_b_est);
    put("omega_r_est", r.omega_r_est);
    put("omega_tilde_est", r.omega_tilde_est);
    put("g_est", r.g_est);
    j["g_kind"] = r.g_kind.empty() ? json(nullptr) : json(r.g_kind);
    j["phonon_n_est"] = r.phonon_n_est ? json(*r.phonon_n_est) : json(nullptr);
    j["phonon_residual"] = r.phonon_residual ? json(*r.phonon_residual) : json(nullptr);
    j["amplitude_est"] = r.amplitude_est ? json(*r.amplitude_est) : json(nullptr);
    j["amplitude_length_product"] =
        r.amplitude_length_product ? json(*r.amplitude_length_product) : json(nullptr);
    json dips = json::array();
    for (const auto& d : r.dips) {
        dips.push_back({{"center", d.center},
                        {"fwhm", d.fwhm},
                        {"depth", d.depth},
                        {"fit_residual", d.fit_residual},
                        {"center_sigma", d.center_sigma},
                        {"fitted", d.fitted}});
    }
    j["raw_features"] = {{"dips", dips}, {"unity_points", r.unity_points}};
    j["grid_step"] = r.grid_step;
    j["noise_level"] = r.noise_level;
    j["warnings"] = r.warnings;
    return j;
}

json circuit_to_json(const squid::CircuitSpec& c)
{
    return {{"C_J", c.C_J},
            {"L", c.L},
            {"I_c", c.I_c},
            {"Phi_e", c.Phi_e},
            {"grid_points", c.grid_points},
            {"flux_window", c.flux_window}};
}

json squid_summary_to_json(const squid::CircuitSpec& c, const squid::EigenSolution& sol,
                           const squid::TruncationReport& trunc)
{
    json j;
    j["schema_version"] = schema_version;
    j["circuit"] = circuit_to_json(c);
    j["energies"] = sol.energies;
    j["E0"] = sol.energies.at(0);
    j["E1"] = sol.energies.at(1);
    j["omega0"] = sol.omega0;
    j["I_p"] = sol.I_p;
    j["I_01"] = sol.I_01;
    j["I_00"] = sol.I_00;
    j["I_11"] = sol.I_11;
    j["truncation"] = {{"offdiag_ratio", trunc.offdiag_ratio},
                       {"left_mass_of_L", trunc.left_mass_of_L},
                       {"right_mass_of_R", trunc.right_mass_of_R},
                       {"overlap_LR", trunc.overlap_LR},
                       {"valid", trunc.valid}};
    return j;
}

void write_text_file(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    os.close();
    if (!os) {
        throw IoError("failed writing " + path.string());
    }
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace qspectra::io

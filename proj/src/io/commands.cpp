#include "qspectra/commands.hpp"

#include <algorithm>
#include <cctype>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <mutex>
#include <thread>

#include "qspectra/constants.hpp"
#include "qspectra/errors.hpp"
#include "qspectra/svg.hpp"

namespace qspectra::cli {

namespace {

std::string compact(const io::json& j)
{
    return j.dump();
}

svg::Figure spectrum_figure(const std::string& title, const std::vector<std::pair<std::string, Spectrum>>& curves,
                            std::vector<std::string> comments)
{
    svg::Figure fig;
    fig.title = title;
    fig.x_label = "omega (rad/s)";
    fig.comments = std::move(comments);
    svg::Panel T{"T", {}};
    svg::Panel ph{"phase (rad)", {}};
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& [label, s] = curves[i];
        T.series.push_back({label, s.freqs(), s.transmission(), svg::palette(i)});
        ph.series.push_back({label, s.freqs(), s.phase(), svg::palette(i)});
    }
    fig.panels = {std::move(T), std::move(ph)};
    return fig;
}

void write_svg(const std::filesystem::path& path, const svg::Figure& fig)
{
    io::write_text_file(path, svg::render(fig));
}

void write_squid_csv(const std::filesystem::path& path, const squid::EigenSolution& sol,
                     const std::vector<std::pair<std::string, const std::vector<double>*>>& columns,
                     const std::vector<std::string>& comments)
{
    std::ostringstream os;
    for (const auto& c : comments) {
        os << "# " << c << '\n';
    }
    os << "flux_over_phi0,U_joules";
    for (const auto& [name, _] : columns) {
        os << ',' << name;
    }
    os << '\n';
    char buf[32];
    const auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.8e", v);
        os << buf;
    };
    for (std::size_t i = 0; i < sol.flux.size(); ++i) {
        put(sol.flux[i] / constants::flux_quantum);
        os << ',';
        put(sol.potential[i]);
        for (const auto& [_, col] : columns) {
            os << ',';
            put((*col)[i]);
        }
        os << '\n';
    }
    io::write_text_file(path, os.str());
}

svg::Figure squid_figure(const std::string& title, const squid::EigenSolution& sol,
                         const std::vector<std::pair<std::string, const std::vector<double>*>>& states,
                         const std::vector<double>& levels, std::vector<std::string> comments)
{
    constexpr double unit = 1e-23;
    std::vector<double> x(sol.flux.size());
    std::vector<double> u(sol.flux.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = sol.flux[i] / constants::flux_quantum;
        u[i] = sol.potential[i] / unit;
    }
    const double e_span = levels.empty() ? 1.0 : std::max(1e-3, (levels.back() - levels.front()) / unit);
    svg::Panel overlay{"energy (1e-23 J)", {{"U", x, u, "#000000"}}};
    svg::Panel raw{"psi (1/sqrt(Wb))", {}};
    for (std::size_t k = 0; k < states.size(); ++k) {
        const auto& psi = *states[k].second;
        const double peak = *std::max_element(psi.begin(), psi.end(),
                                              [](double a, double b) { return std::abs(a) < std::abs(b); });
        const double offset = k < levels.size() ? levels[k] / unit : levels.back() / unit;
        std::vector<double> y(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) {
            y[i] = offset + 2.0 * e_span * psi[i] / std::abs(peak);
        }
        overlay.series.push_back({states[k].first, x, y, svg::palette(k + 2)});
        raw.series.push_back({states[k].first, x, psi, svg::palette(k + 2)});
    }
    svg::Figure fig;
    fig.title = title;
    fig.x_label = "Phi / Phi0";
    fig.panels = {std::move(overlay), std::move(raw)};
    fig.comments = std::move(comments);
    return fig;
}

} // namespace

std::size_t thread_budget()
{
    if (const char* env = std::getenv("QSPECTRA_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<std::size_t>(v);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Spectrum make_spectrum(const io::RunConfig& cfg, std::size_t threads)
{
    cfg.validate();
    auto s = synthesize(*cfg.model, cfg.grid->points(), cfg.params, static_cast<unsigned>(threads));
    if (cfg.noise && cfg.noise->sigma > 0.0) {
        s = add_measurement_noise(s, cfg.noise->sigma, cfg.noise->seed);
    }
    return s;
}

void run_spectrum(const io::RunConfig& cfg)
{
    cfg.validate();
    if (cfg.output.empty()) {
        throw MissingParameter("output");
    }
    const Spectrum s = make_spectrum(cfg, thread_budget());
    const std::vector<std::string> comments{"qspectra spectrum", "config " + compact(io::config_to_json(cfg))};
    io::write_spectrum_csv(cfg.output, s, comments);
    if (cfg.svg) {
        write_svg(*cfg.svg, spectrum_figure(std::string(model_name(*cfg.model)), {{"", s}}, comments));
    }
}

io::json run_estimate(const EstimateOptions& opts, std::ostream& out)
{
    const auto file = io::read_spectrum_csv(opts.input);
    const auto report = estimate_parameters(file.spectrum, opts.hints);
    const auto j = io::report_to_json(report);
    const std::string text = j.dump(2) + "\n";
    if (opts.output) {
        io::write_text_file(*opts.output, text);
    } else {
        out << text;
    }
    return j;
}

io::json run_squid(const SquidOptions& opts, std::ostream& out)
{
    opts.circuit.validate();
    const auto sol = squid::solve_eigensystem(opts.circuit, std::max<std::size_t>(opts.n_states, 2));
    const auto trunc = squid::qubit_truncation_check(sol, opts.circuit);
    const auto j = io::squid_summary_to_json(opts.circuit, sol, trunc);
    const std::string text = j.dump(2) + "\n";
    if (opts.json_out) {
        io::write_text_file(*opts.json_out, text);
    } else {
        out << text;
    }
    std::vector<std::string> comments = opts.comments;
    comments.push_back("circuit " + compact(io::circuit_to_json(opts.circuit)));
    std::vector<std::string> names;
    for (std::size_t k = 0; k < sol.wavefunctions.size(); ++k) {
        names.push_back("psi" + std::to_string(k));
    }
    std::vector<std::pair<std::string, const std::vector<double>*>> cols;
    for (std::size_t k = 0; k < sol.wavefunctions.size(); ++k) {
        cols.emplace_back(names[k], &sol.wavefunctions[k]);
    }
    if (opts.csv_out) {
        write_squid_csv(*opts.csv_out, sol, cols, comments);
    }
    if (opts.svg_out) {
        write_svg(*opts.svg_out, squid_figure("rf-SQUID loop", sol, cols, sol.energies, comments));
    }
    return j;
}

void run_sweep(const SweepOptions& opts)
{
    if (opts.output.empty()) {
        throw MissingParameter("output");
    }
    const auto values = opts.values.points();
    std::vector<io::RunConfig> configs(values.size(), opts.base);
    for (std::size_t i = 0; i < values.size(); ++i) {
        configs[i].params.field(opts.param) = values[i];
        if (configs[i].noise) {
            configs[i].noise->seed += i;
        }
        configs[i].validate();
    }

    std::vector<std::optional<Spectrum>> results(values.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        const std::size_t workers = std::min(thread_budget(), values.size());
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < values.size(); i = next++) {
                    try {
                        results[i] = make_spectrum(configs[i], 1);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    io::json sweep = io::config_to_json(opts.base);
    sweep["sweep"] = {{"param", std::string(param_name(opts.param))},
                      {"start", opts.values.start},
                      {"stop", opts.values.stop},
                      {"n_points", opts.values.n_points}};
    std::ostringstream os;
    os << "# qspectra sweep\n# config " << compact(sweep) << '\n';
    os << "param_value,omega,T,phase_rad,re_t,im_t\n";
    char buf[32];
    const auto put = [&](double v) {
        if (std::isnan(v)) {
            os << "nan";
        } else {
            std::snprintf(buf, sizeof buf, "%.8e", v);
            os << buf;
        }
    };
    for (std::size_t i = 0; i < values.size(); ++i) {
        const Spectrum& s = *results[i];
        for (std::size_t k = 0; k < s.size(); ++k) {
            put(values[i]);
            os << ',';
            put(s.freqs()[k]);
            os << ',';
            put(s.transmission()[k]);
            os << ',';
            put(s.phase()[k]);
            os << ',';
            put(s.has_amplitudes() ? s.amplitudes()[k].real() : std::nan(""));
            os << ',';
            put(s.has_amplitudes() ? s.amplitudes()[k].imag() : std::nan(""));
            os << '\n';
        }
    }
    io::write_text_file(opts.output, os.str());
}

namespace {

struct Curve
{
    std::string label;
    ModelKind model;
    ModelParams params;
};

struct SpectrumPreset
{
    std::string name;
    std::string caption; // the parameter list as given in the figure caption
    io::GridSpec grid;
    std::vector<Curve> curves;
    std::vector<std::string> notes; // values not in this caption, and where they come from
};

ModelParams direct(double w0, std::optional<double> wb, double gamma)
{
    ModelParams p;
    p.omega0 = w0;
    p.omega_b = wb;
    p.gamma_c = gamma;
    return p;
}

ModelParams stlr_base()
{
    ModelParams p;
    p.omega_r = 2e9;
    p.omega_b = 2e9;
    p.v_g = 3e8;
    p.omega0 = 2.1e9;
    p.V2 = 1e8;
    p.g_rq = 1e8;
    return p;
}

std::vector<SpectrumPreset> spectrum_presets()
{
    std::vector<SpectrumPreset> out;

    {
        SpectrumPreset f{"fig2", "omega0=2.1e9, gamma_c=3.3e7, delta_omega=6.6e7", {1.9e9, 2.3e9, 4001}, {}, {}};
        f.curves.push_back({"qubit", ModelKind::QubitOnly, direct(2.1e9, std::nullopt, 3.3e7)});
        out.push_back(f);
    }
    {
        SpectrumPreset f{"fig3", "omega0=2.1e9, omega_b=2.0e9, gamma_c=3.3e7, g_Q=1e8", {1.8e9, 2.3e9, 4001}, {}, {}};
        auto p = direct(2.1e9, 2e9, 3.3e7);
        p.g_Q = 1e8;
        f.curves.push_back({"qubit-qnmr", ModelKind::QubitQNMR, p});
        out.push_back(f);
    }
    {
        SpectrumPreset f{"fig4", "mean phonon number n=0,1,2,3 (no numeric parameters given)",
                         {2.095e9, 2.14e9, 4001}, {}, {}};
        f.notes.push_back("chosen: omega0=2.1e9, omega_b=2.0e9, g_Q=3e7, v_g=3e8, V1=sqrt(1e15) so "
                          "gamma_c=3.33e6 resolves rungs spaced g_Q^2/Delta=9e6");
        for (int n = 0; n <= 3; ++n) {
            ModelParams p;
            p.omega0 = 2.1e9;
            p.omega_b = 2e9;
            p.g_Q = 3e7;
            p.v_g = 3e8;
            p.V1 = std::sqrt(1e15);
            p.mean_n = n;
            f.curves.push_back({"n=" + std::to_string(n), ModelKind::QubitQNMRDispersive, p});
        }
        out.push_back(f);
    }
    {
        SpectrumPreset f{"fig5", "omega0=2.1e9, omega_b=2e9, gamma_c=3.3e7, g_C=1e8", {1.9e9, 2.3e9, 4001}, {}, {}};
        auto p = direct(2.1e9, 2e9, 3.3e7);
        p.g_C = 1e8;
        f.curves.push_back({"qubit-cnmr", ModelKind::QubitCNMR, p});
        out.push_back(f);
    }
    {
        SpectrumPreset f{"fig7", "omega_r=omega_b=2e9, v_g=3e8, omega0=2.1e9, V2=1e8, g_rq=1e8",
                         {1.8e9, 2.3e9, 4001}, {}, {}};
        f.curves.push_back({"stlr-qubit", ModelKind::StlrQubit, stlr_base()});
        out.push_back(f);
    }
    {
        SpectrumPreset f{"fig8", "omega_r=omega_b=2e9, v_g=3e8, omega0=2.1e9, V2=1e8, g_rq=1e8, g_Q=1e8",
                         {1.8e9, 2.3e9, 4001}, {}, {}};
        auto p = stlr_base();
        p.g_Q = 1e8;
        f.curves.push_back({"stlr-qubit-qnmr", ModelKind::StlrQubitQNMR, p});
        out.push_back(f);
    }
    {
        SpectrumPreset f{"fig9", "omega_r=omega_b=2e9, v_g=3e8, omega0=2.1e9, V2=1e8, g_rq=1e8",
                         {1.8e9, 2.3e9, 4001}, {}, {}};
        f.notes.push_back("g_C=1e8 for the with-CNMR curve is taken from the fig10 caption");
        auto p = stlr_base();
        f.curves.push_back({"without CNMR", ModelKind::StlrQubit, p});
        p.g_C = 1e8;
        f.curves.push_back({"with CNMR", ModelKind::StlrQubitCNMR, p});
        out.push_back(f);
    }
    {
        SpectrumPreset f{"fig10", "omega_r=omega_b=2e9, v_g=3e8, omega0=2.1e9, V2=1e8, g_rq=1e8, g_C=g_Q=1e8",
                         {1.8e9, 2.3e9, 4001}, {}, {}};
        f.notes.push_back("direct-coupling curves use the feedline rate V1^2/v_g with V1=V2");
        auto d = direct(2.1e9, 2e9, 0.0);
        d.gamma_c.reset();
        d.v_g = 3e8;
        d.V1 = 1e8;
        auto s = stlr_base();
        d.g_C = 1e8;
        s.g_C = 1e8;
        f.curves.push_back({"cnmr without STLR", ModelKind::QubitCNMR, d});
        f.curves.push_back({"cnmr with STLR", ModelKind::StlrQubitCNMR, s});
        d.g_C.reset();
        s.g_C.reset();
        d.g_Q = 1e8;
        s.g_Q = 1e8;
        f.curves.push_back({"qnmr without STLR", ModelKind::QubitQNMR, d});
        f.curves.push_back({"qnmr with STLR", ModelKind::StlrQubitQNMR, s});
        out.push_back(f);
    }
    return out;
}

std::string file_label(const std::string& label)
{
    std::string out;
    for (char c : label) {
        out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    }
    return out;
}

std::vector<std::filesystem::path> emit_spectrum_preset(const SpectrumPreset& f, const std::filesystem::path& dir)
{
    std::vector<std::filesystem::path> written;
    std::vector<std::string> head{"figure " + f.name + " caption parameters: " + f.caption};
    for (const auto& n : f.notes) {
        head.push_back("note: " + n);
    }
    std::vector<std::pair<std::string, Spectrum>> curves;
    for (const auto& c : f.curves) {
        io::RunConfig cfg;
        cfg.model = c.model;
        cfg.params = c.params;
        cfg.grid = f.grid;
        const auto s = make_spectrum(cfg, thread_budget());
        auto comments = head;
        comments.push_back("curve " + c.label);
        comments.push_back("config " + compact(io::config_to_json(cfg)));
        const auto path = f.curves.size() == 1 ? dir / (f.name + ".csv")
                                                : dir / (f.name + "_" + file_label(c.label) + ".csv");
        io::write_spectrum_csv(path, s, comments);
        written.push_back(path);
        curves.emplace_back(c.label, s);
    }
    svg::Figure fig;
    if (f.name == "fig10") {
        // Transmission only: classical pair on top, quantum pair below.
        fig.title = f.name;
        fig.x_label = "omega (rad/s)";
        fig.comments = head;
        svg::Panel a{"T (classical)", {}};
        svg::Panel b{"T (quantum)", {}};
        for (std::size_t i = 0; i < curves.size(); ++i) {
            auto& panel = i < 2 ? a : b;
            panel.series.push_back({curves[i].first, curves[i].second.freqs(), curves[i].second.transmission(),
                                    svg::palette(i % 2)});
        }
        fig.panels = {a, b};
    } else {
        fig = spectrum_figure(f.name, curves, head);
    }
    const auto svg_path = dir / (f.name + ".svg");
    write_svg(svg_path, fig);
    written.push_back(svg_path);
    return written;
}

std::vector<std::filesystem::path> emit_squid_preset(const std::string& name, const std::filesystem::path& dir)
{
    const squid::CircuitSpec circuit = squid::reference_circuit();
    const std::string caption = "figure " + name + " caption parameters: Phi_e=0.5 Phi0, L=6e-9, "
                                "I_c=Phi0/(pi L), C_J=1.7e-14";
    const std::vector<std::string> comments{caption, "circuit " + compact(io::circuit_to_json(circuit))};
    const auto sol = squid::solve_eigensystem(circuit, 2);
    std::vector<std::filesystem::path> written;
    std::vector<std::pair<std::string, const std::vector<double>*>> cols;
    squid::TruncationReport trunc;
    if (name == "fig11") {
        cols = {{"psi0", &sol.wavefunctions[0]}, {"psi1", &sol.wavefunctions[1]}};
    } else {
        trunc = squid::qubit_truncation_check(sol, circuit);
        cols = {{"psi_L", &trunc.psi_L}, {"psi_R", &trunc.psi_R}};
    }
    const auto csv = dir / (name + ".csv");
    write_squid_csv(csv, sol, cols, comments);
    written.push_back(csv);
    // |L> and |R> are not eigenstates; both sit at the mean of the two levels.
    const std::vector<double> levels =
        name == "fig11" ? sol.energies
                        : std::vector<double>{0.5 * (sol.energies[0] + sol.energies[1]),
                                              0.5 * (sol.energies[0] + sol.energies[1])};
    const auto svg_path = dir / (name + ".svg");
    write_svg(svg_path, squid_figure(name, sol, cols, levels, comments));
    written.push_back(svg_path);
    return written;
}

} // namespace

std::vector<std::string> figure_names()
{
    std::vector<std::string> names;
    for (const auto& f : spectrum_presets()) {
        names.push_back(f.name);
    }
    names.emplace_back("fig11");
    names.emplace_back("fig12");
    return names;
}

std::vector<std::filesystem::path> run_figures(const std::string& which, const std::filesystem::path& dir)
{
    const auto names = figure_names();
    if (which != "all" && std::find(names.begin(), names.end(), which) == names.end()) {
        throw std::invalid_argument("unknown figure '" + which + "'");
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    std::vector<std::filesystem::path> written;
    for (const auto& f : spectrum_presets()) {
        if (which == "all" || which == f.name) {
            auto w = emit_spectrum_preset(f, dir);
            written.insert(written.end(), w.begin(), w.end());
        }
    }
    for (const char* name : {"fig11", "fig12"}) {
        if (which == "all" || which == name) {
            auto w = emit_squid_preset(name, dir);
            written.insert(written.end(), w.begin(), w.end());
        }
    }
    return written;
}

} // namespace qspectra::cli

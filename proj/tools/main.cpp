#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "qspectra/commands.hpp"
#include "qspectra/constants.hpp"
#include "qspectra/errors.hpp"

using namespace qspectra;

namespace {

// Numeric flag that only overrides the config when given on the command line.
struct Flag
{
    double value = 0.0;
    CLI::Option* opt = nullptr;

    bool given() const { return opt && opt->count() > 0; }
};

struct ParamFlags
{
    std::map<Param, Flag> flags;

    void add(CLI::App* app)
    {
        const std::pair<Param, const char*> names[] = {
            {Param::omega0, "--omega0"}, {Param::omega_b, "--omega-b"}, {Param::omega_r, "--omega-r"},
            {Param::gamma_c, "--gamma-c"}, {Param::v_g, "--v-g"},       {Param::V1, "--v1"},
            {Param::V2, "--v2"},         {Param::g_Q, "--g-q"},         {Param::g_C, "--g-c"},
            {Param::g_rq, "--g-rq"},     {Param::mean_n, "--mean-n"},
        };
        for (const auto& [p, name] : names) {
            auto& f = flags[p];
            f.opt = app->add_option(name, f.value, std::string(param_name(p)));
        }
    }

    void apply(ModelParams& params) const
    {
        for (const auto& [p, f] : flags) {
            if (f.given()) {
                params.field(p) = f.value;
            }
        }
    }
};

struct SpectrumFlags
{
    std::string config_file, model, grid, output, svg;
    double noise_sigma = 0.0;
    std::uint64_t noise_seed = 0;
    CLI::Option* sigma_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    ParamFlags params;

    void add(CLI::App* app, bool need_output)
    {
        app->add_option("--config", config_file, "JSON config file; flags override its values");
        app->add_option("--model", model, "qubit-only | qubit-qnmr | qubit-qnmr-dispersive | qubit-cnmr | "
                                          "stlr-qubit | stlr-qubit-qnmr | stlr-qubit-cnmr");
        app->add_option("--grid", grid, "start:stop:n");
        sigma_opt = app->add_option("--noise-sigma", noise_sigma, "Gaussian noise on T and phase");
        seed_opt = app->add_option("--seed", noise_seed, "noise seed");
        auto* out = app->add_option("--output,-o", output, "CSV output path");
        if (need_output) {
            out->description("CSV output path (required)");
        }
        app->add_option("--svg", svg, "optional SVG plot path");
        params.add(app);
    }

    io::RunConfig build() const
    {
        io::RunConfig cfg;
        if (!config_file.empty()) {
            cfg = io::load_config_file(config_file);
        }
        if (!model.empty()) {
            cfg.model = model_from_name(model);
            if (!cfg.model) {
                throw std::invalid_argument("unknown model '" + model + "'");
            }
        }
        params.apply(cfg.params);
        if (!grid.empty()) {
            cfg.grid = io::parse_grid(grid);
        }
        if (sigma_opt->count() > 0 || seed_opt->count() > 0) {
            io::NoiseSpec n = cfg.noise.value_or(io::NoiseSpec{});
            if (sigma_opt->count() > 0) {
                n.sigma = noise_sigma;
            }
            if (seed_opt->count() > 0) {
                n.seed = noise_seed;
            }
            cfg.noise = n;
        }
        if (!output.empty()) {
            cfg.output = output;
        }
        if (!svg.empty()) {
            cfg.svg = svg;
        }
        return cfg;
    }
};

int report(const char* kind, const std::exception& e, int code)
{
    std::fprintf(stderr, "qspectra: %s: %s\n", kind, e.what());
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Microwave scattering spectra of qubit-resonator devices"};
    app.require_subcommand(1);

    auto* spectrum_cmd = app.add_subcommand("spectrum", "synthesize a transmission spectrum");
    SpectrumFlags spectrum_flags;
    spectrum_flags.add(spectrum_cmd, true);

    auto* estimate_cmd = app.add_subcommand("estimate", "estimate parameters from a spectrum CSV");
    cli::EstimateOptions est;
    std::string est_input, est_output, topology = "direct", assume;
    Flag ref0, refb, refr, gq, delta, b0, ip, len, unity_tol;
    double depth_threshold = 0.5;
    bool dispersive = false;
    estimate_cmd->add_option("--input,-i", est_input, "spectrum CSV")->required();
    estimate_cmd->add_option("--output,-o", est_output, "report JSON path (default stdout)");
    estimate_cmd->add_option("--topology", topology, "direct | stlr")->check(CLI::IsMember({"direct", "stlr"}));
    estimate_cmd->add_option("--assume-class", assume, "skip classification: NoNMR | QuantumNMR | ClassicalNMR | Dispersive");
    ref0.opt = estimate_cmd->add_option("--ref-omega0", ref0.value, "known qubit frequency");
    refb.opt = estimate_cmd->add_option("--ref-omega-b", refb.value, "known resonator frequency");
    refr.opt = estimate_cmd->add_option("--ref-omega-r", refr.value, "known transmission-line resonator frequency");
    estimate_cmd->add_flag("--dispersive", dispersive, "read a single dip as a phonon ladder rung");
    gq.opt = estimate_cmd->add_option("--g-q", gq.value, "g_Q for the phonon readout");
    delta.opt = estimate_cmd->add_option("--delta", delta.value, "detuning omega0 - omega_b for the phonon readout");
    b0.opt = estimate_cmd->add_option("--b0", b0.value, "field B0 (T) for the amplitude readout");
    ip.opt = estimate_cmd->add_option("--i-p", ip.value, "persistent current (A) for the amplitude readout");
    len.opt = estimate_cmd->add_option("--length", len.value, "resonator length (m)");
    estimate_cmd->add_option("--depth-threshold", depth_threshold, "minimum dip depth");
    unity_tol.opt = estimate_cmd->add_option("--unity-tol", unity_tol.value, "unity-point tolerance");

    auto* squid_cmd = app.add_subcommand("squid", "solve the rf-SQUID loop");
    cli::SquidOptions sq;
    sq.circuit = squid::reference_circuit();
    double phi_e = 0.5;
    std::string sq_json, sq_csv, sq_svg;
    squid_cmd->add_option("--c-j", sq.circuit.C_J, "junction capacitance (F)");
    squid_cmd->add_option("--l", sq.circuit.L, "loop inductance (H)");
    squid_cmd->add_option("--i-c", sq.circuit.I_c, "critical current (A)");
    squid_cmd->add_option("--phi-e", phi_e, "external flux in units of Phi0");
    squid_cmd->add_option("--grid-points", sq.circuit.grid_points, "odd number of flux points");
    squid_cmd->add_option("--flux-window", sq.circuit.flux_window, "grid half-width in units of Phi0");
    squid_cmd->add_option("--states", sq.n_states, "number of eigenstates");
    squid_cmd->add_option("--json", sq_json, "summary JSON path (default stdout)");
    squid_cmd->add_option("--csv", sq_csv, "wavefunction CSV path");
    squid_cmd->add_option("--svg", sq_svg, "potential and wavefunction SVG path");

    auto* sweep_cmd = app.add_subcommand("sweep", "spectra over a range of one parameter");
    SpectrumFlags sweep_flags;
    sweep_flags.add(sweep_cmd, true);
    std::string sweep_param, sweep_values;
    sweep_cmd->add_option("--param", sweep_param, "parameter to sweep, e.g. g_Q")->required();
    sweep_cmd->add_option("--values", sweep_values, "start:stop:n")->required();

    auto* figures_cmd = app.add_subcommand("figures", "regenerate the figure data sets");
    std::string which = "all", fig_dir = "figures";
    figures_cmd->add_option("--which", which, "fig2 ... fig12 or all");
    figures_cmd->add_option("--out-dir", fig_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*spectrum_cmd) {
            cli::run_spectrum(spectrum_flags.build());
        } else if (*estimate_cmd) {
            est.input = est_input;
            if (!est_output.empty()) {
                est.output = est_output;
            }
            auto& h = est.hints;
            h.topology = topology == "stlr" ? Topology::Stlr : Topology::Direct;
            if (!assume.empty()) {
                h.assume_class = class_from_name(assume);
                if (!h.assume_class) {
                    throw std::invalid_argument("unknown class '" + assume + "'");
                }
            }
            if (ref0.given()) h.ref_omega0 = Estimate{ref0.value};
            if (refb.given()) h.ref_omega_b = Estimate{refb.value};
            if (refr.given()) h.ref_omega_r = Estimate{refr.value};
            h.dispersive = dispersive;
            if (gq.given()) h.g_Q = gq.value;
            if (delta.given()) h.delta = delta.value;
            if (b0.given()) h.B0 = b0.value;
            if (ip.given()) h.I_p = ip.value;
            if (len.given()) h.length = len.value;
            if (unity_tol.given()) h.unity_tol = unity_tol.value;
            h.depth_threshold = depth_threshold;
            cli::run_estimate(est, std::cout);
        } else if (*squid_cmd) {
            sq.circuit.Phi_e = phi_e * constants::flux_quantum;
            if (!sq_json.empty()) sq.json_out = sq_json;
            if (!sq_csv.empty()) sq.csv_out = sq_csv;
            if (!sq_svg.empty()) sq.svg_out = sq_svg;
            cli::run_squid(sq, std::cout);
        } else if (*sweep_cmd) {
            cli::SweepOptions sw;
            sw.base = sweep_flags.build();
            const auto p = param_from_name(sweep_param);
            if (!p) {
                throw std::invalid_argument("unknown parameter '" + sweep_param + "'");
            }
            sw.param = *p;
            sw.values = io::parse_grid(sweep_values);
            sw.output = sw.base.output;
            cli::run_sweep(sw);
        } else if (*figures_cmd) {
            for (const auto& path : cli::run_figures(which, fig_dir)) {
                std::cout << path.string() << '\n';
            }
        }
    } catch (const IoError& e) {
        return report("i/o error", e, 2);
    } catch (const NumericalError& e) {
        return report("numerical failure", e, 3);
    } catch (const std::invalid_argument& e) {
        return report("config error", e, 1);
    } catch (const std::domain_error& e) {
        return report("numerical failure", e, 3);
    } catch (const std::exception& e) {
        return report("error", e, 3);
    }
    return 0;
}

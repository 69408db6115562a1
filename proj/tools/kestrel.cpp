// Command-line front end: constants, kernel tables, criterion checks,
// density reports, the discrete phase-plane tools and the 1D continuum flow.
// Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kestrel/io.hpp"

using namespace kestrel;

namespace {

int env_threads() {
    const char* v = std::getenv("KESTREL_THREADS");
    if (!v) return 0;
    const int n = std::atoi(v);
    return n > 0 ? n : 0;
}

struct CommonOut {
    std::string output = "-";
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kestrel: numerical laboratory for high-dimensional Keller-Segel dynamics"};
    app.require_subcommand(1);
    app.fallthrough();
    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "seed for stochastic components (default 0)");

    // ---- constants ----
    auto* c_cmd = app.add_subcommand("constants", "sharp constants for dimension d");
    c_cmd->fallthrough();
    int c_dim = 3;
    bool c_gs = false;
    double c_tol = 1e-6;
    CommonOut c_out;
    c_cmd->add_option("--dim", c_dim, "space dimension (>= 3)")->required();
    c_cmd->add_flag("--ground-state", c_gs, "also solve the ground state for smallness_gn");
    c_cmd->add_option("--tol", c_tol, "ground-state residual tolerance");
    c_cmd->add_option("--output,-o", c_out.output, "output path (default stdout)");

    // ---- kernels ----
    auto* k_cmd = app.add_subcommand("kernels", "tabulate E, B, g as CSV");
    k_cmd->fallthrough();
    int k_dim = 3;
    double k_alpha = 1.0, k_rmin = 0.01, k_rmax = 10.0;
    int k_points = 100;
    CommonOut k_out;
    k_cmd->add_option("--dim", k_dim)->required();
    k_cmd->add_option("--alpha", k_alpha, "degradation rate (>= 0)");
    k_cmd->add_option("--r-min", k_rmin);
    k_cmd->add_option("--r-max", k_rmax);
    k_cmd->add_option("--points", k_points);
    k_cmd->add_option("--output,-o", k_out.output);

    // ---- criteria ----
    auto* cr_cmd = app.add_subcommand("criteria", "evaluate blow-up / smallness criteria");
    cr_cmd->fallthrough();
    int cr_dim = 3;
    double cr_mass = 1.0, cr_i0 = 1.0, cr_alpha = 0.0;
    std::optional<double> cr_e0, cr_lhalf, cr_eps, cr_gexp, cr_cd;
    CommonOut cr_out;
    cr_cmd->add_option("--dim", cr_dim)->required();
    cr_cmd->add_option("--mass", cr_mass)->required();
    cr_cmd->add_option("--i0", cr_i0, "initial second moment")->required();
    cr_cmd->add_option("--alpha", cr_alpha);
    cr_cmd->add_option("--e0", cr_e0, "initial free energy (enables the energy criterion)");
    cr_cmd->add_option("--lhalf", cr_lhalf, "L^{d/2} norm (enables the smallness checks)");
    cr_cmd->add_option("--eps", cr_eps, "parabolic eps");
    cr_cmd->add_option("--gamma-exp", cr_gexp, "exponent gamma in (0,1)");
    cr_cmd->add_option("--cd", cr_cd, "the constant C(d) of the concentration theorem");
    cr_cmd->add_option("--output,-o", cr_out.output);

    // ---- density ----
    auto* d_cmd = app.add_subcommand("density", "moment report for a profile file");
    d_cmd->fallthrough();
    std::string d_file;
    double d_alpha = 0.0;
    long d_samples = 1'000'000;
    bool d_report = false;
    CommonOut d_out;
    d_cmd->add_option("--file", d_file, "profile JSON")->required()->check(CLI::ExistingFile);
    d_cmd->add_flag("--report", d_report, "emit the moment report");
    d_cmd->add_option("--alpha", d_alpha);
    d_cmd->add_option("--samples", d_samples, "Monte Carlo samples");
    d_cmd->add_option("--output,-o", d_out.output);

    // ---- discrete ----
    auto* ds_cmd = app.add_subcommand("discrete", "finite-dimensional gradient flow");
    ds_cmd->fallthrough();
    ds_cmd->require_subcommand(1);
    double ds_gamma = 0.5, ds_mass = 1.6;
    int ds_points = 3;
    ds_cmd->add_option("--gamma", ds_gamma, "kernel homogeneity in (0,1)");
    ds_cmd->add_option("--mass", ds_mass);
    ds_cmd->add_option("--points", ds_points, "number of particles N (default 3)");

    auto* sim_cmd = ds_cmd->add_subcommand("simulate", "integrate one trajectory");
    sim_cmd->fallthrough();
    double sim_u0 = 1.0, sim_v0 = 1.0, sim_tmax = 1e3, sim_gaptol = 1e-8, sim_rmax = 1e3;
    std::vector<double> sim_x0;
    CommonOut sim_out;
    sim_cmd->add_option("--u0", sim_u0);
    sim_cmd->add_option("--v0", sim_v0);
    sim_cmd->add_option("--x0", sim_x0, "explicit points (overrides --u0/--v0)");
    sim_cmd->add_option("--t-max", sim_tmax);
    sim_cmd->add_option("--gap-tol", sim_gaptol);
    sim_cmd->add_option("--r-max", sim_rmax);
    sim_cmd->add_option("--output,-o", sim_out.output);

    auto* por_cmd = ds_cmd->add_subcommand("portrait", "classify a (u,v) grid");
    por_cmd->fallthrough();
    int por_grid = 100;
    double por_lo = 0.02, por_hi = 3.0, por_tmax = 1e6;
    std::string por_base = "portrait";
    por_cmd->add_option("--grid", por_grid, "cells per side");
    por_cmd->add_option("--lo", por_lo);
    por_cmd->add_option("--hi", por_hi);
    por_cmd->add_option("--t-max", por_tmax);
    por_cmd->add_option("--output,-o", por_base, "base path; writes <base>.csv and <base>.svg");

    auto* man_cmd = ds_cmd->add_subcommand("manifold", "trace the separatrix");
    man_cmd->fallthrough();
    double man_span = 4.0;
    CommonOut man_out;
    man_cmd->add_option("--span", man_span);
    man_cmd->add_option("--output,-o", man_out.output);

    auto* gau_cmd = ds_cmd->add_subcommand("gauge", "gauge function on the simplex u+v=1");
    gau_cmd->fallthrough();
    int gau_samples = 256;
    CommonOut gau_out;
    gau_cmd->add_option("--samples", gau_samples);
    gau_cmd->add_option("--output,-o", gau_out.output);

    // ---- continuum ----
    auto* co_cmd = app.add_subcommand("continuum", "1D pseudo-inverse gradient flow");
    co_cmd->fallthrough();
    co_cmd->require_subcommand(1);
    auto* cos_cmd = co_cmd->add_subcommand("simulate", "run the particle system");
    cos_cmd->fallthrough();
    std::string cos_kernel = "power:0.5", cos_x0 = "gaussian:1.0", cos_states = "";
    std::string cos_config;
    double cos_mass = 1.0, cos_tmax = 1.0;
    int cos_points = 64, cos_stride = 0;
    bool cos_prox = false;
    CommonOut cos_out;
    cos_cmd->add_option("--config", cos_config, "config JSON mirroring ContinuumConfig")
        ->check(CLI::ExistingFile);
    cos_cmd->add_option("--kernel", cos_kernel, "power:<gamma> or log");
    auto* cos_mass_opt = cos_cmd->add_option("--mass", cos_mass);
    cos_cmd->add_option("--points", cos_points, "particle count (>= 16)");
    cos_cmd->add_option("--t-max", cos_tmax);
    cos_cmd->add_option("--x0", cos_x0, "gaussian:<sigma> or uniform:<half-width>");
    cos_cmd->add_flag("--prox", cos_prox, "JKO implicit stepping");
    cos_cmd->add_option("--snapshot-stride", cos_stride);
    cos_cmd->add_option("--states-output", cos_states, "CSV path for state snapshots");
    cos_cmd->add_option("--output,-o", cos_out.output);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*c_cmd) {
            DimensionalConstants c =
                c_gs ? compute_constants_with_gn(c_dim, c_tol) : compute_constants(c_dim);
            write_text(c_out.output, to_json(c).dump(2) + "\n");
        } else if (*k_cmd) {
            if (k_points < 2 || !(k_rmin > 0.0) || !(k_rmax > k_rmin))
                throw std::invalid_argument("kernels: need 0 < r-min < r-max, points >= 2");
            write_text(k_out.output,
                       kernel_table_csv(k_dim, k_alpha, logspace(k_rmin, k_rmax, k_points)));
        } else if (*cr_cmd) {
            std::string out;
            auto emit = [&out](const CriterionReport& r) { out += to_json(r).dump() + "\n"; };
            emit(check_first_blowup(cr_dim, cr_mass, cr_i0, cr_alpha));
            if (cr_e0) emit(check_second_blowup(cr_dim, cr_mass, cr_i0, *cr_e0));
            if (cr_lhalf) {
                SmallnessReports sm = check_smallness(compute_constants(cr_dim), *cr_lhalf);
                emit(sm.sobolev);
                emit(check_general_blowup_necessary(cr_dim, *cr_lhalf));
            }
            if (cr_eps || cr_gexp || cr_cd) {
                if (!(cr_eps && cr_gexp && cr_cd))
                    throw std::invalid_argument(
                        "criteria: --eps, --gamma-exp and --cd must be given together");
                if (!cr_e0)
                    throw std::invalid_argument("criteria: concentration check needs --e0");
                emit(check_parabolic_concentration(cr_dim, cr_mass, cr_i0, *cr_e0, *cr_eps,
                                                   *cr_gexp, *cr_cd)
                         .report);
            }
            write_text(cr_out.output, out);
        } else if (*d_cmd) {
            std::ifstream in(d_file);
            Json j = Json::parse(in);
            DensityProfile p = profile_from_json(j);
            if (!d_report)
                throw std::invalid_argument("density: nothing to do (pass --report)");
            ReportOptions ro;
            ro.seed = seed;
            ro.mc_samples = d_samples;
            write_text(d_out.output, to_json(report(p, d_alpha, ro)).dump(2) + "\n");
        } else if (*ds_cmd) {
            DiscreteConfig dc{ds_gamma, ds_mass, ds_points};
            if (*sim_cmd) {
                DiscreteState s0 = sim_x0.empty() ? DiscreteState::from_uv(sim_u0, sim_v0)
                                                  : DiscreteState::from_points(sim_x0);
                IntegrateOptions opt;
                opt.t_max = sim_tmax;
                opt.gap_tol = sim_gaptol;
                opt.r_max = sim_rmax;
                FlowOutcome fo = integrate(dc, s0, opt);
                if (fo.step_underflow)
                    std::cerr << "warning: step underflow before an event; classification "
                              << (fo.classification == FlowClass::Collapse ? "collapse-suspect"
                                                                           : "undecided")
                              << "\n";
                write_text(sim_out.output, trajectory_csv(fo));
            } else if (*por_cmd) {
                PortraitSpec spec;
                spec.cells_u = spec.cells_v = por_grid;
                spec.u_min = spec.v_min = por_lo;
                spec.u_max = spec.v_max = por_hi;
                spec.t_max = por_tmax;
                spec.threads = env_threads();
                PhasePortrait pp = phase_portrait(dc, spec);
                write_text(por_base + ".csv", portrait_csv(pp));
                write_text(por_base + ".svg", portrait_svg(pp));
            } else if (*man_cmd) {
                write_text(man_out.output, manifold_csv(separatrix(dc, man_span)));
            } else if (*gau_cmd) {
                if (ds_points != 3)
                    throw std::invalid_argument("gauge: simplex tabulation is N = 3 only");
                write_text(gau_out.output, gauge_csv(dc, gau_samples));
            }
        } else if (*co_cmd && *cos_cmd) {
            ContinuumConfig cc;
            if (!cos_config.empty()) {
                std::ifstream in(cos_config);
                cc = continuum_config_from_json(Json::parse(in));
                if (*cos_mass_opt) cc.mass = cos_mass;  // flags override the file
            } else {
                if (!*cos_mass_opt)
                    throw std::invalid_argument("continuum: --mass or --config required");
                cc.mass = cos_mass;
                cc.n_particles = cos_points;
                if (cos_kernel == "log") {
                    cc.kernel = KernelType::Logarithmic;
                } else if (cos_kernel.rfind("power:", 0) == 0) {
                    cc.kernel = KernelType::Power;
                    cc.gamma = std::stod(cos_kernel.substr(6));
                } else {
                    throw std::invalid_argument(
                        "continuum: kernel must be power:<gamma> or log");
                }
            }
            ParticleState s0;
            if (cos_x0.rfind("gaussian:", 0) == 0)
                s0 = gaussian_state(cc, std::stod(cos_x0.substr(9)));
            else if (cos_x0.rfind("uniform:", 0) == 0)
                s0 = uniform_state(cc, std::stod(cos_x0.substr(8)));
            else
                throw std::invalid_argument("continuum: x0 must be gaussian:<s> or uniform:<w>");
            SimulateOptions so;
            so.prox = cos_prox;
            so.snapshot_stride = cos_stride;
            TrajectoryRecord rec = simulate(cc, s0, cos_tmax, so);
            if (rec.end == ContinuumEnd::GapCollapse)
                std::cerr << "note: stopped at gap collapse, t = " << rec.final_state.t << "\n";
            write_text(cos_out.output, continuum_csv(rec));
            if (!cos_states.empty()) write_text(cos_states, continuum_states_csv(rec));
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

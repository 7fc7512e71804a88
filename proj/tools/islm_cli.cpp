/// Command-line front end: parameter ingestion, analysis reports, DDE
/// simulation, waveform reconstruction and parameter sweeps.
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "islm/islm.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string params_path;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
    bool plot = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--params", o.params_path, "parameter file (key = value lines)")
        ->required();
    cmd->add_option("--set", o.overrides, "override one parameter (key=value, repeatable)");
    cmd->add_option("--out", o.out_dir, "output directory")->capture_default_str();
    cmd->add_flag("--plot", o.plot, "emit a gnuplot script next to the CSV");
}

islm::ModelParams load_params(const CommonOpts& o) {
    islm::ModelParams p = islm::parse_params_file(o.params_path);
    for (const std::string& kv : o.overrides) islm::apply_override(p, kv);
    p.validate();
    return p;
}

fs::path prepare_out(const CommonOpts& o) {
    fs::path dir(o.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw islm::IoError("cannot create output directory " + dir.string());
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw islm::IoError("cannot open " + path.string() + " for writing");
    f << content;
    if (!f) throw islm::IoError("short write to " + path.string());
}

void write_plot_script(const fs::path& dir, const std::string& csv_name,
                       const std::vector<std::pair<int, std::string>>& series) {
    std::ostringstream os;
    os << "# run with: gnuplot -p plot.gp\n";
    os << "set datafile separator ','\n";
    os << "set key outside\n";
    os << "plot";
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (i) os << ",";
        os << " '" << csv_name << "' using 1:" << series[i].first << " with lines title '"
           << series[i].second << "'";
    }
    os << "\n";
    write_file(dir / "plot.gp", os.str());
}

int run_analyze(const CommonOpts& o) {
    const islm::ModelParams p = load_params(o);
    const islm::AnalysisResult ar = islm::analyze(p);
    const fs::path dir = prepare_out(o);
    const std::string report = islm::render_report(ar);
    write_file(dir / "report.txt", report);
    write_file(dir / "report.kv", islm::render_machine_report(ar));
    std::cout << report << "\nreport written to " << (dir / "report.txt").string()
              << " and " << (dir / "report.kv").string() << "\n";
    if (!ar.has_hopf) {
        std::cout << "degenerate analysis: " << ar.stab.note << "\n";
        return 3;
    }
    if (!ar.nf_ok) {
        std::cout << "degenerate analysis: " << ar.nf_error << "\n";
        return 3;
    }
    return 0;
}

int run_simulate(const CommonOpts& o, double tau, std::optional<double> tmax,
                 std::optional<double> dt, const std::vector<double>& offset) {
    const islm::ModelParams p = load_params(o);
    const islm::EquilibriumPoint eq = islm::compute_equilibrium(p);
    double t_end = 500.0;
    if (tmax) {
        t_end = *tmax;
    } else {
        try {
            const islm::StabilityReport stab = islm::stability_report(p);
            if (!stab.hopf_points.empty())
                t_end = 60.0 * 2.0 * islm::pi / stab.hopf_points.front().omega0;
        } catch (const islm::Error&) {
            // keep the fallback horizon
        }
    }
    const double step = dt ? *dt : tau / 200.0;
    if (offset.size() > 4)
        throw islm::ParameterError("--offset takes at most 4 comma-separated values");
    islm::HistorySpec history = islm::HistorySpec::at_equilibrium();
    if (std::any_of(offset.begin(), offset.end(), [](double v) { return v != 0.0; })) {
        double d[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < offset.size(); ++i) d[i] = offset[i];
        history = islm::HistorySpec::constant_offset(d[0], d[1], d[2], d[3]);
    }
    const fs::path dir = prepare_out(o);
    const fs::path csv_path = dir / "trajectory.csv";
    islm::Trajectory traj;
    try {
        traj = islm::simulate(p, tau, history, t_end, step);
    } catch (const islm::TrajectoryDomainError& e) {
        std::ostringstream csv;
        islm::write_trajectory_csv(csv, e.partial);
        write_file(csv_path, csv.str());
        std::cerr << "error: " << e.what() << "\n";
        std::cout << "partial trajectory (" << e.partial.times.size() << " rows) written to "
                  << csv_path.string() << "\n";
        return 4;
    }
    {
        std::ostringstream csv;
        islm::write_trajectory_csv(csv, traj);
        write_file(csv_path, csv.str());
    }
    if (o.plot)
        write_plot_script(dir, "trajectory.csv",
                          {{2, "Y"}, {3, "r"}, {4, "K"}, {5, "M"}});
    const std::vector<double> dev = islm::component_deviation(traj, eq, 0);
    double max_dev = 0.0;
    for (double v : dev) max_dev = std::max(max_dev, std::abs(v));
    std::string cls = "equilibrium", period = "n/a";
    if (max_dev >= 1e-9 * (1.0 + std::abs(eq.Y0))) {
        try {
            cls = islm::to_string(islm::classify_envelope(traj.times, dev).cls);
        } catch (const islm::InsufficientDataError&) {
            cls = "insufficient-data";
        }
        try {
            period = islm::fmt17(islm::estimate_period(traj.times, dev));
        } catch (const islm::InsufficientDataError&) {
        }
    }
    std::cout << "trajectory (" << traj.times.size() << " rows) written to "
              << csv_path.string() << "\n";
    std::cout << "summary: classification=" << cls << " period=" << period << "\n";
    return 0;
}

int run_waveform(const CommonOpts& o, std::optional<double> tmax, std::optional<double> dt,
                 double z0) {
    const islm::ModelParams p = load_params(o);
    const islm::AnalysisResult ar = islm::analyze(p);
    if (!ar.has_hopf) throw islm::DegenerateError(ar.stab.note);
    if (!ar.nf_ok) throw islm::DegenerateError(ar.nf_error);
    const double omega0 = ar.stab.hopf_points.front().omega0;
    const double period = 2.0 * islm::pi / omega0;
    const double t_end = tmax ? *tmax : 60.0 * period;
    const double step = dt ? *dt : period / 200.0;
    const islm::ReducedTrajectory rt =
        islm::integrate_reduced(ar.nf.eig.lambda1, ar.nf.quad.g20, ar.nf.quad.g11,
                                ar.nf.quad.g02, ar.nf.g21, islm::Cplx(z0, 0.0), t_end,
                                step);
    const islm::Waveform w = islm::reconstruct(rt, p, ar.eq, ar.nf.cm);
    const fs::path dir = prepare_out(o);
    const fs::path csv_path = dir / "waveform.csv";
    std::ostringstream csv;
    islm::write_waveform_csv(csv, w);
    write_file(csv_path, csv.str());
    if (o.plot)
        write_plot_script(dir, "waveform.csv",
                          {{2, "Y"}, {3, "r"}, {4, "K"}, {5, "M"}, {6, "I"}, {7, "L"}});
    std::cout << "waveform (" << w.times.size() << " rows) written to "
              << csv_path.string() << "\n";
    std::cout << "summary: omega0=" << islm::fmt17(omega0)
              << " max_imag_residue=" << islm::fmt17(w.max_imag_residue) << "\n";
    return 0;
}

islm::SweepRow sweep_point(const islm::ModelParams& p, double x) {
    islm::SweepRow row{};
    row.x = x;
    try {
        const islm::AnalysisResult ar = islm::analyze(p);
        if (ar.has_hopf && ar.nf_ok) {
            row.ok = true;
            row.omega0 = ar.stab.hopf_points.front().omega0;
            row.tau0 = ar.stab.hopf_points.front().tau0;
            row.mu2 = ar.nf.main.mu2;
            row.beta2 = ar.nf.main.beta2;
            row.T2 = ar.nf.main.T2;
        }
    } catch (const islm::Error&) {
        // failed grid points keep empty fields
    }
    return row;
}

int run_sweep(const CommonOpts& o, const std::string& var, double from, double to,
              int steps) {
    if (steps < 2) throw islm::ParameterError("sweep needs at least 2 grid points");
    if (!(std::isfinite(from) && std::isfinite(to)))
        throw islm::ParameterError("sweep range must be finite");
    if (from == to) throw islm::ParameterError("sweep range width is zero");
    const islm::ModelParams base = load_params(o);
    std::vector<islm::SweepRow> rows;
    rows.reserve(static_cast<std::size_t>(steps));
    if (var == "epsilon") {
        for (int i = 0; i < steps; ++i) {
            const double x = from + (to - from) * i / (steps - 1);
            islm::ModelParams p = base;
            islm::SweepRow row{};
            row.x = x;
            try {
                islm::set_param(p, "epsilon", x);
                row = sweep_point(p, x);
            } catch (const islm::Error&) {
            }
            rows.push_back(row);
        }
    } else { // tau: the analysis chain does not depend on the imposed delay
        const islm::SweepRow ref = sweep_point(base, 0.0);
        for (int i = 0; i < steps; ++i) {
            islm::SweepRow row = ref;
            row.x = from + (to - from) * i / (steps - 1);
            rows.push_back(row);
        }
    }
    const fs::path dir = prepare_out(o);
    const fs::path csv_path = dir / "sweep.csv";
    std::ostringstream csv;
    islm::write_sweep_csv(csv, var, rows);
    write_file(csv_path, csv.str());
    if (o.plot) write_plot_script(dir, "sweep.csv", {{3, "tau0"}, {4, "mu2"}});
    std::cout << "sweep (" << rows.size() << " rows) written to " << csv_path.string()
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"delayed IS-LM model: stability, Hopf normal form, simulation"};
    app.require_subcommand(1);

    CommonOpts analyze_opts, sim_opts, wave_opts, sweep_opts;

    CLI::App* analyze_cmd =
        app.add_subcommand("analyze", "run the analysis chain and write a report");
    add_common(analyze_cmd, analyze_opts);

    CLI::App* sim_cmd =
        app.add_subcommand("simulate", "integrate the delayed system, classify the envelope");
    add_common(sim_cmd, sim_opts);
    double tau = 0.0;
    sim_cmd->add_option("--tau", tau, "delay (time units)")->required();
    double sim_tmax = 0.0, sim_dt = 0.0;
    CLI::Option* sim_tmax_opt = sim_cmd->add_option("--tmax", sim_tmax, "time horizon");
    CLI::Option* sim_dt_opt =
        sim_cmd->add_option("--dt", sim_dt, "step size (tau must be an integer multiple)");
    std::vector<double> offset;
    sim_cmd->add_option("--offset", offset, "history offset dY[,dr[,dK[,dM]]]")
        ->delimiter(',');

    CLI::App* wave_cmd = app.add_subcommand(
        "waveform", "reconstruct the bifurcating waveform from the normal form");
    add_common(wave_cmd, wave_opts);
    double wave_tmax = 0.0, wave_dt = 0.0, z0 = 0.01;
    CLI::Option* wave_tmax_opt = wave_cmd->add_option("--tmax", wave_tmax, "time horizon");
    CLI::Option* wave_dt_opt = wave_cmd->add_option("--dt", wave_dt, "step size");
    wave_cmd->add_option("--z0", z0, "initial reduced amplitude")->capture_default_str();

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "tabulate Hopf quantities over a parameter grid");
    add_common(sweep_cmd, sweep_opts);
    std::string sweep_var;
    sweep_cmd->add_option("--sweep", sweep_var, "grid variable")
        ->required()
        ->check(CLI::IsMember({"epsilon", "tau"}));
    double sweep_from = 0.0, sweep_to = 0.0;
    int sweep_steps = 0;
    sweep_cmd->add_option("--from", sweep_from, "first grid value")->required();
    sweep_cmd->add_option("--to", sweep_to, "last grid value")->required();
    sweep_cmd->add_option("--steps", sweep_steps, "number of grid points")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(analyze_cmd)) return run_analyze(analyze_opts);
        if (app.got_subcommand(sim_cmd))
            return run_simulate(sim_opts, tau,
                                sim_tmax_opt->count() ? std::optional<double>(sim_tmax)
                                                      : std::nullopt,
                                sim_dt_opt->count() ? std::optional<double>(sim_dt)
                                                    : std::nullopt,
                                offset);
        if (app.got_subcommand(wave_cmd))
            return run_waveform(wave_opts,
                                wave_tmax_opt->count() ? std::optional<double>(wave_tmax)
                                                       : std::nullopt,
                                wave_dt_opt->count() ? std::optional<double>(wave_dt)
                                                     : std::nullopt,
                                z0);
        if (app.got_subcommand(sweep_cmd))
            return run_sweep(sweep_opts, sweep_var, sweep_from, sweep_to, sweep_steps);
    } catch (const islm::ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const islm::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const islm::StepError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const islm::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const islm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

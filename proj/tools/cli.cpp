#include "cli.hpp"

#include "shuttle/analysis.hpp"
#include "shuttle/config.hpp"
#include "shuttle/design.hpp"
#include "shuttle/dynamics.hpp"
#include "shuttle/errors.hpp"
#include "shuttle/optimize.hpp"
#include "shuttle/parallel.hpp"
#include "shuttle/perturbation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

namespace shuttle::cli {

namespace {

using nlohmann::json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;
};

std::string hash_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return buf;
}

class Csv {
public:
    Csv(const RunConfig& cfg, const std::string& command, const std::vector<std::string>& header) {
        text_ << "# tool: " << kToolVersion << '\n'
              << "# command: " << command << '\n'
              << "# config_hash: fnv1a64:" << hash_hex(cfg.hash) << '\n';
        for (std::size_t k = 0; k < header.size(); ++k) {
            text_ << (k ? "," : "") << header[k];
        }
        text_ << '\n';
    }

    void comment(const std::string& line) { text_ << "# " << line << '\n'; }

    void row(const std::vector<double>& values) {
        for (std::size_t k = 0; k < values.size(); ++k) {
            text_ << (k ? "," : "") << fmt(values[k]);
        }
        text_ << '\n';
    }

    std::string str() const { return text_.str(); }

private:
    std::ostringstream text_;
};

json params_json(const PhysicalParams& p, int level) {
    return {{"mass_kg", p.mass},
            {"omega0_rad_per_s", p.omega0},
            {"distance_m", p.distance},
            {"duration_s", p.duration},
            {"hbar_J_s", p.hbar},
            {"level", level}};
}

std::size_t steps_for(const RunConfig& cfg, const PhysicalParams& params, double omega_max) {
    return cfg.steps ? cfg.steps : default_step_count(params, omega_max);
}

std::vector<double> design_targets(const RunConfig& cfg, const Perturbation& pert) {
    if (!cfg.protocol.targets.empty()) {
        return cfg.protocol.targets;
    }
    return {primary_omega(pert)};
}

DesignConstraints constraints_for(const RunConfig& cfg, const Perturbation& pert) {
    DesignConstraints c;
    c.targets = design_targets(cfg, pert);
    c.omega_derivatives = cfg.protocol.omega_derivatives;
    c.omega0_derivatives = cfg.protocol.omega0_derivatives;
    c.terms = cfg.protocol.terms;
    return c;
}

struct Built {
    Protocol protocol;
    TrapTrajectory trap;
    std::optional<AnsatzSystem> system;
    std::optional<OctSolution> oct;
};

Built build_protocol(const RunConfig& cfg, const PhysicalParams& params, const Perturbation& pert) {
    const std::string& type = cfg.protocol.type;
    if (type == "fourier") {
        FourierDesign fd = design_fourier(params, constraints_for(cfg, pert));
        TrapTrajectory trap = trap_from_classical(fd.protocol, params);
        return {fd.protocol, trap, std::move(fd.system), std::nullopt};
    }
    if (type == "aux") {
        Protocol p = design_aux_multi(params, design_targets(cfg, pert));
        return {p, trap_from_classical(p, params), std::nullopt, std::nullopt};
    }
    if (type == "oct") {
        const double w = primary_omega(pert);
        const std::size_t n = std::max<std::size_t>(2000, steps_for(cfg, params, w));
        OctSolution sol = oct_solve(params, w, n);
        Protocol p = sol.protocol(params);
        TrapTrajectory trap = sol.trap_trajectory(params);
        return {p, trap, std::nullopt, std::move(sol)};
    }
    Protocol p = Protocol::polynomial5(params);
    return {p, trap_from_classical(p, params), std::nullopt, std::nullopt};
}

void emit(const Options& opt, const std::string& csv, const json& report, std::ostream& out,
          std::ostream& err) {
    if (opt.out.empty()) {
        out << csv;
        err << report.dump(2) << '\n';
        return;
    }
    std::ofstream f(opt.out, std::ios::binary);
    if (!f) {
        throw ConfigError("cannot write output file '" + opt.out + "'");
    }
    f << csv;
    out << report.dump(2) << '\n';
}

const ScanAxis& require_scan(const RunConfig& cfg, const char* command) {
    if (!cfg.scan) {
        throw ConfigError(std::string(command) + " needs a 'scan' section");
    }
    return *cfg.scan;
}

double envelope_or_nan(const std::function<double()>& f) {
    try {
        return f();
    } catch (const PreconditionError&) {
        return kNaN;
    }
}

int cmd_scan(const RunConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err) {
    const ScanAxis& axis = require_scan(cfg, "scan");
    const std::vector<double> values = axis.values();
    std::vector<std::vector<double>> rows(values.size());
    parallel_for(values.size(), opt.threads, [&](std::size_t i) {
        const ScanPoint pt = apply_axis(cfg, axis.variable, values[i]);
        const Built b = build_protocol(cfg, pt.params, pt.perturbation);
        const Perturbation& pert = pt.perturbation;
        ExcitationReport r = pert.is_frequency()
                                 ? second_order_energy_freq(pt.params, b.protocol, pert, cfg.level)
                                 : second_order_energy_pos(pt.params, b.protocol, pert, cfg.level);
        double env_s = kNaN;
        double env_d = kNaN;
        if (pert.kind == PerturbationKind::FrequencySine) {
            const double w = primary_omega(pert);
            const double T = pt.params.duration;
            env_s = envelope_or_nan([&] { return envelope_static(pt.params, w, T, cfg.level); });
            env_d = envelope_or_nan([&] { return envelope_dynamical(pt.params, w, T); });
        }
        const double k = cfg.absolute ? pert.amplitude() * pert.amplitude() : 1.0;
        rows[i] = {values[i],          k * r.static_quanta, k * r.dynamical_quanta,
                   k * r.total_quanta, k * env_s,           k * env_d};
    });
    Csv csv(cfg, "scan",
            {"scan_value", "static_quanta", "dynamical_quanta", "total_quanta",
             "envelope_static_quanta", "envelope_dynamical_quanta"});
    std::vector<double> st;
    std::vector<double> dy;
    for (const auto& r : rows) {
        csv.row(r);
        st.push_back(r[1]);
        dy.push_back(r[2]);
    }
    auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json report = {{"command", "scan"},
                   {"variable", axis.variable},
                   {"points", values.size()},
                   {"per_amplitude_squared", !cfg.absolute},
                   {"params", params_json(cfg.params, cfg.level)},
                   {"largest_static_local_max_at", finite_or_null(largest_local_maximum(values, st))},
                   {"largest_dynamical_local_max_at",
                    finite_or_null(largest_local_maximum(values, dy))},
                   {"config_hash", hash_hex(cfg.hash)}};
    emit(opt, csv.str(), report, out, err);
    return kOk;
}

int cmd_verify(const RunConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err) {
    const ScanAxis& axis = require_scan(cfg, "verify");
    const std::vector<double> values = axis.values();
    std::vector<std::vector<double>> rows(values.size());
    parallel_for(values.size(), opt.threads, [&](std::size_t i) {
        const ScanPoint pt = apply_axis(cfg, axis.variable, values[i]);
        const Built b = build_protocol(cfg, pt.params, pt.perturbation);
        const Perturbation& pert = pt.perturbation;
        const double amp = pert.amplitude();
        const std::size_t n = steps_for(cfg, pt.params, pert.max_omega());
        const double exact = excess_energy_exact(pt.params, b.protocol, pert, cfg.level, n).value;
        const ExcitationReport r =
            pert.is_frequency() ? second_order_energy_freq(pt.params, b.protocol, pert, cfg.level)
                                : second_order_energy_pos(pt.params, b.protocol, pert, cfg.level);
        const double approx = amp * amp * r.total_quanta;
        const double diff = std::abs(exact - approx);
        const double rel = approx > 0.0 ? diff / approx : diff;
        rows[i] = {values[i], exact, approx, rel};
    });
    Csv csv(cfg, "verify", {"scan_value", "exact_quanta", "perturbative_quanta", "relative_error"});
    double worst = 0.0;
    double worst_at = values.empty() ? kNaN : values.front();
    for (const auto& r : rows) {
        csv.row(r);
        if (r[3] > worst) {
            worst = r[3];
            worst_at = r[0];
        }
    }
    csv.comment("max_relative_error: " + fmt(worst));
    json report = {{"command", "verify"},
                   {"variable", axis.variable},
                   {"points", values.size()},
                   {"amplitude", cfg.perturbation.amplitude()},
                   {"max_relative_error", worst},
                   {"max_relative_error_at", worst_at},
                   {"params", params_json(cfg.params, cfg.level)},
                   {"config_hash", hash_hex(cfg.hash)}};
    if (cfg.perturbation.amplitude() > 0.05) {
        report["warning"] = "amplitude above 0.05: perturbative accuracy degraded";
    }
    emit(opt, csv.str(), report, out, err);
    return kOk;
}

std::string trajectory_csv(const RunConfig& cfg, const std::string& command, const Built& b,
                           const PhysicalParams& params) {
    Csv csv(cfg, command, {"t", "qc0", "qc0_dot", "qc0_ddot", "Q0"});
    const std::size_t n = cfg.samples;
    for (std::size_t k = 0; k <= n; ++k) {
        const double t =
            (k == n) ? params.duration : params.duration * static_cast<double>(k) / static_cast<double>(n);
        const Kinematics q = b.protocol.eval(t);
        csv.row({t, q.position, q.velocity, q.acceleration, b.trap(t)});
    }
    return csv.str();
}

json trajectory_report(const RunConfig& cfg, const Built& b, const PhysicalParams& params,
                       const std::vector<double>& targets) {
    const double dT = params.distance / params.duration;
    json tj = json::array();
    for (double w : targets) {
        const double I = std::abs(target_integral(b.protocol, w));
        tj.push_back({{"omega_rad_per_s", w}, {"abs_I", I}, {"abs_I_over_d_per_T", I / dT}});
    }
    const CorridorReport cr = corridor_check(b.trap, params, std::max<std::size_t>(cfg.samples, 1000));
    const BoundaryReport br = b.protocol.boundary_check();
    json report = {{"protocol", to_string(b.protocol.kind())},
                   {"params", params_json(params, cfg.level)},
                   {"targets", tj},
                   {"corridor", {{"above_m", cr.above}, {"below_m", cr.below}}},
                   {"boundary_worst_scaled", br.worst()},
                   {"coefficients", b.protocol.coefficients()},
                   {"config_hash", hash_hex(cfg.hash)}};
    if (b.system) {
        const AnsatzSystem& s = *b.system;
        report["system"] = {{"terms", s.terms},
                            {"rows", s.rows()},
                            {"rank", s.rank},
                            {"condition_number", s.condition_number},
                            {"residual", s.residual}};
        json deriv = json::array();
        for (double w : targets) {
            for (int r = 1; r <= cfg.protocol.omega_derivatives; ++r) {
                std::complex<double> acc = 0.0;
                for (std::size_t j = 0; j < s.coefficients.size(); ++j) {
                    acc += s.coefficients[j] *
                           ansatz_Ij_derivative(params, static_cast<int>(j + 1), w, r, 0);
                }
                deriv.push_back({{"omega_rad_per_s", w}, {"wrt", "omega"}, {"order", r},
                                 {"abs_value", std::abs(acc)}});
            }
            for (int q = 1; q <= cfg.protocol.omega0_derivatives; ++q) {
                std::complex<double> acc = 0.0;
                for (std::size_t j = 0; j < s.coefficients.size(); ++j) {
                    acc += s.coefficients[j] *
                           ansatz_Ij_derivative(params, static_cast<int>(j + 1), w, 0, q);
                }
                deriv.push_back({{"omega_rad_per_s", w}, {"wrt", "omega0"}, {"order", q},
                                 {"abs_value", std::abs(acc)}});
            }
        }
        report["derivative_residuals"] = deriv;
    }
    return report;
}

int cmd_design(const RunConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err) {
    const Built b = build_protocol(cfg, cfg.params, cfg.perturbation);
    std::vector<double> targets = cfg.protocol.targets;
    if (targets.empty() && !cfg.perturbation.components.empty()) {
        targets.push_back(primary_omega(cfg.perturbation));
    }
    json report = trajectory_report(cfg, b, cfg.params, targets);
    report["command"] = "design";
    emit(opt, trajectory_csv(cfg, "design", b, cfg.params), report, out, err);
    return kOk;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double lx = std::log(x[k]);
        const double ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double dn = static_cast<double>(n);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

int cmd_oct(const RunConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err) {
    const double omega = primary_omega(cfg.perturbation);
    if (cfg.scan) {
        const ScanAxis& axis = *cfg.scan;
        if (axis.variable == "amplitude") {
            throw ConfigError("oct sweep variable must be duration, omega0, omega or distance");
        }
        const std::vector<double> values = axis.values();
        std::vector<std::vector<double>> rows(values.size());
        parallel_for(values.size(), opt.threads, [&](std::size_t i) {
            const ScanPoint pt = apply_axis(cfg, axis.variable, values[i]);
            const double w = primary_omega(pt.perturbation);
            const std::size_t n = std::max<std::size_t>(2000, steps_for(cfg, pt.params, w));
            const OctSolution sol = oct_solve(pt.params, w, n);
            const Protocol poly = Protocol::polynomial5(pt.params);
            const double e_poly = avg_dynamical_potential(
                pt.params, poly, trap_from_classical(poly, pt.params), pt.perturbation, false, n);
            rows[i] = {values[i], sol.energy_avg, e_poly, sol.endpoint_residual};
        });
        Csv csv(cfg, "oct", {"scan_value", "E_bar_J", "E_bar_polynomial5_J", "endpoint_residual"});
        std::vector<double> x;
        std::vector<double> y;
        for (const auto& r : rows) {
            csv.row(r);
            x.push_back(r[0]);
            y.push_back(r[1]);
        }
        json report = {{"command", "oct"},
                       {"mode", "sweep"},
                       {"variable", axis.variable},
                       {"points", values.size()},
                       {"params", params_json(cfg.params, cfg.level)},
                       {"config_hash", hash_hex(cfg.hash)}};
        if (values.size() >= 2) {
            report["loglog_slope"] = loglog_slope(x, y);
        }
        emit(opt, csv.str(), report, out, err);
        return kOk;
    }
    const std::size_t n = std::max<std::size_t>(2000, steps_for(cfg, cfg.params, omega));
    const OctSolution sol = oct_solve(cfg.params, omega, n);
    Csv csv(cfg, "oct", {"t", "u", "Q0", "x1", "x2", "x3", "x4"});
    for (std::size_t k = 0; k < sol.time.size(); ++k) {
        csv.row({sol.time[k], sol.control[k], sol.trap[k], sol.x[0][k], sol.x[1][k], sol.x[2][k],
                 sol.x[3][k]});
    }
    json report = {{"command", "oct"},
                   {"mode", "single"},
                   {"omega_rad_per_s", omega},
                   {"E_bar_J", sol.energy_avg},
                   {"E_bar_quanta", sol.energy_avg / cfg.params.quantum()},
                   {"c", sol.c},
                   {"jump_start_m", sol.jump_start},
                   {"jump_end_m", sol.jump_end},
                   {"endpoint_residual", sol.endpoint_residual},
                   {"determinant", sol.determinant},
                   {"steps", n},
                   {"params", params_json(cfg.params, cfg.level)},
                   {"config_hash", hash_hex(cfg.hash)}};
    emit(opt, csv.str(), report, out, err);
    return kOk;
}

int cmd_ga(const RunConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err) {
    if (cfg.protocol.type != "fourier") {
        throw ConfigError("ga needs protocol.type = 'fourier'");
    }
    GaConfig ga = cfg.ga;
    if (opt.seed) {
        ga.seed = *opt.seed;
    }
    ga.threads = opt.threads;
    const DesignConstraints c = constraints_for(cfg, cfg.perturbation);
    const AnsatzSystem sys = assemble_ansatz(cfg.params, c);
    const std::size_t samples = std::max<std::size_t>(cfg.samples, 1000);
    const GaResult res = ga_minimize(cfg.params, sys, corridor_cost_function(cfg.params, samples), ga);
    AnsatzSystem solved = sys;
    solved.coefficients = res.coefficients;
    solved.rank = sys.terms - nullspace_parametrize(sys).dimension();
    const Built b{res.protocol, trap_from_classical(res.protocol, cfg.params), std::nullopt,
                  std::nullopt};
    json report = trajectory_report(cfg, b, cfg.params, c.targets);
    report["command"] = "ga";
    report["best_cost"] = res.best_cost;
    report["generations"] = res.generations;
    report["seed"] = ga.seed;
    report["converged"] = res.converged;
    report["nullspace_dimension"] = sys.terms - solved.rank;
    emit(opt, trajectory_csv(cfg, "ga", b, cfg.params), report, out, err);
    return kOk;
}

void error_line(std::ostream& err, const char* kind, int code, const std::string& message) {
    err << json{{"error", {{"kind", kind}, {"exit_code", code}, {"message", message}}}}.dump()
        << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Design, analyze and optimize STA shuttling protocols", "shuttle"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    Options opt;
    std::uint64_t seed = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "JSON run configuration")->required();
        sub->add_option("--out", opt.out, "CSV output path (stdout when absent)");
        sub->add_option("--seed", seed, "RNG seed (overrides the config)");
        sub->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
    };
    std::vector<std::pair<std::string, CLI::App*>> subs;
    for (const char* name : {"scan", "design", "verify", "oct", "ga"}) {
        CLI::App* sub = app.add_subcommand(name);
        add_common(sub);
        subs.emplace_back(name, sub);
    }
    subs[0].second->description("second-order excitation over one scan variable");
    subs[1].second->description("design a robust trajectory");
    subs[2].second->description("exact ODE vs second-order theory over one scan variable");
    subs[3].second->description("optimal-control extremal (single solve or sweep)");
    subs[4].second->description("genetic search for corridor-respecting trajectories");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion& e) {
        out << kToolVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        error_line(err, "config", kConfigError, e.what());
        return kConfigError;
    }
    std::string command;
    for (auto& [name, sub] : subs) {
        if (sub->parsed()) {
            command = name;
            if (sub->count("--seed")) {
                opt.seed = seed;
            }
        }
    }

    try {
        RunConfig cfg = load_config(opt.config);
        if (opt.seed) {
            cfg.ga.seed = *opt.seed;
        }
        if (command == "scan") return cmd_scan(cfg, opt, out, err);
        if (command == "design") return cmd_design(cfg, opt, out, err);
        if (command == "verify") return cmd_verify(cfg, opt, out, err);
        if (command == "oct") return cmd_oct(cfg, opt, out, err);
        return cmd_ga(cfg, opt, out, err);
    } catch (const ConfigError& e) {
        error_line(err, "config", kConfigError, e.what());
        return kConfigError;
    } catch (const PreconditionError& e) {
        error_line(err, "config", kConfigError, e.what());
        return kConfigError;
    } catch (const RangeError& e) {
        error_line(err, "config", kConfigError, e.what());
        return kConfigError;
    } catch (const DesignError& e) {
        error_line(err, "design", kDesignError, e.what());
        return kDesignError;
    } catch (const NumericalError& e) {
        error_line(err, "numerical", kNumericalError, e.what());
        return kNumericalError;
    } catch (const nlohmann::json::exception& e) {
        error_line(err, "config", kConfigError, e.what());
        return kConfigError;
    }
}

}  // namespace shuttle::cli

#include "delayev/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "delayev/semigroup.hpp"
#include "delayev/solver.hpp"
#include "delayev/trajectory_io.hpp"

namespace delayev {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_json_file(const fs::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open output file: " + path.string());
    out << doc.dump(2) << "\n";
}

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

json solve_report_json(const SolveReport& r, const SolverConfig& sc) {
    json j;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["final_residual"] = r.final_residual;
    j["omega_prime_used"] = r.omega_prime_used;
    j["residual_history"] = r.residual_history;
    j["T"] = sc.horizon;
    j["dt"] = sc.dt;
    j["tol"] = sc.tol;
    return j;
}

fs::path prepare_outdir(const RunConfig& cfg, const std::string& outdir) {
    fs::path dir = outdir.empty() ? fs::path(cfg.output_dir) : fs::path(outdir);
    fs::create_directories(dir);
    return dir;
}

bool check_ok(const CertificateReport& rep) {
    if (!rep.passed.assumption)
        return false;
    if (rep.omega_decay_signed && rep.lipschitz < rep.omega && !rep.passed.decay)
        return false;
    return true;
}

/// Navigate a dot-separated path ("channels.0.kernel.k0") to a numeric leaf.
json* resolve_numeric_path(json& doc, const std::string& path) {
    json* cur = &doc;
    std::stringstream ss(path);
    std::string token;
    while (std::getline(ss, token, '.')) {
        if (token.empty())
            return nullptr;
        if (cur->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(token);
            } catch (...) {
                return nullptr;
            }
            if (idx >= cur->size())
                return nullptr;
            cur = &(*cur)[idx];
        } else if (cur->is_object()) {
            if (!cur->contains(token))
                return nullptr;
            cur = &(*cur)[token];
        } else {
            return nullptr;
        }
    }
    return cur->is_number() ? cur : nullptr;
}

struct SweepRow {
    double value = 0.0;
    double assumption_lhs = std::numeric_limits<double>::quiet_NaN();
    bool passed = false;
    double fitted_rate = std::numeric_limits<double>::quiet_NaN();
    double theoretical_rate = std::numeric_limits<double>::quiet_NaN();
};

SweepRow sweep_one(const RunConfig& base, const std::string& path, double value) {
    SweepRow row;
    row.value = value;
    try {
        json doc = base.raw;
        json* leaf = resolve_numeric_path(doc, path);
        if (!leaf)
            throw ConfigError("sweep: path '" + path + "' no longer resolves");
        *leaf = value;
        RunConfig cfg = parse_config(doc);
        BuiltModel built = build_from_config(cfg);
        CertificateReport rep = build_certificate_report(built.system, cfg.quad);
        row.assumption_lhs = rep.assumption_lhs;
        row.theoretical_rate = rep.envelope_rate;
        row.passed = rep.omega_decay_signed ? rep.passed.decay : rep.passed.assumption;
        try {
            PicardOptions opts;
            opts.tol = cfg.solver.tol;
            opts.max_iter = cfg.solver.max_iter;
            SolveReport solve =
                picard_solve(built.system, cfg.solver.horizon, cfg.solver.dt, opts);
            const double t_end = solve.trajectory.grid().back();
            row.fitted_rate =
                fit_decay_rate(solve.trajectory, 0.5 * t_end, t_end).first;
        } catch (const Error&) {
            // leave the fitted rate NaN; the certificate columns stand
        }
    } catch (const Error&) {
        // row stays marked as failed
    }
    return row;
}

} // namespace

int cmd_check(const RunConfig& cfg, const std::string& outdir) {
    const fs::path dir = prepare_outdir(cfg, outdir);
    BuiltModel built = build_from_config(cfg);
    CertificateReport rep = build_certificate_report(built.system, cfg.quad);
    write_json_file(dir / "certificate.json", report_to_json(rep));
    const bool ok = check_ok(rep);
    std::cout << (ok ? "certificate: PASS" : "certificate: FAIL")
              << " (lhs=" << rep.assumption_lhs << " + err=" << rep.quad_error
              << " + tail=" << rep.tail_error << " vs 1/M=" << rep.assumption_rhs
              << ")\n";
    return ok ? 0 : 2;
}

int cmd_simulate(const RunConfig& cfg, const std::string& outdir) {
    const fs::path dir = prepare_outdir(cfg, outdir);
    BuiltModel built = build_from_config(cfg);
    CertificateReport rep = build_certificate_report(built.system, cfg.quad);

    PicardOptions opts;
    opts.tol = cfg.solver.tol;
    opts.max_iter = cfg.solver.max_iter;
    SolveReport solve = [&] {
        try {
            return picard_solve(built.system, cfg.solver.horizon, cfg.solver.dt, opts);
        } catch (PicardNonConvergence& e) {
            return std::move(e.report);
        }
    }();

    std::optional<EnvelopeColumn> env;
    if (rep.passed.decay)
        env = EnvelopeColumn{rep.alpha_tilde, rep.envelope_rate};
    write_trajectory_csv(dir / "trajectory.csv", solve.trajectory, env);
    write_json_file(dir / "solve.json", solve_report_json(solve, cfg.solver));
    std::cout << (solve.converged ? "simulate: converged" : "simulate: NOT converged")
              << " after " << solve.iterations << " sweeps (residual "
              << solve.final_residual << ")\n";
    return solve.converged ? 0 : 3;
}

int cmd_certify_decay(const RunConfig& cfg, const std::string& outdir) {
    const fs::path dir = prepare_outdir(cfg, outdir);
    BuiltModel built = build_from_config(cfg);
    CertificateReport rep = build_certificate_report(built.system, cfg.quad);
    write_json_file(dir / "certificate.json", report_to_json(rep));
    if (!rep.passed.decay) {
        json j;
        j["passed"] = false;
        j["stage"] = "certificate";
        write_json_file(dir / "decay.json", j);
        std::cout << "certify-decay: certificate failed before simulation\n";
        return 2;
    }

    PicardOptions opts;
    opts.tol = cfg.solver.tol;
    opts.max_iter = cfg.solver.max_iter;
    SolveReport solve = [&] {
        try {
            return picard_solve(built.system, cfg.solver.horizon, cfg.solver.dt, opts);
        } catch (PicardNonConvergence& e) {
            return std::move(e.report);
        }
    }();
    write_trajectory_csv(dir / "trajectory.csv", solve.trajectory,
                         EnvelopeColumn{rep.alpha_tilde, rep.envelope_rate});
    write_json_file(dir / "solve.json", solve_report_json(solve, cfg.solver));
    if (!solve.converged) {
        json j;
        j["passed"] = false;
        j["stage"] = "solver";
        write_json_file(dir / "decay.json", j);
        return 3;
    }

    EnvelopeCheck env = verify_envelope(solve, rep);
    json j;
    j["passed"] = env.passed;
    j["stage"] = "envelope";
    j["worst_margin"] = env.worst_margin;
    j["worst_time"] = env.worst_time;
    j["alpha_tilde"] = rep.alpha_tilde;
    j["envelope_rate"] = rep.envelope_rate;
    j["slack"] = 1e-8;
    write_json_file(dir / "decay.json", j);
    std::cout << (env.passed ? "certify-decay: PASS" : "certify-decay: envelope violated")
              << " (worst margin " << env.worst_margin << " at t=" << env.worst_time
              << ")\n";
    return env.passed ? 0 : 4;
}

int cmd_sweep(const RunConfig& cfg, const std::string& param_path,
              const std::vector<double>& values, int workers,
              const std::string& outdir) {
    const fs::path dir = prepare_outdir(cfg, outdir);
    {
        json probe = cfg.raw;
        if (!resolve_numeric_path(probe, param_path))
            throw ConfigError("sweep: path '" + param_path +
                              "' does not address a numeric config field");
    }

    std::vector<SweepRow> rows(values.size());
    if (workers > 1 && values.size() > 1) {
        std::vector<std::future<SweepRow>> futures;
        futures.reserve(values.size());
        for (double v : values)
            futures.push_back(std::async(std::launch::async, sweep_one, std::cref(cfg),
                                         param_path, v));
        for (std::size_t i = 0; i < futures.size(); ++i)
            rows[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < values.size(); ++i)
            rows[i] = sweep_one(cfg, param_path, values[i]);
    }

    std::ofstream out(dir / "sweep.csv");
    if (!out)
        throw Error("cannot open sweep.csv for writing");
    out << "parameter,assumption_lhs,passed,fitted_rate,theoretical_rate\n";
    for (const auto& r : rows)
        out << g17(r.value) << ',' << g17(r.assumption_lhs) << ','
            << (r.passed ? "true" : "false") << ',' << g17(r.fitted_rate) << ','
            << g17(r.theoretical_rate) << "\n";
    return 0;
}

int cmd_model_info(const RunConfig& cfg, const std::string& outdir) {
    const fs::path dir = prepare_outdir(cfg, outdir);
    BuiltModel built = build_from_config(cfg);
    json j = built.info.to_json();
    j["dissipativity"] = dissipativity_check(built.system.generator, 100, cfg.seed);
    write_json_file(dir / "model.json", j);
    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace delayev

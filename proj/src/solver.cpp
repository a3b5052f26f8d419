#include "delayev/solver.hpp"

#include <cmath>
#include <sstream>

#include "delayev/linalg.hpp"

namespace delayev {

namespace {

int grid_steps(double horizon, double dt) {
    if (!(horizon > 0.0) || !(dt > 0.0))
        throw DomainError("solver: horizon and dt must be positive");
    const long long n = std::llround(horizon / dt);
    if (n < 1 || std::abs(static_cast<double>(n) * dt - horizon) >
                     1e-9 * std::max(1.0, horizon))
        throw ConfigError("solver: dt must divide the horizon");
    return static_cast<int>(n);
}

std::vector<double> uniform_grid(int n, double dt) {
    std::vector<double> grid(n + 1);
    for (int k = 0; k <= n; ++k)
        grid[k] = k * dt;
    return grid;
}

/// Delayed value of channel ch at time s against the sampled sweep `u`:
/// the history value (already B_i U) when s - tau(s) <= 0, otherwise B_i
/// applied to the linear interpolant of u.
Eigen::VectorXd delayed_value(const DelayChannel& ch, double s, double dt, int n,
                              const std::vector<Eigen::VectorXd>& u) {
    const double zeta = s - ch.delay.tau(s);
    if (zeta <= 0.0)
        return ch.history.eval(zeta);
    const double pos = zeta / dt;
    int idx = static_cast<int>(pos);
    double th = pos - idx;
    if (idx >= n) {
        idx = n - 1;
        th = 1.0;
    }
    if (th == 0.0)
        return ch.op_matrix * u[idx];
    return ch.op_matrix * ((1.0 - th) * u[idx] + th * u[idx + 1]).eval();
}

void validate_delays_over(const SystemSpec& sys, double horizon) {
    for (const auto& ch : sys.delays.channels)
        ch.delay.validate(horizon);
}

} // namespace

double pick_weight_rate(const SystemSpec& sys) {
    try {
        if (auto wp = select_omega_prime(sys))
            return *wp;
    } catch (const ConfigError&) {
        // no computable m_tilde (e.g. kernel without a tail bound)
    }
    return sys.certificate.rate_magnitude() + 1.0;
}

SolveReport picard_solve(const SystemSpec& sys, double horizon, double dt,
                         const PicardOptions& opts) {
    if (!(opts.tol >= 0.0))
        throw DomainError("picard_solve: tol must be nonnegative");
    if (opts.max_iter < 1)
        throw DomainError("picard_solve: max_iter must be positive");
    sys.validate();
    validate_delays_over(sys, horizon);
    const int n = grid_steps(horizon, dt);
    const auto grid = uniform_grid(n, dt);
    const int dim = sys.space->dim();

    const double omega_prime =
        opts.omega_prime ? *opts.omega_prime : pick_weight_rate(sys);

    const Eigen::MatrixXd prop = expm(dt * sys.generator.matrix);

    // Homogeneous part S(t_k) U0 via the cached per-step propagator.
    std::vector<Eigen::VectorXd> hom(n + 1);
    hom[0] = sys.u0;
    for (int k = 1; k <= n; ++k) {
        hom[k] = prop * hom[k - 1];
        if (!hom[k].allFinite())
            throw NumericError("picard_solve: homogeneous part overflowed");
    }

    std::vector<Eigen::VectorXd> cur =
        opts.constant_initial_iterate ? std::vector<Eigen::VectorXd>(n + 1, sys.u0)
                                      : hom;

    std::vector<Eigen::VectorXd> integrand(n + 1, Eigen::VectorXd::Zero(dim));
    std::vector<Eigen::VectorXd> next(n + 1);
    std::vector<double> residuals;
    bool converged = false;
    int sweeps = 0;
    double residual = std::numeric_limits<double>::infinity();

    for (int m = 1; m <= opts.max_iter; ++m) {
        // Integrand of the Duhamel convolution from the previous sweep.
        for (int j = 0; j <= n; ++j) {
            const double s = grid[j];
            Eigen::VectorXd g = sys.nonlinearity.f(cur[j]);
            for (const auto& ch : sys.delays.channels) {
                const double kv = ch.kernel.k(s);
                if (kv != 0.0)
                    g.noalias() += kv * delayed_value(ch, s, dt, n, cur);
            }
            integrand[j] = std::move(g);
        }

        // U(t_k) = S(t_k) U0 + dt (w_k + G_k / 2) with
        // w_{k+1} = P (w_k + G_k), w_1 = P G_0 / 2: the trapezoid rule with
        // S(t_k - t_j) = P^{k-j} applied by repeated multiplication.
        next[0] = sys.u0;
        Eigen::VectorXd w = 0.5 * integrand[0];
        for (int k = 1; k <= n; ++k) {
            w = prop * w;
            next[k] = hom[k] + dt * (w + 0.5 * integrand[k]);
            w += integrand[k];
        }

        residual = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double d = sys.space->norm(next[k] - cur[k]);
            residual = std::max(residual, std::exp(-omega_prime * grid[k]) * d);
        }
        if (!std::isfinite(residual))
            throw NumericError("picard_solve: iteration produced non-finite states");

        cur.swap(next);
        residuals.push_back(residual);
        sweeps = m;
        if (residual <= opts.tol) {
            converged = true;
            break;
        }
    }

    SolveReport report{Trajectory(sys.space, grid, std::move(cur)),
                       sweeps, residual, omega_prime, converged,
                       std::move(residuals)};
    if (!converged && opts.throw_on_failure) {
        std::ostringstream msg;
        msg << "picard_solve: no convergence after " << sweeps
            << " sweeps (residual " << residual << ", tol " << opts.tol << ")";
        throw PicardNonConvergence(msg.str(), std::move(report));
    }
    return report;
}

SolveReport picard_solve(const SystemSpec& sys, double horizon, double dt,
                         double tol, int max_iter) {
    PicardOptions opts;
    opts.tol = tol;
    opts.max_iter = max_iter;
    return picard_solve(sys, horizon, dt, opts);
}

namespace {

/// Four-point Lagrange interpolation on the uniform prefix u[0..k_done].
Eigen::VectorXd cubic_interp(const std::vector<Eigen::VectorXd>& u, double dt,
                             int k_done, double t) {
    const double pos = t / dt;
    int base = static_cast<int>(pos) - 1;
    base = std::max(0, std::min(base, k_done - 3));
    if (k_done < 3) { // short prefix: fall back to linear
        int idx = std::max(0, std::min(static_cast<int>(pos), k_done - 1));
        const double th = std::clamp(pos - idx, 0.0, 1.0);
        return (1.0 - th) * u[idx] + th * u[idx + 1];
    }
    const double x = pos - base;
    double w[4];
    w[0] = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
    w[1] = x * (x - 2.0) * (x - 3.0) / 2.0;
    w[2] = -x * (x - 1.0) * (x - 3.0) / 2.0;
    w[3] = x * (x - 1.0) * (x - 2.0) / 6.0;
    return w[0] * u[base] + w[1] * u[base + 1] + w[2] * u[base + 2] +
           w[3] * u[base + 3];
}

} // namespace

Trajectory steps_solve(const SystemSpec& sys, double horizon, double dt) {
    sys.validate();
    validate_delays_over(sys, horizon);
    const int n = grid_steps(horizon, dt);
    const auto grid = uniform_grid(n, dt);

    // The method of steps needs delays bounded away from zero.
    for (const auto& ch : sys.delays.channels) {
        double min_tau = std::numeric_limits<double>::infinity();
        const int samples = 4096;
        for (int j = 0; j <= samples; ++j)
            min_tau = std::min(min_tau, ch.delay.tau(horizon * j / samples));
        if (min_tau < 10.0 * dt) {
            std::ostringstream msg;
            msg << "steps_solve: delay too small (inf tau = " << min_tau
                << " < 10 dt = " << 10.0 * dt
                << "); only the fixed-point solver applies in this regime";
            throw DomainError(msg.str());
        }
    }

    std::vector<Eigen::VectorXd> u(n + 1);
    u[0] = sys.u0;

    const auto rhs = [&](double t, const Eigen::VectorXd& y, int k_done) {
        Eigen::VectorXd dydt = sys.generator.matrix * y + sys.nonlinearity.f(y);
        for (const auto& ch : sys.delays.channels) {
            const double kv = ch.kernel.k(t);
            if (kv == 0.0)
                continue;
            const double zeta = t - ch.delay.tau(t);
            if (zeta <= 0.0)
                dydt.noalias() += kv * ch.history.eval(zeta);
            else
                dydt.noalias() += kv * (ch.op_matrix * cubic_interp(u, dt, k_done, zeta)).eval();
        }
        return dydt;
    };

    for (int k = 0; k < n; ++k) {
        const double t = grid[k];
        const Eigen::VectorXd& y = u[k];
        const Eigen::VectorXd k1 = rhs(t, y, k);
        const Eigen::VectorXd k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1, k);
        const Eigen::VectorXd k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2, k);
        const Eigen::VectorXd k4 = rhs(t + dt, y + dt * k3, k);
        u[k + 1] = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!u[k + 1].allFinite())
            throw NumericError("steps_solve: state overflowed");
    }
    return Trajectory(sys.space, grid, std::move(u));
}

Trajectory ode_reference(const SystemSpec& sys, double horizon, double dt) {
    sys.validate();
    const int n = grid_steps(horizon, dt);
    const auto grid = uniform_grid(n, dt);

    for (const auto& ch : sys.delays.channels) {
        if (ch.delay.tau0 != 0.0)
            throw DomainError("ode_reference: nonzero delay present; use a delay-aware solver");
        for (int j = 0; j <= 64; ++j)
            if (std::abs(ch.delay.tau(horizon * j / 64.0)) > 1e-12)
                throw DomainError("ode_reference: nonzero delay present; use a delay-aware solver");
    }

    const auto rhs = [&](double t, const Eigen::VectorXd& y) {
        Eigen::VectorXd dydt = sys.generator.matrix * y + sys.nonlinearity.f(y);
        for (const auto& ch : sys.delays.channels) {
            const double kv = ch.kernel.k(t);
            if (kv != 0.0)
                dydt.noalias() += kv * (ch.op_matrix * y);
        }
        return dydt;
    };

    std::vector<Eigen::VectorXd> u(n + 1);
    u[0] = sys.u0;
    for (int k = 0; k < n; ++k) {
        const double t = grid[k];
        const Eigen::VectorXd& y = u[k];
        const Eigen::VectorXd k1 = rhs(t, y);
        const Eigen::VectorXd k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = rhs(t + dt, y + dt * k3);
        u[k + 1] = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!u[k + 1].allFinite())
            throw NumericError("ode_reference: state overflowed");
    }
    return Trajectory(sys.space, grid, std::move(u));
}

EnvelopeCheck verify_envelope(const SolveReport& report, const CertificateReport& cert) {
    if (!cert.passed.decay)
        throw CertificateError("verify_envelope: requires a passed decay certificate");
    const Trajectory& traj = report.trajectory;
    EnvelopeCheck out;
    out.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double env = decay_envelope(cert, traj.time(k));
        const double margin = env - traj.norm(k);
        if (margin < out.worst_margin) {
            out.worst_margin = margin;
            out.worst_time = traj.time(k);
        }
    }
    out.passed = out.worst_margin >= -1e-8;
    return out;
}

std::pair<double, double> fit_decay_rate(const Trajectory& traj, double t_a, double t_b) {
    if (!(t_b > t_a))
        throw DomainError("fit_decay_rate: window must satisfy t_a < t_b");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.time(k);
        if (t < t_a - 1e-12 || t > t_b + 1e-12)
            continue;
        const double nk = traj.norm(k);
        if (!(nk > 0.0))
            throw DomainError("fit_decay_rate: degenerate fit, zero norm inside the window");
        const double y = std::log(nk);
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
        ++count;
    }
    if (count < 2)
        throw DomainError("fit_decay_rate: fewer than two nodes inside the window");
    const double denom = count * sxx - sx * sx;
    if (denom == 0.0)
        throw DomainError("fit_decay_rate: degenerate window");
    const double rate = (count * sxy - sx * sy) / denom;
    const double intercept = (sy - rate * sx) / count;
    return {rate, intercept};
}

} // namespace delayev

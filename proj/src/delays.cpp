#include "delayev/delays.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "delayev/quadrature.hpp"

namespace delayev {

void DelayFunction::validate(double horizon, int n_samples) const {
    if (!tau)
        throw ConfigError("delay: null callback");
    if (!(c < 1.0))
        throw ConfigError("delay: declared slope bound c must satisfy c < 1");
    if (!(slope_min <= c))
        throw ConfigError("delay: declared slope_min exceeds c");
    if (!(tau0 >= 0.0))
        throw ConfigError("delay: tau(0) must be nonnegative");
    if (std::abs(tau(0.0) - tau0) > 1e-9 * (1.0 + tau0))
        throw ConfigError("delay: declared tau0 does not match tau(0)");
    if (!(horizon > 0.0))
        throw DomainError("delay validation: horizon must be positive");

    // Nonnegativity on [-tau0, horizon].
    const int m = std::max(2, n_samples);
    for (int j = 0; j <= m; ++j) {
        const double t = -tau0 + (horizon + tau0) * static_cast<double>(j) / m;
        const double v = tau(t);
        if (!std::isfinite(v))
            throw NumericError("delay: non-finite value");
        if (v < -1e-12)
            throw ConfigError("delay: negative value on the validation grid");
    }
    // Finite-difference slopes on [0, horizon].
    const double h = horizon / m;
    double prev = tau(0.0);
    for (int j = 1; j <= m; ++j) {
        const double cur = tau(j * h);
        const double slope = (cur - prev) / h;
        if (slope > c + 1e-6 || slope < slope_min - 1e-6) {
            std::ostringstream msg;
            msg << "delay: sampled slope " << slope << " near t=" << j * h
                << " violates declared bounds [" << slope_min << ", " << c << "]";
            throw ConfigError(msg.str());
        }
        prev = cur;
    }
}

double KernelCoefficient::tail_cutoff(double eps) const {
    if (!has_tail())
        throw ConfigError("kernel: no closed-form L1 tail bound available");
    if (!(eps > 0.0))
        throw DomainError("kernel tail cutoff: eps must be positive");
    if (l1_tail(0.0) <= eps)
        return 0.0;
    double hi = 1.0;
    int doublings = 0;
    while (l1_tail(hi) > eps) {
        hi *= 2.0;
        if (++doublings > 256)
            throw ConfigError("kernel: L1 tail does not fall below the requested eps");
    }
    double lo = hi * 0.5;
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (l1_tail(mid) > eps ? lo : hi) = mid;
    }
    return hi;
}

void KernelCoefficient::validate_local_integrability() const {
    if (!k)
        throw ConfigError("kernel: null callback");
    const auto& kf = k;
    try {
        QuadResult res = integrate_adaptive(
            [&kf](double t) { return std::abs(kf(t)); }, 0.0, 1.0, 1e-9, 1e-7, 2048);
        if (!std::isfinite(res.value) ||
            res.error > 1e-6 * (1.0 + std::abs(res.value)))
            throw ConfigError("kernel: |k| failed to integrate on [0, 1]");
    } catch (const ToleranceError&) {
        throw ConfigError("kernel: |k| failed to integrate on [0, 1]");
    } catch (const NumericError&) {
        throw ConfigError("kernel: |k| is not finite on [0, 1]");
    }
}

double phi(const DelayChannel& ch, double s) {
    if (s < -ch.delay.tau0 - 1e-12)
        throw DomainError("phi: argument below -tau(0)");
    return s - ch.delay.tau(s);
}

double phi_inverse(const DelayChannel& ch, double z, double tol) {
    if (!(tol > 0.0))
        throw DomainError("phi_inverse: tol must be positive");
    double lo = std::max(z, -ch.delay.tau0);
    double flo = phi(ch, lo);
    if (flo > z + tol)
        throw DomainError("phi_inverse: z below phi(-tau(0))");
    if (std::abs(flo - z) <= tol)
        return lo;

    // phi has slope >= 1 - c > 0, so the root is unique and lies above lo.
    double width = std::max({ch.delay.tau0, tol, 1e-3});
    int doublings = 0;
    while (phi(ch, lo + width) < z) {
        width *= 2.0;
        if (++doublings > 64)
            throw ConvergenceError(
                "phi_inverse: bracket expansion failed; the delay violates its declared bounds");
    }
    double hi = lo + width;
    double mid = lo;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double fm = phi(ch, mid);
        if (std::abs(fm - z) <= tol)
            return mid;
        (fm < z ? lo : hi) = mid;
        if (hi - lo < 1e-17 * (1.0 + std::abs(z)))
            break;
    }
    if (std::abs(phi(ch, mid) - z) > tol)
        throw ConvergenceError("phi_inverse: bisection failed to reach the requested tolerance");
    return mid;
}

double phi_inverse(const DelayChannel& ch, double z) {
    return phi_inverse(ch, z, 1e-10 * (1.0 + std::abs(z)));
}

double effective_weight(const DelayChannel& ch, double z) {
    const double s = phi_inverse(ch, z);
    return std::abs(ch.kernel.k(s)) / (1.0 - ch.delay.c);
}

void DelayFamily::validate(const StateSpace& space) const {
    if (!(eps_tail >= 0.0))
        throw ConfigError("delay family: eps_tail must be nonnegative");
    for (std::size_t i = 0; i < channels.size(); ++i) {
        const DelayChannel& ch = channels[i];
        std::ostringstream where;
        where << "channel " << i << ": ";
        if (!(ch.delay.c < 1.0))
            throw ConfigError(where.str() + "slope bound c must be < 1");
        if (!ch.delay.tau)
            throw ConfigError(where.str() + "null delay callback");
        if (std::abs(ch.delay.tau(0.0) - ch.delay.tau0) > 1e-9 * (1.0 + ch.delay.tau0))
            throw ConfigError(where.str() + "declared tau0 does not match tau(0)");
        if (ch.op_matrix.rows() != space.dim() || ch.op_matrix.cols() != space.dim())
            throw DimensionError(where.str() + "operator dimension mismatch");
        const double computed = space.operator_norm(ch.op_matrix);
        if (ch.op_norm_b < computed * (1.0 - 1e-9)) {
            std::ostringstream msg;
            msg << where.str() << "declared op_norm_b=" << ch.op_norm_b
                << " is below the computed operator norm " << computed;
            throw ConfigError(msg.str());
        }
        if (ch.history.dim() != space.dim())
            throw DimensionError(where.str() + "history dimension mismatch");
        if (ch.history.tau0() + 1e-12 < ch.delay.tau0)
            throw ConfigError(where.str() + "history domain does not cover [-tau(0), 0]");
        ch.kernel.validate_local_integrability();
    }
}

double family_tau_star(const DelayFamily& fam) {
    double t = 0.0;
    for (const auto& ch : fam.channels)
        t = std::max(t, ch.delay.tau0);
    if (fam.tail_sup) {
        if (std::isinf(*fam.tail_sup))
            throw UnsupportedError(
                "family_tau_star: unbounded tail supremum of tau_i(0) is rejected");
        t = std::max(t, *fam.tail_sup);
    }
    return t;
}

} // namespace delayev

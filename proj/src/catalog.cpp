#include "delayev/catalog.hpp"

#include <algorithm>
#include <cmath>

namespace delayev {

namespace {

double get_param(const CatalogEntry& e, const std::string& name) {
    auto it = e.params.find(name);
    if (it == e.params.end())
        throw ConfigError("catalog entry '" + e.kind + "': missing parameter '" + name + "'");
    return it->second;
}

double get_param_or(const CatalogEntry& e, const std::string& name, double fallback) {
    auto it = e.params.find(name);
    return it == e.params.end() ? fallback : it->second;
}

void check_table(const CatalogEntry& e) {
    if (e.times.size() < 2 || e.times.size() != e.values.size())
        throw ConfigError("piecewise_table: needs equal-length times/values with >= 2 samples");
    for (std::size_t j = 1; j < e.times.size(); ++j)
        if (!(e.times[j] > e.times[j - 1]))
            throw ConfigError("piecewise_table: times must be strictly increasing");
}

/// Piecewise-linear evaluation with clamped extension outside the table.
double table_eval_clamped(const std::vector<double>& ts, const std::vector<double>& vs,
                          double t) {
    if (t <= ts.front()) return vs.front();
    if (t >= ts.back()) return vs.back();
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
    const std::size_t lo = hi - 1;
    const double th = (t - ts[lo]) / (ts[hi] - ts[lo]);
    return (1.0 - th) * vs[lo] + th * vs[hi];
}

/// Exact integral of |linear interpolant| over one segment.
double seg_abs_integral(double t0, double t1, double v0, double v1) {
    const double len = t1 - t0;
    if (v0 == 0.0 && v1 == 0.0) return 0.0;
    if (v0 * v1 >= 0.0)
        return 0.5 * (std::abs(v0) + std::abs(v1)) * len;
    const double tc = t0 + len * v0 / (v0 - v1); // sign change
    return 0.5 * std::abs(v0) * (tc - t0) + 0.5 * std::abs(v1) * (t1 - tc);
}

} // namespace

DelayFunction make_delay(const CatalogEntry& entry, double declared_c,
                         std::optional<double> slope_min_override) {
    DelayFunction d;
    d.c = declared_c;
    if (entry.kind == "constant") {
        const double v = get_param(entry, "value");
        d.tau = [v](double) { return v; };
        d.tau0 = v;
        d.slope_min = 0.0;
    } else if (entry.kind == "linear") {
        const double v0 = get_param(entry, "value");
        const double slope = get_param(entry, "slope");
        d.tau = [v0, slope](double t) { return v0 + slope * t; };
        d.tau0 = v0;
        d.slope_min = slope;
    } else if (entry.kind == "sinusoidal") {
        const double base = get_param(entry, "base");
        const double amp = get_param(entry, "amp");
        const double freq = get_param(entry, "freq");
        const double phase = get_param_or(entry, "phase", 0.0);
        d.tau = [=](double t) { return base + amp * std::sin(freq * t + phase); };
        d.tau0 = base + amp * std::sin(phase);
        d.slope_min = -std::abs(amp * freq);
    } else if (entry.kind == "piecewise_table") {
        check_table(entry);
        auto ts = entry.times;
        auto vs = entry.values;
        d.tau = [ts, vs](double t) { return table_eval_clamped(ts, vs, t); };
        d.tau0 = table_eval_clamped(ts, vs, 0.0);
        double smin = 0.0;
        for (std::size_t j = 1; j < ts.size(); ++j)
            smin = std::min(smin, (vs[j] - vs[j - 1]) / (ts[j] - ts[j - 1]));
        d.slope_min = smin;
    } else {
        throw ConfigError("catalog: unknown delay kind '" + entry.kind + "'");
    }
    if (slope_min_override)
        d.slope_min = *slope_min_override;
    return d;
}

KernelCoefficient make_kernel(const CatalogEntry& entry) {
    KernelCoefficient kc;
    if (entry.kind == "constant") {
        const double k0 = get_param(entry, "value");
        kc.k = [k0](double) { return k0; };
        if (k0 == 0.0)
            kc.l1_tail = [](double) { return 0.0; };
    } else if (entry.kind == "exp_decay_kernel") {
        const double k0 = get_param(entry, "k0");
        const double lambda = get_param(entry, "lambda");
        if (!(lambda > 0.0))
            throw ConfigError("exp_decay_kernel: lambda must be positive");
        kc.k = [k0, lambda](double t) { return k0 * std::exp(-lambda * t); };
        kc.l1_tail = [k0, lambda](double t) {
            return std::abs(k0) * std::exp(-lambda * std::max(t, 0.0)) / lambda;
        };
    } else if (entry.kind == "poly_decay_kernel") {
        const double k0 = get_param(entry, "k0");
        const double p = get_param(entry, "p");
        if (!(p > 0.0))
            throw ConfigError("poly_decay_kernel: p must be positive");
        kc.k = [k0, p](double t) { return k0 * std::pow(1.0 + std::max(t, 0.0), -p); };
        if (p > 1.0)
            kc.l1_tail = [k0, p](double t) {
                return std::abs(k0) * std::pow(1.0 + std::max(t, 0.0), 1.0 - p) / (p - 1.0);
            };
    } else if (entry.kind == "linear") {
        const double v0 = get_param(entry, "value");
        const double slope = get_param(entry, "slope");
        kc.k = [v0, slope](double t) { return v0 + slope * t; };
        if (v0 == 0.0 && slope == 0.0)
            kc.l1_tail = [](double) { return 0.0; };
    } else if (entry.kind == "sinusoidal") {
        const double base = get_param(entry, "base");
        const double amp = get_param(entry, "amp");
        const double freq = get_param(entry, "freq");
        const double phase = get_param_or(entry, "phase", 0.0);
        kc.k = [=](double t) { return base + amp * std::sin(freq * t + phase); };
    } else if (entry.kind == "piecewise_table") {
        check_table(entry);
        auto ts = entry.times;
        auto vs = entry.values;
        // Kernel tables are compactly supported: zero outside [t_first, t_last].
        kc.k = [ts, vs](double t) {
            if (t < ts.front() || t > ts.back()) return 0.0;
            return table_eval_clamped(ts, vs, t);
        };
        kc.l1_tail = [ts, vs](double t) {
            if (t >= ts.back()) return 0.0;
            double acc = 0.0;
            for (std::size_t j = 1; j < ts.size(); ++j) {
                if (ts[j] <= t) continue;
                const double a = std::max(t, ts[j - 1]);
                const double va = table_eval_clamped(ts, vs, a);
                acc += seg_abs_integral(a, ts[j], va, vs[j]);
            }
            return acc;
        };
    } else {
        throw ConfigError("catalog: unknown kernel kind '" + entry.kind + "'");
    }
    return kc;
}

std::function<double(double)> make_profile(const CatalogEntry& entry) {
    if (entry.kind == "constant") {
        const double v = get_param(entry, "value");
        return [v](double) { return v; };
    }
    if (entry.kind == "linear") {
        const double v0 = get_param(entry, "value");
        const double slope = get_param(entry, "slope");
        return [v0, slope](double t) { return v0 + slope * t; };
    }
    if (entry.kind == "sinusoidal") {
        const double base = get_param(entry, "base");
        const double amp = get_param(entry, "amp");
        const double freq = get_param(entry, "freq");
        const double phase = get_param_or(entry, "phase", 0.0);
        return [=](double t) { return base + amp * std::sin(freq * t + phase); };
    }
    if (entry.kind == "exp_decay_kernel") {
        const double k0 = get_param(entry, "k0");
        const double lambda = get_param(entry, "lambda");
        return [k0, lambda](double t) { return k0 * std::exp(-lambda * t); };
    }
    if (entry.kind == "poly_decay_kernel") {
        const double k0 = get_param(entry, "k0");
        const double p = get_param(entry, "p");
        return [k0, p](double t) { return k0 * std::pow(1.0 + std::abs(t), -p); };
    }
    if (entry.kind == "piecewise_table") {
        check_table(entry);
        auto ts = entry.times;
        auto vs = entry.values;
        return [ts, vs](double t) { return table_eval_clamped(ts, vs, t); };
    }
    throw ConfigError("catalog: unknown profile kind '" + entry.kind + "'");
}

} // namespace delayev

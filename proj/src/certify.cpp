#include "delayev/certify.hpp"

#include <cmath>
#include <sstream>

#include "delayev/quadrature.hpp"

namespace delayev {

namespace {

struct ChannelPieces {
    double hist_g = 0.0, hist_g_err = 0.0; // integral of ew * ||g||_H over [-tau0, 0]
    double hist_1 = 0.0, hist_1_err = 0.0; // integral of ew over [-tau0, 0]
    double fut = 0.0, fut_err = 0.0;       // integral of ew over [0, inf), tail folded in
};

ChannelPieces compute_channel_pieces(const SystemSpec& sys, const DelayChannel& ch,
                                     const QuadConfig& quad) {
    ChannelPieces out;
    const double tau0 = ch.delay.tau0;

    if (!ch.kernel.has_tail()) {
        std::ostringstream msg;
        msg << "channel " << ch.index
            << ": kernel has no L1 tail bound; the assumption integrals need one";
        throw ConfigError(msg.str());
    }
    double s_cut = quad.cutoff_override ? std::max(*quad.cutoff_override, 0.0)
                                        : ch.kernel.tail_cutoff(quad.tail_eps);
    ch.delay.validate(std::max(1.0, s_cut));

    if (tau0 > 0.0) {
        const auto g_norm = [&](double z) {
            return effective_weight(ch, z) * sys.space->norm(ch.history.eval(z));
        };
        QuadResult qg = integrate_adaptive(g_norm, -tau0, 0.0, quad.abs_tol,
                                           quad.rel_tol, quad.max_panels);
        out.hist_g = qg.value;
        out.hist_g_err = qg.error;
        const auto ew = [&](double z) { return effective_weight(ch, z); };
        QuadResult q1 = integrate_adaptive(ew, -tau0, 0.0, quad.abs_tol,
                                           quad.rel_tol, quad.max_panels);
        out.hist_1 = q1.value;
        out.hist_1_err = q1.error;
    }

    // Forward integral in z up to z_cut = phi(s_eff), then the exact change of
    // variables bounds the remainder by ((1 - slope_min)/(1 - c)) * tail(s_eff).
    const double s_eff = std::max(s_cut, phi_inverse(ch, 0.0));
    const double z_cut = std::max(0.0, phi(ch, s_eff));
    if (z_cut > 0.0) {
        const auto ew = [&](double z) { return effective_weight(ch, z); };
        QuadResult qf = integrate_adaptive(ew, 0.0, z_cut, quad.abs_tol,
                                           quad.rel_tol, quad.max_panels);
        out.fut = qf.value;
        out.fut_err = qf.error;
    }
    const double tail_factor = (1.0 - ch.delay.slope_min) / (1.0 - ch.delay.c);
    out.fut += tail_factor * ch.kernel.l1_tail(s_eff);
    return out;
}

std::vector<ChannelPieces> all_pieces(const SystemSpec& sys, const QuadConfig& quad) {
    std::vector<ChannelPieces> pieces;
    pieces.reserve(sys.delays.channels.size());
    for (const auto& ch : sys.delays.channels)
        pieces.push_back(compute_channel_pieces(sys, ch, quad));
    return pieces;
}

} // namespace

std::pair<double, double> assumption_lhs(const SystemSpec& sys, const QuadConfig& quad) {
    if (!(sys.certificate.m > 0.0))
        throw CertificateError("assumption_lhs: certificate M must be positive");
    const double omega = sys.certificate.rate_magnitude();
    const double weight = std::exp(omega * family_tau_star(sys.delays));
    double lhs = 0.0, err = 0.0;
    const auto pieces = all_pieces(sys, quad);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const double b = sys.delays.channels[i].op_norm_b;
        lhs += weight * pieces[i].hist_g + b * pieces[i].fut;
        err += weight * pieces[i].hist_g_err + b * pieces[i].fut_err;
    }
    return {lhs, err};
}

double m_tilde(const SystemSpec& sys, const QuadConfig& quad) {
    const double omega = sys.certificate.rate_magnitude();
    const double weight = std::exp(omega * family_tau_star(sys.delays));
    double acc = 0.0;
    const auto pieces = all_pieces(sys, quad);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const double b = sys.delays.channels[i].op_norm_b;
        acc += b * (weight * pieces[i].hist_1 + pieces[i].fut);
    }
    return acc;
}

double contraction_constant(const SystemSpec& sys, double omega_prime) {
    const double omega = sys.certificate.rate_magnitude();
    if (!(omega_prime > omega))
        throw DomainError("contraction_constant: omega' must exceed |omega|");
    const double mt = m_tilde(sys, QuadConfig{});
    const double l = sys.nonlinearity.lipschitz;
    return sys.certificate.m * (mt + l / (omega_prime - omega));
}

std::optional<double> select_omega_prime(const SystemSpec& sys) {
    const double m = sys.certificate.m;
    const double omega = sys.certificate.rate_magnitude();
    const double mt = m_tilde(sys, QuadConfig{});
    if (!(m * mt < 1.0))
        return std::nullopt;
    const double l = sys.nonlinearity.lipschitz;
    if (l == 0.0)
        return omega + 1.0;
    return omega + 2.0 * m * l / (1.0 - m * mt);
}

double alpha_tilde(const SystemSpec& sys, const QuadConfig& quad) {
    const double m = sys.certificate.m;
    const double omega = sys.certificate.rate_magnitude();
    const double weight = std::exp(omega * family_tau_star(sys.delays));
    double hist = 0.0;
    const auto pieces = all_pieces(sys, quad);
    for (const auto& p : pieces)
        hist += p.hist_g;
    return m * sys.space->norm(sys.u0) + m * weight * hist;
}

double beta(const SystemSpec& sys, double t) {
    if (!(t >= 0.0))
        throw DomainError("beta: t must be nonnegative");
    double acc = 0.0;
    for (const auto& ch : sys.delays.channels)
        acc += ch.op_norm_b * effective_weight(ch, t);
    return acc;
}

double decay_envelope(const CertificateReport& report, double t) {
    if (!(t >= 0.0))
        throw DomainError("decay_envelope: t must be nonnegative");
    if (!report.passed.decay)
        throw CertificateError("decay_envelope: requires a passed decay certificate");
    return report.alpha_tilde * std::exp(1.0 - report.envelope_rate * t);
}

CertificateReport build_certificate_report(const SystemSpec& sys,
                                           const QuadConfig& quad) {
    CertificateReport rep;
    rep.m = sys.certificate.m;
    rep.omega = sys.certificate.omega;
    rep.omega_decay_signed = sys.certificate.decay_signed();
    rep.lipschitz = sys.nonlinearity.lipschitz;
    rep.tau_star = family_tau_star(sys.delays);
    rep.tail_error = sys.delays.eps_tail;

    const double omega = sys.certificate.rate_magnitude();
    const double weight = std::exp(omega * rep.tau_star);
    const auto pieces = all_pieces(sys, quad);

    double hist_g = 0.0, hist_g_err = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const double b = sys.delays.channels[i].op_norm_b;
        rep.assumption_lhs += weight * pieces[i].hist_g + b * pieces[i].fut;
        rep.quad_error += weight * pieces[i].hist_g_err + b * pieces[i].fut_err;
        rep.m_tilde += b * (weight * pieces[i].hist_1 + pieces[i].fut);
        rep.m_tilde_quad_error += b * (weight * pieces[i].hist_1_err + pieces[i].fut_err);
        hist_g += pieces[i].hist_g;
        hist_g_err += pieces[i].hist_g_err;
    }
    rep.assumption_rhs = 1.0 / rep.m;
    rep.alpha_tilde = rep.m * sys.space->norm(sys.u0) + rep.m * weight * hist_g;
    rep.envelope_rate = rep.omega - rep.lipschitz;

    rep.passed.assumption =
        rep.assumption_lhs + rep.quad_error + rep.tail_error < rep.assumption_rhs;
    rep.passed.m_tilde_small =
        rep.m * (rep.m_tilde + rep.m_tilde_quad_error) < 1.0;
    rep.passed.decay = rep.passed.assumption && rep.omega_decay_signed &&
                       rep.lipschitz < rep.omega;

    if (rep.m * rep.m_tilde < 1.0) {
        const double l = rep.lipschitz;
        const double wp = (l == 0.0)
                              ? omega + 1.0
                              : omega + 2.0 * rep.m * l / (1.0 - rep.m * rep.m_tilde);
        rep.omega_prime = wp;
        rep.contraction_constant = rep.m * (rep.m_tilde + l / (wp - omega));
    }
    return rep;
}

nlohmann::json report_to_json(const CertificateReport& r) {
    nlohmann::json j;
    j["m"] = r.m;
    j["omega"] = r.omega;
    j["omega_decay_signed"] = r.omega_decay_signed;
    j["lipschitz"] = r.lipschitz;
    j["tau_star"] = r.tau_star;
    j["assumption_lhs"] = r.assumption_lhs;
    j["assumption_rhs"] = r.assumption_rhs;
    j["quad_error"] = r.quad_error;
    j["tail_error"] = r.tail_error;
    j["m_tilde"] = r.m_tilde;
    j["m_tilde_quad_error"] = r.m_tilde_quad_error;
    j["alpha_tilde"] = r.alpha_tilde;
    j["envelope_rate"] = r.envelope_rate;
    if (r.omega_prime)
        j["omega_prime"] = *r.omega_prime;
    else
        j["omega_prime"] = nullptr;
    if (r.contraction_constant)
        j["contraction_constant"] = *r.contraction_constant;
    else
        j["contraction_constant"] = nullptr;
    j["passed"] = {{"assumption", r.passed.assumption},
                   {"m_tilde_small", r.passed.m_tilde_small},
                   {"decay", r.passed.decay}};
    return j;
}

} // namespace delayev

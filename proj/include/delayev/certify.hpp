#pragma once

#include <optional>
#include <utility>

#include <json.hpp>

#include "delayev/system.hpp"

namespace delayev {

/// Quadrature tolerances and tail handling for the certificate integrals.
struct QuadConfig {
    double abs_tol = 1e-13;
    double rel_tol = 1e-10;
    int max_panels = 8192;
    double tail_eps = 1e-12;              // kernel tail target for the cutoff
    std::optional<double> cutoff_override; // force the s-space cutoff
};

struct CertificateChecks {
    bool assumption = false;    // Eq-(1.5)-style smallness with error budget
    bool m_tilde_small = false; // M * m_tilde < 1 (contraction feasibility)
    bool decay = false;         // assumption + decay-signed omega + L < omega
};

/// Every explicit constant of the theory evaluated on one system, with the
/// quadrature and truncation error budget made explicit.
struct CertificateReport {
    double m = 1.0;
    double omega = 0.0; // signed certificate rate (positive = decay)
    bool omega_decay_signed = false;
    double lipschitz = 0.0;
    double tau_star = 0.0;

    double assumption_lhs = 0.0;
    double assumption_rhs = 0.0; // 1/M
    double quad_error = 0.0;
    double tail_error = 0.0; // eps_tail carried from the delay family

    double m_tilde = 0.0;
    double m_tilde_quad_error = 0.0;
    double alpha_tilde = 0.0;
    double envelope_rate = 0.0; // omega - L

    std::optional<double> omega_prime;
    std::optional<double> contraction_constant;

    CertificateChecks passed;
};

/// Left-hand side of the smallness assumption and its quadrature error bound.
/// Kernel tails beyond the cutoff are added to the value as upper bounds.
std::pair<double, double> assumption_lhs(const SystemSpec& sys, const QuadConfig& quad);

/// The contraction mass: both integrals weighted by b_i.
double m_tilde(const SystemSpec& sys, const QuadConfig& quad);

/// M (m_tilde + L / (omega' - omega)), with omega read as |certificate rate|.
double contraction_constant(const SystemSpec& sys, double omega_prime);

/// Deterministic weight rate: omega + 2 M L / (1 - M m_tilde) when the
/// contraction is feasible (omega + 1 when L = 0); absent when M m_tilde >= 1.
std::optional<double> select_omega_prime(const SystemSpec& sys);

/// alpha_tilde = M ||U0||_H + M e^{omega tau*} sum_i (history integrals).
double alpha_tilde(const SystemSpec& sys, const QuadConfig& quad);

/// beta(t) = sum_i b_i |k_i(phi_i^{-1}(t))| / (1 - c_i).
double beta(const SystemSpec& sys, double t);

/// alpha_tilde e^{1 - (omega - L) t}; requires a passed decay certificate.
double decay_envelope(const CertificateReport& report, double t);

/// Evaluate everything at once (shared per-channel quadratures).
CertificateReport build_certificate_report(const SystemSpec& sys,
                                           const QuadConfig& quad = {});

nlohmann::json report_to_json(const CertificateReport& report);

} // namespace delayev

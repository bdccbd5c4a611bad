#include "igflow/discrete_flow.hpp"

#include <cmath>
#include <iostream>

#include "igflow/error.hpp"

namespace igflow {

namespace {

void require_levels(const Vector& levels) {
    if (levels.size() == 0) throw ConfigError("energy levels must be non-empty");
    if (!levels.allFinite()) throw ConfigError("energy levels must be finite");
}

// ln sum exp(x_i) with a max shift.
double log_sum_exp(const Vector& x) {
    const double m = x.maxCoeff();
    return m + std::log((x.array() - m).exp().sum());
}

Vector log_weights(const Vector& levels, double beta) {
    require_levels(levels);
    if (!std::isfinite(beta)) throw DomainError("beta must be finite");
    if (beta < 0.0) std::cerr << "warning: negative beta " << beta << " (negative temperature)\n";
    return -beta * levels;
}

}  // namespace

void require_distribution(const Vector& p, const char* what) {
    if (p.size() == 0) throw DomainError(std::string(what) + " is empty");
    if (!p.allFinite() || (p.array() <= 0.0).any())
        throw DomainError(std::string(what) + " must have strictly positive entries, got " +
                          describe(p));
    if (std::abs(p.sum() - 1.0) > 1e-12)
        throw DomainError(std::string(what) + " must sum to 1, got " + describe(p));
}

void FlowEndpoints::validate() const {
    require_distribution(q0, "q0");
    require_distribution(q2, "q2");
    if (q0.size() != q2.size()) throw DomainError("q0 and q2 have different supports");
}

double log_partition_function(const Vector& levels, double beta) {
    return log_sum_exp(log_weights(levels, beta));
}

double partition_function(const Vector& levels, double beta) {
    return std::exp(log_partition_function(levels, beta));
}

Vector canonical_distribution(const Vector& levels, double beta) {
    const Vector w = log_weights(levels, beta);
    return (w.array() - log_sum_exp(w)).exp().matrix();
}

DiscreteEnsemble canonical_ensemble(const Vector& levels, double beta) {
    return {canonical_distribution(levels, beta), levels, beta};
}

double average_energy(const Vector& levels, double beta) {
    return canonical_distribution(levels, beta).dot(levels);
}

double kl_divergence(const Vector& p, const Vector& q) {
    if (p.size() != q.size()) throw DomainError("distributions have different lengths");
    double d = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if ((p[i] > 0.0) != (q[i] > 0.0))
            throw DomainError("distributions have different supports at index " + std::to_string(i));
        if (p[i] > 0.0) d += p[i] * std::log(p[i] / q[i]);
    }
    return d;
}

Vector kl_flow_rhs(const Vector& q, const FlowEndpoints& endpoints) {
    const Vector& q2 = endpoints.q2;
    if (q.size() != q2.size()) throw DomainError("q and q2 have different supports");
    if ((q.array() < kMinProbability).any())
        throw DomainError("probability fell below " + std::to_string(kMinProbability));
    const Vector log_ratio = (q.array() / q2.array()).log().matrix();
    const double D = q.dot(log_ratio);
    return q.cwiseProduct((D - log_ratio.array()).matrix());
}

namespace {

Vector log_unnormalized(double t, const FlowEndpoints& endpoints) {
    const double w = std::exp(-t);
    return w * endpoints.q0.array().log().matrix() +
           (1.0 - w) * endpoints.q2.array().log().matrix();
}

}  // namespace

double log_normalizer(double t, const FlowEndpoints& endpoints) {
    return log_sum_exp(log_unnormalized(t, endpoints));
}

Vector unnormalized_q(double t, const FlowEndpoints& endpoints) {
    return log_unnormalized(t, endpoints).array().exp().matrix();
}

Vector closed_form_q(double t, const FlowEndpoints& endpoints) {
    const Vector x = log_unnormalized(t, endpoints);
    return (x.array() - log_sum_exp(x)).exp().matrix();
}

std::vector<DiscreteSample> integrate_discrete_flow(const FlowEndpoints& endpoints, Span span,
                                                    const IntegratorConfig& cfg) {
    endpoints.validate();
    const Rhs rhs = [&endpoints](double, const Vector& q) { return kl_flow_rhs(q, endpoints); };
    const auto raw = integrate(rhs, endpoints.q0, span, cfg);

    std::vector<DiscreteSample> out;
    out.reserve(raw.size());
    for (const auto& s : raw) {
        const bool outside = (s.y.array() < kMinProbability).any() ||
                             (s.y.size() > 1 && (s.y.array() >= 1.0).any());
        if (outside)
            throw IntegrationError("probability left (0, 1) at t = " + std::to_string(s.param),
                                   out.empty() ? s.param : out.back().t,
                                   out.empty() ? endpoints.q0 : out.back().q);
        if (std::abs(s.y.sum() - 1.0) > 1e-9)
            throw IntegrationError("normalization drifted at t = " + std::to_string(s.param),
                                   out.empty() ? s.param : out.back().t,
                                   out.empty() ? endpoints.q0 : out.back().q);
        out.push_back({s.param, s.y, kl_divergence(s.y, endpoints.q2)});
    }
    return out;
}

Vector canonical_flow_residual(const Vector& levels, double t) {
    const double beta = std::exp(-t);
    const Vector p = canonical_distribution(levels, beta);
    const double U = p.dot(levels);
    const double log_p0 = -std::log(static_cast<double>(levels.size()));
    const Vector log_ratio = (p.array().log() - log_p0).matrix();
    const double mean_log_ratio = p.dot(log_ratio);

    const Vector lhs = beta * (levels.array() - U).matrix();
    const Vector rhs = -(log_ratio.array() - mean_log_ratio).matrix();
    return lhs - rhs;
}

double gompertz(double t, double K, double c) {
    if (!(K > 0.0)) throw DomainError("Gompertz asymptote K must be positive");
    return K * std::exp(c * std::exp(-t));
}

double gompertz_residual(double t, double K, double c) {
    const double f = gompertz(t, K, c);
    const double df = -c * std::exp(-t) * f;
    return df + f * std::log(f / K);
}

}  // namespace igflow

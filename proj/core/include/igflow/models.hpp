#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "igflow/geometry.hpp"
#include "igflow/types.hpp"

namespace igflow {

enum class ModelFamily { ideal, vdw, log_affine, custom };

[[nodiscard]] const char* family_name(ModelFamily family);

// A scale factor is either a number or a symbolic charge token ("Pu", "Pv")
// resolved to the matching conserved charge when the model is built.
using ScaleSpec = std::variant<double, std::string>;

struct GasParams {
    double f = 3.0;    // molecular degrees of freedom
    double k_B = 1.0;  // Boltzmann constant (natural units by default)
    double a = 0.0;    // van der Waals attraction
    double b = 0.0;    // van der Waals excluded volume
};

// An equation-of-state system e_i^mu(q) p_mu = r_i with its frame metric eta.
// The entropy s(q) vanishes at the reference state; states outside the
// admissible domain are rejected. Immutable once built.
class VielbeinModel {
public:
    struct Custom {
        VielbeinField vielbein;
        ScalarField entropy;
        Admissible admissible;  // empty: every finite q is admissible
    };

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] ModelFamily family() const { return family_; }
    [[nodiscard]] int dim() const { return static_cast<int>(charges_.size()); }
    [[nodiscard]] const DiagonalScale& eta() const { return eta_; }
    [[nodiscard]] const Vector& charges() const { return charges_; }
    [[nodiscard]] const Vector& reference_state() const { return reference_; }
    [[nodiscard]] const GasParams& params() const { return params_; }

    // E = sqrt(eta^{ij} r_i r_j).
    [[nodiscard]] double energy() const;

    [[nodiscard]] bool admissible(const Vector& q) const;
    // Throws DomainError describing the violated constraint.
    void require_admissible(const Vector& q) const;

    [[nodiscard]] Matrix vielbein(const Vector& q) const;
    // d e_i^mu / d q^k, analytic for built-in families.
    [[nodiscard]] Matrix vielbein_derivative(const Vector& q, int k) const;

    [[nodiscard]] MetricAt metric(const Vector& q) const;
    // d g^{mu nu} / d q^k.
    [[nodiscard]] Matrix metric_inverse_derivative(const Vector& q, int k) const;

    [[nodiscard]] double entropy(const Vector& q) const;
    [[nodiscard]] Vector entropy_gradient(const Vector& q) const;

    // Same equations of state with a different frame metric. Used to select
    // scale factors after construction.
    [[nodiscard]] VielbeinModel with_scale(DiagonalScale eta) const;

    friend VielbeinModel ideal_gas(double, double, const ScaleSpec&, const ScaleSpec&, Vector);
    friend VielbeinModel vdw_gas(double, double, double, double, const ScaleSpec&,
                                 const ScaleSpec&, Vector);
    friend VielbeinModel log_affine(Vector, Vector);
    friend VielbeinModel custom_model(std::string, Custom, DiagonalScale, Vector, Vector);

private:
    VielbeinModel() = default;

    std::string name_;
    ModelFamily family_ = ModelFamily::ideal;
    DiagonalScale eta_;
    Vector charges_;
    Vector reference_;
    GasParams params_;
    Custom custom_;
};

// Ideal gas u = (f/2) k_B T, P v = k_B T with vielbein diag(u, v) and charges
// (f k_B / 2, k_B).
[[nodiscard]] VielbeinModel ideal_gas(double f = 3.0, double k_B = 1.0,
                                      const ScaleSpec& alpha2 = std::string("Pu"),
                                      const ScaleSpec& beta2 = std::string("Pv"),
                                      Vector reference_state = Vector::Ones(2));

// Van der Waals gas; admissible states have v > b and u + a/v > 0.
[[nodiscard]] VielbeinModel vdw_gas(double f, double k_B, double a, double b,
                                    const ScaleSpec& alpha2 = std::string("Pu"),
                                    const ScaleSpec& beta2 = std::string("Pv"),
                                    Vector reference_state = Vector::Ones(2));

// m-dimensional model with characteristic function W = sum P_mu ln q^mu,
// metric g_{mu nu} = P_mu / (q^mu)^2 delta_{mu nu} and energy sqrt(sum P).
// An empty reference state means all ones.
[[nodiscard]] VielbeinModel log_affine(Vector P, Vector reference_state = {});

[[nodiscard]] VielbeinModel custom_model(std::string name, VielbeinModel::Custom fields,
                                         DiagonalScale eta, Vector charges,
                                         Vector reference_state);

// Parses the model configuration document
//   {"model": "ideal"|"vdw"|"log_affine", "f", "k_B", "a", "b",
//    "alpha2": number|"Pu"|"Pv", "beta2": ..., "P": [...], "reference_state": [...]}
// Unknown keys and keys that do not apply to the chosen family raise
// ConfigError.
[[nodiscard]] VielbeinModel model_from_json(std::string_view text);
[[nodiscard]] VielbeinModel load_model_config(const std::string& path);
// Canonical JSON for a built-in model (used for config echo and hashing).
[[nodiscard]] std::string model_to_json(const VielbeinModel& model);

// p = e^{-1}(q) r.
[[nodiscard]] Vector on_shell_momenta(const VielbeinModel& model, const Vector& q);
[[nodiscard]] PhaseState on_shell_state(const VielbeinModel& model, const Vector& q);

// Closed-form Hamilton-flow position after elapsed tau from q0 (built-in
// families only; UnsupportedModelError otherwise).
[[nodiscard]] Vector closed_form_state(const VielbeinModel& model, const Vector& q0, double tau);

// Canonical map from the van der Waals gas onto the ideal gas:
// u~ = u + a/v, v~ = v - b, 1/T~ = 1/T, P~/T~ = P/T + (a/v^2)/T.
[[nodiscard]] PhaseState mathieu_forward(double a, double b, const PhaseState& state);
[[nodiscard]] PhaseState mathieu_inverse(double a, double b, const PhaseState& state);

// Xi = s - (1/T) u - (P/T) v, i.e. s(q) - p.q.
[[nodiscard]] double planck_potential(const VielbeinModel& model, const PhaseState& state);

// Dual potentials under eta ~ q, theta ~ -p: Psi*(eta) = -s(eta), and Psi(theta)
// in closed form (ideal and log-affine families only).
[[nodiscard]] double eta_potential(const VielbeinModel& model, const Vector& eta);
[[nodiscard]] double theta_potential(const VielbeinModel& model, const Vector& theta);

// P = (P/T) / (1/T).
[[nodiscard]] double pressure(const PhaseState& state);
// P for the ideal gas, P + a/v^2 for van der Waals.
[[nodiscard]] double effective_pressure(const VielbeinModel& model, const PhaseState& state);
// d(effective pressure)/dtau = (P_eff/E)(P_u/alpha^2 - P_v/beta^2) along the
// Hamilton flow. Ideal and van der Waals only.
[[nodiscard]] double pressure_drift(const VielbeinModel& model, const PhaseState& state);

// True when every scale factor equals its charge (eta_ii == r_i), the choice
// that makes the gas flows isobaric.
[[nodiscard]] bool has_charge_scales(const VielbeinModel& model);

}  // namespace igflow

#include "igflow/models.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "igflow/error.hpp"

namespace igflow {

const char* family_name(ModelFamily family) {
    switch (family) {
        case ModelFamily::ideal: return "ideal";
        case ModelFamily::vdw: return "vdw";
        case ModelFamily::log_affine: return "log_affine";
        case ModelFamily::custom: return "custom";
    }
    return "unknown";
}

namespace {

double resolve_scale(const ScaleSpec& spec, const Vector& charges, const char* what) {
    if (const auto* value = std::get_if<double>(&spec)) {
        if (!std::isfinite(*value) || *value <= 0.0)
            throw ConfigError(std::string(what) + " must be positive");
        return *value;
    }
    const auto& token = std::get<std::string>(spec);
    if (token == "Pu") return charges[0];
    if (token == "Pv") return charges[1];
    throw ConfigError(std::string(what) + ": unknown scale token \"" + token +
                      "\" (expected a number, \"Pu\" or \"Pv\")");
}

void require_positive(double x, const char* what) {
    if (!std::isfinite(x) || x <= 0.0) throw ConfigError(std::string(what) + " must be positive");
}

void require_nonnegative(double x, const char* what) {
    if (!std::isfinite(x) || x < 0.0)
        throw ConfigError(std::string(what) + " must be non-negative");
}

Vector unit_step(const Vector& q, Eigen::Index k, double rel) {
    Vector d = Vector::Zero(q.size());
    d[k] = rel * std::max(1.0, std::abs(q[k]));
    return d;
}

}  // namespace

double VielbeinModel::energy() const {
    return std::sqrt(charges_.cwiseAbs2().cwiseQuotient(eta_.lower()).sum());
}

bool VielbeinModel::admissible(const Vector& q) const {
    if (q.size() != dim() || !q.allFinite()) return false;
    switch (family_) {
        case ModelFamily::ideal:
        case ModelFamily::log_affine:
            return (q.array() > 0.0).all();
        case ModelFamily::vdw:
            return q[1] > params_.b && q[0] + params_.a / q[1] > 0.0;
        case ModelFamily::custom:
            return !custom_.admissible || custom_.admissible(q);
    }
    return false;
}

void VielbeinModel::require_admissible(const Vector& q) const {
    if (q.size() != dim())
        throw DomainError("state " + describe(q) + " has dimension " + std::to_string(q.size()) +
                          ", model " + name_ + " expects " + std::to_string(dim()));
    if (admissible(q)) return;
    switch (family_) {
        case ModelFamily::ideal:
        case ModelFamily::log_affine:
            throw DomainError("state " + describe(q) + " requires every coordinate > 0");
        case ModelFamily::vdw:
            throw DomainError("state " + describe(q) + " requires v > b and u + a/v > 0");
        case ModelFamily::custom:
            break;
    }
    throw DomainError("state " + describe(q) + " is outside the admissible domain of " + name_);
}

Matrix VielbeinModel::vielbein(const Vector& q) const {
    require_admissible(q);
    switch (family_) {
        case ModelFamily::ideal:
        case ModelFamily::log_affine:
            return q.asDiagonal();
        case ModelFamily::vdw: {
            const double u = q[0], v = q[1], a = params_.a, b = params_.b;
            Matrix e(2, 2);
            e << u + a / v, 0.0, a * (v - b) / (v * v), v - b;
            return e;
        }
        case ModelFamily::custom:
            return custom_.vielbein.eval(q);
    }
    return {};
}

Matrix VielbeinModel::vielbein_derivative(const Vector& q, int k) const {
    require_admissible(q);
    if (k < 0 || k >= dim()) throw DomainError("coordinate index out of range");
    const Eigen::Index n = dim();
    switch (family_) {
        case ModelFamily::ideal:
        case ModelFamily::log_affine: {
            Matrix d = Matrix::Zero(n, n);
            d(k, k) = 1.0;
            return d;
        }
        case ModelFamily::vdw: {
            const double v = q[1], a = params_.a, b = params_.b;
            Matrix d = Matrix::Zero(2, 2);
            if (k == 0) {
                d(0, 0) = 1.0;
            } else {
                d(0, 0) = -a / (v * v);
                d(1, 0) = a * (2.0 * b - v) / (v * v * v);
                d(1, 1) = 1.0;
            }
            return d;
        }
        case ModelFamily::custom: {
            const Vector dq = unit_step(q, k, 1e-6);
            return (custom_.vielbein.eval(q + dq) - custom_.vielbein.eval(q - dq)) / (2.0 * dq[k]);
        }
    }
    return {};
}

MetricAt VielbeinModel::metric(const Vector& q) const {
    MetricAt m = metric_inverse_from_vielbein(vielbein(q), eta_, q);
    Eigen::LLT<Matrix> llt(m.g_inv);
    if (llt.info() != Eigen::Success)
        throw DomainError("metric is not positive definite at q = " + describe(q));
    return m;
}

Matrix VielbeinModel::metric_inverse_derivative(const Vector& q, int k) const {
    const Matrix e = vielbein(q);
    const Matrix de = vielbein_derivative(q, k);
    const Vector eta_up = eta_.upper();
    return de.transpose() * eta_up.asDiagonal() * e + e.transpose() * eta_up.asDiagonal() * de;
}

double VielbeinModel::entropy(const Vector& q) const {
    require_admissible(q);
    const Vector& q0 = reference_;
    switch (family_) {
        case ModelFamily::ideal:
        case ModelFamily::log_affine:
            return charges_.dot((q.array() / q0.array()).log().matrix());
        case ModelFamily::vdw: {
            const double a = params_.a, b = params_.b;
            return charges_[0] * std::log((q[0] + a / q[1]) / (q0[0] + a / q0[1])) +
                   charges_[1] * std::log((q[1] - b) / (q0[1] - b));
        }
        case ModelFamily::custom:
            return custom_.entropy(q);
    }
    return 0.0;
}

Vector VielbeinModel::entropy_gradient(const Vector& q) const {
    require_admissible(q);
    switch (family_) {
        case ModelFamily::ideal:
        case ModelFamily::log_affine:
            return charges_.cwiseQuotient(q);
        case ModelFamily::vdw: {
            const double u = q[0], v = q[1], a = params_.a, b = params_.b;
            const double inv_temp = charges_[0] / (u + a / v);
            Vector g(2);
            g << inv_temp, charges_[1] / (v - b) - (a / (v * v)) * inv_temp;
            return g;
        }
        case ModelFamily::custom: {
            Vector g(dim());
            for (int k = 0; k < dim(); ++k) {
                const Vector dq = unit_step(q, k, 1e-6);
                g[k] = (custom_.entropy(q + dq) - custom_.entropy(q - dq)) / (2.0 * dq[k]);
            }
            return g;
        }
    }
    return {};
}

VielbeinModel VielbeinModel::with_scale(DiagonalScale eta) const {
    if (eta.dim() != dim()) throw ConfigError("scale dimension does not match model");
    VielbeinModel copy = *this;
    copy.eta_ = std::move(eta);
    return copy;
}

VielbeinModel ideal_gas(double f, double k_B, const ScaleSpec& alpha2, const ScaleSpec& beta2,
                        Vector reference_state) {
    require_positive(f, "f");
    require_positive(k_B, "k_B");
    VielbeinModel m;
    m.name_ = "ideal";
    m.family_ = ModelFamily::ideal;
    m.params_ = {f, k_B, 0.0, 0.0};
    m.charges_ = Vector(2);
    m.charges_ << 0.5 * f * k_B, k_B;
    Vector scale(2);
    scale << resolve_scale(alpha2, m.charges_, "alpha2"), resolve_scale(beta2, m.charges_, "beta2");
    m.eta_ = DiagonalScale(scale);
    if (reference_state.size() != 2) throw ConfigError("reference_state must have 2 entries");
    m.reference_ = std::move(reference_state);
    if (!m.admissible(m.reference_)) throw ConfigError("reference_state is not admissible");
    return m;
}

VielbeinModel vdw_gas(double f, double k_B, double a, double b, const ScaleSpec& alpha2,
                      const ScaleSpec& beta2, Vector reference_state) {
    require_nonnegative(a, "a");
    require_nonnegative(b, "b");
    VielbeinModel m = ideal_gas(f, k_B, alpha2, beta2, Vector::Constant(2, b + 1.0));
    m.name_ = "vdw";
    m.family_ = ModelFamily::vdw;
    m.params_.a = a;
    m.params_.b = b;
    if (reference_state.size() != 2) throw ConfigError("reference_state must have 2 entries");
    m.reference_ = std::move(reference_state);
    if (!m.admissible(m.reference_))
        throw ConfigError("reference_state must satisfy v > b and u + a/v > 0");
    return m;
}

VielbeinModel log_affine(Vector P, Vector reference_state) {
    if (P.size() == 0) throw ConfigError("log_affine needs at least one charge P");
    if (P.size() > kMaxDimension) throw ConfigError("log_affine supports at most 16 coordinates");
    for (Eigen::Index i = 0; i < P.size(); ++i) require_positive(P[i], "every P");
    VielbeinModel m;
    m.name_ = "log_affine";
    m.family_ = ModelFamily::log_affine;
    m.charges_ = P;
    m.eta_ = DiagonalScale(P);
    m.reference_ = reference_state.size() == 0 ? Vector::Ones(P.size()) : std::move(reference_state);
    if (m.reference_.size() != P.size())
        throw ConfigError("reference_state must match the length of P");
    if (!m.admissible(m.reference_)) throw ConfigError("reference_state is not admissible");
    return m;
}

VielbeinModel custom_model(std::string name, VielbeinModel::Custom fields, DiagonalScale eta,
                           Vector charges, Vector reference_state) {
    const auto n = charges.size();
    if (n == 0 || n > kMaxDimension) throw ConfigError("custom model dimension must be 1..16");
    if (fields.vielbein.dim != n || eta.dim() != n || reference_state.size() != n)
        throw ConfigError("custom model components have inconsistent dimensions");
    if (!fields.vielbein.eval || !fields.entropy)
        throw ConfigError("custom model needs a vielbein and an entropy function");
    VielbeinModel m;
    m.name_ = std::move(name);
    m.family_ = ModelFamily::custom;
    m.custom_ = std::move(fields);
    m.eta_ = std::move(eta);
    m.charges_ = std::move(charges);
    m.reference_ = std::move(reference_state);
    if (!m.admissible(m.reference_)) throw ConfigError("reference_state is not admissible");
    return m;
}

namespace {

using nlohmann::json;

double number_field(const json& doc, const char* key, double fallback) {
    if (!doc.contains(key)) return fallback;
    const auto& v = doc.at(key);
    if (!v.is_number()) throw ConfigError(std::string("\"") + key + "\" must be a number");
    return v.get<double>();
}

ScaleSpec scale_field(const json& doc, const char* key) {
    if (!doc.contains(key)) return std::string(std::string_view(key) == "alpha2" ? "Pu" : "Pv");
    const auto& v = doc.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return v.get<std::string>();
    throw ConfigError(std::string("\"") + key + "\" must be a number or \"Pu\"/\"Pv\"");
}

Vector vector_field(const json& doc, const char* key) {
    if (!doc.contains(key)) return {};
    const auto& v = doc.at(key);
    if (!v.is_array()) throw ConfigError(std::string("\"") + key + "\" must be an array");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            throw ConfigError(std::string("\"") + key + "\" must contain only numbers");
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

void reject_keys(const json& doc, const std::set<std::string>& allowed, const std::string& model) {
    static const std::set<std::string> known = {"model", "f",      "k_B", "a",
                                                "b",     "alpha2", "beta2", "P",
                                                "reference_state"};
    for (const auto& [key, _] : doc.items()) {
        if (!known.count(key)) throw ConfigError("unknown configuration key \"" + key + "\"");
        if (!allowed.count(key))
            throw ConfigError("key \"" + key + "\" does not apply to model \"" + model + "\"");
    }
}

}  // namespace

VielbeinModel model_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("model configuration is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("model configuration must be a JSON object");
    if (!doc.contains("model") || !doc.at("model").is_string())
        throw ConfigError("model configuration needs a \"model\" string");
    const auto kind = doc.at("model").get<std::string>();

    if (kind == "ideal" || kind == "vdw") {
        std::set<std::string> allowed = {"model", "f", "k_B", "alpha2", "beta2", "reference_state"};
        if (kind == "vdw") allowed.insert({"a", "b"});
        reject_keys(doc, allowed, kind);
        Vector ref = vector_field(doc, "reference_state");
        if (ref.size() == 0) ref = Vector::Ones(2);
        const double f = number_field(doc, "f", 3.0);
        const double k_B = number_field(doc, "k_B", 1.0);
        if (kind == "ideal")
            return ideal_gas(f, k_B, scale_field(doc, "alpha2"), scale_field(doc, "beta2"), ref);
        return vdw_gas(f, k_B, number_field(doc, "a", 0.0), number_field(doc, "b", 0.0),
                       scale_field(doc, "alpha2"), scale_field(doc, "beta2"), ref);
    }
    if (kind == "log_affine") {
        reject_keys(doc, {"model", "P", "reference_state"}, kind);
        if (!doc.contains("P")) throw ConfigError("log_affine model needs \"P\"");
        return log_affine(vector_field(doc, "P"), vector_field(doc, "reference_state"));
    }
    throw ConfigError("unknown model \"" + kind + "\" (expected ideal, vdw or log_affine)");
}

VielbeinModel load_model_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model configuration " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

std::string model_to_json(const VielbeinModel& model) {
    json doc;
    doc["model"] = family_name(model.family());
    auto to_array = [](const Vector& v) {
        json arr = json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
        return arr;
    };
    switch (model.family()) {
        case ModelFamily::vdw:
            doc["a"] = model.params().a;
            doc["b"] = model.params().b;
            [[fallthrough]];
        case ModelFamily::ideal:
            doc["f"] = model.params().f;
            doc["k_B"] = model.params().k_B;
            doc["alpha2"] = model.eta().lower()[0];
            doc["beta2"] = model.eta().lower()[1];
            break;
        case ModelFamily::log_affine:
            doc["P"] = to_array(model.charges());
            break;
        case ModelFamily::custom:
            doc["name"] = model.name();
            doc["eta"] = to_array(model.eta().lower());
            doc["charges"] = to_array(model.charges());
            break;
    }
    doc["reference_state"] = to_array(model.reference_state());
    return doc.dump();
}

Vector on_shell_momenta(const VielbeinModel& model, const Vector& q) {
    const Matrix e = model.vielbein(q);
    Eigen::FullPivLU<Matrix> lu(e);
    if (std::abs(lu.determinant()) <= kVielbeinSingularityEps)
        throw DomainError("singular vielbein at q = " + describe(q));
    return lu.solve(model.charges());
}

PhaseState on_shell_state(const VielbeinModel& model, const Vector& q) {
    return {q, on_shell_momenta(model, q)};
}

Vector closed_form_state(const VielbeinModel& model, const Vector& q0, double tau) {
    model.require_admissible(q0);
    const double E = model.energy();
    // Exponential rate of each transformed coordinate: r_mu / (eta_mu E).
    const Vector rate = model.charges().cwiseQuotient(model.eta().lower()) / E;
    switch (model.family()) {
        case ModelFamily::ideal:
        case ModelFamily::log_affine:
            return q0.cwiseProduct((rate * tau).array().exp().matrix());
        case ModelFamily::vdw: {
            const double a = model.params().a, b = model.params().b;
            const double v = b + (q0[1] - b) * std::exp(rate[1] * tau);
            const double u = -a / v + (q0[0] + a / q0[1]) * std::exp(rate[0] * tau);
            Vector q(2);
            q << u, v;
            return q;
        }
        case ModelFamily::custom:
            break;
    }
    throw UnsupportedModelError("no closed-form trajectory for model " + model.name());
}

PhaseState mathieu_forward(double a, double b, const PhaseState& state) {
    if (state.q.size() != 2 || state.p.size() != 2)
        throw DomainError("the van der Waals map acts on two-dimensional states");
    const double u = state.q[0], v = state.q[1];
    if (!(v > b)) throw DomainError("mathieu_forward requires v > b, got " + describe(state.q));
    PhaseState out{Vector(2), Vector(2)};
    out.q << u + a / v, v - b;
    out.p << state.p[0], state.p[1] + (a / (v * v)) * state.p[0];
    return out;
}

PhaseState mathieu_inverse(double a, double b, const PhaseState& state) {
    if (state.q.size() != 2 || state.p.size() != 2)
        throw DomainError("the van der Waals map acts on two-dimensional states");
    const double vt = state.q[1];
    if (!(vt > 0.0)) throw DomainError("mathieu_inverse requires v~ > 0, got " + describe(state.q));
    const double v = vt + b;
    PhaseState out{Vector(2), Vector(2)};
    out.q << state.q[0] - a / v, v;
    out.p << state.p[0], state.p[1] - (a / (v * v)) * state.p[0];
    return out;
}

double planck_potential(const VielbeinModel& model, const PhaseState& state) {
    return model.entropy(state.q) - state.p.dot(state.q);
}

double eta_potential(const VielbeinModel& model, const Vector& eta) {
    return -model.entropy(eta);
}

double theta_potential(const VielbeinModel& model, const Vector& theta) {
    if (model.family() != ModelFamily::ideal && model.family() != ModelFamily::log_affine)
        throw UnsupportedModelError("closed-form theta potential needs an ideal or log-affine model");
    if (theta.size() != model.dim() || (theta.array() >= 0.0).any())
        throw DomainError("theta coordinates must be negative, got " + describe(theta));
    const Vector& P = model.charges();
    const Vector& ref = model.reference_state();
    // q = -P / theta on shell.
    const Vector q = -P.cwiseQuotient(theta);
    return P.dot((q.array() / ref.array()).log().matrix()) - P.sum();
}

double pressure(const PhaseState& state) {
    if (state.p.size() < 2) throw DomainError("pressure needs at least two momenta");
    return state.p[1] / state.p[0];
}

double effective_pressure(const VielbeinModel& model, const PhaseState& state) {
    switch (model.family()) {
        case ModelFamily::ideal:
            return pressure(state);
        case ModelFamily::vdw: {
            const double v = state.q[1];
            return pressure(state) + model.params().a / (v * v);
        }
        default:
            throw UnsupportedModelError("effective pressure is defined for the gas models only");
    }
}

double pressure_drift(const VielbeinModel& model, const PhaseState& state) {
    const double P_eff = effective_pressure(model, state);
    const Vector& r = model.charges();
    const Vector& eta = model.eta().lower();
    return (P_eff / model.energy()) * (r[0] / eta[0] - r[1] / eta[1]);
}

bool has_charge_scales(const VielbeinModel& model) {
    const Vector& r = model.charges();
    const Vector& eta = model.eta().lower();
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (std::abs(eta[i] - r[i]) > 1e-14 * std::abs(r[i])) return false;
    }
    return true;
}

}  // namespace igflow

#include "hcinv/params.hpp"

#include <cmath>
#include <json.hpp>

namespace hcinv {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw ValidationError(msg);
}

struct KeyRef {
    const char* name;
    double ModelParams::*field;
};

constexpr KeyRef kKeys[] = {
    {"r", &ModelParams::r},
    {"mu", &ModelParams::mu},
    {"sigma", &ModelParams::sigma},
    {"rho", &ModelParams::rho},
    {"m0", &ModelParams::m0},
    {"m1", &ModelParams::m1},
    {"kappa", &ModelParams::kappa},
    {"delta", &ModelParams::delta},
    {"alpha", &ModelParams::alpha},
    {"beta", &ModelParams::beta},
    {"invest_amount", &ModelParams::invest_amount},
    {"horizon", &ModelParams::horizon},
};

}  // namespace

ModelParams validate(const ModelParams& p) {
    for (const auto& k : kKeys)
        if (!std::isfinite(p.*k.field))
            throw ValidationError(std::string(k.name) + " must be finite");
    require(p.sigma > 0, "sigma must be positive");
    require(p.delta > 0, "delta must be positive");
    require(p.kappa > 0, "kappa must be positive");
    require(p.invest_amount > 0, "invest_amount must be positive");
    require(p.horizon > 0, "horizon must be positive");
    require(p.alpha > 0 && p.alpha < 1, "alpha must lie in (0,1)");
    require(p.beta > 0 && p.beta < 1, "beta must lie in (0,1)");
    require(p.m0 >= 0, "m0 must be nonnegative");
    require(p.m1 >= 0, "m1 must be nonnegative");
    require(p.r > 0, "r must be positive");
    return p;
}

DerivedParams derive(const ModelParams& p) {
    DerivedParams d;
    d.theta = (p.mu - p.r) / p.sigma;
    d.f_of_I = std::pow(p.invest_amount, p.beta);
    d.a = p.alpha / (p.alpha - 1.0);
    d.C = (1.0 - p.alpha) * std::pow(p.alpha, p.alpha / (1.0 - p.alpha));
    const double th2 = d.theta * d.theta;
    d.lam_a = p.alpha / (1.0 - p.alpha) * (p.r + 0.5 * th2) + 0.5 * th2 * d.a * d.a;
    d.beta_p = p.m1 * p.kappa / (1.0 - p.alpha);
    return d;
}

Model::Model(const ModelParams& p) : p_(validate(p)), d_(derive(p_)) {}

double Model::g_value(double t) const { return hcinv::g_value(p_, t); }

double g_value(const ModelParams& p, double t) {
    if (!(t >= 0.0 && t <= p.horizon))
        throw std::domain_error("g_value: t outside [0, T]");
    return p.invest_amount / p.r * -std::expm1(-p.r * (p.horizon - t));
}

const std::vector<std::string>& param_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& k : kKeys) out.emplace_back(k.name);
        return out;
    }();
    return keys;
}

double get_param(const ModelParams& p, const std::string& key) {
    for (const auto& k : kKeys)
        if (key == k.name) return p.*k.field;
    throw std::out_of_range("unknown parameter '" + key + "'");
}

void set_param(ModelParams& p, const std::string& key, double value) {
    for (const auto& k : kKeys)
        if (key == k.name) {
            p.*k.field = value;
            return;
        }
    throw std::out_of_range("unknown parameter '" + key + "'");
}

ModelParams params_from_json(const std::string& text, std::vector<std::string>* defaulted) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config must be a JSON object");

    ModelParams p;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.value().is_object()) continue;
        bool known = false;
        for (const auto& k : kKeys) known = known || it.key() == k.name;
        if (!known) throw ValidationError("unknown config key '" + it.key() + "'");
        if (!it.value().is_number())
            throw ValidationError("config key '" + it.key() + "' must be a number");
        set_param(p, it.key(), it.value().get<double>());
    }
    if (defaulted) {
        defaulted->clear();
        for (const auto& k : kKeys)
            if (!j.contains(k.name)) defaulted->emplace_back(k.name);
    }
    return validate(p);
}

}  // namespace hcinv

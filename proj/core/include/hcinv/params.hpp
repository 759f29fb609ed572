/**
 * @file params.hpp
 * @brief Model constants, derived quantities and validation.
 */
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hcinv {

/// Thrown when a parameter set violates a model constraint.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Market, preference, mortality and health-production constants.
/// Time is in years; rates are annualized.
struct ModelParams {
    double r = 0.048;
    double mu = 0.108;
    double sigma = 0.20;
    double rho = 0.05;
    double m0 = 0.0237;
    double m1 = 0.0017;
    double kappa = 1.8;
    double delta = 0.0055;
    double alpha = 0.2258;   // consumption weight; 1 - alpha = 0.7742
    double beta = 0.19;
    double invest_amount = 2.0;
    double horizon = 20.0;
};

/// Quantities that every other module derives from ModelParams.
struct DerivedParams {
    double theta = 0.0;   // (mu - r) / sigma
    double f_of_I = 0.0;  // I^beta
    double a = 0.0;       // alpha / (alpha - 1), the dual utility exponent (< 0)
    double C = 0.0;       // (1 - alpha) alpha^(alpha / (1 - alpha))
    double lam_a = 0.0;   // growth rate of the market factor inside W
    double beta_p = 0.0;  // m1 kappa / (1 - alpha)
};

/// Validated parameters plus derived constants. Immutable after construction.
class Model {
public:
    explicit Model(const ModelParams& p = {});

    const ModelParams& p() const { return p_; }
    const DerivedParams& d() const { return d_; }

    /// Present value of the remaining health payments, (I/r)(1 - e^{-r(T-t)}).
    double g_value(double t) const;

private:
    ModelParams p_;
    DerivedParams d_;
};

/// Returns params unchanged, or throws ValidationError naming the constraint.
ModelParams validate(const ModelParams& params);

DerivedParams derive(const ModelParams& params);

/// Free-function form of Model::g_value; throws std::domain_error outside [0, T].
double g_value(const ModelParams& params, double t);

/// Names of the flat configuration keys, in declaration order.
const std::vector<std::string>& param_keys();

/// Reads one parameter by key; throws std::out_of_range for unknown keys.
double get_param(const ModelParams& p, const std::string& key);
void set_param(ModelParams& p, const std::string& key, double value);

/// Parses a JSON object with flat parameter keys. Missing keys keep their
/// defaults (reported through `defaulted` when non-null); unknown keys at
/// the top level throw ValidationError. Object-valued keys are treated as
/// sections owned by other consumers and skipped.
ModelParams params_from_json(const std::string& text,
                             std::vector<std::string>* defaulted = nullptr);

}  // namespace hcinv

#ifndef STRUCTPOP_MODEL_HPP
#define STRUCTPOP_MODEL_HPP

#include <functional>
#include <map>
#include <string>

namespace structpop {

/// The model ingredients on the size interval [0,1]:
///   beta(s,y)  fertility: rate at which individuals of size y produce
///              offspring of size s,
///   mu(s)      mortality,
///   gamma(s)   growth rate, strictly positive.
/// Evaluation is pure; a VitalRates value is safe to share across threads.
struct VitalRates {
    std::function<double(double, double)> beta;
    std::function<double(double)> mu;
    std::function<double(double)> gamma;
    double gamma_min = 0.0;  // certified lower bound for gamma on [0,1]
    std::string name;
};

/// Named builtin plus parameters, or piecewise-linear tables.
///
/// Builtins:
///   "constant"   beta0, mu0, gamma0
///   "corner"     fertility concentrated near (s,y) = (0,1); params beta0, alpha
///                (support width), mu0, gamma0
///   "rectangle"  fertility positive on (0,0.1)x(0,1) and zero for s >= 0.1;
///                params beta0, mu0, gamma0
///   "block"      fertility vanishing exactly on [0,alpha]x[alpha,1];
///                params beta0, alpha, mu0, gamma0
///   "table"      beta from a CSV "s,y,beta"; mu/gamma from CSVs "s,value"
///                (mu_table_path / gamma_table_path) or constants mu0/gamma0
struct ModelSpec {
    std::string name = "constant";
    std::map<std::string, double> params;
    std::string table_path;        // beta table (2-D) for "table"
    std::string mu_table_path;     // optional 1-D table
    std::string gamma_table_path;  // optional 1-D table
};

/// Builds evaluable rates from a spec and validates them on a mesh of at
/// least 256 points per axis. Throws NonPositiveGrowth, NegativeRate,
/// MalformedTable.
VitalRates load_model(const ModelSpec& spec);

/// Same rates with beta multiplied by factor (factor >= 0).
VitalRates scale_beta(const VitalRates& rates, double factor);

/// Max of gamma over the validation mesh (used for CFL limits).
double gamma_max(const VitalRates& rates);

/// Max of mu over the validation mesh.
double mu_max(const VitalRates& rates);

}  // namespace structpop

#endif

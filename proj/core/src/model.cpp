#include "structpop/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <vector>

#include "structpop/errors.hpp"

namespace structpop {

namespace {

constexpr int kValidationPoints = 513;  // per axis

double get_param(const ModelSpec& spec, const std::string& key, double fallback) {
    auto it = spec.params.find(key);
    return it == spec.params.end() ? fallback : it->second;
}

double clamp01(double u) { return u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u); }

// Piecewise-linear table on a sorted knot vector covering [0,1].
struct Table1D {
    std::vector<double> knots, values;

    double eval(double s) const {
        if (s <= knots.front()) return values.front();
        if (s >= knots.back()) return values.back();
        auto it = std::upper_bound(knots.begin(), knots.end(), s);
        std::size_t j = static_cast<std::size_t>(it - knots.begin());
        double t = (s - knots[j - 1]) / (knots[j] - knots[j - 1]);
        return (1.0 - t) * values[j - 1] + t * values[j];
    }
};

struct Table2D {
    std::vector<double> s_knots, y_knots;
    std::vector<double> values;  // row-major: values[i * y_knots.size() + j]

    double eval(double s, double y) const {
        auto locate = [](const std::vector<double>& knots, double x, std::size_t& j,
                         double& t) {
            if (x <= knots.front()) { j = 1; t = 0.0; return; }
            if (x >= knots.back()) { j = knots.size() - 1; t = 1.0; return; }
            auto it = std::upper_bound(knots.begin(), knots.end(), x);
            j = static_cast<std::size_t>(it - knots.begin());
            t = (x - knots[j - 1]) / (knots[j] - knots[j - 1]);
        };
        std::size_t i, j;
        double u, v;
        locate(s_knots, s, i, u);
        locate(y_knots, y, j, v);
        std::size_t ny = y_knots.size();
        double a = values[(i - 1) * ny + (j - 1)], b = values[(i - 1) * ny + j];
        double c = values[i * ny + (j - 1)], d = values[i * ny + j];
        return (1 - u) * ((1 - v) * a + v * b) + u * ((1 - v) * c + v * d);
    }
};

std::vector<std::vector<double>> read_csv_rows(const std::string& path, std::size_t n_fields,
                                               const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MalformedTable, "cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::MalformedTable, "empty table " + path);
    // Tolerate whitespace around the header.
    std::string header = line;
    header.erase(std::remove_if(header.begin(), header.end(), ::isspace), header.end());
    if (header != expected_header)
        throw Error(ErrorCode::MalformedTable,
                    "expected header '" + expected_header + "' in " + path);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::vector<double> row;
        std::string field;
        while (std::getline(ss, field, ',')) {
            try {
                row.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw Error(ErrorCode::MalformedTable, "bad value '" + field + "' in " + path);
            }
        }
        if (row.size() != n_fields)
            throw Error(ErrorCode::MalformedTable, "bad row width in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorCode::MalformedTable, "no data rows in " + path);
    return rows;
}

Table1D load_table_1d(const std::string& path) {
    auto rows = read_csv_rows(path, 2, "s,value");
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a[0] < b[0]; });
    Table1D table;
    for (const auto& row : rows) {
        table.knots.push_back(row[0]);
        table.values.push_back(row[1]);
    }
    if (table.knots.front() > 1e-12 || table.knots.back() < 1.0 - 1e-12)
        throw Error(ErrorCode::MalformedTable, "table mesh must cover [0,1]: " + path);
    return table;
}

Table2D load_table_2d(const std::string& path) {
    auto rows = read_csv_rows(path, 3, "s,y,beta");
    std::vector<double> s_vals, y_vals;
    for (const auto& row : rows) {
        s_vals.push_back(row[0]);
        y_vals.push_back(row[1]);
    }
    auto uniq = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                v.end());
    };
    uniq(s_vals);
    uniq(y_vals);
    Table2D table;
    table.s_knots = s_vals;
    table.y_knots = y_vals;
    table.values.assign(s_vals.size() * y_vals.size(),
                        std::numeric_limits<double>::quiet_NaN());
    auto index_of = [](const std::vector<double>& v, double x) {
        auto it = std::lower_bound(v.begin(), v.end(), x - 1e-14);
        return static_cast<std::size_t>(it - v.begin());
    };
    for (const auto& row : rows) {
        std::size_t i = index_of(s_vals, row[0]), j = index_of(y_vals, row[1]);
        table.values[i * y_vals.size() + j] = row[2];
    }
    for (double v : table.values)
        if (std::isnan(v))
            throw Error(ErrorCode::MalformedTable, "table is not a full lattice: " + path);
    if (s_vals.front() > 1e-12 || s_vals.back() < 1.0 - 1e-12 || y_vals.front() > 1e-12 ||
        y_vals.back() < 1.0 - 1e-12)
        throw Error(ErrorCode::MalformedTable, "table mesh must cover [0,1]: " + path);
    return table;
}

void validate(VitalRates& rates) {
    double gmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kValidationPoints; ++i) {
        double s = static_cast<double>(i) / (kValidationPoints - 1);
        double g = rates.gamma(s);
        double m = rates.mu(s);
        if (!(g > 0.0))
            throw Error(ErrorCode::NonPositiveGrowth,
                        rates.name + ": gamma(" + std::to_string(s) + ") = " + std::to_string(g));
        if (m < 0.0)
            throw Error(ErrorCode::NegativeRate,
                        rates.name + ": mu(" + std::to_string(s) + ") = " + std::to_string(m));
        gmin = std::min(gmin, g);
    }
    for (int i = 0; i < kValidationPoints; ++i) {
        double s = static_cast<double>(i) / (kValidationPoints - 1);
        for (int j = 0; j < kValidationPoints; ++j) {
            double y = static_cast<double>(j) / (kValidationPoints - 1);
            if (rates.beta(s, y) < 0.0)
                throw Error(ErrorCode::NegativeRate, rates.name + ": beta < 0 at (" +
                                                         std::to_string(s) + ", " +
                                                         std::to_string(y) + ")");
        }
    }
    rates.gamma_min = gmin;
}

}  // namespace

VitalRates load_model(const ModelSpec& spec) {
    VitalRates rates;
    rates.name = spec.name;
    double beta0 = get_param(spec, "beta0", 2.0);
    double mu0 = get_param(spec, "mu0", 0.0);
    double gamma0 = get_param(spec, "gamma0", 1.0);
    rates.mu = [mu0](double) { return mu0; };
    rates.gamma = [gamma0](double) { return gamma0; };

    if (spec.name == "constant") {
        rates.beta = [beta0](double, double) { return beta0; };
    } else if (spec.name == "corner") {
        // Fertility concentrated near (s,y) = (0,1): large individuals
        // produce arbitrarily small offspring. Support [0,alpha) x (1-alpha,1].
        double alpha = get_param(spec, "alpha", 0.3);
        rates.beta = [beta0, alpha](double s, double y) {
            double a = clamp01((alpha - s) / alpha);
            double b = clamp01((y - (1.0 - alpha)) / alpha);
            return beta0 * a * a * b * b;
        };
    } else if (spec.name == "rectangle") {
        // Positive exactly on the open rectangle (0, 0.1) x (0, 1).
        rates.beta = [beta0](double s, double y) {
            double a = std::max(0.0, s * (0.1 - s)) / 0.0025;  // peak 1 at s = 0.05
            double b = 4.0 * std::max(0.0, y * (1.0 - y));     // peak 1 at y = 0.5
            return beta0 * a * b;
        };
    } else if (spec.name == "block") {
        // Vanishes exactly on [0,alpha] x [alpha,1]; positive elsewhere.
        double alpha = get_param(spec, "alpha", 0.5);
        rates.beta = [beta0, alpha](double s, double y) {
            double dx = std::max(0.0, s - alpha);
            double dy = std::max(0.0, alpha - y);
            return beta0 * std::min(1.0, std::hypot(dx, dy) / 0.1);
        };
    } else if (spec.name == "table") {
        if (spec.table_path.empty())
            throw Error(ErrorCode::MalformedTable, "table model needs table_path");
        auto beta_table = std::make_shared<Table2D>(load_table_2d(spec.table_path));
        rates.beta = [beta_table](double s, double y) { return beta_table->eval(s, y); };
        if (!spec.mu_table_path.empty()) {
            auto t = std::make_shared<Table1D>(load_table_1d(spec.mu_table_path));
            rates.mu = [t](double s) { return t->eval(s); };
        }
        if (!spec.gamma_table_path.empty()) {
            auto t = std::make_shared<Table1D>(load_table_1d(spec.gamma_table_path));
            rates.gamma = [t](double s) { return t->eval(s); };
        }
    } else {
        throw Error(ErrorCode::MalformedConfig, "unknown model '" + spec.name + "'");
    }

    validate(rates);
    return rates;
}

VitalRates scale_beta(const VitalRates& rates, double factor) {
    VitalRates scaled = rates;
    auto beta = rates.beta;
    scaled.beta = [beta, factor](double s, double y) { return factor * beta(s, y); };
    return scaled;
}

double gamma_max(const VitalRates& rates) {
    double gmax = 0.0;
    for (int i = 0; i < kValidationPoints; ++i)
        gmax = std::max(gmax, rates.gamma(static_cast<double>(i) / (kValidationPoints - 1)));
    return gmax;
}

double mu_max(const VitalRates& rates) {
    double mmax = 0.0;
    for (int i = 0; i < kValidationPoints; ++i)
        mmax = std::max(mmax, rates.mu(static_cast<double>(i) / (kValidationPoints - 1)));
    return mmax;
}

}  // namespace structpop

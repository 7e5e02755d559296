#include "structpop/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "structpop/errors.hpp"

namespace structpop {

namespace {

constexpr double kDomainSlack = 1e-12;

// Fritsch-Carlson slopes for a monotone cubic interpolant on a uniform mesh.
std::vector<double> monotone_slopes(const std::vector<double>& v, double h) {
    std::size_t n = v.size();
    std::vector<double> d(n, 0.0), secant(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) secant[i] = (v[i + 1] - v[i]) / h;
    auto clip = [](double slope, double sec) {
        if (sec == 0.0 || slope * sec <= 0.0) return 0.0;
        return std::abs(slope) > 3.0 * std::abs(sec) ? 3.0 * sec : slope;
    };
    std::size_t s1 = n > 2 ? 1 : 0, s2 = n > 2 ? n - 3 : 0;
    d[0] = clip(1.5 * secant[0] - 0.5 * secant[s1], secant[0]);
    d[n - 1] = clip(1.5 * secant[n - 2] - 0.5 * secant[s2], secant[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (secant[i - 1] * secant[i] <= 0.0)
            d[i] = 0.0;
        else
            d[i] = 2.0 * secant[i - 1] * secant[i] / (secant[i - 1] + secant[i]);
    }
    return d;
}

double hermite(double v0, double v1, double d0, double d1, double h, double t) {
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * v0 + h * (t3 - 2 * t2 + t) * d0 +
           (-2 * t3 + 3 * t2) * v1 + h * (t3 - t2) * d1;
}

}  // namespace

FlowCache::FlowCache(const VitalRates& rates, int fine_cells)
    : cells_(fine_cells), gamma_(rates.gamma) {
    h_ = 1.0 / cells_;
    g_values_.resize(cells_ + 1);
    m_values_.resize(cells_ + 1);
    e_values_.resize(cells_ + 1);
    g_values_[0] = m_values_[0] = e_values_[0] = 0.0;
    // Cumulative integrals, one Simpson panel per fine cell.
    auto inv_gamma = [&](double s) { return 1.0 / rates.gamma(s); };
    auto mu_over_gamma = [&](double s) { return rates.mu(s) / rates.gamma(s); };
    for (int i = 0; i < cells_; ++i) {
        double a = i * h_, mid = (i + 0.5) * h_, b = (i + 1) * h_;
        g_values_[i + 1] =
            g_values_[i] + h_ / 6.0 * (inv_gamma(a) + 4.0 * inv_gamma(mid) + inv_gamma(b));
        m_values_[i + 1] = m_values_[i] + h_ / 6.0 * (mu_over_gamma(a) +
                                                      4.0 * mu_over_gamma(mid) +
                                                      mu_over_gamma(b));
    }
    // E(s) = int_0^s exp(M); M is only known at the fine nodes, so integrate
    // exp of the Hermite interpolant per panel.
    m_slopes_ = monotone_slopes(m_values_, h_);
    for (int i = 0; i < cells_; ++i) {
        double mid = hermite(m_values_[i], m_values_[i + 1], m_slopes_[i], m_slopes_[i + 1],
                             h_, 0.5);
        e_values_[i + 1] = e_values_[i] + h_ / 6.0 * (std::exp(m_values_[i]) +
                                                      4.0 * std::exp(mid) +
                                                      std::exp(m_values_[i + 1]));
    }
    g_slopes_ = monotone_slopes(g_values_, h_);
    e_slopes_ = monotone_slopes(e_values_, h_);
    total_time_ = g_values_.back();
}

double FlowCache::eval(const std::vector<double>& values, const std::vector<double>& slopes,
                       double s) const {
    if (s <= 0.0) return values.front();
    if (s >= 1.0) return values.back();
    double u = s * cells_;
    int i = std::min(static_cast<int>(u), cells_ - 1);
    return hermite(values[i], values[i + 1], slopes[i], slopes[i + 1], h_, u - i);
}

double FlowCache::G(double s) const { return eval(g_values_, g_slopes_, s); }
double FlowCache::M(double s) const { return eval(m_values_, m_slopes_, s); }
double FlowCache::E(double s) const { return eval(e_values_, e_slopes_, s); }

double FlowCache::G_inverse(double g) const {
    if (g <= 0.0) return 0.0;
    if (g >= total_time_) return 1.0;
    auto it = std::upper_bound(g_values_.begin(), g_values_.end(), g);
    int i = static_cast<int>(it - g_values_.begin()) - 1;
    i = std::clamp(i, 0, cells_ - 1);
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 64; ++iter) {
        double t = 0.5 * (lo + hi);
        double value = hermite(g_values_[i], g_values_[i + 1], g_slopes_[i], g_slopes_[i + 1],
                               h_, t);
        (value < g ? lo : hi) = t;
    }
    return (i + 0.5 * (lo + hi)) * h_;
}

namespace {
void check_interval(double x, double y) {
    if (x < -kDomainSlack || y > 1.0 + kDomainSlack || x > y + kDomainSlack)
        throw Error(ErrorCode::OutOfDomain, "need 0 <= x <= y <= 1, got x = " +
                                                std::to_string(x) + ", y = " + std::to_string(y));
}
}  // namespace

double FlowCache::tau(double x, double y) const {
    check_interval(x, y);
    return std::max(0.0, G(y) - G(x));
}

double FlowCache::survival(double x, double y) const {
    check_interval(x, y);
    return std::exp(-std::max(0.0, M(y) - M(x)));
}

double FlowCache::survival_normalizer(double y) const {
    return std::exp(-M(y)) * E(y);
}

std::optional<double> FlowCache::flow_forward(double t, double s0) const {
    if (s0 < -kDomainSlack || s0 > 1.0 + kDomainSlack || t < -kDomainSlack)
        throw Error(ErrorCode::OutOfDomain, "flow_forward(t = " + std::to_string(t) +
                                                ", s0 = " + std::to_string(s0) + ")");
    double g = G(s0) + std::max(0.0, t);
    if (g > total_time_ + kDomainSlack) return std::nullopt;  // exited at s = 1
    return G_inverse(std::min(g, total_time_));
}

std::optional<double> FlowCache::flow_backward(double t, double s) const {
    if (s < -kDomainSlack || s > 1.0 + kDomainSlack || t < -kDomainSlack)
        throw Error(ErrorCode::OutOfDomain, "flow_backward(t = " + std::to_string(t) +
                                                ", s = " + std::to_string(s) + ")");
    double g = G(s) - std::max(0.0, t);
    if (g < -kDomainSlack) return std::nullopt;  // born after time 0
    return G_inverse(std::max(g, 0.0));
}

}  // namespace structpop

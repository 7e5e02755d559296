#ifndef STRUCTPOP_CHARACTERISTICS_HPP
#define STRUCTPOP_CHARACTERISTICS_HPP

#include <optional>
#include <vector>

#include "structpop/model.hpp"

namespace structpop {

/// Cumulative tables driving the characteristic flow:
///   G(s) = int_0^s 1/gamma,      strictly increasing, G(1) = Gamma,
///   M(s) = int_0^s mu/gamma,     nondecreasing,
///   E(s) = int_0^s exp(M(x)) dx  (used to normalize survival-weighted
///                                 age profiles).
/// Tables are computed once by composite Simpson on a fine mesh and
/// evaluated by monotone cubic (Fritsch-Carlson) interpolation; G is
/// inverted by interval location plus bisection on the cubic.
/// Immutable after construction; all queries are pure.
class FlowCache {
  public:
    explicit FlowCache(const VitalRates& rates, int fine_cells = 4096);

    double G(double s) const;
    double M(double s) const;
    double E(double s) const;
    double Gamma() const { return total_time_; }

    /// The growth rate itself (kept so flow-based operators need no second
    /// handle on the model).
    double gamma_at(double s) const { return gamma_(s); }

    /// Inverse of G on [0, Gamma]; input clamped to the table range.
    double G_inverse(double g) const;

    /// Time to grow from size x to size y = G(y) - G(x). Requires
    /// 0 <= x <= y <= 1 (throws OutOfDomain).
    double tau(double x, double y) const;

    /// exp(-(M(y) - M(x))), the probability to survive growth from x to y.
    double survival(double x, double y) const;

    /// int_0^y survival(x,y) dx = exp(-M(y)) * E(y).
    double survival_normalizer(double y) const;

    /// Size after time t >= 0 starting from s0; nullopt once the
    /// characteristic leaves at s = 1.
    std::optional<double> flow_forward(double t, double s0) const;

    /// Size at time 0 of an individual of size s at time t >= 0; nullopt if
    /// the backward characteristic exits at size 0 (born after time 0).
    std::optional<double> flow_backward(double t, double s) const;

  private:
    double eval(const std::vector<double>& values, const std::vector<double>& slopes,
                double s) const;

    int cells_;
    double h_;            // fine mesh spacing
    double total_time_;   // Gamma = G(1)
    std::function<double(double)> gamma_;
    std::vector<double> g_values_, g_slopes_;
    std::vector<double> m_values_, m_slopes_;
    std::vector<double> e_values_, e_slopes_;
};

}  // namespace structpop

#endif

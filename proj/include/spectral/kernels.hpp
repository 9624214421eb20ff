#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace spectral {

class kernel_contract_error : public std::invalid_argument {
public:
    explicit kernel_contract_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Drift field B with a one-sided Lipschitz constant c0:
/// B(x) - B(y) >= -c0 (x - y) for x >= y, validated by sampling.
struct DriftField {
    std::function<double(double)> B;
    double c0 = 0.0;

    static DriftField validated(std::function<double(double)> B, double c0,
                                double lo = -5.0, double hi = 5.0, int samples = 200);
};

/// Pair interaction numerator f(x,y) and operator kernel g(x,z) with the
/// regularity constants of the general framework.  The two are tied by
///   (x - y) d_y f(x,y) + f(x,y) = g(x, y - x),
/// which construction checks at sampled points (central differences for
/// d_y f).  Constants are validated by dense sampling on a bounded box, not
/// proven.
class InteractionKernel {
public:
    enum class Kind { Dyson, Wishart, General };

    Kind kind() const { return kind_; }
    double f(double x, double y) const;
    double g(double x, double z) const;
    double lipschitz_C() const { return lipschitz_C_; }
    double alpha0() const { return alpha0_; }
    double wishart_c() const { return wishart_c_; }

    /// f == 1, g == 1.
    static InteractionKernel dyson();

    /// f(x,y) = x + y, g(x,z) = 2x 1{z >= -x}; aspect ratio c = m/n >= 1.
    static InteractionKernel wishart(double c);

    /// General kernel from explicit f and g; validates positivity, the
    /// Lipschitz/boundedness/log-derivative conditions on the sampling box,
    /// and the f<->g compatibility relation.
    static InteractionKernel general(std::function<double(double, double)> f,
                                     std::function<double(double, double)> g,
                                     double lipschitz_C, double alpha0,
                                     double xbox = 5.0, double zbox = 2.0);

    /// Multiplicative kernel f(x,y) = sigma(x) sigma(y); g is derived in
    /// closed form from the compatibility relation:
    ///   g(x,z) = sigma(x) (sigma(x+z) - z sigma'(x+z)).
    static InteractionKernel sigma_product(std::function<double(double)> sigma,
                                           std::function<double(double)> sigma_prime,
                                           double lipschitz_C, double alpha0,
                                           double xbox = 5.0, double zbox = 2.0);

    /// Test-only escape hatch: no contract validation (used for degenerate
    /// kernels like g == 0 in pure-transport checks).
    static InteractionKernel general_unchecked(std::function<double(double, double)> f,
                                               std::function<double(double, double)> g,
                                               double lipschitz_C, double alpha0);

private:
    InteractionKernel() = default;

    Kind kind_ = Kind::Dyson;
    std::function<double(double, double)> f_;
    std::function<double(double, double)> g_;
    double lipschitz_C_ = 1.0;
    double alpha0_ = 1.0;
    double wishart_c_ = 0.0;
};

} // namespace spectral

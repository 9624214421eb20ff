#include "spectral/kernels.hpp"

#include <cmath>
#include <utility>

namespace spectral {

namespace {

double central_dy(const std::function<double(double, double)>& f, double x, double y,
                  double delta = 1e-5)
{
    return (f(x, y + delta) - f(x, y - delta)) / (2 * delta);
}

void validate_general(const std::function<double(double, double)>& f,
                      const std::function<double(double, double)>& g,
                      double C, double alpha0, double xbox, double zbox)
{
    if (!(C > 0) || !(alpha0 > 0))
        throw kernel_contract_error("kernel: lipschitz_C and alpha0 must be positive");

    const int nx = 41, nz = 41;
    auto xs = [&](int i) { return -xbox + 2 * xbox * i / double(nx - 1); };
    auto zs = [&](int k) { return -zbox + 2 * zbox * k / double(nz - 1); };

    for (int i = 0; i < nx; ++i) {
        for (int k = 0; k < nz; ++k) {
            const double x = xs(i), z = zs(k);
            const double gv = g(x, z);
            if (gv < -1e-9)
                throw kernel_contract_error("kernel: g takes negative values on the sampling box");
            if (i + 1 < nx) {
                const double y = xs(i + 1);
                if (std::abs(g(x, z) - g(y, z)) > C * std::abs(x - y) * (1 + 1e-9) + 1e-12)
                    throw kernel_contract_error("kernel: |g(x,z)-g(y,z)| exceeds C|x-y|");
            }
            if (std::abs(z) < alpha0) {
                if (gv < 1.0 / C - 1e-9 || gv > C + 1e-9)
                    throw kernel_contract_error("kernel: g escapes [1/C, C] on the alpha0 strip");
            }
        }
        // log-derivative bound on the alpha0 strip, central differences in x
        const double x = xs(i);
        const double dx = 1e-5;
        auto logderiv = [&](double z) {
            return (g(x + dx, z) - g(x - dx, z)) / (2 * dx * g(x, z));
        };
        const double ld0 = logderiv(0.0);
        for (int k = 0; k < nz; ++k) {
            const double z = zs(k);
            if (std::abs(z) >= alpha0) continue;
            if (std::abs(logderiv(z) - ld0) > C * std::abs(z) * (1 + 1e-6) + 1e-6)
                throw kernel_contract_error("kernel: log-derivative bound fails on the alpha0 strip");
        }
    }

    if (f) {
        // compatibility (x - y) d_y f + f = g(x, y - x) at sampled points
        for (int i = 0; i < nx; ++i) {
            for (int k = 0; k < nz; ++k) {
                const double x = xs(i);
                const double y = x + zs(k);
                const double lhs = (x - y) * central_dy(f, x, y) + f(x, y);
                const double rhs = g(x, y - x);
                if (std::abs(lhs - rhs) > 1e-6 * (1 + std::abs(rhs)))
                    throw kernel_contract_error("kernel: f and g violate their compatibility relation");
            }
        }
    }
}

} // namespace

double InteractionKernel::f(double x, double y) const
{
    switch (kind_) {
    case Kind::Dyson: return 1.0;
    case Kind::Wishart: return x + y;
    case Kind::General: return f_(x, y);
    }
    return 0.0;
}

double InteractionKernel::g(double x, double z) const
{
    switch (kind_) {
    case Kind::Dyson: return 1.0;
    case Kind::Wishart: return z >= -x ? 2 * x : 0.0;
    case Kind::General: return g_(x, z);
    }
    return 0.0;
}

InteractionKernel InteractionKernel::dyson()
{
    InteractionKernel k;
    k.kind_ = Kind::Dyson;
    k.lipschitz_C_ = 1.0;
    k.alpha0_ = 1e9;
    return k;
}

InteractionKernel InteractionKernel::wishart(double c)
{
    if (!(c >= 1.0))
        throw kernel_contract_error("wishart kernel: requires c = m/n >= 1");
    InteractionKernel k;
    k.kind_ = Kind::Wishart;
    k.wishart_c_ = c;
    k.lipschitz_C_ = 2.0;
    k.alpha0_ = 1.0;
    return k;
}

InteractionKernel InteractionKernel::general(std::function<double(double, double)> f,
                                             std::function<double(double, double)> g,
                                             double lipschitz_C, double alpha0,
                                             double xbox, double zbox)
{
    validate_general(f, g, lipschitz_C, alpha0, xbox, zbox);
    InteractionKernel k;
    k.kind_ = Kind::General;
    k.f_ = std::move(f);
    k.g_ = std::move(g);
    k.lipschitz_C_ = lipschitz_C;
    k.alpha0_ = alpha0;
    return k;
}

InteractionKernel InteractionKernel::sigma_product(std::function<double(double)> sigma,
                                                   std::function<double(double)> sigma_prime,
                                                   double lipschitz_C, double alpha0,
                                                   double xbox, double zbox)
{
    auto f = [sigma](double x, double y) { return sigma(x) * sigma(y); };
    auto g = [sigma, sigma_prime](double x, double z) {
        return sigma(x) * (sigma(x + z) - z * sigma_prime(x + z));
    };
    return general(f, g, lipschitz_C, alpha0, xbox, zbox);
}

InteractionKernel InteractionKernel::general_unchecked(std::function<double(double, double)> f,
                                                       std::function<double(double, double)> g,
                                                       double lipschitz_C, double alpha0)
{
    InteractionKernel k;
    k.kind_ = Kind::General;
    k.f_ = std::move(f);
    k.g_ = std::move(g);
    k.lipschitz_C_ = lipschitz_C;
    k.alpha0_ = alpha0;
    return k;
}

DriftField DriftField::validated(std::function<double(double)> B, double c0,
                                 double lo, double hi, int samples)
{
    if (c0 < 0) throw std::invalid_argument("DriftField: c0 must be nonnegative");
    double prev_x = lo, prev_b = B(lo);
    for (int i = 1; i < samples; ++i) {
        double x = lo + (hi - lo) * i / double(samples - 1);
        double b = B(x);
        if (b - prev_b < -c0 * (x - prev_x) - 1e-9)
            throw std::invalid_argument("DriftField: one-sided Lipschitz bound fails at samples");
        prev_x = x;
        prev_b = b;
    }
    return DriftField{std::move(B), c0};
}

} // namespace spectral

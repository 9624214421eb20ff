#pragma once

// Test-side oracles, independent of the library's implementation paths.

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracles {

// closed-form semicircle CDF, radius R centred at 0
inline double semicircle_cdf(double x, double R)
{
    if (x <= -R) return 0.0;
    if (x >= R) return 1.0;
    return 0.5 + x * std::sqrt(R * R - x * x) / (M_PI * R * R) + std::asin(x / R) / M_PI;
}

// inverse-CDF sampler for a law given by its CDF (bisection)
template <class Cdf>
double invert_cdf(Cdf&& cdf, double p, double lo, double hi)
{
    for (int it = 0; it < 200; ++it) {
        const double mid = (lo + hi) / 2;
        (cdf(mid) < p ? lo : hi) = mid;
    }
    return (lo + hi) / 2;
}

// direct sorted-vector p-Wasserstein: ||x - y||_p / N^{1/p}
inline double sorted_vector_wp(const std::vector<double>& x, const std::vector<double>& y,
                               double p)
{
    if (x.size() != y.size()) throw std::invalid_argument("sorted_vector_wp: size mismatch");
    if (std::isinf(p)) {
        double m = 0;
        for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
        return m;
    }
    double acc = 0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x[i] - y[i]), p);
    return std::pow(acc / static_cast<double>(x.size()), 1.0 / p);
}

// Jacobi rotation eigenvalues for a symmetric matrix (row-major, n x n);
// a classical route independent of the production eigensolver.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n)
{
    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0)
                               / (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = a[i * n + i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

// two-sample Kolmogorov-Smirnov p-value (asymptotic)
inline double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size()
                                 - static_cast<double>(j) / b.size()));
    }
    const double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
    const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    double p = 0;
    for (int k = 1; k <= 100; ++k)
        p += 2 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
    return std::clamp(p, 0.0, 1.0);
}

// random nondecreasing CDF values on n nodes, pinned 0 -> 1
inline std::vector<double> random_cdf_values(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(n);
    double acc = 0;
    v[0] = 0;
    for (std::size_t i = 1; i < n; ++i) {
        acc += u(rng);
        v[i] = acc;
    }
    for (auto& x : v) x /= acc;
    v.front() = 0.0;
    v.back() = 1.0;
    return v;
}

} // namespace oracles

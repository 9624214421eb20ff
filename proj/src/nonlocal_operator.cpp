#include "spectral/nonlocal_operator.hpp"

#include <algorithm>
#include <cmath>

namespace spectral {

PvQuadratureParams PvQuadratureParams::defaults_for(const GridSpec& grid)
{
    PvQuadratureParams q;
    q.delta = 10.0 * grid.h();
    q.far_cut = grid.hi - grid.lo;
    q.delta = std::min(q.delta, q.far_cut / 2);
    return q;
}

void PvQuadratureParams::validate(double h) const
{
    if (!(h > 0) || !(h <= delta) || !(delta < far_cut))
        throw std::invalid_argument("PvQuadratureParams: need 0 < h <= delta < far_cut");
}

namespace {

inline double clamped(const std::vector<double>& v, long i)
{
    if (i < 0) return v.front();
    if (i >= static_cast<long>(v.size())) return v.back();
    return v[static_cast<std::size_t>(i)];
}

void check_interior(const GridFunction& f, std::size_t xi)
{
    if (xi == 0 || xi + 1 >= f.grid.n)
        throw std::invalid_argument("nonlocal operator: x must be an interior grid node");
}

// Shared PV engine.  Sums h * w(z_k) * g(x, z_k) * (F(x) - F(x + z_k)) over
// node offsets z_k = +-k h, k = 1..K, pairing the two sides of the
// singularity, then adds the closed-form tails with F and g frozen beyond
// far_cut.  `split_at` < 0 accumulates everything into `inner`; otherwise
// |z| <= split_at goes to `inner` and the rest (tails included) to `outer`.
template <class G>
void pv_accumulate(const GridFunction& f, std::size_t xi, const PvQuadratureParams& q,
                   G&& g, double mollify_eps, double split_at,
                   double& inner, double& outer)
{
    const double h = f.grid.h();
    q.validate(h);
    const auto& v = f.values;
    const double x = f.grid.x(xi);
    const double fx = v[xi];
    const long K = std::lround(q.far_cut / h);

    inner = 0.0;
    outer = 0.0;
    for (long k = 1; k <= K; ++k) {
        const double z = static_cast<double>(k) * h;
        double w = 1.0 / (z * z);
        if (mollify_eps > 0) w = std::min(w, 1.0 / (mollify_eps * mollify_eps));
        const double right = g(x, z) * (fx - clamped(v, static_cast<long>(xi) + k));
        const double left = g(x, -z) * (fx - clamped(v, static_cast<long>(xi) - k));
        const double contrib = h * w * (right + left);
        if (split_at < 0 || z <= split_at + 1e-12 * h)
            inner += contrib;
        else
            outer += contrib;
    }
    const double tail = g(x, q.far_cut) * (fx - f.back_tail()) / q.far_cut
                      + g(x, -q.far_cut) * (fx - f.front_tail()) / q.far_cut;
    if (split_at < 0)
        inner += tail;
    else
        outer += tail;
}

template <class G>
double pv_apply(const GridFunction& f, std::size_t xi, const PvQuadratureParams& q,
                G&& g, double mollify_eps = 0.0)
{
    double inner = 0.0, outer = 0.0;
    pv_accumulate(f, xi, q, std::forward<G>(g), mollify_eps, -1.0, inner, outer);
    return inner;
}

// First-order correction for the dropped inner cell when d_z g(x,0) != 0:
// int_{|z|<h} g (F(x)-F(x+z))/z^2 dz ~ -F'(x) d_z g(x,0) 2h.
double inner_cell_correction(const GridFunction& f, std::size_t xi,
                             const InteractionKernel& kernel)
{
    const double h = f.grid.h();
    const double x = f.grid.x(xi);
    const double dz = std::min(h, kernel.alpha0()) / 2;
    const double gz0 = (kernel.g(x, dz) - kernel.g(x, -dz)) / (2 * dz);
    if (std::abs(gz0) < 1e-12) return 0.0;
    const auto& v = f.values;
    const double fprime = (clamped(v, static_cast<long>(xi) + 1)
                         - clamped(v, static_cast<long>(xi) - 1)) / (2 * h);
    return -fprime * gz0 * 2 * h;
}

} // namespace

double htilde(const GridFunction& f, std::size_t xi, const PvQuadratureParams& q)
{
    check_interior(f, xi);
    return pv_apply(f, xi, q, [](double, double) { return 1.0; });
}

double ktilde(const GridFunction& f, std::size_t xi, double c, const PvQuadratureParams& q)
{
    if (f.grid.lo < -1e-12)
        throw std::invalid_argument("ktilde: requires a half-line grid starting at 0");
    if (xi + 1 >= f.grid.n)
        throw std::invalid_argument("ktilde: x must be below the right boundary");
    const double constant = c - f.back_tail() - f.front_tail();
    if (xi == 0) return constant; // the PV term vanishes at x = 0
    auto g = [](double x, double z) { return z >= -x ? 2 * x : 0.0; };
    return constant + pv_apply(f, xi, q, g);
}

double l_apply(const GridFunction& f, std::size_t xi, const InteractionKernel& kernel,
               const PvQuadratureParams& q)
{
    check_interior(f, xi);
    if (kernel.kind() != InteractionKernel::Kind::General)
        throw std::invalid_argument("l_apply: kernel must be of General kind");
    double value = pv_apply(f, xi, q, [&](double x, double z) { return kernel.g(x, z); });
    return value + inner_cell_correction(f, xi, kernel);
}

std::pair<double, double> split_apply(const GridFunction& f, std::size_t xi,
                                      const InteractionKernel& kernel, double delta,
                                      const PvQuadratureParams& q)
{
    check_interior(f, xi);
    if (kernel.kind() != InteractionKernel::Kind::General)
        throw std::invalid_argument("split_apply: kernel must be of General kind");
    double i1 = 0.0, i2 = 0.0;
    pv_accumulate(f, xi, q, [&](double x, double z) { return kernel.g(x, z); },
                  0.0, delta, i1, i2);
    i1 += inner_cell_correction(f, xi, kernel);
    return {i1, i2};
}

std::vector<double> operator_field(const GridFunction& f, const InteractionKernel& kernel,
                                   const PvQuadratureParams& q, double mollify_eps)
{
    const std::size_t n = f.grid.n;
    std::vector<double> out(n, 0.0);

    switch (kernel.kind()) {
    case InteractionKernel::Kind::Dyson: {
        // constant weight: precompute w_k once
        const double h = f.grid.h();
        q.validate(h);
        const long K = std::lround(q.far_cut / h);
        std::vector<double> w(static_cast<std::size_t>(K) + 1, 0.0);
        for (long k = 1; k <= K; ++k) {
            const double z = static_cast<double>(k) * h;
            w[static_cast<std::size_t>(k)] = h / (z * z);
            if (mollify_eps > 0)
                w[static_cast<std::size_t>(k)] =
                    std::min(w[static_cast<std::size_t>(k)], h / (mollify_eps * mollify_eps));
        }
        const auto& v = f.values;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double fx = v[i];
            double acc = (fx - f.back_tail()) / q.far_cut + (fx - f.front_tail()) / q.far_cut;
            for (long k = 1; k <= K; ++k)
                acc += w[static_cast<std::size_t>(k)]
                     * (2 * fx - clamped(v, static_cast<long>(i) + k)
                               - clamped(v, static_cast<long>(i) - k));
            out[i] = acc;
        }
        break;
    }
    case InteractionKernel::Kind::Wishart: {
        const double c = kernel.wishart_c();
        auto g = [](double x, double z) { return z >= -x ? 2 * x : 0.0; };
        const double constant = c - f.back_tail() - f.front_tail();
        for (std::size_t i = 1; i + 1 < n; ++i)
            out[i] = constant + pv_apply(f, i, q, g, mollify_eps);
        break;
    }
    case InteractionKernel::Kind::General: {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            out[i] = pv_apply(f, i, q, [&](double x, double z) { return kernel.g(x, z); },
                              mollify_eps)
                   + inner_cell_correction(f, i, kernel);
        }
        break;
    }
    }
    return out;
}

double kernel_mass_bound(const GridFunction& f, const InteractionKernel& kernel,
                         const PvQuadratureParams& q, double mollify_eps)
{
    const double h = f.grid.h();
    q.validate(h);
    const long K = std::lround(q.far_cut / h);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < f.grid.n; ++i) {
        const double x = f.grid.x(i);
        double acc = (kernel.g(x, q.far_cut) + kernel.g(x, -q.far_cut)) / q.far_cut;
        for (long k = 1; k <= K; ++k) {
            const double z = static_cast<double>(k) * h;
            double w = 1.0 / (z * z);
            if (mollify_eps > 0) w = std::min(w, 1.0 / (mollify_eps * mollify_eps));
            acc += h * w * (kernel.g(x, z) + kernel.g(x, -z));
        }
        worst = std::max(worst, acc);
    }
    return worst;
}

} // namespace spectral

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "spectral/grid.hpp"
#include "spectral/kernels.hpp"

namespace spectral {

/// Quadrature knobs for the principal-value operators.
/// The singular integral is realized by symmetric pairing: contributions at
/// y = x +/- s are summed as (2F(x) - F(x+s) - F(x-s))/s^2, which cancels
/// the odd part of the singularity; the continuum cell |z| < h is dropped
/// (or mollified by the scheme, see mollify_eps).  Beyond far_cut both F and
/// the kernel weight are frozen at their cutoff values and the tail integral
/// is taken in closed form.
struct PvQuadratureParams {
    double delta;    // inner/outer split radius, h <= delta < far_cut
    double far_cut;  // outer truncation radius

    /// delta = 10 h, far_cut = full grid width.
    static PvQuadratureParams defaults_for(const GridSpec& grid);

    void validate(double h) const;
};

/// Half-Laplacian-type operator: htilde[F](x) = PV int (F(x)-F(y))/(x-y)^2 dy.
/// x must be an interior node.
double htilde(const GridFunction& f, std::size_t xi, const PvQuadratureParams& q);

/// Wishart operator on the half-line grid [0, hi]:
/// ktilde[F](x) = c - F(hi) - F(0) + 2x PV int_{y>=0} (F(x)-F(y))/(x-y)^2 dy;
/// the integral term is 0 at x = 0.
double ktilde(const GridFunction& f, std::size_t xi, double c, const PvQuadratureParams& q);

/// General kernel operator L[F](x) = PV int g(x,z)(F(x)-F(x+z))/z^2 dz.
/// When the kernel's z-derivative at 0 fails to vanish, a first-order
/// Taylor correction for the dropped inner cell is applied.
double l_apply(const GridFunction& f, std::size_t xi, const InteractionKernel& kernel,
               const PvQuadratureParams& q);

/// (I1, I2) split of l_apply at radius delta: I1 integrates |z| <= delta,
/// I2 integrates |z| > delta (tails included); I1 + I2 = l_apply.
std::pair<double, double> split_apply(const GridFunction& f, std::size_t xi,
                                      const InteractionKernel& kernel, double delta,
                                      const PvQuadratureParams& q);

/// Operator values at every interior node (boundary entries are zero).
/// mollify_eps > 0 replaces the kernel weight 1/z^2 by min(1/z^2,
/// 1/mollify_eps^2); this is the regularized operator the PDE scheme uses.
std::vector<double> operator_field(const GridFunction& f, const InteractionKernel& kernel,
                                   const PvQuadratureParams& q, double mollify_eps = 0.0);

/// Sum of quadrature weights sum_k h w(z_k) g(x, z_k) — the nodewise kernel
/// mass that bounds the operator's sensitivity to F(x); used for the scheme's
/// monotonicity-preserving CFL bound.
double kernel_mass_bound(const GridFunction& f, const InteractionKernel& kernel,
                         const PvQuadratureParams& q, double mollify_eps = 0.0);

} // namespace spectral

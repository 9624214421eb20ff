#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "spectral/ordered_spectrum.hpp"

namespace spectral {

/// Path of symmetric n x n matrices; every stored matrix is symmetric to
/// 1e-12 componentwise.
struct SymMatrixPath {
    int n = 0;
    std::vector<double> times;
    std::vector<Eigen::MatrixXd> matrices;

    const Eigen::MatrixXd& at_time_index(std::size_t k) const { return matrices[k]; }
    const Eigen::MatrixXd& final() const { return matrices.back(); }
};

struct WishartConfig {
    int n = 2;
    int m = 2;           // m >= n
    double dt = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Symmetric Brownian matrix: entries on and above the diagonal evolve by
/// independent gaussian increments of variance scale^2 dt / n, mirrored
/// below.  Increments are exact (no discretization bias); the path is
/// recorded every dt up to t_end.
SymMatrixPath simulate_symmetric_bm(int n, double dt, double t_end, std::uint64_t seed,
                                    double scale = 1.0);

/// X_t = (1/n) A_t A_t^T with A an n x m matrix of i.i.d. Brownian entries.
SymMatrixPath simulate_wishart_path(const WishartConfig& cfg, double t_end);

/// Euler–Maruyama for dA = sigma(A) dW sigma(A): sigma(A) is evaluated by
/// functional calculus (full eigendecomposition each step), dW is a
/// symmetric gaussian increment as in simulate_symmetric_bm, and symmetry is
/// re-enforced by averaging with the transpose after each step.
SymMatrixPath simulate_sigma_diffusion(int n, const std::function<double(double)>& sigma,
                                       double dt, double t_end, std::uint64_t seed);

/// Sorted eigenvalues of a symmetric matrix (non-symmetric input is an error).
OrderedSpectrum eigenvalues(const Eigen::MatrixXd& m);

} // namespace spectral

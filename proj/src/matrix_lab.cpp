#include "spectral/matrix_lab.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace spectral {

namespace {

// symmetric gaussian increment: independent entries of variance var on and
// above the diagonal, mirrored below
Eigen::MatrixXd symmetric_increment(int n, double var, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(var));
    Eigen::MatrixXd w(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = normal(rng);
            w(i, j) = v;
            w(j, i) = v;
        }
    return w;
}

void check_symmetric(const Eigen::MatrixXd& m, double tol)
{
    if (m.rows() != m.cols())
        throw std::invalid_argument("matrix must be square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = i + 1; j < m.cols(); ++j)
            if (std::abs(m(i, j) - m(j, i)) > tol * scale)
                throw std::invalid_argument("matrix is not symmetric within tolerance");
}

} // namespace

void WishartConfig::validate() const
{
    if (n < 1 || m < n) throw std::invalid_argument("WishartConfig: requires m >= n >= 1");
    if (!(dt > 0)) throw std::invalid_argument("WishartConfig: dt must be positive");
}

SymMatrixPath simulate_symmetric_bm(int n, double dt, double t_end, std::uint64_t seed,
                                    double scale)
{
    if (n < 2) throw std::invalid_argument("simulate_symmetric_bm: n >= 2 required");
    if (!(dt > 0) || !(t_end >= 0)) throw std::invalid_argument("simulate_symmetric_bm: bad times");
    std::mt19937_64 rng(seed);

    SymMatrixPath path;
    path.n = n;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    path.times.push_back(0.0);
    path.matrices.push_back(a);
    double t = 0.0;
    while (t < t_end - 1e-12) {
        const double step = std::min(dt, t_end - t);
        a += symmetric_increment(n, scale * scale * step / n, rng);
        t += step;
        path.times.push_back(t);
        path.matrices.push_back(a);
    }
    return path;
}

SymMatrixPath simulate_wishart_path(const WishartConfig& cfg, double t_end)
{
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    SymMatrixPath path;
    path.n = cfg.n;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(cfg.n, cfg.m);
    auto record = [&](double t) {
        path.times.push_back(t);
        path.matrices.push_back(a * a.transpose() / static_cast<double>(cfg.n));
    };
    record(0.0);
    double t = 0.0;
    while (t < t_end - 1e-12) {
        const double step = std::min(cfg.dt, t_end - t);
        const double s = std::sqrt(step);
        for (int i = 0; i < cfg.n; ++i)
            for (int j = 0; j < cfg.m; ++j) a(i, j) += s * normal(rng);
        t += step;
        record(t);
    }
    return path;
}

SymMatrixPath simulate_sigma_diffusion(int n, const std::function<double(double)>& sigma,
                                       double dt, double t_end, std::uint64_t seed)
{
    if (n < 2) throw std::invalid_argument("simulate_sigma_diffusion: n >= 2 required");
    std::mt19937_64 rng(seed);

    SymMatrixPath path;
    path.n = n;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    path.times.push_back(0.0);
    path.matrices.push_back(a);
    double t = 0.0;
    while (t < t_end - 1e-12) {
        const double step = std::min(dt, t_end - t);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("simulate_sigma_diffusion: eigendecomposition failed");
        Eigen::VectorXd sv = es.eigenvalues();
        for (int i = 0; i < n; ++i) sv(i) = sigma(sv(i));
        const Eigen::MatrixXd s =
            es.eigenvectors() * sv.asDiagonal() * es.eigenvectors().transpose();
        const Eigen::MatrixXd dw = symmetric_increment(n, step / n, rng);
        a += s * dw * s;
        a = ((a + a.transpose()) / 2).eval();
        t += step;
        path.times.push_back(t);
        path.matrices.push_back(a);
    }
    return path;
}

OrderedSpectrum eigenvalues(const Eigen::MatrixXd& m)
{
    check_symmetric(m, 1e-9);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigenvalues: solver failed");
    std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
    return OrderedSpectrum::from_unsorted(std::move(v));
}

} // namespace spectral

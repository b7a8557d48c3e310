#include "uqkit/prob_core.hpp"

#include <algorithm>
#include <cmath>

namespace uqkit {

namespace {

void check_symmetric_psd(const Eigen::MatrixXd& cov) {
    if (cov.rows() != cov.cols()) throw SizeError("covariance must be square");
    const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw SymmetryError("covariance must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success)
        throw SingularMatrixError("covariance eigendecomposition failed");
    if (es.eigenvalues().minCoeff() < -1e-10 * scale)
        throw DomainError("covariance must be positive semi-definite");
}

}  // namespace

GaussianDist::GaussianDist(Eigen::VectorXd mean_in, Eigen::MatrixXd cov_in)
    : mean(std::move(mean_in)), cov(std::move(cov_in)) {
    if (mean.size() == 0) throw SizeError("Gaussian needs dimension >= 1");
    if (cov.rows() != mean.size())
        throw SizeError("Gaussian mean/covariance dimensions disagree");
    check_symmetric_psd(cov);
}

GaussianDist::GaussianDist(double mean_in, double var_in)
    : GaussianDist(Eigen::VectorXd::Constant(1, mean_in),
                   Eigen::MatrixXd::Constant(1, 1, var_in)) {}

double GaussianDist::pdf1d(double x) const {
    if (dim() != 1) throw SizeError("pdf1d requires a 1-D Gaussian");
    const double r = cov(0, 0);
    if (r <= 0.0) throw DomainError("pdf1d requires positive variance");
    const double z = x - mean(0);
    return std::exp(-0.5 * z * z / r) / std::sqrt(two_pi * r);
}

GammaDist::GammaDist(double shape_in, double scale_in) : shape(shape_in), scale(scale_in) {
    if (!(shape > 0.0)) throw DomainError("Gamma shape must be positive");
    if (!(scale > 0.0)) throw DomainError("Gamma scale must be positive");
}

double GammaDist::skewness() const { return 2.0 / std::sqrt(shape); }

double GammaDist::pdf(double x) const {
    if (x < 0.0) return 0.0;
    if (x == 0.0) {
        if (shape > 1.0) return 0.0;
        if (shape == 1.0) return 1.0 / scale;
        throw DomainError("Gamma density diverges at x = 0 for shape < 1; start the grid at x > 0");
    }
    const double log_pdf =
        (shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) - shape * std::log(scale);
    return std::exp(log_pdf);
}

GridPdf::GridPdf(double x0_in, double dx_in, Eigen::VectorXd values_in)
    : x0(x0_in), dx(dx_in), values(std::move(values_in)) {
    if (values.size() < 2) throw SizeError("grid density needs at least 2 points");
    if (!(dx > 0.0)) throw DomainError("grid spacing must be positive");
    if (!values.allFinite()) throw DomainError("grid density values must be finite");
    if (values.minCoeff() < 0.0) throw DomainError("grid density values must be non-negative");
}

double GridPdf::integral() const {
    const int n = size();
    return dx * (values.sum() - 0.5 * (values(0) + values(n - 1)));
}

GridPdf GridPdf::normalized() const {
    const double z = integral();
    if (!(z > 0.0)) throw NormalizationError("cannot normalize a density with zero mass");
    GridPdf out = *this;
    out.values /= z;
    return out;
}

bool GridPdf::same_grid(const GridPdf& other, double tol) const {
    return size() == other.size() && std::abs(x0 - other.x0) <= tol &&
           std::abs(dx - other.dx) <= tol;
}

StatSummary summary_stats(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 4) throw SizeError("summary_stats needs at least 4 samples");
    double mean = 0.0;
    for (double v : samples) {
        if (!std::isfinite(v)) throw DomainError("summary_stats requires finite samples");
        mean += v;
    }
    mean /= static_cast<double>(n);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : samples) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (m2 <= 0.0) throw DegenerateSampleError("summary_stats: zero sample variance");

    StatSummary out;
    out.mean = mean;
    out.variance = m2;
    out.skewness = m3 / std::pow(m2, 1.5);
    out.kurtosis = m4 / (m2 * m2);
    out.count = n;
    return out;
}

namespace {

template <typename Density>
GridPdf tabulate_impl(const Density& f, double x0, double dx, int n) {
    if (n < 2) throw SizeError("tabulate needs at least 2 grid points");
    if (!(dx > 0.0)) throw DomainError("tabulate needs positive grid spacing");
    Eigen::VectorXd vals(n);
    for (int i = 0; i < n; ++i) vals(i) = f(x0 + i * dx);
    return GridPdf(x0, dx, std::move(vals)).normalized();
}

}  // namespace

GridPdf tabulate(const GaussianDist& dist, double x0, double dx, int n) {
    if (dist.dim() != 1) throw SizeError("tabulate requires a 1-D Gaussian");
    return tabulate_impl([&](double x) { return dist.pdf1d(x); }, x0, dx, n);
}

GridPdf tabulate(const GammaDist& dist, double x0, double dx, int n) {
    if (x0 < 0.0) throw DomainError("Gamma grids must start at x >= 0");
    return tabulate_impl([&](double x) { return dist.pdf(x); }, x0, dx, n);
}

GridPdf estimate_pdf(std::span<const double> samples, double x0, double dx, int n,
                     std::optional<double> bandwidth) {
    const std::size_t m = samples.size();
    if (m < 10) throw SizeError("estimate_pdf needs at least 10 samples");
    if (n < 2) throw SizeError("estimate_pdf needs at least 2 grid points");
    if (!(dx > 0.0)) throw DomainError("estimate_pdf needs positive grid spacing");

    const StatSummary stats = summary_stats(samples);  // also validates finiteness
    double h;
    if (bandwidth) {
        h = *bandwidth;
        if (!(h > 0.0)) throw DomainError("estimate_pdf bandwidth must be positive");
    } else {
        h = 1.06 * std::sqrt(stats.variance) *
            std::pow(static_cast<double>(m), -0.2);
    }

    Eigen::VectorXd vals = Eigen::VectorXd::Zero(n);
    const double inv_h = 1.0 / h;
    const double norm = 1.0 / (static_cast<double>(m) * h * std::sqrt(two_pi));
    for (int i = 0; i < n; ++i) {
        const double xi = x0 + i * dx;
        double acc = 0.0;
        for (double s : samples) {
            const double z = (xi - s) * inv_h;
            acc += std::exp(-0.5 * z * z);
        }
        vals(i) = norm * acc;
    }
    return GridPdf(x0, dx, std::move(vals)).normalized();
}

GridPdf clip_normalize(const GridPdf& pdf, double eps) {
    if (!(eps > 0.0)) throw DomainError("clip threshold must be positive");
    if (eps >= pdf.values.maxCoeff())
        throw DomainError("clip threshold must be below the density peak");
    GridPdf out = pdf;
    out.values = out.values.cwiseMax(eps);
    return out.normalized();
}

Eigen::MatrixXd sample(const GaussianDist& dist, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw SizeError("sample count must be positive");
    const int m = dist.dim();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dist.cov);
    if (es.info() != Eigen::Success)
        throw SingularMatrixError("covariance factorization failed");
    // PSD square root; tiny negative eigenvalues from roundoff are clipped.
    const Eigen::MatrixXd factor =
        es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

    RngStream rng(seed);
    Eigen::MatrixXd out(count, m);
    Eigen::VectorXd z(m);
    for (std::size_t i = 0; i < count; ++i) {
        for (int j = 0; j < m; ++j) z(j) = rng.normal();
        out.row(i) = (dist.mean + factor * z).transpose();
    }
    return out;
}

Eigen::VectorXd sample(const GammaDist& dist, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw SizeError("sample count must be positive");
    RngStream rng(seed);
    Eigen::VectorXd out(count);
    for (std::size_t i = 0; i < count; ++i) out(i) = rng.gamma(dist.shape, dist.scale);
    return out;
}

}  // namespace uqkit

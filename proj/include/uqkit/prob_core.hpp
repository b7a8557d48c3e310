#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>

#include "uqkit/common.hpp"

namespace uqkit {

// Multivariate Gaussian with symmetric positive semi-definite covariance.
struct GaussianDist {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    GaussianDist(Eigen::VectorXd mean_in, Eigen::MatrixXd cov_in);
    // 1-D convenience.
    GaussianDist(double mean_in, double var_in);

    int dim() const { return static_cast<int>(mean.size()); }
    // 1-D density value.
    double pdf1d(double x) const;
};

// Gamma distribution in shape/scale parameterization.
struct GammaDist {
    double shape;  // k
    double scale;  // theta

    GammaDist(double shape_in, double scale_in);

    double mean() const { return shape * scale; }
    double variance() const { return shape * scale * scale; }
    double skewness() const;
    // Excess kurtosis (Gaussian = 0).
    double excess_kurtosis() const { return 6.0 / shape; }
    double pdf(double x) const;
};

// Piecewise-linear density on a uniform grid x_i = x0 + i*dx.
// Integrals over the grid are trapezoidal.
struct GridPdf {
    double x0 = 0.0;
    double dx = 0.0;
    Eigen::VectorXd values;

    GridPdf() = default;
    GridPdf(double x0_in, double dx_in, Eigen::VectorXd values_in);

    int size() const { return static_cast<int>(values.size()); }
    double x(int i) const { return x0 + i * dx; }
    // Trapezoidal integral of the tabulated values.
    double integral() const;
    // Rescaled copy with unit trapezoidal integral.
    GridPdf normalized() const;
    bool same_grid(const GridPdf& other, double tol = 1e-12) const;
};

// Sample moments: mean, population variance, and the standardized third and
// fourth central moments (kurtosis is raw, Gaussian = 3).
struct StatSummary {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
    std::size_t count = 0;
};

StatSummary summary_stats(std::span<const double> samples);

// Tabulated densities, renormalized on the grid.
GridPdf tabulate(const GaussianDist& dist, double x0, double dx, int n);
GridPdf tabulate(const GammaDist& dist, double x0, double dx, int n);

// Gaussian-kernel density estimate on the grid, renormalized.  Bandwidth
// defaults to the Silverman rule 1.06 * sigma_hat * n^(-1/5).
GridPdf estimate_pdf(std::span<const double> samples, double x0, double dx, int n,
                     std::optional<double> bandwidth = std::nullopt);

// Tail regularization: raise values below eps to eps, then renormalize.
// Guarantees a strictly positive density so relative entropies stay finite.
GridPdf clip_normalize(const GridPdf& pdf, double eps = 1e-5);

// Draw count samples; rows are samples, columns are components.
Eigen::MatrixXd sample(const GaussianDist& dist, std::size_t count, std::uint64_t seed);
Eigen::VectorXd sample(const GammaDist& dist, std::size_t count, std::uint64_t seed);

}  // namespace uqkit

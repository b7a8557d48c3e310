#pragma once

#include <utility>
#include <vector>

#include "uqkit/lada.hpp"
#include "uqkit/prob_core.hpp"

namespace uqkit {

// Observed rates and latent-velocity statistics for damping estimation:
// at each time, xdot is the observed rate, y_mean/y_var the mean and variance
// of the uncertain latent factor multiplying the damping coefficient.
struct RegressionData {
    Eigen::VectorXd times;
    Eigen::VectorXd xdot;
    Eigen::VectorXd y_mean;
    Eigen::VectorXd y_var;

    void validate() const;
    int count() const { return static_cast<int>(times.size()); }
};

// Least-squares fit of (a, b) from stacked 2x2 blocks:
// theta = (sum M_i^T M_i)^{-1} (sum M_i^T z_i).
std::pair<double, double> estimate_theta_full(const std::vector<Eigen::Matrix2d>& m_blocks,
                                              const std::vector<Eigen::Vector2d>& z_blocks);

// Blocks M_i = diag(y_i, x_i), z_i = (xdot_i, ydot_i) for the oscillator fit.
void regression_blocks(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& xdot, const Eigen::VectorXd& ydot,
                       std::vector<Eigen::Matrix2d>& m_blocks,
                       std::vector<Eigen::Vector2d>& z_blocks);

// Point-estimate damping a = sum(y_i xdot_i) / sum(y_i^2).
double estimate_a_deterministic(const Eigen::VectorXd& y, const Eigen::VectorXd& xdot);

// Uncertainty-penalized damping estimate
// a = sum(y_mean_i xdot_i) / sum(y_mean_i^2 + y_var_i); reduces to the
// deterministic estimate when all variances vanish.
double estimate_a_uncertain(const RegressionData& data);

// Monte Carlo view of the estimator: draw y_i ~ N(y_mean_i, y_var_i) per
// sample set and apply the deterministic formula per draw.  The sample mean
// of a converges to neither the deterministic-at-the-mean value nor the
// uncertainty-penalized one in general.
struct ADistribution {
    Eigen::VectorXd samples;
    StatSummary summary;
};

ADistribution sample_a_distribution(const RegressionData& data, std::size_t n_samples,
                                    std::uint64_t seed);

// ---------------------------------------------------------------------------
// Okubo-Weiss diagnostics.

// OW = s_n^2 + s_s^2 - omega^2 with normal strain s_n = u_x - v_y, shear
// strain s_s = v_x + u_y, and vorticity omega = v_x - u_y.  Grids are indexed
// (i, j) = (x index, y index).
struct OwField {
    int n = 0;
    double dx_space = 0.0;
    Eigen::MatrixXd ow, s_n, s_s, omega;
};

// Second-order central differences with periodic wrap.
OwField ow_field(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v, double dx_space);

// Entry point for fields whose derivatives are known in closed form.
OwField ow_from_derivatives(const Eigen::MatrixXd& ux, const Eigen::MatrixXd& uy,
                            const Eigen::MatrixXd& vx, const Eigen::MatrixXd& vy,
                            double dx_space = 1.0);

// Sample decomposition of E[OW]: the fluctuation correction
// E(u_x')^2 - 2E(u_x'v_y') + E(v_y')^2 + 4E(v_x'u_y') closes the gap between
// the mean OW map and the OW of the mean flow exactly in sample moments;
// max_residual reports the worst grid-cell violation.
struct OwDecomposition {
    Eigen::MatrixXd mean_ow;
    Eigen::MatrixXd ow_of_mean;
    double max_residual = 0.0;
};

OwDecomposition expected_ow(const std::vector<VelocityGrids>& samples);

// Posterior flow ensemble at one stored filter step: coefficients drawn from
// N(mu, R) respecting conjugate symmetry (free modes sampled through the real
// embedding of their covariance and pseudo-covariance, mirrors conjugated).
struct PosteriorFlowSamples {
    Eigen::MatrixXcd coefficients;  // row per sample, column per mode
    std::vector<VelocityGrids> flows;
    std::vector<Eigen::MatrixXd> ow;
    Eigen::MatrixXd ow_mean;      // per-cell sample mean of OW
    Eigen::MatrixXd ow_variance;  // per-cell population variance of OW

    // Fraction of samples with OW below the threshold, per cell.
    Eigen::MatrixXd eddy_probability(double threshold = 0.0) const;
};

PosteriorFlowSamples sample_posterior_flows(const FilterTrajectory& filter, int step,
                                            std::size_t n_samples, int grid_n,
                                            std::uint64_t seed);

}  // namespace uqkit

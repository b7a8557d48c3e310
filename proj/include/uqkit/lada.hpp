#pragma once

#include <optional>

#include "uqkit/info.hpp"
#include "uqkit/spectral_flow.hpp"

namespace uqkit {

// Gaussian over complex mode coefficients: mean vector plus Hermitian PSD
// covariance.
struct ComplexGaussian {
    Eigen::VectorXcd mean;
    Eigen::MatrixXcd cov;

    ComplexGaussian(Eigen::VectorXcd mean_in, Eigen::MatrixXcd cov_in);
    int dim() const { return static_cast<int>(mean.size()); }
};

// Per-mode independent equilibrium prior: mean f/(d - i*omega), variance
// sigma^2/(2d), block-diagonal.
ComplexGaussian equilibrium_prior(const FlowModelConfig& config);

// Tracer trajectories advected by a flow realization.  positions row s holds
// (x_1, y_1, ..., x_L, y_L) at time t_s, wrapped to (-pi, pi]^2.
struct TracerSet {
    TimeGrid grid;
    Eigen::MatrixXd positions;
    double sigma_x = 0.0;

    int n_tracers() const { return static_cast<int>(positions.cols()) / 2; }
};

// Euler-Maruyama advection dx = u(x, t) dt + sigma_x dW per tracer, with
// sigma_x taken from the flow config.  Default initial positions are uniform
// over the domain; each tracer consumes its own (seed, tracer) stream.
TracerSet simulate_tracers(const SpectralFlowSeries& flow, int n_tracers, std::uint64_t seed,
                           const std::optional<Eigen::MatrixXd>& x0 = std::nullopt);

// Observation operator rows for one time slice: for tracer l and mode k the
// two rows (2l, 2l+1) hold e^{i k.x_l} r_k.
Eigen::MatrixXcd build_projection(const FlowModelConfig& config,
                                  const Eigen::VectorXd& positions);

struct FilterOptions {
    // Store every stride-th step (plus the initial state); 1 keeps everything.
    int store_stride = 1;
    // Full PSD eigenvalue check every this many steps (always at the end).
    int psd_check_stride = 200;
};

// Posterior Gaussian over mode coefficients along the observation record.
// grid.dt is the storage spacing (filter dt times the stride).
struct FilterTrajectory {
    FlowModelConfig config;
    TimeGrid grid;
    int stride = 1;
    std::vector<Eigen::VectorXcd> mean;
    std::vector<Eigen::MatrixXcd> cov;

    int stored_points() const { return static_cast<int>(mean.size()); }
};

// Conditional-Gaussian filter for the mode coefficients given the tracer
// record: forward Euler on
//   d mu = (f - Gamma mu) dt + R P* (sigma_x^2 I)^{-1} (dx - P mu dt)
//   d R  = (-Gamma R - R Gamma* + Q - R P* (sigma_x^2 I)^{-1} P R) dt
// with Gamma = diag(d_k - i w_k), Q = diag(sigma_k^2), P rebuilt from tracer
// positions every step and dx the observed (unwrapped) tracer increment.
// R is re-Hermitized each step.
FilterTrajectory run_filter(const TracerSet& tracers, const FlowModelConfig& config,
                            const ComplexGaussian& init, const FilterOptions& options = {});

// Signal/dispersion split of the relative entropy between complex Gaussians,
// using conjugate transposes; the imaginary residue must vanish.
KlDecomposition complex_kl_decomposition(const Eigen::VectorXcd& mu, const Eigen::MatrixXcd& r,
                                         const Eigen::VectorXcd& mu_m,
                                         const Eigen::MatrixXcd& r_m);

// Time-averaged uncertainty reduction of the filter posterior relative to the
// equilibrium prior over the stationary window (second half of the record).
// signal uses the posterior mean; signal_limit plugs the true coefficients in
// place of the posterior mean and is the large-L limit of signal.
struct UncertaintyReduction {
    double signal = 0.0;
    double dispersion = 0.0;
    double signal_limit = 0.0;
};

UncertaintyReduction uncertainty_reduction(const FilterTrajectory& filter,
                                           const FlowModelConfig& config,
                                           const SpectralFlowSeries& truth);

// Velocity field rendered from the posterior-mean coefficients at one stored
// step.
VelocityGrids reconstruct_flow(const FilterTrajectory& filter, int step, int grid_n);

}  // namespace uqkit

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "uqkit/common.hpp"
#include "uqkit/prob_core.hpp"

namespace uqkit {

// Uniform time grid t_i = i*dt, i = 0..steps.
struct TimeGrid {
    double dt = 0.0;
    int steps = 0;

    // Empty sentinel state, replaced before use by containers built in stages.
    TimeGrid() = default;
    TimeGrid(double dt_in, int steps_in);
    int points() const { return steps + 1; }
    double t(int i) const { return i * dt; }
    double duration() const { return steps * dt; }
};

// Ensemble of trajectories on a shared grid.  member[i] is (points x dim).
struct Ensemble {
    TimeGrid grid;
    std::vector<Eigen::MatrixXd> members;

    int dim() const { return members.empty() ? 0 : static_cast<int>(members[0].cols()); }
    std::size_t size() const { return members.size(); }
};

// Per-time ensemble mean and population variance, both (points x dim).
struct EnsembleStats {
    Eigen::MatrixXd mean;
    Eigen::MatrixXd variance;
};

EnsembleStats ensemble_stats(const Ensemble& ensemble);

// ---------------------------------------------------------------------------
// Linear damped-forced scalar model dx/dt = -a x + f, a > 0.

double linear_analytic(double a, double f, double x0, double t);

// Every member follows the closed-form solution from its sampled initial
// condition, so there is no time-stepping error.
Ensemble simulate_linear_ensemble(double a, double f, const GaussianDist& init,
                                  const TimeGrid& grid, std::size_t n_member,
                                  std::uint64_t seed);

// ---------------------------------------------------------------------------
// Lorenz 63.

struct L63Params {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
};

// Classical RK4; dt around 0.005 keeps the attractor statistics clean.
Eigen::MatrixXd simulate_l63(const L63Params& params, const Eigen::Vector3d& x0,
                             const TimeGrid& grid);

Ensemble simulate_l63_ensemble(const L63Params& params, const GaussianDist& init,
                               const TimeGrid& grid, std::size_t n_member,
                               std::uint64_t seed);

// ---------------------------------------------------------------------------
// Scalar quadratic model dx/dt = b x^2, integrated per member with RK4.
// Useful for checking moment-closure identities on short horizons.

Ensemble simulate_quadratic_ensemble(double b, const GaussianDist& init,
                                     const TimeGrid& grid, std::size_t n_member,
                                     std::uint64_t seed);

// ---------------------------------------------------------------------------
// Complex Ornstein-Uhlenbeck mode du = ((-d + i*omega) u + f) dt + sigma dW,
// with complex white noise (independent real/imaginary increments of
// variance dt/2 each).

struct OuParams {
    double d = 1.0;       // damping, must be positive
    double omega = 0.0;   // rotation frequency
    std::complex<double> f{0.0, 0.0};  // constant forcing
    double sigma = 0.0;   // noise amplitude, non-negative

    std::complex<double> equilibrium_mean() const;
    double equilibrium_var() const { return sigma * sigma / (2.0 * d); }
    void validate() const;
};

// Euler-Maruyama path of the mode; returns points values starting at u0.
Eigen::VectorXcd simulate_ou(const OuParams& params, std::complex<double> u0,
                             const TimeGrid& grid, std::uint64_t seed);
// Stream-driven variant for callers that manage stream assignment.
Eigen::VectorXcd simulate_ou(const OuParams& params, std::complex<double> u0,
                             const TimeGrid& grid, RngStream& rng);

// ---------------------------------------------------------------------------
// Scalar cubic model with correlated additive-multiplicative noise:
// dx = (f + a x + b x^2 - c x^3) dt + (A - B x) dW_M + sigma dW_A.

struct CubicParams {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double f = 0.0;
    double big_a = 0.0;  // multiplicative noise offset
    double big_b = 0.0;  // multiplicative noise slope
    double sigma = 0.0;  // additive noise amplitude
};

// Euler-Maruyama path; throws BlowUpError if the state leaves +-1e6.
Eigen::VectorXd simulate_cubic(const CubicParams& params, double x0,
                               const TimeGrid& grid, std::uint64_t seed);

}  // namespace uqkit

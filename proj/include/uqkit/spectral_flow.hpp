#pragma once

#include <Eigen/Dense>
#include <vector>

#include "uqkit/dynamics.hpp"

namespace uqkit {

// One Fourier velocity mode u_hat_k(t) e^{i k.x} r_k on the periodic box
// (-pi, pi]^2.  The eigenvector r is the unit divergence-free direction
// (-k2, k1)/|k|, assigned per conjugate pair: both k and -k carry the vector
// computed from the pair's canonical representative, so the reality condition
// u_hat_{-k} = conj(u_hat_k) produces a real velocity field.
struct FlowMode {
    Eigen::Vector2i k;
    OuParams params;
    Eigen::Vector2d r;
};

struct FlowModelConfig {
    std::vector<FlowMode> modes;
    double sigma_x = 0.0;  // tracer observation noise amplitude

    // Derived structure, filled by finalize().
    std::vector<int> conj_index;  // index of the mode with wavenumber -k
    std::vector<int> free_modes;  // canonical representative of each pair

    // Validates closure under k -> -k, the parameter reality condition, and
    // the eigenvector convention; builds the index tables.
    void finalize();

    int n_modes() const { return static_cast<int>(modes.size()); }

    // All integer wavenumbers in [-kmax, kmax]^2 except the origin, with
    // identical OU parameters on every mode (frequencies negated on the
    // mirrored half so conjugate pairs are dynamically consistent).
    static FlowModelConfig square_lattice(int kmax, double d, double omega, double sigma,
                                          double sigma_x,
                                          std::complex<double> f = {0.0, 0.0});
};

// Mode coefficients over time; row s holds u_hat(t_s) for all modes.
struct SpectralFlowSeries {
    FlowModelConfig config;
    TimeGrid grid;
    Eigen::MatrixXcd coeffs;
};

// Independent OU paths for the free representatives, conjugate-mirrored onto
// the rest; each pair gets its own random stream so results do not depend on
// scheduling.  Paths start from the equilibrium mean.
SpectralFlowSeries simulate_flow(const FlowModelConfig& config, const TimeGrid& grid,
                                 std::uint64_t seed);

// Max deviation from u_hat_{-k} = conj(u_hat_k) over a coefficient vector.
double conjugate_symmetry_error(const FlowModelConfig& config,
                                const Eigen::VectorXcd& coeffs);

// Physical velocity at one point from a coefficient vector.  Throws
// SymmetryError if the imaginary residue exceeds 1e-8 before discarding it.
Eigen::Vector2d eval_velocity(const FlowModelConfig& config, const Eigen::VectorXcd& coeffs,
                              const Eigen::Vector2d& position);

// Velocity at several positions for one stored time step.
Eigen::MatrixXd eval_velocity(const SpectralFlowSeries& series, int step,
                              const Eigen::MatrixXd& positions);

// Velocity components tabulated on the uniform n x n grid
// x_i = -pi + i * 2pi/n; entry (i, j) is the value at (x_i, x_j).
struct VelocityGrids {
    Eigen::MatrixXd u, v;
    double dx = 0.0;
};

VelocityGrids velocity_on_grid(const FlowModelConfig& config, const Eigen::VectorXcd& coeffs,
                               int n);

// Exact spectral derivatives of the velocity on the same grid layout.
struct VelocityGradientGrids {
    Eigen::MatrixXd ux, uy, vx, vy;
    double dx = 0.0;
};

VelocityGradientGrids velocity_gradients_on_grid(const FlowModelConfig& config,
                                                 const Eigen::VectorXcd& coeffs, int n);

}  // namespace uqkit

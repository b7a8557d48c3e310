#pragma once

#include <Eigen/Dense>
#include <span>

#include "uqkit/prob_core.hpp"

namespace uqkit {

// Linear observation v = G u + noise, noise ~ N(0, Ro) with Ro positive
// definite.
struct LinearObsModel {
    Eigen::MatrixXd g;
    Eigen::MatrixXd ro;

    LinearObsModel(Eigen::MatrixXd g_in, Eigen::MatrixXd ro_in);
    int obs_dim() const { return static_cast<int>(g.rows()); }
    int state_dim() const { return static_cast<int>(g.cols()); }
};

struct PosteriorResult {
    GaussianDist posterior;
    Eigen::MatrixXd gain;
};

// Gaussian conjugate update.  The innovation covariance G Rf G^T + Ro is
// factorized (never explicitly inverted); with joseph = true the posterior
// covariance uses the Joseph stabilized form.
PosteriorResult gaussian_posterior(const GaussianDist& prior, const LinearObsModel& obs,
                                   const Eigen::VectorXd& v, bool joseph = false);

// Scalar prior N(mu_f, 1) observed L times with unit observation noise.
struct RepeatedObsResult {
    double mu_a = 0.0;
    double r_a = 0.0;
};

RepeatedObsResult repeated_obs_posterior(double mu_f, std::span<const double> v);

// Dispersion part of the relative entropy between the L-observation posterior
// and the N(mu_f, 1) prior: 0.5 * (-L/(L+1) + ln(L+1)).
double dispersion_asymptote(std::size_t l);

// Max-norm residual of the Woodbury identity
//   (A + B C D)^{-1} = A^{-1} - A^{-1} B (C^{-1} + D A^{-1} B)^{-1} D A^{-1}
// evaluated with dense inverses; ok iff residual < tol.
struct WoodburyCheck {
    bool ok = false;
    double residual = 0.0;
};

WoodburyCheck woodbury_identity_check(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                      const Eigen::MatrixXd& c, const Eigen::MatrixXd& d,
                                      double tol);

// Max-norm residual of the companion identity
//   (I - (A + E)^{-1} A) E^{-1} = (A + E)^{-1}.
double complement_identity_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& e);

}  // namespace uqkit

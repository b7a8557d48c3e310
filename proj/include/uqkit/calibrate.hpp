#pragma once

#include <span>

#include "uqkit/dynamics.hpp"
#include "uqkit/prob_core.hpp"

namespace uqkit {

// Time-average autocorrelation; acf[0] is exactly 1.
Eigen::VectorXd acf(std::span<const double> series, int max_lag);

// Integral of the ACF up to its first drop below the threshold, with the tail
// completed under an exponential-decay assumption (exact for OU processes).
// decayed is false when the ACF never drops below the threshold within the
// supplied lags; the raw truncated integral is returned in that case.
struct DecorrelationTime {
    double tau = 0.0;
    bool decayed = false;
    int truncation_lag = 0;
};

DecorrelationTime decorrelation_time(const Eigen::VectorXd& acf_values, double dt,
                                     double threshold = 0.05);

// Moment-matched OU surrogate dx = -a(x - f/a) dt + sigma dW of a stationary
// series: a = 1/tau, f = mu a, sigma = sqrt(2 a r).
struct CalibrationResult {
    double a = 0.0;
    double f = 0.0;
    double sigma = 0.0;
    double mu = 0.0;   // equilibrium mean of the series
    double r = 0.0;    // equilibrium variance of the series
    double tau = 0.0;  // decorrelation time
    bool acf_decayed = true;
};

// max_lag < 0 picks the first ACF threshold crossing automatically, capped at
// a tenth of the series length.
CalibrationResult calibrate_ou(std::span<const double> series, double dt, int max_lag = -1);

// Assemble a result from externally estimated statistics.
CalibrationResult stats_to_ou(double mu, double r, double tau);

// Real scalar OU path by Euler-Maruyama, x(0) = x0.
Eigen::VectorXd simulate_ou_real(double a, double f, double sigma, double x0,
                                 const TimeGrid& grid, std::uint64_t seed);

// Side-by-side check of a calibrated surrogate against the training series:
// moment errors, worst ACF gap over [0, 3 tau], and the relative entropy of
// the truth density from the surrogate density (both kernel estimates on a
// shared clipped grid).  mean_err is scaled by max(|mean|, std) of the truth
// so near-zero means stay meaningful; var_err is relative.
struct SurrogateReport {
    double mean_err = 0.0;
    double var_err = 0.0;
    double acf_linf = 0.0;
    double kl = 0.0;
    double tau = 0.0;
    CalibrationResult params;
    GridPdf truth_pdf, surrogate_pdf;  // the clipped kernel estimates behind kl
};

SurrogateReport validate_surrogate(std::span<const double> truth,
                                   const CalibrationResult& result, double dt,
                                   std::uint64_t seed);

}  // namespace uqkit

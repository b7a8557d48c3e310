#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "uqkit/bayes.hpp"
#include "uqkit/calibrate.hpp"
#include "uqkit/diagnostics.hpp"
#include "uqkit/dynamics.hpp"
#include "uqkit/info.hpp"
#include "uqkit/lada.hpp"
#include "uqkit/prob_core.hpp"
#include "uqkit/spectral_flow.hpp"

// Desk-scale experiment drivers shared by the command-line tool and the
// acceptance suite.  Each command has a config struct with the reference
// defaults, a pure run function, and a writer that emits plot-ready CSVs and
// returns the file names it produced.

namespace uqkit {

// ---------------------------------------------------------------------------
// entropy-gallery: a Gamma density and the Gaussian matching its peak height
// have visibly different entropies.

struct EntropyGalleryConfig {
    double shape = 2.0;
    double scale = 1.5;
    int plot_n = 701;  // points of the plotting grid
};

struct EntropyGalleryResult {
    double shape = 0.0, scale = 0.0;
    double gauss_mean = 0.0, gauss_var = 0.0;
    Eigen::VectorXd plot_x, gamma_pdf, gauss_pdf;
    double gamma_entropy_grid = 0.0, gamma_entropy_closed = 0.0;
    double gauss_entropy_grid = 0.0, gauss_entropy_closed = 0.0;
};

EntropyGalleryResult run_entropy_gallery(const EntropyGalleryConfig& config);
std::vector<std::string> write_entropy_gallery(const EntropyGalleryResult& result,
                                               const std::string& out_dir);

// ---------------------------------------------------------------------------
// linear-ensemble: ensemble statistics of the damped-forced linear model
// against the closed-form mean and variance.

struct LinearEnsembleConfig {
    double a = 1.0;
    double f = 2.0;
    double mean0 = 4.0;
    double var0 = 1.0;
    double dt = 0.01;
    int steps = 500;
    int n_member = 2000;
};

struct LinearEnsembleResult {
    TimeGrid grid{1.0, 1};
    int n_member = 0;
    Eigen::VectorXd mean, variance;            // ensemble
    Eigen::VectorXd analytic_mean, analytic_variance;
};

LinearEnsembleResult run_linear_ensemble(const LinearEnsembleConfig& config,
                                         std::uint64_t seed);
std::vector<std::string> write_linear_ensemble(const LinearEnsembleResult& result,
                                               const std::string& out_dir);

// ---------------------------------------------------------------------------
// l63-ensemble: chaotic spread of a Lorenz-63 ensemble around the
// deterministic trajectory started from the ensemble-mean initial state.

struct L63EnsembleConfig {
    double dt = 0.005;
    int steps = 4000;        // T = 20
    int n_member = 100;
    double init_std = 1.0;
    int spinup_steps = 6000; // settle onto the attractor first
};

struct L63EnsembleResult {
    TimeGrid grid{1.0, 1};
    Eigen::MatrixXd mean, variance;   // points x 3
    Eigen::MatrixXd deterministic;    // points x 3
    Eigen::VectorXd z_min, z_max;
};

L63EnsembleResult run_l63_ensemble(const L63EnsembleConfig& config, std::uint64_t seed);
std::vector<std::string> write_l63_ensemble(const L63EnsembleResult& result,
                                            const std::string& out_dir);

// ---------------------------------------------------------------------------
// bayes-scan: repeated scalar observations of a truth drawn from the prior;
// posterior spread, signal, and dispersion as functions of the count L.

struct BayesScanConfig {
    std::vector<int> l_values{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000};
    int n_replicates = 100;
};

struct BayesScanResult {
    std::vector<int> l_values;
    int n_replicates = 0;
    // Indexed [l_index][replicate].
    std::vector<std::vector<double>> mu_a, r_a, signal, dispersion;
    std::vector<double> truth;              // per replicate
    std::vector<double> rmse;               // per l_index, over replicates
};

BayesScanResult run_bayes_scan(const BayesScanConfig& config, std::uint64_t seed);
std::vector<std::string> write_bayes_scan(const BayesScanResult& result,
                                          const std::string& out_dir);

// ---------------------------------------------------------------------------
// lada-scan: tracer-count scaling of the Lagrangian assimilation filter on
// the 24-mode reference flow.  Tracer sets are nested so larger L strictly
// adds information.

struct LadaScanConfig {
    int kmax = 2;
    double d = 0.5;
    double omega = 0.0;
    double sigma = 0.5;
    double sigma_x = 0.1;
    double dt = 1e-3;
    int steps = 20000;       // T = 20
    int store_stride = 10;
    std::vector<int> l_values{2, 5, 10, 20, 50};
};

struct LadaScanResult {
    std::vector<int> l_values;
    std::vector<double> signal, dispersion, signal_limit, rmse_mode11;
    // Mode-(1,1) recovery record for the largest tracer count.
    Eigen::VectorXd recovery_time;
    Eigen::VectorXcd recovery_truth, recovery_mean;
    Eigen::VectorXd recovery_var;
};

LadaScanResult run_lada_scan(const LadaScanConfig& config, std::uint64_t seed);
std::vector<std::string> write_lada_scan(const LadaScanResult& result,
                                         const std::string& out_dir);

// ---------------------------------------------------------------------------
// param-estimate: the damping-estimate table under latent-factor uncertainty
// and the two-point sampled-estimator distribution.

struct ParamEstimateConfig {
    std::vector<double> r_values{0.5, 1.0, 2.0};
    int n_points = 1000;       // dense-orbit sample count over one period
    int n_samples = 10000;     // draws of the two-point estimator
};

struct ParamEstimateResult {
    std::vector<double> r_values, a_estimate, a_closed_form;
    ADistribution two_point;
    double two_point_penalized = 0.0;  // uncertainty-penalized value, 7/30
};

ParamEstimateResult run_param_estimate(const ParamEstimateConfig& config,
                                       std::uint64_t seed);
std::vector<std::string> write_param_estimate(const ParamEstimateResult& result,
                                              const std::string& out_dir);

// ---------------------------------------------------------------------------
// eddy-ow: Okubo-Weiss maps under the sampled assimilation posterior for two
// tracer counts, against the true flow's map.

struct EddyOwConfig {
    int kmax = 2;
    double d = 0.5;
    double omega = 0.0;
    double sigma = 0.5;
    double sigma_x = 0.1;
    double dt = 1e-3;
    int steps = 5000;        // T = 5
    int store_stride = 10;
    std::vector<int> l_values{1, 5};
    int n_samples = 500;
    int grid_n = 32;
};

struct EddyOwCase {
    int l = 0;
    Eigen::MatrixXd ow_mean, ow_variance, eddy_prob;
    double mean_cell_variance = 0.0;
    double decomposition_residual = 0.0;
};

struct EddyOwResult {
    int grid_n = 0;
    double dx = 0.0;
    Eigen::MatrixXd ow_truth;
    std::vector<EddyOwCase> cases;
};

EddyOwResult run_eddy_ow(const EddyOwConfig& config, std::uint64_t seed);
std::vector<std::string> write_eddy_ow(const EddyOwResult& result,
                                       const std::string& out_dir);

// ---------------------------------------------------------------------------
// calibrate-regimes: parameter recovery for a true OU series, then surrogate
// fits of the four reference regimes of the cubic climate model.

struct CalibrateRegimesConfig {
    double ou_a = 1.0;
    double ou_f = 2.0;
    double ou_sigma = 1.4142135623730951;  // sqrt(2)
    double ou_duration = 5000.0;
    double regime_duration = 5000.0;
    double dt = 0.005;
    double burn_fraction = 0.1;
};

struct RegimeFit {
    std::string name;
    SurrogateReport report;
    int truth_modes = 0;      // local maxima of the truth KDE
    int surrogate_modes = 0;  // local maxima of the surrogate KDE
};

struct CalibrateRegimesResult {
    CalibrationResult ou_fit;
    double ou_a_err = 0.0, ou_f_err = 0.0, ou_sigma_err = 0.0;  // relative
    std::vector<RegimeFit> regimes;
};

CalibrateRegimesResult run_calibrate_regimes(const CalibrateRegimesConfig& config,
                                             std::uint64_t seed);
std::vector<std::string> write_calibrate_regimes(const CalibrateRegimesResult& result,
                                                 const std::string& out_dir);

// The four reference regimes of the cubic model, in table order.
std::vector<std::pair<std::string, CubicParams>> reference_regimes();

// Count strict local maxima of a density estimate, ignoring low-level noise
// below floor_fraction of the peak.
int count_modes(const GridPdf& pdf, double floor_fraction = 0.01);

// ---------------------------------------------------------------------------
// Dispatcher used by the command-line tool: validates the parameter object,
// runs the command, writes artifacts plus a manifest, and returns the
// manifest.  Unknown commands or parameters throw ConfigError.

nlohmann::json run_and_write(const std::string& command, const nlohmann::json& params,
                             std::uint64_t seed, const std::string& out_dir);

const std::vector<std::string>& command_names();

// Default parameter object of a command (the config struct serialized).
nlohmann::json default_params(const std::string& command);

}  // namespace uqkit

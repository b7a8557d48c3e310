#include "uqkit/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "uqkit/io.hpp"

namespace uqkit {

namespace fs = std::filesystem;

namespace {

std::string artifact_path(const std::string& out_dir, const std::string& name) {
    return (fs::path(out_dir) / name).string();
}

std::string fmt_int(long long v) { return std::to_string(v); }

}  // namespace

// ---------------------------------------------------------------------------

EntropyGalleryResult run_entropy_gallery(const EntropyGalleryConfig& config) {
    if (config.shape <= 1.0)
        throw ConfigError("gallery needs shape > 1 so the Gamma density has an interior peak");
    if (config.plot_n < 2) throw ConfigError("plot grid needs at least 2 points");

    const GammaDist gamma(config.shape, config.scale);
    const double mode = (config.shape - 1.0) * config.scale;
    const double peak = gamma.pdf(mode);
    // Gaussian with the same peak height, centered on the Gamma mode.
    const double var = 1.0 / (2.0 * pi * peak * peak);
    const GaussianDist gauss(mode, var);

    EntropyGalleryResult out;
    out.shape = config.shape;
    out.scale = config.scale;
    out.gauss_mean = mode;
    out.gauss_var = var;

    const double sg = std::sqrt(var);
    const double sgam = std::sqrt(gamma.variance());
    const double lo = std::min(0.0, mode - 4.0 * sg);
    const double hi = std::max(gamma.mean() + 8.0 * sgam, mode + 4.0 * sg);
    out.plot_x.resize(config.plot_n);
    out.gamma_pdf.resize(config.plot_n);
    out.gauss_pdf.resize(config.plot_n);
    const double h = (hi - lo) / (config.plot_n - 1);
    for (int i = 0; i < config.plot_n; ++i) {
        const double x = lo + i * h;
        out.plot_x[i] = x;
        out.gamma_pdf[i] = gamma.pdf(x);
        out.gauss_pdf[i] = gauss.pdf1d(x);
    }

    const int n = 8001;
    const double ghi = gamma.mean() + 12.0 * sgam;
    out.gamma_entropy_grid = shannon_entropy_grid(tabulate(gamma, 0.0, ghi / (n - 1), n));
    out.gamma_entropy_closed = shannon_entropy(gamma);
    out.gauss_entropy_grid =
        shannon_entropy_grid(tabulate(gauss, mode - 12.0 * sg, 24.0 * sg / (n - 1), n));
    out.gauss_entropy_closed = shannon_entropy(gauss);
    return out;
}

std::vector<std::string> write_entropy_gallery(const EntropyGalleryResult& result,
                                               const std::string& out_dir) {
    CsvWriter density({"x", "gamma_pdf", "gaussian_pdf"});
    for (Eigen::Index i = 0; i < result.plot_x.size(); ++i)
        density.row(std::vector<double>{result.plot_x[i], result.gamma_pdf[i],
                                        result.gauss_pdf[i]});
    density.write(artifact_path(out_dir, "entropy_gallery_density.csv"));

    CsvWriter summary({"case", "entropy_grid", "entropy_closed_form"});
    summary.row({"gamma", format_double(result.gamma_entropy_grid),
                 format_double(result.gamma_entropy_closed)});
    summary.row({"gaussian", format_double(result.gauss_entropy_grid),
                 format_double(result.gauss_entropy_closed)});
    summary.write(artifact_path(out_dir, "entropy_gallery_summary.csv"));
    return {"entropy_gallery_density.csv", "entropy_gallery_summary.csv"};
}

// ---------------------------------------------------------------------------

LinearEnsembleResult run_linear_ensemble(const LinearEnsembleConfig& config,
                                         std::uint64_t seed) {
    const TimeGrid grid(config.dt, config.steps);
    const GaussianDist init(config.mean0, config.var0);
    const Ensemble ens = simulate_linear_ensemble(config.a, config.f, init, grid,
                                                  static_cast<std::size_t>(config.n_member),
                                                  seed);
    const EnsembleStats stats = ensemble_stats(ens);

    LinearEnsembleResult out;
    out.grid = grid;
    out.n_member = config.n_member;
    out.mean = stats.mean.col(0);
    out.variance = stats.variance.col(0);
    out.analytic_mean.resize(grid.points());
    out.analytic_variance.resize(grid.points());
    for (int i = 0; i < grid.points(); ++i) {
        const double t = grid.t(i);
        out.analytic_mean[i] = linear_analytic(config.a, config.f, config.mean0, t);
        out.analytic_variance[i] = config.var0 * std::exp(-2.0 * config.a * t);
    }
    return out;
}

std::vector<std::string> write_linear_ensemble(const LinearEnsembleResult& result,
                                               const std::string& out_dir) {
    CsvWriter csv({"time", "mean", "variance", "stderr", "analytic_mean",
                   "analytic_variance"});
    for (int i = 0; i < result.grid.points(); ++i) {
        const double se = std::sqrt(result.variance[i] / result.n_member);
        csv.row(std::vector<double>{result.grid.t(i), result.mean[i], result.variance[i], se,
                                    result.analytic_mean[i], result.analytic_variance[i]});
    }
    csv.write(artifact_path(out_dir, "linear_ensemble.csv"));
    return {"linear_ensemble.csv"};
}

// ---------------------------------------------------------------------------

L63EnsembleResult run_l63_ensemble(const L63EnsembleConfig& config, std::uint64_t seed) {
    if (config.init_std <= 0.0) throw ConfigError("initial spread must be positive");
    const L63Params params;

    // Settle onto the attractor before placing the ensemble.
    const TimeGrid spinup(config.dt, config.spinup_steps);
    const Eigen::MatrixXd warm = simulate_l63(params, Eigen::Vector3d(1.0, 1.0, 1.0), spinup);
    const Eigen::Vector3d center = warm.row(warm.rows() - 1).transpose();

    const TimeGrid grid(config.dt, config.steps);
    const GaussianDist init(center, config.init_std * config.init_std *
                                        Eigen::Matrix3d::Identity());
    const Ensemble ens = simulate_l63_ensemble(params, init, grid,
                                               static_cast<std::size_t>(config.n_member), seed);
    const EnsembleStats stats = ensemble_stats(ens);

    L63EnsembleResult out;
    out.grid = grid;
    out.mean = stats.mean;
    out.variance = stats.variance;
    out.deterministic = simulate_l63(params, center, grid);
    out.z_min.resize(grid.points());
    out.z_max.resize(grid.points());
    for (int i = 0; i < grid.points(); ++i) {
        double lo = ens.members[0](i, 2);
        double hi = lo;
        for (const auto& m : ens.members) {
            lo = std::min(lo, m(i, 2));
            hi = std::max(hi, m(i, 2));
        }
        out.z_min[i] = lo;
        out.z_max[i] = hi;
    }
    return out;
}

std::vector<std::string> write_l63_ensemble(const L63EnsembleResult& result,
                                            const std::string& out_dir) {
    CsvWriter csv({"time", "mean_x", "mean_y", "mean_z", "var_x", "var_y", "var_z", "det_x",
                   "det_y", "det_z", "z_min", "z_max"});
    for (int i = 0; i < result.grid.points(); ++i) {
        csv.row(std::vector<double>{result.grid.t(i), result.mean(i, 0), result.mean(i, 1),
                                    result.mean(i, 2), result.variance(i, 0),
                                    result.variance(i, 1), result.variance(i, 2),
                                    result.deterministic(i, 0), result.deterministic(i, 1),
                                    result.deterministic(i, 2), result.z_min[i],
                                    result.z_max[i]});
    }
    csv.write(artifact_path(out_dir, "l63_ensemble.csv"));
    return {"l63_ensemble.csv"};
}

// ---------------------------------------------------------------------------

BayesScanResult run_bayes_scan(const BayesScanConfig& config, std::uint64_t seed) {
    if (config.l_values.empty()) throw ConfigError("need at least one observation count");
    if (config.n_replicates < 2) throw ConfigError("need at least 2 replicates");

    BayesScanResult out;
    out.l_values = config.l_values;
    std::sort(out.l_values.begin(), out.l_values.end());
    out.l_values.erase(std::unique(out.l_values.begin(), out.l_values.end()),
                       out.l_values.end());
    if (out.l_values.front() < 0) throw ConfigError("observation counts must be nonnegative");

    const int n_l = static_cast<int>(out.l_values.size());
    const int max_l = out.l_values.back();
    const int n_rep = config.n_replicates;
    out.n_replicates = n_rep;
    out.truth.resize(static_cast<std::size_t>(n_rep));
    const auto alloc = [&] {
        return std::vector<std::vector<double>>(
            static_cast<std::size_t>(n_l), std::vector<double>(static_cast<std::size_t>(n_rep)));
    };
    out.mu_a = alloc();
    out.r_a = alloc();
    out.signal = alloc();
    out.dispersion = alloc();

    const GaussianDist prior(0.0, 1.0);
    parallel_for(static_cast<std::size_t>(n_rep), [&](std::size_t t) {
        RngStream rng(seed, t);
        const double truth = rng.normal();
        out.truth[t] = truth;
        std::vector<double> obs(static_cast<std::size_t>(max_l));
        for (auto& v : obs) v = truth + rng.normal();

        for (int li = 0; li < n_l; ++li) {
            const auto l = static_cast<std::size_t>(out.l_values[static_cast<std::size_t>(li)]);
            const RepeatedObsResult post =
                repeated_obs_posterior(0.0, std::span<const double>(obs.data(), l));
            const KlDecomposition kl =
                relative_entropy(GaussianDist(post.mu_a, post.r_a), prior);
            out.mu_a[static_cast<std::size_t>(li)][t] = post.mu_a;
            out.r_a[static_cast<std::size_t>(li)][t] = post.r_a;
            out.signal[static_cast<std::size_t>(li)][t] = kl.signal;
            out.dispersion[static_cast<std::size_t>(li)][t] = kl.dispersion;
        }
    });

    out.rmse.resize(static_cast<std::size_t>(n_l));
    for (int li = 0; li < n_l; ++li) {
        double acc = 0.0;
        for (int t = 0; t < n_rep; ++t) {
            const double e = out.mu_a[static_cast<std::size_t>(li)][static_cast<std::size_t>(t)] -
                             out.truth[static_cast<std::size_t>(t)];
            acc += e * e;
        }
        out.rmse[static_cast<std::size_t>(li)] = std::sqrt(acc / n_rep);
    }
    return out;
}

std::vector<std::string> write_bayes_scan(const BayesScanResult& result,
                                          const std::string& out_dir) {
    CsvWriter csv({"L", "replicate", "mu_a", "R_a", "signal", "dispersion"});
    for (std::size_t li = 0; li < result.l_values.size(); ++li) {
        for (int t = 0; t < result.n_replicates; ++t) {
            const auto ts = static_cast<std::size_t>(t);
            csv.row({fmt_int(result.l_values[li]), fmt_int(t),
                     format_double(result.mu_a[li][ts]), format_double(result.r_a[li][ts]),
                     format_double(result.signal[li][ts]),
                     format_double(result.dispersion[li][ts])});
        }
    }
    csv.write(artifact_path(out_dir, "bayes_scan.csv"));

    CsvWriter rmse({"L", "rmse", "expected"});
    for (std::size_t li = 0; li < result.l_values.size(); ++li)
        rmse.row({fmt_int(result.l_values[li]), format_double(result.rmse[li]),
                  format_double(1.0 / std::sqrt(result.l_values[li] + 1.0))});
    rmse.write(artifact_path(out_dir, "bayes_scan_rmse.csv"));
    return {"bayes_scan.csv", "bayes_scan_rmse.csv"};
}

// ---------------------------------------------------------------------------

namespace {

int mode_index(const FlowModelConfig& config, int k1, int k2) {
    for (int i = 0; i < config.n_modes(); ++i) {
        const Eigen::Vector2i& k = config.modes[static_cast<std::size_t>(i)].k;
        if (k.x() == k1 && k.y() == k2) return i;
    }
    throw ConfigError("flow lattice does not contain the requested mode");
}

TracerSet tracer_subset(const TracerSet& all, int l) {
    TracerSet sub{all.grid, all.positions.leftCols(2 * l), all.sigma_x};
    return sub;
}

}  // namespace

LadaScanResult run_lada_scan(const LadaScanConfig& config, std::uint64_t seed) {
    if (config.l_values.empty()) throw ConfigError("need at least one tracer count");
    for (int l : config.l_values)
        if (l < 1) throw ConfigError("tracer counts must be positive");

    FlowModelConfig flow_cfg = FlowModelConfig::square_lattice(
        config.kmax, config.d, config.omega, config.sigma, config.sigma_x);
    const TimeGrid grid(config.dt, config.steps);
    const SpectralFlowSeries flow = simulate_flow(flow_cfg, grid, seed);
    const int max_l = *std::max_element(config.l_values.begin(), config.l_values.end());
    // Separate seed so tracer noise shares no stream with the mode noise.
    const TracerSet tracers = simulate_tracers(flow, max_l, seed + 1);
    const ComplexGaussian prior = equilibrium_prior(flow_cfg);
    const int idx11 = mode_index(flow_cfg, 1, 1);

    FilterOptions options;
    options.store_stride = config.store_stride;

    LadaScanResult out;
    out.l_values = config.l_values;
    std::sort(out.l_values.begin(), out.l_values.end());
    out.l_values.erase(std::unique(out.l_values.begin(), out.l_values.end()),
                       out.l_values.end());

    for (int l : out.l_values) {
        const FilterTrajectory filt =
            run_filter(tracer_subset(tracers, l), flow_cfg, prior, options);
        const UncertaintyReduction ur = uncertainty_reduction(filt, flow_cfg, flow);
        out.signal.push_back(ur.signal);
        out.dispersion.push_back(ur.dispersion);
        out.signal_limit.push_back(ur.signal_limit);

        const int stored = filt.stored_points();
        const int start = stored / 2;
        double acc = 0.0;
        for (int s = start; s < stored; ++s) {
            const std::complex<double> err =
                filt.mean[static_cast<std::size_t>(s)][idx11] -
                flow.coeffs(s * filt.stride, idx11);
            acc += std::norm(err);
        }
        out.rmse_mode11.push_back(std::sqrt(acc / (stored - start)));

        if (l == out.l_values.back()) {
            out.recovery_time.resize(stored);
            out.recovery_truth.resize(stored);
            out.recovery_mean.resize(stored);
            out.recovery_var.resize(stored);
            for (int s = 0; s < stored; ++s) {
                out.recovery_time[s] = filt.grid.t(s);
                out.recovery_truth[s] = flow.coeffs(s * filt.stride, idx11);
                out.recovery_mean[s] = filt.mean[static_cast<std::size_t>(s)][idx11];
                out.recovery_var[s] =
                    filt.cov[static_cast<std::size_t>(s)](idx11, idx11).real();
            }
        }
    }
    return out;
}

std::vector<std::string> write_lada_scan(const LadaScanResult& result,
                                         const std::string& out_dir) {
    CsvWriter scan({"L", "signal", "dispersion", "signal_limit", "rmse_mode11"});
    for (std::size_t i = 0; i < result.l_values.size(); ++i)
        scan.row({fmt_int(result.l_values[i]), format_double(result.signal[i]),
                  format_double(result.dispersion[i]), format_double(result.signal_limit[i]),
                  format_double(result.rmse_mode11[i])});
    scan.write(artifact_path(out_dir, "lada_scan.csv"));

    CsvWriter rec({"time", "truth_re", "truth_im", "mean_re", "mean_im", "variance"});
    for (Eigen::Index s = 0; s < result.recovery_time.size(); ++s)
        rec.row(std::vector<double>{result.recovery_time[s], result.recovery_truth[s].real(),
                                    result.recovery_truth[s].imag(),
                                    result.recovery_mean[s].real(),
                                    result.recovery_mean[s].imag(), result.recovery_var[s]});
    rec.write(artifact_path(out_dir, "lada_recovery.csv"));
    return {"lada_scan.csv", "lada_recovery.csv"};
}

// ---------------------------------------------------------------------------

ParamEstimateResult run_param_estimate(const ParamEstimateConfig& config,
                                       std::uint64_t seed) {
    if (config.n_points < 4) throw ConfigError("need at least 4 orbit points");
    if (config.n_samples < 100) throw ConfigError("need at least 100 estimator draws");

    ParamEstimateResult out;
    out.r_values = config.r_values;

    // Dense unit-amplitude orbit y = cos t of the a=2, b=-2 oscillator over
    // one full period, so the time average of y^2 is exactly one half.
    const int n = config.n_points;
    RegressionData data;
    data.times.resize(n);
    data.xdot.resize(n);
    data.y_mean.resize(n);
    data.y_var.resize(n);
    for (int i = 0; i < n; ++i) {
        const double t = two_pi * i / n;
        data.times[i] = t;
        data.y_mean[i] = std::cos(t);
        data.xdot[i] = 2.0 * std::cos(t);
    }
    for (double r : out.r_values) {
        if (r < 0.0) throw ConfigError("latent variance must be nonnegative");
        data.y_var.setConstant(r);
        out.a_estimate.push_back(estimate_a_uncertain(data));
        out.a_closed_form.push_back(2.0 * 0.5 / (0.5 + r));
    }

    // Two-observation setup whose sampled estimator has fat tails.
    RegressionData two;
    two.times = Eigen::Vector2d(0.0, 1.0);
    two.xdot = Eigen::Vector2d(1.0, 2.0);
    two.y_mean = Eigen::Vector2d(1.0, 3.0);
    two.y_var = Eigen::Vector2d(10.0, 10.0);
    out.two_point = sample_a_distribution(two, static_cast<std::size_t>(config.n_samples), seed);
    out.two_point_penalized = estimate_a_uncertain(two);
    return out;
}

std::vector<std::string> write_param_estimate(const ParamEstimateResult& result,
                                              const std::string& out_dir) {
    CsvWriter table({"r", "a_estimate", "a_closed_form"});
    for (std::size_t i = 0; i < result.r_values.size(); ++i)
        table.row(std::vector<double>{result.r_values[i], result.a_estimate[i],
                                      result.a_closed_form[i]});
    table.write(artifact_path(out_dir, "param_table.csv"));

    CsvWriter samples({"sample", "a"});
    for (Eigen::Index i = 0; i < result.two_point.samples.size(); ++i)
        samples.row({fmt_int(i), format_double(result.two_point.samples[i])});
    samples.write(artifact_path(out_dir, "param_samples.csv"));

    const StatSummary& s = result.two_point.summary;
    CsvWriter summary({"mean", "variance", "skewness", "excess_kurtosis", "penalized_a"});
    summary.row(std::vector<double>{s.mean, s.variance, s.skewness, s.kurtosis - 3.0,
                                    result.two_point_penalized});
    summary.write(artifact_path(out_dir, "param_summary.csv"));
    return {"param_table.csv", "param_samples.csv", "param_summary.csv"};
}

// ---------------------------------------------------------------------------

EddyOwResult run_eddy_ow(const EddyOwConfig& config, std::uint64_t seed) {
    if (config.l_values.empty()) throw ConfigError("need at least one tracer count");
    for (int l : config.l_values)
        if (l < 1) throw ConfigError("tracer counts must be positive");
    if (config.n_samples < 2) throw ConfigError("need at least 2 posterior samples");

    FlowModelConfig flow_cfg = FlowModelConfig::square_lattice(
        config.kmax, config.d, config.omega, config.sigma, config.sigma_x);
    const TimeGrid grid(config.dt, config.steps);
    const SpectralFlowSeries flow = simulate_flow(flow_cfg, grid, seed);
    const int max_l = *std::max_element(config.l_values.begin(), config.l_values.end());
    const TracerSet tracers = simulate_tracers(flow, max_l, seed + 1);
    const ComplexGaussian prior = equilibrium_prior(flow_cfg);

    FilterOptions options;
    options.store_stride = config.store_stride;

    EddyOwResult out;
    out.grid_n = config.grid_n;
    const Eigen::VectorXcd final_coeffs = flow.coeffs.row(flow.coeffs.rows() - 1).transpose();
    const VelocityGrids truth_vel = velocity_on_grid(flow_cfg, final_coeffs, config.grid_n);
    out.dx = truth_vel.dx;
    out.ow_truth = ow_field(truth_vel.u, truth_vel.v, truth_vel.dx).ow;

    std::uint64_t sample_seed = seed + 2;
    for (int l : config.l_values) {
        const FilterTrajectory filt =
            run_filter(tracer_subset(tracers, l), flow_cfg, prior, options);
        const PosteriorFlowSamples samples =
            sample_posterior_flows(filt, filt.stored_points() - 1,
                                   static_cast<std::size_t>(config.n_samples), config.grid_n,
                                   sample_seed++);
        EddyOwCase c;
        c.l = l;
        c.ow_mean = samples.ow_mean;
        c.ow_variance = samples.ow_variance;
        c.eddy_prob = samples.eddy_probability();
        c.mean_cell_variance = samples.ow_variance.mean();
        c.decomposition_residual = expected_ow(samples.flows).max_residual;
        out.cases.push_back(std::move(c));
    }
    return out;
}

std::vector<std::string> write_eddy_ow(const EddyOwResult& result,
                                       const std::string& out_dir) {
    std::vector<std::string> files;
    for (const auto& c : result.cases) {
        CsvWriter csv({"i", "j", "x", "y", "ow_truth", "ow_mean", "ow_variance", "eddy_prob"});
        for (int i = 0; i < result.grid_n; ++i) {
            for (int j = 0; j < result.grid_n; ++j) {
                csv.row({fmt_int(i), fmt_int(j), format_double(-pi + i * result.dx),
                         format_double(-pi + j * result.dx),
                         format_double(result.ow_truth(i, j)), format_double(c.ow_mean(i, j)),
                         format_double(c.ow_variance(i, j)),
                         format_double(c.eddy_prob(i, j))});
            }
        }
        const std::string name = "eddy_ow_l" + std::to_string(c.l) + ".csv";
        csv.write(artifact_path(out_dir, name));
        files.push_back(name);
    }

    CsvWriter summary({"L", "mean_cell_variance", "decomposition_residual"});
    for (const auto& c : result.cases)
        summary.row({fmt_int(c.l), format_double(c.mean_cell_variance),
                     format_double(c.decomposition_residual)});
    summary.write(artifact_path(out_dir, "eddy_ow_summary.csv"));
    files.push_back("eddy_ow_summary.csv");
    return files;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, CubicParams>> reference_regimes() {
    std::vector<std::pair<std::string, CubicParams>> out;
    out.push_back({"nearly_gaussian", CubicParams{-2.2, 0.0, 0.0, 2.0, 0.1, 0.1, 1.0}});
    out.push_back({"highly_skewed", CubicParams{-4.0, 2.0, 1.0, 0.1, 1.0, -1.0, 1.0}});
    out.push_back({"fat_tailed", CubicParams{-3.0, -1.5, 0.5, 0.0, 0.5, -1.0, 1.0}});
    out.push_back({"bimodal", CubicParams{4.0, 2.0, 1.0, 0.1, 1.0, -1.0, 1.0}});
    return out;
}

int count_modes(const GridPdf& pdf, double floor_fraction) {
    // Superlevel-set sweep: insert grid points from high to low and merge
    // adjacent components; a component only counts as a mode if it rises at
    // least floor_fraction of the global peak above the saddle where it joins
    // taller ground. Plain local-max counting is too brittle here because
    // kernel estimates of long series carry shallow ripples.
    const int n = pdf.size();
    const double thresh = floor_fraction * pdf.values.maxCoeff();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return pdf.values[a] > pdf.values[b]; });
    std::vector<int> parent(n, -1);
    std::vector<double> birth(n, 0.0);
    const auto find = [&](int i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    int modes = 1;  // the global peak always survives
    for (const int idx : order) {
        parent[idx] = idx;
        birth[idx] = pdf.values[idx];
        for (const int nb : {idx - 1, idx + 1}) {
            if (nb < 0 || nb >= n || parent[nb] < 0) continue;
            int ra = find(idx);
            int rb = find(nb);
            if (ra == rb) continue;
            if (birth[ra] < birth[rb]) std::swap(ra, rb);
            if (birth[rb] - pdf.values[idx] >= thresh) ++modes;
            parent[rb] = ra;
        }
    }
    return modes;
}

CalibrateRegimesResult run_calibrate_regimes(const CalibrateRegimesConfig& config,
                                             std::uint64_t seed) {
    if (config.dt <= 0.0) throw ConfigError("dt must be positive");
    if (config.burn_fraction < 0.0 || config.burn_fraction >= 1.0)
        throw ConfigError("burn fraction must be in [0, 1)");

    CalibrateRegimesResult out;

    const int ou_steps = static_cast<int>(std::llround(config.ou_duration / config.dt));
    const TimeGrid ou_grid(config.dt, ou_steps);
    const Eigen::VectorXd ou_series = simulate_ou_real(
        config.ou_a, config.ou_f, config.ou_sigma, config.ou_f / config.ou_a, ou_grid, seed);
    out.ou_fit = calibrate_ou(
        std::span<const double>(ou_series.data(), static_cast<std::size_t>(ou_series.size())),
        config.dt);
    out.ou_a_err = std::abs(out.ou_fit.a - config.ou_a) / config.ou_a;
    out.ou_f_err = std::abs(out.ou_fit.f - config.ou_f) / std::abs(config.ou_f);
    out.ou_sigma_err = std::abs(out.ou_fit.sigma - config.ou_sigma) / config.ou_sigma;

    const int steps = static_cast<int>(std::llround(config.regime_duration / config.dt));
    const TimeGrid grid(config.dt, steps);
    const auto regimes = reference_regimes();
    for (std::size_t i = 0; i < regimes.size(); ++i) {
        const Eigen::VectorXd path =
            simulate_cubic(regimes[i].second, 0.0, grid, seed + 1 + i);
        const auto burn = static_cast<Eigen::Index>(config.burn_fraction * path.size());
        const std::span<const double> series(path.data() + burn,
                                             static_cast<std::size_t>(path.size() - burn));

        RegimeFit fit;
        fit.name = regimes[i].first;
        const CalibrationResult cal = calibrate_ou(series, config.dt);
        fit.report = validate_surrogate(series, cal, config.dt, seed + 11 + i);
        fit.truth_modes = count_modes(fit.report.truth_pdf);
        fit.surrogate_modes = count_modes(fit.report.surrogate_pdf);
        out.regimes.push_back(std::move(fit));
    }
    return out;
}

std::vector<std::string> write_calibrate_regimes(const CalibrateRegimesResult& result,
                                                 const std::string& out_dir) {
    CsvWriter round({"parameter", "estimated", "relative_error"});
    round.row({"a", format_double(result.ou_fit.a), format_double(result.ou_a_err)});
    round.row({"f", format_double(result.ou_fit.f), format_double(result.ou_f_err)});
    round.row({"sigma", format_double(result.ou_fit.sigma), format_double(result.ou_sigma_err)});
    round.write(artifact_path(out_dir, "calibrate_roundtrip.csv"));

    CsvWriter reg({"regime", "mu", "r", "tau", "a", "f", "sigma", "mean_err", "var_err",
                   "acf_linf", "kl", "truth_modes", "surrogate_modes"});
    for (const auto& fit : result.regimes) {
        const CalibrationResult& p = fit.report.params;
        reg.row({fit.name, format_double(p.mu), format_double(p.r), format_double(p.tau),
                 format_double(p.a), format_double(p.f), format_double(p.sigma),
                 format_double(fit.report.mean_err), format_double(fit.report.var_err),
                 format_double(fit.report.acf_linf), format_double(fit.report.kl),
                 fmt_int(fit.truth_modes), fmt_int(fit.surrogate_modes)});
    }
    reg.write(artifact_path(out_dir, "calibrate_regimes.csv"));

    CsvWriter pdfs({"regime", "x", "truth_pdf", "surrogate_pdf"});
    for (const auto& fit : result.regimes) {
        const GridPdf& t = fit.report.truth_pdf;
        const GridPdf& s = fit.report.surrogate_pdf;
        for (int i = 0; i < t.size(); ++i)
            pdfs.row({fit.name, format_double(t.x(i)), format_double(t.values[i]),
                      format_double(s.values[i])});
    }
    pdfs.write(artifact_path(out_dir, "calibrate_pdfs.csv"));
    return {"calibrate_roundtrip.csv", "calibrate_regimes.csv", "calibrate_pdfs.csv"};
}

// ---------------------------------------------------------------------------

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EntropyGalleryConfig, shape, scale, plot_n)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LinearEnsembleConfig, a, f, mean0, var0, dt,
                                                steps, n_member)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(L63EnsembleConfig, dt, steps, n_member,
                                                init_std, spinup_steps)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(BayesScanConfig, l_values, n_replicates)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LadaScanConfig, kmax, d, omega, sigma, sigma_x,
                                                dt, steps, store_stride, l_values)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ParamEstimateConfig, r_values, n_points,
                                                n_samples)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EddyOwConfig, kmax, d, omega, sigma, sigma_x,
                                                dt, steps, store_stride, l_values, n_samples,
                                                grid_n)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CalibrateRegimesConfig, ou_a, ou_f, ou_sigma,
                                                ou_duration, regime_duration, dt,
                                                burn_fraction)

namespace {

nlohmann::json merge_params(nlohmann::json defaults, const nlohmann::json& params) {
    if (params.is_null()) return defaults;
    if (!params.is_object()) throw ConfigError("parameters must be a JSON object");
    for (const auto& [key, value] : params.items()) {
        if (!defaults.contains(key)) throw ConfigError("unknown parameter: " + key);
        defaults[key] = value;
    }
    return defaults;
}

template <typename Config, typename Run, typename Write>
nlohmann::json dispatch(const std::string& command, const nlohmann::json& params,
                        std::uint64_t seed, const std::string& out_dir, Run run, Write write) {
    nlohmann::json resolved;
    Config config;
    try {
        resolved = merge_params(nlohmann::json(Config{}), params);
        config = resolved.get<Config>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad parameter value: ") + e.what());
    }

    const auto t0 = std::chrono::steady_clock::now();
    auto result = run(config, seed);
    const std::vector<std::string> files = write(result, out_dir);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const nlohmann::json manifest = run_manifest(command, resolved, seed, wall, files);
    write_json((fs::path(out_dir) / (command + "_manifest.json")).string(), manifest);
    return manifest;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{
        "entropy-gallery", "linear-ensemble", "l63-ensemble",      "bayes-scan",
        "lada-scan",       "param-estimate",  "eddy-ow",           "calibrate-regimes"};
    return names;
}

nlohmann::json default_params(const std::string& command) {
    if (command == "entropy-gallery") return nlohmann::json(EntropyGalleryConfig{});
    if (command == "linear-ensemble") return nlohmann::json(LinearEnsembleConfig{});
    if (command == "l63-ensemble") return nlohmann::json(L63EnsembleConfig{});
    if (command == "bayes-scan") return nlohmann::json(BayesScanConfig{});
    if (command == "lada-scan") return nlohmann::json(LadaScanConfig{});
    if (command == "param-estimate") return nlohmann::json(ParamEstimateConfig{});
    if (command == "eddy-ow") return nlohmann::json(EddyOwConfig{});
    if (command == "calibrate-regimes") return nlohmann::json(CalibrateRegimesConfig{});
    throw ConfigError("unknown command: " + command);
}

nlohmann::json run_and_write(const std::string& command, const nlohmann::json& params,
                             std::uint64_t seed, const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory: " + out_dir);

    if (command == "entropy-gallery")
        return dispatch<EntropyGalleryConfig>(
            command, params, seed, out_dir,
            [](const EntropyGalleryConfig& c, std::uint64_t) { return run_entropy_gallery(c); },
            write_entropy_gallery);
    if (command == "linear-ensemble")
        return dispatch<LinearEnsembleConfig>(command, params, seed, out_dir,
                                              run_linear_ensemble, write_linear_ensemble);
    if (command == "l63-ensemble")
        return dispatch<L63EnsembleConfig>(command, params, seed, out_dir, run_l63_ensemble,
                                           write_l63_ensemble);
    if (command == "bayes-scan")
        return dispatch<BayesScanConfig>(command, params, seed, out_dir, run_bayes_scan,
                                         write_bayes_scan);
    if (command == "lada-scan")
        return dispatch<LadaScanConfig>(command, params, seed, out_dir, run_lada_scan,
                                        write_lada_scan);
    if (command == "param-estimate")
        return dispatch<ParamEstimateConfig>(command, params, seed, out_dir, run_param_estimate,
                                             write_param_estimate);
    if (command == "eddy-ow")
        return dispatch<EddyOwConfig>(command, params, seed, out_dir, run_eddy_ow,
                                      write_eddy_ow);
    if (command == "calibrate-regimes")
        return dispatch<CalibrateRegimesConfig>(command, params, seed, out_dir,
                                                run_calibrate_regimes, write_calibrate_regimes);
    throw ConfigError("unknown command: " + command);
}

}  // namespace uqkit

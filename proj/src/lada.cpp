#include "uqkit/lada.hpp"

#include <cmath>

namespace uqkit {

namespace {

double wrap_angle(double x) {
    double y = std::fmod(x + pi, two_pi);
    if (y <= 0.0) y += two_pi;
    return y - pi;
}

// Minimal-image difference; exact for per-step displacements below pi.
double wrap_delta(double d) { return d - two_pi * std::round(d / two_pi); }

void check_hermitian_psd(const Eigen::MatrixXcd& cov, double eig_tol, const char* who) {
    if (cov.rows() != cov.cols()) throw SizeError(std::string(who) + ": covariance not square");
    const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
    if ((cov - cov.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw SymmetryError(std::string(who) + ": covariance not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cov);
    if (es.info() != Eigen::Success)
        throw SingularMatrixError(std::string(who) + ": eigendecomposition failed");
    if (es.eigenvalues().minCoeff() < -eig_tol)
        throw DomainError(std::string(who) + ": covariance not positive semi-definite");
}

}  // namespace

ComplexGaussian::ComplexGaussian(Eigen::VectorXcd mean_in, Eigen::MatrixXcd cov_in)
    : mean(std::move(mean_in)), cov(std::move(cov_in)) {
    if (mean.size() == 0) throw SizeError("ComplexGaussian needs dimension >= 1");
    if (cov.rows() != mean.size())
        throw SizeError("ComplexGaussian mean/covariance dimensions disagree");
    check_hermitian_psd(cov, 1e-8, "ComplexGaussian");
}

ComplexGaussian equilibrium_prior(const FlowModelConfig& config) {
    const int m = config.n_modes();
    Eigen::VectorXcd mean(m);
    Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        mean(i) = config.modes[i].params.equilibrium_mean();
        cov(i, i) = config.modes[i].params.equilibrium_var();
    }
    return {std::move(mean), std::move(cov)};
}

TracerSet simulate_tracers(const SpectralFlowSeries& flow, int n_tracers, std::uint64_t seed,
                           const std::optional<Eigen::MatrixXd>& x0) {
    if (n_tracers < 1) throw SizeError("simulate_tracers needs at least one tracer");
    if (x0 && (x0->rows() != n_tracers || x0->cols() != 2))
        throw SizeError("simulate_tracers: x0 must be (n_tracers x 2)");
    const TimeGrid& grid = flow.grid;
    const double sigma_x = flow.config.sigma_x;
    const double noise_scale = sigma_x * std::sqrt(grid.dt);

    TracerSet out{grid, Eigen::MatrixXd(grid.points(), 2 * n_tracers), sigma_x};
    parallel_for(static_cast<std::size_t>(n_tracers), [&](std::size_t l) {
        RngStream rng(seed, l);
        Eigen::Vector2d x;
        if (x0) {
            x = x0->row(static_cast<int>(l)).transpose();
            x(0) = wrap_angle(x(0));
            x(1) = wrap_angle(x(1));
        } else {
            x(0) = -pi + two_pi * rng.uniform();
            x(1) = -pi + two_pi * rng.uniform();
        }
        out.positions(0, 2 * l) = x(0);
        out.positions(0, 2 * l + 1) = x(1);
        for (int s = 1; s <= grid.steps; ++s) {
            const Eigen::Vector2d u =
                eval_velocity(flow.config, flow.coeffs.row(s - 1), x);
            x(0) = wrap_angle(x(0) + u(0) * grid.dt + noise_scale * rng.normal());
            x(1) = wrap_angle(x(1) + u(1) * grid.dt + noise_scale * rng.normal());
            out.positions(s, 2 * l) = x(0);
            out.positions(s, 2 * l + 1) = x(1);
        }
    });
    return out;
}

Eigen::MatrixXcd build_projection(const FlowModelConfig& config,
                                  const Eigen::VectorXd& positions) {
    if (positions.size() % 2 != 0 || positions.size() == 0)
        throw SizeError("build_projection: positions must hold (x, y) pairs");
    const int n_tracers = static_cast<int>(positions.size()) / 2;
    const int m = config.n_modes();
    Eigen::MatrixXcd p(2 * n_tracers, m);
    for (int l = 0; l < n_tracers; ++l) {
        const double x = positions(2 * l);
        const double y = positions(2 * l + 1);
        for (int j = 0; j < m; ++j) {
            const FlowMode& mode = config.modes[j];
            const double phase = mode.k(0) * x + mode.k(1) * y;
            const std::complex<double> e(std::cos(phase), std::sin(phase));
            p(2 * l, j) = e * mode.r(0);
            p(2 * l + 1, j) = e * mode.r(1);
        }
    }
    return p;
}

FilterTrajectory run_filter(const TracerSet& tracers, const FlowModelConfig& config,
                            const ComplexGaussian& init, const FilterOptions& options) {
    if (config.conj_index.empty())
        throw ConfigError("run_filter: call finalize() on the flow config first");
    const int m = config.n_modes();
    if (init.dim() != m) throw SizeError("run_filter: init dimension does not match the modes");
    if (tracers.positions.cols() < 2) throw SizeError("run_filter: empty tracer set");
    if (std::abs(tracers.sigma_x - config.sigma_x) > 1e-12)
        throw ConfigError("run_filter: tracer set and config disagree on sigma_x");
    if (!(config.sigma_x > 0.0))
        throw DomainError("run_filter requires sigma_x > 0 (observation noise)");
    if (options.store_stride < 1) throw ConfigError("run_filter: store_stride must be >= 1");

    const TimeGrid& grid = tracers.grid;
    const double dt = grid.dt;
    const double sx2 = config.sigma_x * config.sigma_x;

    Eigen::VectorXcd gamma(m), forcing(m);
    Eigen::VectorXd q(m);
    for (int i = 0; i < m; ++i) {
        const OuParams& p = config.modes[i].params;
        gamma(i) = std::complex<double>(p.d, -p.omega);
        forcing(i) = p.f;
        q(i) = p.sigma * p.sigma;
    }

    const int stored = grid.steps / options.store_stride + 1;
    FilterTrajectory out;
    out.config = config;
    out.grid = TimeGrid(dt * options.store_stride, std::max(stored - 1, 1));
    out.stride = options.store_stride;
    out.mean.reserve(stored);
    out.cov.reserve(stored);

    Eigen::VectorXcd mu = init.mean;
    Eigen::MatrixXcd r = init.cov;
    out.mean.push_back(mu);
    out.cov.push_back(r);

    Eigen::VectorXcd dx(tracers.positions.cols());
    for (int s = 0; s < grid.steps; ++s) {
        const Eigen::VectorXd pos = tracers.positions.row(s);
        const Eigen::MatrixXcd proj = build_projection(config, pos);
        for (int c = 0; c < tracers.positions.cols(); ++c)
            dx(c) = wrap_delta(tracers.positions(s + 1, c) - tracers.positions(s, c));

        // Assimilate the increment as a discrete observation. The continuous
        // gain R P*/sigma_x^2 overshoots whenever dt * lambda_max(P R P*) is
        // comparable to sigma_x^2, which happens in the large-covariance
        // transient for many tracers, so the gain divides by the one-step
        // innovation covariance instead and the covariance update uses the
        // Joseph form. Both reduce to the continuous equations as dt -> 0 and
        // the covariance stays PSD for any dt.
        const Eigen::MatrixXcd g = r * proj.adjoint();
        Eigen::MatrixXcd innov_cov = dt * (proj * g);
        innov_cov.diagonal().array() += sx2;
        const Eigen::LLT<Eigen::MatrixXcd> llt(innov_cov);
        if (llt.info() != Eigen::Success)
            throw InstabilityError("run_filter: innovation covariance lost positive "
                                   "definiteness; reduce dt");
        const Eigen::MatrixXcd gain = llt.solve(g.adjoint()).adjoint();
        const Eigen::VectorXcd innovation = dx - proj * mu * dt;

        mu += gain * innovation;
        const Eigen::MatrixXcd shrink =
            Eigen::MatrixXcd::Identity(m, m) - dt * (gain * proj);
        r = (shrink * r * shrink.adjoint() + (sx2 * dt) * (gain * gain.adjoint())).eval();

        mu += (forcing - gamma.cwiseProduct(mu)) * dt;
        r += dt * (-(gamma.asDiagonal() * r) - (r * gamma.conjugate().asDiagonal()) +
                   Eigen::MatrixXcd(q.cast<std::complex<double>>().asDiagonal()));
        r = 0.5 * (r + r.adjoint()).eval();

        if (!mu.allFinite() || !r.allFinite())
            throw InstabilityError("run_filter: state became non-finite; reduce dt");

        const bool last = (s + 1 == grid.steps);
        if (last || (s + 1) % options.psd_check_stride == 0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
            if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < -1e-8)
                throw InstabilityError(
                    "run_filter: posterior covariance lost positive semi-definiteness; "
                    "reduce dt");
        }
        if ((s + 1) % options.store_stride == 0) {
            out.mean.push_back(mu);
            out.cov.push_back(r);
        }
    }
    return out;
}

KlDecomposition complex_kl_decomposition(const Eigen::VectorXcd& mu, const Eigen::MatrixXcd& r,
                                         const Eigen::VectorXcd& mu_m,
                                         const Eigen::MatrixXcd& r_m) {
    const int m = static_cast<int>(mu.size());
    if (mu_m.size() != m || r.rows() != m || r_m.rows() != m)
        throw SizeError("complex_kl_decomposition: dimension mismatch");
    Eigen::LLT<Eigen::MatrixXcd> llt_m(r_m);
    if (llt_m.info() != Eigen::Success)
        throw SingularMatrixError("complex_kl_decomposition: reference covariance not PD");
    Eigen::LLT<Eigen::MatrixXcd> llt_p(r);
    if (llt_p.info() != Eigen::Success)
        throw SingularMatrixError("complex_kl_decomposition: covariance not PD");

    const Eigen::VectorXcd dmu = mu - mu_m;
    const std::complex<double> quad = dmu.adjoint() * llt_m.solve(dmu);

    double log_det = 0.0;
    for (int i = 0; i < m; ++i)
        log_det += 2.0 * (std::log(std::abs(llt_p.matrixL()(i, i))) -
                          std::log(std::abs(llt_m.matrixL()(i, i))));
    const std::complex<double> trace = llt_m.solve(r).trace();

    // Each complex dimension is two real ones; written over the real embedding
    // the 1/2 prefactors of the real-Gaussian formula cancel, so the complex
    // form carries none.
    KlDecomposition out;
    out.signal = quad.real();
    out.dispersion = trace.real() - m - log_det;
    out.total = out.signal + out.dispersion;
    return out;
}

UncertaintyReduction uncertainty_reduction(const FilterTrajectory& filter,
                                           const FlowModelConfig& config,
                                           const SpectralFlowSeries& truth) {
    const int m = config.n_modes();
    if (filter.config.n_modes() != m || truth.config.n_modes() != m)
        throw SizeError("uncertainty_reduction: mode count mismatch");
    const int stored = filter.stored_points();
    const int start = stored / 2;
    if (stored - start < 10)
        throw WindowError("uncertainty_reduction: stationary window shorter than 10 steps");

    const ComplexGaussian prior = equilibrium_prior(config);
    UncertaintyReduction out;
    int used = 0;
    for (int s = start; s < stored; ++s) {
        const int truth_step = s * filter.stride;
        if (truth_step >= truth.coeffs.rows())
            throw SizeError("uncertainty_reduction: truth series shorter than the filter record");
        const KlDecomposition post =
            complex_kl_decomposition(filter.mean[s], filter.cov[s], prior.mean, prior.cov);
        const KlDecomposition limit = complex_kl_decomposition(
            truth.coeffs.row(truth_step).transpose(), filter.cov[s], prior.mean, prior.cov);
        out.signal += post.signal;
        out.dispersion += post.dispersion;
        out.signal_limit += limit.signal;
        ++used;
    }
    out.signal /= used;
    out.dispersion /= used;
    out.signal_limit /= used;
    return out;
}

VelocityGrids reconstruct_flow(const FilterTrajectory& filter, int step, int grid_n) {
    if (step < 0 || step >= filter.stored_points())
        throw SizeError("reconstruct_flow: step outside the stored trajectory");
    return velocity_on_grid(filter.config, filter.mean[step], grid_n);
}

}  // namespace uqkit

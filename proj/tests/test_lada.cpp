#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "uqkit/common.hpp"
#include "uqkit/info.hpp"
#include "uqkit/lada.hpp"

using namespace uqkit;

namespace {

// steady cosine shear: one conjugate pair at k = (1, 0) with frozen
// coefficients 1/2, giving u = 0, v = cos(x1)
FlowModelConfig shear_config(double sigma_x) {
    FlowModelConfig c;
    c.sigma_x = sigma_x;
    FlowMode plus;
    plus.k = Eigen::Vector2i(1, 0);
    plus.r = Eigen::Vector2d(0.0, 1.0);
    plus.params.d = 0.5;
    plus.params.f = {0.25, 0.0};  // equilibrium mean 0.5
    plus.params.sigma = 0.0;
    FlowMode minus = plus;
    minus.k = Eigen::Vector2i(-1, 0);
    minus.params.f = std::conj(plus.params.f);
    c.modes = {plus, minus};
    c.finalize();
    return c;
}

double wrap_gap(double a, double b) {
    const double d = a - b;
    return std::abs(d - two_pi * std::round(d / two_pi));
}

}  // namespace

TEST_SUITE("lada") {

TEST_CASE("complex gaussian validation") {
    Eigen::VectorXcd mu(2);
    mu << std::complex<double>(1.0, 0.0), std::complex<double>(0.0, -1.0);
    Eigen::MatrixXcd good(2, 2);
    good << std::complex<double>(1.0, 0.0), std::complex<double>(0.2, 0.1),
        std::complex<double>(0.2, -0.1), std::complex<double>(0.5, 0.0);
    CHECK_NOTHROW(ComplexGaussian(mu, good));

    Eigen::MatrixXcd not_herm = good;
    not_herm(0, 1) = std::complex<double>(0.2, 0.3);
    CHECK_THROWS_AS(ComplexGaussian(mu, not_herm), SymmetryError);

    Eigen::MatrixXcd indef(2, 2);
    indef << std::complex<double>(0.1, 0.0), std::complex<double>(1.0, 0.0),
        std::complex<double>(1.0, 0.0), std::complex<double>(0.1, 0.0);
    CHECK_THROWS_AS(ComplexGaussian(mu, indef), DomainError);

    CHECK_THROWS_AS(ComplexGaussian(Eigen::VectorXcd(), Eigen::MatrixXcd()), SizeError);
}

TEST_CASE("equilibrium prior carries the ou statistics") {
    const std::complex<double> f(0.3, -0.1);
    const FlowModelConfig c = FlowModelConfig::square_lattice(1, 0.5, 0.8, 0.4, 0.1, f);
    const ComplexGaussian prior = equilibrium_prior(c);
    REQUIRE(prior.dim() == 8);
    for (int i = 0; i < c.n_modes(); ++i) {
        const OuParams& p = c.modes[i].params;
        CHECK(std::abs(prior.mean(i) - p.f / std::complex<double>(p.d, -p.omega)) < 1e-14);
        CHECK(std::abs(prior.cov(i, i) - std::complex<double>(0.16, 0.0)) < 1e-14);
        for (int j = 0; j < c.n_modes(); ++j)
            if (i != j) CHECK(std::abs(prior.cov(i, j)) == 0.0);
    }
}

TEST_CASE("tracers in a quiet flow do a pure random walk") {
    const double sigma_x = 0.2;
    FlowModelConfig c = FlowModelConfig::square_lattice(1, 0.5, 0.0, 0.0, sigma_x);
    const TimeGrid grid(1e-3, 2000);
    const SpectralFlowSeries flow = simulate_flow(c, grid, 5);
    CHECK(flow.coeffs.cwiseAbs().maxCoeff() == 0.0);  // f = 0, sigma = 0

    const TracerSet tracers = simulate_tracers(flow, 20, 6);
    CHECK(tracers.n_tracers() == 20);
    CHECK(tracers.sigma_x == sigma_x);
    // positions wrapped
    CHECK(tracers.positions.maxCoeff() <= pi);
    CHECK(tracers.positions.minCoeff() > -pi);

    // increment variance per component ~ sigma_x^2 dt
    double acc = 0.0;
    std::size_t count = 0;
    for (int s = 1; s <= grid.steps; ++s) {
        for (int cidx = 0; cidx < tracers.positions.cols(); ++cidx) {
            const double d = wrap_gap(tracers.positions(s, cidx), tracers.positions(s - 1, cidx));
            acc += d * d;
            ++count;
        }
    }
    const double expect = sigma_x * sigma_x * grid.dt;
    CHECK(acc / double(count) == doctest::Approx(expect).epsilon(0.03));
}

TEST_CASE("noise-free tracer follows the steady shear streamline") {
    const FlowModelConfig c = shear_config(0.0);
    const TimeGrid grid(1e-3, 5000);
    SpectralFlowSeries flow{c, grid, Eigen::MatrixXcd::Constant(grid.points(), 2, 0.5)};

    Eigen::MatrixXd x0(2, 2);
    x0 << 0.7, -1.3, 2.2, 0.4;
    const TracerSet tracers = simulate_tracers(flow, 2, 9, x0);
    for (int l = 0; l < 2; ++l) {
        const double x1 = x0(l, 0);
        const double speed = std::cos(x1);
        for (int s = 0; s <= grid.steps; s += 500) {
            // x1 frozen, x2 advected at cos(x1); Euler is exact for constant drift
            // (the repeated wrap only costs a few ulps)
            CHECK(std::abs(tracers.positions(s, 2 * l) - x1) < 1e-12);
            CHECK(wrap_gap(tracers.positions(s, 2 * l + 1), x0(l, 1) + speed * grid.t(s)) <
                  1e-9);
        }
    }
}

TEST_CASE("tracer simulation is deterministic in the seed") {
    const FlowModelConfig c = FlowModelConfig::square_lattice(1, 0.5, 0.0, 0.5, 0.1);
    const SpectralFlowSeries flow = simulate_flow(c, TimeGrid(1e-3, 500), 11);
    const TracerSet a = simulate_tracers(flow, 5, 21);
    const TracerSet b = simulate_tracers(flow, 5, 21);
    const TracerSet other = simulate_tracers(flow, 5, 22);
    CHECK((a.positions - b.positions).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.positions - other.positions).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("projection rows are mode eigenvectors at the origin") {
    const FlowModelConfig c = FlowModelConfig::square_lattice(2, 0.5, 0.0, 0.5, 0.1);
    Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
    const Eigen::MatrixXcd p = build_projection(c, origin);
    REQUIRE(p.rows() == 2);
    REQUIRE(p.cols() == 24);
    for (int j = 0; j < 24; ++j) {
        CHECK(std::abs(p(0, j) - std::complex<double>(c.modes[j].r(0), 0.0)) < 1e-14);
        CHECK(std::abs(p(1, j) - std::complex<double>(c.modes[j].r(1), 0.0)) < 1e-14);
    }
}

TEST_CASE("projection against symmetric coefficients is real and periodic") {
    const FlowModelConfig c = FlowModelConfig::square_lattice(2, 0.5, 0.0, 0.5, 0.1);
    const SpectralFlowSeries flow = simulate_flow(c, TimeGrid(1e-3, 200), 31);
    const Eigen::VectorXcd coeffs = flow.coeffs.row(200);

    Eigen::VectorXd pos(4);
    pos << 0.3, -1.1, 2.0, 0.9;
    const Eigen::MatrixXcd p = build_projection(c, pos);
    const Eigen::VectorXcd product = p * coeffs;
    for (int i = 0; i < product.size(); ++i) CHECK(std::abs(product(i).imag()) < 1e-10);

    Eigen::VectorXd shifted = pos;
    shifted(0) += two_pi;
    shifted(3) -= two_pi;
    const Eigen::MatrixXcd p2 = build_projection(c, shifted);
    CHECK((p - p2).cwiseAbs().maxCoeff() < 1e-12);

    Eigen::VectorXd odd(3);
    odd << 0.0, 0.0, 0.0;
    CHECK_THROWS_AS(build_projection(c, odd), SizeError);
}

TEST_CASE("filter rejects inconsistent inputs") {
    const FlowModelConfig c = FlowModelConfig::square_lattice(1, 0.5, 0.0, 0.5, 0.1);
    const SpectralFlowSeries flow = simulate_flow(c, TimeGrid(1e-3, 100), 41);
    const TracerSet tracers = simulate_tracers(flow, 2, 42);
    const ComplexGaussian prior = equilibrium_prior(c);

    FlowModelConfig other = FlowModelConfig::square_lattice(1, 0.5, 0.0, 0.5, 0.2);
    CHECK_THROWS_AS(run_filter(tracers, other, prior), ConfigError);

    FilterOptions bad;
    bad.store_stride = 0;
    CHECK_THROWS_AS(run_filter(tracers, c, prior, bad), ConfigError);

    const FlowModelConfig big = FlowModelConfig::square_lattice(2, 0.5, 0.0, 0.5, 0.1);
    CHECK_THROWS_AS(run_filter(tracers, big, prior), SizeError);
}

TEST_CASE("filter is deterministic and keeps hermitian psd covariances") {
    const FlowModelConfig c = FlowModelConfig::square_lattice(1, 0.5, 0.0, 0.5, 0.1);
    const SpectralFlowSeries flow = simulate_flow(c, TimeGrid(1e-3, 2000), 51);
    const TracerSet tracers = simulate_tracers(flow, 4, 52);
    const ComplexGaussian prior = equilibrium_prior(c);

    FilterOptions opt;
    opt.store_stride = 10;
    const FilterTrajectory fa = run_filter(tracers, c, prior, opt);
    const FilterTrajectory fb = run_filter(tracers, c, prior, opt);
    REQUIRE(fa.stored_points() == 201);
    CHECK(fa.grid.dt == doctest::Approx(0.01));
    for (int s = 0; s < fa.stored_points(); ++s) {
        CHECK((fa.mean[s] - fb.mean[s]).cwiseAbs().maxCoeff() == 0.0);
        CHECK((fa.cov[s] - fb.cov[s]).cwiseAbs().maxCoeff() == 0.0);
        CHECK((fa.cov[s] - fa.cov[s].adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(fa.cov[s]);
        CHECK(es.eigenvalues().minCoeff() > -1e-8);
    }
}

TEST_CASE("useless observations leave the ou equilibrium statistics") {
    const std::complex<double> f(0.2, 0.1);
    const FlowModelConfig c = FlowModelConfig::square_lattice(1, 0.5, 0.0, 0.5, 1e6, f);
    const TimeGrid grid(1e-3, 20000);
    const SpectralFlowSeries flow = simulate_flow(c, grid, 61);
    const TracerSet tracers = simulate_tracers(flow, 2, 62);

    // start far from equilibrium so convergence is visible
    const int m = c.n_modes();
    const ComplexGaussian init(Eigen::VectorXcd::Zero(m),
                               0.01 * Eigen::MatrixXcd::Identity(m, m));
    FilterOptions opt;
    opt.store_stride = 100;
    const FilterTrajectory filt = run_filter(tracers, c, init, opt);

    const ComplexGaussian eq = equilibrium_prior(c);
    const Eigen::VectorXcd& mu_end = filt.mean.back();
    const Eigen::MatrixXcd& r_end = filt.cov.back();
    for (int i = 0; i < m; ++i) {
        CHECK(std::abs(mu_end(i) - eq.mean(i)) < 0.05 * std::abs(eq.mean(i)));
        CHECK(std::abs(r_end(i, i).real() - eq.cov(i, i).real()) <
              0.05 * eq.cov(i, i).real());
    }
}

TEST_CASE("filter tracks the true modes from the generating model") {
    const FlowModelConfig c = FlowModelConfig::square_lattice(2, 0.5, 0.0, 0.5, 0.1);
    const TimeGrid grid(1e-3, 20000);
    const SpectralFlowSeries flow = simulate_flow(c, grid, 71);
    const TracerSet tracers = simulate_tracers(flow, 20, 72);
    const ComplexGaussian prior = equilibrium_prior(c);

    FilterOptions opt;
    opt.store_stride = 10;
    const FilterTrajectory filt = run_filter(tracers, c, prior, opt);

    // time-mean RMSE of the (1,1) mode over the second half, against the truth
    int target = -1;
    for (int i = 0; i < c.n_modes(); ++i)
        if (c.modes[i].k(0) == 1 && c.modes[i].k(1) == 1) target = i;
    REQUIRE(target >= 0);

    const int stored = filt.stored_points();
    double acc = 0.0;
    int used = 0;
    for (int s = stored / 2; s < stored; ++s) {
        const int truth_step = s * filt.stride;
        acc += std::norm(filt.mean[s](target) - flow.coeffs(truth_step, target));
        ++used;
    }
    const double rmse = std::sqrt(acc / used);
    // equilibrium sd is 0.5; 20 tracers must beat the prior comfortably
    CHECK(rmse < 0.5);

    // posterior mean coefficients stay conjugate-symmetric, so the
    // reconstruction is a real field equal to the truth when the mean is
    // replaced by the truth
    for (int s = 0; s < stored; s += 50)
        CHECK(conjugate_symmetry_error(c, filt.mean[s]) < 1e-8);

    const VelocityGrids recon = reconstruct_flow(filt, stored - 1, 12);
    FilterTrajectory truth_filter = filt;
    truth_filter.mean[stored - 1] = flow.coeffs.row((stored - 1) * filt.stride);
    const VelocityGrids exact = reconstruct_flow(truth_filter, stored - 1, 12);
    const VelocityGrids direct =
        velocity_on_grid(c, flow.coeffs.row((stored - 1) * filt.stride), 12);
    CHECK((exact.u - direct.u).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((exact.v - direct.v).cwiseAbs().maxCoeff() < 1e-10);
    // and the filtered reconstruction beats the prior-mean field, whose RMSE
    // against the truth is around 1.7 at these parameters
    const double field_rmse = std::sqrt(((recon.u - direct.u).squaredNorm() +
                                         (recon.v - direct.v).squaredNorm()) /
                                        (2.0 * 12 * 12));
    CHECK(field_rmse < 1.0);
}

TEST_CASE("complex kl decomposition against the real embedding oracle") {
    // a circular complex scalar N(mu, r) equals a real pair
    // N((Re mu, Im mu), r/2 I); KL values must agree
    RngStream rng(81);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXcd mu(2), mu_m(2);
        for (int i = 0; i < 2; ++i) {
            mu(i) = std::complex<double>(rng.normal(), rng.normal());
            mu_m(i) = std::complex<double>(rng.normal(), rng.normal());
        }
        Eigen::VectorXd rp(2), rm(2);
        for (int i = 0; i < 2; ++i) {
            rp(i) = 0.3 + rng.uniform();
            rm(i) = 0.3 + rng.uniform();
        }
        Eigen::MatrixXcd cov_p = Eigen::MatrixXcd::Zero(2, 2);
        Eigen::MatrixXcd cov_m = Eigen::MatrixXcd::Zero(2, 2);
        for (int i = 0; i < 2; ++i) {
            cov_p(i, i) = rp(i);
            cov_m(i, i) = rm(i);
        }

        const KlDecomposition complex_kl = complex_kl_decomposition(mu, cov_p, mu_m, cov_m);

        Eigen::VectorXd mu_r(4), mu_mr(4);
        Eigen::MatrixXd cov_pr = Eigen::MatrixXd::Zero(4, 4);
        Eigen::MatrixXd cov_mr = Eigen::MatrixXd::Zero(4, 4);
        for (int i = 0; i < 2; ++i) {
            mu_r(2 * i) = mu(i).real();
            mu_r(2 * i + 1) = mu(i).imag();
            mu_mr(2 * i) = mu_m(i).real();
            mu_mr(2 * i + 1) = mu_m(i).imag();
            cov_pr(2 * i, 2 * i) = 0.5 * rp(i);
            cov_pr(2 * i + 1, 2 * i + 1) = 0.5 * rp(i);
            cov_mr(2 * i, 2 * i) = 0.5 * rm(i);
            cov_mr(2 * i + 1, 2 * i + 1) = 0.5 * rm(i);
        }
        const KlDecomposition real_kl =
            relative_entropy(GaussianDist(mu_r, cov_pr), GaussianDist(mu_mr, cov_mr));

        CHECK(complex_kl.signal == doctest::Approx(real_kl.signal).epsilon(1e-10));
        CHECK(complex_kl.dispersion == doctest::Approx(real_kl.dispersion).epsilon(1e-10));
        CHECK(complex_kl.total ==
              doctest::Approx(complex_kl.signal + complex_kl.dispersion).epsilon(1e-12));
    }
}

TEST_CASE("complex kl error paths") {
    Eigen::VectorXcd mu = Eigen::VectorXcd::Zero(2);
    Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(2, 2);
    CHECK_THROWS_AS(complex_kl_decomposition(mu, eye, Eigen::VectorXcd::Zero(3),
                                             Eigen::MatrixXcd::Identity(3, 3)),
                    SizeError);
    CHECK_THROWS_AS(complex_kl_decomposition(mu, eye, mu, Eigen::MatrixXcd::Zero(2, 2)),
                    SingularMatrixError);
}

TEST_CASE("uncertainty reduction vanishes when posterior equals prior") {
    const FlowModelConfig c = FlowModelConfig::square_lattice(1, 0.5, 0.0, 0.5, 0.1);
    const ComplexGaussian prior = equilibrium_prior(c);
    const int stored = 21;

    FilterTrajectory filt;
    filt.config = c;
    filt.grid = TimeGrid(0.01, stored - 1);
    filt.stride = 1;
    for (int s = 0; s < stored; ++s) {
        filt.mean.push_back(prior.mean);
        filt.cov.push_back(prior.cov);
    }

    SpectralFlowSeries truth{c, TimeGrid(0.01, stored - 1),
                             Eigen::MatrixXcd(stored, c.n_modes())};
    for (int s = 0; s < stored; ++s) truth.coeffs.row(s) = prior.mean.transpose();

    const UncertaintyReduction r = uncertainty_reduction(filt, c, truth);
    CHECK(r.signal == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.dispersion == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.signal_limit == doctest::Approx(0.0).epsilon(1e-12));

    // short record: window below 10 stored steps
    FilterTrajectory tiny = filt;
    tiny.mean.resize(18);
    tiny.cov.resize(18);
    tiny.grid = TimeGrid(0.01, 17);
    CHECK_THROWS_AS(uncertainty_reduction(tiny, c, truth), WindowError);
}

TEST_CASE("more tracers reduce uncertainty monotonically") {
    const FlowModelConfig c = FlowModelConfig::square_lattice(1, 0.5, 0.0, 0.5, 0.1);
    const TimeGrid grid(1e-3, 10000);
    const SpectralFlowSeries flow = simulate_flow(c, grid, 91);
    const TracerSet all = simulate_tracers(flow, 16, 92);
    const ComplexGaussian prior = equilibrium_prior(c);
    FilterOptions opt;
    opt.store_stride = 10;

    std::vector<int> ls{2, 8, 16};
    std::vector<double> dispersion, mean_var;
    for (int l : ls) {
        TracerSet subset{all.grid, all.positions.leftCols(2 * l), all.sigma_x};
        const FilterTrajectory filt = run_filter(subset, c, prior, opt);
        const UncertaintyReduction r = uncertainty_reduction(filt, c, flow);
        dispersion.push_back(r.dispersion);

        double acc = 0.0;
        int used = 0;
        const int stored = filt.stored_points();
        for (int s = stored / 2; s < stored; ++s) {
            acc += filt.cov[s].real().trace();
            ++used;
        }
        mean_var.push_back(acc / used);
    }
    CHECK(dispersion[0] < dispersion[1]);
    CHECK(dispersion[1] < dispersion[2]);
    CHECK(mean_var[0] > mean_var[1]);
    CHECK(mean_var[1] > mean_var[2]);
}

}  // TEST_SUITE

#include "uqkit/diagnostics.hpp"

#include <cmath>
#include <cstddef>
#include <span>

#include <Eigen/Eigenvalues>

#include "uqkit/common.hpp"

namespace uqkit {

void RegressionData::validate() const {
    const auto n = times.size();
    if (n == 0) throw SizeError("regression data is empty");
    if (xdot.size() != n || y_mean.size() != n || y_var.size() != n)
        throw SizeError("regression arrays must share one length");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::isfinite(times[i]) || !std::isfinite(xdot[i]) || !std::isfinite(y_mean[i]) ||
            !std::isfinite(y_var[i]))
            throw DomainError("regression data must be finite");
        if (y_var[i] < 0.0) throw DomainError("latent variance must be nonnegative");
    }
}

std::pair<double, double> estimate_theta_full(const std::vector<Eigen::Matrix2d>& m_blocks,
                                              const std::vector<Eigen::Vector2d>& z_blocks) {
    if (m_blocks.empty()) throw SizeError("no regression blocks");
    if (m_blocks.size() != z_blocks.size())
        throw SizeError("block and target counts must match");

    Eigen::Matrix2d normal = Eigen::Matrix2d::Zero();
    Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < m_blocks.size(); ++i) {
        normal += m_blocks[i].transpose() * m_blocks[i];
        rhs += m_blocks[i].transpose() * z_blocks[i];
    }

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(normal);
    const double max_eig = es.eigenvalues().maxCoeff();
    if (max_eig <= 0.0 || es.eigenvalues().minCoeff() <= 1e-12 * max_eig)
        throw RankError("normal matrix is rank deficient");

    const Eigen::Vector2d theta = normal.ldlt().solve(rhs);
    return {theta[0], theta[1]};
}

void regression_blocks(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& xdot, const Eigen::VectorXd& ydot,
                       std::vector<Eigen::Matrix2d>& m_blocks,
                       std::vector<Eigen::Vector2d>& z_blocks) {
    const auto n = x.size();
    if (n == 0) throw SizeError("no regression points");
    if (y.size() != n || xdot.size() != n || ydot.size() != n)
        throw SizeError("regression arrays must share one length");
    m_blocks.resize(static_cast<std::size_t>(n));
    z_blocks.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
        m(0, 0) = y[i];
        m(1, 1) = x[i];
        m_blocks[static_cast<std::size_t>(i)] = m;
        z_blocks[static_cast<std::size_t>(i)] = Eigen::Vector2d(xdot[i], ydot[i]);
    }
}

double estimate_a_deterministic(const Eigen::VectorXd& y, const Eigen::VectorXd& xdot) {
    if (y.size() == 0) throw SizeError("no regression points");
    if (xdot.size() != y.size()) throw SizeError("regression arrays must share one length");
    const double denom = y.squaredNorm();
    if (denom == 0.0) throw DegenerateSampleError("regressor is identically zero");
    return y.dot(xdot) / denom;
}

double estimate_a_uncertain(const RegressionData& data) {
    data.validate();
    double num = 0.0;
    double denom = 0.0;
    for (Eigen::Index i = 0; i < data.count(); ++i) {
        num += data.y_mean[i] * data.xdot[i];
        denom += data.y_mean[i] * data.y_mean[i] + data.y_var[i];
    }
    if (denom == 0.0) throw DegenerateSampleError("latent factor has zero mass");
    return num / denom;
}

ADistribution sample_a_distribution(const RegressionData& data, std::size_t n_samples,
                                    std::uint64_t seed) {
    data.validate();
    if (n_samples < 100) throw SizeError("need at least 100 samples of a");

    const int n = data.count();
    Eigen::VectorXd sd(n);
    for (int i = 0; i < n; ++i) sd[i] = std::sqrt(data.y_var[i]);

    ADistribution out;
    out.samples.resize(static_cast<Eigen::Index>(n_samples));
    parallel_for(n_samples, [&](std::size_t s) {
        RngStream rng(seed, s);
        double num = 0.0;
        double denom = 0.0;
        for (int i = 0; i < n; ++i) {
            const double y = data.y_mean[i] + sd[i] * rng.normal();
            num += y * data.xdot[i];
            denom += y * y;
        }
        out.samples[static_cast<Eigen::Index>(s)] = num / denom;
    });

    // All-zero variances collapse every draw onto the deterministic estimate;
    // report that point mass instead of tripping the spread checks.
    if (out.samples.maxCoeff() == out.samples.minCoeff()) {
        out.summary.mean = out.samples[0];
        out.summary.variance = 0.0;
        out.summary.skewness = 0.0;
        out.summary.kurtosis = 0.0;
        out.summary.count = n_samples;
    } else {
        out.summary = summary_stats(
            std::span<const double>(out.samples.data(), out.samples.size()));
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

void check_square(const Eigen::MatrixXd& m, const char* what) {
    if (m.rows() != m.cols()) throw SizeError(std::string(what) + " grid must be square");
    if (m.rows() < 3) throw SizeError(std::string(what) + " grid needs at least 3 points");
}

// Periodic central differences along rows (x) and columns (y).
void central_diff(const Eigen::MatrixXd& m, double dx_space, Eigen::MatrixXd& d_dx,
                  Eigen::MatrixXd& d_dy) {
    const int n = static_cast<int>(m.rows());
    const double inv2h = 1.0 / (2.0 * dx_space);
    d_dx.resize(n, n);
    d_dy.resize(n, n);
    for (int i = 0; i < n; ++i) {
        const int ip = (i + 1) % n;
        const int im = (i + n - 1) % n;
        for (int j = 0; j < n; ++j) {
            const int jp = (j + 1) % n;
            const int jm = (j + n - 1) % n;
            d_dx(i, j) = (m(ip, j) - m(im, j)) * inv2h;
            d_dy(i, j) = (m(i, jp) - m(i, jm)) * inv2h;
        }
    }
}

}  // namespace

OwField ow_from_derivatives(const Eigen::MatrixXd& ux, const Eigen::MatrixXd& uy,
                            const Eigen::MatrixXd& vx, const Eigen::MatrixXd& vy,
                            double dx_space) {
    check_square(ux, "derivative");
    if (uy.rows() != ux.rows() || vx.rows() != ux.rows() || vy.rows() != ux.rows() ||
        uy.cols() != ux.cols() || vx.cols() != ux.cols() || vy.cols() != ux.cols())
        throw GridMismatchError("derivative grids must share one shape");
    if (dx_space <= 0.0) throw DomainError("grid spacing must be positive");

    OwField f;
    f.n = static_cast<int>(ux.rows());
    f.dx_space = dx_space;
    f.s_n = ux - vy;
    f.s_s = vx + uy;
    f.omega = vx - uy;
    f.ow = f.s_n.array().square() + f.s_s.array().square() - f.omega.array().square();
    return f;
}

OwField ow_field(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v, double dx_space) {
    check_square(u, "velocity");
    if (v.rows() != u.rows() || v.cols() != u.cols())
        throw GridMismatchError("velocity grids must share one shape");
    if (dx_space <= 0.0) throw DomainError("grid spacing must be positive");

    Eigen::MatrixXd ux, uy, vx, vy;
    central_diff(u, dx_space, ux, uy);
    central_diff(v, dx_space, vx, vy);
    return ow_from_derivatives(ux, uy, vx, vy, dx_space);
}

OwDecomposition expected_ow(const std::vector<VelocityGrids>& samples) {
    if (samples.size() < 2) throw SizeError("need at least 2 flow samples");
    const int n = static_cast<int>(samples[0].u.rows());
    const double h = samples[0].dx;
    check_square(samples[0].u, "velocity");

    Eigen::MatrixXd sum_u = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd sum_v = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd sum_a = Eigen::MatrixXd::Zero(n, n);   // u_x
    Eigen::MatrixXd sum_b = Eigen::MatrixXd::Zero(n, n);   // v_y
    Eigen::MatrixXd sum_c = Eigen::MatrixXd::Zero(n, n);   // v_x
    Eigen::MatrixXd sum_d = Eigen::MatrixXd::Zero(n, n);   // u_y
    Eigen::MatrixXd sum_a2 = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd sum_b2 = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd sum_ab = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd sum_cd = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd sum_ow = Eigen::MatrixXd::Zero(n, n);

    Eigen::MatrixXd ux, uy, vx, vy;
    for (const auto& s : samples) {
        if (s.u.rows() != n || s.u.cols() != n || s.v.rows() != n || s.v.cols() != n)
            throw GridMismatchError("flow samples must share one grid");
        if (std::abs(s.dx - h) > 1e-12) throw GridMismatchError("flow samples must share spacing");
        central_diff(s.u, h, ux, uy);
        central_diff(s.v, h, vx, vy);
        sum_u += s.u;
        sum_v += s.v;
        sum_a += ux;
        sum_b += vy;
        sum_c += vx;
        sum_d += uy;
        sum_a2 += ux.cwiseProduct(ux);
        sum_b2 += vy.cwiseProduct(vy);
        sum_ab += ux.cwiseProduct(vy);
        sum_cd += vx.cwiseProduct(uy);
        sum_ow += ((ux - vy).array().square() + 4.0 * (vx.array() * uy.array())).matrix();
    }

    const double inv_n = 1.0 / static_cast<double>(samples.size());
    const Eigen::MatrixXd mean_a = sum_a * inv_n;
    const Eigen::MatrixXd mean_b = sum_b * inv_n;
    const Eigen::MatrixXd mean_c = sum_c * inv_n;
    const Eigen::MatrixXd mean_d = sum_d * inv_n;

    OwDecomposition out;
    out.mean_ow = sum_ow * inv_n;
    out.ow_of_mean = ow_field(sum_u * inv_n, sum_v * inv_n, h).ow;

    // var(u_x) - 2 cov(u_x, v_y) + var(v_y) + 4 cov(v_x, u_y), population form
    const Eigen::MatrixXd correction =
        (sum_a2 * inv_n - mean_a.cwiseProduct(mean_a)) -
        2.0 * (sum_ab * inv_n - mean_a.cwiseProduct(mean_b)) +
        (sum_b2 * inv_n - mean_b.cwiseProduct(mean_b)) +
        4.0 * (sum_cd * inv_n - mean_c.cwiseProduct(mean_d));

    out.max_residual =
        (out.mean_ow - out.ow_of_mean - correction).array().abs().maxCoeff();
    return out;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd PosteriorFlowSamples::eddy_probability(double threshold) const {
    if (ow.empty()) throw SizeError("no OW samples");
    const auto n = ow[0].rows();
    Eigen::MatrixXd prob = Eigen::MatrixXd::Zero(n, n);
    for (const auto& field : ow)
        prob += (field.array() < threshold).cast<double>().matrix();
    return prob / static_cast<double>(ow.size());
}

PosteriorFlowSamples sample_posterior_flows(const FilterTrajectory& filter, int step,
                                            std::size_t n_samples, int grid_n,
                                            std::uint64_t seed) {
    if (step < 0 || step >= filter.stored_points())
        throw SizeError("filter step out of range");
    if (n_samples < 2) throw SizeError("need at least 2 posterior samples");
    if (grid_n < 3) throw SizeError("grid needs at least 3 points");

    const FlowModelConfig& cfg = filter.config;
    const Eigen::VectorXcd& mu = filter.mean[static_cast<std::size_t>(step)];
    const Eigen::MatrixXcd& r = filter.cov[static_cast<std::size_t>(step)];
    const int q = static_cast<int>(cfg.free_modes.size());

    // Covariance C and pseudo-covariance P of the free-mode fluctuations; the
    // mirror column index turns Hermitian entries into plain products.
    Eigen::MatrixXcd c(q, q), p(q, q);
    for (int i = 0; i < q; ++i) {
        const int fi = cfg.free_modes[static_cast<std::size_t>(i)];
        for (int j = 0; j < q; ++j) {
            const int fj = cfg.free_modes[static_cast<std::size_t>(j)];
            c(i, j) = r(fi, fj);
            p(i, j) = r(fi, cfg.conj_index[static_cast<std::size_t>(fj)]);
        }
    }

    // Real embedding z = x + iy: stack (x, y) with cross blocks from C and P.
    Eigen::MatrixXd s(2 * q, 2 * q);
    const Eigen::MatrixXd sxx = 0.5 * (c.real() + p.real());
    const Eigen::MatrixXd syy = 0.5 * (c.real() - p.real());
    const Eigen::MatrixXd syx = 0.5 * (c.imag() + p.imag());
    s.topLeftCorner(q, q) = sxx;
    s.bottomRightCorner(q, q) = syy;
    s.bottomLeftCorner(q, q) = syx;
    s.topRightCorner(q, q) = syx.transpose();
    s = 0.5 * (s + s.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    if (es.info() != Eigen::Success) throw SingularMatrixError("embedding eigensolve failed");
    const double scale = std::max(1.0, es.eigenvalues().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-8 * scale)
        throw InstabilityError("posterior covariance is not PSD at the requested step");
    Eigen::VectorXd evals = es.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXd factor = es.eigenvectors() * evals.cwiseSqrt().asDiagonal();

    const int m = static_cast<int>(cfg.modes.size());
    PosteriorFlowSamples out;
    out.coefficients.resize(static_cast<Eigen::Index>(n_samples), m);
    out.flows.resize(n_samples);
    out.ow.resize(n_samples);

    parallel_for(n_samples, [&](std::size_t si) {
        RngStream rng(seed, si);
        Eigen::VectorXd w(2 * q);
        for (int i = 0; i < 2 * q; ++i) w[i] = rng.normal();
        const Eigen::VectorXd xy = factor * w;

        Eigen::VectorXcd coeffs(m);
        for (int j = 0; j < q; ++j) {
            const int fj = cfg.free_modes[static_cast<std::size_t>(j)];
            const std::complex<double> z(xy[j], xy[q + j]);
            coeffs[fj] = mu[fj] + z;
            coeffs[cfg.conj_index[static_cast<std::size_t>(fj)]] = std::conj(coeffs[fj]);
        }
        out.coefficients.row(static_cast<Eigen::Index>(si)) = coeffs.transpose();

        out.flows[si] = velocity_on_grid(cfg, coeffs, grid_n);
        out.ow[si] = ow_field(out.flows[si].u, out.flows[si].v, out.flows[si].dx).ow;
    });

    const double inv_n = 1.0 / static_cast<double>(n_samples);
    out.ow_mean = Eigen::MatrixXd::Zero(grid_n, grid_n);
    for (const auto& field : out.ow) out.ow_mean += field;
    out.ow_mean *= inv_n;
    out.ow_variance = Eigen::MatrixXd::Zero(grid_n, grid_n);
    for (const auto& field : out.ow)
        out.ow_variance += (field - out.ow_mean).cwiseProduct(field - out.ow_mean);
    out.ow_variance *= inv_n;
    return out;
}

}  // namespace uqkit

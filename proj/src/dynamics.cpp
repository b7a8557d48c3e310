#include "uqkit/dynamics.hpp"

#include <cmath>

namespace uqkit {

TimeGrid::TimeGrid(double dt_in, int steps_in) : dt(dt_in), steps(steps_in) {
    if (!(dt > 0.0)) throw DomainError("time step must be positive");
    if (steps < 1) throw SizeError("time grid needs at least 1 step");
}

EnsembleStats ensemble_stats(const Ensemble& ensemble) {
    if (ensemble.size() < 2)
        throw SizeError("ensemble_stats needs at least 2 members for a variance");
    const int points = ensemble.grid.points();
    const int dim = ensemble.dim();
    for (const auto& m : ensemble.members)
        if (m.rows() != points || m.cols() != dim)
            throw SizeError("ensemble_stats: inconsistent member shapes");

    const double n = static_cast<double>(ensemble.size());
    EnsembleStats out;
    out.mean = Eigen::MatrixXd::Zero(points, dim);
    for (const auto& m : ensemble.members) out.mean += m;
    out.mean /= n;
    out.variance = Eigen::MatrixXd::Zero(points, dim);
    for (const auto& m : ensemble.members) {
        const Eigen::MatrixXd d = m - out.mean;
        out.variance += d.cwiseProduct(d);
    }
    out.variance /= n;
    return out;
}

// ---------------------------------------------------------------------------

double linear_analytic(double a, double f, double x0, double t) {
    if (!(a > 0.0)) throw DomainError("linear model requires damping a > 0");
    const double decay = std::exp(-a * t);
    return x0 * decay + (1.0 - decay) * f / a;
}

Ensemble simulate_linear_ensemble(double a, double f, const GaussianDist& init,
                                  const TimeGrid& grid, std::size_t n_member,
                                  std::uint64_t seed) {
    if (init.dim() != 1) throw SizeError("linear ensemble needs a 1-D initial distribution");
    if (n_member == 0) throw SizeError("ensemble needs at least 1 member");
    const double sd = std::sqrt(init.cov(0, 0));

    Ensemble out{grid, {}};
    out.members.resize(n_member);
    parallel_for(n_member, [&](std::size_t i) {
        RngStream rng(seed, i);
        const double x0 = init.mean(0) + sd * rng.normal();
        Eigen::MatrixXd traj(grid.points(), 1);
        for (int s = 0; s <= grid.steps; ++s) traj(s, 0) = linear_analytic(a, f, x0, grid.t(s));
        out.members[i] = std::move(traj);
    });
    return out;
}

// ---------------------------------------------------------------------------

namespace {

template <typename State, typename Drift>
State rk4_step(const Drift& drift, const State& x, double dt) {
    const State k1 = drift(x);
    const State k2 = drift(x + 0.5 * dt * k1);
    const State k3 = drift(x + 0.5 * dt * k2);
    const State k4 = drift(x + dt * k3);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::Vector3d l63_drift(const L63Params& p, const Eigen::Vector3d& x) {
    return {p.sigma * (x(1) - x(0)), x(0) * (p.rho - x(2)) - x(1),
            x(0) * x(1) - p.beta * x(2)};
}

}  // namespace

Eigen::MatrixXd simulate_l63(const L63Params& params, const Eigen::Vector3d& x0,
                             const TimeGrid& grid) {
    auto drift = [&](const Eigen::Vector3d& x) { return l63_drift(params, x); };
    Eigen::MatrixXd traj(grid.points(), 3);
    Eigen::Vector3d x = x0;
    traj.row(0) = x.transpose();
    for (int s = 1; s <= grid.steps; ++s) {
        x = rk4_step(drift, x, grid.dt);
        if (!x.allFinite()) throw BlowUpError("Lorenz 63 trajectory became non-finite");
        traj.row(s) = x.transpose();
    }
    return traj;
}

Ensemble simulate_l63_ensemble(const L63Params& params, const GaussianDist& init,
                               const TimeGrid& grid, std::size_t n_member,
                               std::uint64_t seed) {
    if (init.dim() != 3) throw SizeError("Lorenz 63 ensemble needs a 3-D initial distribution");
    if (n_member == 0) throw SizeError("ensemble needs at least 1 member");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(init.cov);
    const Eigen::MatrixXd factor =
        es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

    Ensemble out{grid, {}};
    out.members.resize(n_member);
    parallel_for(n_member, [&](std::size_t i) {
        RngStream rng(seed, i);
        Eigen::Vector3d z;
        for (int j = 0; j < 3; ++j) z(j) = rng.normal();
        const Eigen::Vector3d x0 = init.mean + factor * z;
        out.members[i] = simulate_l63(params, x0, grid);
    });
    return out;
}

Ensemble simulate_quadratic_ensemble(double b, const GaussianDist& init,
                                     const TimeGrid& grid, std::size_t n_member,
                                     std::uint64_t seed) {
    if (init.dim() != 1) throw SizeError("quadratic ensemble needs a 1-D initial distribution");
    if (n_member == 0) throw SizeError("ensemble needs at least 1 member");
    const double sd = std::sqrt(init.cov(0, 0));
    auto drift = [b](double x) { return b * x * x; };

    Ensemble out{grid, {}};
    out.members.resize(n_member);
    parallel_for(n_member, [&](std::size_t i) {
        RngStream rng(seed, i);
        double x = init.mean(0) + sd * rng.normal();
        Eigen::MatrixXd traj(grid.points(), 1);
        traj(0, 0) = x;
        for (int s = 1; s <= grid.steps; ++s) {
            x = rk4_step(drift, x, grid.dt);
            if (!std::isfinite(x)) throw BlowUpError("quadratic trajectory became non-finite");
            traj(s, 0) = x;
        }
        out.members[i] = std::move(traj);
    });
    return out;
}

// ---------------------------------------------------------------------------

std::complex<double> OuParams::equilibrium_mean() const {
    return f / std::complex<double>(d, -omega);
}

void OuParams::validate() const {
    if (!(d > 0.0)) throw DomainError("OU mode requires damping d > 0");
    if (sigma < 0.0) throw DomainError("OU mode requires sigma >= 0");
}

Eigen::VectorXcd simulate_ou(const OuParams& params, std::complex<double> u0,
                             const TimeGrid& grid, RngStream& rng) {
    params.validate();
    const std::complex<double> gamma(-params.d, params.omega);
    const double noise_scale = params.sigma * std::sqrt(grid.dt);
    Eigen::VectorXcd path(grid.points());
    std::complex<double> u = u0;
    path(0) = u;
    for (int s = 1; s <= grid.steps; ++s) {
        u += (gamma * u + params.f) * grid.dt + noise_scale * rng.complex_normal();
        if (!std::isfinite(u.real()) || !std::isfinite(u.imag()))
            throw BlowUpError("OU path became non-finite");
        path(s) = u;
    }
    return path;
}

Eigen::VectorXcd simulate_ou(const OuParams& params, std::complex<double> u0,
                             const TimeGrid& grid, std::uint64_t seed) {
    RngStream rng(seed);
    return simulate_ou(params, u0, grid, rng);
}

// ---------------------------------------------------------------------------

Eigen::VectorXd simulate_cubic(const CubicParams& params, double x0, const TimeGrid& grid,
                               std::uint64_t seed) {
    RngStream rng(seed);
    const double sdt = std::sqrt(grid.dt);
    Eigen::VectorXd path(grid.points());
    double x = x0;
    path(0) = x;
    for (int s = 1; s <= grid.steps; ++s) {
        const double drift =
            params.f + params.a * x + params.b * x * x - params.c * x * x * x;
        const double mult = (params.big_a - params.big_b * x) * sdt * rng.normal();
        const double add = params.sigma * sdt * rng.normal();
        x += drift * grid.dt + mult + add;
        if (!std::isfinite(x) || std::abs(x) > 1e6)
            throw BlowUpError("cubic model trajectory blew up; reduce dt");
        path(s) = x;
    }
    return path;
}

}  // namespace uqkit

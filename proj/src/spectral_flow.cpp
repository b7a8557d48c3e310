#include "uqkit/spectral_flow.hpp"

#include <cmath>
#include <map>

namespace uqkit {

namespace {

bool is_canonical(const Eigen::Vector2i& k) {
    return k(0) > 0 || (k(0) == 0 && k(1) > 0);
}

Eigen::Vector2d unit_perp(const Eigen::Vector2i& k) {
    const double norm = std::sqrt(static_cast<double>(k(0) * k(0) + k(1) * k(1)));
    return Eigen::Vector2d(-k(1), k(0)) / norm;
}

}  // namespace

void FlowModelConfig::finalize() {
    const int n = n_modes();
    if (n == 0) throw SizeError("flow model needs at least one mode");
    if (sigma_x < 0.0) throw DomainError("tracer noise sigma_x must be non-negative");

    std::map<std::pair<int, int>, int> lookup;
    for (int i = 0; i < n; ++i) {
        const auto key = std::make_pair(modes[i].k(0), modes[i].k(1));
        if (modes[i].k(0) == 0 && modes[i].k(1) == 0)
            throw DomainError("flow model cannot contain the zero wavenumber");
        if (!lookup.emplace(key, i).second)
            throw DomainError("flow model contains a duplicate wavenumber");
        modes[i].params.validate();
    }

    conj_index.assign(n, -1);
    free_modes.clear();
    for (int i = 0; i < n; ++i) {
        const auto key = std::make_pair(-modes[i].k(0), -modes[i].k(1));
        const auto it = lookup.find(key);
        if (it == lookup.end())
            throw DomainError("flow model modes are not closed under k -> -k");
        conj_index[i] = it->second;
        if (is_canonical(modes[i].k)) free_modes.push_back(i);
    }

    for (int i : free_modes) {
        const FlowMode& a = modes[i];
        const FlowMode& b = modes[conj_index[i]];
        if (a.params.d != b.params.d || a.params.sigma != b.params.sigma ||
            a.params.omega != -b.params.omega || a.params.f != std::conj(b.params.f))
            throw DomainError("conjugate modes violate the parameter reality condition");
        const Eigen::Vector2d r = unit_perp(a.k);
        if ((a.r - r).cwiseAbs().maxCoeff() > 1e-12 || (b.r - r).cwiseAbs().maxCoeff() > 1e-12)
            throw DomainError("mode eigenvectors must be the pair's unit perpendicular");
    }
}

FlowModelConfig FlowModelConfig::square_lattice(int kmax, double d, double omega, double sigma,
                                                double sigma_x, std::complex<double> f) {
    if (kmax < 1) throw DomainError("square_lattice needs kmax >= 1");
    FlowModelConfig config;
    config.sigma_x = sigma_x;
    for (int k1 = -kmax; k1 <= kmax; ++k1) {
        for (int k2 = -kmax; k2 <= kmax; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            const Eigen::Vector2i k(k1, k2);
            FlowMode mode;
            mode.k = k;
            mode.r = unit_perp(is_canonical(k) ? k : Eigen::Vector2i(-k1, -k2));
            mode.params.d = d;
            mode.params.sigma = sigma;
            mode.params.omega = is_canonical(k) ? omega : -omega;
            mode.params.f = is_canonical(k) ? f : std::conj(f);
            config.modes.push_back(mode);
        }
    }
    config.finalize();
    return config;
}

SpectralFlowSeries simulate_flow(const FlowModelConfig& config, const TimeGrid& grid,
                                 std::uint64_t seed) {
    if (config.conj_index.empty())
        throw ConfigError("simulate_flow: call finalize() on the flow config first");
    SpectralFlowSeries series{config, grid, {}};
    series.coeffs.resize(grid.points(), config.n_modes());

    for (std::size_t p = 0; p < config.free_modes.size(); ++p) {
        const int i = static_cast<int>(config.free_modes[p]);
        const OuParams& params = config.modes[i].params;
        RngStream rng(seed, p);
        const Eigen::VectorXcd path = simulate_ou(params, params.equilibrium_mean(), grid, rng);
        series.coeffs.col(i) = path;
        series.coeffs.col(config.conj_index[i]) = path.conjugate();
    }
    return series;
}

double conjugate_symmetry_error(const FlowModelConfig& config, const Eigen::VectorXcd& coeffs) {
    if (coeffs.size() != config.n_modes())
        throw SizeError("coefficient vector does not match the mode list");
    double worst = 0.0;
    for (int i = 0; i < config.n_modes(); ++i)
        worst = std::max(worst,
                         std::abs(coeffs(i) - std::conj(coeffs(config.conj_index[i]))));
    return worst;
}

Eigen::Vector2d eval_velocity(const FlowModelConfig& config, const Eigen::VectorXcd& coeffs,
                              const Eigen::Vector2d& position) {
    if (coeffs.size() != config.n_modes())
        throw SizeError("coefficient vector does not match the mode list");
    Eigen::Vector2cd acc = Eigen::Vector2cd::Zero();
    for (int i = 0; i < config.n_modes(); ++i) {
        const FlowMode& mode = config.modes[i];
        const double phase = mode.k(0) * position(0) + mode.k(1) * position(1);
        const std::complex<double> e(std::cos(phase), std::sin(phase));
        acc += coeffs(i) * e * mode.r;
    }
    const double imag = std::max(std::abs(acc(0).imag()), std::abs(acc(1).imag()));
    if (imag > 1e-8)
        throw SymmetryError("velocity has a non-real residue; coefficients are not conjugate-symmetric");
    return {acc(0).real(), acc(1).real()};
}

Eigen::MatrixXd eval_velocity(const SpectralFlowSeries& series, int step,
                              const Eigen::MatrixXd& positions) {
    if (step < 0 || step >= series.coeffs.rows())
        throw SizeError("eval_velocity: step outside the stored series");
    if (positions.cols() != 2) throw SizeError("positions must be (n x 2)");
    Eigen::MatrixXd out(positions.rows(), 2);
    const Eigen::VectorXcd coeffs = series.coeffs.row(step);
    for (int i = 0; i < positions.rows(); ++i)
        out.row(i) = eval_velocity(series.config, coeffs, positions.row(i).transpose()).transpose();
    return out;
}

VelocityGrids velocity_on_grid(const FlowModelConfig& config, const Eigen::VectorXcd& coeffs,
                               int n) {
    if (n < 4) throw SizeError("velocity grid needs at least 4 points per side");
    VelocityGrids out;
    out.dx = two_pi / n;
    out.u.resize(n, n);
    out.v.resize(n, n);
    // Separable phases keep the cost at O(n^2) per mode.
    for (int i = 0; i < n; ++i) {
        const double x = -pi + i * out.dx;
        for (int j = 0; j < n; ++j) {
            const double y = -pi + j * out.dx;
            Eigen::Vector2cd acc = Eigen::Vector2cd::Zero();
            for (int m = 0; m < config.n_modes(); ++m) {
                const FlowMode& mode = config.modes[m];
                const double phase = mode.k(0) * x + mode.k(1) * y;
                acc += coeffs(m) * std::complex<double>(std::cos(phase), std::sin(phase)) *
                       mode.r;
            }
            if (std::max(std::abs(acc(0).imag()), std::abs(acc(1).imag())) > 1e-8)
                throw SymmetryError("velocity grid has a non-real residue");
            out.u(i, j) = acc(0).real();
            out.v(i, j) = acc(1).real();
        }
    }
    return out;
}

VelocityGradientGrids velocity_gradients_on_grid(const FlowModelConfig& config,
                                                 const Eigen::VectorXcd& coeffs, int n) {
    if (n < 4) throw SizeError("gradient grid needs at least 4 points per side");
    VelocityGradientGrids out;
    out.dx = two_pi / n;
    out.ux.resize(n, n);
    out.uy.resize(n, n);
    out.vx.resize(n, n);
    out.vy.resize(n, n);
    for (int i = 0; i < n; ++i) {
        const double x = -pi + i * out.dx;
        for (int j = 0; j < n; ++j) {
            const double y = -pi + j * out.dx;
            Eigen::Matrix2cd acc = Eigen::Matrix2cd::Zero();
            for (int m = 0; m < config.n_modes(); ++m) {
                const FlowMode& mode = config.modes[m];
                const double phase = mode.k(0) * x + mode.k(1) * y;
                const std::complex<double> e(std::cos(phase), std::sin(phase));
                const std::complex<double> base = coeffs(m) * e * std::complex<double>(0.0, 1.0);
                // d/dx and d/dy bring down i*k1 and i*k2.
                acc.col(0) += base * static_cast<double>(mode.k(0)) * mode.r;
                acc.col(1) += base * static_cast<double>(mode.k(1)) * mode.r;
            }
            if (acc.imag().cwiseAbs().maxCoeff() > 1e-8)
                throw SymmetryError("velocity gradient grid has a non-real residue");
            out.ux(i, j) = acc(0, 0).real();
            out.uy(i, j) = acc(0, 1).real();
            out.vx(i, j) = acc(1, 0).real();
            out.vy(i, j) = acc(1, 1).real();
        }
    }
    return out;
}

}  // namespace uqkit

#include "uqkit/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "uqkit/info.hpp"

namespace uqkit {

namespace {

struct SeriesStats {
    double mean = 0.0;
    double var = 0.0;  // population
};

SeriesStats mean_var(std::span<const double> series) {
    SeriesStats s;
    const auto n = series.size();
    for (double x : series) {
        if (!std::isfinite(x)) throw DomainError("series must be finite");
        s.mean += x;
    }
    s.mean /= static_cast<double>(n);
    for (double x : series) s.var += (x - s.mean) * (x - s.mean);
    s.var /= static_cast<double>(n);
    return s;
}

// Lag-j autocorrelation normalized by the full-series variance.
double acf_lag(std::span<const double> series, double mean, double c0, int lag) {
    const auto n = static_cast<int>(series.size());
    double sum = 0.0;
    for (int t = 0; t + lag < n; ++t) sum += (series[t] - mean) * (series[t + lag] - mean);
    return (sum / static_cast<double>(n - lag)) / c0;
}

}  // namespace

Eigen::VectorXd acf(std::span<const double> series, int max_lag) {
    const auto n = static_cast<int>(series.size());
    if (max_lag < 0) throw DomainError("max_lag must be nonnegative");
    if (n < 2 || max_lag >= n) throw SizeError("series too short for requested lags");

    const SeriesStats s = mean_var(series);
    if (s.var == 0.0) throw DegenerateSampleError("series has zero variance");

    Eigen::VectorXd out(max_lag + 1);
    out[0] = 1.0;
    for (int j = 1; j <= max_lag; ++j) out[j] = acf_lag(series, s.mean, s.var, j);
    return out;
}

DecorrelationTime decorrelation_time(const Eigen::VectorXd& acf_values, double dt,
                                     double threshold) {
    if (acf_values.size() < 2) throw SizeError("need at least two ACF values");
    if (dt <= 0.0) throw DomainError("dt must be positive");
    if (threshold <= 0.0 || threshold >= 1.0) throw DomainError("threshold must be in (0, 1)");

    int cut = -1;
    for (int j = 1; j < acf_values.size(); ++j) {
        if (std::abs(acf_values[j]) < threshold) {
            cut = j;
            break;
        }
    }

    DecorrelationTime out;
    out.decayed = cut >= 0;
    out.truncation_lag = out.decayed ? cut : static_cast<int>(acf_values.size()) - 1;

    double integral = 0.0;
    for (int j = 1; j <= out.truncation_lag; ++j)
        integral += 0.5 * (acf_values[j - 1] + acf_values[j]) * dt;

    // The truncated integral of an exponential ACF is tau * (1 - tail), so
    // dividing by (1 - tail) recovers tau; skip when the tail is not a decay.
    const double tail = acf_values[out.truncation_lag];
    out.tau = (out.decayed && tail > 0.0) ? integral / (1.0 - tail) : integral;
    return out;
}

CalibrationResult calibrate_ou(std::span<const double> series, double dt, int max_lag) {
    const auto n = static_cast<int>(series.size());
    if (n < 40) throw SizeError("series too short to calibrate");
    if (dt <= 0.0) throw DomainError("dt must be positive");

    const SeriesStats s = mean_var(series);
    if (s.var == 0.0) throw DegenerateSampleError("series has zero variance");

    const auto half = static_cast<std::size_t>(n / 2);
    const SeriesStats first = mean_var(series.subspan(0, half));
    const SeriesStats second = mean_var(series.subspan(half));
    const double spread = std::sqrt(first.var + second.var);
    if (std::abs(first.mean - second.mean) >= 0.5 * spread)
        throw StationarityError("half-series means disagree beyond half the spread");

    // Walk lags until the ACF drops below the threshold so long series do not
    // pay for correlations they no longer have.
    const double threshold = 0.05;
    const int cap = (max_lag >= 0) ? std::min(max_lag, n - 1) : std::max(1, n / 10);
    std::vector<double> rho{1.0};
    for (int j = 1; j <= cap; ++j) {
        rho.push_back(acf_lag(series, s.mean, s.var, j));
        if (std::abs(rho.back()) < threshold) break;
    }
    const Eigen::VectorXd rho_vec =
        Eigen::Map<const Eigen::VectorXd>(rho.data(), static_cast<Eigen::Index>(rho.size()));
    const DecorrelationTime dec = decorrelation_time(rho_vec, dt, threshold);
    if (dec.tau <= 0.0) throw CalibrationError("nonpositive decorrelation time");

    CalibrationResult out;
    out.mu = s.mean;
    out.r = s.var;
    out.tau = dec.tau;
    out.acf_decayed = dec.decayed;
    out.a = 1.0 / dec.tau;
    out.f = out.mu * out.a;
    out.sigma = std::sqrt(2.0 * out.a * out.r);
    return out;
}

CalibrationResult stats_to_ou(double mu, double r, double tau) {
    if (tau <= 0.0) throw CalibrationError("nonpositive decorrelation time");
    if (r <= 0.0) throw DomainError("equilibrium variance must be positive");
    CalibrationResult out;
    out.mu = mu;
    out.r = r;
    out.tau = tau;
    out.a = 1.0 / tau;
    out.f = mu * out.a;
    out.sigma = std::sqrt(2.0 * out.a * r);
    return out;
}

Eigen::VectorXd simulate_ou_real(double a, double f, double sigma, double x0,
                                 const TimeGrid& grid, std::uint64_t seed) {
    if (a <= 0.0) throw DomainError("damping must be positive");
    if (sigma < 0.0) throw DomainError("noise amplitude must be nonnegative");

    RngStream rng(seed);
    const double root_dt = std::sqrt(grid.dt);
    Eigen::VectorXd x(grid.points());
    x[0] = x0;
    for (int s = 1; s < grid.points(); ++s)
        x[s] = x[s - 1] + (f - a * x[s - 1]) * grid.dt + sigma * root_dt * rng.normal();
    return x;
}

SurrogateReport validate_surrogate(std::span<const double> truth,
                                   const CalibrationResult& result, double dt,
                                   std::uint64_t seed) {
    const auto n = static_cast<int>(truth.size());
    if (n < 100) throw SizeError("series too short to validate against");
    if (dt <= 0.0) throw DomainError("dt must be positive");
    if (result.tau <= 0.0) throw CalibrationError("nonpositive decorrelation time");

    const TimeGrid grid(dt, n - 1);
    const Eigen::VectorXd surr =
        simulate_ou_real(result.a, result.f, result.sigma, result.mu, grid, seed);
    const std::span<const double> surr_span(surr.data(), static_cast<std::size_t>(surr.size()));

    const SeriesStats ts = mean_var(truth);
    const SeriesStats ss = mean_var(surr_span);
    if (ts.var == 0.0) throw DegenerateSampleError("truth series has zero variance");

    SurrogateReport rep;
    rep.params = result;
    rep.tau = result.tau;
    rep.mean_err = std::abs(ss.mean - ts.mean) / std::max(std::abs(ts.mean), std::sqrt(ts.var));
    rep.var_err = std::abs(ss.var - ts.var) / ts.var;

    // ACF gap over three decorrelation times, capped by the short-series rule.
    int lag = static_cast<int>(std::ceil(3.0 * result.tau / dt));
    lag = std::clamp(lag, 1, std::max(1, (n - 1) / 10));
    rep.acf_linf = (acf(truth, lag) - acf(surr_span, lag)).cwiseAbs().maxCoeff();

    // Relative entropy of the surrogate density from the truth density via
    // kernel estimates on a common grid; this direction charges the surrogate
    // for mass it puts where the truth has little (the saddle of a bimodal
    // density), which a moment-matched Gaussian cannot avoid. Full series are
    // used so the plug-in bandwidth stays sharp enough to resolve well gaps.
    const auto [t_lo, t_hi] = std::minmax_element(truth.begin(), truth.end());
    const auto [s_lo, s_hi] = std::minmax_element(surr_span.begin(), surr_span.end());
    const double lo = std::min(*t_lo, *s_lo);
    const double hi = std::max(*t_hi, *s_hi);
    const double pad = 0.05 * (hi - lo);
    const int grid_n = 801;
    const double x0 = lo - pad;
    const double dx = (hi - lo + 2.0 * pad) / (grid_n - 1);

    rep.truth_pdf = clip_normalize(estimate_pdf(truth, x0, dx, grid_n));
    rep.surrogate_pdf = clip_normalize(estimate_pdf(surr_span, x0, dx, grid_n));
    rep.kl = relative_entropy_grid(rep.surrogate_pdf, rep.truth_pdf);
    return rep;
}

}  // namespace uqkit

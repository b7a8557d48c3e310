#include "uqkit/info.hpp"

#include <cmath>

namespace uqkit {

double digamma(double x) {
    if (!(x > 0.0)) throw DomainError("digamma requires a positive argument");
    // Recurrence up to x >= 10, then the Bernoulli asymptotic series.
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        1.0 / 12.0 -
        inv2 * (1.0 / 120.0 -
                inv2 * (1.0 / 252.0 -
                        inv2 * (1.0 / 240.0 -
                                inv2 * (1.0 / 132.0 -
                                        inv2 * (691.0 / 32760.0 - inv2 * (1.0 / 12.0))))));
    return acc + std::log(x) - 0.5 * inv - inv2 * series;
}

namespace {

void check_normalized(const GridPdf& pdf, const char* who) {
    const double z = pdf.integral();
    if (std::abs(z - 1.0) > 1e-3)
        throw NormalizationError(std::string(who) + ": density is not normalized on its grid");
}

}  // namespace

double shannon_entropy_grid(const GridPdf& pdf) {
    check_normalized(pdf, "shannon_entropy_grid");
    const int n = pdf.size();
    Eigen::VectorXd integrand(n);
    for (int i = 0; i < n; ++i) {
        const double p = pdf.values(i);
        integrand(i) = p > 0.0 ? -p * std::log(p) : 0.0;  // 0 ln 0 := 0
    }
    return pdf.dx * (integrand.sum() - 0.5 * (integrand(0) + integrand(n - 1)));
}

double shannon_entropy(const GaussianDist& dist) {
    const int m = dist.dim();
    Eigen::LLT<Eigen::MatrixXd> llt(dist.cov);
    if (llt.info() != Eigen::Success)
        throw SingularMatrixError("entropy requires a positive definite covariance");
    double log_det = 0.0;
    for (int i = 0; i < m; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
    return 0.5 * m * (1.0 + std::log(two_pi)) + 0.5 * log_det;
}

double shannon_entropy(const GammaDist& dist) {
    const double k = dist.shape;
    return k + std::log(dist.scale) + std::lgamma(k) + (1.0 - k) * digamma(k);
}

double relative_entropy_grid(const GridPdf& p, const GridPdf& pm) {
    if (!p.same_grid(pm))
        throw GridMismatchError("relative_entropy_grid: densities are on different grids");
    check_normalized(p, "relative_entropy_grid");
    check_normalized(pm, "relative_entropy_grid");
    const int n = p.size();
    Eigen::VectorXd integrand(n);
    for (int i = 0; i < n; ++i) {
        const double a = p.values(i);
        const double b = pm.values(i);
        if (a > 0.0 && b <= 0.0)
            throw DivergenceError(
                "relative_entropy_grid: reference density vanishes where p has mass; "
                "apply clip_normalize to both densities first");
        integrand(i) = a > 0.0 ? a * std::log(a / b) : 0.0;
    }
    return p.dx * (integrand.sum() - 0.5 * (integrand(0) + integrand(n - 1)));
}

double relative_entropy_discrete(std::span<const double> p, std::span<const double> pm) {
    if (p.size() != pm.size() || p.empty())
        throw SizeError("relative_entropy_discrete: probability vectors must match in size");
    double sp = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 0.0 || pm[i] < 0.0)
            throw DomainError("relative_entropy_discrete: probabilities must be non-negative");
        sp += p[i];
        sq += pm[i];
    }
    if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9)
        throw NormalizationError("relative_entropy_discrete: vectors must sum to 1");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0 && pm[i] <= 0.0)
            throw DivergenceError("relative_entropy_discrete: reference has a zero where p > 0");
        if (p[i] > 0.0) acc += p[i] * std::log(p[i] / pm[i]);
    }
    return acc;
}

KlDecomposition relative_entropy(const GaussianDist& p, const GaussianDist& pm) {
    if (p.dim() != pm.dim())
        throw SizeError("relative_entropy: Gaussian dimensions disagree");
    const int m = p.dim();
    Eigen::LLT<Eigen::MatrixXd> llt(pm.cov);
    if (llt.info() != Eigen::Success)
        throw SingularMatrixError("relative_entropy: reference covariance must be positive definite");

    const Eigen::VectorXd dmu = p.mean - pm.mean;
    KlDecomposition out;
    out.signal = 0.5 * dmu.dot(llt.solve(dmu));

    // A = R * RM^{-1}; trace via the solve, determinant via both Cholesky factors.
    const Eigen::MatrixXd a = llt.solve(p.cov).transpose();
    Eigen::LLT<Eigen::MatrixXd> llt_p(p.cov);
    if (llt_p.info() != Eigen::Success)
        throw SingularMatrixError("relative_entropy: covariance must be positive definite");
    double log_det_a = 0.0;
    for (int i = 0; i < m; ++i)
        log_det_a += 2.0 * (std::log(llt_p.matrixL()(i, i)) - std::log(llt.matrixL()(i, i)));
    out.dispersion = 0.5 * (a.trace() - m - log_det_a);
    out.total = out.signal + out.dispersion;
    return out;
}

}  // namespace uqkit

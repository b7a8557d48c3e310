#include "uqkit/bayes.hpp"

#include <cmath>

namespace uqkit {

LinearObsModel::LinearObsModel(Eigen::MatrixXd g_in, Eigen::MatrixXd ro_in)
    : g(std::move(g_in)), ro(std::move(ro_in)) {
    if (g.rows() == 0 || g.cols() == 0) throw SizeError("observation operator is empty");
    if (ro.rows() != g.rows() || ro.cols() != g.rows())
        throw SizeError("observation noise covariance does not match the operator");
    const double scale = std::max(1.0, ro.cwiseAbs().maxCoeff());
    if ((ro - ro.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw SymmetryError("observation noise covariance must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(ro);
    if (llt.info() != Eigen::Success)
        throw SingularMatrixError("observation noise covariance must be positive definite");
}

PosteriorResult gaussian_posterior(const GaussianDist& prior, const LinearObsModel& obs,
                                   const Eigen::VectorXd& v, bool joseph) {
    if (obs.state_dim() != prior.dim())
        throw SizeError("observation operator does not match the prior dimension");
    if (v.size() != obs.obs_dim())
        throw SizeError("observation vector does not match the operator");

    const Eigen::MatrixXd& rf = prior.cov;
    const Eigen::MatrixXd rf_gt = rf * obs.g.transpose();
    const Eigen::MatrixXd innov_cov = obs.g * rf_gt + obs.ro;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(innov_cov);
    if (ldlt.info() != Eigen::Success ||
        (ldlt.vectorD().array() < 1e-14 * innov_cov.cwiseAbs().maxCoeff()).any())
        throw SingularMatrixError("innovation covariance is singular to working precision");

    // K = Rf G^T (G Rf G^T + Ro)^{-1}, via the factorization of the innovation.
    const Eigen::MatrixXd gain = ldlt.solve(rf_gt.transpose()).transpose();
    const Eigen::VectorXd mu_a = prior.mean + gain * (v - obs.g * prior.mean);

    const Eigen::MatrixXd i_kg =
        Eigen::MatrixXd::Identity(prior.dim(), prior.dim()) - gain * obs.g;
    Eigen::MatrixXd r_a;
    if (joseph) {
        r_a = i_kg * rf * i_kg.transpose() + gain * obs.ro * gain.transpose();
    } else {
        r_a = i_kg * rf;
    }
    r_a = 0.5 * (r_a + r_a.transpose()).eval();

    return {GaussianDist(mu_a, r_a), gain};
}

RepeatedObsResult repeated_obs_posterior(double mu_f, std::span<const double> v) {
    const double l = static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) throw DomainError("observations must be finite");
        sum += x;
    }
    return {(mu_f + sum) / (l + 1.0), 1.0 / (l + 1.0)};
}

double dispersion_asymptote(std::size_t l) {
    const double lf = static_cast<double>(l);
    return 0.5 * (-lf / (lf + 1.0) + std::log(lf + 1.0));
}

namespace {

Eigen::MatrixXd dense_inverse(const Eigen::MatrixXd& m, const char* name) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible())
        throw SingularMatrixError(std::string("matrix identity check: ") + name +
                                  " is singular");
    return lu.inverse();
}

}  // namespace

WoodburyCheck woodbury_identity_check(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                      const Eigen::MatrixXd& c, const Eigen::MatrixXd& d,
                                      double tol) {
    const int m = static_cast<int>(a.rows());
    const int l = static_cast<int>(c.rows());
    if (a.cols() != m) throw SizeError("woodbury_identity_check: A must be square");
    if (c.cols() != l) throw SizeError("woodbury_identity_check: C must be square");
    if (b.rows() != m || b.cols() != l || d.rows() != l || d.cols() != m)
        throw SizeError("woodbury_identity_check: B must be m x L and D must be L x m");

    const Eigen::MatrixXd a_inv = dense_inverse(a, "A");
    const Eigen::MatrixXd c_inv = dense_inverse(c, "C");
    const Eigen::MatrixXd lhs = dense_inverse(a + b * c * d, "A + BCD");
    const Eigen::MatrixXd inner = dense_inverse(c_inv + d * a_inv * b, "C^{-1} + D A^{-1} B");
    const Eigen::MatrixXd rhs = a_inv - a_inv * b * inner * d * a_inv;

    WoodburyCheck out;
    out.residual = (lhs - rhs).cwiseAbs().maxCoeff();
    out.ok = out.residual < tol;
    return out;
}

double complement_identity_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& e) {
    const int n = static_cast<int>(a.rows());
    if (a.cols() != n || e.rows() != n || e.cols() != n)
        throw SizeError("complement_identity_residual: A and E must be square and matching");
    const Eigen::MatrixXd ae_inv = dense_inverse(a + e, "A + E");
    const Eigen::MatrixXd e_inv = dense_inverse(e, "E");
    const Eigen::MatrixXd left = (Eigen::MatrixXd::Identity(n, n) - ae_inv * a) * e_inv;
    return (left - ae_inv).cwiseAbs().maxCoeff();
}

}  // namespace uqkit

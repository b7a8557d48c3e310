#pragma once

#include <span>

#include "uqkit/prob_core.hpp"

namespace uqkit {

// Signal/dispersion split of a Gaussian relative entropy.  total is the sum
// of the two parts; signal carries the mean shift, dispersion the covariance
// mismatch, and both are individually non-negative.
struct KlDecomposition {
    double total = 0.0;
    double signal = 0.0;
    double dispersion = 0.0;
};

// Digamma function, accurate to better than 1e-12 relative error for
// arguments in (0, 1e4].
double digamma(double x);

// Differential entropy -integral p ln p of a tabulated density.  The density
// must be normalized on its grid (trapezoidal integral within 1e-3 of 1).
double shannon_entropy_grid(const GridPdf& pdf);

// Closed forms.
double shannon_entropy(const GaussianDist& dist);
double shannon_entropy(const GammaDist& dist);

// Relative entropy integral p ln(p/pm) of two densities on the same grid.
// pm must be strictly positive wherever p is positive; clip_normalize is the
// intended remedy when it is not.
double relative_entropy_grid(const GridPdf& p, const GridPdf& pm);

// Discrete variant for probability vectors on matching supports.
double relative_entropy_discrete(std::span<const double> p, std::span<const double> pm);

// Closed-form Gaussian relative entropy with its signal/dispersion split.
KlDecomposition relative_entropy(const GaussianDist& p, const GaussianDist& pm);

}  // namespace uqkit

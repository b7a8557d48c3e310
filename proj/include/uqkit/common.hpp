#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace uqkit {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad sizes, empty inputs, mismatched lengths.
struct SizeError : Error {
    using Error::Error;
};

// Parameter or argument outside its mathematical domain.
struct DomainError : Error {
    using Error::Error;
};

// Sample set too degenerate to work with (e.g. zero variance).
struct DegenerateSampleError : Error {
    using Error::Error;
};

// Two grids that must coincide do not.
struct GridMismatchError : Error {
    using Error::Error;
};

// Density not normalized where normalization is required.
struct NormalizationError : Error {
    using Error::Error;
};

// Relative entropy undefined because the reference density vanishes
// where the first density has mass.
struct DivergenceError : Error {
    using Error::Error;
};

// Matrix that must be invertible (or PD) is singular to working precision.
struct SingularMatrixError : Error {
    using Error::Error;
};

// Rank-deficient normal equations.
struct RankError : Error {
    using Error::Error;
};

// Trajectory left the representable range (non-finite state).
struct BlowUpError : Error {
    using Error::Error;
};

// A filter or integrator lost a structural property it must preserve.
struct InstabilityError : Error {
    using Error::Error;
};

// A quantity that must be (numerically) real or symmetric is not.
struct SymmetryError : Error {
    using Error::Error;
};

// Series fails a stationarity check required by an estimator.
struct StationarityError : Error {
    using Error::Error;
};

// Averaging window too short to be meaningful.
struct WindowError : Error {
    using Error::Error;
};

// Surrogate calibration produced unusable parameters.
struct CalibrationError : Error {
    using Error::Error;
};

// Bad experiment / CLI configuration.
struct ConfigError : Error {
    using Error::Error;
};

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Counter-based random stream.  A stream is fully determined by
// (seed, stream index); consumers that need independent replicates draw
// stream = member index so results do not depend on thread scheduling.
// The generator is a SplitMix64-style Weyl counter with a strong 64-bit
// finalizer, which is statistically sound for Monte Carlo use.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();

    // Uniform on [0, 1).
    double uniform();
    // Uniform on (0, 1] (safe to pass to log).
    double uniform_pos();
    // Standard normal (Box-Muller, second value cached).
    double normal();
    // Complex normal with E|z|^2 = 1 (real and imaginary parts N(0, 1/2)).
    std::complex<double> complex_normal();
    // Gamma(shape, scale), Marsaglia-Tsang squeeze method.
    double gamma(double shape, double scale);

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

// Runs fn(i) for i in [0, n).  Worker count is capped by the UQKIT_THREADS
// environment variable (default: hardware concurrency).  Each index must be
// independent; results may be written to disjoint slots without locking.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Worker count parallel_for would use for n independent tasks.
unsigned effective_threads(std::size_t n);

}  // namespace uqkit

#pragma once

#include <cstdint>
#include <functional>

#include "elliptope/subspace.hpp"

namespace elliptope::harness {

using numerics::Subspace;

/// Column space of an n x r matrix with i.i.d. standard Gaussian entries,
/// drawn column-major from the (seed, stream) Philox stream and
/// orthonormalized. The column-major order makes subspaces nested across r
/// for a fixed stream: the first r columns are identical for every r' >= r.
/// A numerically rank-deficient draw is resampled once from the reserved
/// companion stream, then reported as a numerical failure.
Subspace sample_subspace(int n, int r, std::uint64_t seed, std::uint64_t stream);

struct ExperimentConfig {
    int n = 0;
    int r = 0; ///< 0 is allowed: the trivial subspace with coherence 0
    int trials = 1;
    std::uint64_t seed = 0;
    double epsilon = 0.25;
    bool verify_sdp = false;
    int verify_cap = 20;
    /// invoked as (done, total) every ~10% of a long run
    std::function<void(int, int)> progress;

    void validate() const;
};

struct MonteCarloReport {
    int trials = 0;
    int count_mu_below_half = 0;
    double observed_fraction = 0.0;
    /// 1 - c_bar sqrt(n) exp(-c_tilde n); only reported when n exceeds the
    /// validity threshold of the tail bound.
    bool bound_valid = false;
    double analytic_lower_bound = 0.0;
    double c_bar = 0.0;
    double c_tilde = 0.0;
    double wall_time_s = 0.0;
    // --verify-sdp subsample
    int sdp_checked = 0;
    int sdp_realizable = 0;
    int sdp_consistent = 0; ///< instances satisfying (mu < 1/2 => realizable)
};

/// Count the fraction of seeded random r-dimensional subspaces of R^n with
/// coherence below 1/2; trials are independent streams, so the counts are
/// order-independent.
MonteCarloReport montecarlo_coherence(const ExperimentConfig& cfg);

/// Constants of the high-probability bound, derived from the tail-bound
/// proof: a = eps - 4 eps^2/3, c_tilde = a (1/2 - eps),
/// c_bar = 1 / (a sqrt(pi (1/4 - eps^2))).
void proposition_constants(double eps, double& c_bar, double& c_tilde);

/// Bound applies when n > 6 / (eps^2 - 2 eps^3).
double bound_validity_threshold(double eps);

} // namespace elliptope::harness

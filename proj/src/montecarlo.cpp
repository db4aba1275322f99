#include "elliptope/montecarlo.hpp"

#include <chrono>
#include <cmath>

#include "elliptope/errors.hpp"
#include "elliptope/realizability.hpp"
#include "elliptope/rng.hpp"

namespace elliptope::harness {

using numerics::Mat;

Subspace sample_subspace(int n, int r, std::uint64_t seed, std::uint64_t stream) {
    if (n < 1 || r < 1 || r > n) throw UsageError("sample_subspace: need 1 <= r <= n");
    constexpr std::uint64_t kResampleBit = 0x8000000000000000ULL;
    for (int attempt = 0; attempt < 2; ++attempt) {
        Philox rng(seed, attempt == 0 ? stream : (stream ^ kResampleBit));
        Mat g(n, r);
        for (int j = 0; j < r; ++j)
            for (int i = 0; i < n; ++i) g(i, j) = rng.next_gaussian();
        Subspace u = Subspace::span_of(g);
        if (u.dim() == r) return u;
    }
    throw NumericalError("sample_subspace: rank-deficient Gaussian draw twice in a row", 0.0);
}

void ExperimentConfig::validate() const {
    if (n < 1) throw UsageError("montecarlo: n must be at least 1");
    if (r < 0 || r > n) throw UsageError("montecarlo: need 0 <= r <= n");
    if (trials < 1) throw UsageError("montecarlo: trials must be at least 1");
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw UsageError("montecarlo: epsilon must lie in (0, 1/2)");
    if (verify_cap < 1) throw UsageError("montecarlo: verify cap must be positive");
}

void proposition_constants(double eps, double& c_bar, double& c_tilde) {
    const double a = eps - 4.0 * eps * eps / 3.0;
    c_tilde = a * (0.5 - eps);
    c_bar = 1.0 / (a * std::sqrt(M_PI * (0.25 - eps * eps)));
}

double bound_validity_threshold(double eps) {
    return 6.0 / (eps * eps - 2.0 * eps * eps * eps);
}

MonteCarloReport montecarlo_coherence(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    MonteCarloReport rep;
    rep.trials = cfg.trials;
    const int stride = std::max(1, cfg.trials / 10);
    for (int t = 0; t < cfg.trials; ++t) {
        if (cfg.progress && t > 0 && t % stride == 0) cfg.progress(t, cfg.trials);
        double mu = 0.0;
        if (cfg.r > 0) {
            const Subspace u = sample_subspace(cfg.n, cfg.r, cfg.seed, std::uint64_t(t));
            mu = faces::coherence(u);
        }
        if (mu < 0.5) ++rep.count_mu_below_half;

        if (cfg.verify_sdp && t < cfg.verify_cap && cfg.r > 0 && cfg.r < cfg.n) {
            const Subspace u = sample_subspace(cfg.n, cfg.r, cfg.seed, std::uint64_t(t));
            const faces::RealizabilityReport rr = faces::realizability_certificate(u);
            ++rep.sdp_checked;
            const bool realizable = rr.verdict == faces::Verdict::realizable;
            if (realizable) ++rep.sdp_realizable;
            if (mu >= 0.5 || realizable) ++rep.sdp_consistent;
        }
    }
    rep.observed_fraction = double(rep.count_mu_below_half) / double(cfg.trials);

    proposition_constants(cfg.epsilon, rep.c_bar, rep.c_tilde);
    rep.bound_valid = double(cfg.n) > bound_validity_threshold(cfg.epsilon);
    if (rep.bound_valid)
        rep.analytic_lower_bound =
            1.0 - rep.c_bar * std::sqrt(double(cfg.n)) * std::exp(-rep.c_tilde * cfg.n);

    rep.wall_time_s =
        std::chrono::duration_cast<std::chrono::duration<double>>(std::chrono::steady_clock::now() - t0)
            .count();
    return rep;
}

} // namespace elliptope::harness

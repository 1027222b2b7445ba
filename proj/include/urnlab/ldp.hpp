#pragma once

#include <string>
#include <vector>

#include "urnlab/urn.hpp"

namespace urnlab {

// log of Pi_n(z) = prod_{j=1..n} (1 + z/j) for real z > -1, summed in
// ascending j with compensated summation. Pi_n(1) telescopes to n + 1 and
// is returned exactly.
double log_product_pi(double z, long n);

// Pi_n(z) Gamma(z+1) / n^z; tends to 1 as n grows.
double gauss_ratio(double z, long n);

// Scaled log moment generating function of Z_n started from delta_0:
// (log Pi_n(e(lambda)) - log(n+1)) / log n. Exact 0 at lambda = 0.
double lambda_n(const std::vector<double>& lambda, long n, const IncrementDistribution& dist);

// Optional start-configuration correction (1/log n) log E[e^{<lambda,Z_0>}];
// vanishes in the limit, off by default in the reports.
double lambda_n_with_u0(const std::vector<double>& lambda, long n,
                        const IncrementDistribution& dist, const LatticePmf& u0);

enum class RateStatus { Converged, DivergedToInfinity };

struct RateFunctionResult {
    std::vector<double> x;
    double value = 0.0;                // +infinity when diverged
    std::vector<double> lambda_star;   // empty when diverged
    RateStatus status = RateStatus::Converged;
    int iterations = 0;

    bool converged() const { return status == RateStatus::Converged; }
    std::string to_json_text() const;
};

// I(x) = sup_lambda { <x,lambda> - e(lambda) + 1 } by safeguarded Newton
// ascent from lambda = 0 with step halving. Divergence to +infinity is a
// status, not an error: it is declared once the iterate norm passes
// 60 / max_atom_norm with the objective still strictly increasing.
RateFunctionResult rate_function_numeric(const std::vector<double>& x,
                                         const IncrementDistribution& dist);

// Closed forms for the two presets: "det1d" is x log x - x + 1 on x > 0
// (1 at x = 0, +infinity below), "ssrw1d" is x asinh x - sqrt(1+x^2) + 1.
double rate_function_closed(const std::string& preset, double x);

struct CompoundPoissonPmf {
    LatticePmf pmf;    // sub-probability: Poisson(1) mixture of convolution powers
    double deficit;    // truncated Poisson tail mass, < mass_tolerance
    int terms;         // number of retained Poisson terms (k = 0..terms-1)
};

// W = X_1 + ... + X_N with N ~ Poisson(1): truncated mixture of exact
// convolution powers of the increment law.
CompoundPoissonPmf compound_poisson_pmf(const IncrementDistribution& dist, double mass_tolerance);

// One draw of W: N by sequential-search inversion, then N increment draws.
LatticePoint compound_poisson_sample(const IncrementDistribution& dist, Rng& rng);

struct TailEstimate {
    double estimate = 0.0;
    double rel_std_err = 0.0;
    long samples = 0;
};

// Importance-sampled P(Z_n >= a log n) for dim-1 models, started from
// delta_0. Each thinned summand j is exponentially tilted with the
// maximizer lambda* for x = a and its own normalizer (j + e(lambda*))/(j+1),
// so the weighted average is unbiased for the true tail probability.
TailEstimate tilted_tail_mc(long n, double a, const IncrementDistribution& dist, long samples,
                            Rng& rng);

struct TailRecord {
    long n = 0;
    double tail_prob = 0.0;
    double std_err = 0.0;   // 0 for exact rows
    double exponent = 0.0;  // -log(tail)/log(n); +infinity for zero tails
    double target_rate = 0.0;
    bool exact = true;
};

// Per-n tail exponents of P(Z_n / log n >= mu + eps) (upper = true) or
// <= mu - eps (upper = false), next to the rate-function target. Exact
// pmf within the budget, tilted Monte Carlo beyond it.
std::vector<TailRecord> tail_exponent_report(const std::vector<long>& n_list, double eps,
                                             const IncrementDistribution& dist,
                                             const LatticePmf& u0, bool upper, long samples,
                                             Rng* rng, EvalMode mode = EvalMode::Auto,
                                             const PmfBudget& budget = {});

struct PropertyCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Structure checks on the numerically computed rate function over a grid:
// midpoint convexity, dim-1 monotonicity away from the mean together with
// the one-sided supremum identity, the norm growth bound, and the zero
// minimum at the mean.
std::vector<PropertyCheck> rate_properties(const IncrementDistribution& dist,
                                           const std::vector<std::vector<double>>& grid);

}  // namespace urnlab

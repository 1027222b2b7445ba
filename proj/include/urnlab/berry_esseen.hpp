#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "urnlab/urn.hpp"

namespace urnlab {

// h_n = sum_{j=1..n} 1/(j+1), summed smallest term first. h_0 = 0.
double harmonic_tail(long n);

struct RhoMoments1d {
    double rho2 = 0.0;
    double rho3 = 0.0;
};

// Second- and third-moment rates of the thinned increment sum:
//   rho2 = (sigma^2 h_n - mu^2 sum 1/(j+1)^2) / n
//   rho3 = (sum (1/(j+1)) E|X - mu/(j+1)|^3 + |mu|^3 sum j/(j+1)^4) / n
// with sigma^2 = E[X^2]; the third absolute moment is summed exactly over
// the support atoms.
RhoMoments1d rho_moments_1d(long n, const IncrementDistribution& dist);

// 2.75 * n rho3 / (n rho2)^{3/2}; decays like 1/sqrt(log n)
double be_bound_1d(long n, const IncrementDistribution& dist);

// Exact sup_x |P((U - center)/scale <= x) - Phi(x)| over the jump points
// of the standardized pmf, checking each jump from both sides.
double kolmogorov_distance_1d(const LatticePmf& pmf, double center, double scale);

// Sorted-sample version for Monte Carlo mode; values are the raw colors.
double kolmogorov_distance_samples_1d(std::vector<long> values, double center, double scale);

// Sigma_n = sum_{j=1..n} (1/(j+1)) (Sigma - M/(j+1)); in dim 1 this equals
// n * rho2.
SquareMatrix sigma_n_matrix(long n, const IncrementDistribution& dist);

// Sigma_n^{-1/2}; throws std::domain_error when Sigma_n is not positive
// definite (degenerate increments).
SquareMatrix sigma_n_whitener(long n, const IncrementDistribution& dist);

// beta_j(i) = (1/(j+1)) E|X^{(i)} - mu^{(i)}/(j+1)|^3 + (j/(j+1)^4) |mu^{(i)}|^3
double beta_j_i(long j, int i, const IncrementDistribution& dist);

struct RhoMomentsD {
    double rho2 = 0.0;
    double rho3 = 0.0;
    std::vector<double> gamma;  // gamma_n(i), i = 0..d-1
};

// Determinant-ratio moment rates for any dimension. In dim 1 the deleted
// minors are 0x0 matrices with determinant 1, which reproduces the 1-d
// quantities exactly.
RhoMomentsD rho_moments_d(long n, const IncrementDistribution& dist);

// Product of coordinate-wise standard normal CDFs.
double std_normal_cdf_d(const std::vector<double>& x);

struct SupDistance {
    double value = 0.0;
    std::size_t eval_points = 0;  // evaluation-set size; value is a lower bound on the sup
};

// sup over the evaluation set of |P((U - center) W <= x) - Phi_d(x)| with
// coordinate-wise ordering; W is the whitening matrix. Exact mode: the
// evaluation set is every transformed support point.
SupDistance multivariate_sup_distance(const LatticePmf& pmf, const std::vector<double>& center,
                                      const SquareMatrix& whitener);

// Monte Carlo mode: transformed sample points plus a refinement grid of
// grid_per_axis points per axis over their bounding box.
SupDistance multivariate_sup_distance(const std::vector<LatticePoint>& samples,
                                      const std::vector<double>& center,
                                      const SquareMatrix& whitener, int grid_per_axis = 64);

// Least-squares slope of log(distance) against log(log n). Near -1/2 for
// 1/sqrt(log n) decay.
double rate_regression(const std::vector<long>& n_list, const std::vector<double>& distances);

struct BEReport {
    long n = 0;
    double h_n = 0.0;
    double rho2 = 0.0;
    double rho3 = 0.0;
    double bound_value = 0.0;  // 2.75 n rho3 / (n rho2)^{3/2}, or the bare rate in general mode
    double measured_distance = 0.0;
    double ratio = 0.0;
    std::vector<double> center;
    std::string scaling;
    std::size_t eval_points = 0;  // multivariate mode only
};

struct BEOptions {
    // general = false: delta_0 start, mu h_n centering, sqrt(n rho2) scaling,
    // distance compared against the explicit 2.75 bound.
    // general = true: mu log n centering, sigma sqrt(log n) scaling (matrix
    // Sigma^{-1/2}/sqrt(log n) in dim > 1); the constant is unknown there, so
    // ratio reports distance / (sqrt(n) rho3 / rho2^{3/2}) instead.
    bool general = false;
    EvalMode mode = EvalMode::Auto;
    long samples = 200000;
    PmfBudget budget;
};

BEReport be_report_row_1d(long n, const IncrementDistribution& dist, const LatticePmf& u0,
                          const BEOptions& opt, Rng* rng);
BEReport be_report_row_d(long n, const IncrementDistribution& dist, const LatticePmf& u0,
                         const BEOptions& opt, Rng* rng);

// "n,h_n,rho2,rho3,bound,distance,ratio"
void write_be_csv(std::ostream& os, const std::vector<BEReport>& rows);
// "n,h_n,rho2d,rho3d,rate,distance,ratio,eval_points"
void write_be_csv_d(std::ostream& os, const std::vector<BEReport>& rows);

}  // namespace urnlab

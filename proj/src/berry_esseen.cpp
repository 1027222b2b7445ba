#include "urnlab/berry_esseen.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace urnlab {

double harmonic_tail(long n) {
    if (n < 0) throw std::invalid_argument("harmonic_tail: n must be >= 0");
    double s = 0.0;
    for (long j = n; j >= 1; --j) s += 1.0 / static_cast<double>(j + 1);
    return s;
}

// E|X - c|^3 summed exactly over the atoms (dim-1 marginal i).
static double third_abs_moment(const IncrementDistribution& dist, int i, double c) {
    double s = 0.0;
    for (const Atom& a : dist.atoms()) {
        const double d = std::fabs(static_cast<double>(a.point[i]) - c);
        s += a.prob * d * d * d;
    }
    return s;
}

RhoMoments1d rho_moments_1d(long n, const IncrementDistribution& dist) {
    if (dist.dim() != 1) throw std::invalid_argument("rho_moments_1d: dim-1 distributions only");
    if (n < 1) throw std::invalid_argument("rho_moments_1d: n must be >= 1");
    const double mu = dist.mean()[0];
    const double sigma2 = dist.sigma2();

    double sum_sq = 0.0;    // sum 1/(j+1)^2
    double sum_abs3 = 0.0;  // sum (1/(j+1)) E|X - mu/(j+1)|^3
    double sum_mu3 = 0.0;   // sum j/(j+1)^4
    for (long j = n; j >= 1; --j) {
        const double jp1 = static_cast<double>(j + 1);
        sum_sq += 1.0 / (jp1 * jp1);
        sum_abs3 += third_abs_moment(dist, 0, mu / jp1) / jp1;
        sum_mu3 += static_cast<double>(j) / (jp1 * jp1 * jp1 * jp1);
    }

    RhoMoments1d r;
    r.rho2 = (sigma2 * harmonic_tail(n) - mu * mu * sum_sq) / static_cast<double>(n);
    r.rho3 = (sum_abs3 + std::pow(std::fabs(mu), 3) * sum_mu3) / static_cast<double>(n);
    return r;
}

double be_bound_1d(long n, const IncrementDistribution& dist) {
    const RhoMoments1d r = rho_moments_1d(n, dist);
    if (!(r.rho2 > 0.0))
        throw std::domain_error("be_bound_1d: rho2 <= 0 (degenerate scaling)");
    // (sum of third absolute moments) / (sum of variances)^{3/2}
    // = n rho3 / (n rho2)^{3/2}: of order 1/sqrt(log n).
    return 2.75 * r.rho3 / (std::sqrt(static_cast<double>(n)) * std::pow(r.rho2, 1.5));
}

double kolmogorov_distance_1d(const LatticePmf& pmf, double center, double scale) {
    if (pmf.dim() != 1) throw std::invalid_argument("kolmogorov_distance_1d: dim-1 pmfs only");
    if (!(scale > 0.0)) throw std::invalid_argument("kolmogorov_distance_1d: scale must be > 0");
    double cum = 0.0, best = 0.0;
    const std::vector<double>& mass = pmf.masses();
    for (std::size_t k = 0; k < mass.size(); ++k) {
        const double m = mass[k];
        if (m <= 0.0) continue;
        const double t = (static_cast<double>(pmf.lo()[0] + static_cast<int>(k)) - center) / scale;
        const double phi = std_normal_cdf(t);
        best = std::max(best, std::fabs(cum - phi));  // left limit at the jump
        cum += m;
        best = std::max(best, std::fabs(cum - phi));
    }
    return best;
}

double kolmogorov_distance_samples_1d(std::vector<long> values, double center, double scale) {
    if (values.empty()) throw std::invalid_argument("kolmogorov_distance_samples_1d: no samples");
    if (!(scale > 0.0)) throw std::invalid_argument("kolmogorov_distance_samples_1d: scale must be > 0");
    std::sort(values.begin(), values.end());
    const double inv = 1.0 / static_cast<double>(values.size());
    double best = 0.0;
    std::size_t i = 0;
    while (i < values.size()) {
        std::size_t j = i;
        while (j < values.size() && values[j] == values[i]) ++j;
        const double t = (static_cast<double>(values[i]) - center) / scale;
        const double phi = std_normal_cdf(t);
        best = std::max(best, std::fabs(static_cast<double>(i) * inv - phi));
        best = std::max(best, std::fabs(static_cast<double>(j) * inv - phi));
        i = j;
    }
    return best;
}

SquareMatrix sigma_n_matrix(long n, const IncrementDistribution& dist) {
    if (n < 1) throw std::invalid_argument("sigma_n_matrix: n must be >= 1");
    const int d = dist.dim();
    const SquareMatrix& second = dist.second_moment();
    const SquareMatrix& outer = dist.mean_outer();
    SquareMatrix s(d);
    for (long j = n; j >= 1; --j) {
        const double jp1 = static_cast<double>(j + 1);
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k)
                s(i, k) += (second(i, k) - outer(i, k) / jp1) / jp1;
    }
    return s;
}

SquareMatrix sigma_n_whitener(long n, const IncrementDistribution& dist) {
    return spd_sqrt_inverse(sigma_n_matrix(n, dist));
}

double beta_j_i(long j, int i, const IncrementDistribution& dist) {
    const double jp1 = static_cast<double>(j + 1);
    const double mu_i = dist.mean()[i];
    return third_abs_moment(dist, i, mu_i / jp1) / jp1 +
           static_cast<double>(j) / (jp1 * jp1 * jp1 * jp1) * std::pow(std::fabs(mu_i), 3);
}

RhoMomentsD rho_moments_d(long n, const IncrementDistribution& dist) {
    if (n < 1) throw std::invalid_argument("rho_moments_d: n must be >= 1");
    const int d = dist.dim();
    const SquareMatrix& second = dist.second_moment();
    const SquareMatrix& outer = dist.mean_outer();

    // Deleted minors once; each j only rescales the mean-outer part.
    std::vector<SquareMatrix> second_minor, outer_minor;
    for (int i = 0; i < d; ++i) {
        if (d == 1) {
            second_minor.push_back(SquareMatrix(0));
            outer_minor.push_back(SquareMatrix(0));
        } else {
            second_minor.push_back(minor_matrix(second, i, i));
            outer_minor.push_back(minor_matrix(outer, i, i));
        }
    }
    auto minor_det = [&](int i, double jp1) {
        return determinant(second_minor[i] - (1.0 / jp1) * outer_minor[i]);
    };

    RhoMomentsD r;
    r.gamma.assign(d, 0.0);
    std::vector<double> gamma_sq(d, 0.0);
    double rho2_sum = 0.0;
    std::vector<double> beta_sum(d, 0.0);
    for (long j = 1; j <= n; ++j) {
        const double jp1 = static_cast<double>(j + 1);
        const double denom = minor_det(0, jp1);
        if (!(denom > 0.0))
            throw std::domain_error("rho_moments_d: nonpositive minor determinant (degenerate)");
        rho2_sum += determinant(second - (1.0 / jp1) * outer) / denom / jp1;
        for (int i = 0; i < d; ++i) {
            gamma_sq[i] = std::max(gamma_sq[i], minor_det(i, jp1) / denom);
            beta_sum[i] += beta_j_i(j, i, dist);
        }
    }
    r.rho2 = rho2_sum / static_cast<double>(n);
    double rho3_sum = 0.0;
    for (int i = 0; i < d; ++i) {
        r.gamma[i] = std::sqrt(gamma_sq[i]);
        rho3_sum += std::pow(gamma_sq[i], 1.5) * beta_sum[i];
    }
    r.rho3 = rho3_sum / static_cast<double>(n * d);
    return r;
}

double std_normal_cdf_d(const std::vector<double>& x) {
    double p = 1.0;
    for (double xi : x) p *= std_normal_cdf(xi);
    return p;
}

namespace {

// Core of the sup-distance evaluation: weighted atoms already transformed
// into whitened coordinates, compared against the product-normal CDF on a
// given evaluation set. O(|eval| * |atoms|); the boxes at desk scale keep
// this affordable and exact.
SupDistance sup_distance_core(const std::vector<std::vector<double>>& points,
                              const std::vector<double>& weights,
                              const std::vector<std::vector<double>>& evals) {
    const std::size_t d = points.empty() ? 0 : points[0].size();
    double best = 0.0;
    for (const std::vector<double>& e : evals) {
        double emp = 0.0;
        for (std::size_t z = 0; z < points.size(); ++z) {
            bool below = true;
            for (std::size_t k = 0; k < d; ++k) {
                if (points[z][k] > e[k] + 1e-12) {
                    below = false;
                    break;
                }
            }
            if (below) emp += weights[z];
        }
        best = std::max(best, std::fabs(emp - std_normal_cdf_d(e)));
    }
    return {best, evals.size()};
}

std::vector<double> whiten(const LatticePoint& p, const std::vector<double>& center,
                           const SquareMatrix& w) {
    const int d = w.dim();
    std::vector<double> t(d, 0.0);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i) t[k] += (static_cast<double>(p[i]) - center[i]) * w(i, k);
    return t;
}

void check_whitener(const SquareMatrix& w) {
    if (std::fabs(determinant(w)) <= 1e-300)
        throw std::domain_error("multivariate_sup_distance: whitener is not invertible");
}

}  // namespace

SupDistance multivariate_sup_distance(const LatticePmf& pmf, const std::vector<double>& center,
                                      const SquareMatrix& whitener) {
    if (pmf.dim() != whitener.dim() || static_cast<int>(center.size()) != pmf.dim())
        throw std::invalid_argument("multivariate_sup_distance: dimension mismatch");
    check_whitener(whitener);
    std::vector<std::vector<double>> pts;
    std::vector<double> wts;
    pmf.for_each([&](const LatticePoint& p, double m) {
        pts.push_back(whiten(p, center, whitener));
        wts.push_back(m);
    });
    return sup_distance_core(pts, wts, pts);
}

SupDistance multivariate_sup_distance(const std::vector<LatticePoint>& samples,
                                      const std::vector<double>& center,
                                      const SquareMatrix& whitener, int grid_per_axis) {
    if (samples.empty()) throw std::invalid_argument("multivariate_sup_distance: no samples");
    const int d = whitener.dim();
    check_whitener(whitener);
    std::vector<std::vector<double>> pts;
    pts.reserve(samples.size());
    for (const LatticePoint& p : samples) pts.push_back(whiten(p, center, whitener));
    std::vector<double> wts(samples.size(), 1.0 / static_cast<double>(samples.size()));

    std::vector<std::vector<double>> evals = pts;
    if (grid_per_axis > 1) {
        std::vector<double> mn(d, 0.0), mx(d, 0.0);
        for (int k = 0; k < d; ++k) {
            mn[k] = mx[k] = pts[0][k];
            for (const auto& t : pts) {
                mn[k] = std::min(mn[k], t[k]);
                mx[k] = std::max(mx[k], t[k]);
            }
        }
        std::vector<int> idx(d, 0);
        std::vector<double> g(d);
        for (;;) {
            for (int k = 0; k < d; ++k)
                g[k] = mn[k] + (mx[k] - mn[k]) * idx[k] / static_cast<double>(grid_per_axis - 1);
            evals.push_back(g);
            int k = d - 1;
            while (k >= 0 && ++idx[k] == grid_per_axis) idx[k--] = 0;
            if (k < 0) break;
        }
    }
    return sup_distance_core(pts, wts, evals);
}

double rate_regression(const std::vector<long>& n_list, const std::vector<double>& distances) {
    if (n_list.size() != distances.size() || n_list.size() < 4)
        throw std::invalid_argument("rate_regression: need at least 4 matched points");
    std::vector<double> u, v;
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 3) throw std::invalid_argument("rate_regression: n must exceed e");
        if (!(distances[i] > 0.0))
            throw std::invalid_argument("rate_regression: distances must be positive");
        u.push_back(std::log(std::log(static_cast<double>(n_list[i]))));
        v.push_back(std::log(distances[i]));
    }
    double ub = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        ub += u[i];
        vb += v[i];
    }
    ub /= static_cast<double>(u.size());
    vb /= static_cast<double>(u.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        num += (u[i] - ub) * (v[i] - vb);
        den += (u[i] - ub) * (u[i] - ub);
    }
    if (den == 0.0) throw std::invalid_argument("rate_regression: degenerate regression, all n equal");
    return num / den;
}

namespace {

std::vector<long> draw_samples_1d(long n, const LatticePmf& u0, const IncrementDistribution& dist,
                                  long samples, Rng& rng) {
    std::vector<long> out;
    out.reserve(static_cast<std::size_t>(samples));
    for (long s = 0; s < samples; ++s)
        out.push_back(sample_z_repr_fast(n, u0, dist, rng)[0]);
    return out;
}

bool use_exact(EvalMode mode, long n, int dim, const PmfBudget& budget) {
    switch (mode) {
        case EvalMode::Exact: return true;
        case EvalMode::MonteCarlo: return false;
        case EvalMode::Auto: return n <= budget.max_n(dim);
    }
    return true;
}

}  // namespace

BEReport be_report_row_1d(long n, const IncrementDistribution& dist, const LatticePmf& u0,
                          const BEOptions& opt, Rng* rng) {
    if (dist.dim() != 1) throw std::invalid_argument("be_report_row_1d: dim-1 only");
    BEReport row;
    row.n = n;
    row.h_n = harmonic_tail(n);
    const RhoMoments1d r = rho_moments_1d(n, dist);
    row.rho2 = r.rho2;
    row.rho3 = r.rho3;
    const double mu = dist.mean()[0];
    const double rate = r.rho3 / (std::sqrt(static_cast<double>(n)) * std::pow(r.rho2, 1.5));

    double center, scale;
    if (opt.general) {
        const double logn = std::log(static_cast<double>(n));
        if (!(logn > 0.0)) throw std::invalid_argument("be_report_row_1d: general mode needs n >= 2");
        center = mu * logn;
        scale = std::sqrt(dist.sigma2() * logn);
        row.bound_value = rate;  // constant unknown; report the bare rate
        row.scaling = "sigma*sqrt(log n)";
    } else {
        center = mu * row.h_n;
        if (!(r.rho2 > 0.0)) throw std::domain_error("be_report_row_1d: rho2 <= 0 (degenerate)");
        scale = std::sqrt(static_cast<double>(n) * r.rho2);
        row.bound_value = 2.75 * rate;
        row.scaling = "sqrt(n*rho2)";
    }
    row.center = {center};

    if (use_exact(opt.mode, n, 1, opt.budget)) {
        row.measured_distance = kolmogorov_distance_1d(exact_pmf(n, u0, dist, opt.budget), center, scale);
    } else {
        if (!rng) throw std::invalid_argument("be_report_row_1d: Monte Carlo mode needs a seeded rng");
        std::vector<long> vals = draw_samples_1d(n, u0, dist, opt.samples, *rng);
        row.measured_distance = kolmogorov_distance_samples_1d(std::move(vals), center, scale);
    }
    row.ratio = row.measured_distance / row.bound_value;
    return row;
}

BEReport be_report_row_d(long n, const IncrementDistribution& dist, const LatticePmf& u0,
                         const BEOptions& opt, Rng* rng) {
    BEReport row;
    row.n = n;
    row.h_n = harmonic_tail(n);
    const RhoMomentsD r = rho_moments_d(n, dist);
    row.rho2 = r.rho2;
    row.rho3 = r.rho3;
    row.bound_value = r.rho3 / (std::sqrt(static_cast<double>(n)) * std::pow(r.rho2, 1.5));

    const int d = dist.dim();
    std::vector<double> center(d, 0.0);
    SquareMatrix whitener(d);
    if (opt.general) {
        const double logn = std::log(static_cast<double>(n));
        if (!(logn > 0.0)) throw std::invalid_argument("be_report_row_d: general mode needs n >= 2");
        for (int i = 0; i < d; ++i) center[i] = dist.mean()[i] * logn;
        whitener = (1.0 / std::sqrt(logn)) * spd_sqrt_inverse(dist.second_moment());
        row.scaling = "Sigma^{-1/2}/sqrt(log n)";
    } else {
        for (int i = 0; i < d; ++i) center[i] = dist.mean()[i] * row.h_n;
        whitener = sigma_n_whitener(n, dist);
        row.scaling = "Sigma_n^{-1/2}";
    }
    row.center = center;

    SupDistance sd;
    if (use_exact(opt.mode, n, d, opt.budget)) {
        sd = multivariate_sup_distance(exact_pmf(n, u0, dist, opt.budget), center, whitener);
    } else {
        if (!rng) throw std::invalid_argument("be_report_row_d: Monte Carlo mode needs a seeded rng");
        std::vector<LatticePoint> samples;
        samples.reserve(static_cast<std::size_t>(opt.samples));
        for (long s = 0; s < opt.samples; ++s)
            samples.push_back(sample_z_repr_fast(n, u0, dist, *rng));
        sd = multivariate_sup_distance(samples, center, whitener);
    }
    row.measured_distance = sd.value;
    row.eval_points = sd.eval_points;
    row.ratio = row.measured_distance / row.bound_value;
    return row;
}

void write_be_csv(std::ostream& os, const std::vector<BEReport>& rows) {
    os << "n,h_n,rho2,rho3,bound,distance,ratio\n";
    for (const BEReport& r : rows) {
        os << r.n << "," << fmt_g12(r.h_n) << "," << fmt_g12(r.rho2) << "," << fmt_g12(r.rho3)
           << "," << fmt_g12(r.bound_value) << "," << fmt_g12(r.measured_distance) << ","
           << fmt_g12(r.ratio) << "\n";
    }
}

void write_be_csv_d(std::ostream& os, const std::vector<BEReport>& rows) {
    os << "n,h_n,rho2d,rho3d,rate,distance,ratio,eval_points\n";
    for (const BEReport& r : rows) {
        os << r.n << "," << fmt_g12(r.h_n) << "," << fmt_g12(r.rho2) << "," << fmt_g12(r.rho3)
           << "," << fmt_g12(r.bound_value) << "," << fmt_g12(r.measured_distance) << ","
           << fmt_g12(r.ratio) << "," << r.eval_points << "\n";
    }
}

}  // namespace urnlab

#pragma once

// Shared statistical helpers for the test suites. Everything here is an
// independent oracle path: it must not reuse the library's own evaluators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "urnlab/urn.hpp"

namespace testutil {

// Regularized upper incomplete gamma Q(a, x) via the series / continued
// fraction split (Lentz), good to ~1e-12 for the chi-square p-values used
// here.
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // P(a,x) by series, Q = 1 - P
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Q(a,x) by continued fraction
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - lg) * h;
}

// Chi-square goodness-of-fit p-value of observed counts against expected
// probabilities. Bins are pooled in the given order until each expected
// count reaches 5, the usual validity rule for the statistic.
inline double chi_square_pvalue(const std::vector<long>& counts,
                                const std::vector<double>& probs, long total) {
    if (counts.size() != probs.size() || counts.empty())
        throw std::invalid_argument("chi_square_pvalue: size mismatch");
    std::vector<double> exp_pool;
    std::vector<double> obs_pool;
    double e_run = 0.0, o_run = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        e_run += probs[i] * static_cast<double>(total);
        o_run += static_cast<double>(counts[i]);
        if (e_run >= 5.0) {
            exp_pool.push_back(e_run);
            obs_pool.push_back(o_run);
            e_run = o_run = 0.0;
        }
    }
    if (e_run > 0.0 || o_run > 0.0) {
        if (exp_pool.empty()) {
            exp_pool.push_back(e_run);
            obs_pool.push_back(o_run);
        } else {
            exp_pool.back() += e_run;
            obs_pool.back() += o_run;
        }
    }
    if (exp_pool.size() < 2) return 1.0;  // everything pooled into one bin
    double stat = 0.0;
    for (std::size_t i = 0; i < exp_pool.size(); ++i) {
        const double d = obs_pool[i] - exp_pool[i];
        stat += d * d / exp_pool[i];
    }
    const double dof = static_cast<double>(exp_pool.size() - 1);
    return gamma_q(dof / 2.0, stat / 2.0);
}

// Draw `draws` samples with `sampler`, count them on the support of the
// exact pmf, and return the chi-square p-value. Colors falling outside the
// exact support (impossible for a correct sampler) land in a synthetic
// zero-probability bin and force a rejection.
template <typename Sampler>
double chi_square_vs_pmf(const urnlab::LatticePmf& pmf, long draws, Sampler&& sampler) {
    std::map<urnlab::LatticePoint, std::size_t> index;
    std::vector<double> probs;
    pmf.for_each([&](const urnlab::LatticePoint& p, double m) {
        index[p] = probs.size();
        probs.push_back(m);
    });
    std::vector<long> counts(probs.size(), 0);
    long stray = 0;
    for (long i = 0; i < draws; ++i) {
        const urnlab::LatticePoint z = sampler();
        auto it = index.find(z);
        if (it == index.end())
            ++stray;
        else
            ++counts[it->second];
    }
    if (stray > 0) return 0.0;
    return chi_square_pvalue(counts, probs, draws);
}

// High-precision standard normal CDF oracle, independent of the library
// path: erf by Taylor series for small arguments, erfc by Lentz continued
// fraction for large ones, in long double.
inline long double erf_series(long double z) {
    long double term = z, sum = z;
    const long double z2 = z * z;
    for (int k = 1; k < 200; ++k) {
        term *= -z2 / k;
        const long double add = term / (2 * k + 1);
        sum += add;
        if (std::fabs(static_cast<double>(add)) < 1e-22) break;
    }
    return sum * 2.0L / std::sqrt(3.14159265358979323846264338327950288L);
}

inline long double normal_cdf_oracle(double x) {
    const long double z = std::fabs(static_cast<long double>(x)) / std::sqrt(2.0L);
    long double tail;
    if (z < 3.0L)
        tail = 0.5L * (1.0L - erf_series(z));
    else  // erfc(z) = Q(1/2, z^2), served by the Lentz continued fraction above
        tail = 0.5L * static_cast<long double>(
                          gamma_q(0.5, static_cast<double>(z) * static_cast<double>(z)));
    return x >= 0 ? 1.0L - tail : tail;
}

}  // namespace testutil

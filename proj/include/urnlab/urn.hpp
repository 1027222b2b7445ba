#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <vector>

#include "urnlab/common.hpp"
#include "urnlab/increments.hpp"

namespace urnlab {

// Exact probability mass function over a bounded box of Z^d, stored dense
// in row-major order so that flat index order equals lexicographic point
// order. The box is kept minimal around the support (entries below 1e-300
// are dropped by trim(), they sit hundreds of orders below anything the
// reports need).
class LatticePmf {
public:
    LatticePmf(int dim, LatticePoint lo, LatticePoint hi);

    static LatticePmf delta(const LatticePoint& p);
    // Validated probability vector (positive masses, unit total within
    // 1e-12, distinct points).
    static LatticePmf point_masses(int dim, const std::vector<Atom>& atoms);
    // "delta0", "uniform1d" (uniform on {-2..2}), or inline JSON with the
    // same shape as a distribution spec.
    static LatticePmf from_spec_text(const std::string& text, int dim);

    int dim() const { return dim_; }
    const LatticePoint& lo() const { return lo_; }
    const LatticePoint& hi() const { return hi_; }
    std::size_t cell_count() const { return mass_.size(); }
    const std::vector<double>& masses() const { return mass_; }
    std::vector<double>& masses() { return mass_; }

    bool contains(const LatticePoint& p) const;
    double at(const LatticePoint& p) const;  // 0 outside the box
    void add(const LatticePoint& p, double mass);
    double total_mass() const;

    void trim(double eps = 1e-300);

    LatticePoint point_at(std::size_t flat) const;
    std::size_t flat_index(const LatticePoint& p) const;

    // f(point, mass) over positive-mass cells in lexicographic order.
    template <typename F>
    void for_each(F&& f) const {
        LatticePoint p = lo_;
        for (std::size_t k = 0; k < mass_.size(); ++k) {
            if (mass_[k] > 0.0) f(p, mass_[k]);
            for (int d = dim_ - 1; d >= 0; --d) {
                if (++p[d] <= hi_[d]) break;
                p[d] = lo_[d];
            }
        }
    }

    std::vector<double> mean() const;
    SquareMatrix covariance() const;

    // P[U <= x] with coordinate-wise ordering.
    double cdf(const std::vector<double>& x) const;
    // Dim-1 tails: P[U >= a] and P[U <= a].
    double tail_ge(double a) const;
    double tail_le(double a) const;

    LatticePoint sample(Rng& rng) const;
    LatticePmf reflected() const;

    // CSV "c1,...,cd,mass", one row per support point, lexicographic order,
    // 12 significant digits.
    void write_csv(std::ostream& os) const;

private:
    void check_dim1(const char* what) const;

    int dim_ = 0;
    LatticePoint lo_, hi_;
    std::vector<std::size_t> stride_;
    std::vector<double> mass_;
};

// Sparse urn configuration. Total mass is time + 1 once seeded from a
// probability vector; the map key order makes draws reproducible.
struct UrnState {
    long time = 0;
    double total_mass = 0.0;
    std::map<LatticePoint, double> weights;

    static UrnState from_pmf(const LatticePmf& u0);

    // One color drawn proportionally to the current weights.
    LatticePoint sample_color(Rng& rng) const;

    // Draw V from the configuration, then add mass p(w) at V + w for every
    // increment atom w. Advances time and total mass by one. Returns V.
    LatticePoint step(const IncrementDistribution& dist, Rng& rng);
};

// One draw of the (n+1)-th selected color by running the urn itself.
LatticePoint sample_z_direct(long n, const LatticePmf& u0, const IncrementDistribution& dist,
                             Rng& rng);

// One draw via the Bernoulli-thinned increment sum Z_0 + sum_j I_j X_j,
// I_j ~ Bernoulli(1/(j+1)); increments are drawn only when I_j = 1.
LatticePoint sample_z_repr(long n, const LatticePmf& u0, const IncrementDistribution& dist,
                           Rng& rng);

// Same law as sample_z_repr, but jumps directly between Bernoulli
// successes, so one draw costs O(log n) increments instead of n flips.
LatticePoint sample_z_repr_fast(long n, const LatticePmf& u0, const IncrementDistribution& dist,
                                Rng& rng);

struct PmfBudget {
    long max_n_dim1 = 100000;
    long max_n_dim2 = 2000;
    long max_n_other = 200;
    std::size_t max_cells = std::size_t(1) << 24;

    long max_n(int dim) const {
        return dim == 1 ? max_n_dim1 : (dim == 2 ? max_n_dim2 : max_n_other);
    }
};

// Exact law of Z_n: u0 convolved with the n thinned-step kernels
// (j/(j+1)) delta_0 + (1/(j+1)) p, evaluated by sequential dense
// convolution with trimming. Deterministic bit-for-bit across runs.
// Throws BudgetError when n or the box exceeds the budget.
LatticePmf exact_pmf(long n, const LatticePmf& u0, const IncrementDistribution& dist,
                     const PmfBudget& budget = {});

}  // namespace urnlab

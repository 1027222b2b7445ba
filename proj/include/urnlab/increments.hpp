#pragma once

#include <string>
#include <vector>

#include "urnlab/numerics.hpp"
#include "urnlab/rng.hpp"

namespace urnlab {

// A color / lattice site in Z^d.
using LatticePoint = std::vector<int>;

LatticePoint point_add(const LatticePoint& a, const LatticePoint& b);
double dot_point(const std::vector<double>& lambda, const LatticePoint& u);

struct Atom {
    LatticePoint point;
    double prob;
};

// Bounded-support step distribution p(.) on Z^d with cached first and
// second moments and a moment generating function evaluator. Immutable
// after construction; safe to share across workers.
class IncrementDistribution {
public:
    // Validates the atom list and caches moments. Throws std::invalid_argument
    // on zero/negative probabilities, mass not summing to one within
    // 1e-12, duplicate points, or dimension mismatches. No silent
    // renormalization: a bad mass total is a config bug.
    IncrementDistribution(int dim, std::vector<Atom> atoms);

    // Named presets: "det1d" (unit step), "ssrw1d" (symmetric +-1),
    // "ne2d" (north-east step in Z^2).
    static IncrementDistribution preset(const std::string& name);
    static bool is_preset(const std::string& name);

    // {"dim": d, "atoms": [{"point": [..], "prob": p}, ...]}
    static IncrementDistribution from_json_text(const std::string& text);

    int dim() const { return dim_; }
    const std::vector<Atom>& atoms() const { return atoms_; }

    const std::vector<double>& mean() const { return mean_; }       // mu
    const SquareMatrix& second_moment() const { return second_; }   // E[X^T X]
    const SquareMatrix& mean_outer() const { return mean_outer_; }  // mu^T mu

    // dim-1 shorthand for E[X^2].
    double sigma2() const;

    // e(lambda) = sum_u p(u) exp(<lambda,u>). Always finite for bounded
    // support; throws std::domain_error when some exponent exceeds 700,
    // which would overflow a double.
    double mgf(const std::vector<double>& lambda) const;
    std::vector<double> mgf_grad(const std::vector<double>& lambda) const;
    SquareMatrix mgf_hess(const std::vector<double>& lambda) const;

    double max_atom_norm() const { return max_norm_; }
    const LatticePoint& min_offset() const { return min_off_; }
    const LatticePoint& max_offset() const { return max_off_; }

    LatticePoint sample(Rng& rng) const;

    // Law of -X (used for lower-tail estimates by reflection).
    IncrementDistribution reflected() const;

private:
    int dim_ = 0;
    std::vector<Atom> atoms_;  // sorted by point, unique
    std::vector<double> mean_;
    SquareMatrix second_;
    SquareMatrix mean_outer_;
    std::vector<double> cum_;  // cumulative probabilities for sampling
    double max_norm_ = 0.0;
    LatticePoint min_off_, max_off_;
};

}  // namespace urnlab

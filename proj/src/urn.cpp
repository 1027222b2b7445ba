#include "urnlab/urn.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace urnlab {

LatticePmf::LatticePmf(int dim, LatticePoint lo, LatticePoint hi)
    : dim_(dim), lo_(std::move(lo)), hi_(std::move(hi)) {
    if (dim_ < 1 || static_cast<int>(lo_.size()) != dim_ || static_cast<int>(hi_.size()) != dim_)
        throw std::invalid_argument("LatticePmf: bad box dimensions");
    std::size_t cells = 1;
    for (int d = 0; d < dim_; ++d) {
        if (hi_[d] < lo_[d]) throw std::invalid_argument("LatticePmf: empty box");
        cells *= static_cast<std::size_t>(hi_[d] - lo_[d] + 1);
    }
    stride_.assign(dim_, 1);
    for (int d = dim_ - 2; d >= 0; --d)
        stride_[d] = stride_[d + 1] * static_cast<std::size_t>(hi_[d + 1] - lo_[d + 1] + 1);
    mass_.assign(cells, 0.0);
}

LatticePmf LatticePmf::delta(const LatticePoint& p) {
    LatticePmf f(static_cast<int>(p.size()), p, p);
    f.mass_[0] = 1.0;
    return f;
}

LatticePmf LatticePmf::point_masses(int dim, const std::vector<Atom>& atoms) {
    if (atoms.empty()) throw std::invalid_argument("point_masses: empty support");
    LatticePoint lo = atoms.front().point, hi = atoms.front().point;
    double total = 0.0;
    for (const Atom& a : atoms) {
        if (static_cast<int>(a.point.size()) != dim)
            throw std::invalid_argument("point_masses: dimension mismatch");
        if (!(a.prob > 0.0)) throw std::invalid_argument("point_masses: masses must be positive");
        for (int d = 0; d < dim; ++d) {
            lo[d] = std::min(lo[d], a.point[d]);
            hi[d] = std::max(hi[d], a.point[d]);
        }
        total += a.prob;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("point_masses: total mass " + std::to_string(total) +
                                    " is not 1 within 1e-12");
    LatticePmf f(dim, lo, hi);
    for (const Atom& a : atoms) {
        std::size_t k = f.flat_index(a.point);
        if (f.mass_[k] != 0.0) throw std::invalid_argument("point_masses: duplicate point");
        f.mass_[k] = a.prob;
    }
    return f;
}

LatticePmf LatticePmf::from_spec_text(const std::string& text, int dim) {
    if (text == "delta0") return delta(LatticePoint(dim, 0));
    if (text == "uniform1d") {
        if (dim != 1) throw std::invalid_argument("u0 preset 'uniform1d' needs a dim-1 model");
        std::vector<Atom> atoms;
        for (int k = -2; k <= 2; ++k) atoms.push_back({{k}, 0.2});
        return point_masses(1, atoms);
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("u0 spec is not a preset or valid JSON: ") +
                                    e.what());
    }
    const int jd = j.contains("dim") ? j.at("dim").get<int>() : dim;
    if (jd != dim) throw std::invalid_argument("u0 spec dimension does not match the model");
    std::vector<Atom> atoms;
    for (const auto& ja : j.at("atoms"))
        atoms.push_back({ja.at("point").get<std::vector<int>>(), ja.at("prob").get<double>()});
    return point_masses(dim, atoms);
}

bool LatticePmf::contains(const LatticePoint& p) const {
    for (int d = 0; d < dim_; ++d)
        if (p[d] < lo_[d] || p[d] > hi_[d]) return false;
    return true;
}

std::size_t LatticePmf::flat_index(const LatticePoint& p) const {
    std::size_t k = 0;
    for (int d = 0; d < dim_; ++d) k += static_cast<std::size_t>(p[d] - lo_[d]) * stride_[d];
    return k;
}

double LatticePmf::at(const LatticePoint& p) const {
    if (static_cast<int>(p.size()) != dim_)
        throw std::invalid_argument("LatticePmf::at: dimension mismatch");
    return contains(p) ? mass_[flat_index(p)] : 0.0;
}

void LatticePmf::add(const LatticePoint& p, double mass) {
    if (!contains(p)) throw std::out_of_range("LatticePmf::add: point outside the box");
    mass_[flat_index(p)] += mass;
}

double LatticePmf::total_mass() const {
    double s = 0.0, c = 0.0;
    for (double m : mass_) {  // compensated; boxes can hold ~1e6 cells
        const double y = m - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

LatticePoint LatticePmf::point_at(std::size_t flat) const {
    LatticePoint p(dim_);
    for (int d = 0; d < dim_; ++d) {
        p[d] = lo_[d] + static_cast<int>(flat / stride_[d]);
        flat %= stride_[d];
    }
    return p;
}

void LatticePmf::trim(double eps) {
    LatticePoint nlo = hi_, nhi = lo_;
    bool any = false;
    LatticePoint p = lo_;
    for (std::size_t k = 0; k < mass_.size(); ++k) {
        if (mass_[k] < eps) {
            mass_[k] = 0.0;
        } else {
            any = true;
            for (int d = 0; d < dim_; ++d) {
                nlo[d] = std::min(nlo[d], p[d]);
                nhi[d] = std::max(nhi[d], p[d]);
            }
        }
        for (int d = dim_ - 1; d >= 0; --d) {
            if (++p[d] <= hi_[d]) break;
            p[d] = lo_[d];
        }
    }
    if (!any) {  // keep a one-cell box rather than an empty pmf
        nlo.assign(dim_, 0);
        nhi.assign(dim_, 0);
    }
    if (nlo == lo_ && nhi == hi_) return;
    LatticePmf shrunk(dim_, nlo, nhi);
    for_each([&](const LatticePoint& q, double m) { shrunk.mass_[shrunk.flat_index(q)] = m; });
    *this = std::move(shrunk);
}

std::vector<double> LatticePmf::mean() const {
    std::vector<double> m(dim_, 0.0);
    for_each([&](const LatticePoint& p, double w) {
        for (int d = 0; d < dim_; ++d) m[d] += w * p[d];
    });
    return m;
}

SquareMatrix LatticePmf::covariance() const {
    const std::vector<double> m = mean();
    SquareMatrix c(dim_);
    for_each([&](const LatticePoint& p, double w) {
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) c(i, j) += w * (p[i] - m[i]) * (p[j] - m[j]);
    });
    return c;
}

double LatticePmf::cdf(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("LatticePmf::cdf: dimension mismatch");
    double s = 0.0;
    for_each([&](const LatticePoint& p, double w) {
        for (int d = 0; d < dim_; ++d)
            if (static_cast<double>(p[d]) > x[d]) return;
        s += w;
    });
    return s;
}

void LatticePmf::check_dim1(const char* what) const {
    if (dim_ != 1) throw std::invalid_argument(std::string(what) + ": defined for dim 1 only");
}

double LatticePmf::tail_ge(double a) const {
    check_dim1("tail_ge");
    double s = 0.0;
    for (int k = hi_[0]; k >= lo_[0]; --k) {
        if (static_cast<double>(k) < a) break;
        s += mass_[static_cast<std::size_t>(k - lo_[0])];
    }
    return s;
}

double LatticePmf::tail_le(double a) const {
    check_dim1("tail_le");
    double s = 0.0;
    for (int k = lo_[0]; k <= hi_[0]; ++k) {
        if (static_cast<double>(k) > a) break;
        s += mass_[static_cast<std::size_t>(k - lo_[0])];
    }
    return s;
}

LatticePoint LatticePmf::sample(Rng& rng) const {
    const double target = rng.uniform01() * total_mass();
    double run = 0.0;
    std::size_t last_pos = 0;
    for (std::size_t k = 0; k < mass_.size(); ++k) {
        if (mass_[k] <= 0.0) continue;
        last_pos = k;
        run += mass_[k];
        if (target < run) return point_at(k);
    }
    return point_at(last_pos);
}

LatticePmf LatticePmf::reflected() const {
    LatticePoint nlo(dim_), nhi(dim_);
    for (int d = 0; d < dim_; ++d) {
        nlo[d] = -hi_[d];
        nhi[d] = -lo_[d];
    }
    LatticePmf r(dim_, nlo, nhi);
    for_each([&](const LatticePoint& p, double m) {
        LatticePoint q(dim_);
        for (int d = 0; d < dim_; ++d) q[d] = -p[d];
        r.mass_[r.flat_index(q)] = m;
    });
    return r;
}

void LatticePmf::write_csv(std::ostream& os) const {
    for (int d = 0; d < dim_; ++d) os << "c" << (d + 1) << ",";
    os << "mass\n";
    for_each([&](const LatticePoint& p, double m) {
        for (int d = 0; d < dim_; ++d) os << p[d] << ",";
        os << fmt_g12(m) << "\n";
    });
}

UrnState UrnState::from_pmf(const LatticePmf& u0) {
    UrnState s;
    u0.for_each([&](const LatticePoint& p, double m) { s.weights[p] = m; });
    s.total_mass = 1.0;
    s.time = 0;
    return s;
}

LatticePoint UrnState::sample_color(Rng& rng) const {
    const double target = rng.uniform01() * total_mass;
    double run = 0.0;
    for (const auto& [point, w] : weights) {
        run += w;
        if (target < run) return point;
    }
    return weights.rbegin()->first;
}

LatticePoint UrnState::step(const IncrementDistribution& dist, Rng& rng) {
    if (weights.empty()) throw std::logic_error("UrnState::step: empty configuration");
    if (dist.dim() != static_cast<int>(weights.begin()->first.size()))
        throw std::invalid_argument("UrnState::step: dimension mismatch");
    const LatticePoint chosen = sample_color(rng);
    for (const Atom& a : dist.atoms()) weights[point_add(chosen, a.point)] += a.prob;
    ++time;
    total_mass += 1.0;
    return chosen;
}

LatticePoint sample_z_direct(long n, const LatticePmf& u0, const IncrementDistribution& dist,
                             Rng& rng) {
    if (n < 0) throw std::invalid_argument("sample_z_direct: n must be >= 0");
    UrnState urn = UrnState::from_pmf(u0);
    for (long j = 0; j < n; ++j) urn.step(dist, rng);
    return urn.sample_color(rng);
}

LatticePoint sample_z_repr(long n, const LatticePmf& u0, const IncrementDistribution& dist,
                           Rng& rng) {
    if (n < 0) throw std::invalid_argument("sample_z_repr: n must be >= 0");
    LatticePoint z = u0.sample(rng);
    for (long j = 1; j <= n; ++j) {
        if (rng.uniform01() < 1.0 / static_cast<double>(j + 1))
            z = point_add(z, dist.sample(rng));
    }
    return z;
}

LatticePoint sample_z_repr_fast(long n, const LatticePmf& u0, const IncrementDistribution& dist,
                                Rng& rng) {
    if (n < 0) throw std::invalid_argument("sample_z_repr_fast: n must be >= 0");
    LatticePoint z = u0.sample(rng);
    // Success indices of the Bernoulli(1/(j+1)) sequence: given the last
    // index j, P(next success > k) = (j+1)/(k+1), inverted in one uniform.
    long j = 0;
    for (;;) {
        const double u = rng.uniform01();
        if (u <= 0.0) break;  // pushes the next success beyond any horizon
        const double next = std::ceil(static_cast<double>(j + 1) / u) - 1.0;
        if (next > static_cast<double>(n)) break;
        j = static_cast<long>(next);
        z = point_add(z, dist.sample(rng));
        if (j >= n) break;
    }
    return z;
}

namespace {

// out = (j/(j+1)) f + (1/(j+1)) (f convolved with the increment kernel)
LatticePmf thinned_step(const LatticePmf& f, const IncrementDistribution& dist, long j,
                        std::size_t max_cells) {
    const int dim = f.dim();
    LatticePoint lo(dim), hi(dim);
    std::size_t cells = 1;
    for (int d = 0; d < dim; ++d) {
        lo[d] = f.lo()[d] + std::min(dist.min_offset()[d], 0);
        hi[d] = f.hi()[d] + std::max(dist.max_offset()[d], 0);
        cells *= static_cast<std::size_t>(hi[d] - lo[d] + 1);
    }
    if (cells > max_cells)
        throw BudgetError("exact_pmf: box of " + std::to_string(cells) +
                          " cells exceeds the budget of " + std::to_string(max_cells));

    LatticePmf out(dim, lo, hi);
    const double stay = static_cast<double>(j) / static_cast<double>(j + 1);
    const double move = 1.0 / static_cast<double>(j + 1);

    // Per-atom offsets are constant in the flat indexing of `out`. For a
    // negative offset the unsigned value wraps; `base + shift` wraps back
    // to the true cell, since the target p + w is inside the box for every
    // source cell p by the box expansion above.
    std::vector<std::size_t> shift(dist.atoms().size());
    std::vector<double> weight(dist.atoms().size());
    LatticePoint probe(dim);
    for (std::size_t a = 0; a < dist.atoms().size(); ++a) {
        const Atom& atom = dist.atoms()[a];
        for (int d = 0; d < dim; ++d) probe[d] = lo[d] + atom.point[d];
        shift[a] = out.flat_index(probe);
        weight[a] = move * atom.prob;
    }

    const std::vector<double>& in = f.masses();
    std::vector<double>& dst = out.masses();
    LatticePoint p = f.lo();
    for (std::size_t k = 0; k < in.size(); ++k) {
        const double m = in[k];
        if (m > 0.0) {
            const std::size_t base = out.flat_index(p);
            dst[base] += stay * m;
            for (std::size_t a = 0; a < shift.size(); ++a) dst[base + shift[a]] += weight[a] * m;
        }
        for (int d = dim - 1; d >= 0; --d) {
            if (++p[d] <= f.hi()[d]) break;
            p[d] = f.lo()[d];
        }
    }
    return out;
}

}  // namespace

LatticePmf exact_pmf(long n, const LatticePmf& u0, const IncrementDistribution& dist,
                     const PmfBudget& budget) {
    if (n < 0) throw std::invalid_argument("exact_pmf: n must be >= 0");
    if (u0.dim() != dist.dim()) throw std::invalid_argument("exact_pmf: dimension mismatch");
    if (n > budget.max_n(dist.dim()))
        throw BudgetError("exact_pmf: n = " + std::to_string(n) + " exceeds the dim-" +
                          std::to_string(dist.dim()) + " budget of " +
                          std::to_string(budget.max_n(dist.dim())) +
                          "; use the Monte Carlo mode instead");
    LatticePmf f = u0;
    f.trim();
    for (long j = 1; j <= n; ++j) {
        f = thinned_step(f, dist, j, budget.max_cells);
        f.trim();
    }
    return f;
}

}  // namespace urnlab

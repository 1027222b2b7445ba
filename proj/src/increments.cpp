#include "urnlab/increments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace urnlab {

LatticePoint point_add(const LatticePoint& a, const LatticePoint& b) {
    if (a.size() != b.size()) throw std::invalid_argument("point_add: dimension mismatch");
    LatticePoint r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

double dot_point(const std::vector<double>& lambda, const LatticePoint& u) {
    if (lambda.size() != u.size()) throw std::invalid_argument("dot_point: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += lambda[i] * u[i];
    return s;
}

IncrementDistribution::IncrementDistribution(int dim, std::vector<Atom> atoms)
    : dim_(dim), atoms_(std::move(atoms)) {
    if (dim_ < 1 || dim_ > 8)
        throw std::invalid_argument("IncrementDistribution: dim must be in [1, 8]");
    if (atoms_.empty())
        throw std::invalid_argument("IncrementDistribution: support must be nonempty");

    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& a, const Atom& b) { return a.point < b.point; });

    double total = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const Atom& a = atoms_[i];
        if (static_cast<int>(a.point.size()) != dim_)
            throw std::invalid_argument("IncrementDistribution: atom dimension mismatch");
        if (!(a.prob > 0.0) || !std::isfinite(a.prob))
            throw std::invalid_argument("IncrementDistribution: probabilities must be positive");
        if (i > 0 && a.point == atoms_[i - 1].point)
            throw std::invalid_argument("IncrementDistribution: duplicate support point");
        total += a.prob;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("IncrementDistribution: probabilities sum to " +
                                    std::to_string(total) + ", not 1 within 1e-12");

    mean_.assign(dim_, 0.0);
    second_ = SquareMatrix(dim_);
    for (const Atom& a : atoms_) {
        for (int i = 0; i < dim_; ++i) {
            mean_[i] += a.prob * a.point[i];
            for (int j = 0; j < dim_; ++j) second_(i, j) += a.prob * a.point[i] * a.point[j];
        }
    }
    mean_outer_ = SquareMatrix(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) mean_outer_(i, j) = mean_[i] * mean_[j];

    cum_.resize(atoms_.size());
    double run = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        run += atoms_[i].prob;
        cum_[i] = run;
    }
    cum_.back() = 1.0;

    min_off_ = max_off_ = atoms_.front().point;
    for (const Atom& a : atoms_) {
        double n2 = 0.0;
        for (int i = 0; i < dim_; ++i) {
            min_off_[i] = std::min(min_off_[i], a.point[i]);
            max_off_[i] = std::max(max_off_[i], a.point[i]);
            n2 += static_cast<double>(a.point[i]) * a.point[i];
        }
        max_norm_ = std::max(max_norm_, std::sqrt(n2));
    }
}

IncrementDistribution IncrementDistribution::preset(const std::string& name) {
    if (name == "det1d") return IncrementDistribution(1, {{{1}, 1.0}});
    if (name == "ssrw1d") return IncrementDistribution(1, {{{1}, 0.5}, {{-1}, 0.5}});
    if (name == "ne2d") return IncrementDistribution(2, {{{1, 0}, 0.5}, {{0, 1}, 0.5}});
    throw std::invalid_argument("unknown increment preset '" + name + "'");
}

bool IncrementDistribution::is_preset(const std::string& name) {
    return name == "det1d" || name == "ssrw1d" || name == "ne2d";
}

IncrementDistribution IncrementDistribution::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("distribution spec is not valid JSON: ") + e.what());
    }
    if (!j.contains("dim") || !j.contains("atoms"))
        throw std::invalid_argument("distribution spec needs 'dim' and 'atoms'");
    const int dim = j.at("dim").get<int>();
    std::vector<Atom> atoms;
    for (const auto& ja : j.at("atoms")) {
        Atom a;
        a.point = ja.at("point").get<std::vector<int>>();
        a.prob = ja.at("prob").get<double>();
        atoms.push_back(std::move(a));
    }
    return IncrementDistribution(dim, std::move(atoms));
}

double IncrementDistribution::sigma2() const {
    if (dim_ != 1) throw std::invalid_argument("sigma2: defined for dim 1 only");
    return second_(0, 0);
}

double IncrementDistribution::mgf(const std::vector<double>& lambda) const {
    double s = 0.0;
    for (const Atom& a : atoms_) {
        const double t = dot_point(lambda, a.point);
        if (t > 700.0)
            throw std::domain_error("mgf: exponent above 700, lambda out of safe range");
        s += a.prob * std::exp(t);
    }
    return s;
}

std::vector<double> IncrementDistribution::mgf_grad(const std::vector<double>& lambda) const {
    std::vector<double> g(dim_, 0.0);
    for (const Atom& a : atoms_) {
        const double t = dot_point(lambda, a.point);
        if (t > 700.0)
            throw std::domain_error("mgf_grad: exponent above 700, lambda out of safe range");
        const double w = a.prob * std::exp(t);
        for (int i = 0; i < dim_; ++i) g[i] += w * a.point[i];
    }
    return g;
}

SquareMatrix IncrementDistribution::mgf_hess(const std::vector<double>& lambda) const {
    SquareMatrix h(dim_);
    for (const Atom& a : atoms_) {
        const double t = dot_point(lambda, a.point);
        if (t > 700.0)
            throw std::domain_error("mgf_hess: exponent above 700, lambda out of safe range");
        const double w = a.prob * std::exp(t);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) h(i, j) += w * a.point[i] * a.point[j];
    }
    return h;
}

LatticePoint IncrementDistribution::sample(Rng& rng) const {
    const double u = rng.uniform01();
    for (std::size_t i = 0; i < cum_.size(); ++i)
        if (u < cum_[i]) return atoms_[i].point;
    return atoms_.back().point;
}

IncrementDistribution IncrementDistribution::reflected() const {
    std::vector<Atom> refl = atoms_;
    for (Atom& a : refl)
        for (int& c : a.point) c = -c;
    return IncrementDistribution(dim_, std::move(refl));
}

}  // namespace urnlab

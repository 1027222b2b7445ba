#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "urnlab/increments.hpp"

using namespace urnlab;

TEST_CASE("construction validates its input") {
    CHECK_NOTHROW(IncrementDistribution::preset("det1d"));
    CHECK_NOTHROW(IncrementDistribution::preset("ssrw1d"));
    CHECK_NOTHROW(IncrementDistribution::preset("ne2d"));
    CHECK_THROWS_AS(IncrementDistribution::preset("nope"), std::invalid_argument);

    // mass 1.1
    CHECK_THROWS_AS(IncrementDistribution(1, {{{1}, 0.6}, {{-1}, 0.5}}), std::invalid_argument);
    // zero and negative probability
    CHECK_THROWS_AS(IncrementDistribution(1, {{{1}, 0.0}, {{-1}, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(IncrementDistribution(1, {{{1}, -0.5}, {{-1}, 1.5}}), std::invalid_argument);
    // duplicate points
    CHECK_THROWS_AS(IncrementDistribution(1, {{{1}, 0.5}, {{1}, 0.5}}), std::invalid_argument);
    // dimension mismatch
    CHECK_THROWS_AS(IncrementDistribution(2, {{{1}, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(IncrementDistribution(0, {{{}, 1.0}}), std::invalid_argument);
    // empty support
    CHECK_THROWS_AS(IncrementDistribution(1, {}), std::invalid_argument);
}

TEST_CASE("json specs parse and agree with presets") {
    auto j = IncrementDistribution::from_json_text(
        R"({"dim":1,"atoms":[{"point":[1],"prob":0.5},{"point":[-1],"prob":0.5}]})");
    auto p = IncrementDistribution::preset("ssrw1d");
    CHECK(j.dim() == p.dim());
    CHECK(j.atoms().size() == p.atoms().size());
    CHECK(j.mean()[0] == p.mean()[0]);
    CHECK_THROWS_AS(IncrementDistribution::from_json_text("{not json"), std::invalid_argument);
    CHECK_THROWS_AS(IncrementDistribution::from_json_text("{}"), std::invalid_argument);
}

TEST_CASE("moments of the presets") {
    auto det = IncrementDistribution::preset("det1d");
    CHECK(det.mean()[0] == 1.0);
    CHECK(det.second_moment()(0, 0) == 1.0);
    CHECK(det.mean_outer()(0, 0) == 1.0);

    auto ssrw = IncrementDistribution::preset("ssrw1d");
    CHECK(ssrw.mean()[0] == 0.0);
    CHECK(ssrw.second_moment()(0, 0) == 1.0);
    CHECK(ssrw.mean_outer()(0, 0) == 0.0);

    auto ne = IncrementDistribution::preset("ne2d");
    CHECK(ne.mean()[0] == 0.5);
    CHECK(ne.mean()[1] == 0.5);
    CHECK(ne.second_moment()(0, 0) == 0.5);
    CHECK(ne.second_moment()(0, 1) == 0.0);
    CHECK(ne.second_moment()(1, 1) == 0.5);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(ne.mean_outer()(i, j) == 0.25);
}

TEST_CASE("mgf matches the closed forms") {
    auto det = IncrementDistribution::preset("det1d");
    auto ssrw = IncrementDistribution::preset("ssrw1d");
    for (double lam = -3.0; lam <= 3.0; lam += 0.37) {
        CHECK(det.mgf({lam}) == doctest::Approx(std::exp(lam)).epsilon(1e-14));
        CHECK(ssrw.mgf({lam}) == doctest::Approx(std::cosh(lam)).epsilon(1e-14));
    }
    CHECK(det.mgf({0.0}) == 1.0);
    CHECK(ssrw.mgf({0.0}) == 1.0);
    CHECK(IncrementDistribution::preset("ne2d").mgf({0.0, 0.0}) == 1.0);

    CHECK_THROWS_AS(det.mgf({800.0}), std::domain_error);
    CHECK_NOTHROW(det.mgf({-800.0}));  // underflow side is harmless
}

static IncrementDistribution random_dist(std::mt19937_64& gen, int dim) {
    std::uniform_int_distribution<int> coord(-3, 3);
    std::uniform_real_distribution<double> mass(0.05, 1.0);
    std::vector<Atom> atoms;
    for (int tries = 0; tries < 50 && atoms.size() < 5; ++tries) {
        LatticePoint p(dim);
        for (int& c : p) c = coord(gen);
        bool dup = false;
        for (const Atom& a : atoms) dup = dup || a.point == p;
        if (!dup) atoms.push_back({p, mass(gen)});
    }
    double total = 0.0;
    for (const Atom& a : atoms) total += a.prob;
    for (Atom& a : atoms) a.prob /= total;
    return IncrementDistribution(dim, atoms);
}

TEST_CASE("mgf gradient: exact at zero, finite differences elsewhere") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> lam_draw(-1.5, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 1 + static_cast<int>(gen() % 3);
        IncrementDistribution dist = random_dist(gen, dim);

        std::vector<double> zero(dim, 0.0);
        std::vector<double> g0 = dist.mgf_grad(zero);
        for (int i = 0; i < dim; ++i) CHECK(std::fabs(g0[i] - dist.mean()[i]) <= 1e-12);

        std::vector<double> lam(dim);
        for (double& l : lam) l = lam_draw(gen);
        std::vector<double> g = dist.mgf_grad(lam);
        for (int i = 0; i < dim; ++i) {
            std::vector<double> up = lam, dn = lam;
            up[i] += 1e-6;
            dn[i] -= 1e-6;
            const double fd = (dist.mgf(up) - dist.mgf(dn)) / 2e-6;
            CHECK(std::fabs(g[i] - fd) <= 1e-6);
        }
    }
}

TEST_CASE("covariance Sigma - M is positive semidefinite") {
    std::mt19937_64 gen(555);
    std::vector<IncrementDistribution> dists = {IncrementDistribution::preset("det1d"),
                                                IncrementDistribution::preset("ssrw1d"),
                                                IncrementDistribution::preset("ne2d")};
    for (int trial = 0; trial < 10; ++trial)
        dists.push_back(random_dist(gen, 1 + static_cast<int>(gen() % 3)));
    for (const auto& dist : dists) {
        SquareMatrix cov = dist.second_moment() - dist.mean_outer();
        for (double ev : jacobi_eigen(cov).values) CHECK(ev >= -1e-10);
    }
}

TEST_CASE("reflection negates the mean") {
    auto ne = IncrementDistribution::preset("ne2d").reflected();
    CHECK(ne.mean()[0] == -0.5);
    CHECK(ne.mean()[1] == -0.5);
    CHECK(ne.second_moment()(0, 0) == 0.5);
}

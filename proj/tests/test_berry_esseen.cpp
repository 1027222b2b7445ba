#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "urnlab/berry_esseen.hpp"

using namespace urnlab;

static LatticePmf delta0(int dim) { return LatticePmf::delta(LatticePoint(dim, 0)); }

TEST_CASE("harmonic_tail pinned values and asymptotics") {
    CHECK(harmonic_tail(0) == 0.0);
    CHECK(harmonic_tail(1) == 0.5);
    CHECK(harmonic_tail(2) == doctest::Approx(5.0 / 6).epsilon(1e-15));
    const double h = harmonic_tail(1000000);
    CHECK(h > std::log(1e6) - 1.0);
    CHECK(h < std::log(1e6));
}

TEST_CASE("rho_moments_1d pinned values") {
    auto det = IncrementDistribution::preset("det1d");
    auto ssrw = IncrementDistribution::preset("ssrw1d");

    RhoMoments1d d1 = rho_moments_1d(1, det);
    CHECK(d1.rho2 == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(d1.rho3 == doctest::Approx(0.125).epsilon(1e-15));

    CHECK(rho_moments_1d(2, det).rho2 == doctest::Approx(17.0 / 72).epsilon(1e-14));

    RhoMoments1d s1 = rho_moments_1d(1, ssrw);
    CHECK(s1.rho2 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s1.rho3 == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS_AS(rho_moments_1d(1, IncrementDistribution::preset("ne2d")),
                    std::invalid_argument);
}

TEST_CASE("be_bound_1d pinned values") {
    CHECK(be_bound_1d(1, IncrementDistribution::preset("ssrw1d")) ==
          doctest::Approx(2.75 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(be_bound_1d(1, IncrementDistribution::preset("det1d")) ==
          doctest::Approx(2.75).epsilon(1e-14));
}

TEST_CASE("bound times sqrt(log n) settles at a positive constant") {
    for (const char* name : {"det1d", "ssrw1d"}) {
        auto dist = IncrementDistribution::preset(name);
        const double a = be_bound_1d(100000, dist) * std::sqrt(std::log(1e5));
        const double b = be_bound_1d(1000000, dist) * std::sqrt(std::log(1e6));
        CHECK(a > 0.0);
        CHECK(std::fabs(b - a) / a < 0.05);
    }
}

TEST_CASE("n rho2 / h_n and n rho3 / h_n settle at large n") {
    for (const char* name : {"det1d", "ssrw1d"}) {
        auto dist = IncrementDistribution::preset(name);
        const RhoMoments1d a = rho_moments_1d(100000, dist);
        const RhoMoments1d b = rho_moments_1d(1000000, dist);
        const double r2a = 100000 * a.rho2 / harmonic_tail(100000);
        const double r2b = 1000000 * b.rho2 / harmonic_tail(1000000);
        const double r3a = 100000 * a.rho3 / harmonic_tail(100000);
        const double r3b = 1000000 * b.rho3 / harmonic_tail(1000000);
        CHECK(std::fabs(r2b - r2a) / r2a < 0.05);
        CHECK(std::fabs(r3b - r3a) / r3a < 0.05);
    }
}

TEST_CASE("kolmogorov distance: unit jump against the normal") {
    // A point mass at the origin: the gap at 0 is max(Phi(0), 1 - Phi(0)) = 1/2.
    CHECK(kolmogorov_distance_1d(delta0(1), 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(kolmogorov_distance_1d(delta0(1), 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("kolmogorov distance is translation invariant") {
    auto ssrw = IncrementDistribution::preset("ssrw1d");
    const LatticePmf f = exact_pmf(50, delta0(1), ssrw);
    LatticePmf g = exact_pmf(50, LatticePmf::delta({7}), ssrw);
    const double a = kolmogorov_distance_1d(f, 0.25, 2.0);
    const double b = kolmogorov_distance_1d(g, 7.25, 2.0);
    CHECK(a == doctest::Approx(b).epsilon(1e-13));
}

TEST_CASE("exact distance respects the explicit bound") {
    auto ssrw = IncrementDistribution::preset("ssrw1d");
    const long n = 100;
    const RhoMoments1d r = rho_moments_1d(n, ssrw);
    const double d = kolmogorov_distance_1d(exact_pmf(n, delta0(1), ssrw), 0.0,
                                            std::sqrt(n * r.rho2));
    CHECK(d <= be_bound_1d(n, ssrw));
    CHECK(d > 0.0);
}

TEST_CASE("sample-based distance approaches the exact one") {
    auto ssrw = IncrementDistribution::preset("ssrw1d");
    const long n = 200;
    const RhoMoments1d r = rho_moments_1d(n, ssrw);
    const double scale = std::sqrt(n * r.rho2);
    const double exact = kolmogorov_distance_1d(exact_pmf(n, delta0(1), ssrw), 0.0, scale);
    Rng rng(31337);
    std::vector<long> vals;
    for (long i = 0; i < 200000; ++i)
        vals.push_back(sample_z_repr_fast(n, delta0(1), ssrw, rng)[0]);
    const double approx = kolmogorov_distance_samples_1d(std::move(vals), 0.0, scale);
    CHECK(std::fabs(approx - exact) < 0.01);  // DKW at 2e5 samples is ~0.004 at 99%
}

TEST_CASE("sigma_n matrix: dim-1 consistency and the 2-d pinned case") {
    auto det = IncrementDistribution::preset("det1d");
    for (long n : {1L, 10L, 1000L}) {
        const double want = n * rho_moments_1d(n, det).rho2;
        CHECK(sigma_n_matrix(n, det)(0, 0) == doctest::Approx(want).epsilon(1e-13));
    }
    auto ne = IncrementDistribution::preset("ne2d");
    SquareMatrix s1 = sigma_n_matrix(1, ne);
    CHECK(s1(0, 0) == doctest::Approx(3.0 / 16).epsilon(1e-15));
    CHECK(s1(0, 1) == doctest::Approx(-1.0 / 16).epsilon(1e-15));
    CHECK(s1(1, 0) == doctest::Approx(-1.0 / 16).epsilon(1e-15));
    CHECK(s1(1, 1) == doctest::Approx(3.0 / 16).epsilon(1e-15));
}

TEST_CASE("sigma_n / h_n approaches the second-moment matrix") {
    auto ne = IncrementDistribution::preset("ne2d");
    double prev_gap = 1e9;
    for (long n : {100L, 1000L, 10000L}) {
        const SquareMatrix s = sigma_n_matrix(n, ne);
        const double h = harmonic_tail(n);
        double gap = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                gap = std::max(gap, std::fabs(s(i, j) / h - ne.second_moment()(i, j)));
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 0.05);
}

TEST_CASE("variance and covariance bridges to the exact law") {
    // dim 1: Var(Z_n) = n rho2 for delta_0 starts
    for (const char* name : {"det1d", "ssrw1d"}) {
        auto dist = IncrementDistribution::preset(name);
        for (long n : {10L, 1000L}) {
            const double var = exact_pmf(n, delta0(1), dist).covariance()(0, 0);
            const double want = n * rho_moments_1d(n, dist).rho2;
            CHECK(std::fabs(var - want) <= 1e-10 * want);
        }
    }
    // dim 2: Cov(Z_n) = Sigma_n entrywise
    auto ne = IncrementDistribution::preset("ne2d");
    for (long n : {10L, 100L}) {
        const SquareMatrix cov = exact_pmf(n, delta0(2), ne).covariance();
        const SquareMatrix want = sigma_n_matrix(n, ne);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(std::fabs(cov(i, j) - want(i, j)) <=
                      1e-9 * std::max(1.0, std::fabs(want(i, j))));
    }
}

static IncrementDistribution random_dist_1d(std::mt19937_64& gen) {
    std::uniform_int_distribution<int> coord(-3, 3);
    std::uniform_real_distribution<double> mass(0.05, 1.0);
    std::vector<Atom> atoms;
    while (atoms.size() < 3) {
        LatticePoint p{coord(gen)};
        bool dup = false;
        for (const Atom& a : atoms) dup = dup || a.point == p;
        if (!dup) atoms.push_back({p, mass(gen)});
    }
    double total = 0.0;
    for (const Atom& a : atoms) total += a.prob;
    for (Atom& a : atoms) a.prob /= total;
    return IncrementDistribution(1, atoms);
}

TEST_CASE("rho_moments_d reduces to the 1-d moments when d = 1") {
    std::mt19937_64 gen(808);
    std::vector<IncrementDistribution> dists = {IncrementDistribution::preset("det1d"),
                                                IncrementDistribution::preset("ssrw1d")};
    for (int k = 0; k < 5; ++k) dists.push_back(random_dist_1d(gen));
    for (const auto& dist : dists) {
        for (long n : {1L, 7L, 100L}) {
            const RhoMoments1d one = rho_moments_1d(n, dist);
            const RhoMomentsD gen_d = rho_moments_d(n, dist);
            CHECK(std::fabs(gen_d.rho2 - one.rho2) <= 1e-12);
            CHECK(std::fabs(gen_d.rho3 - one.rho3) <= 1e-12);
            CHECK(gen_d.gamma[0] == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("rho_moments_d pinned 2-d values") {
    auto ne = IncrementDistribution::preset("ne2d");
    const RhoMomentsD r = rho_moments_d(1, ne);
    CHECK(r.rho2 == doctest::Approx(1.0 / 6).epsilon(1e-14));
    // coordinate exchange symmetry of the preset forces gamma = 1
    for (long n : {1L, 10L, 100L}) {
        const RhoMomentsD rn = rho_moments_d(n, ne);
        CHECK(rn.gamma[0] == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(rn.gamma[1] == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("degenerate 2-d laws are rejected") {
    // increments supported on the diagonal: Sigma_n is singular
    IncrementDistribution diag(2, {{{1, 1}, 1.0}});
    CHECK_THROWS_AS(sigma_n_whitener(10, diag), std::domain_error);
}

TEST_CASE("multivariate sup distance: single atom at the origin") {
    const SupDistance sd = multivariate_sup_distance(delta0(2), {0.0, 0.0},
                                                     SquareMatrix::identity(2));
    CHECK(sd.value >= 1.0 - 0.25);
    CHECK(sd.eval_points == 1);
}

TEST_CASE("multivariate sup distance matches the 1-d evaluator from above") {
    auto ssrw = IncrementDistribution::preset("ssrw1d");
    const long n = 100;
    const LatticePmf pmf = exact_pmf(n, delta0(1), ssrw);
    const double scale = std::sqrt(n * rho_moments_1d(n, ssrw).rho2);
    SquareMatrix w(1);
    w(0, 0) = 1.0 / scale;
    const SupDistance sd = multivariate_sup_distance(pmf, {0.0}, w);
    const double kolm = kolmogorov_distance_1d(pmf, 0.0, scale);
    CHECK(sd.value <= kolm + 1e-12);       // jump evaluation set is one-sided in d >= 1 mode
    CHECK(sd.value >= 0.5 * kolm);
}

TEST_CASE("multivariate sup distance: coordinate exchange invariance") {
    auto ne = IncrementDistribution::preset("ne2d");
    const long n = 60;
    const LatticePmf pmf = exact_pmf(n, delta0(2), ne);
    const double h = harmonic_tail(n);
    const std::vector<double> center{0.5 * h, 0.5 * h};
    const SquareMatrix w = sigma_n_whitener(n, ne);
    const SupDistance a = multivariate_sup_distance(pmf, center, w);

    // swap the two coordinates of the pmf; the preset is exchangeable
    std::vector<Atom> swapped;
    pmf.for_each([&](const LatticePoint& p, double m) {
        swapped.push_back({{p[1], p[0]}, m});
    });
    const LatticePmf pmf_swapped = LatticePmf::point_masses(2, swapped);
    const SupDistance b = multivariate_sup_distance(pmf_swapped, center, w);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
    CHECK(a.eval_points == b.eval_points);

    CHECK_THROWS_AS(multivariate_sup_distance(pmf, center, SquareMatrix(2)), std::domain_error);
}

TEST_CASE("rate regression recovers synthetic slopes") {
    std::vector<long> ns{100, 1000, 10000, 100000};
    std::vector<double> inv_sqrt, flat;
    for (long n : ns) {
        inv_sqrt.push_back(0.37 / std::sqrt(std::log(static_cast<double>(n))));
        flat.push_back(0.21);
    }
    CHECK(rate_regression(ns, inv_sqrt) == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(std::fabs(rate_regression(ns, flat)) < 1e-12);

    CHECK_THROWS_AS(rate_regression({10, 100, 1000}, {0.1, 0.1, 0.1}), std::invalid_argument);
    CHECK_THROWS_AS(rate_regression({10, 10, 10, 10}, {0.1, 0.1, 0.1, 0.1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(rate_regression(ns, {0.1, -0.1, 0.1, 0.1}), std::invalid_argument);
}

TEST_CASE("report rows: exact and Monte Carlo modes") {
    auto ssrw = IncrementDistribution::preset("ssrw1d");
    BEOptions opt;
    const BEReport row = be_report_row_1d(100, ssrw, delta0(1), opt, nullptr);
    CHECK(row.ratio <= 1.0);
    CHECK(row.ratio > 0.0);
    CHECK(row.h_n == doctest::Approx(harmonic_tail(100)).epsilon(1e-15));

    BEOptions mc;
    mc.mode = EvalMode::MonteCarlo;
    mc.samples = 50000;
    Rng rng(9);
    const BEReport mc_row = be_report_row_1d(100, ssrw, delta0(1), mc, &rng);
    CHECK(std::fabs(mc_row.measured_distance - row.measured_distance) < 0.02);
    CHECK_THROWS_AS(be_report_row_1d(100, ssrw, delta0(1), mc, nullptr), std::invalid_argument);

    BEOptions general;
    general.general = true;
    const BEReport grow = be_report_row_1d(1000, ssrw, delta0(1), general, nullptr);
    CHECK(grow.measured_distance > 0.0);
    // general mode reports the bare rate, without the explicit constant
    CHECK(grow.bound_value ==
          doctest::Approx(grow.rho3 / (std::sqrt(1000.0) * std::pow(grow.rho2, 1.5)))
              .epsilon(1e-12));
}

TEST_CASE("d-dim report row is exchange stable") {
    auto ne = IncrementDistribution::preset("ne2d");
    BEOptions opt;
    const BEReport row = be_report_row_d(50, ne, delta0(2), opt, nullptr);
    CHECK(row.measured_distance > 0.0);
    CHECK(row.measured_distance < 1.0);
    CHECK(row.eval_points > 0);

    // the Monte Carlo path lands near the exact distance and includes the
    // refinement grid in its evaluation set
    BEOptions mc;
    mc.mode = EvalMode::MonteCarlo;
    mc.samples = 20000;
    Rng rng(71);
    const BEReport mc_row = be_report_row_d(50, ne, delta0(2), mc, &rng);
    CHECK(std::fabs(mc_row.measured_distance - row.measured_distance) < 0.03);
    CHECK(mc_row.eval_points > 20000);
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "urnlab/berry_esseen.hpp"
#include "urnlab/ldp.hpp"

namespace py = pybind11;
using namespace urnlab;

namespace {

// (points, masses) view of a pmf for easy numpy-side consumption.
std::pair<std::vector<LatticePoint>, std::vector<double>> pmf_items(const LatticePmf& pmf) {
    std::vector<LatticePoint> pts;
    std::vector<double> ms;
    pmf.for_each([&](const LatticePoint& p, double m) {
        pts.push_back(p);
        ms.push_back(m);
    });
    return {std::move(pts), std::move(ms)};
}

std::vector<std::vector<double>> matrix_rows(const SquareMatrix& m) {
    std::vector<std::vector<double>> rows(m.dim(), std::vector<double>(m.dim()));
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) rows[i][j] = m(i, j);
    return rows;
}

LatticePmf resolve_u0_py(const std::string& spec, int dim) {
    return LatticePmf::from_spec_text(spec, dim);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact laws, normal-approximation bounds, and rare-event rates for "
              "lattice urn processes driven by bounded random-walk kernels.";

    py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);

    py::class_<IncrementDistribution>(m, "IncrementDistribution")
        .def_static("preset", &IncrementDistribution::preset, py::arg("name"))
        .def_static("from_json", &IncrementDistribution::from_json_text, py::arg("text"))
        .def_property_readonly("dim", &IncrementDistribution::dim)
        .def_property_readonly("mean", &IncrementDistribution::mean)
        .def_property_readonly("second_moment",
                               [](const IncrementDistribution& d) {
                                   return matrix_rows(d.second_moment());
                               })
        .def_property_readonly("mean_outer",
                               [](const IncrementDistribution& d) {
                                   return matrix_rows(d.mean_outer());
                               })
        .def("atoms",
             [](const IncrementDistribution& d) {
                 std::vector<std::pair<LatticePoint, double>> out;
                 for (const Atom& a : d.atoms()) out.emplace_back(a.point, a.prob);
                 return out;
             })
        .def("mgf", &IncrementDistribution::mgf, py::arg("lam"))
        .def("mgf_grad", &IncrementDistribution::mgf_grad, py::arg("lam"))
        .def("reflected", &IncrementDistribution::reflected);

    py::class_<LatticePmf>(m, "LatticePmf")
        .def_property_readonly("dim", &LatticePmf::dim)
        .def("items", &pmf_items)
        .def("at", &LatticePmf::at, py::arg("point"))
        .def("total_mass", &LatticePmf::total_mass)
        .def("mean", &LatticePmf::mean)
        .def("covariance", [](const LatticePmf& f) { return matrix_rows(f.covariance()); })
        .def("cdf", &LatticePmf::cdf, py::arg("x"))
        .def("tail_ge", &LatticePmf::tail_ge, py::arg("a"))
        .def("tail_le", &LatticePmf::tail_le, py::arg("a"))
        .def("to_csv", [](const LatticePmf& f) {
            std::ostringstream os;
            f.write_csv(os);
            return os.str();
        });

    m.def(
        "exact_pmf",
        [](long n, const IncrementDistribution& dist, const std::string& u0) {
            return exact_pmf(n, resolve_u0_py(u0, dist.dim()), dist);
        },
        py::arg("n"), py::arg("dist"), py::arg("u0") = "delta0");

    m.def(
        "sample_z",
        [](long n, const IncrementDistribution& dist, std::uint64_t seed, long draws,
           const std::string& sampler, const std::string& u0) {
            Rng rng(seed);
            const LatticePmf start = resolve_u0_py(u0, dist.dim());
            std::vector<LatticePoint> out;
            out.reserve(static_cast<std::size_t>(draws));
            for (long i = 0; i < draws; ++i) {
                if (sampler == "direct")
                    out.push_back(sample_z_direct(n, start, dist, rng));
                else if (sampler == "repr")
                    out.push_back(sample_z_repr(n, start, dist, rng));
                else if (sampler == "repr_fast")
                    out.push_back(sample_z_repr_fast(n, start, dist, rng));
                else
                    throw std::invalid_argument("sampler must be direct|repr|repr_fast");
            }
            return out;
        },
        py::arg("n"), py::arg("dist"), py::arg("seed"), py::arg("draws") = 1,
        py::arg("sampler") = "repr", py::arg("u0") = "delta0");

    m.def("std_normal_cdf", &std_normal_cdf, py::arg("x"));
    m.def("harmonic_tail", &harmonic_tail, py::arg("n"));
    m.def(
        "rho_moments_1d",
        [](long n, const IncrementDistribution& dist) {
            const RhoMoments1d r = rho_moments_1d(n, dist);
            return std::make_pair(r.rho2, r.rho3);
        },
        py::arg("n"), py::arg("dist"));
    m.def("be_bound_1d", &be_bound_1d, py::arg("n"), py::arg("dist"));
    m.def("kolmogorov_distance_1d", &kolmogorov_distance_1d, py::arg("pmf"), py::arg("center"),
          py::arg("scale"));
    m.def(
        "sigma_n_matrix",
        [](long n, const IncrementDistribution& dist) {
            return matrix_rows(sigma_n_matrix(n, dist));
        },
        py::arg("n"), py::arg("dist"));
    m.def(
        "rho_moments_d",
        [](long n, const IncrementDistribution& dist) {
            const RhoMomentsD r = rho_moments_d(n, dist);
            return py::make_tuple(r.rho2, r.rho3, r.gamma);
        },
        py::arg("n"), py::arg("dist"));
    m.def(
        "multivariate_sup_distance",
        [](const LatticePmf& pmf, const std::vector<double>& center,
           const std::vector<std::vector<double>>& whitener) {
            SquareMatrix w(static_cast<int>(whitener.size()));
            for (int i = 0; i < w.dim(); ++i)
                for (int j = 0; j < w.dim(); ++j) w(i, j) = whitener[i][j];
            const SupDistance sd = multivariate_sup_distance(pmf, center, w);
            return std::make_pair(sd.value, sd.eval_points);
        },
        py::arg("pmf"), py::arg("center"), py::arg("whitener"));
    m.def("rate_regression", &rate_regression, py::arg("n_list"), py::arg("distances"));

    m.def("log_product_pi", &log_product_pi, py::arg("z"), py::arg("n"));
    m.def("gauss_ratio", &gauss_ratio, py::arg("z"), py::arg("n"));
    m.def("lambda_n", &lambda_n, py::arg("lam"), py::arg("n"), py::arg("dist"));

    py::class_<RateFunctionResult>(m, "RateFunctionResult")
        .def_property_readonly("x", [](const RateFunctionResult& r) { return r.x; })
        .def_property_readonly("value", [](const RateFunctionResult& r) { return r.value; })
        .def_property_readonly("lambda_star",
                               [](const RateFunctionResult& r) { return r.lambda_star; })
        .def_property_readonly("converged", &RateFunctionResult::converged)
        .def_property_readonly("iterations",
                               [](const RateFunctionResult& r) { return r.iterations; })
        .def("to_json", &RateFunctionResult::to_json_text);

    m.def("rate_function", &rate_function_numeric, py::arg("x"), py::arg("dist"));
    m.def("rate_function_closed", &rate_function_closed, py::arg("preset"), py::arg("x"));

    m.def(
        "compound_poisson_pmf",
        [](const IncrementDistribution& dist, double tol) {
            const CompoundPoissonPmf cp = compound_poisson_pmf(dist, tol);
            return py::make_tuple(cp.pmf, cp.deficit, cp.terms);
        },
        py::arg("dist"), py::arg("mass_tolerance") = 1e-12);
    m.def(
        "compound_poisson_sample",
        [](const IncrementDistribution& dist, std::uint64_t seed, long draws) {
            Rng rng(seed);
            std::vector<LatticePoint> out;
            for (long i = 0; i < draws; ++i) out.push_back(compound_poisson_sample(dist, rng));
            return out;
        },
        py::arg("dist"), py::arg("seed"), py::arg("draws") = 1);
    m.def(
        "tilted_tail_mc",
        [](long n, double a, const IncrementDistribution& dist, long samples,
           std::uint64_t seed) {
            Rng rng(seed);
            const TailEstimate est = tilted_tail_mc(n, a, dist, samples, rng);
            return py::make_tuple(est.estimate, est.rel_std_err, est.samples);
        },
        py::arg("n"), py::arg("a"), py::arg("dist"), py::arg("samples"), py::arg("seed"));
    m.def(
        "tail_exponent_report",
        [](const std::vector<long>& n_list, double eps, const IncrementDistribution& dist,
           bool upper, long samples, std::optional<std::uint64_t> seed, const std::string& mode,
           const std::string& u0) {
            std::optional<Rng> rng;
            if (seed) rng.emplace(*seed);
            const auto rows =
                tail_exponent_report(n_list, eps, dist, resolve_u0_py(u0, dist.dim()), upper,
                                     samples, rng ? &*rng : nullptr, parse_eval_mode(mode));
            py::list out;
            for (const TailRecord& r : rows) {
                py::dict d;
                d["n"] = r.n;
                d["tail_prob"] = r.tail_prob;
                d["std_err"] = r.std_err;
                d["exponent"] = r.exponent;
                d["target_I"] = r.target_rate;
                d["exact"] = r.exact;
                out.append(d);
            }
            return out;
        },
        py::arg("n_list"), py::arg("eps"), py::arg("dist"), py::arg("upper") = true,
        py::arg("samples") = 20000, py::arg("seed") = py::none(), py::arg("mode") = "auto",
        py::arg("u0") = "delta0");
    m.def(
        "rate_properties",
        [](const IncrementDistribution& dist, const std::vector<std::vector<double>>& grid) {
            py::list out;
            for (const PropertyCheck& c : rate_properties(dist, grid)) {
                py::dict d;
                d["name"] = c.name;
                d["pass"] = c.pass;
                d["detail"] = c.detail;
                out.append(d);
            }
            return out;
        },
        py::arg("dist"), py::arg("grid"));

    m.def(
        "be_report",
        [](const std::vector<long>& n_list, const IncrementDistribution& dist, bool general,
           const std::string& mode, long samples, std::optional<std::uint64_t> seed,
           const std::string& u0) {
            BEOptions opt;
            opt.general = general;
            opt.mode = parse_eval_mode(mode);
            opt.samples = samples;
            std::optional<Rng> rng;
            if (seed) rng.emplace(*seed);
            const LatticePmf start = resolve_u0_py(u0, dist.dim());
            py::list out;
            for (long n : n_list) {
                const BEReport row =
                    dist.dim() == 1
                        ? be_report_row_1d(n, dist, start, opt, rng ? &*rng : nullptr)
                        : be_report_row_d(n, dist, start, opt, rng ? &*rng : nullptr);
                py::dict d;
                d["n"] = row.n;
                d["h_n"] = row.h_n;
                d["rho2"] = row.rho2;
                d["rho3"] = row.rho3;
                d["bound"] = row.bound_value;
                d["distance"] = row.measured_distance;
                d["ratio"] = row.ratio;
                d["scaling"] = row.scaling;
                out.append(d);
            }
            return out;
        },
        py::arg("n_list"), py::arg("dist"), py::arg("general") = false, py::arg("mode") = "auto",
        py::arg("samples") = 200000, py::arg("seed") = py::none(), py::arg("u0") = "delta0");
}

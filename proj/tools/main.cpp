// urnlab: batch reports for the lattice urn laboratory.
//
// Exit codes: 0 success, 2 config error, 3 resource-budget error,
// 4 failed invariant in a check command.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "urnlab/berry_esseen.hpp"
#include "urnlab/ldp.hpp"

using namespace urnlab;

namespace {

IncrementDistribution resolve_dist(const std::string& spec) {
    if (IncrementDistribution::is_preset(spec)) return IncrementDistribution::preset(spec);
    if (!spec.empty() && spec.front() == '{') return IncrementDistribution::from_json_text(spec);
    std::ifstream in(spec);
    if (!in) throw std::invalid_argument("distribution spec '" + spec +
                                         "' is not a preset, inline JSON, or readable file");
    std::stringstream buf;
    buf << in.rdbuf();
    return IncrementDistribution::from_json_text(buf.str());
}

LatticePmf resolve_u0(const std::string& spec, int dim) {
    if (spec == "delta0" || spec == "uniform1d" || (!spec.empty() && spec.front() == '{'))
        return LatticePmf::from_spec_text(spec, dim);
    std::ifstream in(spec);
    if (!in) throw std::invalid_argument("u0 spec '" + spec +
                                         "' is not a preset, inline JSON, or readable file");
    std::stringstream buf;
    buf << in.rdbuf();
    return LatticePmf::from_spec_text(buf.str(), dim);
}

std::filesystem::path resolve_out(const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("URNLAB_OUT_DIR")) p = std::filesystem::path(dir) / p;
    }
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    return p;
}

std::ofstream open_out(const std::string& path) {
    const std::filesystem::path p = resolve_out(path);
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::invalid_argument("cannot open output file '" + p.string() + "'");
    return os;
}

// "5,10,100", or "logspace:1:4:7" for 7 log-spaced values between 10^1
// and 10^4 (rounded to integers, deduplicated).
std::vector<long> parse_n_list(const std::string& text) {
    std::vector<long> out;
    if (text.rfind("logspace:", 0) == 0) {
        double a = 0, b = 0;
        long k = 0;
        char c1 = 0, c2 = 0;
        std::istringstream is(text.substr(9));
        if (!(is >> a >> c1 >> b >> c2 >> k) || c1 != ':' || c2 != ':' || k < 2)
            throw std::invalid_argument("bad logspace spec '" + text +
                                        "' (expected logspace:a:b:k with k >= 2)");
        for (long i = 0; i < k; ++i) {
            const double e = a + (b - a) * static_cast<double>(i) / static_cast<double>(k - 1);
            const long n = std::lround(std::pow(10.0, e));
            if (out.empty() || out.back() != n) out.push_back(n);
        }
        return out;
    }
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stol(item));
    }
    if (out.empty()) throw std::invalid_argument("empty n list '" + text + "'");
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::invalid_argument("empty list '" + text + "'");
    return out;
}

// Grids: "a:b:step" inclusive ranges, "x1,x2,..." scalar lists, or
// semicolon-separated vectors "0.2,0.1;0.5,0.5" for dim > 1.
std::vector<std::vector<double>> parse_grid(const std::string& text, int dim) {
    std::vector<std::vector<double>> grid;
    if (text.find(';') != std::string::npos) {
        std::istringstream is(text);
        std::string item;
        while (std::getline(is, item, ';')) {
            if (item.empty()) continue;
            grid.push_back(parse_double_list(item));
        }
    } else if (text.find(':') != std::string::npos) {
        double a = 0, b = 0, step = 0;
        char c1 = 0, c2 = 0;
        std::istringstream is(text);
        if (!(is >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0))
            throw std::invalid_argument("bad grid spec '" + text + "' (expected a:b:step)");
        for (double x = a; x <= b + 1e-12; x += step) grid.push_back({x});
    } else {
        for (double x : parse_double_list(text)) grid.push_back({x});
    }
    for (const auto& x : grid)
        if (static_cast<int>(x.size()) != dim)
            throw std::invalid_argument("grid point dimension does not match the model");
    return grid;
}

std::string join_vector(const std::vector<double>& v, char sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += fmt_g12(v[i]);
    }
    return s;
}

struct CommonArgs {
    std::string dist;
    std::string u0 = "delta0";
    std::string out;
    std::string mode = "auto";
    std::optional<std::uint64_t> seed;
    long samples = 20000;
};

// Stochastic work demands a seed up front, including auto mode rows that
// will fall back to sampling once n passes the exact budget.
Rng require_seed(const CommonArgs& args, const char* command) {
    if (!args.seed)
        throw std::invalid_argument(std::string(command) +
                                    ": --seed is required for stochastic runs");
    return Rng(*args.seed);
}

bool any_beyond_budget(const std::vector<long>& ns, int dim, const PmfBudget& budget) {
    for (long n : ns)
        if (n > budget.max_n(dim)) return true;
    return false;
}

int run_simulate(const CommonArgs& args, long n, long draws, const std::string& sampler) {
    const IncrementDistribution dist = resolve_dist(args.dist);
    const LatticePmf u0 = resolve_u0(args.u0, dist.dim());
    Rng rng = require_seed(args, "simulate");

    std::map<LatticePoint, long> hist;
    for (long i = 0; i < draws; ++i) {
        LatticePoint z;
        if (sampler == "direct")
            z = sample_z_direct(n, u0, dist, rng);
        else if (sampler == "repr")
            z = n > 10000 ? sample_z_repr_fast(n, u0, dist, rng) : sample_z_repr(n, u0, dist, rng);
        else
            throw std::invalid_argument("unknown sampler '" + sampler + "' (direct|repr)");
        ++hist[z];
    }
    std::ofstream os = open_out(args.out);
    for (int d = 0; d < dist.dim(); ++d) os << "c" << (d + 1) << ",";
    os << "count\n";
    for (const auto& [p, c] : hist) {
        for (int v : p) os << v << ",";
        os << c << "\n";
    }
    std::cout << "simulate: " << draws << " draws of Z_" << n << " (" << sampler << ") over "
              << hist.size() << " colors -> " << args.out << "\n";
    return 0;
}

int run_exact_pmf(const CommonArgs& args, long n) {
    const IncrementDistribution dist = resolve_dist(args.dist);
    const LatticePmf u0 = resolve_u0(args.u0, dist.dim());
    const LatticePmf pmf = exact_pmf(n, u0, dist);
    std::ofstream os = open_out(args.out);
    pmf.write_csv(os);
    std::cout << "exact-pmf: law of Z_" << n << " on " << pmf.cell_count() << " cells, mass "
              << fmt_g12(pmf.total_mass()) << " -> " << args.out << "\n";
    return 0;
}

int run_be_report(const CommonArgs& args, const std::string& n_text, bool general, bool ddim) {
    const IncrementDistribution dist = resolve_dist(args.dist);
    const LatticePmf u0 = resolve_u0(args.u0, dist.dim());
    const std::vector<long> ns = parse_n_list(n_text);

    BEOptions opt;
    opt.general = general;
    opt.mode = parse_eval_mode(args.mode);
    opt.samples = args.samples;

    const bool stochastic = opt.mode == EvalMode::MonteCarlo ||
                            (opt.mode == EvalMode::Auto &&
                             any_beyond_budget(ns, dist.dim(), opt.budget));
    std::optional<Rng> rng;
    if (stochastic) rng.emplace(require_seed(args, ddim ? "be-report-d" : "be-report"));

    std::vector<BEReport> rows;
    for (long n : ns)
        rows.push_back(ddim ? be_report_row_d(n, dist, u0, opt, rng ? &*rng : nullptr)
                            : be_report_row_1d(n, dist, u0, opt, rng ? &*rng : nullptr));

    std::ofstream os = open_out(args.out);
    if (ddim)
        write_be_csv_d(os, rows);
    else
        write_be_csv(os, rows);

    double max_ratio = 0.0;
    for (const BEReport& r : rows) max_ratio = std::max(max_ratio, r.ratio);
    std::cout << (ddim ? "be-report-d" : "be-report") << ": " << rows.size()
              << " rows, max ratio " << fmt_g12(max_ratio);
    if (stochastic) {
        // DKW-style half width for the sampled empirical CDF, delta = 1e-3
        const double dkw = std::sqrt(std::log(2.0 / 1e-3) / (2.0 * args.samples));
        std::cout << ", sampled distances carry +-" << fmt_g12(dkw) << " (99.9% DKW)";
    }
    std::cout << " -> " << args.out << "\n";
    return 0;
}

int run_ldp_lambda(const CommonArgs& args, long n, const std::string& lambda_text,
                   bool u0_correction) {
    const IncrementDistribution dist = resolve_dist(args.dist);
    const std::vector<std::vector<double>> lambdas = parse_grid(lambda_text, dist.dim());
    const LatticePmf u0 = resolve_u0(args.u0, dist.dim());

    std::ofstream os = open_out(args.out);
    os << "lambda,Lambda_n,limit,gap\n";
    for (const auto& lam : lambdas) {
        const double val = u0_correction ? lambda_n_with_u0(lam, n, dist, u0)
                                         : lambda_n(lam, n, dist);
        const double limit = dist.mgf(lam) - 1.0;
        os << join_vector(lam, ';') << "," << fmt_g12(val) << "," << fmt_g12(limit) << ","
           << fmt_g12(std::fabs(val - limit)) << "\n";
    }
    std::cout << "ldp-lambda: " << lambdas.size() << " lambdas at n=" << n << " -> " << args.out
              << "\n";
    return 0;
}

int run_ldp_rate(const CommonArgs& args, const std::string& x_text,
                 const std::string& grid_text) {
    const IncrementDistribution dist = resolve_dist(args.dist);
    if (!x_text.empty()) {
        const std::vector<double> x = parse_double_list(x_text);
        if (static_cast<int>(x.size()) != dist.dim())
            throw std::invalid_argument("--x dimension does not match the model");
        const RateFunctionResult r = rate_function_numeric(x, dist);
        const std::string json = r.to_json_text();
        std::cout << json << "\n";
        if (!args.out.empty()) {
            std::ofstream os = open_out(args.out);
            os << json << "\n";
        }
        return 0;
    }
    if (grid_text.empty())
        throw std::invalid_argument("ldp-rate: provide --x or --x-grid");
    if (dist.dim() != 1)
        throw std::invalid_argument("ldp-rate --x-grid writes the dim-1 CSV; use --x for d > 1");
    const bool has_closed = IncrementDistribution::is_preset(args.dist) && args.dist != "ne2d";

    std::ofstream os = open_out(args.out);
    os << "x,I_numeric,I_closed,abs_err,lambda_star\n";
    for (const auto& xv : parse_grid(grid_text, 1)) {
        const RateFunctionResult r = rate_function_numeric(xv, dist);
        const double closed = has_closed ? rate_function_closed(args.dist, xv[0])
                                         : std::numeric_limits<double>::quiet_NaN();
        os << fmt_g12(xv[0]) << "," << fmt_g12(r.value) << "," << fmt_g12(closed) << ","
           << fmt_g12(std::fabs(r.value - closed)) << ","
           << (r.converged() ? fmt_g12(r.lambda_star[0]) : "nan") << "\n";
    }
    std::cout << "ldp-rate: grid written -> " << args.out << "\n";
    return 0;
}

int run_ldp_tails(const CommonArgs& args, const std::string& n_text, double eps,
                  const std::string& side) {
    const IncrementDistribution dist = resolve_dist(args.dist);
    const LatticePmf u0 = resolve_u0(args.u0, dist.dim());
    const std::vector<long> ns = parse_n_list(n_text);
    const bool upper = side == "upper";
    if (!upper && side != "lower")
        throw std::invalid_argument("--side must be upper or lower");

    const EvalMode mode = parse_eval_mode(args.mode);
    PmfBudget budget;
    const bool stochastic =
        mode == EvalMode::MonteCarlo || (mode == EvalMode::Auto && any_beyond_budget(ns, 1, budget));
    std::optional<Rng> rng;
    if (stochastic) rng.emplace(require_seed(args, "ldp-tails"));

    const std::vector<TailRecord> rows = tail_exponent_report(
        ns, eps, dist, u0, upper, args.samples, rng ? &*rng : nullptr, mode, budget);

    std::ofstream os = open_out(args.out);
    os << "n,tail_prob,std_err,exponent,target_I\n";
    for (const TailRecord& r : rows)
        os << r.n << "," << fmt_g12(r.tail_prob) << "," << fmt_g12(r.std_err) << ","
           << fmt_g12(r.exponent) << "," << fmt_g12(r.target_rate) << "\n";
    std::cout << "ldp-tails: " << rows.size() << " rows (" << side << ", eps=" << fmt_g12(eps)
              << ", target " << fmt_g12(rows.empty() ? 0.0 : rows.front().target_rate) << ") -> "
              << args.out << "\n";
    return 0;
}

int run_gauss_check(const CommonArgs& args, const std::string& z_text, const std::string& n_text,
                    std::optional<double> tol) {
    const std::vector<double> zs = parse_double_list(z_text);
    const std::vector<long> ns = parse_n_list(n_text);
    std::optional<std::ofstream> os;
    if (!args.out.empty()) {
        os.emplace(open_out(args.out));
        *os << "z,n,ratio,gap\n";
    }
    bool ok = true;
    for (double z : zs) {
        for (long n : ns) {
            const double ratio = gauss_ratio(z, n);
            const double gap = std::fabs(ratio - 1.0);
            std::cout << "gauss-check: z=" << fmt_g12(z) << " n=" << n
                      << " ratio=" << fmt_g12(ratio) << " gap=" << fmt_g12(gap) << "\n";
            if (os) *os << fmt_g12(z) << "," << n << "," << fmt_g12(ratio) << "," << fmt_g12(gap)
                        << "\n";
            if (tol && gap > *tol) ok = false;
        }
    }
    if (!ok) {
        std::cout << "gauss-check: FAILED tolerance " << fmt_g12(*tol) << "\n";
        return 4;
    }
    return 0;
}

int run_cp_pmf(const CommonArgs& args, double tol) {
    const IncrementDistribution dist = resolve_dist(args.dist);
    const CompoundPoissonPmf cp = compound_poisson_pmf(dist, tol);
    std::ofstream os = open_out(args.out);
    cp.pmf.write_csv(os);
    std::cout << "cp-pmf: " << cp.terms << " Poisson terms, truncation deficit "
              << fmt_g12(cp.deficit) << " -> " << args.out << "\n";
    return 0;
}

int run_rate_props(const CommonArgs& args, const std::string& grid_text) {
    const IncrementDistribution dist = resolve_dist(args.dist);
    const std::vector<std::vector<double>> grid = parse_grid(grid_text, dist.dim());
    const std::vector<PropertyCheck> checks = rate_properties(dist, grid);

    bool all_pass = true;
    nlohmann::json report = nlohmann::json::array();
    for (const PropertyCheck& c : checks) {
        all_pass = all_pass && c.pass;
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
        report.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    if (!args.out.empty()) {
        std::ofstream os = open_out(args.out);
        os << report.dump(2) << "\n";
    }
    return all_pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"urnlab: exact laws, normal-approximation bounds, and rare-event rates\n"
                 "for lattice urn processes driven by bounded random-walk kernels"};
    app.require_subcommand(1);

    CommonArgs args;
    long n = 1000;
    long draws = 10000;
    double eps = 1.0;
    double cp_tol = 1e-12;
    std::string n_text = "1000";
    std::string sampler = "repr";
    std::string lambda_text, x_text, grid_text, z_text, side = "upper";
    bool general = false, u0_correction = false;
    std::optional<double> gauss_tol;

    auto add_common = [&](CLI::App* cmd, bool needs_dist, bool needs_out) {
        if (needs_dist)
            cmd->add_option("--dist", args.dist,
                            "increment distribution: preset name, inline JSON, or file")
                ->required();
        cmd->add_option("--u0", args.u0, "start configuration (delta0, uniform1d, JSON, file)");
        if (needs_out)
            cmd->add_option("--out", args.out, "output file path")->required();
        else
            cmd->add_option("--out", args.out, "output file path");
        cmd->add_option("--seed", args.seed, "RNG seed (required for stochastic runs)");
        cmd->add_option("--samples", args.samples, "Monte Carlo sample count");
        cmd->add_option("--mode", args.mode, "exact|mc|auto");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "draw colors and write a histogram");
    add_common(simulate, true, true);
    simulate->add_option("--n", n, "urn time")->required();
    simulate->add_option("--draws", draws, "number of draws");
    simulate->add_option("--sampler", sampler, "direct|repr");

    CLI::App* exact = app.add_subcommand("exact-pmf", "write the exact law of Z_n");
    add_common(exact, true, true);
    exact->add_option("--n", n, "urn time")->required();

    CLI::App* be = app.add_subcommand("be-report", "dim-1 normal-approximation distances vs bound");
    add_common(be, true, true);
    be->add_option("--n", n_text, "n list (comma or logspace:a:b:k)")->required();
    be->add_flag("--general", general, "log-n centering/scaling, ratio against the bare rate");

    CLI::App* bed = app.add_subcommand("be-report-d", "d-dim distances against the rate");
    add_common(bed, true, true);
    bed->add_option("--n", n_text, "n list (comma or logspace:a:b:k)")->required();
    bed->add_flag("--general", general, "log-n centering and Sigma^{-1/2} scaling");

    CLI::App* lam = app.add_subcommand("ldp-lambda", "scaled log-mgf against its limit");
    add_common(lam, true, true);
    lam->add_option("--n", n, "urn time (single value)")->required();
    lam->add_option("--lambda", lambda_text, "lambda grid (list / range / ; vectors)")->required();
    lam->add_flag("--u0-correction", u0_correction, "include the start-configuration term");

    CLI::App* rate = app.add_subcommand("ldp-rate", "rate function values");
    add_common(rate, true, false);
    rate->add_option("--x", x_text, "single point (JSON result to stdout)");
    rate->add_option("--x-grid", grid_text, "dim-1 grid (CSV output, needs --out)");

    CLI::App* tails = app.add_subcommand("ldp-tails", "tail exponents against the rate function");
    add_common(tails, true, true);
    tails->add_option("--n", n_text, "n list (comma or logspace:a:b:k)")->required();
    tails->add_option("--eps", eps, "offset from the mean")->required();
    tails->add_option("--side", side, "upper|lower");

    CLI::App* gauss = app.add_subcommand("gauss-check", "product-vs-gamma ratio check");
    gauss->add_option("--z", z_text, "z list")->required();
    gauss->add_option("--n", n_text, "n list")->required();
    gauss->add_option("--out", args.out, "optional CSV output");
    gauss->add_option("--tol", gauss_tol, "fail (exit 4) when |ratio-1| exceeds this");

    CLI::App* cp = app.add_subcommand("cp-pmf", "compound Poisson law of the increment kernel");
    add_common(cp, true, true);
    cp->add_option("--tol", cp_tol, "Poisson truncation tolerance (<= 1e-6)");

    CLI::App* props = app.add_subcommand("rate-props", "structure checks of the rate function");
    add_common(props, true, false);
    props->add_option("--x-grid", grid_text, "evaluation grid")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (simulate->parsed()) return run_simulate(args, n, draws, sampler);
        if (exact->parsed()) return run_exact_pmf(args, n);
        if (be->parsed()) return run_be_report(args, n_text, general, false);
        if (bed->parsed()) return run_be_report(args, n_text, general, true);
        if (lam->parsed()) return run_ldp_lambda(args, n, lambda_text, u0_correction);
        if (rate->parsed()) return run_ldp_rate(args, x_text, grid_text);
        if (tails->parsed()) return run_ldp_tails(args, n_text, eps, side);
        if (gauss->parsed()) return run_gauss_check(args, z_text, n_text, gauss_tol);
        if (cp->parsed()) return run_cp_pmf(args, cp_tol);
        if (props->parsed()) return run_rate_props(args, grid_text);
    } catch (const BudgetError& e) {
        std::cerr << "resource budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

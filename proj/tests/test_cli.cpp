#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string stdout_text;
};

const char* cli_path() {
    const char* p = std::getenv("URNLAB_CLI");
    REQUIRE_MESSAGE(p != nullptr, "URNLAB_CLI must point at the built binary");
    return p;
}

fs::path scratch_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "urnlab_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run(const std::string& argline) {
    const fs::path out = scratch_dir() / "stdout.txt";
    const std::string cmd =
        std::string(cli_path()) + " " + argline + " > " + out.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(out);
    std::stringstream buf;
    buf << in.rdbuf();
    r.stdout_text = buf.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("help exits cleanly, bad input does not") {
    CHECK(run("--help").exit_code == 0);
    CHECK(run("no-such-command").exit_code == 2);
    CHECK(run("exact-pmf --dist nonsense --n 5 --out x.csv").exit_code == 2);
    CHECK(run("exact-pmf --dist det1d --out x.csv").exit_code == 2);  // missing --n
}

TEST_CASE("exact-pmf writes the enumerated law") {
    const fs::path out = scratch_dir() / "pmf.csv";
    const RunResult r = run("exact-pmf --dist det1d --n 2 --out " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(slurp(out) == "c1,mass\n0,0.333333333333\n1,0.5\n2,0.166666666667\n");
}

TEST_CASE("budget overruns exit with code 3") {
    const fs::path out = scratch_dir() / "never.csv";
    const RunResult r = run("exact-pmf --dist det1d --n 10000000 --out " + out.string());
    CHECK(r.exit_code == 3);
}

TEST_CASE("stochastic commands refuse to run without a seed") {
    const fs::path out = scratch_dir() / "sim.csv";
    CHECK(run("simulate --dist det1d --n 10 --draws 100 --out " + out.string()).exit_code == 2);
    CHECK(run("simulate --dist det1d --n 10 --draws 100 --seed 7 --out " + out.string())
              .exit_code == 0);
    // Monte Carlo mode without seed is a config error; exact mode needs none
    const fs::path be = scratch_dir() / "be.csv";
    CHECK(run("be-report --dist ssrw1d --n 50,100 --mode mc --out " + be.string()).exit_code == 2);
    CHECK(run("be-report --dist ssrw1d --n 50,100 --mode exact --out " + be.string()).exit_code ==
          0);
    const fs::path tails = scratch_dir() / "t.csv";
    CHECK(run("ldp-tails --dist ssrw1d --n 100 --eps 1 --mode mc --out " + tails.string())
              .exit_code == 2);
    // auto mode beyond the exact budget also needs a seed up front
    CHECK(run("ldp-tails --dist ssrw1d --n 200000 --eps 1 --out " + tails.string()).exit_code ==
          2);
}

TEST_CASE("same seed means identical bytes, new seed means new draws") {
    const fs::path a = scratch_dir() / "sim_a.csv";
    const fs::path b = scratch_dir() / "sim_b.csv";
    const fs::path c = scratch_dir() / "sim_c.csv";
    CHECK(run("simulate --dist ssrw1d --n 50 --draws 4000 --seed 99 --out " + a.string())
              .exit_code == 0);
    CHECK(run("simulate --dist ssrw1d --n 50 --draws 4000 --seed 99 --out " + b.string())
              .exit_code == 0);
    CHECK(run("simulate --dist ssrw1d --n 50 --draws 4000 --seed 100 --out " + c.string())
              .exit_code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));
}

TEST_CASE("be-report emits the pinned header with ratios at most one") {
    const fs::path out = scratch_dir() / "be_small.csv";
    const RunResult r = run("be-report --dist ssrw1d --n 10,100 --mode exact --out " + out.string());
    CHECK(r.exit_code == 0);
    std::istringstream is(slurp(out));
    std::string line;
    std::getline(is, line);
    CHECK(line == "n,h_n,rho2,rho3,bound,distance,ratio");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        const double ratio = std::stod(line.substr(line.rfind(',') + 1));
        CHECK(ratio <= 1.0);
        CHECK(ratio > 0.0);
    }
    CHECK(rows == 2);
}

TEST_CASE("ldp-rate prints the pinned json") {
    const RunResult r = run("ldp-rate --dist det1d --x 2.0");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("\"status\":\"converged\"") != std::string::npos);
    CHECK(r.stdout_text.find("0.386294") != std::string::npos);
    CHECK(r.stdout_text.find("0.693147") != std::string::npos);

    const RunResult inf = run("ldp-rate --dist det1d --x -0.5");
    CHECK(inf.exit_code == 0);
    CHECK(inf.stdout_text.find("diverged_to_infinity") != std::string::npos);

    const fs::path grid = scratch_dir() / "rate.csv";
    const RunResult g = run("ldp-rate --dist det1d --x-grid 0.5:2:0.5 --out " + grid.string());
    CHECK(g.exit_code == 0);
    std::istringstream is(slurp(grid));
    std::string header;
    std::getline(is, header);
    CHECK(header == "x,I_numeric,I_closed,abs_err,lambda_star");
}

TEST_CASE("gauss-check prints the ratio and honors --tol") {
    const RunResult r = run("gauss-check --z 1 --n 1000");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("ratio=1.001") != std::string::npos);
    CHECK(run("gauss-check --z 1 --n 1000 --tol 1e-6").exit_code == 4);
    CHECK(run("gauss-check --z 1 --n 1000 --tol 0.01").exit_code == 0);
}

TEST_CASE("ldp-lambda and ldp-tails write their schemas") {
    const fs::path lam = scratch_dir() / "lambda.csv";
    CHECK(run("ldp-lambda --dist ssrw1d --n 1000 --lambda -1,-0.5,0.5,1 --out " + lam.string())
              .exit_code == 0);
    std::istringstream is(slurp(lam));
    std::string line;
    std::getline(is, line);
    CHECK(line == "lambda,Lambda_n,limit,gap");

    const fs::path tails = scratch_dir() / "tails.csv";
    CHECK(run("ldp-tails --dist ssrw1d --n 100,1000 --eps 1 --mode exact --out " + tails.string())
              .exit_code == 0);
    std::istringstream ts(slurp(tails));
    std::getline(ts, line);
    CHECK(line == "n,tail_prob,std_err,exponent,target_I");
    // exact rows carry zero standard error
    while (std::getline(ts, line)) {
        std::istringstream row(line);
        std::string field;
        std::getline(row, field, ',');
        std::getline(row, field, ',');
        std::getline(row, field, ',');
        CHECK(field == "0");
    }
}

TEST_CASE("cp-pmf and rate-props run end to end") {
    const fs::path cp = scratch_dir() / "cp.csv";
    const RunResult r = run("cp-pmf --dist det1d --tol 1e-12 --out " + cp.string());
    CHECK(r.exit_code == 0);
    const std::string body = slurp(cp);
    CHECK(body.find("c1,mass\n0,0.367879441171") == 0);

    const fs::path props = scratch_dir() / "props.json";
    const RunResult p =
        run("rate-props --dist det1d --x-grid 0.2:5:0.2 --out " + props.string());
    CHECK(p.exit_code == 0);
    CHECK(p.stdout_text.find("[PASS] midpoint-convexity") != std::string::npos);
    CHECK(p.stdout_text.find("[PASS] minimum-at-mean") != std::string::npos);
    CHECK(slurp(props).find("\"pass\": true") != std::string::npos);
}

TEST_CASE("inline json distributions and env output dir") {
    const fs::path dir = scratch_dir() / "envout";
    fs::create_directories(dir);
    const std::string json =
        R"('{"dim":1,"atoms":[{"point":[0],"prob":0.5},{"point":[2],"prob":0.5}]}')";
    const std::string cmd = "URNLAB_OUT_DIR=" + dir.string() + " " + cli_path() +
                            " exact-pmf --dist " + json + " --n 1 --out rel.csv > /dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(dir / "rel.csv"));
    const std::string body = slurp(dir / "rel.csv");
    CHECK(body.find("c1,mass\n") == 0);
}

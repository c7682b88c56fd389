#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run cli(const std::string& args) {
    const std::string cmd = std::string(KANBAYES_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch() {
    const fs::path dir = fs::temp_directory_path() / "kanbayes_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_dataset(const fs::path& p, int n) {
    std::ofstream out(p);
    out << "x1,x2,y\n";
    for (int i = 0; i < n; ++i) {
        const double a = (i % 17) / 16.0, b = (i % 23) / 22.0;
        out << a << "," << b << "," << 0.3 * a - 0.2 * b + 0.05 * ((i * 7) % 5 - 2) << "\n";
    }
}

}  // namespace

TEST_CASE("plan prints the architecture") {
    const Run r = cli("plan --n 1000 --s 2,2 --p inf --m 2");
    CHECK(r.code == 0);
    CHECK(r.out.find("N=10 ") != std::string::npos);
    CHECK(r.out.find("L0=5 ") != std::string::npos);
    CHECK(r.out.find("D=40 ") != std::string::npos);
    CHECK(r.out.find("G=24 ") != std::string::npos);
    CHECK(r.out.find("H=7 ") != std::string::npos);
    CHECK(cli("plan --n 1000 --s 2 --d 1").out.find("L0=3 ") != std::string::npos);
    CHECK(cli("plan --s 0.5 --p inf --m 2").code == 0);
    CHECK(cli("plan --s 0.5 --p inf --m 1").code == 2);
    CHECK(cli("plan --n 1000 --s 2,2 --strict").code == 2);
    CHECK(cli("plan --bogus").code == 2);
    CHECK(cli("").code == 2);
}

TEST_CASE("config file overrides flags") {
    const fs::path cfg = scratch() / "plan.json";
    std::ofstream(cfg) << R"({"n": 1000, "s": [2, 2], "d": 2})";
    const Run r = cli("plan --n 5 --s 1 --config " + cfg.string());
    CHECK(r.code == 0);
    CHECK(r.out.find("N=10 ") != std::string::npos);
    std::ofstream(cfg) << "{ not json";
    CHECK(cli("plan --config " + cfg.string()).code == 2);
}

TEST_CASE("fit is deterministic and validates its input") {
    const fs::path dir = scratch();
    write_dataset(dir / "d.csv", 120);
    const std::string base = "fit --data " + (dir / "d.csv").string() + " --s 0.9,0.9 --iters 60 --burnin 30 --seed 7";
    const Run a = cli(base + " --out " + (dir / "a.json").string() + " --chain-out " + (dir / "chain.csv").string());
    const Run b = cli(base + " --out " + (dir / "b.json").string());
    CHECK(a.code == 0);
    CHECK(b.code == 0);
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
    CHECK(slurp(dir / "chain.csv").rfind("draw,chain,sigma2,log_post,active", 0) == 0);
    std::ofstream(dir / "noy.csv") << "x1,x2\n0.1,0.2\n";
    CHECK(cli("fit --data " + (dir / "noy.csv").string() + " --s 1,1").code == 2);
    std::ofstream(dir / "out.csv") << "x1,y\n1.5,0.2\n";
    CHECK(cli("fit --data " + (dir / "out.csv").string() + " --s 1").code == 2);
    CHECK(cli("fit --data " + (dir / "missing.csv").string() + " --s 1").code == 2);
}

TEST_CASE("fit against a catalog target reports errors") {
    const fs::path dir = scratch();
    write_dataset(dir / "d.csv", 120);
    const Run r = cli("fit --data " + (dir / "d.csv").string() + " --s 0.9,0.9 --iters 60 --burnin 30 --target smooth");
    CHECK(r.code == 0);
    CHECK(r.out.find("mean_l2_error=") != std::string::npos);
}

TEST_CASE("check-priors, bounds, approx and besov") {
    const fs::path dir = scratch();
    CHECK(cli("plan --n 1e6 --s 2,2 --out " + (dir / "p.json").string()).code == 0);
    const Run cp = cli("check-priors --slab gaussian --n 1e6 --plan " + (dir / "p.json").string());
    CHECK(cp.code == 0);
    CHECK(cp.out.find("B1 ") != std::string::npos);
    CHECK(cp.out.find("\nPASS\n") != std::string::npos);
    const Run bd = cli("bounds --verify-lipschitz --trials 200");
    CHECK(bd.code == 0);
    CHECK(bd.out.find("<= 1") != std::string::npos);
    const Run ap = cli("approx --target smooth1 --d 1 --N 8,16,32 --m 2 --mc-n 2000");
    CHECK(ap.code == 0);
    CHECK(ap.out.find("slope=") != std::string::npos);
    CHECK(ap.out.rfind("N,terms,l2_error", 0) == 0);
    CHECK(cli("besov --target smooth --s 1.5").code == 0);
    CHECK(cli("besov --target nope").code == 2);
}

TEST_CASE("rate study CSV round trips and flags the noiseless case") {
    const fs::path dir = scratch();
    const Run r = cli("rate-study --s 1.5 --n-grid 40,80,160 --replicates 1 --iters 40 --burnin 20 --mc-n 500 --sigma0 0 --csv " +
                      (dir / "rate.csv").string());
    CHECK(r.code == 0);
    CHECK(r.out.find("\"degenerate\": true") != std::string::npos);
    CHECK(r.out.rfind(slurp(dir / "rate.csv"), 0) == 0);
    CHECK(cli("rate-study --n-grid 40,80").code == 2);
}

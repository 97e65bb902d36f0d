#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "gstein/cli.hpp"

namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "gstein_cli_test" / name;
    fs::remove_all(dir);
    return dir;
}

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = gstein::runCli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> summary(const fs::path& dir) {
    std::map<std::string, std::string> m;
    std::istringstream in(slurp(dir / "run.summary"));
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) m[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return m;
}

std::vector<std::string> lines(const fs::path& p) {
    std::vector<std::string> out;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::vector<std::string> cells(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream s(line);
    std::string c;
    while (std::getline(s, c, ',')) out.push_back(c);
    return out;
}

int significantDigits(const std::string& num) {
    int d = 0;
    bool leading = true;
    for (char ch : num) {
        if (ch == 'e' || ch == 'E') break;
        if (ch < '0' || ch > '9') continue;
        if (leading && ch == '0') continue;
        leading = false;
        ++d;
    }
    return d;
}

}  // namespace

TEST_CASE("usage errors", "[cli]") {
    CHECK(run({"--help"}).code == gstein::kExitOk);
    CHECK(run({"gheat", "solve", "--help"}).code == gstein::kExitOk);
    CHECK(run({"nope"}).code == gstein::kExitInvalidConfig);
    CHECK(run({}).code == gstein::kExitInvalidConfig);
    CHECK(run({"gheat", "solve", "--no-such-flag"}).code == gstein::kExitInvalidConfig);
}

TEST_CASE("invalid configurations exit with 2", "[cli]") {
    const auto dir = scratch("invalid");
    auto r = run({"gheat", "solve", "--out", dir.string(), "--dx", "0.1", "--dt", "0.1"});
    CHECK(r.code == gstein::kExitInvalidConfig);
    CHECK_THAT(r.err, ContainsSubstring("unstable grid"));
    CHECK_FALSE(fs::exists(dir / "run.summary"));

    r = run({"gheat", "solve", "--out", dir.string(), "--set", "bogus=1"});
    CHECK(r.code == gstein::kExitInvalidConfig);
    CHECK_THAT(r.err, ContainsSubstring("unknown key 'bogus'"));

    fs::create_directories(dir);
    std::ofstream(dir / "bad.cfg") << "dx = 0.05\nmystery = 4\n";
    r = run({"gheat", "solve", "--out", dir.string(), "--config", (dir / "bad.cfg").string()});
    CHECK(r.code == gstein::kExitInvalidConfig);
    CHECK_THAT(r.err, ContainsSubstring("mystery"));

    CHECK(run({"gheat", "solve", "--out", dir.string(), "--sigma-bar", "1", "--sigma-under", "2"}).code ==
          gstein::kExitInvalidConfig);
    CHECK(run({"gheat", "solve", "--out", dir.string(), "--threads", "-1"}).code == gstein::kExitInvalidConfig);
    CHECK(run({"stein", "identity", "--out", dir.string(), "--set", "identity_models=nowhere"}).code ==
          gstein::kExitInvalidConfig);
    CHECK(run({"gheat", "solve", "--out", dir.string(), "--set", "dx"}).code == gstein::kExitInvalidConfig);
}

TEST_CASE("gheat solve writes the field and the summary", "[cli]") {
    const auto dir = scratch("gheat");
    auto r = run({"gheat", "solve", "--out", dir.string(), "--dx", "0.05", "--datum", "affine:2:1", "--threads", "1"});
    REQUIRE(r.code == gstein::kExitOk);
    auto s = summary(dir);
    CHECK(s["command"] == "gheat solve");
    CHECK(s["status"] == "0");
    CHECK_THAT(std::stod(s["u_0_1"]), WithinAbs(1.0, 1e-12));
    CHECK(s["config.datum"] == "affine:2:1");

    r = run({"gheat", "solve", "--out", dir.string(), "--dx", "0.05", "--datum", "cos"});
    REQUIRE(r.code == gstein::kExitOk);
    s = summary(dir);
    CHECK_THAT(std::stod(s["u_0_1"]), WithinAbs(std::exp(-0.5), 5e-3));

    const auto field = lines(dir / "field.csv");
    REQUIRE(field.size() > 2);
    CHECK(field[0] == "t,x,u");
    int best = 0;
    for (std::size_t i = 1; i < field.size(); ++i) {
        const auto c = cells(field[i]);
        REQUIRE(c.size() == 3);
        best = std::max(best, significantDigits(c[2]));
    }
    CHECK(best >= 15);
}

TEST_CASE("a config file and overrides", "[cli]") {
    const auto dir = scratch("cfg");
    fs::create_directories(dir);
    std::ofstream(dir / "run.cfg") << "# small box\ndx = 0.1\ndatum = const:2.5\nt_final = 0.5\n";
    const auto r = run({"gheat", "solve", "--out", dir.string(), "--config", (dir / "run.cfg").string(), "--set",
                        "t_final=0.25"});
    REQUIRE(r.code == gstein::kExitOk);
    auto s = summary(dir);
    CHECK(s["config.t_final"] == "0.25");
    CHECK(s["u_0_1"] == "n/a");
    CHECK(std::stod(s["u_0_T"]) == 2.5);
}

TEST_CASE("stein identity on constants", "[cli]") {
    const auto dir = scratch("identity");
    const auto r = run({"stein", "identity", "--out", dir.string(), "--set", "identity_models=wide", "--set",
                        "identity_functions=const:1", "--set", "stein_dx=0.05"});
    REQUIRE(r.code == gstein::kExitOk);
    CHECK_THAT(r.out, ContainsSubstring("PASS"));
    const auto t = lines(dir / "identity.csv");
    REQUIRE(t.size() == 2);
    const auto head = cells(t[0]);
    const auto row = cells(t[1]);
    REQUIRE(head.size() == row.size());
    for (std::size_t i = 0; i < head.size(); ++i) {
        if (head[i] == "lhs" || head[i] == "integral_sup" || head[i] == "integral_inf") CHECK(std::stod(row[i]) == 0.0);
        if (head[i] == "pass") CHECK(row[i] == "true");
    }
    CHECK(fs::exists(dir / "one_sided.csv"));
}

TEST_CASE("stein bound is seeded and its harness can fail", "[cli]") {
    const auto a = scratch("bound_a"), b = scratch("bound_b"), c = scratch("bound_c"), z = scratch("bound_z");
    const std::vector<std::string> common{"--set", "bound_cases=40"};
    auto args = [&](const fs::path& d, const std::string& seed) {
        std::vector<std::string> v{"stein", "bound", "--out", d.string(), "--seed", seed};
        v.insert(v.end(), common.begin(), common.end());
        return v;
    };
    REQUIRE(run(args(a, "5")).code == gstein::kExitOk);
    REQUIRE(run(args(b, "5")).code == gstein::kExitOk);
    REQUIRE(run(args(c, "6")).code == gstein::kExitOk);
    CHECK(slurp(a / "bound.csv") == slurp(b / "bound.csv"));
    CHECK(slurp(a / "bound.csv") != slurp(c / "bound.csv"));
    CHECK(summary(a)["passes"] == "40");

    auto zero = args(z, "5");
    zero.insert(zero.end(), {"--set", "bound_rhs_scale=0"});
    CHECK(run(zero).code == gstein::kExitChecksFailed);
    CHECK(summary(z)["status"] == "1");
}

TEST_CASE("stein classical", "[cli]") {
    const auto dir = scratch("classical");
    const auto r = run({"stein", "classical", "--out", dir.string(), "--set", "classical_functions=cos", "--set",
                        "classical_probes=-1:1:5"});
    REQUIRE(r.code == gstein::kExitOk);
    const auto t = lines(dir / "classical_cos_1_1_.csv");
    REQUIRE(t.size() == 6);
    CHECK(t[0] == "x,g1,g2,residual");
}

TEST_CASE("regularity without a stable exponent is a solver rejection", "[cli]") {
    const auto dir = scratch("reg");
    const std::vector<std::string> small{"--set", "family=relu",      "--set", "reg_dx=0.08", "--set",
                                         "reg_levels=2", "--set",     "alpha_grid=0.5,0.9", "--set",
                                         "t_grid=0.1,1"};
    auto args = std::vector<std::string>{"reg", "estimate", "--out", dir.string()};
    args.insert(args.end(), small.begin(), small.end());
    auto strict = args;
    strict.insert(strict.end(), {"--set", "stability_tol=0"});
    const auto r = run(strict);
    CHECK(r.code == gstein::kExitSolverRejected);
    CHECK_THAT(r.err, ContainsSubstring("no stable exponent"));

    const auto ok = run(args);
    REQUIRE(ok.code == gstein::kExitOk);
    CHECK(lines(dir / "regularity.csv")[0].rfind("alpha,", 0) == 0);
}

TEST_CASE("clt rate on small instances", "[cli]") {
    const std::vector<std::string> fast{"--set", "family=cos,ramp", "--set", "reg_dx=0.08", "--set", "reg_levels=2",
                                        "--set", "pde_dx=0.02", "--set", "trace_n=2"};
    SECTION("a single n has no slope") {
        const auto dir = scratch("rate_one");
        auto args = std::vector<std::string>{"clt", "rate", "--out", dir.string(), "--set", "n_list=4"};
        args.insert(args.end(), fast.begin(), fast.end());
        const auto r = run(args);
        INFO(r.err);
        CHECK(summary(dir)["slope"] == "n/a");
        CHECK(lines(dir / "rate.csv")[0] == "n,error,bound,pass,alpha,C_alpha,budget");
    }
    SECTION("a singleton set passes") {
        const auto dir = scratch("rate_rad");
        auto args = std::vector<std::string>{"clt",   "rate", "--out", dir.string(), "--model", "rademacher",
                                             "--set", "n_list=1,4,16"};
        args.insert(args.end(), fast.begin(), fast.end());
        const auto r = run(args);
        INFO(r.err);
        CHECK(r.code == gstein::kExitOk);
        auto s = summary(dir);
        CHECK(s["bound_pass"] == "true");
        CHECK(s["traces_pass"] == "true");
        CHECK(lines(dir / "rate.csv").size() == 4);
        CHECK(lines(dir / "traces.csv")[0].rfind("n,function,", 0) == 0);
    }
}

TEST_CASE("clt noniid on a short profile", "[cli]") {
    const auto dir = scratch("noniid");
    const auto r = run({"clt", "noniid", "--out", dir.string(), "--set", "noniid_n=3", "--set", "family=cos,ramp",
                        "--set", "reg_dx=0.08", "--set", "reg_levels=2", "--set", "pde_dx=0.02"});
    INFO(r.err);
    CHECK(r.code == gstein::kExitOk);
    const auto comps = lines(dir / "components.csv");
    REQUIRE(comps.size() == 4);
    CHECK(comps[0] == "i,sigma_i,t_i");
    CHECK(cells(comps[3])[2] == "1");
}

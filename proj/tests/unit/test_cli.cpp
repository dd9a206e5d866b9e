#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fracimp/cli.hpp"

using namespace fracimp;
using namespace fracimp::cli;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "fracimp_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = scratch_dir() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "fracimp");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

const char* kStepConfig = R"J({
  "problem": {
    "alpha": 0.5, "T": 1, "x0": 1,
    "rhs": {"kind": "plain", "f": "0"},
    "impulses": [{"time": 0.5, "jump": "0.5"}]
  },
  "numerics": {"target_h": 0.125}
})J";

const char* kLinearConfig = R"J({
  "problem": {"alpha": 0.5, "T": 1, "x0": 1, "rhs": {"kind": "plain", "f": "-x"}},
  "numerics": {"target_h": 0.0625}
})J";

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("examples survive a serialization round trip") {
    for (const auto& name : kExampleNames) {
        CAPTURE(name);
        const RunConfig cfg = example_config(name);
        const RunConfig back = parse_config(serialize_config(cfg));
        CHECK(back == cfg);
        CHECK(serialize_config(back) == serialize_config(cfg));
    }
}

TEST_CASE("hand-written configs round trip") {
    const char* text = R"J({
      "comment": "two components",
      "problem": {
        "alpha": 0.3, "T": 2, "x0": [1, -2],
        "rhs": {"kind": "split", "f1": ["-x1", "sin(t)*x2"], "f2": ["0.1*cos(x1)", "-(x2)^2"]},
        "impulses": [{"time": 0.5, "jump": ["0.1*x1", "-0.2"]}],
        "impulse_bounds": {"l1": 1, "l2": 0.1}
      },
      "numerics": {"target_h": 0.01, "scheme": "rectangle", "method": "marching", "tol": 1e-9, "max_iter": 50},
      "certificate": {"p": 0.2, "envelopes": {"M1": 2, "L1": {"constant": 1}, "M2": {"sampled": {"t": [0, 2], "g": [1, 0.5]}}}},
      "output": {"csv": "a.csv", "report": "a.txt"}
    })J";
    const RunConfig cfg = parse_config(text);
    CHECK(cfg.problem.rhs.kind == RhsKind::Split);
    CHECK(cfg.problem.x0->size() == 2);
    CHECK(cfg.numerics.method == SolveMethod::Marching);
    CHECK(*cfg.certificate->p == 0.2);
    CHECK(parse_config(serialize_config(cfg)) == cfg);
    const ProblemSpec spec = build_spec(cfg);
    CHECK(spec.dim() == 2);
    CHECK(spec.impulses().l2 == 0.1);
}

TEST_CASE("strict schema reports the field path") {
    auto path_of = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return e.path();
        }
        return std::string("<no error>");
    };
    CHECK(path_of(R"J({"problem": {"alpha": 0.5, "T": 1, "x0": 0, "rhs": {"kind": "plain", "f": "x"}}, "extra": 1})J") ==
          "extra");
    CHECK(path_of(R"J({"problem": {"alpha": 0.5, "T": 1, "x0": 0, "rhs": {"kind": "plain", "f": "x", "g": "1"}}})J") ==
          "problem.rhs.g");
    CHECK(path_of(R"J({"problem": {"alpha": 0.5, "T": 1, "x0": 0, "rhs": {"kind": "plain", "f": "x"},
                      "impulses": [{"time": 0.5, "jump": "1"}, {"time": 0.4, "jump": "1"}]}})J") ==
          "problem.impulses[1].time");
    CHECK(path_of(R"J({"problem": {"T": 1, "x0": 0, "rhs": {"kind": "plain", "f": "x"}}})J") == "problem.alpha");
    CHECK(path_of(R"J({"problem": {"alpha": 0.5, "T": 1, "x0": 0, "rhs": {"kind": "plain", "f": "x +"}}})J") ==
          "problem.rhs.f");
    CHECK(path_of(R"J({"problem": {"alpha": 0.5, "T": 1, "x0": 0, "rhs": {"kind": "plain", "f": "xr"}}})J") ==
          "problem.rhs.f");
    CHECK(path_of(R"J({"problem": {"alpha": 0.5, "T": 1, "x0": 0, "rhs": {"kind": "plain", "f": "x"},
                      "impulses": [{"time": 0.5, "jump": "0.1*x"}]}})J") == "problem.impulse_bounds");
    CHECK(path_of("{not json") == "");
}

TEST_CASE("order outside (0, 1) is a config error citing the constraint") {
    const auto p = write_config("alpha.json", R"J({"problem": {"alpha": 1.2, "T": 1, "x0": 0, "rhs": {"kind": "plain", "f": "x"}}})J");
    const auto r = run_cli({"solve", "--config", p.string()});
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("(0, 1)") != std::string::npos);
    CHECK(r.err.find("alpha") != std::string::npos);
}

TEST_CASE("solve writes the step profile with two rows per impulse node") {
    const auto cfg = write_config("step.json", kStepConfig);
    const auto csv = scratch_dir() / "step.csv";
    const auto r = run_cli({"solve", "--config", cfg.string(), "--out", csv.string()});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("converged") != std::string::npos);
    const std::string text = slurp(csv);
    CHECK(count_lines(text) == 9 + 1 + 1);
    CHECK(text.rfind("t,side,x1\n0,both,1\n", 0) == 0);
    CHECK(text.find("0.5,left,1\n0.5,right,1.5\n") != std::string::npos);
    CHECK(text.find("1,both,1.5\n") != std::string::npos);
}

TEST_CASE("csv bytes are deterministic") {
    const RunConfig logistic = example_config("logistic");
    const auto cfg = write_config("logistic.json", serialize_config(logistic));
    const auto a = scratch_dir() / "a.csv";
    const auto b = scratch_dir() / "b.csv";
    REQUIRE(run_cli({"solve", "--config", cfg.string(), "--out", a.string()}).code == kExitOk);
    REQUIRE(run_cli({"solve", "--config", cfg.string(), "--out", b.string()}).code == kExitOk);
    const std::string sa = slurp(a);
    CHECK(!sa.empty());
    CHECK(sa == slurp(b));
    const Mesh mesh = build_mesh(build_spec(logistic), logistic.numerics.target_h);
    CHECK(count_lines(sa) == mesh.size() + 2 + 1);
}

TEST_CASE("non-convergence exits with 2") {
    const auto cfg = write_config("slow.json", R"J({
      "problem": {"alpha": 0.5, "T": 1, "x0": 1, "rhs": {"kind": "plain", "f": "-x"}},
      "numerics": {"target_h": 0.0625, "max_iter": 2}
    })J");
    const auto r = run_cli({"solve", "--config", cfg.string(), "--out", (scratch_dir() / "slow.csv").string()});
    CHECK(r.code == kExitNotConverged);
}

TEST_CASE("solver failures exit with 2 and name the node") {
    const auto cfg = write_config("sing.json", R"J({
      "problem": {"alpha": 0.5, "T": 1, "x0": 1, "rhs": {"kind": "plain", "f": "sqrt(0.5 - t)"}},
      "numerics": {"target_h": 0.125}
    })J");
    const auto r = run_cli({"solve", "--config", cfg.string(), "--out", (scratch_dir() / "sing.csv").string()});
    CHECK(r.code == kExitNotConverged);
    CHECK(r.err.find("node 5") != std::string::npos);
}

TEST_CASE("check exit codes follow the verdict") {
    const auto good = write_config("dexp.json", serialize_config(example_config("delay-exp")));
    const auto rg = run_cli({"check", "--config", good.string(), "--report", (scratch_dir() / "dexp.txt").string()});
    CHECK(rg.code == kExitOk);
    const std::string report = slurp(scratch_dir() / "dexp.txt");
    CHECK(report.find("gamma2") != std::string::npos);
    CHECK(report.find("contraction_holds") != std::string::npos);

    const auto bad = write_config("ml2.json", R"J({
      "problem": {"alpha": 0.5, "T": 1, "x0": 0, "rhs": {"kind": "plain", "f": "0.1*x"},
                  "impulses": [{"time": 0.5, "jump": "0.5"}], "impulse_bounds": {"l1": 0.5, "l2": 1}},
      "certificate": {"p": 0.25, "envelopes": {"L1": 0.1, "M1": 1, "M2": 0}}
    })J");
    CHECK(run_cli({"check", "--config", bad.string()}).code == kExitCertificateFails);

    const auto none = write_config("none.json", R"J({
      "problem": {"alpha": 0.5, "T": 1, "x0": 0, "rhs": {"kind": "plain", "f": "0.1*x"}},
      "certificate": {"p": 0.25}
    })J");
    const auto rn = run_cli({"check", "--config", none.string()});
    CHECK(rn.code == kExitCertificateFails);
    CHECK(rn.out.find("not_applicable") != std::string::npos);
}

TEST_CASE("order command") {
    const auto lin = write_config("lin.json", kLinearConfig);
    const auto trap = run_cli({"order", "--config", lin.string(), "--h-list", "0.0625,0.03125,0.015625,0.0078125"});
    REQUIRE(trap.code == kExitOk);
    const auto order_of = [](const std::string& s) {
        const auto pos = s.find("order: ");
        REQUIRE(pos != std::string::npos);
        return std::stod(s.substr(pos + 7));
    };
    CHECK(order_of(trap.out) >= 1.2);
    const auto rect = run_cli({"order", "--config", lin.string(), "--scheme", "rectangle", "--h-list",
                               "0.0625,0.03125,0.015625,0.0078125"});
    REQUIRE(rect.code == kExitOk);
    CHECK(order_of(rect.out) >= 0.9);

    const auto cst = write_config("cst.json", R"J({"problem": {"alpha": 0.5, "T": 1, "x0": 1, "rhs": {"kind": "plain", "f": "2"}}})J");
    const auto rc = run_cli({"order", "--config", cst.string(), "--h-list", "0.25,0.125,0.0625"});
    CHECK(rc.code == kExitOk);
    CHECK(rc.out.find("order: exact") != std::string::npos);

    CHECK(run_cli({"order", "--config", lin.string(), "--h-list", "0.25,0.125"}).code == kExitConfig);
}

TEST_CASE("solver_order against the Mittag-Leffler oracle") {
    const RunConfig cfg = parse_config(kLinearConfig);
    const auto table = solver_order(cfg, {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128});
    CHECK_FALSE(table.exact);
    CHECK(table.rows.size() == 4);
    CHECK(table.reference.find("Mittag") != std::string::npos);
    for (std::size_t i = 1; i < table.rows.size(); ++i) CHECK(table.rows[i].error < table.rows[i - 1].error);
}

TEST_CASE("example command") {
    const auto r = run_cli({"example", "delay-plain"});
    CHECK(r.code == kExitOk);
    CHECK(parse_config(r.out) == example_config("delay-plain"));
    const auto bad = run_cli({"example", "nonesuch"});
    CHECK(bad.code == kExitConfig);
    for (const auto& name : kExampleNames) CHECK(bad.err.find(name) != std::string::npos);
    CHECK_THROWS_AS(example_config("nonesuch"), ConfigError);
}

TEST_CASE("usage errors exit with 1") {
    CHECK(run_cli({}).code == kExitConfig);
    CHECK(run_cli({"solve"}).code == kExitConfig);
    CHECK(run_cli({"solve", "--config", "/nonexistent/cfg.json"}).code == kExitConfig);
    CHECK(run_cli({"frobnicate"}).code == kExitConfig);
}

}

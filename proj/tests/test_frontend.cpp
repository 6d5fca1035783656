// End-to-end runs of the command-line tool: text output, golden JSON
// reports, and the exit-code contract.
#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string("\"") + QTYPER_CLI_PATH + "\" " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    int status = pclose(pipe);
    r.exit_code = WEXITSTATUS(status);
    return r;
}

std::string corpus(const std::string& rel) {
    return std::string(QTYPER_SOURCE_DIR) + "/" + rel;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string write_temp(const std::string& name, const std::string& body) {
    const char* dir = std::getenv("TMPDIR");
    std::string path = std::string(dir ? dir : "/tmp") + "/" + name;
    std::ofstream out(path);
    REQUIRE(out);
    out << body;
    return path;
}

}  // namespace

TEST_CASE("infer prints the inferred type", "[frontend]") {
    RunResult r = run_cli("infer " + corpus("circuits/ghz.qt"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("XXX & ZZI & IZZ") != std::string::npos);
}

TEST_CASE("check passes every corpus circuit with a claim", "[frontend]") {
    for (const char* f : {"circuits/deutsch.qt", "circuits/ghz.qt",
                          "circuits/bell.qt", "circuits/toffoli.qt",
                          "circuits/ccz.qt", "circuits/steane_encoder.qt"}) {
        INFO("file: " << f);
        RunResult r = run_cli("check " + corpus(f));
        CHECK(r.exit_code == 0);
        CHECK(r.out.rfind("PASS", 0) == 0);
    }
}

TEST_CASE("check rejects a wrong claim with a diff and exit 1", "[frontend]") {
    std::string bad = write_temp(
        "qtyper_frontend_bad.qt", "QUBITS 2\nH 1\nCNOT 1 2\nEXPECT XX & -ZZ\n");
    RunResult r = run_cli("check " + bad);
    CHECK(r.exit_code == 1);
    CHECK(r.out.rfind("FAIL", 0) == 0);
    CHECK(r.out.find("expected branch not derived") != std::string::npos);
    std::remove(bad.c_str());
}

TEST_CASE("normalize canonicalizes a presentation", "[frontend]") {
    RunResult r = run_cli("normalize \"XXI & ZZI & ZZZ\"");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "XXI & ZZI & IIZ\n");
}

TEST_CASE("numeric coefficients need the opt-in flag", "[frontend]") {
    RunResult off = run_cli("normalize \"0.5(II + ZI + IZ - ZZ)\"");
    CHECK(off.exit_code == 2);
    CHECK(off.out.find("--numeric") != std::string::npos);
    RunResult on = run_cli("normalize \"0.5(II + ZI + IZ - ZZ)\" --numeric");
    CHECK(on.exit_code == 0);
    CHECK(on.out == "1/2(II + IZ + ZI - ZZ)\n");
}

TEST_CASE("separable grants a product cut and refuses an entangled one",
          "[frontend]") {
    RunResult ok = run_cli("separable \"XXI & ZZI & IIZ\" --qubits 1,2");
    CHECK(ok.exit_code == 0);
    CHECK(ok.out == "(XX & ZZ)@{1,2} & Z@{3}\n");
    RunResult no = run_cli("separable \"XXX & ZZI & IZZ\" --qubits 1");
    CHECK(no.exit_code == 1);
    CHECK(no.out.find("straddles the cut") != std::string::npos);
}

TEST_CASE("measure reports the outcome union with probabilities",
          "[frontend]") {
    RunResult r = run_cli("measure " + corpus("circuits/ghz_measure.qt"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("(ZII & IZI & IIZ) | (-ZII & -IZI & -IIZ)") !=
          std::string::npos);
    CHECK(r.out.find("p = 1/2") != std::string::npos);
}

TEST_CASE("measure exits 3 on shapes outside the theory", "[frontend]") {
    std::string src = write_temp(
        "qtyper_frontend_unsup.qt",
        "QUBITS 3\nH 1\nT 1\nCNOT 1 2\nCNOT 1 3\nMEAS 1\n");
    RunResult r = run_cli("measure " + src);
    CHECK(r.exit_code == 3);
    CHECK(r.out.rfind("unsupported", 0) == 0);
    std::remove(src.c_str());
}

TEST_CASE("tbound answers for named gates and for files", "[frontend]") {
    CHECK(run_cli("tbound T").out == "1\n");
    CHECK(run_cli("tbound CS").out == "2\n");
    CHECK(run_cli("tbound CCZ").out == "2\n");
    CHECK(run_cli("tbound CCCCZ").out == "6\n");
    RunResult file = run_cli("tbound " + corpus("circuits/ccz.qt"));
    CHECK(file.exit_code == 0);
    CHECK(file.out == "2\n");
}

TEST_CASE("synth emits a runnable listing with its T budget", "[frontend]") {
    RunResult bell = run_cli("synth \"XX & ZZ\"");
    CHECK(bell.exit_code == 0);
    CHECK(bell.out == "QUBITS 2\nH 1\nCNOT 1 2\n# t-count 0, certificate exact\n");
    RunResult magic = run_cli("synth \"(1/rt2)(X + Y)\"");
    CHECK(magic.exit_code == 0);
    CHECK(magic.out == "QUBITS 1\nH 1\nT 1\n# t-count 1, certificate exact\n");
}

TEST_CASE("verify confirms judgments against the dense oracle", "[frontend]") {
    for (const char* f :
         {"circuits/bell.qt", "circuits/ghz_measure.qt", "circuits/injection_t.qt"}) {
        INFO("file: " << f);
        RunResult r = run_cli("verify " + corpus(f) + " --oracle");
        CHECK(r.exit_code == 0);
        CHECK(r.out.rfind("PASS", 0) == 0);
    }
}

TEST_CASE("JSON reports are byte-stable against the golden corpus",
          "[frontend]") {
    const std::pair<const char*, const char*> cases[] = {
        {"infer circuits/ghz.qt --json", "tests/golden/infer_ghz.json"},
        {"measure circuits/injection_t.qt --json",
         "tests/golden/measure_injection.json"},
        {"separable \"XXI & ZZI & IIZ\" --qubits 1,2 --json",
         "tests/golden/separable_product.json"},
        {"tbound CCZ --json", "tests/golden/tbound_ccz.json"},
        {"synth \"XX & ZZ\" --json", "tests/golden/synth_bell.json"},
    };
    for (const auto& [argv, golden] : cases) {
        INFO("command: " << argv);
        std::string args(argv);
        auto pos = args.find("circuits/");
        if (pos != std::string::npos)
            args = args.substr(0, pos) + corpus(args.substr(pos));
        RunResult r = run_cli(args);
        CHECK(r.exit_code == 0);
        CHECK(r.out == slurp(corpus(golden)));
    }
}

TEST_CASE("usage errors exit 2", "[frontend]") {
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("infer /no/such/file.qt").exit_code == 2);
    CHECK(run_cli("normalize \"XX & ZZI\"").exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
}

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <qrep/constructions.hpp>
#include <qrep/decompose.hpp>
#include <qrep/json_io.hpp>

using namespace qrep;

namespace {

const char* cli_path() { return std::getenv("QUIVERREP_CLI"); }

struct RunResult {
    int exit_code;
    Json output;
};

RunResult run_cli(const std::string& args) {
    const std::string out_file = "/tmp/qrep_cli_test_out.json";
    const std::string cmd = std::string(cli_path()) + " " + args + " > " + out_file + " 2>/dev/null";
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(raw);
    std::ifstream in(out_file);
    if (in.peek() != std::ifstream::traits_type::eof()) in >> r.output;
    return r;
}

void write_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    out << j.dump();
}

} // namespace

TEST_CASE("CLI round trip: build, check, classify") {
    if (!cli_path()) {
        MESSAGE("QUIVERREP_CLI not set; skipping CLI tests");
        return;
    }

    auto build = run_cli("build --kind a0_loop --n 3");
    REQUIRE(build.exit_code == 0);
    write_file("/tmp/qrep_cli_rep.json", build.output);

    // the built file parses back to the in-process model
    HilbertRep expected = build_example(ExampleKind::A0Loop, 3);
    HilbertRep parsed = rep_from_json(build.output);
    CHECK(parsed.quiver == expected.quiver);
    CHECK((parsed.mat("a1") - expected.mat("a1")).norm() == 0.0);

    auto check = run_cli("check --rep /tmp/qrep_cli_rep.json");
    REQUIRE(check.exit_code == 0);
    CHECK(check.output.at("verdict") == "indecomposable");
    CHECK(check.output.at("end_dim") == 3);
    CHECK(check.output.at("radical_dim") == 2);
    // file round trip agrees with the in-process verdict
    auto verdict = is_indecomposable(expected);
    CHECK(check.output.at("end_dim") == verdict.end_dim);
    CHECK(check.output.at("radical_dim") == verdict.radical_dim);
    // manifest is present on every output
    CHECK(check.output.contains("manifest"));
    CHECK(check.output.at("manifest").at("seed").is_number());

    Quiver path;
    path.vertices = {"1", "2", "3"};
    path.arrows = {{"e1", "1", "2"}, {"e2", "2", "3"}};
    path.normalize();
    write_file("/tmp/qrep_cli_quiver.json", quiver_to_json(path));
    auto classify = run_cli("classify /tmp/qrep_cli_quiver.json");
    REQUIRE(classify.exit_code == 0);
    CHECK(classify.output.at("kind") == "dynkin");
    CHECK(classify.output.at("type") == "A3");
}

TEST_CASE("CLI reflect agrees with the library") {
    if (!cli_path()) return;
    HilbertRep x;
    x.quiver.vertices = {"1", "2"};
    x.quiver.arrows = {{"e", "1", "2"}};
    x.dims = {{"1", 2}, {"2", 1}};
    CMatrix f(1, 2);
    f << 1.0, 2.0;
    x.mats["e"] = f;
    write_file("/tmp/qrep_cli_rep.json", rep_to_json(x));
    auto r = run_cli("reflect --rep /tmp/qrep_cli_rep.json --vertex 2 --sign +");
    REQUIRE(r.exit_code == 0);
    HilbertRep got = rep_from_json(r.output);
    auto expected = reflect_plus(x, "2");
    CHECK(got.quiver == expected.rep.quiver);
    CHECK((got.mat("e") - expected.rep.mat("e")).norm() < 1e-14);
}

TEST_CASE("CLI decompose and duality emit residuals") {
    if (!cli_path()) return;
    HilbertRep x;
    x.quiver.vertices = {"1", "2"};
    x.quiver.arrows = {{"e", "1", "2"}};
    x.dims = {{"1", 1}, {"2", 2}};
    CMatrix f(2, 1);
    f << 1.0, 1.0;
    x.mats["e"] = f;
    write_file("/tmp/qrep_cli_rep.json", rep_to_json(x));

    auto dec = run_cli("decompose --rep /tmp/qrep_cli_rep.json");
    REQUIRE(dec.exit_code == 0);
    CHECK(dec.output.at("summands").size() == 2);
    CHECK(dec.output.at("residual").get<double>() < 1e-8);

    auto dual = run_cli("duality --rep /tmp/qrep_cli_rep.json --vertex 2");
    REQUIRE(dual.exit_code == 0);
    CHECK(dual.output.at("side") == "sink");
    CHECK(dual.output.at("tilde_dim") == 1);
    CHECK(dual.output.at("residual").get<double>() < 1e-8);
}

TEST_CASE("CLI error contract") {
    if (!cli_path()) return;
    Quiver path;
    path.vertices = {"1", "2"};
    path.arrows = {{"e", "1", "2"}};
    write_file("/tmp/qrep_cli_quiver.json", quiver_to_json(path));
    auto synth = run_cli("synthesize --quiver /tmp/qrep_cli_quiver.json --N 2");
    CHECK(synth.exit_code == 1);
    CHECK(synth.output.at("error") == "GraphIsDynkin");

    auto usage = run_cli("no_such_command");
    CHECK(usage.exit_code == 2);

    auto missing = run_cli("check --rep /tmp/no_such_file_qrep.json");
    CHECK(missing.exit_code == 1);
    CHECK(missing.output.at("error") == "BadInput");
}

TEST_CASE("CLI synthesize and plan on a star host") {
    if (!cli_path()) return;
    Quiver q;
    q.vertices = {"0", "1", "2", "3", "4"};
    q.arrows = {{"a1", "1", "0"}, {"a2", "0", "2"}, {"a3", "3", "0"}, {"a4", "0", "4"}};
    q.normalize();
    write_file("/tmp/qrep_cli_quiver.json", quiver_to_json(q));
    auto synth = run_cli("synthesize --quiver /tmp/qrep_cli_quiver.json --N 2");
    REQUIRE(synth.exit_code == 0);
    CHECK(synth.output.at("verdict") == "indecomposable");
    CHECK(synth.output.at("witness_type") == "D~4");

    Quiver base = q;
    for (auto& a : base.arrows)
        if (a.src == "0") std::swap(a.src, a.dst);  // leaf-to-hub base
    write_file("/tmp/qrep_cli_base.json", quiver_to_json(base));
    auto plan = run_cli("plan --from /tmp/qrep_cli_base.json --to /tmp/qrep_cli_quiver.json");
    REQUIRE(plan.exit_code == 0);
    CHECK(plan.output.at("steps").size() == 2);
}

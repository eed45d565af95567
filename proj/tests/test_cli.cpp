#include "circtrace/acceptance.hpp"
#include "circtrace/scenario.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace ct;
namespace fs = std::filesystem;

namespace {

const std::string kScenarios = CT_SCENARIO_DIR;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Json doc(const char* text) { return Json::parse(text); }

int cli(const std::string& args) {
    std::string cmd = std::string(CT_CLI_BINARY) + " " + args + " > /dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("circtrace_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("worked Hochschild scenario") {
    ScenarioReport r = run_scenario_file(kScenarios + "/hochschild_worked.json", {});
    CHECK(r.pass);
    cplx lhs = cplx_from_json(r.summary["value"]["lhs"], ""), rhs = cplx_from_json(r.summary["value"]["rhs"], "");
    CHECK(std::abs(lhs - 1.0) < 1e-10);
    CHECK(std::abs(rhs - 1.0) < 1e-10);
    CHECK(r.summary["seed"] == RunOptions{}.seed);
}

TEST_CASE("identity trace scenario") {
    ScenarioReport r = run_scenario_file(kScenarios + "/identity_trace.json", {});
    CHECK(r.pass);
    CHECK(std::abs(cplx_from_json(r.summary["value"], "")) < 1e-10);
    CHECK(r.summary["laurent"]["pole_order"] == 0);
}

TEST_CASE("input errors") {
    CHECK_THROWS_WITH_AS(run_scenario_file(kScenarios + "/broken_ref.json", {}), doctest::Contains("unknown operator_id"),
                         InputError);
    CHECK_THROWS_WITH_AS(run_scenario(doc(R"({"kind":"trace","operator_id":"identity","weight_id":"abs_D","colour":1})"),
                                      ".", {}),
                         doctest::Contains("colour"), InputError);
    CHECK_THROWS_WITH_AS(run_scenario(doc(R"({"kind":"nonsense"})"), ".", {}), doctest::Contains("unknown kind"),
                         InputError);
    CHECK_THROWS_WITH_AS(run_scenario(doc(R"({"kind":"trace","operator_id":"identity","weight_id":"heat"})"), ".", {}),
                         doctest::Contains("unknown weight_id"), InputError);
    CHECK_THROWS_WITH_AS(run_scenario(doc(R"({"kind":"chern","domain":{"dim":3,"ranges":[[0,1],[0,1],[0,1]]},
        "connection":{"terms":[{"coeff_expr":"x1 +* 2","operator_id":"pauli_x","axis":1}]}})"),
                                      ".", {}),
                         doctest::Contains("connection.terms[0].coeff_expr"), InputError);
    CHECK_THROWS_WITH_AS(run_scenario(doc(R"({"kind":"chern","domain":{"dim":3,"ranges":[[0,1],[0,1],[0,1]],"step":1},
        "connection":{"terms":[]}})"),
                                      ".", {}),
                         doctest::Contains("domain.step"), InputError);
    CHECK_THROWS_WITH_AS(run_scenario(doc(R"({"kind":"chern","domain":{"dim":2,"ranges":[[0,1],[0,1]]},
        "connection":{"terms":[{"coeff_expr":"x1","operator_id":"pauli_x","axis":3}]}})"),
                                      ".", {}),
                         doctest::Contains("axis out of range"), InputError);
    CHECK_THROWS_WITH_AS(run_scenario(doc(R"({"kind":"trace","operators":{"A":"missing_file.json"},"operator_id":"A",
        "weight_id":"abs_D"})"),
                                      ".", {}),
                         doctest::Contains("cannot open"), InputError);
    CHECK_THROWS_AS(run_scenario(doc(R"({"kind":"trace","operators":{"A":{"order":0,"depth":8,"terms":[],"extra":2}},
        "operator_id":"A","weight_id":"abs_D"})"),
                                 ".", {}),
                    InputError);
}

TEST_CASE("tolerance violations are reported, not thrown") {
    ScenarioReport r = run_scenario(
        doc(R"({"kind":"trace","operator_id":"inv_abs","weight_id":"abs_D","expect":1.0,"tolerance":1e-6})"), ".", {});
    CHECK_FALSE(r.pass);
    CHECK(r.summary["checks"][0]["pass"] == false);
    RunOptions loose;
    loose.tolerance_scale = 1e6;
    CHECK(run_scenario(doc(R"({"kind":"trace","operator_id":"inv_abs","weight_id":"abs_D","expect":1.1544,
        "tolerance":1e-6})"),
                       ".", loose)
              .pass);
}

TEST_CASE("every shipped scenario except the broken one passes") {
    int n = 0;
    for (auto& e : fs::directory_iterator(kScenarios)) {
        if (e.path().extension() != ".json" || e.path().stem() == "broken_ref") continue;
        ScenarioReport r = run_scenario_file(e.path().string(), {});
        INFO(e.path().filename().string());
        CHECK(r.pass);
        ++n;
    }
    CHECK(n >= 10);
}

TEST_CASE("reports are byte-identical across runs") {
    RunOptions opt;
    opt.seed = 99;
    for (const char* name : {"hardy_anomaly", "conjugation_grassmann", "kv_hardy"}) {
        fs::path a = scratch("a"), b = scratch("b");
        write_report(run_scenario_file(kScenarios + "/" + name + ".json", opt), a.string(), name);
        write_report(run_scenario_file(kScenarios + "/" + name + ".json", opt), b.string(), name);
        CHECK(slurp(a / (std::string(name) + ".json")) == slurp(b / (std::string(name) + ".json")));
        if (fs::exists(a / (std::string(name) + ".csv")))
            CHECK(slurp(a / (std::string(name) + ".csv")) == slurp(b / (std::string(name) + ".csv")));
    }
}

TEST_CASE("command-line exit codes") {
    CHECK(cli("run " + kScenarios + "/identity_trace.json") == 0);
    CHECK(cli("run " + kScenarios + "/broken_ref.json") == 1);
    CHECK(cli("run " + kScenarios + "/identity_trace.json --tolerance-scale 10") == 0);
    fs::path d = scratch("fail");
    std::ofstream(d / "fail.json") << R"({"kind":"trace","operator_id":"identity","weight_id":"abs_D","expect":3})";
    CHECK(cli("run " + (d / "fail.json").string()) == 2);
    std::ofstream(d / "bad.json") << "{ not json";
    CHECK(cli("run " + (d / "bad.json").string()) == 1);
    CHECK(cli("selftest --list") == 0);
    CHECK(cli("frobnicate") == 1);
    fs::path out = scratch("out");
    CHECK(cli("run " + kScenarios + "/hardy_anomaly.json " + kScenarios + "/identity_trace.json --out " + out.string()) == 0);
    CHECK(fs::exists(out / "hardy_anomaly.json"));
    CHECK(fs::exists(out / "hardy_anomaly.csv"));
    CHECK(fs::exists(out / "identity_trace.json"));
}

TEST_CASE("acceptance verdicts do not depend on the seed") {
    AcceptanceOptions a, b;
    b.seed = 7;
    for (int id : {1, 5, 12}) {
        CriterionResult x = run_criterion(id, a), y = run_criterion(id, b), z = run_criterion(id, b);
        CHECK(x.pass == y.pass);
        CHECK(y.detail == z.detail);
    }
    CHECK(criterion_title(9) == "Hardy gauge anomaly");
    CHECK_THROWS(criterion_title(13));
}

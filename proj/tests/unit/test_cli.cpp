#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "support.hpp"

namespace {

struct Run {
    int code = -1;
    std::string out;
};

// stdout only; stderr folded in when `merge` is set.
Run run(const std::string& args, bool merge = false) {
    std::string cmd = std::string(FRACCRIT_BIN) + " " + args + (merge ? " 2>&1" : " 2>/dev/null");
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string data(const std::string& rel) { return testing::data_path(rel); }

std::string temp_file(const std::string& name, const std::string& text) {
    std::string path = std::string(FRACCRIT_TMP_DIR) + "/" + name;
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST_CASE("exit codes follow the verdict") {
    CHECK(run("color " + data("graphs/petersen.eg")).code == 0);
    CHECK(run("color " + data("graphs/c5.eg")).code == 1);
    CHECK(run("critical " + data("graphs/c5.eg")).code == 0);
    CHECK(run("critical " + data("graphs/petersen.eg")).code == 1);
    CHECK(run("reduce " + data("configs/two-deg2.cfg")).code == 0);
    CHECK(run("vertices " + data("polytopes/hall-adj.sys")).code == 0);
}

TEST_CASE("usage and input errors exit with 2 and a message") {
    Run missing = run("color /nonexistent/file.eg", true);
    CHECK(missing.code == 2);
    CHECK(missing.out.find("fraccrit: cannot read") != std::string::npos);
    CHECK(run("closure bogus " + data("obstructions.eg")).code == 2);
    CHECK(run("").code == 2);
    CHECK(run("color").code == 2);
    Run bad = run("color " + temp_file("bad.eg", "a:a;\n"), true);
    CHECK(bad.code == 2);
    CHECK(bad.out.rfind("fraccrit: ", 0) == 0);
    CHECK(run("enumerate --max-n 40").code == 2);
}

TEST_CASE("text output carries the exact values") {
    CHECK(run("chif " + data("graphs/petersen.eg")).out == "5/2\n");
    CHECK(run("chif " + data("graphs/f14-1.eg")).out == "14/5\n");
    Run v = run("vertices " + data("polytopes/hall-adj.sys"));
    CHECK(v.out.find("1 3 1 0\n") != std::string::npos);
    CHECK(v.out.find("# 11 vertices") != std::string::npos);
    Run c = run("color " + data("graphs/c5.eg"));
    CHECK(c.out.find("not 11/4-colorable") != std::string::npos);
    CHECK(c.out.find("certificate:") != std::string::npos);
}

TEST_CASE("unbounded polytopes report a ray") {
    Run r = run("vertices " + temp_file("ray.sys", "vars 2\nle 1*x0 -1*x1 <= 2\n"), true);
    CHECK(r.code == 1);
    CHECK(r.out.find("unbounded; recession direction: ") != std::string::npos);
}

TEST_CASE("output is deterministic across job counts") {
    for (const std::string args : {"argcheck " + data("configs/two-deg2.cfg"), "reduce " + data("configs/k4plus-one-deg2.cfg") + " --trivial",
                                   std::string("enumerate --max-n 8")}) {
        Run one = run("-j 1 " + args), four = run("-j 4 " + args);
        CHECK(one.code == four.code);
        CHECK(one.out == four.out);
        CHECK_FALSE(one.out.empty());
    }
}

TEST_CASE("json output parses and has the documented fields") {
    using nlohmann::json;
    json chif = json::parse(run("--json chif " + data("graphs/petersen.eg")).out);
    REQUIRE(chif.is_array());
    CHECK(chif[0]["value"] == "5/2");

    json color = json::parse(run("--json color " + data("graphs/c5.eg")).out);
    CHECK(color[0]["colorable"] == false);
    CHECK(color[0]["certificate"]["total"] == "2");

    Run arg = run("--json argcheck " + data("configs/two-deg2.cfg"));
    REQUIRE(arg.code == 0);
    json checks = json::parse(arg.out);
    REQUIRE(checks.size() == 4);
    for (const auto& e : checks) {
        for (const char* key : {"check", "member", "site", "verdict", "witness"}) CHECK(e.contains(key));
        CHECK(e["verdict"] == "pass");
    }
    CHECK(checks[0]["check"] == "(i) substitute");

    json red = json::parse(run("--json reduce " + data("configs/c4-one-deg2.cfg") + " --trivial").out);
    CHECK(red[0]["reducible"] == true);
    CHECK(red[0]["vertices"] == 18);
}

TEST_CASE("catalog verification reports the count") {
    Run small = run("verify-c0 --expect 4 " + temp_file("c5s.eg", "a:be;b:c;c:d;d:e;\n\na:be;b:c;c:d;d:e; a1\n"), true);
    CHECK(small.code == 1);
    CHECK(small.out.find("count: FAIL (2 members, expected 4)") != std::string::npos);
    CHECK(small.out.find("critical: pass") != std::string::npos);
}

#include <doctest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(GREENCM_CLI_PATH) + " --data-dir " + GREENCM_SOURCE_DIR + "/data " + args +
                      " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::array<char, 4096> buf{};
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

}  // namespace

TEST_CASE("cli: survey") {
    Run r = run("survey-classgroups --bound 1000");
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["fields"] == 305);
    CHECK(j["exponent2_or_trivial"] == 52);
}

TEST_CASE("cli: exit codes") {
    Run sing = run("green-eval --s 3 --z1 i --z2 i");
    CHECK(sing.code == 1);
    auto j = nlohmann::json::parse(sing.out);
    CHECK(j["error"]["type"] == "singularity");

    CHECK(run("").code == 2);
    CHECK(run("green-eval --s 3").code == 2);
    CHECK(run("example 4").code == 2);
    CHECK(run("green-eval --s 3 --z2 nowhere").code == 2);
    CHECK(run("green-eval --s 0.5 --z1 i --z2 2i").code == 2);
    CHECK(run("green-eval --s 3 --m 2 --z1 i --z2 \"(1+sqrt(-23))/2\" --tol 1e-30").code == 1);
}

TEST_CASE("cli: deterministic output is reproducible") {
    const std::string args = "--deterministic cm-formula --d2 -23 --d1 -4 --j 2 --table " +
                             std::string(GREENCM_SOURCE_DIR) + "/data/table-23.json --per-point";
    Run a = run(args), b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    auto j = nlohmann::json::parse(a.out);
    CHECK(j.dump().find("-1.00039455634") != std::string::npos);
}

TEST_CASE("cli: green-eval") {
    Run r = run("--deterministic green-eval --s 3 --z1 i --z2 \"(1+sqrt(-23))/2\" --tol 1e-9");
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(std::stold(j["value"].get<std::string>()) == doctest::Approx(-1.000394556341).epsilon(1e-9));
}

TEST_CASE("cli: tables") {
    Run ok = run("table-validate " + std::string(GREENCM_SOURCE_DIR) + "/data/table-23.json");
    CHECK(ok.code == 0);
    CHECK(nlohmann::json::parse(ok.out)["valid"] == true);
    Run missing = run("table-validate /nonexistent/table.json");
    CHECK(missing.code == 1);
}

TEST_CASE("cli: first example passes") {
    Run r = run("--deterministic example 1");
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["pass"] == true);
}

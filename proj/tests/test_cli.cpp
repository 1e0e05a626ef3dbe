#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "csf/cli.hpp"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "csf_solitons");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = csf::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "csf_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("classify emits the class record") {
    unsetenv(csf::cli::kOutputDirEnv);
    const Run r = run({"classify", "--A", "1", "--B", "-1", "--x0", "0", "--y0", "0.3"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["schema"] == "csf-solitons/1");
    CHECK(j["class"] == "RotatingShrinkerType1");
    CHECK(j["limit_radius"].get<double>() == doctest::Approx(1.0));
    CHECK(j["config"]["tol"].get<double>() == doctest::Approx(1e-9));
    CHECK(j["config"]["horizon"].get<double>() == doctest::Approx(2000.0));
}

TEST_CASE("exit codes") {
    unsetenv(csf::cli::kOutputDirEnv);
    SUBCASE("invalid flags") {
        CHECK(run({"integrate", "--bogus"}).code == 2);
        CHECK(run({"integrate", "--tol", "-1"}).code == 2);
        CHECK(run({"integrate", "--format", "png"}).code == 2);
        CHECK(run({"classify", "--format", "svg"}).code == 2);
        CHECK(run({"abresch-langer", "--p", "2"}).code == 2);
        CHECK(run({}).code == 2);
        const Run r = run({"nonsense"});
        CHECK(r.code == 2);
        CHECK(json::parse(r.err)["error"]["exit_code"] == 2);
    }
    SUBCASE("solver failure") {
        const Run r = run({"abresch-langer", "--p", "1", "--q", "1"});
        CHECK(r.code == 3);
        const json e = json::parse(r.err);
        CHECK(e["error"]["kind"] == "solver-failure");
        CHECK(e["error"]["message"].get<std::string>().find("1/2 < p/q < sqrt(2)/2") != std::string::npos);
        CHECK(run({"comet", "--A", "0", "--B", "-1"}).code == 3);
        CHECK(run({"figure", "no-such-figure"}).code == 3);
    }
    SUBCASE("unwritable output") {
        const Run r = run({"integrate", "--A", "1", "--span", "1", "--output", "/nonexistent-dir/x.csv"});
        CHECK(r.code == 4);
        CHECK(json::parse(r.err)["error"]["kind"] == "unwritable-output");
    }
    SUBCASE("help") { CHECK(run({"--help"}).code == 0); }
}

TEST_CASE("csv layout") {
    unsetenv(csf::cli::kOutputDirEnv);
    const Run r = run({"integrate", "--A", "1", "--B", "-0.25", "--x0", "0.5", "--span", "2"});
    REQUIRE(r.code == 0);
    std::istringstream is(r.out);
    std::string meta, header, row;
    std::getline(is, meta);
    std::getline(is, header);
    std::getline(is, row);
    CHECK(meta.rfind("# ", 0) == 0);
    const json m = json::parse(meta.substr(2));
    CHECK(m["config"]["A"] == 1.0);
    CHECK(m["config"]["tol"] == 1e-10);
    CHECK(header == "s,x,y,theta,px,py,r,phi");
    // First row starts at s = -2 written with 17 significant digits.
    CHECK(row.rfind("-2,", 0) == 0);
    std::istringstream cells(row);
    std::string cell;
    int n = 0;
    while (std::getline(cells, cell, ',')) ++n;
    CHECK(n == 8);
}

TEST_CASE("deterministic outputs") {
    unsetenv(csf::cli::kOutputDirEnv);
    const std::vector<std::string> csv = {"abresch-langer", "--p", "2", "--q", "3"};
    CHECK(run(csv).out == run(csv).out);
    const std::vector<std::string> js = {"comet", "--A", "1", "--B", "-1", "--format", "json"};
    CHECK(run(js).out == run(js).out);
    const std::vector<std::string> svg = {"figure", "AL1", "--no-timestamp"};
    const Run a = run(svg);
    CHECK(a.out == run(svg).out);
    CHECK(a.out.find("<!-- generated") == std::string::npos);
    CHECK(run({"figure", "AL1"}).out.find("<!-- generated") != std::string::npos);
}

TEST_CASE("svg layout") {
    unsetenv(csf::cli::kOutputDirEnv);
    const Run r = run({"abresch-langer", "--p", "2", "--q", "3", "--format", "svg", "--no-timestamp"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("<polyline points=") != std::string::npos);
    CHECK(r.out.find("&quot;") == std::string::npos);
    const auto m0 = r.out.find("<metadata>") + 10, m1 = r.out.find("</metadata>");
    const json meta = json::parse(r.out.substr(m0, m1 - m0));
    CHECK(meta["closure"].get<double>() <= 1e-5);
    CHECK(meta["config"]["p"] == 2);
    // viewBox spans the curve plus 5% of its extent on each side.
    const auto v0 = r.out.find("viewBox=\"") + 9;
    std::istringstream vb(r.out.substr(v0, r.out.find('"', v0) - v0));
    double x, y, w, h;
    vb >> x >> y >> w >> h;
    CHECK(w > 0);
    CHECK(h > 0);
    const double r_max = meta["r_max"].get<double>();
    CHECK(w <= 2.0 * r_max * 1.1 + 1e-6);
    CHECK(w >= 0.5 * r_max);
}

TEST_CASE("output directory from the environment") {
    const fs::path dir = scratch("envdir");
    fs::create_directories(dir);
    setenv(csf::cli::kOutputDirEnv, dir.c_str(), 1);
    const Run r = run({"figure", "grim-reaper", "--no-timestamp"});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(fs::exists(dir / "figure-grim-reaper.svg"));
    CHECK(run({"integrate", "--A", "1", "--span", "1", "-o", "rel.csv"}).code == 0);
    CHECK(fs::exists(dir / "rel.csv"));
    CHECK(run({"integrate", "--A", "1", "--span", "1", "-o", "-"}).out.find("s,x,y,theta") != std::string::npos);
    unsetenv(csf::cli::kOutputDirEnv);
}

TEST_CASE("reconstruct from a phase CSV") {
    unsetenv(csf::cli::kOutputDirEnv);
    const fs::path path = scratch("phase.csv");
    REQUIRE(run({"integrate", "--A", "1", "--B", "-1", "--x0", "0.2", "--y0", "0.4", "--span", "3", "-o",
                 path.string()})
                .code == 0);
    const Run r = run({"reconstruct", "--A", "1", "--B", "-1", "--input", path.string()});
    REQUIRE(r.code == 0);
    // Same samples, same curve.
    auto body = [](const std::string& s) { return s.substr(s.find('\n') + 1); };
    CHECK(body(r.out) == body(slurp(path)));
    CHECK(run({"reconstruct", "--A", "1", "--B", "-1", "--input", "/no/such/file"}).code == 2);
}

TEST_CASE("every subcommand runs") {
    unsetenv(csf::cli::kOutputDirEnv);
    CHECK(run({"expander", "--B", "1", "--x0", "1", "--format", "json"}).code == 0);
    const json e = json::parse(run({"expander", "--B", "1", "--x0", "1", "--format", "json"}).out);
    CHECK(e["total_curvature"].get<double>() == doctest::Approx(1.9208210104054));
    CHECK(e["curves"][0]["px"].size() == e["curves"][0]["s"].size());

    const json ev = json::parse(run({"evolve", "--B", "-1", "--x0", "1", "--t", "0.375", "--format", "json"}).out);
    CHECK(ev["g"].get<double>() == doctest::Approx(0.5));
    CHECK(ev["curves"][0]["r"][0].get<double>() == doctest::Approx(0.5));
    CHECK(run({"evolve", "--B", "-1", "--x0", "1", "--t", "0.5"}).code == 3);

    const Run v = run({"verify", "--A", "1", "--B", "-1", "--y0", "0.3"});
    CHECK(v.code == 0);
    CHECK(json::parse(v.out)["passed"] == true);
    CHECK(run({"verify"}).code == 0);  // Grim Reaper

    const json list = json::parse(run({"figure", "--list"}).out);
    CHECK(list["figures"].size() == 19);
    CHECK(run({"figure"}).code == 2);
    const json fig = json::parse(run({"figure", "AL1", "--format", "json"}).out);
    CHECK(fig["signature"]["crossings"] == 3);
}

TEST_CASE("sweep keeps input order for any worker count") {
    unsetenv(csf::cli::kOutputDirEnv);
    const fs::path path = scratch("sweep.txt");
    {
        std::ofstream f(path);
        f << "# A B x0 y0\n0 -1 1 0\n1 0 0 0\n1 -1 0 0.3\n0 1 0.5 0\n\n1 0.25 0.2 0.1\n0 -1 1.93359707091403 0\n";
    }
    const Run one = run({"sweep", "--input", path.string()});
    const Run two = run({"sweep", "--input", path.string(), "--jobs", "3"});
    REQUIRE(one.code == 0);
    CHECK(one.out == two.out);
    const json j = json::parse(one.out);
    const std::vector<std::string> want = {"Circle", "Rotator", "RotatingShrinkerType1", "Expander", "RotatingExpander",
                                           "AbreschLanger"};
    REQUIRE(j["results"].size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(j["results"][i]["index"] == i);
        CHECK(j["results"][i]["class"] == want[i]);
    }
    const Run csv = run({"sweep", "--input", path.string(), "--format", "csv"});
    CHECK(csv.out.rfind("index,A,B,x0,y0,class,p,q,limit_radius\n", 0) == 0);
}

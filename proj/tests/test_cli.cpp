#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "hclib/report.hpp"

using namespace hc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

PolyRat poly_q(std::vector<Rat> c) { return PolyRat(std::move(c)); }

int run_cli(const std::string& args) {
    std::string cmd = std::string(HC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WEXITSTATUS(st);
}

std::string capture_cli(const std::string& args, const fs::path& tmp) {
    fs::path out = tmp / "stdout.txt";
    std::string cmd =
        std::string(HC_CLI_PATH) + " " + args + " >" + out.string() + " 2>/dev/null";
    std::system(cmd.c_str());
    std::ifstream in(out);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("expression parser") {
    CHECK(parse_poly("x^11-3*x^6+9*x^5-27") ==
          pr_add(pr_sub(pr_pow(pr_x(), 11), pr_scale(pr_pow(pr_x(), 6), Rat(3))),
                 pr_sub(pr_scale(pr_pow(pr_x(), 5), Rat(9)), pr_const(Rat(27)))));
    CHECK(parse_poly("(x-1)*(x+1)") == poly_q({Rat(-1), Rat(0), Rat(1)}));
    CHECK(parse_poly("-x^2 + x/2") == poly_q({Rat(0), Rat(1, 2), Rat(-1)}));
    CHECK(parse_poly("2^3") == pr_const(Rat(8)));
    CHECK(parse_poly("x*(3 - x)") == poly_q({Rat(0), Rat(3), Rat(-1)}));
    CHECK_THROWS_AS(parse_poly("x+"), ParseError);
    CHECK_THROWS_AS(parse_poly("x/x"), ParseError);
    CHECK_THROWS_AS(parse_poly("(x"), ParseError);
    CHECK_THROWS_AS(parse_poly("x$2"), ParseError);
}

TEST_CASE("ascii diagram round-trips through the JSON parser") {
    std::vector<std::pair<PolyRat, unsigned long>> curves = {
        {parse_poly("x^11-3*x^6+9*x^5-27"), 3},
        {parse_poly("(x^3-81)*(x^3+81)*((x-3)^3-177147)"), 3},
        {parse_poly("(x^2-15625)*(x^2-125)*(x^2-5)"), 5},
    };
    for (auto& [f, p] : curves) {
        ClusterPicture pic = rational_picture(f, p);
        std::string a1 = ascii_picture(pic);
        ClusterPicture pic2 = picture_from_json(picture_to_json(pic), p);
        CHECK(a1 == ascii_picture(pic2));
        CHECK_FALSE(a1.empty());
    }
}

TEST_CASE("run_curve: Examplef report carries the epsilon table") {
    CurveInput in;
    in.p = 3;
    in.poly_expr = "x^11-3*x^6+9*x^5-27";
    CurveReport rep = run_curve(in);
    CHECK(rep.ok());
    CHECK(rep.genus_ok);
    json j = json::parse(rep.json_text);
    REQUIRE(j.contains("clusters"));
    std::vector<std::pair<std::string, std::string>> eps;
    for (auto& r : j["clusters"]["invariants"])
        eps.push_back({r["epsilon"][0], r["epsilon"][1]});
    // s6 has eps 3, R has eps 11/5
    REQUIRE(eps.size() == 2);
    CHECK(eps[0] == std::pair<std::string, std::string>{"11", "5"});
    CHECK(eps[1] == std::pair<std::string, std::string>{"3", "1"});
    CHECK(j["newton"]["np_regular"].get<bool>());
    CHECK_FALSE(rep.dot_text.empty());
}

TEST_CASE("run_curve: genus-4 differentials section") {
    CurveInput in;
    in.p = 3;
    in.poly_expr = "(x^3-81)*(x^3+81)*((x-3)^3-177147)";
    CurveReport rep = run_curve(in);
    CHECK(rep.ok());
    json j = json::parse(rep.json_text);
    REQUIRE(j.contains("differentials"));
    std::vector<long> exps;
    for (auto& e : j["differentials"]["entries"]) exps.push_back(e["exponent"]);
    CHECK(exps == std::vector<long>{4, 3, 1, 0});
    CHECK(j["differentials"]["v_det_A"] == 8);
}

TEST_CASE("run_curve: partial report when preconditions fail") {
    CurveInput in;
    in.p = 7;
    in.poly_expr = "((x-7)^2-7)*((x+7)^2-7)*(x-1)";
    CurveReport rep = run_curve(in);
    CHECK_FALSE(rep.ok());
    json j = json::parse(rep.json_text);
    // the computable sections are still present
    CHECK(j.contains("newton"));
    CHECK(j.contains("clusters"));
    CHECK(j.contains("model"));
    CHECK(j.contains("errors"));
}

TEST_CASE("run_curve: structured input errors") {
    CurveInput bad_prime;
    bad_prime.p = 6;
    bad_prime.poly_expr = "x^5-7";
    CHECK_FALSE(run_curve(bad_prime).ok());

    CurveInput insep;
    insep.p = 7;
    insep.poly_expr = "(x-1)^2*(x^3-7)";
    CurveReport rep = run_curve(insep);
    CHECK_FALSE(rep.ok());
    REQUIRE_FALSE(rep.errors.empty());
    CHECK(rep.errors[0].find("separable") != std::string::npos);
}

TEST_CASE("json output is deterministic") {
    CurveInput in;
    in.p = 3;
    in.poly_expr = "x^11-3*x^6+9*x^5-27";
    CHECK(run_curve(in).json_text == run_curve(in).json_text);
}

TEST_CASE("cli exit codes and output files") {
    fs::path tmp = fresh_dir("hcmodel_cli_test");

    CHECK(run_cli("--nonsense") == 2);
    CHECK(run_cli("") == 2);  // no input given
    CHECK(run_cli("--prime 3 --poly \"x^11-3*x^6+9*x^5-27\"") == 0);
    CHECK(run_cli("--prime 7 --poly \"(x-1)^2*(x^3-7)\"") == 1);

    CHECK(run_cli("--prime 3 --poly \"x^11-3*x^6+9*x^5-27\" --format all --out " +
                  tmp.string()) == 0);
    CHECK(fs::exists(tmp / "report.json"));
    CHECK(fs::exists(tmp / "report.dot"));
    CHECK(fs::exists(tmp / "report.txt"));

    std::string dot = capture_cli(
        "--prime 7 --poly \"x^5-7\" --format dot", tmp);
    CHECK(dot.find("graph") != std::string::npos);
}

TEST_CASE("cli picture override") {
    fs::path tmp = fresh_dir("hcmodel_pic_test");
    // semistable three-twins picture, hand-authored
    std::ofstream(tmp / "pic.json") <<
        R"({"v_cf":[0,1],"tree":{"size":6,"rho":[0,1],"children":[
            {"size":2,"rho":[1,1],"centre":"0"},
            {"size":2,"rho":[1,1],"centre":"1"},
            {"size":2,"rho":[1,1],"centre":"2"}]}})";
    CHECK(run_cli("--prime 7 --picture " + (tmp / "pic.json").string()) == 0);
}

TEST_CASE("cli batch mode") {
    fs::path tmp = fresh_dir("hcmodel_batch_test");
    std::ofstream(tmp / "a.json") << R"({"p":3,"poly":"x^11-3*x^6+9*x^5-27"})";
    std::ofstream(tmp / "b.json") << R"({"p":7,"poly":"x^5-7"})";
    std::ofstream(tmp / "c.json") << R"js({"p":7,"poly":"(x-1)^2*(x^3-7)"})js";

    CHECK(run_cli("--batch") == 0);  // empty aggregate

    std::string ok_agg = capture_cli(
        (tmp / "a.json").string() + " " + (tmp / "b.json").string(), tmp);
    json ja = json::parse(ok_agg);
    CHECK(ja["all_ok"].get<bool>());
    CHECK(ja["curves"].size() == 2);
    CHECK(run_cli((tmp / "a.json").string() + " " + (tmp / "b.json").string()) == 0);

    // one inseparable entry: others still reported, exit 1
    std::string bad_agg = capture_cli(
        (tmp / "a.json").string() + " " + (tmp / "c.json").string(), tmp);
    json jb = json::parse(bad_agg);
    CHECK_FALSE(jb["all_ok"].get<bool>());
    CHECK(jb["curves"][0]["ok"].get<bool>());
    CHECK_FALSE(jb["curves"][1]["ok"].get<bool>());
    CHECK(run_cli((tmp / "a.json").string() + " " + (tmp / "c.json").string()) == 1);
}

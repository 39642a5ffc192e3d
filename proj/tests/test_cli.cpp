#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "mml/io.hpp"

using namespace mml;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run mml_cli(const std::string& args) {
    auto tmp = fs::temp_directory_path() / "mml_cli_stdout.txt";
    std::string cmd = std::string(MML_CLI_PATH) + " " + args + " > " + tmp.string() + " 2>&1";
    int raw = std::system(cmd.c_str());
    std::ifstream in(tmp);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "mml_cli_test") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& f) const { return (path / f).string(); }
};

}  // namespace

TEST_CASE("space files round trip through the CLI") {
    TempDir t;
    CHECK(mml_cli("gallery two-point --s 3 -o " + (t / "a.json")).code == 0);
    CHECK(mml_cli("gallery two-point --s 4 -o " + (t / "b.json")).code == 0);
    CHECK(mml_cli("product --space " + (t / "a.json") + " --space " + (t / "b.json") + " --fn fp:2 -o " +
                  (t / "p.json"))
              .code == 0);
    auto p = load_space(t / "p.json");
    CHECK(p.d(0, 3) == doctest::Approx(5));
    CHECK(mml_cli("space normalize --space " + (t / "p.json") + " -o " + (t / "q.json")).code == 0);
    CHECK(slurp(t / "p.json") == slurp(t / "q.json"));
    auto info = mml_cli("space info --space " + (t / "p.json"));
    CHECK(info.code == 0);
    CHECK(json::parse(info.out)["points"] == 4);

    CHECK(mml_cli("gallery two-point --s 5 -o " + (t / "c.json")).code == 0);
    CHECK(mml_cli("transform --space " + (t / "c.json") + " --fn h1 -o " + (t / "h.json")).code == 0);
    CHECK(load_space(t / "h.json").d(0, 1) == doctest::Approx(1));
}

TEST_CASE("mpf commands") {
    CHECK(mml_cli("mpf check --fn fp:2 --samples 2000").code == 0);
    auto sq = mml_cli("mpf check --fn square --samples 2000");
    CHECK(sq.code == 1);
    CHECK(json::parse(sq.out)["verdict"] == "violation");
    auto d = mml_cli("mpf defect --fn gn3:5 --D 4 --h 0.0625 --probe 16");
    CHECK(d.code == 0);
    CHECK(json::parse(d.out)["sup_defect"].get<double>() == doctest::Approx(2));
    auto c = mml_cli("mpf classify --family gn3 --n 1,2,4");
    CHECK(c.code == 0);
    auto cond = json::parse(c.out)["conditions"];
    CHECK(cond[4] == true);
    CHECK(cond[3] == false);
    auto e = mml_cli("mpf eval --fn fp:2 --at 3,4");
    CHECK(json::parse(e.out)["value"].get<double>() == doctest::Approx(5));
}

TEST_CASE("distance and invariant commands") {
    TempDir t;
    CHECK(mml_cli("gallery two-point --s 1 -o " + (t / "x.json")).code == 0);
    auto pr = mml_cli("dist prok --space " + (t / "x.json") + " --mu 1,0 --nu 0.5,0.5 --lambda 2 --plan-csv " +
                      (t / "plan.csv"));
    REQUIRE(pr.code == 0);
    CHECK(json::parse(pr.out)["value"].get<double>() == doctest::Approx(0.25));
    CHECK(fs::exists(t / "plan.csv"));
    CHECK(mml_cli("gallery two-point --s 1.2 -o " + (t / "y.json")).code == 0);
    auto bx = mml_cli("dist box --x " + (t / "x.json") + " --y " + (t / "y.json") + " --mode exact");
    CHECK(json::parse(bx.out)["upper"].get<double>() == doctest::Approx(0.2));
    auto ky = mml_cli("dist ky --space " + (t / "x.json") + " --f 0,1 --g 0,1.5");
    CHECK(json::parse(ky.out)["value"].get<double>() == doctest::Approx(0.5));
    auto od = mml_cli("invariant od --space " + (t / "x.json") + " --kappa 0.3 --mode exact");
    CHECK(json::parse(od.out)["value"].get<double>() == doctest::Approx(1));
    CHECK(mml_cli("invariant od --space " + (t / "x.json") + " --kappa 1.5").code == 2);
    CHECK(mml_cli("dist box --x " + (t / "missing.json") + " --y " + (t / "y.json")).code == 2);
}

TEST_CASE("certificate command") {
    TempDir t;
    CHECK(mml_cli("gallery two-point --s 2 -o " + (t / "x.json")).code == 0);
    {
        std::ofstream(t / "one.json") << R"({"dist":[[0]],"weight":[1]})";
        std::ofstream(t / "map.json") << R"({"map":[0,0]})";
    }
    auto c = mml_cli("cert --source " + (t / "x.json") + " --target " + (t / "one.json") + " --map " + (t / "map.json"));
    CHECK(c.code == 0);
    CHECK(json::parse(c.out)["epsilon_haus"].get<double>() == doctest::Approx(0.5));
    auto strict = mml_cli("cert --source " + (t / "x.json") + " --target " + (t / "one.json") + " --map " +
                          (t / "map.json") + " --max-eps 0.1");
    CHECK(strict.code == 1);
}

TEST_CASE("battery and experiment commands") {
    TempDir t;
    auto b = mml_cli("battery key_lp --trials 4 --csv " + (t / "b.csv"));
    CHECK(b.code == 0);
    CHECK(b.out.find("PASS key_lp") != std::string::npos);
    CHECK(fs::exists(t / "b.csv"));
    CHECK(mml_cli("battery nonsense --trials 2").code == 2);

    auto e1 = mml_cli("experiment box_convergence --size 8 --out " + (t / "r1") + " --save-spec " + (t / "spec.json"));
    CHECK(e1.code == 0);
    auto e2 = mml_cli("experiment --spec " + (t / "spec.json") + " --out " + (t / "r2"));
    CHECK(e2.code == 0);
    CHECK(slurp(t / "r1/box_convergence.csv") == slurp(t / "r2/box_convergence.csv"));
    CHECK(fs::exists(t / "r1/box_convergence.summary.txt"));
    CHECK(mml_cli("experiment nosuchsuite").code == 2);
}

TEST_CASE("gallery bundles") {
    TempDir t;
    auto r = mml_cli("gallery counterexample1 --fn h1 --s 2 --sn 3 --n 4 --N 60 -o " + (t / "bundle"));
    REQUIRE(r.code == 0);
    auto bundle = read_json_file(t / "bundle/bundle.json");
    CHECK(bundle["eta"].get<double>() == doctest::Approx(1));
    auto c = mml_cli("cert --source " + (t / "bundle/transformed.json") + " --target " + (t / "bundle/y_lim.json") +
                     " --map " + (t / "bundle/map.json"));
    CHECK(c.code == 0);
    CHECK(mml_cli("gallery sphere --n 3 --N 20 -o " + (t / "s.json")).code == 0);
    CHECK(load_space(t / "s.json").size() == 20);
    CHECK(mml_cli("gallery four-point --alpha 3 --beta 1 --gamma 1").code == 2);
}

#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run kqcalc(const std::string& args)
{
    std::string cmd = std::string(KQCALC_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* f = popen(cmd.c_str(), "r");
    REQUIRE(f);
    std::array<char, 4096> buf;
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), f)) > 0)
        r.out.append(buf.data(), n);
    int st = pclose(f);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream o;
    o << in.rdbuf();
    return o.str();
}

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("compute weight 2 table")
    {
        Run r = kqcalc("compute --base Z --theory kq --weight 2 --range -8..24 --page abutment --format table");
        CHECK(r.code == 0);
        CHECK(r.out.find("w=2") != std::string::npos);
        CHECK(r.out.find("Z/1008") != std::string::npos); // s = 13: cyclic Z/2 . Z/504
    }

    TEST_CASE("chart svg")
    {
        Run r = kqcalc("chart --base Z --theory kq --weight 0 --page E1 --format svg");
        CHECK(r.code == 0);
        CHECK(r.out.rfind("<svg", 0) == 0);
        CHECK(kqcalc("chart --weight 0,1 --format svg").code == 2);
    }

    TEST_CASE("verify")
    {
        CHECK(kqcalc("verify --golden coeff-KW").code == 0);
        CHECK(kqcalc("verify --golden finite-fields-q3").code == 0);
        CHECK(kqcalc("verify --golden coeff-KQZ").code == 1);
        CHECK(kqcalc("verify --golden nope").code == 2);
    }

    TEST_CASE("refusal and partial output")
    {
        CHECK(kqcalc("compute --base cd2-synthetic --weight 0 --range 1..4").code == 1);
        Run p = kqcalc("compute --base cd2-synthetic --weight 0 --range 1..4 --allow-partial");
        CHECK(p.code == 0);
        CHECK(p.out.find("Ambiguous") != std::string::npos);
    }

    TEST_CASE("usage errors")
    {
        CHECK(kqcalc("compute --range 3..1 --weight 0").code == 2);
        CHECK(kqcalc("compute --theory nonsense --weight 0").code == 2);
        CHECK(kqcalc("compute --base F6 --weight 0").code == 2);
        CHECK(kqcalc("").code == 2);
        CHECK(kqcalc("uv --w 3").code == 2);
    }

    TEST_CASE("arith subcommands")
    {
        CHECK(kqcalc("bernoulli --n 12").out == "-691/2730\n");
        CHECK(kqcalc("uv --w 12").out == "u(12) = 691, v(12) = 65520\n");
    }

    TEST_CASE("profile validation")
    {
        auto dir = std::filesystem::temp_directory_path() / "kqcalc-test";
        std::filesystem::create_directories(dir);
        std::ofstream(dir / "bad.json") << R"({"name":"x","tables":{"H":[[3,1,"Z/2"]],"h2":[],"kmw":[]}})";
        CHECK(kqcalc("profile-validate --file " + (dir / "bad.json").string()).code == 1);
    }

    TEST_CASE("byte determinism and atomic output")
    {
        auto dir = std::filesystem::temp_directory_path() / "kqcalc-test";
        std::filesystem::create_directories(dir);
        for (const char* fmt : {"csv", "json", "table"}) {
            auto a = dir / (std::string("a.") + fmt), b = dir / (std::string("b.") + fmt);
            std::string args = std::string("compute --base Z --weight 0,1,2,3 --format ") + fmt + " -o ";
            REQUIRE(kqcalc(args + a.string()).code == 0);
            REQUIRE(kqcalc(args + b.string()).code == 0);
            CHECK(slurp(a) == slurp(b));
            CHECK_FALSE(slurp(a).empty());
        }
        for (const char* page : {"E1", "E2", "Einf"}) {
            auto a = dir / "p1.json", b = dir / "p2.json";
            std::string args = std::string("compute --base Z --weight 2 --format json --page ") + page + " -o ";
            REQUIRE(kqcalc(args + a.string()).code == 0);
            REQUIRE(kqcalc(args + b.string()).code == 0);
            CHECK(slurp(a) == slurp(b));
            if (std::string(page) != "E1")
                CHECK(slurp(a).find("\"collapse\"") != std::string::npos);
        }
        for (const auto& e : std::filesystem::directory_iterator(dir))
            CHECK(e.path().string().find(".tmp.") == std::string::npos);
    }
}

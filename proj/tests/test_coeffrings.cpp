#include "kq/arith.hpp"
#include "kq/coeffrings.hpp"
#include "kq/resources.hpp"

#include <doctest.h>

using namespace kq;

TEST_SUITE("coeffrings")
{
    TEST_CASE("integral and mod 2 cohomology of Z")
    {
        Profile z = profile_integers();
        CHECK(coeff(z, Coeff::Z, 1, 1).group == Group::cyclic(2));
        CHECK(coeff(z, Coeff::Z, 1, 5).group == Group::parse("Z + Z/2"));
        CHECK(coeff(z, Coeff::Z, 0, 0).group == Group::free(1));
        CHECK(coeff(z, Coeff::Z, 0, 3).group.is_zero());
        CHECK(coeff(z, Coeff::Z, 1, 2).group == Group::cyclic(24));
        CHECK(coeff(z, Coeff::Z, 2, 12).group == Group::cyclic(2 * 691));
        auto h13 = coeff(z, Coeff::Z2, 1, 3);
        CHECK(h13.group == Group::parse("(Z/2)^2"));
        REQUIRE(h13.basis.size() == 2);
        CHECK(h13.index_of(CohClass::tau_rho(2, 1)));
        CHECK(h13.index_of(CohClass::tau_eps(1)));
        CHECK(coeff(z, Coeff::Z2, 4, 3).group.is_zero());
    }

    TEST_CASE("conjecture flags")
    {
        Profile a = profile_integers();
        Profile t = profile_integers(ConjectureMode::TrackUnknown, CyclicityMode::TrackUncertain);
        CHECK(coeff(a, Coeff::Z, 2, 5).group.is_zero());
        CHECK(coeff(a, Coeff::Z, 2, 5).flags.count(kConditional));
        CHECK(coeff(t, Coeff::Z, 2, 5).flags.count(kUnknown));
        CHECK(coeff(t, Coeff::Z, 2, 4).flags.count(kCyclicityUncertain));
        CHECK_FALSE(coeff(a, Coeff::Z, 1, 4).flags.count(kConditional));
    }

    TEST_CASE("steenrod examples")
    {
        Profile z = profile_integers();
        auto a = steenrod(z, 2, CohClass::tau_rho(2, 1));
        REQUIRE(a);
        CHECK(*a == CohClass::tau_rho(1, 3));
        CHECK_FALSE(steenrod(z, 2, CohClass::tau_eps(1)));
        CHECK_FALSE(steenrod(z, 2, CohClass::tau_rho(1, 2)));
        auto b = steenrod(profile_reals(), 1, CohClass::tau_rho(1, 0));
        REQUIRE(b);
        CHECK(*b == CohClass::tau_rho(0, 1));
        CHECK_THROWS_AS(steenrod(z, 2, CohClass::gen("x", 0, 0, 0)), WrongCoefficients);
        CHECK_THROWS_AS(steenrod(profile_finite_field(3), 2, CohClass::tau_rho(2, 0)), WrongCoefficients);
    }

    TEST_CASE("Sq1 Sq1 vanishes and Sq2 pattern over the window")
    {
        Profile z = profile_integers();
        for (int s = -2; s <= 12; ++s)
            for (int w = -2; w <= 14; ++w) {
                auto h = coeff(z, Coeff::Z2, s, w);
                for (const auto& c : h.basis) {
                    auto once = steenrod(z, 1, c);
                    if (once)
                        CHECK_FALSE(steenrod(z, 1, *once));
                }
                bool expect = s >= 0 && s <= w && ((w - s) % 4 == 2 || (w - s) % 4 == 3);
                CAPTURE(s);
                CAPTURE(w);
                CHECK(!sq2_matrix(z, s, w).is_zero() == expect);
            }
    }

    TEST_CASE("h(Z) -> h(R) is onto with kernel Z/2 exactly at s = 1, w > 1")
    {
        Profile z = profile_integers(), r = profile_reals();
        for (int s = -2; s <= 12; ++s)
            for (int w = -2; w <= 14; ++w) {
                auto hz = coeff(z, Coeff::Z2, s, w);
                auto hr = coeff(r, Coeff::Z2, s, w);
                int kernel = 0;
                std::set<std::string> hit;
                for (const auto& c : hz.basis) {
                    auto img = to_reals(c);
                    if (!img)
                        ++kernel;
                    else {
                        REQUIRE(hr.index_of(*img));
                        hit.insert(img->str());
                    }
                }
                CAPTURE(s);
                CAPTURE(w);
                CHECK(hit.size() == hr.basis.size());
                CHECK(kernel == ((s == 1 && w > 1) ? 1 : 0));
            }
    }

    TEST_CASE("Bockstein then reduction is Sq1")
    {
        Profile z = profile_integers();
        for (int s = 0; s <= 10; ++s)
            for (int w = 0; w <= 12; ++w) {
                IntMatrix comp = pr_matrix(z, s + 1, w) * bockstein_matrix(z, s, w);
                IntMatrix sq1 = sq1_matrix(z, s, w);
                REQUIRE(comp.rows() == sq1.rows());
                REQUIRE(comp.cols() == sq1.cols());
                for (size_t i = 0; i < comp.rows(); ++i)
                    for (size_t j = 0; j < comp.cols(); ++j)
                        CHECK((comp(i, j) - sq1(i, j)) % 2 == 0);
            }
    }

    TEST_CASE("theta examples and nonvanishing pattern")
    {
        Profile z = profile_integers();
        Hom t35 = theta(z, 3, 5);
        CHECK(t35.src.group == Group::cyclic(2));
        CHECK(t35.tgt.group == Group::cyclic(2));
        CHECK(t35.kernel().is_zero());
        CHECK(t35.cokernel().is_zero());
        Hom t13 = theta(z, 1, 3);
        CHECK(t13.src.group == Group::parse("Z + Z/2"));
        CHECK(t13.tgt.group == Group::cyclic(2));
        CHECK(t13.cokernel().is_zero());
        CHECK(t13.kernel().rank() == 1);
        CHECK(theta(z, 3, 4).is_zero());
        for (int s = -1; s <= 12; ++s)
            for (int w = -1; w <= 14; ++w) {
                bool expect = 0 < s && s < w && (w - s) % 4 == 2;
                CAPTURE(s);
                CAPTURE(w);
                Hom t = theta(z, s, w);
                CHECK(!t.is_zero() == expect);
                if (expect && s > 2) {
                    CHECK(t.kernel().is_zero());
                    CHECK(t.cokernel().is_zero());
                }
                if (expect && s == 2)
                    CHECK(t.image() == Group::cyclic(2));
            }
    }

    TEST_CASE("finite fields")
    {
        Profile f3 = profile_finite_field(3);
        CHECK(coeff(f3, Coeff::Z, 1, 2).group == Group::cyclic(8));
        CHECK(coeff(profile_finite_field(5), Coeff::Z, 1, 1).group == Group::cyclic(4));
        CHECK(coeff(profile_finite_field(2), Coeff::Z2, 1, 1).group.is_zero());
        CHECK_THROWS_AS(profile_finite_field(6), NotPrimePower);
        for (int q : {2, 3, 4, 5, 7, 8, 9, 25})
            for (int w = 1; w <= 12; ++w) {
                Int want;
                mpz_ui_pow_ui(want.get_mpz_t(), q, w);
                want -= 1;
                CHECK(coeff(profile_finite_field(q), Coeff::Z, 1, w).group.order() == want);
            }
    }

    TEST_CASE("grading conversions")
    {
        CHECK(grade_convert(4, 2) == Bidegree{2, 2});
        CHECK(gw_index(2, 1) == Bidegree{1, -1});
        CHECK(grade_convert(0, 0) == Bidegree{0, 0});
    }

    TEST_CASE("cd2 profile loader")
    {
        auto text = resource("profiles/cd2_synthetic.json");
        REQUIRE(text);
        Profile p = profile_cd2_from_json(json::parse(*text));
        CHECK(p.kind == ProfileKind::CD2Field);
        CHECK(coeff(p, Coeff::Z, 1, 2).group == Group::cyclic(8));
        CHECK(coeff(p, Coeff::Z, 3, 2).group.is_zero());
        CHECK(kmw(p, 3).is_zero());
        CHECK_THROWS_AS(coeff(p, Coeff::Z, 1, 500), MissingTableEntry);

        json bad = json::parse(*text);
        bad["tables"]["H"].push_back({3, 1, "Z/2"});
        CHECK_THROWS(profile_cd2_from_json(bad));
        json bad2 = json::parse(*text);
        bad2["tables"]["H"].push_back({1, 1, "Z/"});
        CHECK_THROWS(profile_cd2_from_json(bad2));
    }
}

#include "kq/ktables.hpp"

#include <doctest.h>

using namespace kq;

namespace {

Group total(const PageEntry& e)
{
    Group g;
    for (const auto& l : e.layers)
        g = direct_sum(g, l.group);
    return g;
}

std::vector<Profile> all_profiles()
{
    return {profile_integers(), profile_by_name("F3"), profile_by_name("F5"), profile_by_name("F9"),
            profile_by_name("F2"), profile_by_name("F4"), resolve_profile("cd2-synthetic")};
}

} // namespace

TEST_SUITE("ssengine")
{
    TEST_CASE("d1 d1 = 0 and the subquotient law on every built page")
    {
        for (const auto& p : all_profiles())
            for (SpecTheory th : {SpecTheory::KQ, SpecTheory::KGL})
                for (int w = 0; w <= (th == SpecTheory::KQ ? 7 : 0); ++w) {
                    CAPTURE(p.name);
                    CAPTURE(w);
                    Page e1 = build_page1_auto(p, w, -8, 24, th);
                    CHECK(check_d_squared(e1).empty());
                    Page e2 = apply_first_differential(e1);
                    CHECK(e2.r == 2);
                    for (const auto& [c, e] : e2.cells) {
                        const PageEntry* f = e1.find(c.s, c.q);
                        REQUIRE(f);
                        Group g2 = total(e), g1 = total(*f);
                        CHECK(g2.rank() <= g1.rank());
                        if (g1.is_finite()) {
                            REQUIRE(g2.is_finite());
                            CHECK(g1.order() % g2.order() == 0);
                        }
                    }
                }
    }

    TEST_CASE("differentials lower s by one and raise q by r")
    {
        Page e2 = apply_first_differential(build_page1_auto(profile_integers(), 2, -2, 10));
        for (const auto& d : e2.differentials) {
            CHECK(d.target.s == d.source.s - 1);
            CHECK(d.target.q == d.source.q + d.r);
        }
    }

    TEST_CASE("weight 2 over Z")
    {
        Profile z = profile_integers();
        Page e2 = apply_first_differential(build_page1_auto(z, 2, -8, 24));
        for (int s = -5; s <= 24; s += 8)
            for (int q = e2.q_min; q <= e2.q_max; ++q)
                CHECK_FALSE(e2.nonzero(s, q));
        CollapseReport rep = certify_collapse(e2);
        CHECK(rep.certified);
        CHECK(rep.page == 2);
        bool cites = false;
        for (const auto& r : rep.reasons)
            if (r.kind == "PaperRule" && r.citation.find("inftypageweight2KQ") != std::string::npos)
                cites = true;
        CHECK(cites);
        ExtensionLadder s2 = assemble_column(e2, rep, 2);
        REQUIRE(s2.result.group);
        CHECK(*s2.result.group == Group::free(1));
    }

    TEST_CASE("weight 1 column 8m+1 splits")
    {
        Profile z = profile_integers();
        Page e2 = apply_first_differential(build_page1_auto(z, 1, 0, 20));
        CollapseReport rep = certify_collapse(e2);
        ExtensionLadder l = assemble_column(e2, rep, 9);
        REQUIRE(l.result.group);
        // Z/2 + H^{2,5}, the latter zero in the default mode
        CHECK(*l.result.group == Group::cyclic(2));
    }

    TEST_CASE("E2 kernel of the zero slice row at s = w")
    {
        Profile z = profile_integers();
        Page e2 = apply_first_differential(build_page1_auto(z, 0, -4, 12));
        // pi_{1-(1)} of the zero slice: (Z/2)^2 on E1, an order-2 part survives
        const PageEntry* e = e2.find(1, 0);
        REQUIRE(e);
        CHECK(total(*e).order() >= 2);
    }

    TEST_CASE("fields and cd2 profiles collapse at page one")
    {
        for (const auto& p : all_profiles()) {
            if (!p.is_field())
                continue;
            for (int w = 0; w <= 3; ++w) {
                CAPTURE(p.name);
                CAPTURE(w);
                Page e1 = build_page1_auto(p, w, -4, 20);
                Page e2 = apply_first_differential(e1);
                for (const auto& d : e2.differentials)
                    CHECK(d.kind == DifferentialRecord::Zero);
                CollapseReport rep = certify_collapse(e2);
                CHECK(rep.certified);
                CHECK(rep.page == 1);
                for (const auto& [c, e] : e2.cells)
                    CHECK(total(e) == total(*e1.find(c.s, c.q)));
            }
        }
    }

    TEST_CASE("a synthetic page with two offset cells is not certified")
    {
        Page p;
        p.profile = profile_integers();
        p.r = 2;
        p.w = 0;
        p.s_min = 2;
        p.s_max = 3;
        p.q_min = 0;
        p.q_max = 2;
        auto put = [&](int s, int q) {
            PageEntry e;
            e.s = s;
            e.q = q;
            e.row = PageEntry::Mod2;
            CellLayer l;
            l.group = Group::cyclic(2);
            l.label = "x";
            e.layers.push_back(l);
            p.cells[{s, q}] = e;
        };
        put(3, 0);
        put(2, 2);
        CollapseReport rep = certify_collapse(p);
        CHECK_FALSE(rep.certified);
        CHECK(rep.unresolved.size() == 1);
        CHECK_THROWS_AS(assemble_column(p, rep, 3), UncertifiedPage);
    }

    TEST_CASE("ladders without an override stay ambiguous")
    {
        Page p;
        p.profile = profile_by_name("F3");
        p.profile.name = "synthetic";
        p.r = 2;
        p.w = 0;
        p.s_min = p.s_max = 5;
        p.q_min = 0;
        p.q_max = 1;
        for (int q : {0, 1}) {
            PageEntry e;
            e.s = 5;
            e.q = q;
            e.row = PageEntry::Mod2;
            CellLayer l;
            l.group = Group::cyclic(2);
            l.label = "x" + std::to_string(q);
            e.layers.push_back(l);
            p.cells[{5, q}] = e;
        }
        CollapseReport rep = certify_collapse(p);
        REQUIRE(rep.certified);
        ExtensionLadder l = assemble_column(p, rep, 5, OverrideFn([](const Profile&, int, int) {
                                                return std::optional<ColumnOverride>();
                                            }));
        CHECK_FALSE(l.result.group);
        CHECK(l.result.candidates.size() == 2);
    }

    TEST_CASE("alpha periodicity of assembled columns over Z")
    {
        Profile z = profile_integers();
        for (int w = 0; w <= 3; ++w) {
            Page a2 = apply_first_differential(build_page1_auto(z, w, -8, 20));
            Page b2 = apply_first_differential(build_page1_auto(z, w + 4, -4, 24));
            CollapseReport ra = certify_collapse(a2), rb = certify_collapse(b2);
            REQUIRE(ra.certified);
            REQUIRE(rb.certified);
            for (int s = -8; s <= 20; ++s) {
                CAPTURE(w);
                CAPTURE(s);
                ExtensionLadder x = assemble_column(a2, ra, s), y = assemble_column(b2, rb, s + 4);
                REQUIRE(x.result.group);
                REQUIRE(y.result.group);
                CHECK(*x.result.group == *y.result.group);
            }
        }
    }

    TEST_CASE("page serialization is deterministic")
    {
        Profile z = profile_integers();
        Page a = apply_first_differential(build_page1_auto(z, 3, -8, 24));
        Page b = apply_first_differential(build_page1_auto(z, 3, -8, 24));
        CHECK(a.to_json().dump() == b.to_json().dump());
        CHECK(render_text_chart(a) == render_text_chart(b));
        CHECK(render_svg(a) == render_svg(b));
        CHECK(render_svg(a).rfind("<svg", 0) == 0);
    }

    TEST_CASE("Wood sequence examples")
    {
        auto kqz = [](int s, int w) -> std::optional<Group> {
            // weights 1 and 2 around s = 2
            if (w == 1 && s == 2)
                return Group::cyclic(2);
            if (w == 1 && s == 3)
                return Group();
            if (w == 2 && s == 2)
                return Group::free(1);
            return std::nullopt;
        };
        auto kgl = [](int n) -> std::optional<Group> { return n == 0 ? std::optional<Group>(Group::free(1)) : std::nullopt; };
        WoodReport r = wood_consistency(kqz, kgl, 2, 2, 2);
        REQUIRE(r.per_s.size() == 1);
        CHECK(r.per_s[0].verdict != "inconsistent");
    }
}

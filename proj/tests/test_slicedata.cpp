#include "kq/slicedata.hpp"

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

} // namespace

TEST_SUITE("slicedata")
{
    TEST_CASE("very effective slices of KQ")
    {
        auto d1 = veff_slice_KQ(1);
        REQUIRE(d1.summands.size() == 1);
        CHECK(d1.summands[0].tag == SpecTag::MZ2);
        CHECK(d1.summands[0].shift == Bidegree{1, 1});
        auto d3 = veff_slice_KQ(3);
        CHECK((d3.summands.empty() || d3.summands[0].tag == SpecTag::Zero));
        auto d4 = veff_slice_KQ(4);
        REQUIRE(d4.summands.size() == 1);
        CHECK(d4.summands[0].tag == SpecTag::VtildeS0KQ);
        CHECK(d4.summands[0].shift == Bidegree{4, 4});
        for (int q = -8; q <= 12; ++q) {
            auto d = veff_slice_KQ(q);
            SpecTag want[] = {SpecTag::VtildeS0KQ, SpecTag::MZ2, SpecTag::MZ, SpecTag::Zero};
            if (!d.summands.empty())
                CHECK(d.summands[0].tag == want[((q % 4) + 4) % 4]);
        }
    }

    TEST_CASE("other slice descriptors")
    {
        auto k = slice_descriptor(Theory::KGL_slices, 2);
        REQUIRE(k.summands.size() == 1);
        CHECK(k.summands[0].tag == SpecTag::MZ);
        CHECK(k.summands[0].shift == Bidegree{2, 2});
        auto kq3 = slice_descriptor(Theory::kq_slices, 3);
        CHECK(kq3.summands.size() >= 2);
        for (const auto& s : kq3.summands)
            CHECK(s.tag == SpecTag::MZ2);
        CHECK_THROWS_AS(slice_descriptor(Theory::kq_slices, -1), OutOfRange);
        auto kw = slice_descriptor(Theory::KW_slices, 0, -2, 2);
        CHECK_FALSE(kw.summands.empty());
    }

    TEST_CASE("homotopy of the zeroth very effective slice over Z")
    {
        Profile z = profile_integers();
        auto v12 = pi_vtilde0(z, 1, 2);
        REQUIRE(v12.resolution.group);
        CHECK(*v12.resolution.group == Group::cyclic(48));
        CHECK(*pi_vtilde0(z, 0, 3).resolution.group == Group::free(1));
        CHECK(pi_vtilde0(z, 5, 3).resolution.group->is_zero());
        CHECK(*pi_vtilde0(z, 1, 0).resolution.group == Group::parse("(Z/2)^2"));
        CHECK(pi_vtilde0(z, -1, 2).resolution.group->is_zero());
        for (int s = 2; s <= 16; ++s)
            for (int w = -4; w < s - 1; ++w) {
                auto v = pi_vtilde0(z, s, w);
                REQUIRE(v.resolution.group);
                CHECK(v.resolution.group->is_zero());
            }
    }

    TEST_CASE("order law of the exact sequences")
    {
        Profile z = profile_integers();
        for (int s = 0; s <= 12; ++s)
            for (int w = -4; w <= 12; ++w) {
                auto v = pi_vtilde0(z, s, w);
                if (!v.resolution.group || !v.resolution.group->is_finite())
                    continue;
                Int prod = 1;
                bool finite = true;
                for (const auto& l : v.layers) {
                    if (!l.group.is_finite())
                        finite = false;
                    else
                        prod *= l.group.order();
                }
                if (finite)
                    CHECK(v.resolution.group->order() == prod);
            }
    }

    TEST_CASE("E1 entries")
    {
        Profile z = profile_integers();
        CHECK(total(e1_entry_KQ(z, 1, 1, 0)) == Group::cyclic(2));
        CHECK(total(e1_entry_KQ(z, 4, 2, 0)).is_zero());
        for (int w = -3; w <= 3; ++w)
            CHECK(e1_entry_KQ(z, 2, 3, w).is_zero());
        PageEntry e = e1_entry_KQ(z, 1, 1, 0);
        json j = e.to_json();
        CHECK(j.contains("provenance"));
        CHECK(j["s"] == 1);
    }

    TEST_CASE("alpha periodicity of E1")
    {
        Profile z = profile_integers();
        for (int s = -4; s <= 12; ++s)
            for (int q = 0; q <= 12; ++q)
                for (int w = 0; w <= 3; ++w) {
                    CAPTURE(s);
                    CAPTURE(q);
                    CAPTURE(w);
                    CHECK(total(e1_entry_KQ(z, s, q, w)) == total(e1_entry_KQ(z, s + 4, q + 4, w + 4)));
                }
    }

    TEST_CASE("cd2 rows vanish beyond cohomological degree 2")
    {
        Profile p = profile_by_name("F3");
        for (int s = -4; s <= 16; ++s)
            for (int q = 0; q <= 20; ++q) {
                if (q % 4 != 1 && q % 4 != 2)
                    continue;
                PageEntry e = e1_entry_KQ(p, s, q, 0);
                if (e.ca > 2)
                    CHECK(e.is_zero());
            }
    }

    TEST_CASE("E1 entries of KGL")
    {
        Profile z = profile_integers();
        // row q holds H^{2q-s-w, q-w}
        CHECK(total(e1_entry_KGL(z, 3, 2, 0)) == Group::cyclic(24));
        CHECK(total(e1_entry_KGL(z, 0, 0, 0)) == Group::free(1));
    }
}

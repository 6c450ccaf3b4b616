#include "kq/exactalg.hpp"

#include <doctest.h>

#include <random>

using namespace kq;

namespace {

IntMatrix random_matrix(std::mt19937& rng, size_t r, size_t c)
{
    std::uniform_int_distribution<long> d(-50, 50);
    IntMatrix m(r, c);
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < c; ++j)
            m(i, j) = d(rng);
    return m;
}

IntMatrix random_unimodular(std::mt19937& rng, size_t n)
{
    IntMatrix u = IntMatrix::identity(n);
    if (n < 2)
        return u;
    std::uniform_int_distribution<size_t> pick(0, n - 1);
    std::uniform_int_distribution<long> k(-3, 3);
    for (int step = 0; step < 3 * int(n); ++step) {
        size_t i = pick(rng), j = pick(rng);
        if (i == j)
            u.swap_rows(i, (i + 1) % n);
        else
            u.add_row(i, j, k(rng));
    }
    return u;
}

Int det_abs(IntMatrix m)
{
    // fraction-free Bareiss on a square matrix
    size_t n = m.rows();
    Int prev = 1;
    int sign = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            size_t r = k + 1;
            while (r < n && m(r, k) == 0)
                ++r;
            if (r == n)
                return 0;
            m.swap_rows(k, r);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i)
            for (size_t j = k + 1; j < n; ++j)
                m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
        prev = m(k, k);
    }
    Int d = n ? m(n - 1, n - 1) : Int(1);
    return abs(d);
}

} // namespace

TEST_SUITE("exactalg")
{
    TEST_CASE("group canonical form and text round trip")
    {
        Group g = Group::from_cyclics({0, 4, 6, 1});
        CHECK(g.str() == "Z + Z/2 + Z/12");
        CHECK(Group::parse(g.str()) == g);
        CHECK(Group::parse("(Z/2)^2") == Group::from_cyclics({2, 2}));
        CHECK(Group::parse("Z^2 + Z/3") == Group::from_cyclics({0, 0, 3}));
        CHECK(Group::parse("0").is_zero());
        CHECK(Group::from_json(g.to_json()) == g);
        CHECK(g.to_json().dump() == R"({"free_rank":1,"invariant_factors":[2,12]})");
        CHECK_THROWS_AS(Group::parse("Z/"), ParseError);
    }

    TEST_CASE("direct sum is commutative and associative")
    {
        Group a = Group::parse("Z/4"), b = Group::parse("Z + Z/6"), c = Group::parse("Z/9");
        CHECK(direct_sum(a, b) == direct_sum(b, a));
        CHECK(direct_sum(direct_sum(a, b), c) == direct_sum(a, direct_sum(b, c)));
        CHECK(direct_sum(a, c) == Group::cyclic(36));
    }

    TEST_CASE("extension examples")
    {
        Resolution r = resolve_extension(Group::cyclic(3), Group::cyclic(16));
        REQUIRE(r.group);
        CHECK(*r.group == Group::cyclic(48));

        ExtensionOverride ov;
        ov.kind = ExtKind::Cyclic;
        ov.citation = "Lemma pi1V";
        Resolution c = resolve_extension(Group::cyclic(2), Group::cyclic(24), &ov);
        REQUIRE(c.group);
        CHECK(*c.group == Group::cyclic(48));

        Resolution amb = resolve_extension(Group::cyclic(2), Group::cyclic(2));
        CHECK_FALSE(amb.resolved());
        CHECK(amb.enumerable);
        REQUIRE(amb.candidates.size() == 2);
        CHECK(std::count(amb.candidates.begin(), amb.candidates.end(), Group::cyclic(4)) == 1);
        CHECK(std::count(amb.candidates.begin(), amb.candidates.end(), Group::parse("(Z/2)^2")) == 1);
    }

    TEST_CASE("extension order and rank law")
    {
        std::vector<Group> gs = {Group(), Group::cyclic(2), Group::cyclic(4), Group::parse("(Z/2)^2"), Group::cyclic(3),
                                 Group::free(1), Group::parse("Z + Z/2")};
        for (const auto& a : gs)
            for (const auto& b : gs) {
                Resolution r = resolve_extension(a, b);
                std::vector<Group> outs = r.group ? std::vector<Group>{*r.group} : r.candidates;
                for (const auto& e : outs) {
                    CHECK(e.rank() == a.rank() + b.rank());
                    if (a.is_finite() && b.is_finite())
                        CHECK(e.order() == a.order() * b.order());
                }
            }
    }

    TEST_CASE("ext of a free group vanishes")
    {
        CHECK(ext_group(Group::free(2), Group::cyclic(6)).is_zero());
        CHECK(ext_group(Group::cyclic(4), Group::cyclic(6)) == Group::cyclic(2));
        CHECK(ext_group(Group::cyclic(4), Group::free(1)) == Group::cyclic(4));
    }

    TEST_CASE("snf identities on 1000 random matrices")
    {
        std::mt19937 rng(20240611);
        std::uniform_int_distribution<size_t> dim(1, 6);
        for (int trial = 0; trial < 1000; ++trial) {
            size_t r = dim(rng), c = dim(rng);
            IntMatrix a = random_matrix(rng, r, c);
            SNF f = smith(a);
            IntMatrix d = f.U * a * f.V;
            for (size_t i = 0; i < r; ++i)
                for (size_t j = 0; j < c; ++j) {
                    Int want = (i == j && i < f.diag.size()) ? f.diag[i] : Int(0);
                    REQUIRE(d(i, j) == want);
                }
            for (size_t i = 0; i + 1 < f.diag.size(); ++i)
                REQUIRE(f.diag[i + 1] % f.diag[i] == 0);
            for (const auto& x : f.diag)
                REQUIRE(x > 0);
            REQUIRE(f.U * f.Uinv == IntMatrix::identity(r));
            REQUIRE(det_abs(f.U) == 1);
            REQUIRE(det_abs(f.V) == 1);
            // determinism and cokernel invariance under unimodular change of basis
            SNF g = smith(a);
            REQUIRE(g.U == f.U);
            REQUIRE(g.V == f.V);
            IntMatrix b = random_unimodular(rng, r) * a * random_unimodular(rng, c);
            REQUIRE(cokernel(b) == cokernel(a));
            if (r == c)
                REQUIRE(cokernel(a).is_finite() == (det_abs(a) != 0));
            if (r == c && det_abs(a) != 0)
                REQUIRE(cokernel(a).order() == det_abs(a));
        }
    }

    TEST_CASE("kernel basis and coordinates")
    {
        IntMatrix a = IntMatrix::from_rows({{2, 4, 6}, {1, 2, 3}});
        IntMatrix k = kernel_basis(a);
        CHECK(k.cols() == 2);
        CHECK((a * k).is_zero());
        IntMatrix b = IntMatrix::from_rows({{2, 0}, {0, 3}});
        auto x = coordinates(b, {Int(4), Int(9)});
        CHECK(x == std::vector<Int>{2, 3});
        CHECK_THROWS_AS(coordinates(b, {Int(1), Int(0)}), NotInSpan);
    }

    TEST_CASE("subquotient of a complex")
    {
        // Z --2--> Z/8 --1--> Z/2 : ker = 2Z/8 = Z/4, image of f = 2Z/8, quotient 0
        IntMatrix f = IntMatrix::from_rows({{2}});
        IntMatrix g = IntMatrix::from_rows({{1}});
        CHECK(subquotient({8}, f, g, {2}).is_zero());
        // Z/4 --0--> Z/4 --2--> Z/4 : kernel Z/2
        CHECK(subquotient({4}, IntMatrix(1, 1), IntMatrix::from_rows({{2}}), {4}) == Group::cyclic(2));
        CHECK(image({4}, IntMatrix::from_rows({{2}}), {4}) == Group::cyclic(2));
    }
}

#include "kq/arith.hpp"

#include <doctest.h>

using namespace kq;

namespace {

// independent oracle: sum_{j=0}^{m} C(m+1, j) B_j = 0
std::vector<Rational> bernoulli_by_recursion(int n)
{
    std::vector<Rational> b(n + 1);
    b[0] = 1;
    for (int m = 1; m <= n; ++m) {
        Rational s = 0;
        Int c = 1; // C(m+1, 0)
        for (int j = 0; j < m; ++j) {
            s += Rational(c) * b[j];
            c = c * (m + 1 - j) / (j + 1);
        }
        b[m] = -s / Rational(m + 1);
    }
    return b;
}

bool is_prime(int p)
{
    if (p < 2)
        return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0)
            return false;
    return true;
}

} // namespace

TEST_SUITE("arith")
{
    TEST_CASE("bernoulli examples")
    {
        CHECK(bernoulli(0) == 1);
        CHECK(bernoulli(1) == Rational(-1, 2));
        CHECK(bernoulli(3) == 0);
        CHECK(bernoulli(12) == Rational(-691, 2730));
    }

    TEST_CASE("bernoulli agrees with the binomial recursion")
    {
        auto b = bernoulli_by_recursion(60);
        for (int n = 0; n <= 60; ++n)
            CHECK(bernoulli(n) == b[n]);
    }

    TEST_CASE("von Staudt-Clausen for n <= 40")
    {
        for (int n = 2; n <= 40; n += 2) {
            Int prod = 1;
            for (int p = 2; p <= n + 1; ++p)
                if (is_prime(p) && n % (p - 1) == 0)
                    prod *= p;
            Rational b = bernoulli(n);
            CHECK(b.get_den() == prod);
            CHECK(staudt_clausen_denominator(n) == prod);
            // B_n + sum 1/p is an integer
            Rational t = b;
            for (int p = 2; p <= n + 1; ++p)
                if (is_prime(p) && n % (p - 1) == 0)
                    t += Rational(1, p);
            t.canonicalize();
            CHECK(t.get_den() == 1);
        }
    }

    TEST_CASE("u and v by weight")
    {
        CHECK(uv_of_weight(2).u == 1);
        CHECK(uv_of_weight(2).v == 24);
        CHECK(uv_of_weight(4).v == 240);
        CHECK(uv_of_weight(12).u == 691);
        CHECK(uv_of_weight(12).v == 65520);
        CHECK(w_number(2) == 24);
        CHECK(w_number(4) == 240);
        CHECK(w_number(6) == 504);
        CHECK_THROWS(uv_of_weight(3));
        CHECK_THROWS(uv_of_weight(0));
    }

    TEST_CASE("u and v invariants for w <= 24")
    {
        for (int w = 2; w <= 24; w += 2) {
            UV r = uv_of_weight(w);
            Int g;
            mpz_gcd(g.get_mpz_t(), r.u.get_mpz_t(), r.v.get_mpz_t());
            CHECK(g == 1);
            CHECK(r.v % 2 == 0);
            CHECK(r.u % 2 == 1);
            if (w <= 14)
                CHECK((r.u == 1 || r.u == 691));
            Rational q = abs(bernoulli(w)) / Rational(2 * w);
            CHECK(Rational(r.u, r.v) == q);
            CHECK(r.v % (w % 4 == 0 ? 8 : 24) == 0);
        }
    }

    TEST_CASE("numerators beyond weight 14 are products of irregular primes")
    {
        // |B_w| / 2w numerators, factored by hand
        CHECK(uv_of_weight(16).u == 3617);
        CHECK(uv_of_weight(18).u == 43867);
        CHECK(uv_of_weight(20).u == 283 * 617);
        CHECK(uv_of_weight(22).u == 131 * 593);
        CHECK(uv_of_weight(24).u == Int(103) * 2294797);
    }

    TEST_CASE("prime powers")
    {
        Int p;
        int e = 0;
        CHECK(is_prime_power(9, &p, &e));
        CHECK(p == 3);
        CHECK(e == 2);
        CHECK(is_prime_power(2));
        CHECK_FALSE(is_prime_power(6));
        CHECK_FALSE(is_prime_power(1));
    }
}

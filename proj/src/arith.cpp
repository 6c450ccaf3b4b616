#include "kq/arith.hpp"

#include <mutex>
#include <shared_mutex>
#include <stdexcept>

namespace kq {

namespace {

std::shared_mutex bern_mutex;
std::vector<Rational> bern_cache{Rational(1)};

Int binom(int n, int k)
{
    Int r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

} // namespace

Rational bernoulli(int n)
{
    if (n < 0)
        throw std::invalid_argument("bernoulli: negative index");
    {
        std::shared_lock lk(bern_mutex);
        if ((size_t)n < bern_cache.size())
            return bern_cache[n];
    }
    std::unique_lock lk(bern_mutex);
    // sum_{j=0}^{m} C(m+1, j) B_j = 0
    for (int m = (int)bern_cache.size(); m <= n; ++m) {
        Rational s = 0;
        if (m > 1 && m % 2 == 1) {
            bern_cache.push_back(Rational(0));
            continue;
        }
        for (int j = 0; j < m; ++j)
            if (bern_cache[j] != 0)
                s += Rational(binom(m + 1, j)) * bern_cache[j];
        Rational b = -s / Rational(m + 1);
        b.canonicalize();
        bern_cache.push_back(b);
    }
    return bern_cache[n];
}

UV uv_of_weight(int w)
{
    if (w < 1 || w % 2)
        throw std::invalid_argument("uv_of_weight: weight must be even and positive, got " + std::to_string(w));
    Rational f = abs(bernoulli(w)) / Rational(2 * w);
    f.canonicalize();
    return {f.get_num(), f.get_den()};
}

Int w_number(int k) { return uv_of_weight(k).v; }

Int staudt_clausen_denominator(int n)
{
    Int d = 1;
    for (int p = 2; p <= n + 1; ++p) {
        bool prime = true;
        for (int k = 2; k * k <= p; ++k)
            if (p % k == 0) {
                prime = false;
                break;
            }
        if (prime && n % (p - 1) == 0)
            d *= p;
    }
    return d;
}

bool is_prime_power(const Int& q, Int* p_out, int* e_out)
{
    if (q < 2)
        return false;
    Int n = q, p = 2;
    while (p * p <= n && !mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t()))
        ++p;
    if (!mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t()))
        p = n;
    int e = 0;
    while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
        n /= p;
        ++e;
    }
    if (n != 1)
        return false;
    if (p_out)
        *p_out = p;
    if (e_out)
        *e_out = e;
    return true;
}

} // namespace kq

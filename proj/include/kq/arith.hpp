#pragma once

#include "kq/exactalg.hpp"

#include <utility>

namespace kq {

using Rational = mpq_class;

// B_n with B_1 = -1/2
Rational bernoulli(int n);

struct UV {
    Int u, v;
};
// u(w)/v(w) = |B_w| / (2w) in lowest terms, w even and positive
UV uv_of_weight(int w);
// w_{k} in the notation of the introduction table; equals v(k)
Int w_number(int k);
// product of primes p with (p-1) | n, n even
Int staudt_clausen_denominator(int n);
bool is_prime_power(const Int& q, Int* p = nullptr, int* e = nullptr);

} // namespace kq

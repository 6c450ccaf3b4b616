#include "kq/exactalg.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace kq {

namespace {

Int gcd(const Int& a, const Int& b)
{
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

json int_json(const Int& n)
{
    if (n.fits_slong_p())
        return n.get_si();
    return n.get_str();
}

Int json_int(const json& j)
{
    if (j.is_string())
        return Int(j.get<std::string>());
    if (j.is_number_integer())
        return Int(j.get<long>());
    throw ParseError("expected integer in group json");
}

// exponent sequence of the p-part of each invariant factor, largest first
std::vector<int> p_partition(const std::vector<Int>& tors, unsigned long p)
{
    std::vector<int> lam;
    for (const auto& d : tors) {
        Int x = d;
        int e = 0;
        while (mpz_divisible_ui_p(x.get_mpz_t(), p)) {
            x /= p;
            ++e;
        }
        if (e > 0)
            lam.push_back(e);
    }
    std::sort(lam.rbegin(), lam.rend());
    return lam;
}

std::vector<unsigned long> prime_factors(unsigned long n)
{
    std::vector<unsigned long> ps;
    for (unsigned long p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            ps.push_back(p);
            while (n % p == 0)
                n /= p;
        }
    }
    if (n > 1)
        ps.push_back(n);
    return ps;
}

} // namespace

/* ---------------- Group ---------------- */

Group Group::from_cyclics(const std::vector<Int>& orders)
{
    Group g;
    std::vector<Int> t;
    for (const auto& o : orders) {
        if (o == 0)
            ++g.rank_;
        else if (abs(o) != 1)
            t.push_back(abs(o));
    }
    // pairwise gcd/lcm sweep leaves a divisibility chain
    for (size_t i = 0; i < t.size(); ++i)
        for (size_t j = i + 1; j < t.size(); ++j) {
            Int gg = gcd(t[i], t[j]);
            Int l = t[i] / gg * t[j];
            t[i] = gg;
            t[j] = l;
        }
    for (auto& x : t)
        if (x != 1)
            g.tors_.push_back(x);
    return g;
}

Group Group::free(int rank)
{
    Group g;
    g.rank_ = rank;
    return g;
}

Group Group::cyclic(const Int& n) { return from_cyclics({n}); }

Group Group::parse(std::string_view text)
{
    std::string s;
    for (size_t i = 0; i < text.size(); ++i) {
        unsigned char c = text[i];
        if (std::isspace(c))
            continue;
        // accept the double-struck Z
        if (c == 0xE2 && i + 2 < text.size() && (unsigned char)text[i + 1] == 0x84 && (unsigned char)text[i + 2] == 0xA4) {
            s += 'Z';
            i += 2;
            continue;
        }
        if (c == 0xE2 && i + 2 < text.size() && (unsigned char)text[i + 1] == 0x8A && (unsigned char)text[i + 2] == 0x95) {
            s += '+';
            i += 2;
            continue;
        }
        s += (char)c;
    }
    if (s.empty())
        throw ParseError("empty group literal");
    if (s == "0")
        return Group();

    std::vector<Int> orders;
    std::stringstream parts(s);
    std::string term;
    auto read_int = [&](const std::string& t, size_t& pos) {
        size_t start = pos;
        while (pos < t.size() && std::isdigit((unsigned char)t[pos]))
            ++pos;
        if (start == pos)
            throw ParseError("bad group literal: " + std::string(text));
        return Int(t.substr(start, pos - start));
    };
    while (std::getline(parts, term, '+')) {
        if (term.empty())
            throw ParseError("bad group literal: " + std::string(text));
        if (term == "0")
            continue;
        bool paren = term.front() == '(';
        std::string body = term;
        long mult = 1;
        if (paren) {
            size_t close = term.find(')');
            if (close == std::string::npos)
                throw ParseError("unbalanced parenthesis: " + std::string(text));
            body = term.substr(1, close - 1);
            std::string rest = term.substr(close + 1);
            if (!rest.empty()) {
                if (rest[0] != '^')
                    throw ParseError("bad group literal: " + std::string(text));
                size_t pos = 1;
                mult = read_int(rest, pos).get_si();
                if (pos != rest.size())
                    throw ParseError("bad group literal: " + std::string(text));
            }
        }
        if (body.empty() || body[0] != 'Z')
            throw ParseError("bad group literal: " + std::string(text));
        size_t pos = 1;
        if (pos == body.size()) {
            for (long k = 0; k < mult; ++k)
                orders.push_back(0);
        } else if (body[pos] == '^') {
            ++pos;
            long r = read_int(body, pos).get_si();
            if (pos != body.size())
                throw ParseError("bad group literal: " + std::string(text));
            for (long k = 0; k < r * mult; ++k)
                orders.push_back(0);
        } else if (body[pos] == '/') {
            ++pos;
            Int d = read_int(body, pos);
            if (d == 0)
                throw ParseError("Z/0 is not allowed: " + std::string(text));
            long r = 1;
            if (pos < body.size()) {
                if (body[pos] != '^' || paren)
                    throw ParseError("bad group literal: " + std::string(text));
                ++pos;
                r = read_int(body, pos).get_si();
            }
            if (pos != body.size())
                throw ParseError("bad group literal: " + std::string(text));
            for (long k = 0; k < r * mult; ++k)
                orders.push_back(d);
        } else {
            throw ParseError("bad group literal: " + std::string(text));
        }
    }
    return from_cyclics(orders);
}

Group Group::from_json(const json& j)
{
    if (j.is_string())
        return parse(j.get<std::string>());
    if (!j.is_object() || !j.contains("free_rank"))
        throw ParseError("group json needs free_rank");
    std::vector<Int> orders(j.at("free_rank").get<int>(), Int(0));
    if (j.contains("invariant_factors"))
        for (const auto& d : j.at("invariant_factors"))
            orders.push_back(json_int(d));
    return from_cyclics(orders);
}

Int Group::torsion_order() const
{
    Int n = 1;
    for (const auto& d : tors_)
        n *= d;
    return n;
}

Int Group::order() const
{
    if (rank_ > 0)
        throw std::logic_error("order of an infinite group");
    return torsion_order();
}

Group Group::p_part(unsigned long p) const
{
    std::vector<Int> o;
    for (const auto& d : tors_) {
        Int x = d, q = 1;
        while (mpz_divisible_ui_p(x.get_mpz_t(), p)) {
            x /= p;
            q *= p;
        }
        o.push_back(q);
    }
    return from_cyclics(o);
}

Group Group::odd_part() const
{
    std::vector<Int> o;
    for (const auto& d : tors_) {
        Int x = d;
        while (mpz_even_p(x.get_mpz_t()))
            x /= 2;
        o.push_back(x);
    }
    return from_cyclics(o);
}

size_t Group::two_rank() const
{
    size_t k = 0;
    for (const auto& d : tors_)
        if (mpz_even_p(d.get_mpz_t()))
            ++k;
    return k;
}

std::string Group::str() const
{
    if (is_zero())
        return "0";
    std::string out;
    if (rank_ == 1)
        out = "Z";
    else if (rank_ > 1)
        out = "Z^" + std::to_string(rank_);
    for (const auto& d : tors_) {
        if (!out.empty())
            out += " + ";
        out += "Z/" + d.get_str();
    }
    return out;
}

json Group::to_json() const
{
    json f = json::array();
    for (const auto& d : tors_)
        f.push_back(int_json(d));
    return {{"free_rank", rank_}, {"invariant_factors", f}};
}

bool Group::operator<(const Group& o) const
{
    if (rank_ != o.rank_)
        return rank_ < o.rank_;
    if (tors_.size() != o.tors_.size())
        return tors_.size() < o.tors_.size();
    for (size_t i = 0; i < tors_.size(); ++i)
        if (tors_[i] != o.tors_[i])
            return tors_[i] < o.tors_[i];
    return false;
}

Group direct_sum(const Group& a, const Group& b) { return direct_sum(std::vector<Group>{a, b}); }

Group direct_sum(const std::vector<Group>& gs)
{
    std::vector<Int> o;
    for (const auto& g : gs) {
        for (int i = 0; i < g.rank(); ++i)
            o.push_back(0);
        for (const auto& d : g.torsion())
            o.push_back(d);
    }
    return Group::from_cyclics(o);
}

Group power(const Group& g, int k) { return direct_sum(std::vector<Group>(k, g)); }

bool embeds(const Group& a, const Group& b)
{
    if (a.rank() > b.rank())
        return false;
    // torsion of a must sit in torsion of b plus whatever the spare free rank cannot hold (none)
    const auto& ta = a.torsion();
    const auto& tb = b.torsion();
    if (ta.size() > tb.size())
        return false;
    for (size_t i = 0; i < ta.size(); ++i) {
        const Int& x = ta[ta.size() - 1 - i];
        const Int& y = tb[tb.size() - 1 - i];
        if (!mpz_divisible_p(y.get_mpz_t(), x.get_mpz_t()))
            return false;
    }
    return true;
}

/* ---------------- IntMatrix ---------------- */

IntMatrix IntMatrix::identity(size_t n)
{
    IntMatrix m(n, n);
    for (size_t i = 0; i < n; ++i)
        m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<long>>& rows)
{
    IntMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j)
            m(i, j) = rows[i][j];
    return m;
}

std::vector<Int> IntMatrix::column(size_t j) const
{
    std::vector<Int> v(rows_);
    for (size_t i = 0; i < rows_; ++i)
        v[i] = (*this)(i, j);
    return v;
}

bool IntMatrix::is_zero() const
{
    return std::all_of(a_.begin(), a_.end(), [](const Int& x) { return x == 0; });
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const
{
    if (cols_ != o.rows_)
        throw std::invalid_argument("matrix size mismatch");
    IntMatrix r(rows_, o.cols_);
    for (size_t i = 0; i < rows_; ++i)
        for (size_t k = 0; k < cols_; ++k) {
            const Int& x = (*this)(i, k);
            if (x == 0)
                continue;
            for (size_t j = 0; j < o.cols_; ++j)
                r(i, j) += x * o(k, j);
        }
    return r;
}

IntMatrix IntMatrix::transpose() const
{
    IntMatrix t(cols_, rows_);
    for (size_t i = 0; i < rows_; ++i)
        for (size_t j = 0; j < cols_; ++j)
            t(j, i) = (*this)(i, j);
    return t;
}

std::string IntMatrix::str() const
{
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < rows_; ++i) {
        os << (i ? "; " : "");
        for (size_t j = 0; j < cols_; ++j)
            os << (j ? " " : "") << (*this)(i, j).get_str();
    }
    os << "]";
    return os.str();
}

void IntMatrix::swap_rows(size_t i, size_t j)
{
    if (i == j)
        return;
    for (size_t c = 0; c < cols_; ++c)
        std::swap((*this)(i, c), (*this)(j, c));
}

void IntMatrix::swap_cols(size_t i, size_t j)
{
    if (i == j)
        return;
    for (size_t r = 0; r < rows_; ++r)
        std::swap((*this)(r, i), (*this)(r, j));
}

void IntMatrix::add_row(size_t dst, size_t src, const Int& k)
{
    for (size_t c = 0; c < cols_; ++c)
        (*this)(dst, c) += k * (*this)(src, c);
}

void IntMatrix::add_col(size_t dst, size_t src, const Int& k)
{
    for (size_t r = 0; r < rows_; ++r)
        (*this)(r, dst) += k * (*this)(r, src);
}

void IntMatrix::negate_row(size_t i)
{
    for (size_t c = 0; c < cols_; ++c)
        (*this)(i, c) = -(*this)(i, c);
}

/* ---------------- Smith normal form ---------------- */

SNF smith(const IntMatrix& a0)
{
    IntMatrix A = a0;
    const size_t m = A.rows(), n = A.cols();
    SNF r{IntMatrix::identity(m), IntMatrix::identity(m), IntMatrix::identity(n), {}};

    // row op: row i += k row t, mirrored on U and (inversely) on Uinv
    auto row_add = [&](size_t i, size_t t, const Int& k) {
        A.add_row(i, t, k);
        r.U.add_row(i, t, k);
        r.Uinv.add_col(t, i, -k);
    };
    auto row_swap = [&](size_t i, size_t t) {
        A.swap_rows(i, t);
        r.U.swap_rows(i, t);
        r.Uinv.swap_cols(i, t);
    };
    auto col_add = [&](size_t j, size_t t, const Int& k) {
        A.add_col(j, t, k);
        r.V.add_col(j, t, k);
    };
    auto col_swap = [&](size_t j, size_t t) {
        A.swap_cols(j, t);
        r.V.swap_cols(j, t);
    };

    // nearest-integer quotient keeps remainders at most half the pivot
    auto nearest = [](const Int& a, const Int& b) {
        Int q, r;
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        if (2 * abs(r) > abs(b))
            q += 1;
        return q;
    };

    for (size_t t = 0; t < std::min(m, n); ++t) {
        bool empty = false;
        for (;;) {
            // smallest nonzero entry of the remaining block as pivot
            bool found = false;
            size_t pi = t, pj = t;
            Int best;
            for (size_t i = t; i < m; ++i)
                for (size_t j = t; j < n; ++j)
                    if (A(i, j) != 0 && (!found || abs(A(i, j)) < best)) {
                        found = true;
                        best = abs(A(i, j));
                        pi = i;
                        pj = j;
                    }
            if (!found) {
                empty = true;
                break;
            }
            row_swap(pi, t);
            col_swap(pj, t);
            bool clean = true;
            for (size_t i = t + 1; i < m; ++i)
                if (A(i, t) != 0) {
                    row_add(i, t, -nearest(A(i, t), A(t, t)));
                    clean = clean && A(i, t) == 0;
                }
            for (size_t j = t + 1; j < n; ++j)
                if (A(t, j) != 0) {
                    col_add(j, t, -nearest(A(t, j), A(t, t)));
                    clean = clean && A(t, j) == 0;
                }
            if (!clean)
                continue;
            // divisibility of the rest of the block
            bool fixed = false;
            for (size_t i = t + 1; i < m && !fixed; ++i)
                for (size_t j = t + 1; j < n; ++j)
                    if (!mpz_divisible_p(A(i, j).get_mpz_t(), A(t, t).get_mpz_t())) {
                        row_add(t, i, 1);
                        fixed = true;
                        break;
                    }
            if (!fixed)
                break;
        }
        if (empty)
            break;
        if (A(t, t) < 0) {
            A.negate_row(t);
            r.U.negate_row(t);
            for (size_t i = 0; i < m; ++i)
                r.Uinv(i, t) = -r.Uinv(i, t);
        }
        r.diag.push_back(A(t, t));
    }
    return r;
}

Group cokernel(const IntMatrix& a)
{
    SNF s = smith(a);
    std::vector<Int> o(s.diag.begin(), s.diag.end());
    for (size_t i = s.rank(); i < a.rows(); ++i)
        o.push_back(0);
    return Group::from_cyclics(o);
}

IntMatrix kernel_basis(const IntMatrix& a)
{
    SNF s = smith(a);
    size_t n = a.cols(), r = s.rank();
    IntMatrix k(n, n - r);
    for (size_t j = r; j < n; ++j)
        for (size_t i = 0; i < n; ++i)
            k(i, j - r) = s.V(i, j);
    return k;
}

IntMatrix span_basis(const IntMatrix& a)
{
    SNF s = smith(a);
    size_t m = a.rows(), r = s.rank();
    IntMatrix b(m, r);
    for (size_t j = 0; j < r; ++j)
        for (size_t i = 0; i < m; ++i)
            b(i, j) = s.Uinv(i, j) * s.diag[j];
    return b;
}

std::vector<Int> coordinates(const IntMatrix& b, const std::vector<Int>& v)
{
    if (v.size() != b.rows())
        throw std::invalid_argument("coordinates: size mismatch");
    SNF s = smith(b);
    if (s.rank() != b.cols())
        throw std::invalid_argument("coordinates: basis is not independent");
    std::vector<Int> uv(b.rows());
    for (size_t i = 0; i < b.rows(); ++i)
        for (size_t k = 0; k < b.rows(); ++k)
            uv[i] += s.U(i, k) * v[k];
    std::vector<Int> z(b.cols());
    for (size_t i = 0; i < b.rows(); ++i) {
        if (i < s.rank()) {
            if (!mpz_divisible_p(uv[i].get_mpz_t(), s.diag[i].get_mpz_t()))
                throw NotInSpan("vector not in lattice");
            z[i] = uv[i] / s.diag[i];
        } else if (uv[i] != 0) {
            throw NotInSpan("vector not in span");
        }
    }
    std::vector<Int> y(b.cols());
    for (size_t i = 0; i < b.cols(); ++i)
        for (size_t k = 0; k < b.cols(); ++k)
            y[i] += s.V(i, k) * z[k];
    return y;
}

namespace {

// lattice L in Z^n of x with g x in D_c Z^k, as a basis matrix
IntMatrix preimage_lattice(size_t n, const IntMatrix& g, const std::vector<Int>& orders_c)
{
    size_t k = orders_c.size();
    if (k == 0)
        return IntMatrix::identity(n);
    if (g.rows() != k || g.cols() != n)
        throw std::invalid_argument("subquotient: g has wrong shape");
    IntMatrix M(k, n + k);
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = 0; j < n; ++j)
            M(i, j) = g(i, j);
        M(i, n + i) = orders_c[i];
    }
    IntMatrix K = kernel_basis(M);
    IntMatrix top(n, K.cols());
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < K.cols(); ++j)
            top(i, j) = K(i, j);
    return span_basis(top);
}

} // namespace

Group subquotient(const std::vector<Int>& orders_b, const IntMatrix& f, const IntMatrix& g,
                  const std::vector<Int>& orders_c)
{
    size_t n = orders_b.size();
    if (n == 0)
        return Group();
    IntMatrix L = preimage_lattice(n, g, orders_c);
    size_t r = L.cols();
    if (r == 0)
        return Group();

    std::vector<std::vector<Int>> rels;
    for (size_t j = 0; j < f.cols(); ++j)
        rels.push_back(f.column(j));
    for (size_t i = 0; i < n; ++i)
        if (orders_b[i] != 0) {
            std::vector<Int> e(n);
            e[i] = orders_b[i];
            rels.push_back(e);
        }
    IntMatrix R(r, rels.size());
    for (size_t j = 0; j < rels.size(); ++j) {
        std::vector<Int> c;
        try {
            c = coordinates(L, rels[j]);
        } catch (const NotInSpan&) {
            throw NotInSpan("subquotient: incoming image is not inside the kernel (d o d != 0)");
        }
        for (size_t i = 0; i < r; ++i)
            R(i, j) = c[i];
    }
    return cokernel(R);
}

Group image(const std::vector<Int>& orders_b, const IntMatrix& g, const std::vector<Int>& orders_c)
{
    size_t n = orders_b.size();
    if (n == 0)
        return Group();
    IntMatrix L = preimage_lattice(n, g, orders_c);
    return cokernel(L);
}

/* ---------------- extensions ---------------- */

namespace {

// Littlewood-Richardson coefficient c^lam_{mu,nu} > 0 ?
bool lr_positive(const std::vector<int>& lam, const std::vector<int>& mu, const std::vector<int>& nu)
{
    size_t rows = lam.size();
    auto at = [](const std::vector<int>& p, size_t i) { return i < p.size() ? p[i] : 0; };
    for (size_t i = 0; i < rows; ++i)
        if (at(mu, i) > lam[i])
            return false;
    for (size_t i = lam.size(); i < mu.size(); ++i)
        if (mu[i] > 0)
            return false;
    int skew = 0, content = 0;
    for (size_t i = 0; i < rows; ++i)
        skew += lam[i] - at(mu, i);
    for (int x : nu)
        content += x;
    if (skew != content)
        return false;

    std::vector<std::vector<int>> T(rows);
    for (size_t i = 0; i < rows; ++i)
        T[i].assign(lam[i], 0);
    std::vector<int> cnt(nu.size() + 1, 0);
    // cells in reading order: rows top to bottom, right to left
    std::vector<std::pair<size_t, int>> cells;
    for (size_t i = 0; i < rows; ++i)
        for (int j = lam[i] - 1; j >= at(mu, i); --j)
            cells.push_back({i, j});

    std::function<bool(size_t)> fill = [&](size_t k) -> bool {
        if (k == cells.size())
            return true;
        auto [i, j] = cells[k];
        int hi = (int)nu.size();
        if (j + 1 < lam[i])
            hi = std::min(hi, T[i][j + 1]);
        int lo = 1;
        if (i > 0 && j >= at(mu, i - 1))
            lo = T[i - 1][j] + 1;
        for (int x = lo; x <= hi; ++x) {
            if (cnt[x] >= nu[x - 1])
                continue;
            if (x > 1 && cnt[x] + 1 > cnt[x - 1])
                continue;
            T[i][j] = x;
            ++cnt[x];
            if (fill(k + 1))
                return true;
            --cnt[x];
        }
        return false;
    };
    return fill(0);
}

void partitions_within(int total, int maxpart, size_t maxlen, std::vector<int>& cur,
                       std::vector<std::vector<int>>& out)
{
    if (total == 0) {
        out.push_back(cur);
        return;
    }
    if (cur.size() == maxlen)
        return;
    for (int x = std::min(total, maxpart); x >= 1; --x) {
        cur.push_back(x);
        partitions_within(total - x, x, maxlen, cur, out);
        cur.pop_back();
    }
}

} // namespace

std::optional<std::vector<Group>> extension_candidates(const Group& sub, const Group& quot, const Int& limit)
{
    if (!sub.is_finite() || !quot.is_finite())
        return std::nullopt;
    Int total = sub.order() * quot.order();
    if (total > limit)
        return std::nullopt;
    std::vector<Group> acc{Group()};
    for (unsigned long p : prime_factors(total.get_ui())) {
        auto mu = p_partition(sub.torsion(), p);
        auto nu = p_partition(quot.torsion(), p);
        int sm = 0, mx = 0;
        for (int x : mu) sm += x;
        for (int x : nu) sm += x;
        mx = (mu.empty() ? 0 : mu[0]) + (nu.empty() ? 0 : nu[0]);
        std::vector<std::vector<int>> lams;
        std::vector<int> cur;
        partitions_within(sm, mx, mu.size() + nu.size(), cur, lams);
        std::vector<Group> here;
        for (const auto& lam : lams)
            if (lr_positive(lam, mu, nu)) {
                std::vector<Int> o;
                for (int e : lam) {
                    Int q;
                    mpz_ui_pow_ui(q.get_mpz_t(), p, e);
                    o.push_back(q);
                }
                here.push_back(Group::from_cyclics(o));
            }
        std::vector<Group> next;
        for (const auto& a : acc)
            for (const auto& b : here)
                next.push_back(direct_sum(a, b));
        acc = std::move(next);
    }
    std::sort(acc.begin(), acc.end());
    return acc;
}

std::string Resolution::str() const
{
    if (group)
        return group->str();
    if (!enumerable)
        return "Ambiguous{not enumerated}";
    std::string out = "Ambiguous{";
    for (size_t i = 0; i < candidates.size(); ++i)
        out += (i ? ", " : "") + candidates[i].str();
    return out + "}";
}

json Resolution::to_json() const
{
    json j;
    if (group) {
        j["group"] = group->to_json();
        j["text"] = group->str();
    } else {
        j["ambiguous"] = true;
        json c = json::array();
        for (const auto& g : candidates)
            c.push_back(g.str());
        j["candidates"] = c;
        j["enumerable"] = enumerable;
    }
    j["rule"] = rule;
    if (!citation.empty())
        j["citation"] = citation;
    return j;
}

Group ext_group(const Group& b, const Group& a)
{
    // Ext(Z/d, A) = A/dA, Ext(Z, A) = 0
    std::vector<Int> o;
    for (const auto& d : b.torsion()) {
        for (int i = 0; i < a.rank(); ++i)
            o.push_back(d);
        for (const auto& e : a.torsion())
            o.push_back(gcd(d, e));
    }
    return Group::from_cyclics(o);
}

Resolution resolve_extension(const Group& sub, const Group& quot, const ExtensionOverride* ov)
{
    Resolution r;
    if (sub.is_zero() || quot.is_zero()) {
        r.group = sub.is_zero() ? quot : sub;
        r.rule = "R0";
        return r;
    }
    auto cands = extension_candidates(sub, quot);

    // Ext(quot, sub) = (+)_{d in tors quot} sub / d sub
    bool ext_zero = quot.torsion().empty() ||
                    (sub.is_finite() && gcd(quot.torsion_order(), sub.order()) == 1);
    if (ext_zero) {
        r.group = direct_sum(sub, quot);
        r.rule = quot.torsion().empty() ? "R2" : "R1";
        return r;
    }
    if (ov) {
        Group g;
        switch (ov->kind) {
        case ExtKind::Split:
            g = direct_sum(sub, quot);
            break;
        case ExtKind::Cyclic:
            if (!sub.is_cyclic() || !quot.is_cyclic() || !quot.is_finite())
                throw std::logic_error("cyclic override on non-cyclic layers " + sub.str() + " / " + quot.str());
            g = sub.is_finite() ? Group::cyclic(sub.order() * quot.order()) : Group::free(1);
            break;
        case ExtKind::Fixed:
            g = ov->fixed;
            break;
        }
        if (g.rank() != sub.rank() + quot.rank())
            throw std::logic_error("override violates the rank law: " + g.str());
        if (cands && std::find(cands->begin(), cands->end(), g) == cands->end())
            throw std::logic_error("override " + g.str() + " is not an extension of " + quot.str() + " by " + sub.str());
        r.group = g;
        r.rule = "override";
        r.citation = ov->citation;
        return r;
    }

    if (cands && cands->size() == 1) {
        r.group = cands->front();
        r.rule = "unique";
        return r;
    }
    r.rule = "ambiguous";
    if (cands) {
        r.enumerable = true;
        r.candidates = *cands;
    }
    return r;
}

} // namespace kq

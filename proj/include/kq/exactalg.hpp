#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace kq {

using Int = mpz_class;
using json = nlohmann::json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotInSpan : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Finitely generated abelian group Z^rank + Z/d1 + ... + Z/dk with d1 | d2 | ... | dk, all > 1.
class Group {
public:
    Group() = default;
    // orders: 0 means Z, 1 is dropped
    static Group from_cyclics(const std::vector<Int>& orders);
    static Group free(int rank);
    static Group cyclic(const Int& n);
    static Group parse(std::string_view text);
    static Group from_json(const json& j);

    int rank() const { return rank_; }
    const std::vector<Int>& torsion() const { return tors_; }
    bool is_zero() const { return rank_ == 0 && tors_.empty(); }
    bool is_finite() const { return rank_ == 0; }
    bool is_cyclic() const { return rank_ + tors_.size() <= 1; }
    Int torsion_order() const;
    Int order() const; // throws for infinite groups
    Group torsion_part() const { return from_cyclics(tors_); }
    Group p_part(unsigned long p) const;
    Group two_part() const { return p_part(2); }
    Group odd_part() const;
    // number of cyclic summands in a primary decomposition would be overkill here; minimal generators:
    size_t num_generators() const { return rank_ + tors_.size(); }
    // 2-rank of the torsion (number of even invariant factors)
    size_t two_rank() const;

    std::string str() const;
    json to_json() const;

    bool operator==(const Group& o) const { return rank_ == o.rank_ && tors_ == o.tors_; }
    bool operator!=(const Group& o) const { return !(*this == o); }
    bool operator<(const Group& o) const;

private:
    int rank_ = 0;
    std::vector<Int> tors_;
};

Group direct_sum(const Group& a, const Group& b);
Group direct_sum(const std::vector<Group>& gs);
Group power(const Group& g, int k);
// A is isomorphic to a subgroup of B (equivalently, for finite groups, a quotient of B)
bool embeds(const Group& a, const Group& b);

class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
    static IntMatrix identity(size_t n);
    static IntMatrix from_rows(const std::vector<std::vector<long>>& rows);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    Int& operator()(size_t i, size_t j) { return a_[i * cols_ + j]; }
    const Int& operator()(size_t i, size_t j) const { return a_[i * cols_ + j]; }
    std::vector<Int> column(size_t j) const;
    bool is_zero() const;

    IntMatrix operator*(const IntMatrix& o) const;
    bool operator==(const IntMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }
    IntMatrix transpose() const;
    std::string str() const;

    void swap_rows(size_t i, size_t j);
    void swap_cols(size_t i, size_t j);
    void add_row(size_t dst, size_t src, const Int& k); // row dst += k * row src
    void add_col(size_t dst, size_t src, const Int& k);
    void negate_row(size_t i);

private:
    size_t rows_ = 0, cols_ = 0;
    std::vector<Int> a_;
};

struct SNF {
    IntMatrix U, Uinv, V; // U * A * V = D
    std::vector<Int> diag; // nonzero diagonal entries, d1 | d2 | ...
    size_t rank() const { return diag.size(); }
};

SNF smith(const IntMatrix& a);
// Z^rows / image(a)
Group cokernel(const IntMatrix& a);
// columns spanning ker(a : Z^cols -> Z^rows), a basis
IntMatrix kernel_basis(const IntMatrix& a);
// basis (columns) of the lattice spanned by the columns of a
IntMatrix span_basis(const IntMatrix& a);
// integer coordinates of v in the basis given by the columns of b (full column rank); throws NotInSpan
std::vector<Int> coordinates(const IntMatrix& b, const std::vector<Int>& v);

// ker(g) / im(f) for  A --f--> B --g--> C  where B = (+) Z/orders_b, C = (+) Z/orders_c (0 = Z).
// f given by columns in Z^n (one per generator of A), g as a k x n matrix.
Group subquotient(const std::vector<Int>& orders_b, const IntMatrix& f, const IntMatrix& g,
                  const std::vector<Int>& orders_c);
// the image of g restricted to B, as a subgroup of C
Group image(const std::vector<Int>& orders_b, const IntMatrix& g, const std::vector<Int>& orders_c);

// Ext^1(b, a)
Group ext_group(const Group& b, const Group& a);

// Extensions 0 -> sub -> E -> quot -> 0
enum class ExtKind { Split, Cyclic, Fixed };

struct ExtensionOverride {
    ExtKind kind = ExtKind::Split;
    Group fixed;
    std::string citation;
};

struct Resolution {
    std::optional<Group> group;
    std::vector<Group> candidates; // populated when ambiguous and enumerable
    bool enumerable = false;
    std::string rule; // R0 trivial, R1 coprime, R2 free quotient, override, ambiguous
    std::string citation;
    bool resolved() const { return group.has_value(); }
    std::string str() const;
    json to_json() const;
};

// All E with 0 -> sub -> E -> quot -> 0, for finite sub and quot of order <= limit; empty if not enumerable.
std::optional<std::vector<Group>> extension_candidates(const Group& sub, const Group& quot,
                                                       const Int& limit = Int(1) << 20);

Resolution resolve_extension(const Group& sub, const Group& quot, const ExtensionOverride* ov = nullptr);

} // namespace kq

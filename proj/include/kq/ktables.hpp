#pragma once

#include "kq/ssengine.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace kq {

struct UnknownGoldenSet : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TableTheory { KQ, KGL, KW, KQ_rational };
std::string table_theory_name(TableTheory t);

struct TableCell {
    int s = 0, w = 0;
    enum Status { Ok, Ambiguous, Uncertified, Error } status = Ok;
    std::optional<Group> group;
    Resolution resolution;
    std::string provenance;
    std::set<std::string> flags;
    std::vector<std::string> layers; // ladder quotient labels, lowest filtration first
    std::vector<Group> layer_groups;
    std::string note;

    bool conditional() const { return !flags.empty(); }
    std::string group_text() const;
    json to_json() const;
};
std::string cell_status_name(TableCell::Status s);

struct ResultTable {
    std::string base;
    TableTheory theory = TableTheory::KQ;
    std::vector<TableCell> cells; // sorted by (w, s)

    const TableCell* find(int s, int w) const;
    bool complete() const; // every cell resolved
    std::string to_csv() const;
    json to_json() const;
    // aligned text, rows s, columns w
    std::string to_text() const;
};

// built-in names (Z, R, F<q>, cd2-synthetic) or a profile JSON path
Profile resolve_profile(const std::string& name, ConjectureMode cm = ConjectureMode::AssumeVanishing,
                        CyclicityMode cy = CyclicityMode::AssumeCyclic);

// full pipeline per weight; w is reduced mod 4 by alpha-periodicity
ResultTable kq_groups(const Profile& p, int s_min, int s_max, int w);
ResultTable kq_groups(const Profile& p, int s_min, int s_max, const std::vector<int>& weights);

struct KGLValue {
    Group group;
    std::set<std::string> flags;
    std::string rule;
};
// K_n(Z) from the case split of the collapsed slice spectral sequence
KGLValue kgl_value_Z(int n, const Profile& p = profile_integers());
Group kgl_groups_Z(int n);
// the same groups read off the KGL slice spectral sequence engine
ResultTable kgl_groups(const Profile& p, int s_min, int s_max, int w);

Group kw_groups_Z(int s, int w);
ResultTable kw_table_Z(int s_min, int s_max, const std::vector<int>& weights);
ResultTable kq_rational_table(const Profile& p, int s_min, int s_max, const std::vector<int>& weights);

// element of Z[alpha^{+-1}, eta^{+-1}, xi]/(2 xi, xi^2) as a sum of monomials
class KWElement {
public:
    struct Mono {
        int alpha = 0, eta = 0, xi = 0;
        bool operator<(const Mono& o) const;
    };
    static KWElement alpha(int k = 1);
    static KWElement eta(int k = 1);
    static KWElement xi();
    static KWElement integer(long n);

    KWElement operator+(const KWElement& o) const;
    KWElement operator*(const KWElement& o) const;
    KWElement scaled(long n) const;
    bool is_zero() const { return terms_.empty(); }
    // (s, w) of a homogeneous element
    std::optional<std::pair<int, int>> degree() const;
    std::string str() const;

private:
    void normalise();
    std::map<Mono, Int> terms_;
};

struct RationalSummand {
    int q = 0;
    std::string kind; // H or W
    int p = 0, w = 0;
    int rank = 0;
};
struct RationalReport {
    int t = 0, w = 0;
    int dimension = 0;
    std::vector<RationalSummand> breakdown;
    json to_json() const;
};
RationalReport kq_rational(const Profile& p, int t, int w);

struct MWImageReport {
    int n = 0;
    Group kernel, cokernel;
    bool isomorphism = false;
    std::string citation;
    json to_json() const;
};
MWImageReport mw_image_sequence(const Profile& p, int n);

struct GoldenEntry {
    std::string profile;
    int s = 0, w = 0;
    std::string expr;
    std::string eval; // expression actually evaluated when it differs from the verbatim one
    std::string mode;  // exact, order, shape, exclude
    std::string note;
    std::string citation;
};
struct GoldenSet {
    std::string name;
    std::vector<GoldenEntry> entries;
};
std::vector<std::string> golden_set_names();
GoldenSet golden_set(const std::string& name);

struct GoldenOptions {
    ConjectureMode conjecture = ConjectureMode::AssumeVanishing;
    CyclicityMode cyclicity = CyclicityMode::AssumeCyclic;
};
struct GoldenCellReport {
    GoldenEntry entry;
    std::string expected;
    std::string actual;
    std::string status; // equal, mismatch, conditional, excluded
    std::string detail;
};
struct GoldenReport {
    std::string name;
    std::vector<GoldenCellReport> cells;
    int count(const std::string& status) const;
    bool ok() const { return count("mismatch") == 0; }
    std::string to_text() const;
    json to_json() const;
};
GoldenReport golden_verify(const std::string& name, const GoldenOptions& opt = {});

// evaluation of golden expressions on a profile; exposed for tests
Group eval_golden_expr(const std::string& expr, const Profile& p, const std::map<char, long>& vars);

} // namespace kq

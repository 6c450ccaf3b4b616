#pragma once

#include "kq/slicedata.hpp"

#include <functional>
#include <map>
#include <optional>

namespace kq {

struct UncertifiedPage : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnspecifiedDifferential : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingBidegree : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SpecTheory { KQ, KGL };

struct Cell {
    int s = 0, q = 0;
    bool operator<(const Cell& o) const { return s != o.s ? s < o.s : q < o.q; }
    bool operator==(const Cell& o) const = default;
};

struct DifferentialRecord {
    enum Kind { Zero, Iso, SurjWithKernel, InjWithCokernel, MatrixOnBasis };
    int r = 1;
    Cell source, target;
    size_t source_layer = 0, target_layer = 0;
    Kind kind = Zero;
    Group kernel, cokernel;
    IntMatrix matrix; // rows: target layer basis, cols: source layer basis
    std::string rule;
    std::string citation;
    json to_json() const;
};
std::string differential_kind_name(DifferentialRecord::Kind k);

struct Page {
    Profile profile;
    SpecTheory theory = SpecTheory::KQ;
    int r = 1;
    int w = 0;
    int s_min = 0, s_max = 0; // columns of interest
    int q_min = 0, q_max = 0;
    int halo = 0;             // extra columns on both sides
    std::map<Cell, PageEntry> cells;
    std::vector<DifferentialRecord> differentials;

    const PageEntry* find(int s, int q) const;
    bool nonzero(int s, int q) const;
    json to_json() const;
};

// rows outside [q_lo, q_hi] vanish for column s
int row_upper_bound(const Profile& p, int s);
int row_lower_bound(const Profile& p, int s, int w);

Page build_page1(const Profile& p, int w, int s_min, int s_max, int q_min, int q_max, int halo = 2,
                 SpecTheory theory = SpecTheory::KQ);
// rows chosen from the vanishing bounds
Page build_page1_auto(const Profile& p, int w, int s_min, int s_max, SpecTheory theory = SpecTheory::KQ);
Page apply_first_differential(const Page& p1);

// every composable pair of recorded differentials composes to zero; returns violations
std::vector<std::string> check_d_squared(const Page& p1);

struct CollapseReason {
    Cell cell;
    std::string kind; // DegreeReason, ZeroColumn, PaperRule
    std::string citation;
};
struct CollapseReport {
    bool certified = false;
    int page = 2;
    std::vector<CollapseReason> reasons;
    std::vector<std::string> unresolved;
    json to_json() const;
};
CollapseReport certify_collapse(const Page& p);

// keyed by base, weight mod 4 and column mod 8 after reduction by alpha-periodicity
struct ColumnOverride {
    enum Kind { Split, Cyclic, Tower, Fixed } kind = Split;
    int tower_twos = 0;
    Group fixed;
    std::string rule;
    std::string citation;
};
using OverrideFn = std::function<std::optional<ColumnOverride>(const Profile&, int s, int w)>;
std::optional<ColumnOverride> default_column_override(const Profile& p, int s, int w);
std::optional<ColumnOverride> kgl_column_override(const Profile& p, int s, int w);

struct LadderLayer {
    int q = 0;
    CellLayer layer;
};
struct ExtensionLadder {
    int w = 0, s = 0;
    std::vector<LadderLayer> quotients; // lowest filtration first
    std::vector<std::string> overrides_applied;
    Resolution result;
    std::set<std::string> flags;
    json to_json() const;
};
// without an explicit override function the theory's default set is used
ExtensionLadder assemble_column(const Page& e2, const CollapseReport& rep, int s,
                                const std::optional<OverrideFn>& ov = std::nullopt);

// exactness constraints along the Wood sequence in weights w-1, w
struct WoodVerdict {
    int s = 0;
    std::string verdict; // consistent, inconsistent, indeterminate
    std::vector<std::string> notes;
};
struct WoodReport {
    int w = 0;
    std::vector<WoodVerdict> per_s;
    bool consistent() const;
    json to_json() const;
};
// lookups return nullopt for unresolved cells and throw MissingBidegree outside their tables
using KQLookup = std::function<std::optional<Group>(int s, int w)>;
using KGLLookup = std::function<std::optional<Group>(int n)>;
WoodReport wood_consistency(const KQLookup& kq, const KGLLookup& kgl, int w, int s_min, int s_max,
                            bool pin_forgetful = true);

// text grid and SVG, rows q ascending, columns s
std::string render_text_chart(const Page& p);
std::string render_svg(const Page& p);

} // namespace kq

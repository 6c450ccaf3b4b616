#include "kq/ssengine.hpp"

#include <algorithm>

namespace kq {

namespace {

int mod(int a, int n) { return ((a % n) + n) % n; }

std::string cell_str(const Cell& c) { return "(" + std::to_string(c.s) + "," + std::to_string(c.q) + ")"; }

const char* kPhiCite = "Lemma vd-KQ-on-pi, \"where $\\phi(\\tau^{s}x)=\\tau^{s-2}\\rho^2x$\"";
const char* kPhiZeroCite = "Lemma vd-KQ-on-pi, \"is zero for all $s<2$ and for all $s\\equiv 0,1 \\bmod 4$\"";
const char* kDSq2Cite = "Cor. vd-KQ, \"the unique nontrivial map $\\partial^2_\\infty \\operatorname{Sq}^2$\"";
const char* kThetaCite = "Lemma more-vd1-iso, \"is nonzero only if $w-s\\equiv 2 \\bmod 4$\"";
const char* kCD2Cite = "Prop. KQn0, \"collapses at its first page\"";
const char* kKGLCollapse = "Thm. slice-spec-seq-KGLZ, \"collapses at the second page\"";
const char* kXiCite = "Thm. symb-iso proof, \"the differential ${\\tilde{\\mathsf{d}}}_2\\colon H^{-1,2}(F)\\to "
                      "K^{{\\mathsf{MW}}}_4(F)$ vanishes for all fields\"";

bool starts_with(const std::string& s, const char* p) { return s.rfind(p, 0) == 0; }

struct Map1 {
    size_t tgt_layer = 0;
    IntMatrix m;
    std::string rule, citation;
};

IntMatrix phi_matrix(const CellLayer& src, const CellLayer& tgt)
{
    IntMatrix m(tgt.basis.size(), src.basis.size());
    for (size_t j = 0; j < src.basis.size(); ++j) {
        const auto& c = src.basis[j];
        if (c.kind != CohClass::TauRho)
            continue; // tau*eps classes map to zero
        auto img = CohClass::tau_rho(c.a - 2, c.b + 2);
        auto it = std::find(tgt.basis.begin(), tgt.basis.end(), img);
        if (it == tgt.basis.end())
            throw std::logic_error("phi image " + img.str() + " outside " + tgt.label);
        m(static_cast<size_t>(it - tgt.basis.begin()), j) = 1;
    }
    return m;
}

// d1 out of one layer; an empty result means every map is zero for a structural reason
std::vector<Map1> d1_from(const Page& p, const PageEntry& e, size_t li)
{
    std::vector<Map1> out;
    const CellLayer& src = e.layers[li];
    if (src.group.is_zero())
        return out;
    const PageEntry* t = p.find(e.s - 1, e.q + 1);
    if (!t || t->is_zero())
        return out;
    const Profile& pr = p.profile;
    for (size_t tj = 0; tj < t->layers.size(); ++tj) {
        const CellLayer& tgt = t->layers[tj];
        if (tgt.group.is_zero())
            continue;
        Map1 mp;
        mp.tgt_layer = tj;
        mp.m = IntMatrix(tgt.orders().size(), src.orders().size());
        if (p.theory == SpecTheory::KGL) {
            if (pr.kind == ProfileKind::CD2Field) {
                mp.rule = "zero";
                mp.citation = kCD2Cite;
            } else {
                mp.m = theta(pr, e.ca, e.cb).m;
                mp.rule = "theta";
                mp.citation = kThetaCite;
            }
            out.push_back(mp);
            continue;
        }
        if (e.row == PageEntry::Vtilde && t->row == PageEntry::Mod2) {
            int a = e.ca;
            bool phi_row = a >= 2 && (mod(a, 4) == 2 || mod(a, 4) == 3);
            if (pr.kind == ProfileKind::CD2Field) {
                mp.rule = "zero";
                mp.citation = kCD2Cite;
            } else if (phi_row && starts_with(src.label, "h^")) {
                if (pr.kind != ProfileKind::IntegersZ || pr.characteristic == 2)
                    throw UnspecifiedDifferential("phi on " + pr.name + " at " + cell_str({e.s, e.q}));
                mp.m = phi_matrix(src, tgt);
                mp.rule = "phi";
                mp.citation = kPhiCite;
            } else {
                mp.rule = "zero";
                mp.citation = kPhiZeroCite;
            }
        } else if (e.row == PageEntry::Mod2 && t->row == PageEntry::Integral) {
            if (pr.kind == ProfileKind::CD2Field) {
                mp.rule = "zero";
                mp.citation = kCD2Cite;
            } else {
                mp.m = bockstein_matrix(pr, e.ca + 2, e.cb + 1) * sq2_matrix(pr, e.ca, e.cb);
                mp.rule = "dSq2";
                mp.citation = kDSq2Cite;
            }
        } else {
            throw UnspecifiedDifferential("no d1 rule from " + e.source() + " at " + cell_str({e.s, e.q}) + " to " +
                                          t->source());
        }
        out.push_back(mp);
    }
    return out;
}

bool zero_mod(const IntMatrix& m, const std::vector<Int>& orders)
{
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j) {
            if (orders[i] == 0 ? m(i, j) != 0 : !mpz_divisible_p(m(i, j).get_mpz_t(), orders[i].get_mpz_t()))
                return false;
        }
    return true;
}

IntMatrix hcat(const std::vector<IntMatrix>& ms, size_t rows)
{
    size_t cols = 0;
    for (const auto& m : ms)
        cols += m.cols();
    IntMatrix out(rows, cols);
    size_t c0 = 0;
    for (const auto& m : ms) {
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < m.cols(); ++j)
                out(i, c0 + j) = m(i, j);
        c0 += m.cols();
    }
    return out;
}

IntMatrix vcat(const std::vector<IntMatrix>& ms, size_t cols)
{
    size_t rows = 0;
    for (const auto& m : ms)
        rows += m.rows();
    IntMatrix out(rows, cols);
    size_t r0 = 0;
    for (const auto& m : ms) {
        for (size_t i = 0; i < m.rows(); ++i)
            for (size_t j = 0; j < cols; ++j)
                out(r0 + i, j) = m(i, j);
        r0 += m.rows();
    }
    return out;
}

} // namespace

std::string differential_kind_name(DifferentialRecord::Kind k)
{
    switch (k) {
    case DifferentialRecord::Zero:
        return "Zero";
    case DifferentialRecord::Iso:
        return "Iso";
    case DifferentialRecord::SurjWithKernel:
        return "SurjWithKernel";
    case DifferentialRecord::InjWithCokernel:
        return "InjWithCokernel";
    case DifferentialRecord::MatrixOnBasis:
        return "MatrixOnBasis";
    }
    return "?";
}

json DifferentialRecord::to_json() const
{
    json j{{"r", r},
           {"source", {source.s, source.q}},
           {"target", {target.s, target.q}},
           {"source_layer", source_layer},
           {"target_layer", target_layer},
           {"map", differential_kind_name(kind)},
           {"rule", rule},
           {"citation", citation}};
    if (kind == SurjWithKernel || kind == MatrixOnBasis)
        j["kernel"] = kernel.str();
    if (kind == InjWithCokernel || kind == MatrixOnBasis)
        j["cokernel"] = cokernel.str();
    if (kind == MatrixOnBasis)
        j["matrix"] = matrix.str();
    return j;
}

const PageEntry* Page::find(int s, int q) const
{
    auto it = cells.find({s, q});
    return it == cells.end() ? nullptr : &it->second;
}

bool Page::nonzero(int s, int q) const
{
    const PageEntry* e = find(s, q);
    return e && !e->is_zero();
}

json Page::to_json() const
{
    json cs = json::array();
    for (const auto& [c, e] : cells)
        if (c.s >= s_min && c.s <= s_max && !e.is_zero())
            cs.push_back(e.to_json());
    json ds = json::array();
    for (const auto& d : differentials)
        if (d.source.s >= s_min && d.source.s <= s_max + 1)
            ds.push_back(d.to_json());
    return json{{"base", profile.name},
                {"theory", theory == SpecTheory::KQ ? "KQ" : "KGL"},
                {"r", r},
                {"w", w},
                {"window", {{"s", {s_min, s_max}}, {"q", {q_min, q_max}}}},
                {"cells", cs},
                {"differentials", ds}};
}

int row_upper_bound(const Profile& p, int s) { return s + p.dimension(); }

int row_lower_bound(const Profile&, int s, int w)
{
    int half = s + w - 1;
    half = half >= 0 ? (half + 1) / 2 : -((-half) / 2);
    return std::min(s - 1, half);
}

Page build_page1(const Profile& p, int w, int s_min, int s_max, int q_min, int q_max, int halo, SpecTheory theory)
{
    Page pg;
    pg.profile = p;
    pg.theory = theory;
    pg.r = 1;
    pg.w = w;
    pg.s_min = s_min;
    pg.s_max = s_max;
    pg.q_min = q_min;
    pg.q_max = q_max;
    pg.halo = halo;
    for (int s = s_min - halo; s <= s_max + halo; ++s)
        for (int q = q_min; q <= q_max; ++q)
            pg.cells[{s, q}] = theory == SpecTheory::KQ ? e1_entry_KQ(p, s, q, w) : e1_entry_KGL(p, s, q, w);

    for (const auto& [c, e] : pg.cells)
        for (size_t li = 0; li < e.layers.size(); ++li)
            for (auto& mp : d1_from(pg, e, li)) {
                DifferentialRecord d;
                d.r = 1;
                d.source = c;
                d.target = {c.s - 1, c.q + 1};
                d.source_layer = li;
                d.target_layer = mp.tgt_layer;
                d.rule = mp.rule;
                d.citation = mp.citation;
                d.matrix = mp.m;
                auto so = e.layers[li].orders();
                auto to = pg.find(c.s - 1, c.q + 1)->layers[mp.tgt_layer].orders();
                if (zero_mod(mp.m, to)) {
                    d.kind = DifferentialRecord::Zero;
                } else {
                    d.kernel = subquotient(so, IntMatrix(so.size(), 0), mp.m, to);
                    d.cokernel = subquotient(to, mp.m, IntMatrix(0, to.size()), {});
                    if (d.kernel.is_zero() && d.cokernel.is_zero())
                        d.kind = DifferentialRecord::Iso;
                    else if (d.cokernel.is_zero())
                        d.kind = DifferentialRecord::SurjWithKernel;
                    else if (d.kernel.is_zero())
                        d.kind = DifferentialRecord::InjWithCokernel;
                    else
                        d.kind = DifferentialRecord::MatrixOnBasis;
                }
                pg.differentials.push_back(std::move(d));
            }
    return pg;
}

Page build_page1_auto(const Profile& p, int w, int s_min, int s_max, SpecTheory theory)
{
    const int halo = 2;
    int qlo = row_lower_bound(p, s_min - halo, w) - 2;
    int qhi = row_upper_bound(p, s_max + halo);
    return build_page1(p, w, s_min, s_max, qlo, qhi, halo, theory);
}

Page apply_first_differential(const Page& p1)
{
    if (p1.r != 1)
        throw std::invalid_argument("apply_first_differential expects an E1 page");
    Page p2 = p1;
    p2.r = 2;
    p2.halo = std::max(0, p1.halo - 1);
    p2.cells.clear();
    for (const auto& [c, e] : p1.cells) {
        if (c.s < p1.s_min - p2.halo || c.s > p1.s_max + p2.halo)
            continue;
        PageEntry out = e;
        for (size_t li = 0; li < e.layers.size(); ++li) {
            const CellLayer& l = e.layers[li];
            auto orders = l.orders();
            std::vector<IntMatrix> inc, outg;
            std::vector<Int> torders;
            for (const auto& d : p1.differentials) {
                if (d.target == c && d.target_layer == li)
                    inc.push_back(d.matrix);
                if (d.source == c && d.source_layer == li) {
                    outg.push_back(d.matrix);
                    auto to = p1.find(d.target.s, d.target.q)->layers[d.target_layer].orders();
                    torders.insert(torders.end(), to.begin(), to.end());
                }
            }
            CellLayer nl = l;
            nl.has_basis = false;
            nl.basis.clear();
            if (!inc.empty() || !outg.empty())
                nl.group = subquotient(orders, hcat(inc, orders.size()), vcat(outg, orders.size()), torders);
            out.layers[li] = nl;
        }
        p2.cells[c] = out;
    }
    return p2;
}

std::vector<std::string> check_d_squared(const Page& p1)
{
    std::vector<std::string> bad;
    for (const auto& a : p1.differentials)
        for (const auto& b : p1.differentials) {
            if (!(b.source == a.target) || b.source_layer != a.target_layer)
                continue;
            auto to = p1.find(b.target.s, b.target.q)->layers[b.target_layer].orders();
            if (!zero_mod(b.matrix * a.matrix, to))
                bad.push_back("d1 d1 != 0 through " + cell_str(a.target));
        }
    return bad;
}

namespace {

std::optional<std::string> paper_rule(const Page& p, const Cell& src, int r)
{
    const Profile& pr = p.profile;
    if (p.theory == SpecTheory::KGL)
        return pr.kind == ProfileKind::CD2Field ? std::optional<std::string>(kCD2Cite)
                                                : std::optional<std::string>(kKGLCollapse);
    if (pr.kind == ProfileKind::IntegersZ) {
        int w0 = mod(p.w, 4);
        int s0 = mod(src.s - (p.w - w0), 8);
        if (w0 == 2 && (s0 == 1 || s0 == 5))
            return std::string("Thm. inftypageweight2KQ, \"collapses at its second page\"");
        if (w0 == 1 && s0 == 1)
            return std::string("Thm. coeff-KQZ proof, \"Thus collapsing at the second page occurs for weight $1$ as well.\"");
        if ((w0 == 0 && s0 == 1) || (w0 == 3 && s0 == 5))
            return std::string("Thm. coeff-KQZ proof, \"Passage to weights $0$ and $3$ proceeds in an analogous fashion.\"");
        return std::nullopt;
    }
    if (pr.is_field()) {
        const PageEntry* e = p.find(src.s, src.q);
        if (r == 2 && e && e->row == PageEntry::Integral)
            return std::string(kXiCite);
        if (pr.kind == ProfileKind::CD2Field)
            return std::string(kCD2Cite);
    }
    return std::nullopt;
}

} // namespace

json CollapseReport::to_json() const
{
    json rs = json::array();
    for (const auto& r : reasons) {
        json j{{"cell", {r.cell.s, r.cell.q}}, {"reason", r.kind}};
        if (!r.citation.empty())
            j["citation"] = r.citation;
        rs.push_back(j);
    }
    return json{{"certified", certified}, {"page", page}, {"reasons", rs}, {"unresolved", unresolved}};
}

CollapseReport certify_collapse(const Page& p)
{
    if (p.r != 2)
        throw std::invalid_argument("certify_collapse expects an E2 page");
    CollapseReport rep;
    bool any_d1 = false;
    for (const auto& d : p.differentials)
        if (d.kind != DifferentialRecord::Zero)
            any_d1 = true;
    rep.page = any_d1 ? 2 : 1;
    for (int s = p.s_min; s <= p.s_max; ++s) {
        bool column_zero = true;
        for (int q = p.q_min; q <= p.q_max; ++q) {
            if (!p.nonzero(s, q))
                continue;
            column_zero = false;
            std::vector<std::pair<Cell, int>> potentials; // source, r
            for (int r = 2; q + r <= p.q_max; ++r)
                if (p.nonzero(s - 1, q + r))
                    potentials.push_back({{s, q}, r});
            for (int r = 2; q - r >= p.q_min; ++r)
                if (p.nonzero(s + 1, q - r))
                    potentials.push_back({{s + 1, q - r}, r});
            if (potentials.empty()) {
                rep.reasons.push_back({{s, q}, "DegreeReason", ""});
                continue;
            }
            std::set<std::string> cites;
            for (const auto& [src, r] : potentials) {
                auto rule = paper_rule(p, src, r);
                if (rule)
                    cites.insert(*rule);
                else
                    rep.unresolved.push_back("d" + std::to_string(r) + " " + cell_str(src) + " -> " +
                                             cell_str({src.s - 1, src.q + r}));
            }
            for (const auto& c : cites)
                rep.reasons.push_back({{s, q}, "PaperRule", c});
        }
        if (column_zero)
            rep.reasons.push_back({{s, p.q_min}, "ZeroColumn", ""});
    }
    std::sort(rep.unresolved.begin(), rep.unresolved.end());
    rep.unresolved.erase(std::unique(rep.unresolved.begin(), rep.unresolved.end()), rep.unresolved.end());
    rep.certified = rep.unresolved.empty();
    return rep;
}

/* ---------------- extensions ---------------- */

std::optional<ColumnOverride> default_column_override(const Profile& p, int s, int w)
{
    int w0 = mod(w, 4);
    int s0 = s - (w - w0);
    int k8 = mod(s0, 8);
    auto mk = [](ColumnOverride::Kind k, int twos, const std::string& rule, const std::string& cite) {
        ColumnOverride o;
        o.kind = k;
        o.tower_twos = twos;
        o.rule = rule;
        o.citation = cite;
        return std::optional<ColumnOverride>(o);
    };
    const std::string analogous =
        "Thm. coeff-KQZ proof, \"Passage to weights $0$ and $3$ proceeds in an analogous fashion.\"";
    if (p.kind == ProfileKind::IntegersZ) {
        switch (w0) {
        case 0:
            if (k8 == 1 || k8 == 2)
                return mk(ColumnOverride::Split, 0, "split", analogous);
            if (k8 == 0 && s0 >= 8)
                return mk(ColumnOverride::Tower, 1, "tower", analogous);
            if (k8 == 4)
                return mk(ColumnOverride::Tower, 0, "tower", analogous);
            break;
        case 1:
            if (k8 == 0)
                return mk(ColumnOverride::Tower, 1, "tower",
                          "Thm. coeff-KQZ proof, \"providing a splitting $\\pi_{8m+(1)}\\mathsf{KQ} \\cong "
                          "\\mathbb{Z} \\oplus \\mathbb{Z}/2$\"");
            if (k8 == 4)
                return mk(ColumnOverride::Tower, 0, "tower",
                          "Thm. coeff-KQZ proof, \"Hence $\\pi_{8m+4+(1)}\\mathsf{KQ} \\cong \\mathbb{Z}$ for all "
                          "$m \\geq 0$\"");
            if (s0 == 1)
                return mk(ColumnOverride::Split, 0, "wood",
                          "Lemma low-degree-homotopy-sheaves-KQ (2), \"coincides with the embedding of the even "
                          "integers\"");
            if (k8 == 1)
                return mk(ColumnOverride::Split, 0, "split",
                          "Thm. coeff-KQZ proof, \"The two-term extension for $\\pi_{8m+1+(1)}\\mathsf{KQ}$ must "
                          "split\"");
            break;
        case 2:
            if (mod(s0, 4) == 0 && s0 >= 4)
                return mk(ColumnOverride::Tower, 0, "tower",
                          "Thm. inftypageweight2KQ, \"$\\mathbb{Z}\\oplus \\ker (\\operatorname{pr}\\colon "
                          "H^{2,\\frac{s}{2}}(\\mathbb{Z})\\to \\mathbb{Z}/2)$\"");
            if (k8 == 5 && s0 >= 13)
                return mk(ColumnOverride::Cyclic, 0, "cyclic",
                          "Thm. coeff-KQZ, \"the extension for $\\pi_{8m+5+(2)}\\mathsf{KQ}$ is nontrivial\"");
            break;
        case 3:
            if (k8 == 0)
                return mk(ColumnOverride::Tower, 0, "tower",
                          "Thm. coeff-KQZ proof, \"the extension for $\\pi_{8m+(3)}\\mathsf{KQ}$ is determined from "
                          "the portion\"");
            if (k8 == 4 && s0 >= 12)
                return mk(ColumnOverride::Tower, 1, "tower",
                          "Thm. coeff-KQZ proof, \"the extension for $\\pi_{8m+4+(3)}\\mathsf{KQ}$ is determined "
                          "from the portion\"");
            break;
        }
        return std::nullopt;
    }
    if (p.kind == ProfileKind::FiniteField && p.characteristic != 2) {
        if ((w0 == 0 && k8 == 1) || (w0 == 1 && k8 == 0) || (w0 == 2 && k8 == 7) || (w0 == 3 && k8 == 6))
            return mk(ColumnOverride::Split, 0, "split",
                      "Example kq-finite-fields, \"The single potentially nontrivial extension can be shown to "
                      "split with the aid of topology.\"");
    }
    return std::nullopt;
}

std::optional<ColumnOverride> kgl_column_override(const Profile& p, int s, int w)
{
    if (p.kind == ProfileKind::IntegersZ && s - w > 0 && mod(s - w, 8) == 3) {
        ColumnOverride o;
        o.kind = ColumnOverride::Cyclic;
        o.rule = "cyclic";
        o.citation = "Thm. slice-spec-seq-KGLZ, \"H^{3,\\frac{s-w+3}{2}}(\\mathbb{Z})\\bullet H^{1,\\frac{s-w+1}{2}}"
                     "(\\mathbb{Z})\"; Lemma pi1V proof, \"K_3(\\mathbb{Z})\\cong \\mathbb{Z}/48\"";
        return o;
    }
    return std::nullopt;
}

json ExtensionLadder::to_json() const
{
    json qs = json::array();
    for (const auto& l : quotients)
        qs.push_back({{"q", l.q}, {"label", l.layer.label}, {"group", l.layer.group.str()}});
    json j{{"w", w}, {"s", s}, {"quotients", qs}, {"result", result.to_json()}};
    if (!overrides_applied.empty())
        j["overrides_applied"] = overrides_applied;
    if (!flags.empty())
        j["flags"] = std::vector<std::string>(flags.begin(), flags.end());
    return j;
}

namespace {

Group tower_result(const std::vector<LadderLayer>& ls, int twos)
{
    int rank = 0;
    std::vector<Group> odd;
    for (const auto& l : ls) {
        rank += l.layer.group.rank();
        odd.push_back(l.layer.group.odd_part());
    }
    std::vector<Int> o(rank, Int(0));
    for (int i = 0; i < twos; ++i)
        o.push_back(2);
    Group g = Group::from_cyclics(o);
    return direct_sum(g, direct_sum(odd));
}

} // namespace

ExtensionLadder assemble_column(const Page& e2, const CollapseReport& rep, int s, const std::optional<OverrideFn>& given)
{
    OverrideFn ov = given ? *given
                          : (e2.theory == SpecTheory::KGL ? OverrideFn(kgl_column_override)
                                                          : OverrideFn(default_column_override));
    if (e2.r != 2)
        throw std::invalid_argument("assemble_column expects an E2 page");
    std::string tag = "(" + std::to_string(s) + ",";
    std::string tag2 = "(" + std::to_string(s + 1) + ",";
    for (const auto& u : rep.unresolved) {
        auto arrow = u.find("->");
        std::string from = u.substr(u.find(' ') + 1), to = u.substr(arrow + 3);
        if (starts_with(from, tag.c_str()) || starts_with(from, tag2.c_str()))
            throw UncertifiedPage("column " + std::to_string(s) + " in weight " + std::to_string(e2.w) +
                                  " has an uncertified differential " + u);
    }
    ExtensionLadder lad;
    lad.w = e2.w;
    lad.s = s;
    for (int q = e2.q_min; q <= e2.q_max; ++q) {
        const PageEntry* e = e2.find(s, q);
        if (!e)
            continue;
        lad.flags.insert(e->flags.begin(), e->flags.end());
        for (const auto& l : e->layers)
            if (!l.group.is_zero())
                lad.quotients.push_back({q, l});
    }
    const auto& ls = lad.quotients;
    if (ls.size() <= 1) {
        lad.result.group = ls.empty() ? Group() : ls[0].layer.group;
        lad.result.rule = "R0";
        return lad;
    }
    std::optional<ColumnOverride> co = ov ? ov(e2.profile, s, e2.w) : std::nullopt;
    if (co) {
        Group g;
        switch (co->kind) {
        case ColumnOverride::Split: {
            std::vector<Group> gs;
            for (const auto& l : ls)
                gs.push_back(l.layer.group);
            g = direct_sum(gs);
            break;
        }
        case ColumnOverride::Cyclic: {
            Int n = 1;
            for (const auto& l : ls) {
                if (!l.layer.group.is_finite() || !l.layer.group.is_cyclic())
                    throw std::logic_error("cyclic column override on a non-cyclic layer");
                n *= l.layer.group.order();
            }
            g = Group::cyclic(n);
            break;
        }
        case ColumnOverride::Tower:
            g = tower_result(ls, co->tower_twos);
            break;
        case ColumnOverride::Fixed:
            g = co->fixed;
            break;
        }
        int rank = 0;
        bool finite = true;
        Int order = 1;
        for (const auto& l : ls) {
            rank += l.layer.group.rank();
            finite = finite && l.layer.group.is_finite();
            if (l.layer.group.is_finite())
                order *= l.layer.group.order();
        }
        if (g.rank() != rank || (finite && g.order() != order))
            throw std::logic_error("column override " + co->rule + " violates the order/rank law at s=" +
                                   std::to_string(s));
        lad.result.group = g;
        lad.result.rule = "override:" + co->rule;
        lad.result.citation = co->citation;
        lad.overrides_applied.push_back(co->rule + ": " + co->citation);
        return lad;
    }

    // fold bottom-up
    std::vector<Group> acc{ls.back().layer.group};
    bool enumerable = true, ambiguous = false;
    std::vector<std::string> rules;
    for (size_t k = ls.size() - 1; k-- > 0;) {
        std::vector<Group> next;
        for (const auto& a : acc) {
            auto r = resolve_extension(a, ls[k].layer.group);
            rules.push_back(r.rule);
            if (r.group)
                next.push_back(*r.group);
            else {
                ambiguous = true;
                if (!r.enumerable)
                    enumerable = false;
                next.insert(next.end(), r.candidates.begin(), r.candidates.end());
            }
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        acc = next;
    }
    std::sort(rules.begin(), rules.end());
    rules.erase(std::unique(rules.begin(), rules.end()), rules.end());
    std::string rule;
    for (const auto& r : rules)
        rule += (rule.empty() ? "" : "+") + r;
    if (!ambiguous && acc.size() == 1) {
        lad.result.group = acc[0];
        lad.result.rule = rule;
    } else {
        lad.result.rule = "ambiguous";
        lad.result.enumerable = enumerable;
        if (enumerable)
            lad.result.candidates = acc;
    }
    return lad;
}

/* ---------------- Wood sequence ---------------- */

bool WoodReport::consistent() const
{
    return std::none_of(per_s.begin(), per_s.end(), [](const WoodVerdict& v) { return v.verdict == "inconsistent"; });
}

json WoodReport::to_json() const
{
    json a = json::array();
    for (const auto& v : per_s)
        a.push_back({{"s", v.s}, {"verdict", v.verdict}, {"notes", v.notes}});
    return json{{"w", w}, {"consistent", consistent()}, {"per_s", a}};
}

namespace {

struct SeqTerm {
    std::optional<Group> g;
    std::string name;
    int s = 0; // owning column for the verdict
};

// exactness of X -> Y -> Z at Y; returns a failure message
std::optional<std::string> check_triple(const Group& x, const Group& y, const Group& z)
{
    if (y.rank() > x.rank() + z.rank())
        return std::string("rank");
    if (x.is_finite()) {
        Int bound = x.order() * z.torsion_order();
        if (!mpz_divisible_p(bound.get_mpz_t(), y.torsion_order().get_mpz_t()))
            return std::string("torsion order");
    }
    if (x.is_finite() && z.is_finite() && !y.is_finite())
        return std::string("finiteness");
    if (x.is_zero() && !embeds(y, z) && z.is_finite())
        return std::string("injectivity");
    if (x.is_zero() && y.rank() > z.rank())
        return std::string("injectivity");
    if (z.is_zero()) {
        if (x.is_finite() ? !embeds(y, x) : (y.num_generators() > x.num_generators() || y.rank() > x.rank()))
            return std::string("surjectivity");
    }
    return std::nullopt;
}

} // namespace

WoodReport wood_consistency(const KQLookup& kq, const KGLLookup& kgl, int w, int s_min, int s_max,
                            bool pin_forgetful)
{
    WoodReport rep;
    rep.w = w;
    // ... A_s -> B_s -> C_s -> A_{s-1} ...   A = KQ(., w-1), B = KQ(., w), C = KGL
    std::vector<SeqTerm> seq;
    int lo = s_min - 2, hi = s_max + 2;
    for (int s = hi; s >= lo; --s) {
        auto name = [&](const char* x, int ww) {
            return std::string(x) + "(" + std::to_string(s) + "," + std::to_string(ww) + ")";
        };
        bool pin = pin_forgetful && w == 2 && s == 2;
        seq.push_back({kq(s, w - 1), name("KQ", w - 1), s});
        if (pin) {
            // forgetful Z -> K_0 = Z is multiplication by 2: kernel 0, cokernel Z/2
            seq.push_back({Group(), "0 (pinned)", s});
            seq.push_back({Group::cyclic(2), "coker(x2)", s});
        } else {
            seq.push_back({kq(s, w), name("KQ", w), s});
            seq.push_back({kgl(s - w), "K_" + std::to_string(s - w), s});
        }
    }
    std::map<int, WoodVerdict> out;
    for (int s = s_min; s <= s_max; ++s)
        out[s] = {s, "consistent", {}};
    auto fail = [&](int s, const std::string& msg) {
        if (!out.count(s))
            return;
        out[s].verdict = "inconsistent";
        out[s].notes.push_back(msg);
    };
    auto indet = [&](int s, const std::string& msg) {
        if (!out.count(s) || out[s].verdict == "inconsistent")
            return;
        out[s].verdict = "indeterminate";
        out[s].notes.push_back(msg);
    };
    for (size_t i = 1; i + 1 < seq.size(); ++i) {
        const auto &x = seq[i - 1], &y = seq[i], &z = seq[i + 1];
        if (!x.g || !y.g || !z.g) {
            indet(y.s, "unresolved group near " + y.name);
            continue;
        }
        if (auto f = check_triple(*x.g, *y.g, *z.g))
            fail(y.s, *f + " at " + y.name + ": " + x.g->str() + " -> " + y.g->str() + " -> " + z.g->str());
    }
    // stretches bounded by zeros
    size_t start = std::string::npos;
    for (size_t i = 0; i < seq.size(); ++i) {
        if (!seq[i].g) {
            start = std::string::npos;
            continue;
        }
        if (!seq[i].g->is_zero())
            continue;
        if (start != std::string::npos && i > start + 1) {
            int alt_rank = 0;
            bool finite = true;
            Int num = 1, den = 1;
            for (size_t k = start + 1; k < i; ++k) {
                int sign = ((k - start) % 2) ? 1 : -1;
                alt_rank += sign * seq[k].g->rank();
                if (!seq[k].g->is_finite())
                    finite = false;
                else
                    (sign > 0 ? num : den) *= seq[k].g->order();
            }
            std::string span = seq[start + 1].name + " .. " + seq[i - 1].name;
            if (alt_rank != 0)
                for (size_t k = start + 1; k < i; ++k)
                    fail(seq[k].s, "alternating rank sum " + std::to_string(alt_rank) + " on " + span);
            if (finite && num != den)
                for (size_t k = start + 1; k < i; ++k)
                    fail(seq[k].s, "alternating order product on " + span);
        }
        start = i;
    }
    for (auto& [s, v] : out)
        rep.per_s.push_back(v);
    return rep;
}

} // namespace kq

#include "kq/ktables.hpp"

#include "kq/arith.hpp"
#include "kq/resources.hpp"

#include <algorithm>
#include <cctype>
#include <future>
#include <iomanip>
#include <sstream>
#include <tuple>

namespace kq {

namespace {

int mod(int a, int n) { return ((a % n) + n) % n; }

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

std::string join(const std::vector<std::string>& v, const std::string& sep)
{
    std::string o;
    for (size_t i = 0; i < v.size(); ++i)
        o += (i ? sep : "") + v[i];
    return o;
}

const char* kSymbIso = "Thm. symb-iso, \"the unit map $\\mathds{1}_F\\rightarrow\\mathsf{KQ}_F$ induces an exact "
                       "sequence\"";

} // namespace

std::string table_theory_name(TableTheory t)
{
    switch (t) {
    case TableTheory::KQ:
        return "KQ";
    case TableTheory::KGL:
        return "KGL";
    case TableTheory::KW:
        return "KW";
    case TableTheory::KQ_rational:
        return "KQ_rational";
    }
    return "?";
}

std::string cell_status_name(TableCell::Status s)
{
    switch (s) {
    case TableCell::Ok:
        return "ok";
    case TableCell::Ambiguous:
        return "ambiguous";
    case TableCell::Uncertified:
        return "uncertified";
    case TableCell::Error:
        return "error";
    }
    return "?";
}

/* ---------------- result tables ---------------- */

std::string TableCell::group_text() const
{
    if (group)
        return group->str();
    if (status == Ambiguous)
        return resolution.str();
    return cell_status_name(status);
}

json TableCell::to_json() const
{
    json j{{"s", s}, {"w", w}, {"status", cell_status_name(status)}, {"group", group_text()},
           {"provenance", provenance}};
    if (group)
        j["group_json"] = group->to_json();
    if (status == Ambiguous)
        j["resolution"] = resolution.to_json();
    if (!flags.empty())
        j["flags"] = std::vector<std::string>(flags.begin(), flags.end());
    if (!layers.empty()) {
        json ls = json::array();
        for (size_t i = 0; i < layers.size(); ++i)
            ls.push_back({{"label", layers[i]}, {"group", layer_groups[i].str()}});
        j["layers"] = ls;
    }
    if (!note.empty())
        j["note"] = note;
    return j;
}

const TableCell* ResultTable::find(int s, int w) const
{
    for (const auto& c : cells)
        if (c.s == s && c.w == w)
            return &c;
    return nullptr;
}

bool ResultTable::complete() const
{
    return std::all_of(cells.begin(), cells.end(), [](const TableCell& c) { return c.status == TableCell::Ok; });
}

std::string ResultTable::to_csv() const
{
    auto quote = [](const std::string& s) {
        std::string o = "\"";
        for (char c : s)
            o += c == '"' ? std::string("\"\"") : std::string(1, c);
        return o + "\"";
    };
    std::ostringstream o;
    o << "s,w,group,status,provenance,conditional\n";
    for (const auto& c : cells)
        o << c.s << "," << c.w << "," << quote(c.group_text()) << "," << cell_status_name(c.status) << ","
          << quote(c.provenance) << "," << quote(join({c.flags.begin(), c.flags.end()}, "; ")) << "\n";
    return o.str();
}

json ResultTable::to_json() const
{
    json cs = json::array();
    for (const auto& c : cells)
        cs.push_back(c.to_json());
    return {{"base", base}, {"theory", table_theory_name(theory)}, {"cells", cs}};
}

std::string ResultTable::to_text() const
{
    std::vector<int> ws, ss;
    for (const auto& c : cells) {
        ws.push_back(c.w);
        ss.push_back(c.s);
    }
    std::sort(ws.begin(), ws.end());
    ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
    std::sort(ss.begin(), ss.end());
    ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
    std::vector<size_t> width(ws.size(), 0);
    auto text = [&](int s, int w) {
        const TableCell* c = find(s, w);
        if (!c)
            return std::string();
        std::string t = c->group_text();
        if (c->conditional())
            t += " (c)";
        return t;
    };
    for (size_t i = 0; i < ws.size(); ++i) {
        width[i] = ("w=" + std::to_string(ws[i])).size();
        for (int s : ss)
            width[i] = std::max(width[i], text(s, ws[i]).size());
    }
    std::ostringstream o;
    o << base << " " << table_theory_name(theory) << ", pi_{s+(w)}\n";
    o << std::left << std::setw(5) << "s";
    for (size_t i = 0; i < ws.size(); ++i)
        o << " | " << std::setw(width[i]) << ("w=" + std::to_string(ws[i]));
    o << "\n";
    for (int s : ss) {
        o << std::left << std::setw(5) << s;
        for (size_t i = 0; i < ws.size(); ++i)
            o << " | " << std::setw(width[i]) << text(s, ws[i]);
        o << "\n";
    }
    bool any = std::any_of(cells.begin(), cells.end(), [](const TableCell& c) { return c.conditional(); });
    if (any)
        o << "(c): depends on a conditional or unknown cohomology group\n";
    return o.str();
}

/* ---------------- pipeline ---------------- */

namespace {

struct PipelineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<TableCell> run_weight(const Profile& p, int s_min, int s_max, int w, SpecTheory theory)
{
    // KQ is (4,4)-periodic and KGL is (1,1)-periodic; the engine always runs on a reduced weight
    int w0 = theory == SpecTheory::KQ ? mod(w, 4) : 0;
    int shift = w - w0;
    int a = s_min - shift, b = s_max - shift;
    Page e2;
    CollapseReport rep;
    try {
        Page e1 = build_page1_auto(p, w0, a, b, theory);
        e2 = apply_first_differential(e1);
        rep = certify_collapse(e2);
    } catch (const std::exception& ex) {
        throw PipelineError(p.name + " weight " + std::to_string(w) + " columns " + std::to_string(s_min) + ".." +
                            std::to_string(s_max) + ": " + ex.what());
    }
    std::vector<TableCell> out;
    for (int s0 = a; s0 <= b; ++s0) {
        TableCell c;
        c.s = s0 + shift;
        c.w = w;
        std::ostringstream prov;
        prov << (theory == SpecTheory::KQ ? "KQ" : "KGL") << " E" << (rep.page <= 1 ? 1 : 2) << " column s=" << s0
             << " weight " << w0;
        if (shift)
            prov << " shifted by " << (theory == SpecTheory::KQ ? "alpha^" + std::to_string(shift / 4)
                                                                : "Bott^" + std::to_string(shift));
        try {
            ExtensionLadder lad = assemble_column(e2, rep, s0);
            for (const auto& l : lad.quotients) {
                c.layers.push_back(l.layer.label);
                c.layer_groups.push_back(l.layer.group);
            }
            c.flags = lad.flags;
            c.resolution = lad.result;
            if (lad.result.group) {
                c.group = lad.result.group;
                c.status = TableCell::Ok;
            } else
                c.status = TableCell::Ambiguous;
            prov << "; " << lad.result.rule;
            if (!lad.result.citation.empty())
                prov << " [" << lad.result.citation << "]";
        } catch (const UncertifiedPage& ex) {
            c.status = TableCell::Uncertified;
            c.note = ex.what();
        } catch (const std::exception& ex) {
            throw PipelineError(p.name + " cell (s=" + std::to_string(c.s) + ", w=" + std::to_string(w) +
                                "): " + ex.what());
        }
        c.provenance = prov.str();
        out.push_back(std::move(c));
    }
    return out;
}

ResultTable run_table(const Profile& p, int s_min, int s_max, const std::vector<int>& weights, SpecTheory theory)
{
    if (s_min > s_max)
        throw std::invalid_argument("empty s range");
    if (weights.empty())
        throw std::invalid_argument("no weights given");
    std::vector<std::future<std::vector<TableCell>>> jobs;
    for (int w : weights)
        jobs.push_back(std::async(std::launch::async, run_weight, p, s_min, s_max, w, theory));
    ResultTable t;
    t.base = p.name;
    t.theory = theory == SpecTheory::KQ ? TableTheory::KQ : TableTheory::KGL;
    for (auto& j : jobs) {
        auto cs = j.get();
        t.cells.insert(t.cells.end(), cs.begin(), cs.end());
    }
    std::stable_sort(t.cells.begin(), t.cells.end(),
                     [](const TableCell& x, const TableCell& y) { return x.w != y.w ? x.w < y.w : x.s < y.s; });
    return t;
}

} // namespace

ResultTable kq_groups(const Profile& p, int s_min, int s_max, int w)
{
    return run_table(p, s_min, s_max, {w}, SpecTheory::KQ);
}

ResultTable kq_groups(const Profile& p, int s_min, int s_max, const std::vector<int>& weights)
{
    return run_table(p, s_min, s_max, weights, SpecTheory::KQ);
}

ResultTable kgl_groups(const Profile& p, int s_min, int s_max, int w)
{
    return run_table(p, s_min, s_max, {w}, SpecTheory::KGL);
}

/* ---------------- algebraic K-theory of Z ---------------- */

namespace {

// ker(pr : H^{s,w} -> h^{s,w})
Group ker_pr(const Profile& p, int s, int w, std::set<std::string>* flags = nullptr)
{
    auto H = coeff(p, Coeff::Z, s, w);
    if (flags)
        flags->insert(H.flags.begin(), H.flags.end());
    if (H.is_zero())
        return Group();
    auto h = coeff(p, Coeff::Z2, s, w);
    IntMatrix pr = pr_matrix(p, s, w);
    IntMatrix none(H.basis.size(), 0);
    return subquotient(H.orders(), none, pr, h.orders());
}

} // namespace

KGLValue kgl_value_Z(int n, const Profile& p)
{
    KGLValue v;
    const std::string cite = "Thm. slice-spec-seq-KGLZ";
    auto H = [&](int s, int w) {
        auto g = coeff(p, Coeff::Z, s, w);
        v.flags.insert(g.flags.begin(), g.flags.end());
        return g.group;
    };
    if (n < 0) {
        v.rule = "0 for s<w";
    } else if (n == 0) {
        v.group = H(0, 0);
        v.rule = "H^{0,0}";
    } else {
        int r = mod(n, 8);
        if (r == 1 || r == 7) {
            v.group = H(1, (n + 1) / 2);
            v.rule = "H^{1,(n+1)/2}";
        } else if (r == 2 || r == 0 || r == 4) {
            v.group = H(2, (n + 2) / 2);
            v.rule = "H^{2,(n+2)/2}";
        } else if (r == 3) {
            Group top = H(3, (n + 3) / 2), bottom = H(1, (n + 1) / 2);
            v.group = Group::cyclic(top.order() * bottom.order());
            v.rule = "H^{3,(n+3)/2} * H^{1,(n+1)/2}, nontrivial extension";
        } else if (r == 5) {
            v.group = Group::free(1);
            v.rule = "Z";
        } else {
            v.group = ker_pr(p, 2, (n + 2) / 2, &v.flags);
            v.rule = "ker(pr on H^{2,(n+2)/2})";
        }
    }
    v.rule = cite + ": " + v.rule;
    return v;
}

Group kgl_groups_Z(int n) { return kgl_value_Z(n).group; }

/* ---------------- Witt theory of Z ---------------- */

Group kw_groups_Z(int s, int /*w*/)
{
    switch (mod(s, 4)) {
    case 0:
        return Group::free(1);
    case 1:
        return Group::cyclic(2);
    default:
        return Group();
    }
}

ResultTable kw_table_Z(int s_min, int s_max, const std::vector<int>& weights)
{
    ResultTable t;
    t.base = "Z";
    t.theory = TableTheory::KW;
    std::vector<int> ws = weights;
    std::sort(ws.begin(), ws.end());
    for (int w : ws)
        for (int s = s_min; s <= s_max; ++s) {
            TableCell c;
            c.s = s;
            c.w = w;
            c.group = kw_groups_Z(s, w);
            c.provenance = "Thm. coeff-KW";
            t.cells.push_back(c);
        }
    return t;
}

ResultTable kq_rational_table(const Profile& p, int s_min, int s_max, const std::vector<int>& weights)
{
    ResultTable t;
    t.base = p.name;
    t.theory = TableTheory::KQ_rational;
    std::vector<int> ws = weights;
    std::sort(ws.begin(), ws.end());
    for (int w : ws)
        for (int s = s_min; s <= s_max; ++s) {
            RationalReport r = kq_rational(p, s + w, w);
            TableCell c;
            c.s = s;
            c.w = w;
            c.group = Group::free(r.dimension);
            std::vector<std::string> parts;
            for (const auto& b : r.breakdown)
                parts.push_back(b.kind + "^{" + std::to_string(b.p) + "," + std::to_string(b.w) + "} (q=" +
                                std::to_string(b.q) + ")");
            c.provenance = "Cor. rationalhermitianKgroups: " + (parts.empty() ? std::string("no summands")
                                                                               : join(parts, " + "));
            t.cells.push_back(c);
        }
    return t;
}

bool KWElement::Mono::operator<(const Mono& o) const
{
    return std::tie(alpha, eta, xi) < std::tie(o.alpha, o.eta, o.xi);
}

KWElement KWElement::alpha(int k)
{
    KWElement e;
    e.terms_[{k, 0, 0}] = 1;
    return e;
}

KWElement KWElement::eta(int k)
{
    KWElement e;
    e.terms_[{0, k, 0}] = 1;
    return e;
}

KWElement KWElement::xi()
{
    KWElement e;
    e.terms_[{0, 0, 1}] = 1;
    return e;
}

KWElement KWElement::integer(long n)
{
    KWElement e;
    e.terms_[{0, 0, 0}] = n;
    e.normalise();
    return e;
}

void KWElement::normalise()
{
    for (auto it = terms_.begin(); it != terms_.end();) {
        Int& c = it->second;
        if (it->first.xi == 1) // 2 xi = 0
            c = ((c % 2) + 2) % 2;
        if (c == 0 || it->first.xi >= 2) // xi^2 = 0
            it = terms_.erase(it);
        else
            ++it;
    }
}

KWElement KWElement::operator+(const KWElement& o) const
{
    KWElement r = *this;
    for (const auto& [m, c] : o.terms_)
        r.terms_[m] += c;
    r.normalise();
    return r;
}

KWElement KWElement::operator*(const KWElement& o) const
{
    KWElement r;
    for (const auto& [a, x] : terms_)
        for (const auto& [b, y] : o.terms_)
            r.terms_[{a.alpha + b.alpha, a.eta + b.eta, a.xi + b.xi}] += x * y;
    r.normalise();
    return r;
}

KWElement KWElement::scaled(long n) const { return *this * integer(n); }

std::optional<std::pair<int, int>> KWElement::degree() const
{
    std::optional<std::pair<int, int>> d;
    for (const auto& [m, c] : terms_) {
        // alpha in (4,4), eta in (0,1), xi in (1,0)
        std::pair<int, int> e{4 * m.alpha + m.xi, 4 * m.alpha + m.eta};
        if (d && *d != e)
            return std::nullopt;
        d = e;
    }
    return d;
}

std::string KWElement::str() const
{
    if (terms_.empty())
        return "0";
    std::vector<std::string> parts;
    for (const auto& [m, c] : terms_) {
        std::vector<std::string> f;
        if (c != 1 || (m.alpha == 0 && m.eta == 0 && m.xi == 0))
            f.push_back(c.get_str());
        if (m.alpha)
            f.push_back("alpha^" + std::to_string(m.alpha));
        if (m.eta)
            f.push_back("eta^" + std::to_string(m.eta));
        if (m.xi)
            f.push_back("xi");
        parts.push_back(join(f, "*"));
    }
    return join(parts, " + ");
}

/* ---------------- rational groups ---------------- */

json RationalReport::to_json() const
{
    json b = json::array();
    for (const auto& x : breakdown)
        b.push_back({{"q", x.q}, {"kind", x.kind}, {"p", x.p}, {"w", x.w}, {"rank", x.rank}});
    return {{"t", t}, {"w", w}, {"dimension", dimension}, {"breakdown", b}};
}

RationalReport kq_rational(const Profile& p, int t, int w)
{
    RationalReport r;
    r.t = t;
    r.w = w;
    // only cohomological degrees 0..2 carry rational classes here
    for (int q = floor_div(t, 4) - 1; q <= floor_div(t + 2, 4) + 1; ++q) {
        int a = 4 * q - t, b = 2 * q - w;
        int h = a >= 0 && a <= 2 ? rational_rank(p, a, b) : 0;
        if (h)
            r.breakdown.push_back({q, "H", a, b, h});
        r.dimension += h;
    }
    // the Witt summand of the Milnor-Witt part sits on the diagonal a = b, i.e. q = (t - w)/2, for even q
    if (mod(t - w, 4) == 0) {
        int q = (t - w) / 2, a = 4 * q - t;
        int wr = witt_rational_rank(p);
        if (wr)
            r.breakdown.push_back({q, "W", a, a, wr});
        r.dimension += wr;
    }
    std::sort(r.breakdown.begin(), r.breakdown.end(),
              [](const RationalSummand& x, const RationalSummand& y) { return x.q < y.q; });
    return r;
}

/* ---------------- Milnor-Witt image ---------------- */

json MWImageReport::to_json() const
{
    return {{"n", n},
            {"kernel", kernel.str()},
            {"cokernel", cokernel.str()},
            {"isomorphism", isomorphism},
            {"citation", citation}};
}

MWImageReport mw_image_sequence(const Profile& p, int n)
{
    if (n > 5)
        throw OutOfRange("the Milnor-Witt image sequence is only established for n <= 5");
    if (!p.is_field())
        throw WrongCoefficients("the Milnor-Witt image sequence needs a field profile, got " + p.name);
    MWImageReport r;
    r.n = n;
    r.citation = kSymbIso;
    if (n - 4 >= 0)
        r.cokernel = coeff(p, Coeff::Z, n - 4, n - 2).group;
    r.isomorphism = n < 3 || r.cokernel.is_zero();
    return r;
}

/* ---------------- golden sets ---------------- */

namespace {

std::vector<std::vector<std::string>> parse_csv(std::string_view text, std::vector<std::string>& meta)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    auto end_row = [&] {
        if (any || !field.empty() || !row.empty()) {
            row.push_back(field);
            rows.push_back(row);
        }
        row.clear();
        field.clear();
        any = false;
    };
    size_t i = 0;
    while (i < text.size()) {
        if (!quoted && field.empty() && row.empty() && text[i] == '#') {
            size_t e = text.find('\n', i);
            meta.emplace_back(text.substr(i, e == std::string_view::npos ? e : e - i));
            i = e == std::string_view::npos ? text.size() : e + 1;
            continue;
        }
        char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"')
                quoted = false;
            else
                field += c;
        } else if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(field);
            field.clear();
            any = true;
        } else if (c == '\n')
            end_row();
        else if (c != '\r')
            field += c;
        ++i;
    }
    end_row();
    return rows;
}

// integer expressions: + - * / ^, parentheses, implicit products like 4m, variables
class IntExpr {
public:
    IntExpr(std::string_view s, const std::map<char, long>& v) : s_(s), v_(v) {}
    Int run()
    {
        Int r = sum();
        skip();
        if (i_ != s_.size())
            throw ParseError("trailing input in index expression '" + std::string(s_) + "'");
        return r;
    }

private:
    void skip()
    {
        while (i_ < s_.size() && s_[i_] == ' ')
            ++i_;
    }
    bool eat(char c)
    {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    Int sum()
    {
        Int r = product();
        for (;;) {
            if (eat('+'))
                r += product();
            else if (eat('-'))
                r -= product();
            else
                return r;
        }
    }
    Int product()
    {
        Int r = power();
        for (;;) {
            skip();
            if (eat('*'))
                r *= power();
            else if (eat('/')) {
                Int d = power();
                if (d == 0 || r % d != 0)
                    throw ParseError("inexact division in '" + std::string(s_) + "'");
                r /= d;
            } else if (i_ < s_.size() && (std::isalpha((unsigned char)s_[i_]) || s_[i_] == '('))
                r *= power();
            else
                return r;
        }
    }
    Int power()
    {
        Int b = atom();
        if (eat('^')) {
            bool brace = eat('{');
            Int e = brace ? sum() : atom();
            if (brace && !eat('}'))
                throw ParseError("missing } in '" + std::string(s_) + "'");
            if (e < 0)
                throw ParseError("negative exponent in '" + std::string(s_) + "'");
            Int r;
            mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e.get_ui());
            return r;
        }
        return b;
    }
    Int atom()
    {
        skip();
        if (eat('(')) {
            Int r = sum();
            if (!eat(')'))
                throw ParseError("missing ) in '" + std::string(s_) + "'");
            return r;
        }
        if (eat('-'))
            return -atom();
        if (i_ < s_.size() && std::isdigit((unsigned char)s_[i_])) {
            size_t j = i_;
            while (j < s_.size() && std::isdigit((unsigned char)s_[j]))
                ++j;
            Int r(std::string(s_.substr(i_, j - i_)));
            i_ = j;
            return r;
        }
        if (i_ < s_.size() && std::isalpha((unsigned char)s_[i_])) {
            char c = s_[i_++];
            auto it = v_.find(c);
            if (it == v_.end())
                throw ParseError(std::string("unknown variable ") + c + " in '" + std::string(s_) + "'");
            return Int(it->second);
        }
        throw ParseError("bad index expression '" + std::string(s_) + "'");
    }
    std::string_view s_;
    const std::map<char, long>& v_;
    size_t i_ = 0;
};

long eval_index(std::string_view s, const std::map<char, long>& v)
{
    Int r = IntExpr(s, v).run();
    if (!r.fits_slong_p())
        throw ParseError("index out of range in '" + std::string(s) + "'");
    return r.get_si();
}

// one atom of a golden expression, evaluated
struct Atom {
    Group group;
    std::string label; // cohomology label for shape comparisons, empty otherwise
};
// a term is an iterated extension A • B • ...; written sub first
struct Term {
    std::vector<Atom> atoms;
    bool cyclic = false; // cyc(...): the extension is the cyclic one
};

struct Parsed {
    std::vector<Term> terms;
};

std::string trim(std::string s)
{
    size_t a = s.find_first_not_of(' '), b = s.find_last_not_of(' ');
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

// split at top-level occurrences of sep (outside braces and parentheses)
std::vector<std::string> split_top(const std::string& s, const std::string& sep)
{
    std::vector<std::string> out;
    int depth = 0;
    size_t last = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '{' || c == '(')
            ++depth;
        else if (c == '}' || c == ')')
            --depth;
        else if (depth == 0 && s.compare(i, sep.size(), sep) == 0) {
            out.push_back(trim(s.substr(last, i - last)));
            last = i + sep.size();
            i = last - 1;
        }
    }
    out.push_back(trim(s.substr(last)));
    return out;
}

// text between the braces starting at s[pos] == '{'
std::string braced(const std::string& s, size_t pos, size_t* end)
{
    if (pos >= s.size() || s[pos] != '{')
        throw ParseError("expected { in '" + s + "'");
    int depth = 0;
    for (size_t i = pos; i < s.size(); ++i) {
        if (s[i] == '{')
            ++depth;
        else if (s[i] == '}' && --depth == 0) {
            *end = i + 1;
            return s.substr(pos + 1, i - pos - 1);
        }
    }
    throw ParseError("unbalanced braces in '" + s + "'");
}

bool starts(const std::string& s, const char* p) { return s.rfind(p, 0) == 0; }

Atom eval_atom(const std::string& a, const Profile& p, const std::map<char, long>& v)
{
    size_t end = 0;
    auto whole = [&](size_t e) {
        if (e != a.size())
            throw ParseError("trailing input in '" + a + "'");
    };
    if (a == "0")
        return {Group(), ""};
    if (a == "GW")
        return {kmw(p, 0), ""};
    if (a == "W")
        return {kmw(p, -1), ""};
    if (starts(a, "H^{") || starts(a, "h^{")) {
        std::string in = braced(a, 2, &end);
        whole(end);
        auto parts = split_top(in, ",");
        if (parts.size() != 2)
            throw ParseError("cohomology needs two indices: '" + a + "'");
        long s = eval_index(parts[0], v), w = eval_index(parts[1], v);
        auto g = coeff(p, a[0] == 'H' ? Coeff::Z : Coeff::Z2, s, w);
        return {g.group, std::string(1, a[0]) + "^{" + std::to_string(s) + "," + std::to_string(w) + "}"};
    }
    if (starts(a, "A_{")) {
        long s = eval_index(braced(a, 2, &end), v);
        whole(end);
        return {ker_pr(p, 2, s), ""};
    }
    if (starts(a, "K_{")) {
        long n = eval_index(braced(a, 2, &end), v);
        Group g = kgl_value_Z(n, p).group;
        if (a.substr(end) == "odd")
            return {g.odd_part(), ""};
        whole(end);
        return {g, ""};
    }
    if (starts(a, "Z/w_{") || starts(a, "Z/2w_{")) {
        size_t b = a.find('{');
        long k = eval_index(braced(a, b, &end), v);
        whole(end);
        Int n = w_number(k);
        return {Group::cyclic(a[2] == '2' ? 2 * n : n), ""};
    }
    if (starts(a, "Z/(q^{")) {
        std::string in = a.substr(3, a.size() - 4);
        if (a.back() != ')')
            throw ParseError("bad cyclic expression '" + a + "'");
        auto vv = v;
        if (p.q == 0)
            throw ParseError("q is only defined for finite field profiles");
        vv['q'] = p.q.get_si();
        return {Group::cyclic(IntExpr(in, vv).run()), ""};
    }
    if (starts(a, "(Z/")) {
        size_t close = a.find(')');
        if (close == std::string::npos || a.compare(close, 2, ")^") != 0)
            throw ParseError("bad power '" + a + "'");
        Int d(a.substr(3, close - 3));
        long k = eval_index(a.substr(close + 2), v);
        return {power(Group::cyclic(d), (int)k), ""};
    }
    if (starts(a, "Z/")) {
        Int d(a.substr(2));
        return {Group::cyclic(d), ""};
    }
    if (a == "Z")
        return {Group::free(1), ""};
    if (starts(a, "Z^"))
        return {Group::free((int)eval_index(a.substr(2), v)), ""};
    throw ParseError("unknown golden atom '" + a + "'");
}

Parsed parse_golden(const std::string& expr, const Profile& p, const std::map<char, long>& v)
{
    Parsed out;
    for (const auto& t : split_top(expr, "+")) {
        Term term;
        std::string body = t;
        if (starts(body, "cyc(") && body.back() == ')') {
            term.cyclic = true;
            body = trim(body.substr(4, body.size() - 5));
        }
        for (const auto& a : split_top(body, "•"))
            term.atoms.push_back(eval_atom(a, p, v));
        out.terms.push_back(std::move(term));
    }
    return out;
}

struct Expected {
    Group group;        // exact value when known, else the split value
    bool exact = true;  // false when an extension is left open
};

Expected expected_value(const Parsed& ps)
{
    Expected e;
    std::vector<Group> gs;
    for (const auto& t : ps.terms) {
        std::vector<Group> nz;
        for (const auto& a : t.atoms)
            if (!a.group.is_zero())
                nz.push_back(a.group);
        if (t.cyclic) {
            Int n = 1;
            for (const auto& g : nz)
                n *= g.order();
            gs.push_back(Group::cyclic(n));
        } else {
            if (nz.size() > 1) {
                // A • B with both sides nonzero: the group is fixed only when every extension splits
                Group acc = nz.back();
                for (size_t i = nz.size() - 1; i-- > 0;) {
                    auto r = resolve_extension(nz[i], acc);
                    if (!r.group) {
                        e.exact = false;
                        acc = direct_sum(nz[i], acc);
                    } else
                        acc = *r.group;
                }
                gs.push_back(acc);
            } else
                gs.push_back(nz.empty() ? Group() : nz[0]);
        }
    }
    e.group = direct_sum(gs);
    return e;
}

bool same_order(const Group& a, const Group& b)
{
    return a.rank() == b.rank() && a.torsion_order() == b.torsion_order();
}

struct Cond {
    std::string var;
    std::string op;
    long mod = 0;
    std::string rhs;
};

std::vector<Cond> parse_when(const std::string& when)
{
    std::vector<Cond> out;
    std::stringstream ss(when);
    std::string part;
    while (std::getline(ss, part, ';')) {
        part = trim(part);
        if (part.empty())
            continue;
        Cond c;
        size_t i = 0;
        while (i < part.size() && std::isalpha((unsigned char)part[i]))
            ++i;
        c.var = part.substr(0, i);
        if (i < part.size() && part[i] == '%') {
            size_t j = i + 1;
            while (j < part.size() && std::isdigit((unsigned char)part[j]))
                ++j;
            c.mod = std::stol(part.substr(i + 1, j - i - 1));
            i = j;
        }
        for (const char* op : {"<=", ">=", "=", "<", ">"})
            if (part.compare(i, std::string(op).size(), op) == 0) {
                c.op = op;
                break;
            }
        if (c.op.empty() || c.var.empty())
            throw ParseError("bad condition '" + part + "'");
        c.rhs = part.substr(i + c.op.size());
        out.push_back(c);
    }
    return out;
}

bool holds(const std::vector<Cond>& cs, const std::map<char, long>& v)
{
    for (const auto& c : cs) {
        long x = eval_index(c.var, v);
        if (c.mod)
            x = mod((int)x, (int)c.mod);
        long r = eval_index(c.rhs, v);
        bool ok = c.op == "=" ? x == r : c.op == "<" ? x < r : c.op == ">" ? x > r : c.op == "<=" ? x <= r : x >= r;
        if (!ok)
            return false;
    }
    return true;
}

struct RawSet {
    std::string file;
    std::string profile_filter; // restrict to one profile
};

const std::map<std::string, RawSet>& set_table()
{
    static const std::map<std::string, RawSet> t{
        {"coeff-KQZ", {"golden/coeff-KQZ.csv", ""}},
        {"coeff-KW", {"golden/coeff-KW.csv", ""}},
        {"intro", {"golden/intro.csv", ""}},
        {"finite-fields", {"golden/finite-fields.csv", ""}},
        {"finite-fields-q2", {"golden/finite-fields.csv", "F2"}},
        {"finite-fields-q3", {"golden/finite-fields.csv", "F3"}},
        {"finite-fields-q4", {"golden/finite-fields.csv", "F4"}},
        {"finite-fields-q5", {"golden/finite-fields.csv", "F5"}},
        {"finite-fields-q9", {"golden/finite-fields.csv", "F9"}},
        {"KQn0", {"golden/KQn0.csv", ""}},
        {"KQ-coeff-field", {"golden/KQ-coeff-field.csv", ""}},
    };
    return t;
}

std::map<char, long> vars_for(int s, int w)
{
    int n = s - w;
    return {{'s', s}, {'w', w}, {'n', n}, {'m', floor_div(s, 8)}, {'k', floor_div(n, 8)}};
}

} // namespace

Group eval_golden_expr(const std::string& expr, const Profile& p, const std::map<char, long>& vars)
{
    Expected e = expected_value(parse_golden(expr, p, vars));
    if (!e.exact)
        throw ParseError("expression '" + expr + "' leaves an extension open");
    return e.group;
}

std::vector<std::string> golden_set_names()
{
    std::vector<std::string> out;
    for (const auto& [k, v] : set_table())
        out.push_back(k);
    return out;
}

GoldenSet golden_set(const std::string& name)
{
    auto it = set_table().find(name);
    if (it == set_table().end())
        throw UnknownGoldenSet("unknown golden set '" + name + "'; known: " + join(golden_set_names(), ", "));
    auto text = resource(it->second.file);
    if (!text)
        throw UnknownGoldenSet("golden set '" + name + "' is not embedded");
    std::vector<std::string> meta;
    auto rows = parse_csv(*text, meta);
    std::map<std::string, std::pair<int, int>> window;
    for (const auto& m : meta) {
        std::vector<std::string> f;
        std::stringstream ss(m);
        std::string x;
        while (std::getline(ss, x, ','))
            f.push_back(x);
        if (f.size() == 4 && f[0] == "#window")
            window[f[1]] = {std::stoi(f[2]), std::stoi(f[3])};
    }
    if (rows.empty() || rows[0].size() != 7 || rows[0][0] != "profile")
        throw ParseError("golden set '" + name + "' has a malformed header");
    if (!window.count("w") || (!window.count("s") && !window.count("n")))
        throw ParseError("golden set '" + name + "' lacks a window");
    auto [w0, w1] = window["w"];
    GoldenSet set;
    set.name = name;
    for (size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != 7)
            throw ParseError("golden set '" + name + "' row " + std::to_string(r) + " has " +
                             std::to_string(row.size()) + " fields");
        auto conds = parse_when(row[1]);
        std::vector<std::string> profiles;
        std::stringstream ps(row[0]);
        std::string pn;
        while (std::getline(ps, pn, '|'))
            profiles.push_back(pn);
        for (const auto& prof : profiles) {
            if (!it->second.profile_filter.empty() && prof != it->second.profile_filter)
                continue;
            for (int w = w0; w <= w1; ++w) {
                int lo, hi;
                if (window.count("s"))
                    std::tie(lo, hi) = window["s"];
                else {
                    lo = window["n"].first + w;
                    hi = window["n"].second + w;
                }
                for (int s = lo; s <= hi; ++s)
                    if (holds(conds, vars_for(s, w)))
                        set.entries.push_back({prof, s, w, row[2], row[3], row[4], row[5], row[6]});
            }
        }
    }
    std::stable_sort(set.entries.begin(), set.entries.end(), [](const GoldenEntry& a, const GoldenEntry& b) {
        return std::tie(a.profile, a.w, a.s) < std::tie(b.profile, b.w, b.s);
    });
    // one entry per cell; a later, more specific row replaces nothing silently
    for (size_t i = 1; i < set.entries.size(); ++i) {
        const auto& a = set.entries[i - 1];
        const auto& b = set.entries[i];
        if (a.profile == b.profile && a.s == b.s && a.w == b.w)
            throw ParseError("golden set '" + name + "' has two entries for " + a.profile + " (s=" +
                             std::to_string(a.s) + ", w=" + std::to_string(a.w) + ")");
    }
    return set;
}

int GoldenReport::count(const std::string& status) const
{
    return (int)std::count_if(cells.begin(), cells.end(),
                              [&](const GoldenCellReport& c) { return c.status == status; });
}

std::string GoldenReport::to_text() const
{
    std::ostringstream o;
    o << "golden set " << name << ": " << count("equal") << " equal, " << count("conditional") << " conditional, "
      << count("excluded") << " excluded, " << count("mismatch") << " mismatch\n";
    for (const auto& c : cells)
        if (c.status != "equal")
            o << "  " << c.status << " " << c.entry.profile << " (s=" << c.entry.s << ", w=" << c.entry.w
              << ") expected " << c.expected << " got " << c.actual << (c.detail.empty() ? "" : "; " + c.detail)
              << "\n";
    return o.str();
}

json GoldenReport::to_json() const
{
    json cs = json::array();
    for (const auto& c : cells)
        cs.push_back({{"profile", c.entry.profile},
                      {"s", c.entry.s},
                      {"w", c.entry.w},
                      {"expr", c.entry.expr},
                      {"eval", c.entry.eval},
                      {"mode", c.entry.mode},
                      {"expected", c.expected},
                      {"actual", c.actual},
                      {"status", c.status},
                      {"detail", c.detail},
                      {"citation", c.entry.citation}});
    return {{"name", name},
            {"equal", count("equal")},
            {"conditional", count("conditional")},
            {"excluded", count("excluded")},
            {"mismatch", count("mismatch")},
            {"cells", cs}};
}

Profile resolve_profile(const std::string& name, ConjectureMode cm, CyclicityMode cy)
{
    if (name == "Z" || name == "ZZ" || name == "integers")
        return profile_integers(cm, cy);
    if (name == "cd2-synthetic") {
        auto text = resource("profiles/cd2_synthetic.json");
        if (!text)
            throw ParseError("the cd2-synthetic profile is not embedded");
        return profile_cd2_from_json(json::parse(*text));
    }
    return profile_by_name(name);
}

namespace {

Profile golden_profile(const std::string& name, const GoldenOptions& opt)
{
    return resolve_profile(name, opt.conjecture, opt.cyclicity);
}

bool track_conditional(const std::set<std::string>& flags, const GoldenOptions& opt)
{
    if (opt.conjecture != ConjectureMode::TrackUnknown && opt.cyclicity != CyclicityMode::TrackUncertain)
        return false;
    return flags.count(kUnknown) || flags.count(kConditional) || flags.count(kCyclicityUncertain);
}

} // namespace

GoldenReport golden_verify(const std::string& name, const GoldenOptions& opt)
{
    GoldenSet set = golden_set(name);
    GoldenReport rep;
    rep.name = name;
    bool kw = name == "coeff-KW";

    // one engine table per profile over the needed window
    std::map<std::string, ResultTable> tables;
    std::map<std::string, Profile> profiles;
    if (!kw) {
        std::map<std::string, std::tuple<int, int, std::set<int>>> need;
        for (const auto& e : set.entries) {
            auto [it, fresh] = need.try_emplace(e.profile, e.s, e.s, std::set<int>{});
            auto& [lo, hi, ws] = it->second;
            lo = std::min(lo, e.s);
            hi = std::max(hi, e.s);
            ws.insert(e.w);
        }
        for (const auto& [pn, n] : need) {
            const auto& [lo, hi, ws] = n;
            profiles.emplace(pn, golden_profile(pn, opt));
            tables.emplace(pn, kq_groups(profiles.at(pn), lo, hi, std::vector<int>(ws.begin(), ws.end())));
        }
    }

    for (const auto& e : set.entries) {
        GoldenCellReport c;
        c.entry = e;
        Profile p = kw ? profile_integers(opt.conjecture, opt.cyclicity) : profiles.at(e.profile);
        auto vars = vars_for(e.s, e.w);
        const std::string& ex = e.eval.empty() ? e.expr : e.eval;
        Parsed parsed = parse_golden(ex, p, vars);
        Expected want = expected_value(parsed);
        c.expected = want.group.str() + (want.exact ? "" : " up to extension");
        if (!e.eval.empty())
            c.detail = "evaluated as " + e.eval;

        std::optional<Group> got;
        std::set<std::string> flags;
        const TableCell* cell = nullptr;
        if (kw) {
            got = kw_groups_Z(e.s, e.w);
            c.actual = got->str();
        } else {
            cell = tables.at(e.profile).find(e.s, e.w);
            if (!cell)
                throw std::logic_error("golden cell outside the computed table");
            got = cell->group;
            flags = cell->flags;
            c.actual = cell->group_text();
        }
        auto add = [&](const std::string& d) { c.detail += (c.detail.empty() ? "" : "; ") + d; };

        if (e.mode == "exclude") {
            c.status = "excluded";
            add(e.note);
        } else if (e.mode == "shape") {
            std::vector<std::string> want_labels;
            bool open = false;
            for (const auto& t : parsed.terms) {
                std::vector<std::string> nz;
                for (const auto& a : t.atoms)
                    if (!a.group.is_zero())
                        nz.push_back(a.label);
                // an extension A • B is listed quotient first on the ladder
                for (auto it = nz.rbegin(); it != nz.rend(); ++it)
                    want_labels.push_back(*it);
                open = open || nz.size() > 1;
            }
            bool labels_ok = cell && cell->layers == want_labels;
            bool state_ok = open ? cell && cell->status == TableCell::Ambiguous
                                 : cell && cell->status == TableCell::Ok && got && *got == want.group;
            c.expected = want_labels.empty() ? "0" : join(want_labels, " | ");
            if (open)
                c.expected += " (ambiguous)";
            c.actual = (cell && !cell->layers.empty() ? join(cell->layers, " | ") : "0") + " -> " +
                       (cell ? cell->group_text() : "?");
            c.status = labels_ok && state_ok ? "equal" : "mismatch";
        } else if (!got) {
            c.status = "mismatch";
            add(cell ? "engine left the cell " + cell_status_name(cell->status) : "no value");
        } else {
            bool order_only = e.mode == "order" || !want.exact;
            bool ok = order_only ? same_order(*got, want.group) : *got == want.group;
            if (order_only)
                add("order-only comparison");
            c.status = ok ? "equal" : "mismatch";
        }
        if (c.status == "equal" && track_conditional(flags, opt))
            c.status = "conditional";
        rep.cells.push_back(std::move(c));
    }
    return rep;
}

} // namespace kq

#include "kq/slicedata.hpp"

namespace kq {

namespace {

int mod(int a, int n) { return ((a % n) + n) % n; }

std::string bideg(const char* stem, int s, int w)
{
    return std::string(stem) + "^{" + std::to_string(s) + "," + std::to_string(w) + "}";
}

std::string shift_str(const Bidegree& b)
{
    if (b.s == 0)
        return "Sigma^{(" + std::to_string(b.w) + ")}";
    return "Sigma^{" + std::to_string(b.s) + "+(" + std::to_string(b.w) + ")}";
}

std::string pow_str(const char* x, int e)
{
    if (e == 0)
        return "";
    return e == 1 ? std::string(x) : std::string(x) + "^" + std::to_string(e);
}

std::string gen_str(int m, int n)
{
    std::string a = pow_str("eta", m), b = pow_str("sqrt(alpha)", n);
    if (a.empty() && b.empty())
        return "1";
    return a + (a.empty() || b.empty() ? "" : "*") + b;
}

const char* kVeffCite =
    "Thm. veff-KQ, \"the very effective slices of hermitian $K$-theory are given by\"";
const char* kFig1Cite =
    "Fig. 1, \"using $\\pi_{0-(n)}\\tilde{\\mathsf{s}}_{0}\\mathsf{KQ}\\cong \\widetilde{H}^{n,n}$\"";
const char* kPiVCite = "Thm. pi-v, \"participates in the exact sequences\"";
const char* kPi0VCite = "Lemma pi0V, \"the injection induces an isomorphism\"";
const char* kPi1VCite = "Lemma pi1V, \"is nonzero if and only if $w\\leq 2$\"";
const char* kPi1VOverride = "Lemma pi1V, \"has to contain an element of order $48$\"";
const char* kKGLCite = "Thm. slice-spec-seq-KGLZ proof, \"$\\mathsf{s}_n\\mathsf{KGL}_\\mathbb{Z} \\simeq "
                       "\\Sigma^{n+(n)}\\mathsf{M}\\Z$\"";

CellLayer plain_layer(const Group& g, const std::string& label, const std::set<std::string>& flags,
                      const std::string& role)
{
    CellLayer l;
    l.group = g;
    l.label = label;
    l.flags = flags;
    l.role = role;
    return l;
}

// mod 2 classes modulo the span of the given columns; the image of Sq2 pr is spanned by basis vectors
GroupWithBasis quotient_by_columns(const GroupWithBasis& g, const IntMatrix& m)
{
    std::vector<bool> killed(g.basis.size(), false);
    for (size_t j = 0; j < m.cols(); ++j) {
        int hits = 0;
        size_t at = 0;
        for (size_t i = 0; i < m.rows(); ++i)
            if (m(i, j) % 2 != 0) {
                ++hits;
                at = i;
            }
        if (hits > 1)
            throw std::logic_error("Sq2 pr image is not spanned by basis classes");
        if (hits == 1)
            killed[at] = true;
    }
    GroupWithBasis out;
    out.flags = g.flags;
    std::vector<Int> o;
    for (size_t i = 0; i < g.basis.size(); ++i)
        if (!killed[i]) {
            out.basis.push_back(g.basis[i]);
            o.push_back(g.basis[i].order);
        }
    out.group = Group::from_cyclics(o);
    return out;
}

} // namespace

std::string theory_name(Theory t)
{
    switch (t) {
    case Theory::KQ_veff:
        return "KQ_veff";
    case Theory::kq_slices:
        return "kq_slices";
    case Theory::KW_slices:
        return "KW_slices";
    case Theory::KGL_slices:
        return "KGL_slices";
    }
    return "?";
}

std::string spec_tag_name(SpecTag t)
{
    switch (t) {
    case SpecTag::MZ:
        return "MZ";
    case SpecTag::MZ2:
        return "MZ/2";
    case SpecTag::VtildeS0KQ:
        return "s~0KQ";
    case SpecTag::Zero:
        return "0";
    case SpecTag::MZ12:
        return "MZ/12";
    }
    return "?";
}

std::string SliceDescriptor::str() const
{
    std::string out;
    for (const auto& m : summands) {
        if (!out.empty())
            out += " + ";
        out += m.tag == SpecTag::Zero ? "0" : shift_str(m.shift) + " " + spec_tag_name(m.tag);
    }
    return out.empty() ? "0" : out;
}

json SliceDescriptor::to_json() const
{
    json s = json::array();
    for (const auto& m : summands) {
        json e{{"shift", {{"s", m.shift.s}, {"w", m.shift.w}}}, {"spectrum", spec_tag_name(m.tag)}};
        if (!m.generator.empty())
            e["generator"] = m.generator;
        if (!m.d1.empty())
            e["d1"] = m.d1;
        s.push_back(e);
    }
    json j{{"theory", theory_name(theory)}, {"q", q}, {"summands", s}, {"text", str()}};
    if (!note.empty())
        j["note"] = note;
    return j;
}

SliceDescriptor veff_slice_KQ(int q)
{
    SliceDescriptor d;
    d.theory = Theory::KQ_veff;
    d.q = q;
    static const SpecTag tags[] = {SpecTag::VtildeS0KQ, SpecTag::MZ2, SpecTag::MZ, SpecTag::Zero};
    d.summands.push_back({{q, q}, tags[mod(q, 4)], "", ""});
    d.note = kVeffCite;
    return d;
}

SliceDescriptor slice_descriptor(Theory t, int q, int n_min, int n_max)
{
    SliceDescriptor d;
    d.theory = t;
    d.q = q;
    switch (t) {
    case Theory::KQ_veff:
        return veff_slice_KQ(q);
    case Theory::KGL_slices:
        d.summands.push_back({{q, q}, SpecTag::MZ, "", ""});
        d.note = kKGLCite;
        return d;
    case Theory::kq_slices:
        if (q < 0)
            throw OutOfRange("kq has no negative slices (q = " + std::to_string(q) + ")");
        // generator eta^{q-2n} sqrt(alpha)^n contributes Sigma^{2n+(q)}
        for (int n = 0; 2 * n <= q; ++n) {
            SpecTag tag = (2 * n == q) ? SpecTag::MZ : SpecTag::MZ2;
            d.summands.push_back({{2 * n, q}, tag, gen_str(q - 2 * n, n), ""});
        }
        d.note = "Cor. slices-kq, \"The multiplicative structure is given by\"";
        return d;
    case Theory::KW_slices:
        for (int n = n_min; n <= n_max; ++n) {
            int m = q - 2 * n;
            std::string d1;
            if (mod(n, 2) == 1)
                d1 = "tau*" + gen_str(m + 3, n - 1) + " + (Sq2 + rho*Sq1)*" + gen_str(m + 1, n) + " + Sq3Sq1*" +
                     gen_str(m - 1, n + 1);
            else
                d1 = "Sq2*" + gen_str(m + 1, n) + " + Sq3Sq1*" + gen_str(m - 1, n + 1);
            d.summands.push_back({{2 * n, m + 2 * n}, SpecTag::MZ2, gen_str(m, n), d1});
        }
        d.note = "Thm. slices-KW, \"The first slice differential has the following form on the summand\"";
        return d;
    }
    return d;
}

std::vector<Int> CellLayer::orders() const
{
    if (has_basis) {
        std::vector<Int> o;
        for (const auto& c : basis)
            o.push_back(c.order);
        return o;
    }
    std::vector<Int> o(group.rank(), Int(0));
    for (const auto& d : group.torsion())
        o.push_back(d);
    return o;
}

json CellLayer::to_json() const
{
    json j{{"label", label}, {"group", group.str()}};
    if (!role.empty())
        j["role"] = role;
    if (has_basis) {
        json b = json::array();
        for (const auto& c : basis)
            b.push_back(c.str());
        j["basis"] = b;
    }
    if (!flags.empty())
        j["flags"] = std::vector<std::string>(flags.begin(), flags.end());
    return j;
}

CellLayer layer_from(const GroupWithBasis& g, const std::string& label)
{
    CellLayer l;
    l.group = g.group;
    l.label = label;
    l.flags = g.flags;
    l.basis = g.basis;
    l.has_basis = true;
    l.role = "whole";
    return l;
}

VtildeValue pi_vtilde0(const Profile& p, int a, int b)
{
    VtildeValue v;
    if (a < 0) {
        v.citation = "effectivity: negative degrees vanish";
        v.resolution.group = Group();
        v.resolution.rule = "R0";
        return v;
    }
    if (a == 0) {
        auto ls = kmw_layers(p, b);
        for (size_t i = 0; i < ls.size(); ++i) {
            std::string role = ls.size() == 1 ? "whole" : (i == 0 ? "quot" : "sub");
            v.layers.push_back(plain_layer(ls[i].group, ls[i].label, ls[i].flags, role));
            v.flags.insert(ls[i].flags.begin(), ls[i].flags.end());
        }
        if (ls.size() == 2)
            v.resolution = resolve_extension(ls[1].group, ls[0].group);
        else {
            v.resolution.group = ls.empty() ? Group() : ls[0].group;
            v.resolution.rule = "R0";
        }
        v.citation = p.kind == ProfileKind::IntegersZ && b > 0 ? kPi0VCite : kFig1Cite;
        return v;
    }
    if (a == 1 && p.kind == ProfileKind::IntegersZ) {
        v.citation = kPi1VCite;
        if (b == 2) {
            ExtensionOverride ov{ExtKind::Cyclic, Group(), kPi1VOverride};
            auto quot = coeff(p, Coeff::Z, 1, 2).group;
            auto sub = coeff(p, Coeff::Z2, 2, 3).group;
            v.resolution = resolve_extension(sub, quot, &ov);
            v.layers.push_back(plain_layer(*v.resolution.group, "pi_{1-(2)}", {}, "whole"));
            return v;
        }
        Group g;
        if (b == 0 || b == 1)
            g = Group::from_cyclics({2, 2});
        else if (b < 0)
            g = Group::cyclic(2);
        v.resolution.group = g;
        v.resolution.rule = "table";
        v.resolution.citation = kPi1VCite;
        if (!g.is_zero())
            v.layers.push_back(plain_layer(g, "pi_{1-(" + std::to_string(b) + ")}", {}, "whole"));
        return v;
    }
    if (p.kind == ProfileKind::RealsR)
        throw MissingTableEntry("R: pi_{s-(w)} of the zeroth slice needs integral cohomology");

    v.citation = kPiVCite;
    bool integers = p.kind == ProfileKind::IntegersZ;
    int r = mod(a, 4);

    // quotient H^{b-a,b}, or its Sq2 pr kernel when a = 2 mod 4
    auto H = coeff(p, Coeff::Z, b - a, b);
    v.flags.insert(H.flags.begin(), H.flags.end());
    CellLayer quot;
    if (r == 2 && integers && !H.is_zero()) {
        auto m = sq2pr_matrix(p, b - a, b);
        std::vector<Int> two(m.rows(), Int(2));
        Group k = subquotient(H.orders(), IntMatrix(H.basis.size(), 0), m, two);
        quot = plain_layer(k, "ker Sq2pr on " + bideg("H", b - a, b), H.flags, "quot");
    } else {
        quot = layer_from(H, bideg("H", b - a, b));
        quot.role = "quot";
    }

    auto h = coeff(p, Coeff::Z2, b + 1 - a, b + 1);
    v.flags.insert(h.flags.begin(), h.flags.end());
    std::string sublabel = bideg("h", b + 1 - a, b + 1);
    if (r == 1 && integers && !h.is_zero()) {
        auto src = coeff(p, Coeff::Z, b - 1 - a, b);
        if (!src.is_zero()) {
            h = quotient_by_columns(h, sq2pr_matrix(p, b - 1 - a, b));
            sublabel += "/Sq2pr";
        }
    }
    CellLayer sub = layer_from(h, sublabel);
    sub.role = "sub";

    bool hq = !quot.group.is_zero(), hs = !sub.group.is_zero();
    if (hq && hs) {
        v.layers = {quot, sub};
        v.resolution = resolve_extension(sub.group, quot.group);
    } else {
        if (hq)
            v.layers.push_back(quot);
        if (hs)
            v.layers.push_back(sub);
        if (!v.layers.empty())
            v.layers.back().role = "whole";
        v.resolution.group = v.layers.empty() ? Group() : v.layers[0].group;
        v.resolution.rule = "R0";
    }
    return v;
}

bool PageEntry::is_zero() const
{
    for (const auto& l : layers)
        if (!l.group.is_zero())
            return false;
    return true;
}

std::string PageEntry::source() const
{
    switch (row) {
    case Vtilde:
        return "pi_{" + std::to_string(ca) + "-(" + std::to_string(cb) + ")} s~0KQ";
    case Mod2:
        return bideg("h", ca, cb);
    case Integral:
        return bideg("H", ca, cb);
    case Zero:
        return "0";
    }
    return "?";
}

json PageEntry::to_json() const
{
    json ls = json::array();
    std::vector<std::string> parts;
    for (const auto& l : layers)
        if (!l.group.is_zero()) {
            ls.push_back(l.to_json());
            parts.push_back(l.group.str());
        }
    std::string g = "0";
    if (parts.size() == 1)
        g = parts[0];
    else if (parts.size() > 1) {
        g.clear();
        for (size_t i = 0; i < parts.size(); ++i)
            g += (i ? " * " : "") + parts[i];
    }
    json j{{"s", s}, {"q", q}, {"w", w}, {"source", source()}, {"group", g}, {"layers", ls},
           {"provenance", provenance}};
    if (!flags.empty())
        j["flags"] = std::vector<std::string>(flags.begin(), flags.end());
    return j;
}

PageEntry e1_entry_KQ(const Profile& p, int s, int q, int w)
{
    PageEntry e;
    e.s = s;
    e.q = q;
    e.w = w;
    e.provenance = kVeffCite;
    switch (mod(q, 4)) {
    case 3:
        e.row = PageEntry::Zero;
        break;
    case 0: {
        e.row = PageEntry::Vtilde;
        e.ca = s - q;
        e.cb = q - w;
        auto v = pi_vtilde0(p, e.ca, e.cb);
        e.layers = v.layers;
        e.flags = v.flags;
        e.provenance = v.citation;
        break;
    }
    case 1: {
        e.row = PageEntry::Mod2;
        e.ca = 2 * q - s - w;
        e.cb = q - w;
        auto g = coeff(p, Coeff::Z2, e.ca, e.cb);
        e.flags = g.flags;
        if (!g.is_zero())
            e.layers.push_back(layer_from(g, bideg("h", e.ca, e.cb)));
        e.provenance = kFig1Cite;
        break;
    }
    case 2: {
        e.row = PageEntry::Integral;
        e.ca = 2 * q - s - w;
        e.cb = q - w;
        auto g = coeff(p, Coeff::Z, e.ca, e.cb);
        e.flags = g.flags;
        if (!g.is_zero())
            e.layers.push_back(layer_from(g, bideg("H", e.ca, e.cb)));
        e.provenance = kFig1Cite;
        break;
    }
    }
    return e;
}

PageEntry e1_entry_KGL(const Profile& p, int s, int q, int w)
{
    PageEntry e;
    e.s = s;
    e.q = q;
    e.w = w;
    e.row = PageEntry::Integral;
    e.ca = 2 * q - s - w;
    e.cb = q - w;
    auto g = coeff(p, Coeff::Z, e.ca, e.cb);
    e.flags = g.flags;
    if (!g.is_zero())
        e.layers.push_back(layer_from(g, bideg("H", e.ca, e.cb)));
    e.provenance = kKGLCite;
    return e;
}

} // namespace kq

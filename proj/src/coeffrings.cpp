#include "kq/coeffrings.hpp"

#include "kq/arith.hpp"

#include <fstream>
#include <regex>

namespace kq {

Bidegree grade_convert(int t, int w) { return {t - w, w}; }

Bidegree gw_index(int t, int w) { return grade_convert(t - 2 * w, -w); }

/* ---------------- classes ---------------- */

CohClass CohClass::tau_rho(int a, int b)
{
    CohClass c;
    c.kind = TauRho;
    c.a = a;
    c.b = b;
    c.order = 2;
    c.s = b;
    c.w = a + b;
    return c;
}

CohClass CohClass::tau_eps(int a)
{
    CohClass c;
    c.kind = TauEps;
    c.a = a;
    c.order = 2;
    c.s = 1;
    c.w = a + 2;
    return c;
}

CohClass CohClass::gen(std::string label, const Int& order, int s, int w)
{
    CohClass c;
    c.kind = Gen;
    c.label = std::move(label);
    c.order = order;
    c.s = s;
    c.w = w;
    return c;
}

std::string CohClass::str() const
{
    auto pw = [](const char* x, int e) -> std::string {
        if (e == 0)
            return "";
        return e == 1 ? std::string(x) : std::string(x) + "^" + std::to_string(e);
    };
    switch (kind) {
    case TauRho: {
        std::string t = pw("tau", a), r = pw("rho", b);
        if (t.empty() && r.empty())
            return "1";
        return t + (t.empty() || r.empty() ? "" : "*") + r;
    }
    case TauEps: {
        std::string t = pw("tau", a);
        return t.empty() ? "taueps" : t + "*taueps";
    }
    case Gen:
        return label;
    }
    return label;
}

std::vector<Int> GroupWithBasis::orders() const
{
    std::vector<Int> o;
    for (const auto& c : basis)
        o.push_back(c.order);
    return o;
}

std::optional<size_t> GroupWithBasis::index_of(const CohClass& c) const
{
    for (size_t i = 0; i < basis.size(); ++i)
        if (basis[i] == c)
            return i;
    return std::nullopt;
}

json GroupWithBasis::to_json() const
{
    json b = json::array();
    for (const auto& c : basis)
        b.push_back({{"class", c.str()}, {"order", c.order == 0 ? json("Z") : json(c.order.get_str())}});
    json j{{"group", group.str()}, {"basis", b}};
    if (!flags.empty())
        j["flags"] = std::vector<std::string>(flags.begin(), flags.end());
    return j;
}

namespace {

GroupWithBasis make(std::vector<CohClass> basis)
{
    GroupWithBasis g;
    std::vector<Int> o;
    for (const auto& c : basis)
        o.push_back(c.order);
    g.group = Group::from_cyclics(o);
    g.basis = std::move(basis);
    return g;
}

std::string tag(const char* stem, int s, int w) { return std::string(stem) + std::to_string(s) + "_" + std::to_string(w); }

GroupWithBasis from_group(const Group& g, const std::string& stem, int s, int w)
{
    std::vector<CohClass> b;
    int k = 0;
    for (int i = 0; i < g.rank(); ++i)
        b.push_back(CohClass::gen(tag(stem.c_str(), s, w) + "#" + std::to_string(k++), 0, s, w));
    for (const auto& d : g.torsion())
        b.push_back(CohClass::gen(tag(stem.c_str(), s, w) + "#" + std::to_string(k++), d, s, w));
    return make(b);
}

Group mod_n(const Group& g, long n)
{
    std::vector<Int> o(g.rank(), Int(n));
    for (const auto& d : g.torsion())
        o.push_back(gcd(d, n));
    return Group::from_cyclics(o);
}

Group n_torsion(const Group& g, long n)
{
    std::vector<Int> o;
    for (const auto& d : g.torsion())
        o.push_back(gcd(d, n));
    return Group::from_cyclics(o);
}

Int ipow(const Int& q, int e)
{
    Int r;
    mpz_pow_ui(r.get_mpz_t(), q.get_mpz_t(), e);
    return r;
}

/* ---- integers ---- */

GroupWithBasis hz_integral(const Profile& p, int s, int w)
{
    GroupWithBasis g;
    if (s < 0 || w < 0)
        return g;
    if (s == 0)
        return w == 0 ? make({CohClass::gen("1", 0, 0, 0)}) : g;
    if (s == 1) {
        if (w == 0)
            return g;
        if (w == 1)
            return make({CohClass::gen(tag("e", 1, 1), 2, 1, 1)});
        if (w % 2)
            return make({CohClass::gen(tag("z", 1, w), 0, 1, w), CohClass::gen(tag("e", 1, w), 2, 1, w)});
        return make({CohClass::gen(tag("v", 1, w), uv_of_weight(w).v, 1, w)});
    }
    if (s == 2) {
        if (w % 2 == 0 && w > 0) {
            g = make({CohClass::gen(tag("u", 2, w), 2 * uv_of_weight(w).u, 2, w)});
            g.flags.insert(kConditional);
            if (p.cyclicity == CyclicityMode::TrackUncertain)
                g.flags.insert(kCyclicityUncertain);
            return g;
        }
        if (w % 2 == 1 && w > 3) {
            g.flags.insert(p.conjecture == ConjectureMode::TrackUnknown ? kUnknown : kConditional);
            return g;
        }
        return g;
    }
    if (s <= w && (w - s) % 2 == 0)
        return make({CohClass::gen(tag("g", s, w), 2, s, w)});
    return g;
}

GroupWithBasis hz_mod2(int s, int w, bool with_taueps)
{
    std::vector<CohClass> b;
    if (s >= 0 && s <= w)
        b.push_back(CohClass::tau_rho(w - s, s));
    if (with_taueps && s == 1 && w >= 2)
        b.push_back(CohClass::tau_eps(w - 2));
    return make(b);
}

/* ---- finite fields ---- */

GroupWithBasis fq_integral(const Profile& p, int s, int w)
{
    if (s == 0 && w == 0)
        return make({CohClass::gen("1", 0, 0, 0)});
    if (s == 1 && w >= 1) {
        Int o = ipow(p.q, w) - 1;
        if (o == 1)
            return {};
        return make({CohClass::gen(tag("H", 1, w), o, 1, w)});
    }
    return {};
}

GroupWithBasis fq_mod2(const Profile& p, int s, int w)
{
    bool odd = p.characteristic != 2;
    if (s == 0 && w == 0)
        return make({CohClass::tau_rho(0, 0)});
    if (!odd)
        return {};
    if (s == 0 && w >= 1)
        return make({CohClass::tau_rho(w, 0)});
    if (s == 1 && w >= 1)
        return make({CohClass::gen(tag("h", 1, w), 2, 1, w)});
    return {};
}

GroupWithBasis uct(const Profile& p, long n, int s, int w, GroupWithBasis (*integral)(const Profile&, int, int))
{
    Group g = direct_sum(mod_n(integral(p, s, w).group, n), n_torsion(integral(p, s + 1, w).group, n));
    return from_group(g, "h" + std::to_string(n) + "_", s, w);
}

/* ---- cd <= 2 tables ---- */

GroupWithBasis cd2_lookup(const Profile& p, const std::map<std::pair<int, int>, Group>& t, const char* table,
                          const char* stem, int s, int w)
{
    if (s < 0 || s > 2 || w < 0 || s > w)
        return {};
    auto it = t.find({s, w});
    if (it == t.end())
        throw MissingTableEntry(p.name + ": no " + table + " entry at (" + std::to_string(s) + ", " +
                                std::to_string(w) + ")");
    return from_group(it->second, stem, s, w);
}

GroupWithBasis integral(const Profile& p, int s, int w)
{
    switch (p.kind) {
    case ProfileKind::IntegersZ:
        return hz_integral(p, s, w);
    case ProfileKind::FiniteField:
        return fq_integral(p, s, w);
    case ProfileKind::CD2Field:
        return cd2_lookup(p, p.tH, "H", "H", s, w);
    case ProfileKind::RealsR:
        break;
    }
    throw MissingTableEntry(p.name + ": integral motivic cohomology is not finitely generated");
}

GroupWithBasis integral_plain(const Profile& p, int s, int w) { return integral(p, s, w); }

} // namespace

/* ---------------- profiles ---------------- */

std::string profile_kind_name(ProfileKind k)
{
    switch (k) {
    case ProfileKind::IntegersZ:
        return "IntegersZ";
    case ProfileKind::RealsR:
        return "RealsR";
    case ProfileKind::FiniteField:
        return "FiniteField";
    case ProfileKind::CD2Field:
        return "CD2Field";
    }
    return "?";
}

Profile profile_integers(ConjectureMode cm, CyclicityMode cy)
{
    Profile p;
    p.name = "Z";
    p.kind = ProfileKind::IntegersZ;
    p.conjecture = cm;
    p.cyclicity = cy;
    return p;
}

Profile profile_reals()
{
    Profile p;
    p.name = "R";
    p.kind = ProfileKind::RealsR;
    return p;
}

Profile profile_finite_field(const Int& q)
{
    Int ch;
    if (!is_prime_power(q, &ch))
        throw NotPrimePower(q.get_str() + " is not a prime power");
    Profile p;
    p.name = "F" + q.get_str();
    p.kind = ProfileKind::FiniteField;
    p.q = q;
    p.characteristic = ch;
    return p;
}

namespace {

std::string at_msg(const json& e)
{
    return "(" + (e.size() > 0 ? e[0].dump() : "?") + ", " + (e.size() > 1 ? e[1].dump() : "?") + ")";
}

} // namespace

Profile profile_cd2_from_json(const json& j)
{
    Profile p;
    p.kind = ProfileKind::CD2Field;
    p.name = j.value("name", std::string("cd2"));
    if (!j.contains("tables") || !j["tables"].is_object())
        throw ParseError("profile json needs a tables object");
    const json& t = j["tables"];
    auto load = [&](const char* key, std::map<std::pair<int, int>, Group>& out, bool two_torsion) {
        if (!t.contains(key))
            return;
        for (const auto& e : t[key]) {
            if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer())
                throw ParseError(std::string("malformed ") + key + " entry at " + at_msg(e));
            int s = e[0].get<int>(), w = e[1].get<int>();
            Group g;
            try {
                g = Group::from_json(e[2]);
            } catch (const std::exception& ex) {
                throw ParseError(std::string("malformed ") + key + " entry at " + at_msg(e) + ": " + ex.what());
            }
            if (s > 2 && !g.is_zero())
                throw ParseError(std::string(key) + " entry at " + at_msg(e) + " violates cd <= 2");
            if (two_torsion && (g.rank() > 0 || std::any_of(g.torsion().begin(), g.torsion().end(),
                                                              [](const Int& d) { return d != 2; })))
                throw ParseError(std::string(key) + " entry at " + at_msg(e) + " is not an F_2-vector space");
            out[{s, w}] = g;
        }
    };
    load("H", p.tH, false);
    load("h2", p.th2, true);
    load("h3", p.th3, false);
    if (t.contains("kmw"))
        for (const auto& e : t["kmw"]) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer())
                throw ParseError("malformed kmw entry at " + e.dump());
            int w = e[0].get<int>();
            Group g;
            try {
                g = Group::from_json(e[1]);
            } catch (const std::exception& ex) {
                throw ParseError("malformed kmw entry at w=" + std::to_string(w) + ": " + ex.what());
            }
            if (w >= 3 && !g.is_zero())
                throw ParseError("kmw entry at w=" + std::to_string(w) + " violates I^3 = 0");
            p.tkmw[w] = g;
        }
    return p;
}

Profile load_cd2_profile(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open profile " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    return profile_cd2_from_json(j);
}

Profile profile_by_name(const std::string& name)
{
    if (name == "Z" || name == "ZZ" || name == "integers")
        return profile_integers();
    if (name == "R" || name == "reals")
        return profile_reals();
    static const std::regex fq(R"(F_?\{?(\d+)\}?)");
    std::smatch m;
    if (std::regex_match(name, m, fq))
        return profile_finite_field(Int(m[1].str()));
    return load_cd2_profile(name);
}

/* ---------------- coefficient groups ---------------- */

GroupWithBasis coeff(const Profile& p, Coeff c, int s, int w)
{
    switch (c) {
    case Coeff::Z:
        return integral(p, s, w);
    case Coeff::Z2:
        switch (p.kind) {
        case ProfileKind::IntegersZ:
            return hz_mod2(s, w, true);
        case ProfileKind::RealsR:
            return hz_mod2(s, w, false);
        case ProfileKind::FiniteField:
            return fq_mod2(p, s, w);
        case ProfileKind::CD2Field:
            return cd2_lookup(p, p.th2, "h2", "h", s, w);
        }
        break;
    case Coeff::Z3:
        switch (p.kind) {
        case ProfileKind::IntegersZ:
        case ProfileKind::FiniteField:
            return uct(p, 3, s, w, &integral_plain);
        case ProfileKind::CD2Field:
            return cd2_lookup(p, p.th3, "h3", "k", s, w);
        case ProfileKind::RealsR:
            break;
        }
        break;
    }
    throw MissingTableEntry(p.name + ": coefficient system not available");
}

Group kmw(const Profile& p, int b)
{
    switch (p.kind) {
    case ProfileKind::IntegersZ:
        return b == 0 ? Group::free(2) : Group::free(1);
    case ProfileKind::RealsR:
        if (b <= 0)
            return b == 0 ? Group::free(2) : Group::free(1);
        throw MissingTableEntry("R: K^MW in positive degree is not finitely generated");
    case ProfileKind::FiniteField: {
        bool odd = p.characteristic != 2;
        if (b == 0)
            return odd ? Group::from_cyclics({0, 2}) : Group::free(1);
        if (b == 1)
            return Group::cyclic(p.q - 1);
        if (b >= 2)
            return Group();
        if (!odd)
            return Group::cyclic(2);
        return p.q % 4 == 3 ? Group::cyclic(4) : Group::from_cyclics({2, 2});
    }
    case ProfileKind::CD2Field: {
        auto it = p.tkmw.find(b);
        if (it != p.tkmw.end())
            return it->second;
        if (b >= 3)
            return Group();
        throw MissingTableEntry(p.name + ": no kmw entry at w=" + std::to_string(b));
    }
    }
    return Group();
}

std::vector<Layer> kmw_layers(const Profile& p, int b)
{
    if (p.is_field() && b >= 1) {
        // 0 -> I^{b+1} -> K^MW_b -> K^M_b -> 0 with I^{b+1} = h^{b+1,b+1} once I^3 = 0
        std::vector<Layer> out;
        auto km = coeff(p, Coeff::Z, b, b);
        auto ib = coeff(p, Coeff::Z2, b + 1, b + 1);
        if (!km.group.is_zero())
            out.push_back({km.group, "H^{" + std::to_string(b) + "," + std::to_string(b) + "}", km.flags});
        if (!ib.group.is_zero())
            out.push_back({ib.group, "h^{" + std::to_string(b + 1) + "," + std::to_string(b + 1) + "}", ib.flags});
        return out;
    }
    Group g = kmw(p, b);
    if (g.is_zero())
        return {};
    return {{g, "K^MW_" + std::to_string(b), {}}};
}

/* ---------------- operations ---------------- */

std::optional<CohClass> steenrod(const Profile& p, int op, const CohClass& c)
{
    if (p.kind != ProfileKind::IntegersZ && p.kind != ProfileKind::RealsR)
        throw WrongCoefficients("steenrod: only the built-in Z and R mod 2 rings carry named monomials");
    if (c.kind == CohClass::Gen)
        throw WrongCoefficients("steenrod: class " + c.str() + " is not a mod 2 class");
    if (c.kind == CohClass::TauEps)
        return std::nullopt;
    if (op == 2) {
        if (c.a % 4 == 2 || c.a % 4 == 3)
            return CohClass::tau_rho(c.a - 1, c.b + 2);
        return std::nullopt;
    }
    if (op == 1) {
        // Sq1 tau = rho, Sq1 rho = 0, Cartan
        if (c.a % 2 == 1)
            return CohClass::tau_rho(c.a - 1, c.b + 1);
        return std::nullopt;
    }
    throw WrongCoefficients("steenrod: only Sq1 and Sq2");
}

namespace {

bool named_mod2(const Profile& p) { return p.kind == ProfileKind::IntegersZ || p.kind == ProfileKind::RealsR; }

IntMatrix op_matrix(const Profile& p, int op, int s, int w, int ds, int dw)
{
    auto src = coeff(p, Coeff::Z2, s, w);
    auto tgt = coeff(p, Coeff::Z2, s + ds, w + dw);
    IntMatrix m(tgt.basis.size(), src.basis.size());
    if (src.is_zero() || tgt.is_zero())
        return m;
    if (!named_mod2(p)) {
        // fields: the only source/target pairs that survive are h^0 -> h^2; cd <= 1 kills them
        if (p.kind == ProfileKind::FiniteField)
            return m;
        throw WrongCoefficients(p.name + ": Steenrod action on table-driven classes is not specified");
    }
    for (size_t j = 0; j < src.basis.size(); ++j) {
        auto img = steenrod(p, op, src.basis[j]);
        if (!img)
            continue;
        auto i = tgt.index_of(*img);
        if (!i)
            throw std::logic_error("steenrod image outside basis: " + img->str());
        m(*i, j) = 1;
    }
    return m;
}

} // namespace

IntMatrix sq2_matrix(const Profile& p, int s, int w) { return op_matrix(p, 2, s, w, 2, 1); }
IntMatrix sq1_matrix(const Profile& p, int s, int w) { return op_matrix(p, 1, s, w, 1, 0); }

IntMatrix pr_matrix(const Profile& p, int s, int w)
{
    auto H = coeff(p, Coeff::Z, s, w);
    auto h = coeff(p, Coeff::Z2, s, w);
    IntMatrix m(h.basis.size(), H.basis.size());
    if (H.is_zero() || h.is_zero())
        return m;
    auto put = [&](size_t j, const CohClass& c) {
        auto i = h.index_of(c);
        if (!i)
            throw std::logic_error("pr image outside basis: " + c.str());
        m(*i, j) = 1;
    };
    if (p.kind == ProfileKind::IntegersZ) {
        for (size_t j = 0; j < H.basis.size(); ++j) {
            if (s == 0)
                put(j, CohClass::tau_rho(0, 0));
            else if (s == 1) {
                if (w == 1)
                    put(j, CohClass::tau_rho(0, 1));
                else if (w % 2 == 1)
                    put(j, j == 0 ? CohClass::tau_eps(w - 2) : CohClass::tau_rho(w - 1, 1));
                else
                    put(j, CohClass::tau_eps(w - 2));
            } else if (s == 2)
                put(j, CohClass::tau_rho(w - 2, 2));
            else
                put(j, CohClass::tau_rho(w - s, s));
        }
        return m;
    }
    if (p.kind == ProfileKind::FiniteField) {
        // reduction of a generator is nonzero whenever h is nonzero here
        for (size_t j = 0; j < H.basis.size(); ++j)
            m(0, j) = 1;
        return m;
    }
    throw WrongCoefficients(p.name + ": reduction map on table-driven classes is not specified");
}

IntMatrix bockstein_matrix(const Profile& p, int s, int w)
{
    auto h = coeff(p, Coeff::Z2, s, w);
    auto H = coeff(p, Coeff::Z, s + 1, w);
    IntMatrix m(H.basis.size(), h.basis.size());
    if (H.is_zero() || h.is_zero())
        return m;
    if (p.kind == ProfileKind::IntegersZ) {
        for (size_t j = 0; j < h.basis.size(); ++j) {
            const auto& c = h.basis[j];
            if (s == 0) {
                if (w == 1)
                    m(0, j) = 1;
                else if (w % 2 == 1)
                    m(1, j) = 1;
                else
                    m(0, j) = H.basis[0].order / 2;
            } else if (s == 1) {
                if (w % 2 == 0 && c == CohClass::tau_rho(w - 1, 1))
                    m(0, j) = H.basis[0].order / 2;
            } else if (s == 2) {
                if (w % 2 == 1)
                    m(0, j) = 1;
            } else if ((w - s) % 2 != 0) {
                m(0, j) = 1;
            }
        }
        return m;
    }
    if (p.kind == ProfileKind::FiniteField) {
        // d tau^w = 2-torsion generator of H^{1,w}
        if (s == 0)
            for (size_t j = 0; j < h.basis.size(); ++j)
                m(0, j) = H.basis[0].order / 2;
        return m;
    }
    throw WrongCoefficients(p.name + ": Bockstein on table-driven classes is not specified");
}

IntMatrix sq2pr_matrix(const Profile& p, int s, int w)
{
    auto H = coeff(p, Coeff::Z, s, w);
    auto tgt = coeff(p, Coeff::Z2, s + 2, w + 1);
    if (H.is_zero() || tgt.is_zero() || p.is_field())
        return IntMatrix(tgt.basis.size(), H.basis.size());
    IntMatrix m = sq2_matrix(p, s, w) * pr_matrix(p, s, w);
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j)
            m(i, j) = m(i, j) % 2;
    return m;
}

bool Hom::is_zero() const
{
    for (size_t j = 0; j < m.cols(); ++j)
        for (size_t i = 0; i < m.rows(); ++i)
            if (tgt.basis[i].order == 0 ? m(i, j) != 0
                                         : !mpz_divisible_p(m(i, j).get_mpz_t(), tgt.basis[i].order.get_mpz_t()))
                return false;
    return true;
}

Group Hom::kernel() const { return subquotient(src.orders(), IntMatrix(src.basis.size(), 0), m, tgt.orders()); }

Group Hom::image() const { return kq::image(src.orders(), m, tgt.orders()); }

Group Hom::cokernel() const { return subquotient(tgt.orders(), m, IntMatrix(0, tgt.basis.size()), {}); }

Hom theta(const Profile& p, int s, int w)
{
    Hom h;
    h.src = coeff(p, Coeff::Z, s, w);
    h.tgt = coeff(p, Coeff::Z, s + 3, w + 1);
    h.m = IntMatrix(h.tgt.basis.size(), h.src.basis.size());
    if (h.src.is_zero() || h.tgt.is_zero())
        return h;
    IntMatrix mid = sq2pr_matrix(p, s, w);
    h.m = bockstein_matrix(p, s + 2, w + 1) * mid;
    return h;
}

int rational_rank(const Profile& p, int s, int w)
{
    switch (p.kind) {
    case ProfileKind::IntegersZ:
        if (s == 0 && w == 0)
            return 1;
        return s == 1 && w >= 3 && w % 2 == 1 ? 1 : 0;
    case ProfileKind::FiniteField:
        return s == 0 && w == 0 ? 1 : 0;
    case ProfileKind::CD2Field:
        return coeff(p, Coeff::Z, s, w).group.rank();
    case ProfileKind::RealsR:
        break;
    }
    throw MissingTableEntry(p.name + ": rational ranks not tabulated");
}

int witt_rational_rank(const Profile& p)
{
    switch (p.kind) {
    case ProfileKind::IntegersZ:
    case ProfileKind::RealsR:
        return 1;
    case ProfileKind::FiniteField:
        return 0;
    case ProfileKind::CD2Field:
        return kmw(p, -1).rank();
    }
    return 0;
}

std::optional<CohClass> to_reals(const CohClass& c)
{
    if (c.kind == CohClass::TauRho)
        return c;
    return std::nullopt;
}

} // namespace kq

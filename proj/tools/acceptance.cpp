#include "kq/arith.hpp"
#include "kq/ktables.hpp"

#include <chrono>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace kq;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_time(double s)
{
    std::ostringstream o;
    o.precision(3);
    o << std::fixed << s << " s";
    return o.str();
}

Outcome criterion1()
{
    auto t0 = std::chrono::steady_clock::now();
    GoldenReport r = golden_verify("coeff-KQZ");
    double dt = seconds_since(t0);
    std::ostringstream o;
    o << r.count("equal") << "/" << r.cells.size() << " cells equal";
    for (const auto& c : r.cells)
        if (c.status == "mismatch")
            o << "; mismatch at (s=" << c.entry.s << ", w=" << c.entry.w << "): table " << c.expected << ", computed "
              << c.actual;
    o << "; " << fmt_time(dt);
    return {r.count("mismatch") == 0 && r.count("equal") == int(r.cells.size()) && dt < 10, o.str()};
}

Outcome criterion2()
{
    auto t0 = std::chrono::steady_clock::now();
    GoldenReport r = golden_verify("coeff-KW");
    bool indep = true;
    for (int s = -8; s <= 24; ++s)
        for (int w = -8; w <= 24; ++w)
            indep = indep && kw_groups_Z(s, w) == kw_groups_Z(s, 0);
    KWElement xi = KWElement::xi();
    bool ring = xi.scaled(2).is_zero() && (xi * xi).is_zero() && !xi.is_zero();
    double dt = seconds_since(t0);
    std::ostringstream o;
    o << r.count("equal") << "/" << r.cells.size() << " cells equal; w-independent " << (indep ? "yes" : "no")
      << "; 2xi = 0 and xi^2 = 0 " << (ring ? "hold" : "fail") << "; " << fmt_time(dt);
    return {r.ok() && r.count("equal") == int(r.cells.size()) && indep && ring && dt < 1, o.str()};
}

Outcome criterion3()
{
    std::vector<std::pair<int, Group>> want = {
        {0, Group::free(1)},       {1, Group::cyclic(2)},    {2, Group::cyclic(2)},  {3, Group::cyclic(48)},
        {5, Group::free(1)},       {7, Group::cyclic(240)},  {11, Group::cyclic(1008)}, {13, Group::free(1)}};
    bool ok = true;
    std::ostringstream o;
    for (const auto& [n, g] : want) {
        Group k = kgl_groups_Z(n);
        if (k != g) {
            ok = false;
            o << "K_" << n << " = " << k.str() << " (want " << g.str() << "); ";
        }
    }
    for (int n = 0; n <= 23; ++n)
        kgl_groups_Z(n);
    // the extensions at n = 3 mod 8 are nontrivial: cyclic of order 2 |H^{1,.}|
    for (int n : {3, 11, 19}) {
        Group k = kgl_groups_Z(n);
        Int v = uv_of_weight((n + 1) / 2).v;
        if (!(k.is_cyclic() && k.order() == 2 * v)) {
            ok = false;
            o << "K_" << n << " = " << k.str() << " is not the nontrivial extension; ";
        }
    }
    Group k23 = kgl_groups_Z(23), k22 = kgl_groups_Z(22);
    bool d65520 = k23.is_finite() && k23.order() % 65520 == 0;
    bool d691 = k23.is_finite() && k23.order() % 691 == 0;
    o << "K_23 = " << k23.str() << " (65520 | order: " << (d65520 ? "yes" : "no")
      << ", 691 | order: " << (d691 ? "yes" : "no") << "); K_22 = " << k22.str() << " carries u(12) = "
      << uv_of_weight(12).u.get_str();
    return {ok && d65520 && d691, o.str()};
}

Outcome criterion4()
{
    bool ok = true;
    std::ostringstream o;
    for (auto n : {"finite-fields-q3", "finite-fields-q5", "finite-fields-q9", "finite-fields-q2", "finite-fields-q4"}) {
        GoldenReport r = golden_verify(n);
        bool good = r.ok() && r.count("equal") == int(r.cells.size());
        ok = ok && good;
        o << std::string(n).substr(14) << " " << r.count("equal") << "/" << r.cells.size() << "; ";
    }
    ResultTable f2t = kq_groups(profile_finite_field(2), 1, 1, 0);
    const TableCell* c = f2t.find(1, 0);
    bool f2 = c && c->group && c->group->is_zero();
    o << "KQ_{1,0}(F_2) = " << (c && c->group ? c->group->str() : "?");
    return {ok && f2, o.str()};
}

Outcome criterion5()
{
    Profile p = resolve_profile("cd2-synthetic");
    bool cert = true;
    for (int w = 0; w <= 3; ++w) {
        Page e2 = apply_first_differential(build_page1_auto(p, w, 1 + w, 16 + w));
        CollapseReport rep = certify_collapse(e2);
        cert = cert && rep.certified && rep.page == 1;
    }
    GoldenReport r = golden_verify("KQn0");
    ResultTable t = kq_groups(p, 1, 19, std::vector<int>{0, 1, 2, 3});
    int amb = 0;
    bool no_guess = true;
    for (const auto& c : t.cells)
        if (c.status == TableCell::Ambiguous) {
            ++amb;
            no_guess = no_guess && !c.group;
        }
    std::ostringstream o;
    o << "page-1 certificates " << (cert ? "all" : "missing") << "; shape " << r.count("equal") << "/"
      << r.cells.size() << "; " << amb << " extension cells Ambiguous without a guessed group";
    return {cert && r.ok() && r.count("equal") == int(r.cells.size()) && no_guess && amb > 0, o.str()};
}

std::optional<Group> lookup(const ResultTable& t, int s, int w)
{
    int w0 = ((w % 4) + 4) % 4;
    const TableCell* c = t.find(s - (w - w0), w0);
    if (!c)
        throw MissingBidegree("KQ(" + std::to_string(s) + "," + std::to_string(w) + ")");
    return c->group;
}

Outcome criterion6()
{
    ResultTable t = kq_groups(profile_integers(), -12, 28, std::vector<int>{0, 1, 2, 3});
    auto kgl = [](int n) -> std::optional<Group> { return kgl_groups_Z(n); };
    bool ok = true;
    int checked = 0;
    std::ostringstream o;
    for (int w = 0; w <= 3; ++w) {
        WoodReport r = wood_consistency([&](int s, int ww) { return lookup(t, s, ww); }, kgl, w, -4, 20);
        checked += int(r.per_s.size());
        for (const auto& v : r.per_s)
            if (v.verdict == "inconsistent") {
                ok = false;
                o << "inconsistent at w=" << w << " s=" << v.s << "; ";
            }
    }
    ResultTable bad = t;
    for (auto& c : bad.cells)
        if (c.s == 7 && c.w == 2)
            c.group = Group::cyclic(3);
    bool caught = false;
    for (int w : {2, 3}) {
        WoodReport r = wood_consistency([&](int s, int ww) { return lookup(bad, s, ww); }, kgl, w, -4, 20);
        for (const auto& v : r.per_s)
            caught = caught || (v.verdict == "inconsistent" && (v.s == 7 || v.s == 8));
    }
    o << checked << " (w, s) positions checked; mutation Z/3 at (7,2) " << (caught ? "caught" : "missed");
    return {ok && caught, o.str()};
}

bool snf_suite(std::string& why)
{
    std::mt19937 rng(20240611);
    std::uniform_int_distribution<size_t> dim(1, 6);
    std::uniform_int_distribution<long> ent(-50, 50);
    for (int trial = 0; trial < 1000; ++trial) {
        size_t r = dim(rng), c = dim(rng);
        IntMatrix a(r, c);
        for (size_t i = 0; i < r; ++i)
            for (size_t j = 0; j < c; ++j)
                a(i, j) = ent(rng);
        SNF f = smith(a);
        IntMatrix d = f.U * a * f.V;
        for (size_t i = 0; i < r; ++i)
            for (size_t j = 0; j < c; ++j)
                if (d(i, j) != ((i == j && i < f.diag.size()) ? f.diag[i] : Int(0))) {
                    why = "UAV != D on trial " + std::to_string(trial);
                    return false;
                }
        for (size_t i = 0; i + 1 < f.diag.size(); ++i)
            if (f.diag[i + 1] % f.diag[i] != 0) {
                why = "divisibility chain on trial " + std::to_string(trial);
                return false;
            }
        if (!(f.U * f.Uinv == IntMatrix::identity(r))) {
            why = "U not unimodular on trial " + std::to_string(trial);
            return false;
        }
    }
    return true;
}

Group total(const PageEntry& e)
{
    Group g;
    for (const auto& l : e.layers)
        g = direct_sum(g, l.group);
    return g;
}

bool page_suite(std::string& why, int& pages)
{
    std::vector<Profile> ps = {profile_integers(), profile_by_name("F3"), profile_by_name("F5"), profile_by_name("F9"),
                               profile_by_name("F2"), profile_by_name("F4"), resolve_profile("cd2-synthetic")};
    for (const auto& p : ps)
        for (SpecTheory th : {SpecTheory::KQ, SpecTheory::KGL})
            for (int w = 0; w <= (th == SpecTheory::KQ ? 7 : 0); ++w) {
                Page e1 = build_page1_auto(p, w, -8, 24, th);
                ++pages;
                if (!check_d_squared(e1).empty()) {
                    why = "d1 d1 != 0 on " + p.name + " weight " + std::to_string(w);
                    return false;
                }
                Page e2 = apply_first_differential(e1);
                for (const auto& [c, e] : e2.cells) {
                    Group g1 = total(*e1.find(c.s, c.q)), g2 = total(e);
                    bool bad = g2.rank() > g1.rank() || (g1.is_finite() && (!g2.is_finite() || g1.order() % g2.order() != 0));
                    if (bad) {
                        why = "subquotient law at " + p.name + " (" + std::to_string(c.s) + "," + std::to_string(c.q) + ")";
                        return false;
                    }
                }
            }
    return true;
}

bool alpha_suite(std::string& why)
{
    Profile z = profile_integers();
    for (int w = 0; w <= 3; ++w) {
        Page a = apply_first_differential(build_page1_auto(z, w, -8, 20));
        Page b = apply_first_differential(build_page1_auto(z, w + 4, -4, 24));
        CollapseReport ra = certify_collapse(a), rb = certify_collapse(b);
        for (int s = -8; s <= 20; ++s) {
            auto x = assemble_column(a, ra, s).result.group, y = assemble_column(b, rb, s + 4).result.group;
            if (!x || !y || *x != *y) {
                why = "alpha periodicity at (" + std::to_string(s) + "," + std::to_string(w) + ")";
                return false;
            }
        }
    }
    return true;
}

bool vsc_suite(std::string& why)
{
    for (int n = 2; n <= 40; n += 2) {
        Int prod = 1;
        for (int p = 2; p <= n + 1; ++p) {
            bool prime = true;
            for (int d = 2; d * d <= p; ++d)
                prime = prime && p % d != 0;
            if (prime && n % (p - 1) == 0)
                prod *= p;
        }
        if (bernoulli(n).get_den() != prod) {
            why = "von Staudt-Clausen at n = " + std::to_string(n);
            return false;
        }
    }
    return true;
}

bool kernel_suite(std::string& why)
{
    Profile z = profile_integers(), r = profile_reals();
    for (int s = -2; s <= 12; ++s)
        for (int w = -2; w <= 14; ++w) {
            auto hz = coeff(z, Coeff::Z2, s, w), hr = coeff(r, Coeff::Z2, s, w);
            int kernel = 0;
            std::set<std::string> hit;
            for (const auto& c : hz.basis) {
                auto img = to_reals(c);
                if (!img)
                    ++kernel;
                else if (hr.index_of(*img))
                    hit.insert(img->str());
            }
            if (hit.size() != hr.basis.size() || kernel != ((s == 1 && w > 1) ? 1 : 0)) {
                why = "h(Z) -> h(R) at (" + std::to_string(s) + "," + std::to_string(w) + ")";
                return false;
            }
        }
    return true;
}

Outcome criterion7()
{
    auto t0 = std::chrono::steady_clock::now();
    std::string why;
    int pages = 0;
    bool ok = snf_suite(why) && page_suite(why, pages) && alpha_suite(why) && vsc_suite(why) && kernel_suite(why);
    double dt = seconds_since(t0);
    std::ostringstream o;
    if (ok)
        o << "1000 SNF matrices, " << pages << " pages (d1 d1 = 0, subquotient law), alpha periodicity on w 0..3 x s -8..20, "
          << "von Staudt-Clausen n <= 40, h(Z) -> h(R) kernel law; " << fmt_time(dt);
    else
        o << why << "; " << fmt_time(dt);
    return {ok && dt < 30, o.str()};
}

Outcome criterion8()
{
    Profile z = profile_integers();
    ResultTable t = kq_groups(z, -8, 24, std::vector<int>{0, 1, 2, 3});
    int agree = 0;
    std::ostringstream o;
    for (const auto& c : t.cells) {
        int d = kq_rational(z, c.s + c.w, c.w).dimension;
        if (c.group && d == c.group->rank())
            ++agree;
        else
            o << "(s=" << c.s << ", w=" << c.w << ") rational " << d << "; ";
    }
    o << agree << "/" << t.cells.size() << " bidegrees agree";
    return {agree == int(t.cells.size()), o.str()};
}

} // namespace

int main(int argc, char** argv)
{
    // default: print every criterion and exit 0; --criterion N gates on one criterion
    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc)
            only = std::atoi(argv[++i]);
    std::vector<std::function<Outcome()>> cs = {criterion1, criterion2, criterion3, criterion4,
                                                criterion5, criterion6, criterion7, criterion8};
    if (only < 0 || only > int(cs.size())) {
        std::cerr << "--criterion: expected 1.." << cs.size() << "\n";
        return 2;
    }
    int failed = 0;
    for (int i = 1; i <= int(cs.size()); ++i) {
        if (only && i != only)
            continue;
        Outcome r;
        try {
            r = cs[i - 1]();
        } catch (const std::exception& e) {
            r = {false, std::string("error: ") + e.what()};
        }
        if (!r.pass)
            ++failed;
        std::cout << "criterion " << i << ": " << (r.pass ? "PASS" : "FAIL") << " - " << r.detail << std::endl;
    }
    return only && failed ? 1 : 0;
}

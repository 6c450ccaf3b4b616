#include "kq/arith.hpp"
#include "kq/ktables.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <unistd.h>

using namespace kq;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Refusal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string base = "Z";
    std::string theory = "kq";
    std::vector<int> weights;
    std::string range = "-8..24";
    std::string page = "abutment";
    std::string format = "table";
    std::string conjecture = "assume";
    std::string cyclicity = "assume";
    std::string output;
    bool allow_partial = false;
};

std::pair<int, int> parse_range(const std::string& r)
{
    static const std::regex re(R"(\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*)");
    std::smatch m;
    if (!std::regex_match(r, m, re))
        throw UsageError("--range: expected a..b, got '" + r + "'");
    int a = std::stoi(m[1]), b = std::stoi(m[2]);
    if (a > b)
        throw UsageError("--range: empty range " + r);
    if (b - a > 400)
        throw UsageError("--range: at most 400 columns");
    return {a, b};
}

void emit(const std::string& text, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    // write next to the target, then rename over it
    std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw UsageError("--output: cannot write " + path);
        out << text;
        if (!out.flush())
            throw UsageError("--output: write failed for " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw UsageError("--output: cannot rename onto " + path);
    }
}

Profile config_profile(const RunConfig& c)
{
    ConjectureMode cm = c.conjecture == "track" ? ConjectureMode::TrackUnknown : ConjectureMode::AssumeVanishing;
    CyclicityMode cy = c.cyclicity == "track" ? CyclicityMode::TrackUncertain : CyclicityMode::AssumeCyclic;
    try {
        return resolve_profile(c.base, cm, cy);
    } catch (const std::exception& e) {
        throw UsageError(std::string("--base: ") + e.what());
    }
}

void refuse_unresolved(const ResultTable& t, bool allow_partial)
{
    if (allow_partial)
        return;
    for (const auto& c : t.cells)
        if (c.status != TableCell::Ok)
            throw Refusal("cell (s=" + std::to_string(c.s) + ", w=" + std::to_string(c.w) + ") is " +
                          cell_status_name(c.status) + ": " + (c.note.empty() ? c.group_text() : c.note) +
                          " (use --allow-partial to emit it with a marker)");
}

std::string render_table(const ResultTable& t, const std::string& fmt)
{
    if (fmt == "table")
        return t.to_text();
    if (fmt == "csv")
        return t.to_csv();
    if (fmt == "json")
        return t.to_json().dump(2) + "\n";
    throw UsageError("--format: " + fmt + " is not available for the abutment (use table, csv or json)");
}

int run_pages(const RunConfig& c, const Profile& p, int a, int b)
{
    if (c.theory != "kq" && c.theory != "kgl")
        throw UsageError("--theory: pages exist for kq and kgl only");
    SpecTheory th = c.theory == "kq" ? SpecTheory::KQ : SpecTheory::KGL;
    if (c.format == "svg" && c.weights.size() != 1)
        throw UsageError("--format svg: give exactly one --weight");
    std::string out;
    json pages = json::array();
    for (int w : c.weights) {
        Page e1 = build_page1_auto(p, w, a, b, th);
        Page shown = e1;
        json collapse;
        if (c.page != "E1") {
            Page e2 = apply_first_differential(e1);
            CollapseReport rep = certify_collapse(e2);
            collapse = rep.to_json();
            if (c.page == "Einf" && !rep.certified && !c.allow_partial)
                throw Refusal("E-infinity page in weight " + std::to_string(w) +
                              " is not certified: " + rep.unresolved.front());
            shown = rep.page <= 1 && c.page == "Einf" ? e1 : e2;
        }
        if (c.format == "json") {
            json j = shown.to_json();
            if (!collapse.is_null())
                j["collapse"] = collapse;
            if (c.page == "Einf")
                j["page"] = "Einf";
            pages.push_back(j);
        } else if (c.format == "svg")
            out += render_svg(shown);
        else if (c.format == "text-chart" || c.format == "table")
            out += render_text_chart(shown) + "\n";
        else
            throw UsageError("--format: " + c.format + " is not available for pages (use text-chart, svg or json)");
    }
    if (c.format == "json")
        out = (pages.size() == 1 ? pages[0] : pages).dump(2) + "\n";
    emit(out, c.output);
    return 0;
}

int run(const RunConfig& c)
{
    auto [a, b] = parse_range(c.range);
    std::vector<int> weights = c.weights;
    if (weights.empty())
        throw UsageError("--weight: give at least one weight");
    if (c.page != "abutment") {
        Profile p = config_profile(c);
        return run_pages(c, p, a, b);
    }
    ResultTable t;
    if (c.theory == "kw") {
        if (c.base != "Z")
            throw UsageError("--theory kw: only --base Z is supported");
        t = kw_table_Z(a, b, weights);
    } else {
        Profile p = config_profile(c);
        if (c.theory == "kq")
            t = kq_groups(p, a, b, weights);
        else if (c.theory == "kgl") {
            ResultTable all;
            for (int w : weights) {
                ResultTable one = kgl_groups(p, a, b, w);
                all.base = one.base;
                all.theory = one.theory;
                all.cells.insert(all.cells.end(), one.cells.begin(), one.cells.end());
            }
            t = all;
        } else if (c.theory == "rational")
            t = kq_rational_table(p, a, b, weights);
        else
            throw UsageError("--theory: unknown theory " + c.theory);
    }
    refuse_unresolved(t, c.allow_partial);
    emit(render_table(t, c.format), c.output);
    return 0;
}

void add_run_options(CLI::App* sub, RunConfig& c)
{
    sub->add_option("--base", c.base, "Z, R, F<q>, cd2-synthetic or a profile JSON path");
    sub->add_option("--theory", c.theory, "kq, kgl, kw or rational")
        ->check(CLI::IsMember({"kq", "kgl", "kw", "rational"}));
    sub->add_option("--weight", c.weights, "weight(s); repeat or comma separate")->delimiter(',');
    sub->add_option("--range", c.range, "column range a..b");
    sub->add_option("--page", c.page, "E1, E2, Einf or abutment")
        ->check(CLI::IsMember({"E1", "E2", "Einf", "abutment"}));
    sub->add_option("--format", c.format, "table, csv, json, svg or text-chart")
        ->check(CLI::IsMember({"table", "csv", "json", "svg", "text-chart"}));
    sub->add_option("--conjecture", c.conjecture, "assume or track")->check(CLI::IsMember({"assume", "track"}));
    sub->add_option("--cyclicity", c.cyclicity, "assume or track")->check(CLI::IsMember({"assume", "track"}));
    sub->add_option("--output,-o", c.output, "output file (default stdout)");
    sub->add_flag("--allow-partial", c.allow_partial, "emit ambiguous or uncertified cells with markers");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"exact calculator for hermitian, algebraic and Witt K-groups via slice spectral sequences"};
    app.require_subcommand(1);

    RunConfig compute_cfg, chart_cfg;
    chart_cfg.page = "E1";
    chart_cfg.format = "text-chart";
    auto* compute = app.add_subcommand("compute", "compute groups or pages");
    add_run_options(compute, compute_cfg);
    auto* chart = app.add_subcommand("chart", "draw a page of the spectral sequence");
    add_run_options(chart, chart_cfg);

    std::string golden = "all", verify_format = "text", verify_out, verify_conj = "assume", verify_cyc = "assume";
    auto* verify = app.add_subcommand("verify", "compare against the embedded paper tables");
    verify->add_option("--golden", golden, "set name or all");
    verify->add_option("--format", verify_format, "text or json")->check(CLI::IsMember({"text", "json"}));
    verify->add_option("--conjecture", verify_conj, "assume or track")->check(CLI::IsMember({"assume", "track"}));
    verify->add_option("--cyclicity", verify_cyc, "assume or track")->check(CLI::IsMember({"assume", "track"}));
    verify->add_option("--output,-o", verify_out, "output file");

    int bn = 0;
    std::string bn_range;
    auto* bern = app.add_subcommand("bernoulli", "Bernoulli numbers B_n (B_1 = -1/2)");
    bern->add_option("--n", bn, "index");
    bern->add_option("--range", bn_range, "index range a..b");

    int uvw = 1;
    auto* uv = app.add_subcommand("uv", "u(w)/v(w) = |B_w|/(2w) in lowest terms, w even");
    uv->add_option("--w", uvw, "weight, even and positive")->required();

    std::string profile_file;
    auto* pv = app.add_subcommand("profile-validate", "check a cd <= 2 profile file");
    pv->add_option("--file", profile_file, "profile JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*compute)
            return run(compute_cfg);
        if (*chart) {
            if (chart_cfg.page == "abutment")
                throw UsageError("--page: chart draws E1, E2 or Einf");
            return run(chart_cfg);
        }
        if (*verify) {
            GoldenOptions opt;
            opt.conjecture = verify_conj == "track" ? ConjectureMode::TrackUnknown : ConjectureMode::AssumeVanishing;
            opt.cyclicity = verify_cyc == "track" ? CyclicityMode::TrackUncertain : CyclicityMode::AssumeCyclic;
            std::vector<std::string> names =
                golden == "all" ? golden_set_names() : std::vector<std::string>{golden};
            bool ok = true;
            std::string text;
            json all = json::array();
            for (const auto& n : names) {
                GoldenReport r;
                try {
                    r = golden_verify(n, opt);
                } catch (const UnknownGoldenSet& e) {
                    throw UsageError(std::string("--golden: ") + e.what());
                }
                ok = ok && r.ok();
                text += r.to_text();
                all.push_back(r.to_json());
            }
            emit(verify_format == "json" ? (all.size() == 1 ? all[0] : all).dump(2) + "\n" : text, verify_out);
            return ok ? 0 : 1;
        }
        if (*bern) {
            std::ostringstream o;
            if (!bn_range.empty()) {
                auto [a, b] = parse_range(bn_range);
                if (a < 0)
                    throw UsageError("--range: indices must be >= 0");
                for (int n = a; n <= b; ++n)
                    o << "B_" << n << " = " << bernoulli(n).get_str() << "\n";
            } else {
                if (bn < 0)
                    throw UsageError("--n: index must be >= 0");
                o << bernoulli(bn).get_str() << "\n";
            }
            std::cout << o.str();
            return 0;
        }
        if (*uv) {
            if (uvw < 1 || uvw % 2)
                throw UsageError("--w: weight must be even and positive");
            UV r = uv_of_weight(uvw);
            std::cout << "u(" << uvw << ") = " << r.u.get_str() << ", v(" << uvw << ") = " << r.v.get_str() << "\n";
            return 0;
        }
        if (*pv) {
            try {
                Profile p = load_cd2_profile(profile_file);
                std::cout << "ok: " << p.name << " (" << p.tH.size() << " H, " << p.th2.size() << " h2, "
                          << p.th3.size() << " h3, " << p.tkmw.size() << " kmw entries)\n";
                return 0;
            } catch (const ParseError& e) {
                std::cerr << "invalid profile: " << e.what() << "\n";
                return 1;
            }
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Refusal& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

#include "kq/ssengine.hpp"

#include <algorithm>
#include <sstream>

namespace kq {

namespace {

std::string cell_text(const PageEntry& e)
{
    std::string out;
    for (const auto& l : e.layers)
        if (!l.group.is_zero())
            out += (out.empty() ? "" : "*") + l.group.str();
    return out;
}

std::string xml_escape(const std::string& s)
{
    std::string o;
    for (char c : s) {
        switch (c) {
        case '&':
            o += "&amp;";
            break;
        case '<':
            o += "&lt;";
            break;
        case '>':
            o += "&gt;";
            break;
        default:
            o += c;
        }
    }
    return o;
}

// rows that hold something in the displayed columns
std::pair<int, int> used_rows(const Page& p)
{
    int lo = p.q_max + 1, hi = p.q_min - 1;
    for (const auto& [c, e] : p.cells)
        if (c.s >= p.s_min && c.s <= p.s_max && !e.is_zero()) {
            lo = std::min(lo, c.q);
            hi = std::max(hi, c.q);
        }
    if (lo > hi)
        return {p.q_min, p.q_min};
    return {lo, hi};
}

} // namespace

std::string render_text_chart(const Page& p)
{
    auto [lo, hi] = used_rows(p);
    size_t width = 4;
    for (const auto& [c, e] : p.cells)
        if (c.s >= p.s_min && c.s <= p.s_max)
            width = std::max(width, cell_text(e).size() + 1);
    std::ostringstream o;
    o << p.profile.name << " " << (p.theory == SpecTheory::KQ ? "KQ" : "KGL") << " E" << p.r << " w=" << p.w << "\n";
    auto pad = [&](const std::string& s) { return s + std::string(width > s.size() ? width - s.size() : 1, ' '); };
    o << pad("q\\s");
    for (int s = p.s_min; s <= p.s_max; ++s)
        o << pad(std::to_string(s));
    o << "\n";
    for (int q = lo; q <= hi; ++q) {
        o << pad(std::to_string(q));
        for (int s = p.s_min; s <= p.s_max; ++s) {
            const PageEntry* e = p.find(s, q);
            std::string t = e ? cell_text(*e) : "";
            o << pad(t.empty() ? "." : t);
        }
        o << "\n";
    }
    std::vector<std::string> arrows;
    for (const auto& d : p.differentials)
        if (d.kind != DifferentialRecord::Zero && d.source.s >= p.s_min && d.source.s <= p.s_max)
            arrows.push_back("d" + std::to_string(d.r) + " (" + std::to_string(d.source.s) + "," +
                             std::to_string(d.source.q) + ") -> (" + std::to_string(d.target.s) + "," +
                             std::to_string(d.target.q) + ") " + differential_kind_name(d.kind) + " [" + d.rule +
                             "]");
    for (const auto& a : arrows)
        o << a << "\n";
    return o.str();
}

std::string render_svg(const Page& p)
{
    auto [lo, hi] = used_rows(p);
    const int cw = 90, ch = 36, margin = 50;
    int ncols = p.s_max - p.s_min + 1, nrows = hi - lo + 1;
    int W = margin + ncols * cw + 20, H = margin + nrows * ch + 20;
    auto x_of = [&](int s) { return margin + (s - p.s_min) * cw + cw / 2; };
    auto y_of = [&](int q) { return 20 + (hi - q) * ch + ch / 2; };
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"monospace\" font-size=\"11\">\n";
    o << "<title>" << xml_escape(p.profile.name) << (p.theory == SpecTheory::KQ ? " KQ" : " KGL") << " E" << p.r
      << " w=" << p.w << "</title>\n";
    for (int s = p.s_min; s <= p.s_max; ++s)
        o << "<text x=\"" << x_of(s) << "\" y=\"" << (H - 5) << "\" text-anchor=\"middle\">" << s << "</text>\n";
    for (int q = lo; q <= hi; ++q)
        o << "<text x=\"5\" y=\"" << y_of(q) + 4 << "\">q=" << q << "</text>\n";
    for (const auto& d : p.differentials) {
        if (d.kind == DifferentialRecord::Zero || d.source.s < p.s_min || d.source.s > p.s_max ||
            d.target.s < p.s_min || d.source.q < lo || d.target.q > hi)
            continue;
        o << "<line x1=\"" << x_of(d.source.s) << "\" y1=\"" << y_of(d.source.q) << "\" x2=\"" << x_of(d.target.s)
          << "\" y2=\"" << y_of(d.target.q) << "\" stroke=\"#b03030\" stroke-width=\"1.2\"/>\n";
    }
    for (const auto& [c, e] : p.cells) {
        if (c.s < p.s_min || c.s > p.s_max || c.q < lo || c.q > hi || e.is_zero())
            continue;
        o << "<text x=\"" << x_of(c.s) << "\" y=\"" << y_of(c.q) + 4 << "\" text-anchor=\"middle\">"
          << xml_escape(cell_text(e)) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

} // namespace kq

#include "semvox/svg.hpp"

#include <algorithm>
#include <cmath>

#include "semvox/text.hpp"

namespace semvox::report {

namespace {

std::string num(double v) {
    // Avoid "-0.00".
    std::string s = format_fixed(v, 2);
    return s;
}

} // namespace

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string color_ramp(double t) {
    t = std::clamp(t, 0.0, 1.0);
    // Light blue-white to dark blue.
    const int r0 = 247, g0 = 251, b0 = 255;
    const int r1 = 8, g1 = 48, b1 = 107;
    auto lerp = [t](int a, int b) {
        return static_cast<int>(std::lround(a + t * (b - a)));
    };
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", lerp(r0, r1), lerp(g0, g1),
                  lerp(b0, b1));
    return buf;
}

SvgDocument::SvgDocument(double width, double height) : width_(width), height_(height) {}

void SvgDocument::rect(double x, double y, double w, double h, const std::string& fill,
                       const std::string& stroke, double stroke_width,
                       const std::string& dash) {
    std::string e = "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
                    "\" height=\"" + num(h) + "\" fill=\"" +
                    (fill.empty() ? "none" : fill) + "\"";
    if (!stroke.empty()) {
        e += " stroke=\"" + stroke + "\" stroke-width=\"" + num(stroke_width) + "\"";
        if (!dash.empty()) e += " stroke-dasharray=\"" + dash + "\"";
    }
    e += "/>";
    elements_.push_back(std::move(e));
}

void SvgDocument::line(double x1, double y1, double x2, double y2,
                       const std::string& stroke, double width,
                       const std::string& dash) {
    std::string e = "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" +
                    num(x2) + "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke +
                    "\" stroke-width=\"" + num(width) + "\"";
    if (!dash.empty()) e += " stroke-dasharray=\"" + dash + "\"";
    e += "/>";
    elements_.push_back(std::move(e));
}

void SvgDocument::circle(double cx, double cy, double r, const std::string& fill,
                         const std::string& stroke, double stroke_width,
                         const std::string& dash) {
    std::string e = "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" +
                    num(r) + "\" fill=\"" + (fill.empty() ? "none" : fill) + "\"";
    if (!stroke.empty()) {
        e += " stroke=\"" + stroke + "\" stroke-width=\"" + num(stroke_width) + "\"";
        if (!dash.empty()) e += " stroke-dasharray=\"" + dash + "\"";
    }
    e += "/>";
    elements_.push_back(std::move(e));
}

void SvgDocument::text(double x, double y, const std::string& content, double size,
                       const std::string& anchor, bool bold, const std::string& fill,
                       double rotate_deg) {
    std::string e = "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"" +
                    "Helvetica, Arial, sans-serif\" font-size=\"" + num(size) +
                    "\" text-anchor=\"" + anchor + "\" fill=\"" + fill + "\"";
    if (bold) e += " font-weight=\"bold\"";
    if (rotate_deg != 0.0) {
        e += " transform=\"rotate(" + num(rotate_deg) + " " + num(x) + " " + num(y) +
             ")\"";
    }
    e += ">" + xml_escape(content) + "</text>";
    elements_.push_back(std::move(e));
}

void SvgDocument::arrow(double x1, double y1, double x2, double y2,
                        const std::string& stroke, double width,
                        const std::string& dash) {
    line(x1, y1, x2, y2, stroke, width, dash);
    // Triangular head at the target end.
    double dx = x2 - x1, dy = y2 - y1;
    double len = std::sqrt(dx * dx + dy * dy);
    if (len <= 0.0) return;
    double ux = dx / len, uy = dy / len;
    double head = 6.0;
    double bx = x2 - head * ux, by = y2 - head * uy;
    double px = -uy * head * 0.5, py = ux * head * 0.5;
    std::string e = "<path d=\"M " + num(x2) + " " + num(y2) + " L " + num(bx + px) +
                    " " + num(by + py) + " L " + num(bx - px) + " " + num(by - py) +
                    " Z\" fill=\"" + stroke + "\"/>";
    elements_.push_back(std::move(e));
}

void SvgDocument::set_metadata(const std::string& key, const std::string& value) {
    metadata_[key] = value;
}

std::string SvgDocument::to_string() const {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           num(width_) + "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " +
           num(width_) + " " + num(height_) + "\">\n";
    if (!metadata_.empty()) {
        out += "<metadata>";
        bool first = true;
        for (const auto& [k, v] : metadata_) {
            if (!first) out += ';';
            out += xml_escape(k) + "=" + xml_escape(v);
            first = false;
        }
        out += "</metadata>\n";
    }
    for (const auto& e : elements_) {
        out += e;
        out += '\n';
    }
    out += "</svg>\n";
    return out;
}

double SvgDocument::text_width(const std::string& content, double size) {
    // Constant per-character widths keep layout platform-independent.
    double units = 0.0;
    for (char c : content) {
        if (c == 'i' || c == 'l' || c == 'j' || c == '.' || c == ',' || c == '\'') {
            units += 0.30;
        } else if (c == 'm' || c == 'w' || c == 'M' || c == 'W') {
            units += 0.85;
        } else if (c >= 'A' && c <= 'Z') {
            units += 0.70;
        } else {
            units += 0.55;
        }
    }
    return units * size;
}

} // namespace semvox::report

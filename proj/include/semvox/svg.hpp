#ifndef SEMVOX_SVG_HPP
#define SEMVOX_SVG_HPP

#include <map>
#include <string>
#include <vector>

namespace semvox::report {

// Deterministic SVG 1.1 writer: fixed 2-decimal coordinates, no ids,
// no timestamps; identical input produces identical bytes.
class SvgDocument {
public:
    SvgDocument(double width, double height);

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke = "", double stroke_width = 0.0,
              const std::string& dash = "");
    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0, const std::string& dash = "");
    void circle(double cx, double cy, double r, const std::string& fill,
                const std::string& stroke = "", double stroke_width = 0.0,
                const std::string& dash = "");
    // anchor: "start", "middle" or "end".
    void text(double x, double y, const std::string& content, double size,
              const std::string& anchor = "start", bool bold = false,
              const std::string& fill = "#000000", double rotate_deg = 0.0);
    void arrow(double x1, double y1, double x2, double y2, const std::string& stroke,
               double width = 1.0, const std::string& dash = "");

    void set_metadata(const std::string& key, const std::string& value);

    double width() const { return width_; }
    double height() const { return height_; }

    std::string to_string() const;

    // Approximate text width under the fixed per-character width table.
    static double text_width(const std::string& content, double size);

private:
    double width_;
    double height_;
    std::vector<std::string> elements_;
    std::map<std::string, std::string> metadata_;
};

std::string xml_escape(const std::string& s);

// Linear two-color ramp, t in [0, 1], returns "#rrggbb".
std::string color_ramp(double t);

} // namespace semvox::report

#endif

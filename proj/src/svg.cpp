#include "ck/svg.hpp"

#include <cstdio>

namespace ck {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string category_color(DisplayCategory c) {
  switch (c) {
    case DisplayCategory::InterpretationPositive: return "#4e9a6f";
    case DisplayCategory::InterpretationNeutral: return "#8fb9a8";
    case DisplayCategory::InterpretationNegative: return "#c46b5c";
    case DisplayCategory::Inquiry: return "#e0a93b";
    case DisplayCategory::ExperienceSharing: return "#7d6bb3";
    case DisplayCategory::ConceptNoting: return "#4f86c6";
    case DisplayCategory::SupplementaryKnowledge: return "#b0607f";
  }
  return "#999999";
}

std::string render_wordstream_svg(const WordstreamLayout& layout) {
  const double h = layout.height;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(layout.width) +
                    "\" height=\"" + num(h) + "\" viewBox=\"0 0 " + num(layout.width) + " " +
                    num(h) + "\">\n";
  for (const auto& band : layout.bands) {
    if (band.points.empty()) continue;
    std::string d;
    for (std::size_t i = 0; i < band.points.size(); ++i) {
      const auto& p = band.points[i];
      d += (i == 0 ? "M" : " L") + num(p.x) + "," + num(h - p.y1);
    }
    for (std::size_t i = band.points.size(); i-- > 0;) {
      const auto& p = band.points[i];
      d += " L" + num(p.x) + "," + num(h - p.y0);
    }
    d += " Z";
    out += "  <path class=\"band " + std::string(slug(band.category)) + "\" fill=\"" +
           category_color(band.category) + "\" fill-opacity=\"0.75\" d=\"" + d + "\"/>\n";
  }
  for (const auto& k : layout.keywords) {
    out += "  <text class=\"keyword " + std::string(slug(k.category)) + "\" x=\"" + num(k.x) +
           "\" y=\"" + num(h - k.y - 0.2 * k.height) + "\" font-size=\"" + num(k.font_size) +
           "\" fill=\"#222222\">" + escape_xml(k.token) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace ck

#pragma once

#include <string>

#include "ck/presentation.hpp"

namespace ck {

/// Fill color for a display category, as "#rrggbb".
std::string category_color(DisplayCategory c);

/// Standalone SVG of a Wordstream layout: one closed path per band and one
/// text element per keyword box. Coordinates are flipped so y grows down.
std::string render_wordstream_svg(const WordstreamLayout& layout);

}  // namespace ck

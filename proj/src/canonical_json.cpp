#include "ck/canonical_json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "ck/error.hpp"

namespace ck {

namespace {

void format_double(double v, std::string& out) {
  if (!std::isfinite(v)) throw ValidationError("non-finite number in canonical JSON");
  if (v == 0.0) {
    out += '0';
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  out += buf;
}

void write(const Json& v, std::string& out) {
  switch (v.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        out += Json(key).dump(-1, ' ', false, Json::error_handler_t::replace);
        out += ':';
        write(item, out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ',';
        first = false;
        write(item, out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float:
      format_double(v.get<double>(), out);
      break;
    default:
      out += v.dump(-1, ' ', false, Json::error_handler_t::replace);
      break;
  }
}

}  // namespace

std::string canonical_dump(const Json& value) {
  std::string out;
  write(value, out);
  return out;
}

double round_sig6(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

}  // namespace ck

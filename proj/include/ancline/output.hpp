#pragma once

// CSV and standalone SVG renderings of a Table.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "ancline/experiments.hpp"

namespace ancline {

inline auto format_number(double x) -> std::string {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Header row, then one row per record; 17 significant digits, LF line endings.
inline auto write_csv(std::ostream& os, const Table& table) -> void {
  for (auto i = std::size_t{0}; i < table.columns.size(); ++i) {
    os << (i ? "," : "") << table.columns[i];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (auto i = std::size_t{0}; i < row.size(); ++i) {
      os << (i ? "," : "") << format_number(row[i]);
    }
    os << '\n';
  }
}

namespace detail {

inline auto svg_escape(const std::string& s) -> std::string {
  auto out = std::string{};
  for (auto c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

inline auto svg_number(double x) -> std::string {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline auto tick_label(double x) -> std::string {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

}  // namespace detail

// Axes, one polyline per series and a legend.  On a log y axis non-positive values are skipped.
inline auto write_svg(std::ostream& os, const Table& table) -> void {
  constexpr double width = 720.0;
  constexpr double height = 480.0;
  constexpr double left = 80.0;
  constexpr double right = 180.0;
  constexpr double top = 40.0;
  constexpr double bottom = 60.0;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  auto ty = [&](double y) { return table.log_y ? std::log10(y) : y; };
  auto usable = [&](double y) { return std::isfinite(y) && (!table.log_y || y > 0.0); };
  auto x_lo = std::numeric_limits<double>::infinity();
  auto x_hi = -x_lo;
  auto y_lo = x_lo;
  auto y_hi = -x_lo;
  for (const auto& row : table.rows) {
    x_lo = std::min(x_lo, row[0]);
    x_hi = std::max(x_hi, row[0]);
    for (auto j = std::size_t{1}; j < row.size(); ++j) {
      if (!usable(row[j])) { continue; }
      y_lo = std::min(y_lo, ty(row[j]));
      y_hi = std::max(y_hi, ty(row[j]));
    }
  }
  if (!(x_hi > x_lo)) { x_hi = x_lo + 1.0; }
  if (!(y_hi > y_lo)) { y_hi = y_lo + 1.0; }
  if (!std::isfinite(y_lo)) {
    y_lo = 0.0;
    y_hi = 1.0;
  }
  auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * (width - left - right); };
  auto py = [&](double y) { return height - bottom - (y - y_lo) / (y_hi - y_lo) * (height - top - bottom); };

  os << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << width << R"(" height=")" << height
     << R"(" font-family="sans-serif" font-size="12">)" << '\n';
  os << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n';
  os << R"(<text x=")" << width / 2 << R"(" y="24" text-anchor="middle" font-size="14">)"
     << detail::svg_escape(table.title) << "</text>\n";
  os << R"(<path d="M)" << left << ' ' << top << " L" << left << ' ' << height - bottom << " L"
     << width - right << ' ' << height - bottom << R"(" fill="none" stroke="black"/>)" << '\n';
  for (auto i = 0; i <= 4; ++i) {
    auto xv = x_lo + (x_hi - x_lo) * i / 4.0;
    auto yv = y_lo + (y_hi - y_lo) * i / 4.0;
    os << R"(<text x=")" << detail::svg_number(px(xv)) << R"(" y=")" << height - bottom + 18
       << R"(" text-anchor="middle">)" << detail::tick_label(xv) << "</text>\n";
    os << R"(<text x=")" << left - 6 << R"(" y=")" << detail::svg_number(py(yv) + 4)
       << R"(" text-anchor="end">)" << detail::tick_label(table.log_y ? std::pow(10.0, yv) : yv)
       << "</text>\n";
  }
  os << R"(<text x=")" << (left + width - right) / 2 << R"(" y=")" << height - 16
     << R"(" text-anchor="middle">)" << detail::svg_escape(table.columns[0]) << "</text>\n";

  for (auto j = std::size_t{1}; j < table.columns.size(); ++j) {
    const auto* color = colors[(j - 1) % std::size(colors)];
    os << R"(<polyline fill="none" stroke=")" << color << R"(" stroke-width="1.5" points=")";
    auto first = true;
    for (const auto& row : table.rows) {
      if (!usable(row[j])) { continue; }
      os << (first ? "" : " ") << detail::svg_number(px(row[0])) << ',' << detail::svg_number(py(ty(row[j])));
      first = false;
    }
    os << R"("/>)" << '\n';
    auto ly = top + 20.0 * static_cast<double>(j);
    os << R"(<line x1=")" << width - right + 12 << R"(" y1=")" << ly << R"(" x2=")" << width - right + 36
       << R"(" y2=")" << ly << R"(" stroke=")" << color << R"(" stroke-width="2"/>)" << '\n';
    os << R"(<text x=")" << width - right + 42 << R"(" y=")" << ly + 4 << R"(">)"
       << detail::svg_escape(table.columns[j]) << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace ancline

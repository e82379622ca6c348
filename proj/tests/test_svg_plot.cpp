#include <cmath>
#include <limits>

#include "doctest.h"
#include "fekete/svg_plot.hpp"

using namespace fekete;

namespace {

std::size_t occurrences(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

LinePlot sample() {
  LinePlot p;
  p.title = "ratio <a & b>";
  p.x_label = "n";
  p.y_label = "f/n";
  p.series.push_back({"upper", {{1, 1}, {2, 0.8}, {3, 0.75}}, "#d62728", true, false});
  p.series.push_back({"limit", {{1, 0.69}, {3, 0.69}}, "#2ca02c", false, true});
  return p;
}

}  // namespace

TEST_CASE("svg output is well formed") {
  const auto svg = render_svg(sample());
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(occurrences(svg, "<polyline") == 2);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  CHECK(occurrences(svg, "<circle") >= 3);
  CHECK(svg.find("upper") != std::string::npos);
  CHECK(svg.find("ratio &lt;a &amp; b&gt;") != std::string::npos);
  CHECK(svg.find("<a & b>") == std::string::npos);
}

TEST_CASE("timestamps only appear when set") {
  auto p = sample();
  const auto plain = render_svg(p);
  CHECK(plain.find("<!--") == std::string::npos);
  CHECK(plain == render_svg(p));
  p.timestamp = "2026-01-01T00:00:00Z";
  CHECK(render_svg(p).find("<!-- generated 2026-01-01T00:00:00Z -->") != std::string::npos);
  const auto now = utc_timestamp();
  CHECK(now.size() == 20);
  CHECK(now.back() == 'Z');
}

TEST_CASE("non-finite points are skipped") {
  LinePlot p = sample();
  p.series[0].points.push_back({4, std::numeric_limits<double>::infinity()});
  p.series[0].points.push_back({5, -std::numeric_limits<double>::infinity()});
  const auto svg = render_svg(p);
  CHECK(svg.find("inf") == std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);
  LinePlot empty;
  empty.series.push_back({"none", {}});
  CHECK_NOTHROW(render_svg(empty));
}

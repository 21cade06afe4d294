#include "xmvae/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "xmvae/error.hpp"

namespace xmvae {

namespace {

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

void write_hand_strip_svg(const std::string& path,
                          const std::vector<Tensor>& hands2d) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open svg for writing: " + path);

  constexpr double kPanel = 120.0;
  constexpr double kMargin = 10.0;
  const std::size_t n = hands2d.size();
  const double width = n == 0 ? kPanel : kPanel * static_cast<double>(n);

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_num(width)
      << "\" height=\"" << svg_num(kPanel) << "\" viewBox=\"0 0 "
      << svg_num(width) << ' ' << svg_num(kPanel) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // One shared scale so motion across panels is comparable.
  double lo = 0.0, hi = 1.0;
  bool first = true;
  for (const Tensor& hand : hands2d) {
    if (hand.size() != 2 * kHandJoints) {
      throw ShapeError("write_hand_strip_svg: each hand must have 42 values");
    }
    for (double v : hand.values()) {
      if (first) {
        lo = hi = v;
        first = false;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  const double span = std::max(hi - lo, 1e-9);
  const double scale = (kPanel - 2.0 * kMargin) / span;

  const auto edges = hand_bone_edges();
  for (std::size_t p = 0; p < n; ++p) {
    const Tensor& hand = hands2d[p];
    const double x0 = kPanel * static_cast<double>(p);
    auto px = [&](std::size_t joint) {
      return x0 + kMargin + (hand[2 * joint] - lo) * scale;
    };
    auto py = [&](std::size_t joint) {
      // Flip so +y points up on screen.
      return kPanel - kMargin - (hand[2 * joint + 1] - lo) * scale;
    };
    out << "<g stroke=\"#4060c0\" stroke-width=\"1\">\n";
    for (const auto& [a, b] : edges) {
      out << "<line x1=\"" << svg_num(px(a)) << "\" y1=\"" << svg_num(py(a))
          << "\" x2=\"" << svg_num(px(b)) << "\" y2=\"" << svg_num(py(b))
          << "\"/>\n";
    }
    out << "</g>\n<g fill=\"#c03030\">\n";
    for (std::size_t j = 0; j < kHandJoints; ++j) {
      out << "<circle cx=\"" << svg_num(px(j)) << "\" cy=\"" << svg_num(py(j))
          << "\" r=\"1.5\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("svg write failed: " + path);
}

}  // namespace xmvae

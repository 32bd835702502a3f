#include "gevmle/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

#include "gevmle/io.hpp"

namespace gevmle {

namespace {

constexpr double kPanelWidth = 320.0;
constexpr double kPanelHeight = 260.0;
constexpr double kMarginLeft = 56.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 40.0;
constexpr double kGap = 24.0;

std::string num(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.2f", v);
  return buf.data();
}

std::string label(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.3g", v);
  return buf.data();
}

double percentile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

struct Box {
  double lo, q1, med, q3, hi;
};

struct Panel {
  std::string id;
  std::string title;
  std::map<std::size_t, std::vector<double>> values;  // by n
};

void render_panel(std::ostringstream& svg, const Panel& panel, double x0) {
  std::map<std::size_t, Box> boxes;
  double ymin = 0.0, ymax = 0.0;  // keep the zero line in view
  for (const auto& [n, raw] : panel.values) {
    std::vector<double> v;
    for (double x : raw)
      if (std::isfinite(x)) v.push_back(x);
    if (v.empty()) continue;
    std::sort(v.begin(), v.end());
    Box b{percentile(v, 0.05), percentile(v, 0.25), percentile(v, 0.5), percentile(v, 0.75), percentile(v, 0.95)};
    ymin = std::min(ymin, b.lo);
    ymax = std::max(ymax, b.hi);
    boxes[n] = b;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double plot_top = kMarginTop;
  const double plot_h = kPanelHeight - kMarginTop - kMarginBottom;
  const double plot_left = x0 + kMarginLeft;
  const double plot_w = kPanelWidth - kMarginLeft - 12.0;
  auto ypix = [&](double y) { return plot_top + (ymax - y) / (ymax - ymin) * plot_h; };

  svg << "<g class=\"panel\" id=\"" << panel.id << "\">\n";
  svg << "<text x=\"" << num(plot_left + plot_w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"13\">"
      << panel.title << "</text>\n";
  svg << "<rect x=\"" << num(plot_left) << "\" y=\"" << num(plot_top) << "\" width=\"" << num(plot_w)
      << "\" height=\"" << num(plot_h) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  svg << "<line x1=\"" << num(plot_left) << "\" x2=\"" << num(plot_left + plot_w) << "\" y1=\"" << num(ypix(0.0))
      << "\" y2=\"" << num(ypix(0.0)) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double y = ymin + (ymax - ymin) * t / 4.0;
    svg << "<text x=\"" << num(plot_left - 4) << "\" y=\"" << num(ypix(y) + 4)
        << "\" text-anchor=\"end\" font-size=\"10\">" << label(y) << "</text>\n";
  }

  const double slot = plot_w / static_cast<double>(std::max<std::size_t>(boxes.size(), 1));
  std::size_t i = 0;
  for (const auto& [n, b] : boxes) {
    const double cx = plot_left + slot * (static_cast<double>(i) + 0.5);
    const double half = std::min(18.0, slot * 0.3);
    svg << "<g class=\"box\" data-n=\"" << n << "\">";
    svg << "<line x1=\"" << num(cx) << "\" x2=\"" << num(cx) << "\" y1=\"" << num(ypix(b.hi)) << "\" y2=\""
        << num(ypix(b.lo)) << "\" stroke=\"#333\"/>";
    svg << "<rect x=\"" << num(cx - half) << "\" y=\"" << num(ypix(b.q3)) << "\" width=\"" << num(2 * half)
        << "\" height=\"" << num(std::max(ypix(b.q1) - ypix(b.q3), 0.5)) << "\" fill=\"#9ecae1\" stroke=\"#333\"/>";
    svg << "<line x1=\"" << num(cx - half) << "\" x2=\"" << num(cx + half) << "\" y1=\"" << num(ypix(b.med))
        << "\" y2=\"" << num(ypix(b.med)) << "\" stroke=\"#08306b\" stroke-width=\"2\"/>";
    svg << "<text x=\"" << num(cx) << "\" y=\"" << num(plot_top + plot_h + 16)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << n << "</text>";
    svg << "</g>\n";
    ++i;
  }
  svg << "<text x=\"" << num(plot_left + plot_w / 2) << "\" y=\"" << num(kPanelHeight - 6)
      << "\" text-anchor=\"middle\" font-size=\"11\">n (blocks)</text>\n";
  svg << "</g>\n";
}

}  // namespace

std::string render_study_svg(const StudyCsv& csv) {
  if (csv.rows.empty()) throw ParseError("study CSV has no rows");
  const auto it = csv.metadata.find("gamma0");
  if (it == csv.metadata.end()) throw ParseError("study CSV lacks the gamma0 metadata line");
  const double gamma0 = parse_double(it->second);

  std::array<Panel, 3> panels{Panel{"panel-gamma", "gamma_hat - gamma0", {}},
                              Panel{"panel-mu", "(mu_hat - b_m) / a_m", {}},
                              Panel{"panel-sigma", "sigma_hat / a_m - 1", {}}};
  for (const auto& r : csv.rows) {
    panels[0].values[r.n].push_back(r.gamma_hat - gamma0);
    panels[1].values[r.n].push_back(r.mu_err);
    panels[2].values[r.n].push_back(r.sigma_ratio - 1.0);
  }

  const double width = 3 * kPanelWidth + 2 * kGap;
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(kPanelHeight)
      << "\" viewBox=\"0 0 " << num(width) << ' ' << num(kPanelHeight) << "\" font-family=\"sans-serif\">\n";
  const auto dist = csv.metadata.find("distribution");
  svg << "<title>" << (dist == csv.metadata.end() ? std::string("study") : dist->second) << "</title>\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    render_panel(svg, panels[p], static_cast<double>(p) * (kPanelWidth + kGap));
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace gevmle

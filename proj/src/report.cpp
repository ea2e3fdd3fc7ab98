#include "stgf/eval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "stgf/core/errors.hpp"

namespace stgf::eval {

namespace {

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace

void write_csv(const std::vector<MetricRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "method,views,instances,de_mean,de_std,relde_mean,relde_std,runtime_ms\n";
  for (const auto& row : rows) {
    out << to_string(row.method) << ',' << row.views_used << ',' << row.n_instances << ','
        << fmt6(row.de_mean) << ',' << fmt6(row.de_std) << ',' << fmt6(row.relde_mean) << ','
        << fmt6(row.relde_std) << ',' << fmt6(row.runtime_ms) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_sweep_plot(const std::vector<MetricRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);

  const double width = 640, height = 400;
  const double ml = 70, mr = 20, mt = 30, mb = 50;

  double x_min = 1e300, x_max = -1e300, y_max = 0.0;
  for (const auto& r : rows) {
    x_min = std::min(x_min, static_cast<double>(r.views_used));
    x_max = std::max(x_max, static_cast<double>(r.views_used));
    y_max = std::max(y_max, r.de_mean + r.de_std);
  }
  if (rows.empty()) {
    x_min = 0;
    x_max = 1;
  }
  if (x_max <= x_min) x_max = x_min + 1;
  if (y_max <= 0) y_max = 1;
  y_max *= 1.05;

  const auto px = [&](double views) {
    return ml + (views - x_min) / (x_max - x_min) * (width - ml - mr);
  };
  const auto py = [&](double de) { return height - mb - de / y_max * (height - mt - mb); };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"14\">views</text>\n"
      << "<text x=\"18\" y=\"" << (mt + height - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
      << (mt + height - mb) / 2 << ")\">de_mean (m)</text>\n";

  for (const auto& r : rows) {
    out << "<text x=\"" << px(r.views_used) << "\" y=\"" << height - mb + 18
        << "\" text-anchor=\"middle\" font-size=\"12\">" << r.views_used << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double y = y_max * k / 4.0;
    out << "<line x1=\"" << ml - 4 << "\" y1=\"" << py(y) << "\" x2=\"" << ml << "\" y2=\""
        << py(y) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << ml - 8 << "\" y=\"" << py(y) + 4
        << "\" text-anchor=\"end\" font-size=\"12\">" << fmt6(y) << "</text>\n";
  }

  if (!rows.empty()) {
    // +/- std band
    out << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
    for (const auto& r : rows) out << px(r.views_used) << ',' << py(r.de_mean + r.de_std) << ' ';
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
      out << px(it->views_used) << ',' << py(std::max(0.0, it->de_mean - it->de_std)) << ' ';
    }
    out << "\"/>\n";

    out << "<polyline fill=\"none\" stroke=\"#08519c\" stroke-width=\"2\" points=\"";
    for (const auto& r : rows) out << px(r.views_used) << ',' << py(r.de_mean) << ' ';
    out << "\"/>\n";
    for (const auto& r : rows) {
      out << "<circle cx=\"" << px(r.views_used) << "\" cy=\"" << py(r.de_mean)
          << "\" r=\"3\" fill=\"#08519c\"/>\n";
    }
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << mt - 10
        << "\" text-anchor=\"middle\" font-size=\"14\">" << to_string(rows.front().method)
        << " displacement error vs view count</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace stgf::eval

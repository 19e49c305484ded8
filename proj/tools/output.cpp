#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "fractail/error.hpp"

namespace fractail::cli {

namespace {

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  out << body;
  require(static_cast<bool>(out), ErrorCode::InvalidArgument, "write failed for '" + path + "'");
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

constexpr double kW = 720, kH = 480, kL = 80, kR = 170, kT = 40, kB = 60;

std::string header(const std::string& title) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
    << "</text>\n";
  return s.str();
}

}  // namespace

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::string name, std::vector<std::string> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {}

void CsvTable::row(const std::vector<std::string>& cells) {
  require(cells.size() == columns_.size(), ErrorCode::InvalidArgument, "csv row width differs from the header");
  rows_.push_back(cells);
}

void CsvTable::write(const std::string& path) const {
  std::ostringstream s;
  s << "# fractail-csv v1\n# table: " << name_ << "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) s << (i ? "," : "") << cells[i];
    s << "\n";
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  write_file(path, s.str());
}

void write_loglog_svg(const std::string& path, const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& se : series) {
    for (std::size_t i = 0; i < se.x.size(); ++i) {
      const double y = std::abs(se.y[i]);
      if (!(se.x[i] > 0.0) || !(y > 0.0) || !std::isfinite(y)) continue;
      x0 = std::min(x0, std::log10(se.x[i]));
      x1 = std::max(x1, std::log10(se.x[i]));
      y0 = std::min(y0, std::log10(y));
      y1 = std::max(y1, std::log10(y));
    }
  }
  std::ostringstream s;
  s << header(title);
  if (!std::isfinite(x0)) {
    s << "<text x=\"" << kW / 2 << "\" y=\"" << kH / 2 << "\" text-anchor=\"middle\">no positive data</text>\n</svg>\n";
    write_file(path, s.str());
    return;
  }
  x0 = std::floor(x0), x1 = std::max(std::ceil(x1), x0 + 1), y0 = std::floor(y0), y1 = std::max(std::ceil(y1), y0 + 1);
  const double pw = kW - kL - kR, ph = kH - kT - kB;
  auto px = [&](double lx) { return kL + (lx - x0) / (x1 - x0) * pw; };
  auto py = [&](double ly) { return kT + (y1 - ly) / (y1 - y0) * ph; };
  s << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  const int xstep = std::max(1, static_cast<int>((x1 - x0) / 8) + 1), ystep = std::max(1, static_cast<int>((y1 - y0) / 10) + 1);
  for (int d = static_cast<int>(x0); d <= static_cast<int>(x1); d += xstep) {
    s << "<line x1=\"" << px(d) << "\" y1=\"" << kT << "\" x2=\"" << px(d) << "\" y2=\"" << kT + ph
      << "\" stroke=\"#ddd\"/><text x=\"" << px(d) << "\" y=\"" << kT + ph + 18 << "\" text-anchor=\"middle\">1e"
      << d << "</text>\n";
  }
  for (int d = static_cast<int>(y0); d <= static_cast<int>(y1); d += ystep) {
    s << "<line x1=\"" << kL << "\" y1=\"" << py(d) << "\" x2=\"" << kL + pw << "\" y2=\"" << py(d)
      << "\" stroke=\"#ddd\"/><text x=\"" << kL - 6 << "\" y=\"" << py(d) + 4 << "\" text-anchor=\"end\">1e" << d
      << "</text>\n";
  }
  s << "<text x=\"" << kL + pw / 2 << "\" y=\"" << kH - 15 << "\" text-anchor=\"middle\">" << escape(x_label)
    << "</text>\n<text x=\"18\" y=\"" << kT + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << kT + ph / 2 << ")\">" << escape(y_label) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % 8];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[k].x.size(); ++i) {
      const double y = std::abs(series[k].y[i]);
      if (!(series[k].x[i] > 0.0) || !(y > 0.0) || !std::isfinite(y)) continue;
      s << px(std::log10(series[k].x[i])) << "," << py(std::log10(y)) << " ";
    }
    s << "\"/>\n<text x=\"" << kL + pw + 10 << "\" y=\"" << kT + 16 * (k + 1) << "\" fill=\"" << color << "\">"
      << escape(series[k].label) << "</text>\n";
  }
  s << "</svg>\n";
  write_file(path, s.str());
}

void write_bar_svg(const std::string& path, const std::string& title, const std::vector<std::string>& categories,
                   const std::vector<Series>& series) {
  double lo = 0.0, hi = 0.0;
  for (const auto& se : series) {
    for (double v : se.y) {
      if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
    }
  }
  if (hi == lo) hi = lo + 1.0;
  const double pw = kW - kL - kR, ph = kH - kT - kB;
  auto py = [&](double v) { return kT + (hi - v) / (hi - lo) * ph; };
  std::ostringstream s;
  s << header(title);
  s << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n<line x1=\"" << kL << "\" y1=\"" << py(0) << "\" x2=\"" << kL + pw
    << "\" y2=\"" << py(0) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    s << "<text x=\"" << kL - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << buf << "</text>\n";
  }
  const std::size_t nc = std::max<std::size_t>(categories.size(), 1), ns = std::max<std::size_t>(series.size(), 1);
  const double group = pw / nc, bar = 0.8 * group / ns;
  for (std::size_t c = 0; c < categories.size(); ++c) {
    for (std::size_t k = 0; k < series.size(); ++k) {
      if (c >= series[k].y.size() || !std::isfinite(series[k].y[c])) continue;
      const double v = series[k].y[c];
      const double x = kL + c * group + 0.1 * group + k * bar;
      s << "<rect x=\"" << x << "\" y=\"" << std::min(py(v), py(0)) << "\" width=\"" << bar << "\" height=\""
        << std::abs(py(v) - py(0)) << "\" fill=\"" << kColors[k % 8] << "\"/>\n";
    }
    s << "<text x=\"" << kL + (c + 0.5) * group << "\" y=\"" << kT + ph + 18 << "\" text-anchor=\"middle\">"
      << escape(categories[c]) << "</text>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    s << "<text x=\"" << kL + pw + 10 << "\" y=\"" << kT + 16 * (k + 1) << "\" fill=\"" << kColors[k % 8] << "\">"
      << escape(series[k].label) << "</text>\n";
  }
  s << "</svg>\n";
  write_file(path, s.str());
}

}  // namespace fractail::cli

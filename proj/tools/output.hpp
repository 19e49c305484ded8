#pragma once

#include <string>
#include <vector>

namespace fractail::cli {

// Versioned CSV: "# fractail-csv v1", a comment naming the table, then a header row.
class CsvTable {
 public:
  CsvTable(std::string name, std::vector<std::string> columns);

  void row(const std::vector<std::string>& cells);
  const std::string& name() const { return name_; }
  void write(const std::string& path) const;

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Shortest round-tripping text for a double ("%.17g"), "nan"/"inf" spelled out.
std::string num(double v);

struct Series {
  std::string label;
  std::vector<double> x, y;
};

/// Log-log line plot of |y| against x; non-positive points are skipped.
void write_loglog_svg(const std::string& path, const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series);

/// Bar chart of values per category, one group of bars per series (e.g. truth, estimate).
void write_bar_svg(const std::string& path, const std::string& title, const std::vector<std::string>& categories,
                   const std::vector<Series>& series);

}  // namespace fractail::cli

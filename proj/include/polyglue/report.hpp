#pragma once

#include <string>
#include <utility>
#include <vector>

namespace polyglue {

struct ReportRow {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// Deterministic per-command check report; CSV rows under a '#' header.
struct Report {
  std::string command;
  std::string inputs_digest;  ///< seed and argument summary
  std::vector<ReportRow> rows;

  bool all_pass() const;
  std::string to_csv() const;
};

/// One labeled curve for plot emission.
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained matplotlib script plotting the given series (ratio-vs-R
/// style). Throws on an empty series list.
std::string emit_plot_script(const std::string& title, const std::string& xlabel,
                             const std::string& ylabel, const std::vector<Series>& series);

/// Mapping of library operations onto CLI subcommands (coverage table).
std::vector<std::pair<std::string, std::string>> command_table();

}  // namespace polyglue

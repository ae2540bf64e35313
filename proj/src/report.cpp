#include "polyglue/report.hpp"

#include <sstream>
#include <stdexcept>

namespace polyglue {

bool Report::all_pass() const {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

std::string Report::to_csv() const {
  std::ostringstream out;
  out.precision(15);
  out << "# command=" << command << " " << inputs_digest << "\n";
  out << "# name,value,threshold,pass\n";
  for (const auto& r : rows)
    out << r.name << "," << r.value << "," << r.threshold << "," << (r.pass ? 1 : 0) << "\n";
  return out.str();
}

std::string emit_plot_script(const std::string& title, const std::string& xlabel,
                             const std::string& ylabel, const std::vector<Series>& series) {
  if (series.empty()) throw std::invalid_argument("emit_plot_script: no series");
  for (const auto& s : series)
    if (s.x.empty() || s.x.size() != s.y.size())
      throw std::invalid_argument("emit_plot_script: empty or ragged series");
  std::ostringstream out;
  out.precision(15);
  out << "#!/usr/bin/env python3\nimport matplotlib\nmatplotlib.use('Agg')\n"
      << "import matplotlib.pyplot as plt\n\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << "x" << i << " = [";
    for (std::size_t k = 0; k < series[i].x.size(); ++k) out << (k ? "," : "") << series[i].x[k];
    out << "]\ny" << i << " = [";
    for (std::size_t k = 0; k < series[i].y.size(); ++k) out << (k ? "," : "") << series[i].y[k];
    out << "]\nplt.plot(x" << i << ", y" << i << ", marker='o', label='" << series[i].label << "')\n";
  }
  out << "plt.xlabel('" << xlabel << "')\nplt.ylabel('" << ylabel << "')\n"
      << "plt.title('" << title << "')\nplt.legend()\nplt.grid(True, alpha=0.3)\n"
      << "plt.savefig('" << title << ".png', dpi=150, bbox_inches='tight')\n"
      << "print('wrote " << title << ".png')\n";
  return out.str();
}

std::vector<std::pair<std::string, std::string>> command_table() {
  return {
      {"arithmetic_genus", "surface genus"},
      {"is_connected", "surface connected"},
      {"is_stable", "surface stable"},
      {"stabilize", "surface stabilize"},
      {"forget_marked_point", "surface forget"},
      {"canonical_form", "surface canonical"},
      {"gluing_length", "profile length"},
      {"inverse_length", "profile invert"},
      {"profile_convert", "profile convert"},
      {"degeneration_index", "profile degeneration"},
      {"bilevel_valid", "profile bilevel"},
      {"weighted_norm", "norm"},
      {"pair_norm_E", "norm pair"},
      {"neck_norm_G", "norm neck"},
      {"circle_mean", "norm mean"},
      {"lift_point", "profile lift"},
      {"evaluate", "norm eval"},
      {"plus_glue", "glue"},
      {"minus_glue", "glue"},
      {"hat_plus_glue", "glue --hat"},
      {"hat_minus_glue", "glue --hat"},
      {"total_unglue", "unglue"},
      {"hat_total_unglue", "unglue --hat"},
      {"project", "project"},
      {"hat_project", "project --hat"},
      {"in_splicing_core", "core-test"},
      {"transfer_ds", "sweep-estimates --mode ds"},
      {"transfer_dt", "sweep-estimates --mode dt"},
      {"transfer_cs", "sweep-estimates --mode cs"},
      {"transfer_ct", "sweep-estimates --mode ct"},
      {"dbar0", "cr dbar0"},
      {"cr_apply", "cr apply"},
      {"filled_section", "cr filled"},
      {"linear_cr_solve", "cr solve"},
      {"kernel_diagnostic", "cr kernel"},
      {"fredholm_index", "cr index"},
      {"contraction_modulus", "cr contraction"},
      {"transversal_constraint", "cr constraint"},
      {"run_command", "(dispatcher)"},
      {"emit_plot_script", "sweep-estimates --plot"},
      {"verify", "verify"},
  };
}

}  // namespace polyglue

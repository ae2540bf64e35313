#pragma once

#include <random>
#include <string>
#include <vector>

#include "polyglue/grid.hpp"
#include "polyglue/report.hpp"
#include "polyglue/splice.hpp"

namespace polyglue {

/// Parameter grid for gluing-estimate sweeps. Moduli are realized through
/// the profile's inverse at the listed neck lengths, which keeps |a| in
/// (0, 1/2] and the necks at desk scale.
struct SweepSpec {
  std::vector<double> lengths = {5, 10, 20, 40};
  double twist = 0.0;
  std::vector<int> levels = {0, 1};
  double ds = 0.125;
  int n_t = 16;
  double margin = 4.0;  ///< half-cylinders span [0, R + margin]
  int dim = 2;
  int samples = 20;
  unsigned seed = 1;
  Profile profile = Profile::exponential;
  int jobs = 1;
};

struct SweepRow {
  double abs_a = 0.0;
  double R = 0.0;
  int m = 0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
};

enum class SweepMode { hat_gluing, total_gluing, d_s, d_t, c_s, c_t };

SweepMode sweep_mode_from_string(const std::string& name);

/// Empirical norm-ratio envelopes over the parameter grid:
///  hat_gluing:   |hat-glue pair|_{G-hat,m} / |xi|_{F_m}
///  total_gluing: |glue pair|_{G,m} / |h|_{E_m}
///  d_*/c_*:      |transfer(eta)|_{F_m} / |eta|_{E_m}
std::vector<SweepRow> run_sweep(const SweepSpec& spec, SweepMode mode);

std::string sweep_csv(const std::vector<SweepRow>& rows, const SweepSpec& spec, SweepMode mode);
std::string sweep_plot(const std::vector<SweepRow>& rows, SweepMode mode);

/// Random smooth decaying samples used by sweeps and tests. The default
/// decay window sits above the level-1 weight so every norm in play is
/// finite; sweeps tighten it to just above the level weight.
MapPair random_F_pair(const Grid& plus_grid, int dim, std::mt19937_64& rng,
                      double kappa_min = 5.0, double kappa_max = 6.5);
MapPair random_E_pair(const Grid& plus_grid, int dim, std::mt19937_64& rng,
                      double kappa_min = 5.0, double kappa_max = 6.5);

}  // namespace polyglue

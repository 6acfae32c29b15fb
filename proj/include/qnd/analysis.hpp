// Decay-law extraction and spectral comparison for finished runs.
//
// Fits are two-stage. Stage one estimates the asymptote C_inf; stage two is a
// linear regression of log|C - C_inf| against dr (exponential) or log dr
// (algebraic), which yields the decay parameter, amplitude and r^2.
//
// The default asymptote comes from a least-squares fit of C_inf + A g(dr)
// over the fit window (A and C_inf solved linearly for each trial decay
// parameter, the parameter found by a bracketed one-dimensional search). The
// trailing-mean estimator (mean over the last 20% of separations) is kept as
// an option.

#ifndef QND_ANALYSIS_HPP
#define QND_ANALYSIS_HPP

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "qnd/designer.hpp"
#include "qnd/lattice.hpp"

namespace qnd {

enum class DecayLaw { exponential, algebraic };

std::string_view to_string(DecayLaw law);

enum class OffsetEstimator { fitted, trailing_mean };

struct FitRange {
  int first = 1;
  int last = 15;
};

struct FitOptions {
  OffsetEstimator offset = OffsetEstimator::fitted;
  double trailing_fraction = 0.2;
};

/// Values indexed by separation, values(i) belongs to dr = first + i.
struct SeparationSeries {
  int first = 0;
  Eigen::VectorXd values;

  int last() const { return first + static_cast<int>(values.size()) - 1; }
  double at(int dr) const { return values(dr - first); }
};

struct FitResult {
  DecayLaw law = DecayLaw::exponential;
  double parameter = std::numeric_limits<double>::quiet_NaN();  // xi or zeta
  double amplitude = std::numeric_limits<double>::quiet_NaN();  // signed
  double offset = std::numeric_limits<double>::quiet_NaN();     // C_inf
  double r_squared = std::numeric_limits<double>::quiet_NaN();
  FitRange range;
  std::string flag;  // empty when the fit is clean

  bool ok() const { return flag.empty(); }
};

/// Throws std::invalid_argument when the range leaves the data or holds
/// fewer than four points. Degenerate data is flagged, not thrown.
FitResult fit_decay(DecayLaw law, const SeparationSeries& series, FitRange range, const FitOptions& opt = {});

inline FitResult fit_exponential(const SeparationSeries& s, FitRange r, const FitOptions& o = {}) {
  return fit_decay(DecayLaw::exponential, s, r, o);
}
inline FitResult fit_algebraic(const SeparationSeries& s, FitRange r, const FitOptions& o = {}) {
  return fit_decay(DecayLaw::algebraic, s, r, o);
}

/// Estimate of C_inf on its own.
double estimate_offset(DecayLaw law, const SeparationSeries& series, FitRange range, const FitOptions& opt = {});

DecayLaw natural_law(const TargetSpec& spec);

/// [1, 3 xi] for exponential targets, [2, n_s/6] otherwise.
FitRange default_fit_range(const TargetSpec& spec, int n_sites);

/// Pearson correlation; empty when either input has zero variance.
std::optional<double> pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// First mode index outside the smallest 10% of |k| in [0, pi].
int spectral_window_start(int n_sites);

/// Pearson correlation between the summed-component spectrum and the design
/// profile Gamma0 (1 - f_p / 4), over p = spectral_window_start..n_s/2.
std::optional<double> spectrum_match(const CovarianceStated& state, const DesignResult& design,
                                     const EnsembleConfig& config);

/// Mode index of the deepest spectral dip inside the spectral window.
int squeezing_peak(const Eigen::VectorXd& total_spectrum, int n_sites);

}  // namespace qnd

#endif  // QND_ANALYSIS_HPP

#include "qnd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

namespace qnd {

std::string_view to_string(DecayLaw law) {
  return law == DecayLaw::exponential ? "exponential" : "algebraic";
}

namespace {

double basis(DecayLaw law, int dr, double parameter) {
  return law == DecayLaw::exponential ? std::exp(-dr / parameter) : std::pow(static_cast<double>(dr), -parameter);
}

struct LinearFit {
  double amplitude = 0.0;
  double offset = 0.0;
  double sse = 0.0;
  double slope = 0.0;  // d sse / d log(parameter)
};

// Least squares for y ~ amplitude * g + offset at fixed decay parameter. The
// derivative of the profiled sse only needs the residual (envelope theorem).
LinearFit solve_linear(DecayLaw law, const SeparationSeries& s, FitRange r, double parameter) {
  const int n = r.last - r.first + 1;
  Eigen::MatrixX2d x(n, 2);
  Eigen::VectorXd y(n);
  Eigen::VectorXd dg(n);
  for (int i = 0; i < n; ++i) {
    const int dr = r.first + i;
    const double g = basis(law, dr, parameter);
    x(i, 0) = g;
    x(i, 1) = 1.0;
    y(i) = s.at(dr);
    dg(i) = law == DecayLaw::exponential ? g * dr / parameter : -g * std::log(static_cast<double>(dr)) * parameter;
  }
  const Eigen::Vector2d sol = x.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd res = y - x * sol;
  return {sol(0), sol(1), res.squaredNorm(), -2.0 * sol(0) * res.dot(dg)};
}

double fitted_offset(DecayLaw law, const SeparationSeries& s, FitRange r) {
  // search over t = log(parameter)
  const double lo = law == DecayLaw::exponential ? std::log(1e-2) : std::log(1e-3);
  const double hi = law == DecayLaw::exponential ? std::log(1e3 * (r.last + 1)) : std::log(20.0);
  auto at = [&](double t) { return solve_linear(law, s, r, std::exp(t)); };

  constexpr int kGrid = 400;
  int best = 0;
  double best_cost = at(lo).sse;
  for (int i = 1; i <= kGrid; ++i) {
    const double c = at(lo + (hi - lo) * i / kGrid).sse;
    if (c < best_cost) {
      best_cost = c;
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(best - 1, 0) / kGrid;
  double b = lo + (hi - lo) * std::min(best + 1, kGrid) / kGrid;

  // bisection on the sign of the derivative pins the minimum to rounding level
  if (at(a).slope < 0.0 && at(b).slope > 0.0) {
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      if (!(m > a && m < b)) break;
      (at(m).slope < 0.0 ? a : b) = m;
    }
    return at(0.5 * (a + b)).offset;
  }

  // minimum on the search boundary: golden section on the value
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = at(c).sse;
  double fd = at(d).sse;
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = at(c).sse;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = at(d).sse;
    }
  }
  return at(0.5 * (a + b)).offset;
}

double trailing_offset(const SeparationSeries& s, double fraction) {
  const int first = std::max(s.first, 1);
  const int count = s.last() - first + 1;
  if (count < 1) throw std::invalid_argument("no separations >= 1 for the offset estimate");
  const int tail = std::max(1, static_cast<int>(std::lround(fraction * count)));
  double acc = 0.0;
  for (int dr = s.last() - tail + 1; dr <= s.last(); ++dr) acc += s.at(dr);
  return acc / tail;
}

void check_range(const SeparationSeries& s, FitRange r) {
  if (r.first < std::max(s.first, 1) || r.last > s.last())
    throw std::invalid_argument("fit range [" + std::to_string(r.first) + ", " + std::to_string(r.last) +
                                "] outside data [" + std::to_string(std::max(s.first, 1)) + ", " +
                                std::to_string(s.last()) + "]");
  if (r.last - r.first + 1 < 4) throw std::invalid_argument("fit range needs at least 4 points");
}

}  // namespace

double estimate_offset(DecayLaw law, const SeparationSeries& series, FitRange range, const FitOptions& opt) {
  check_range(series, range);
  return opt.offset == OffsetEstimator::fitted ? fitted_offset(law, series, range)
                                                : trailing_offset(series, opt.trailing_fraction);
}

FitResult fit_decay(DecayLaw law, const SeparationSeries& series, FitRange range, const FitOptions& opt) {
  check_range(series, range);
  FitResult out;
  out.law = law;
  out.range = range;

  const Eigen::VectorXd window = series.values.segment(range.first - series.first, range.last - range.first + 1);
  const double mean = window.mean();
  if ((window.array() - mean).abs().maxCoeff() <= 1e-14 * std::max(1.0, std::abs(mean))) {
    out.offset = mean;
    out.flag = "no decay: data constant over the fit range";
    return out;
  }

  out.offset = estimate_offset(law, series, range, opt);

  std::vector<double> xs;
  std::vector<double> ys;
  double signed_sum = 0.0;
  for (int dr = range.first; dr <= range.last; ++dr) {
    const double dev = series.at(dr) - out.offset;
    signed_sum += dev;
    if (std::abs(dev) > 0.0 && std::isfinite(dev)) {
      xs.push_back(law == DecayLaw::exponential ? dr : std::log(static_cast<double>(dr)));
      ys.push_back(std::log(std::abs(dev)));
    }
  }
  if (xs.size() != static_cast<std::size_t>(range.last - range.first + 1))
    out.flag = "non-positive residuals after offset subtraction";
  if (xs.size() < 2) {
    out.flag = "no decay: residuals vanish after offset subtraction";
    return out;
  }

  const Eigen::Map<const Eigen::VectorXd> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
  const double xm = x.mean();
  const double ym = y.mean();
  const double sxx = (x.array() - xm).square().sum();
  const double sxy = ((x.array() - xm) * (y.array() - ym)).sum();
  const double slope = sxy / sxx;
  const double intercept = ym - slope * xm;
  const double ss_tot = (y.array() - ym).square().sum();
  const double ss_res = (y.array() - (intercept + slope * x.array())).square().sum();
  out.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  out.amplitude = (signed_sum < 0.0 ? -1.0 : 1.0) * std::exp(intercept);

  if (!(slope < 0.0)) {
    out.flag = "no decay: |C - C_inf| does not decrease";
    return out;
  }
  out.parameter = law == DecayLaw::exponential ? -1.0 / slope : -slope;
  return out;
}

DecayLaw natural_law(const TargetSpec& spec) {
  return std::holds_alternative<ExponentialDecay>(spec.shape) ? DecayLaw::exponential : DecayLaw::algebraic;
}

FitRange default_fit_range(const TargetSpec& spec, int n_sites) {
  const int half = n_sites / 2;
  if (const auto* e = std::get_if<ExponentialDecay>(&spec.shape)) {
    const int last = std::clamp(static_cast<int>(std::lround(3.0 * e->correlation_length)), 4, half);
    return {1, last};
  }
  return {2, std::max(5, n_sites / 6)};
}

std::optional<double> pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("pearson: size mismatch");
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  const double va = da.square().sum();
  const double vb = db.square().sum();
  const double scale_a = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double scale_b = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (va <= 1e-24 * scale_a * scale_a * a.size() || vb <= 1e-24 * scale_b * scale_b * b.size())
    return std::nullopt;
  return (da * db).sum() / std::sqrt(va * vb);
}

int spectral_window_start(int n_sites) { return static_cast<int>(std::ceil(0.1 * (n_sites / 2))); }

std::optional<double> spectrum_match(const CovarianceStated& state, const DesignResult& design,
                                     const EnsembleConfig& config) {
  const int half = config.n_sites / 2;
  if (design.fractions.size() != half + 1) throw std::invalid_argument("design does not match n_sites");
  const Eigen::VectorXd total = k_spectrum_total(state).values;
  const int start = spectral_window_start(config.n_sites);
  const int len = half - start + 1;
  const Eigen::VectorXd measured = total.segment(start, len);
  const Eigen::VectorXd target =
      gamma0(config) * (1.0 - design.fractions.segment(start, len).array() / 4.0).matrix();
  return pearson(measured, target);
}

int squeezing_peak(const Eigen::VectorXd& total_spectrum, int n_sites) {
  const int start = spectral_window_start(n_sites);
  Eigen::Index idx = 0;
  total_spectrum.segment(start, n_sites / 2 - start + 1).minCoeff(&idx);
  return start + static_cast<int>(idx);
}

}  // namespace qnd

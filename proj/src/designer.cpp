#include "qnd/designer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qnd/errors.hpp"
#include "qnd/pulse_engine.hpp"

namespace qnd {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double power_law(int dr, double exponent) { return std::pow(static_cast<double>(std::max(dr, 1)), -exponent); }

}  // namespace

void validate(const TargetSpec& spec, int n_sites) {
  if (!std::isfinite(spec.c_max) || !(spec.c_max > 0.0))
    throw ConfigError("c_max must be finite and positive");
  std::visit(Overloaded{
                 [](const ExponentialDecay& t) {
                   if (!(t.correlation_length > 0.0) || !std::isfinite(t.correlation_length))
                     throw ConfigError("correlation_length must be positive");
                 },
                 [](const AlgebraicDecay& t) {
                   if (!(t.exponent > 0.0) || !std::isfinite(t.exponent))
                     throw ConfigError("exponent must be positive");
                 },
                 [](const ModulatedAlgebraicDecay& t) {
                   if (!(t.exponent > 0.0) || !std::isfinite(t.exponent))
                     throw ConfigError("exponent must be positive");
                   if (t.period < 1) throw ConfigError("period must be a positive integer");
                 },
                 [n_sites](const TabulatedTarget& t) {
                   for (int dr = 1; dr <= n_sites / 2; ++dr)
                     if (!t.samples.contains(dr))
                       throw ConfigError("tabulated target is missing separation dr=" + std::to_string(dr));
                 },
             },
             spec.shape);
}

Eigen::VectorXd sample_target(const TargetSpec& spec, int n_sites) {
  validate(spec, n_sites);
  const int half = n_sites / 2;
  Eigen::VectorXd s(half + 1);
  for (int dr = 0; dr <= half; ++dr) {
    s(dr) = std::visit(
        Overloaded{
            [dr](const ExponentialDecay& t) { return std::exp(-dr / t.correlation_length); },
            [dr](const AlgebraicDecay& t) { return power_law(dr, t.exponent); },
            [dr](const ModulatedAlgebraicDecay& t) {
              return std::cos(2.0 * std::numbers::pi * dr / t.period) * power_law(dr, t.exponent);
            },
            [dr](const TabulatedTarget& t) {
              const auto it = t.samples.find(dr);
              return it != t.samples.end() ? it->second : t.samples.at(1);
            },
        },
        spec.shape);
  }
  const int tail = std::max(1, static_cast<int>(std::lround(0.1 * half)));
  s.array() -= s.tail(tail).mean();
  return s;
}

RawFractions target_to_fractions(const Eigen::VectorXd& samples, const EnsembleConfig& config) {
  const int n = config.n_sites;
  const int half = n / 2;
  if (samples.size() != half + 1) throw std::invalid_argument("samples must cover dr = 0..n_sites/2");
  const double g0 = gamma0(config);

  RawFractions out;
  out.values.resize(half + 1);
  for (int p = 0; p <= half; ++p) {
    double acc = 0.0;
    for (int dr = 0; dr <= half; ++dr) {
      const double w = (dr == 0 || dr == half) ? 0.5 : 1.0;
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((p * dr) % n) / n;
      acc += w * std::cos(phase) * samples(dr);
    }
    out.values(p) = (2.0 / n) * acc * 4.0 / g0;
  }
  const double total = out.values.cwiseAbs().sum();
  const double negative = -out.values.cwiseMin(0.0).sum();
  out.clipped_mass = total > 0.0 ? negative / total : 0.0;
  out.values = out.values.cwiseMax(0.0);
  return out;
}

double weight_norm2(int p, int n_sites) { return standing_wave_weights<double>(p, n_sites).squaredNorm(); }

namespace {

// Mixed-state response of one standing-wave mode.
struct ModeResponse {
  double g0;
  double spin;
  double n;
  double norm2;

  ModeResponse(int p, const EnsembleConfig& config)
      : g0(gamma0(config)), spin(config.spin), n(config.n_sites), norm2(weight_norm2(p, config.n_sites)) {}

  double pole() const { return n / (4.0 * norm2); }

  double fraction(double coupling) const {
    const double c2 = coupling * coupling;
    const double gamma22 = kLightVarianceIn + c2 * g0 * norm2 / (n * spin);
    return g0 * c2 / (4.0 * spin * gamma22);
  }

  double coupling(double f) const {
    if (!(f >= 0.0) || f >= pole())
      throw std::domain_error("fraction " + std::to_string(f) + " outside [0, " + std::to_string(pole()) + ")");
    if (f == 0.0) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    while (fraction(hi) < f) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (fraction(mid) < f ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

}  // namespace

double fraction_pole(int p, const EnsembleConfig& config) { return ModeResponse(p, config).pole(); }

double fraction_for_coupling(double coupling, int p, const EnsembleConfig& config) {
  return ModeResponse(p, config).fraction(coupling);
}

double coupling_for_fraction(double fraction, int p, const EnsembleConfig& config) {
  return ModeResponse(p, config).coupling(fraction);
}

double coupling_closed_form(double fraction, int p, const EnsembleConfig& config) {
  const double pole = fraction_pole(p, config);
  return 2.0 * std::sqrt(config.spin) *
         std::sqrt(kLightVarianceIn * fraction / (gamma0(config) * (1.0 - fraction / pole)));
}

DesignResult fractions_to_couplings(const RawFractions& raw, const EnsembleConfig& config, double c_max) {
  validate(config);
  const int half = config.n_sites / 2;
  if (raw.values.size() != half + 1) throw std::invalid_argument("fractions must cover p = 0..n_sites/2");
  if (!std::isfinite(c_max) || !(c_max > 0.0)) throw ConfigError("c_max must be finite and positive");
  if ((raw.values.array() < 0.0).any()) throw std::invalid_argument("raw fractions must be non-negative");
  if (raw.values.maxCoeff() <= 0.0) throw DegenerateTarget();
  if (config.finite_depth() && c_max * c_max / config.optical_depth > 0.5) {
    const double reachable = std::sqrt(0.5 * config.optical_depth);
    throw InfeasibleTarget("c_max=" + std::to_string(c_max) + " needs eta > 1/2 at d=" +
                               std::to_string(config.optical_depth) + "; max achievable c_max is " +
                               std::to_string(reachable),
                           reachable);
  }

  std::vector<ModeResponse> modes;
  modes.reserve(half + 1);
  for (int p = 0; p <= half; ++p) modes.emplace_back(p, config);

  double scale_pole = std::numeric_limits<double>::infinity();
  for (int p = 0; p <= half; ++p)
    if (raw.values(p) > 0.0) scale_pole = std::min(scale_pole, modes[p].pole() / raw.values(p));

  auto couplings_at = [&](double s) {
    Eigen::VectorXd c(half + 1);
    for (int p = 0; p <= half; ++p) c(p) = modes[p].coupling(s * raw.values(p));
    return c;
  };

  // max_p C_p grows monotonically from 0 to infinity on (0, scale_pole)
  double lo = 0.0;
  double hi = scale_pole;
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    s = 0.5 * (lo + hi);
    if (!(s > lo && s < hi)) break;
    const double top = couplings_at(s).maxCoeff();
    if (std::abs(top - c_max) <= 1e-12 * c_max) break;
    (top < c_max ? lo : hi) = s;
  }

  DesignResult r;
  r.scale = s;
  r.fractions = s * raw.values;
  r.couplings = couplings_at(s);
  r.clipped_mass = raw.clipped_mass;
  return r;
}

DesignResult design(const TargetSpec& spec, const EnsembleConfig& config) {
  validate(config);
  const RawFractions raw = target_to_fractions(sample_target(spec, config.n_sites), config);
  return fractions_to_couplings(raw, config, spec.c_max);
}

TabulatedTarget parse_tabulated_target(std::istream& in) {
  TabulatedTarget t;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double dr = 0.0;
    double value = 0.0;
    if (!(fields >> dr)) continue;  // blank or comment-only
    std::string rest;
    if (!(fields >> value) || (fields >> rest))
      throw ConfigError("target table line " + std::to_string(line_no) + ": expected two columns");
    if (dr < 0.0 || dr != std::floor(dr))
      throw ConfigError("target table line " + std::to_string(line_no) + ": separation must be a non-negative integer");
    if (!std::isfinite(value)) throw ConfigError("target table line " + std::to_string(line_no) + ": non-finite value");
    if (!t.samples.emplace(static_cast<int>(dr), value).second)
      throw ConfigError("target table line " + std::to_string(line_no) + ": duplicate separation");
  }
  return t;
}

TabulatedTarget read_tabulated_target(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read target table " + path.string());
  return parse_tabulated_target(in);
}

}  // namespace qnd

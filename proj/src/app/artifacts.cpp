#include "app/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "qnd/errors.hpp"

namespace qndsim {

namespace {

using json = nlohmann::ordered_json;

qnd::FitResult fit_witness(const RunConfig& cfg, const qnd::WitnessScan& scan) {
  const qnd::DecayLaw law = fit_law(cfg);
  qnd::FitResult fr;
  fr.law = law;
  if (scan.minima.empty()) {
    fr.flag = "no witness data";
    return fr;
  }
  const int first_dr = scan.minima.front().delta_r;
  const int last_dr = scan.minima.back().delta_r;
  qnd::FitRange r;
  r.first = std::max(first_dr, law == qnd::DecayLaw::algebraic ? 2 : 1);
  r.last = std::min(last_dr, qnd::witness_near_field_limit(cfg.witness, cfg.ensemble.n_sites));
  fr.range = r;
  if (r.last - r.first + 1 < 4) {
    fr.flag = "witness fit window shorter than 4 points";
    return fr;
  }
  qnd::SeparationSeries s;
  s.first = first_dr;
  s.values.resize(static_cast<Eigen::Index>(scan.minima.size()));
  for (std::size_t i = 0; i < scan.minima.size(); ++i) s.values(i) = -scan.minima[i].w_at_zero_phase;
  return qnd::fit_decay(law, s, r);
}

json fit_json(const qnd::FitResult& f) {
  json j;
  j["law"] = std::string(qnd::to_string(f.law));
  j["parameter"] = f.parameter;
  j["amplitude"] = f.amplitude;
  j["offset"] = f.offset;
  j["r_squared"] = f.r_squared;
  j["range"] = {f.range.first, f.range.last};
  j["flag"] = f.flag.empty() ? json(nullptr) : json(f.flag);
  return j;
}

std::ofstream open_csv(const std::filesystem::path& path, const RunOutcome& out) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << std::setprecision(17);
  f << "# config_hash = " << out.hash << '\n';
  std::istringstream lines(canonical_text(out.config));
  for (std::string line; std::getline(lines, line);) f << "# " << line << '\n';
  return f;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

}  // namespace

RunOutcome simulate(const RunConfig& cfg) {
  validate(cfg);
  RunOutcome out;
  out.config = cfg;
  out.hash = hash_hex(config_hash(cfg));
  out.spec = target_spec(cfg);
  out.design = qnd::design(out.spec, cfg.ensemble);
  out.plan = qnd::build_plan(out.design, cfg.ensemble, cfg.order);
  out.result = qnd::run(out.plan, cfg.ensemble);
  qnd::require_invariants(out.result.state, cfg.ensemble);

  out.order_compared =
      cfg.order == qnd::OrderPolicy::descending_p ? qnd::OrderPolicy::ascending_p : qnd::OrderPolicy::descending_p;
  const auto other = qnd::run(qnd::build_plan(out.design, cfg.ensemble, out.order_compared), cfg.ensemble);
  out.order_sensitivity =
      (other.report.correlation - out.result.report.correlation).cwiseAbs().maxCoeff();
  out.invariants = qnd::inspect(out.result.state, /*with_spectrum=*/true);

  qnd::SeparationSeries corr{0, out.result.report.correlation};
  out.correlation_fit = qnd::fit_decay(fit_law(cfg), corr, fit_range(cfg, out.spec));

  out.witness = qnd::witness_scan(out.result.state, cfg.ensemble, cfg.witness);
  out.witness_fit = fit_witness(cfg, out.witness);

  out.spectrum_match = qnd::spectrum_match(out.result.state, out.design, cfg.ensemble);
  out.squeezing_peak = qnd::squeezing_peak(out.result.report.total_spectrum, cfg.ensemble.n_sites);
  return out;
}

void write_artifacts(const RunOutcome& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto& cfg = out.config;
  const int n = cfg.ensemble.n_sites;
  const double g0 = qnd::gamma0(cfg.ensemble);
  const auto& report = out.result.report;

  {
    auto f = open_csv(dir / "correlation.csv", out);
    f << "delta_r,C,abs_dev\n";
    for (Eigen::Index dr = 0; dr < report.correlation.size(); ++dr) {
      const double c = report.correlation(dr);
      f << dr << ',' << c << ',' << std::abs(c - out.correlation_fit.offset) << '\n';
    }
  }
  {
    auto f = open_csv(dir / "spectrum.csv", out);
    f << "m,k,x,y,z,mean,target\n";
    for (int m = 0; m < n; ++m) {
      const int p = std::min(m, n - m);
      const double k = 2.0 * std::numbers::pi * m / n;
      f << m << ',' << k;
      for (int a = 0; a < 3; ++a) f << ',' << report.spectra[a](m) / g0;
      f << ',' << report.total_spectrum(m) / (3.0 * g0) << ',' << 1.0 - out.design.fractions(p) / 4.0 << '\n';
    }
  }
  {
    auto f = open_csv(dir / "witness.csv", out);
    f << "delta_r,phi,W\n";
    for (const auto& c : out.witness.cells) f << c.delta_r << ',' << c.phi << ',' << c.w << '\n';
  }
  {
    auto f = open_csv(dir / "witness_min.csv", out);
    f << "delta_r,phi_min,W_min,W_phi0\n";
    for (const auto& m : out.witness.minima)
      f << m.delta_r << ',' << m.phi << ',' << m.w << ',' << m.w_at_zero_phase << '\n';
  }

  json fits;
  fits["config_hash"] = out.hash;
  fits["correlation_fit"] = fit_json(out.correlation_fit);
  fits["witness_fit"] = fit_json(out.witness_fit);
  fits["clipped_mass"] = out.design.clipped_mass;
  fits["design_scale"] = out.design.scale;
  fits["max_coupling"] = out.design.couplings.maxCoeff();
  fits["pulses"] = out.plan.pulses.size();
  fits["total_eta"] = out.plan.total_eta;
  fits["spectrum_match"] = out.spectrum_match ? json(*out.spectrum_match) : json(nullptr);
  fits["order_sensitivity"] = {{"compared_with", std::string(qnd::to_string(out.order_compared))},
                                {"max_abs_deviation", out.order_sensitivity}};
  fits["squeezing_peak"] = {{"p", out.squeezing_peak}, {"k", 2.0 * std::numbers::pi * out.squeezing_peak / n}};
  fits["invariants"] = {{"min_eigenvalue", out.invariants.min_eigenvalue},
                        {"max_asymmetry", out.invariants.max_asymmetry},
                        {"min_variance", out.invariants.min_diagonal},
                        {"max_variance", out.invariants.max_diagonal},
                        {"max_spectral_asymmetry", out.invariants.max_spectral_asymmetry},
                        {"max_imaginary", out.invariants.max_imaginary}};
  write_json(dir / "fits.json", fits);

  json trace;
  trace["config_hash"] = out.hash;
  trace["order_policy"] = std::string(qnd::to_string(out.plan.order));
  json pulses = json::array();
  for (std::size_t i = 0; i < report.trace.size(); ++i) {
    const auto& e = report.trace[i];
    pulses.push_back({{"index", i},
                      {"p", e.pulse.p},
                      {"axis", qnd::axis_name(e.pulse.axis)},
                      {"coupling", e.pulse.coupling},
                      {"eta", e.pulse.eta},
                      {"gamma22_out", e.diagnostics.gamma22_out},
                      {"achieved_fraction", e.diagnostics.achieved_fraction},
                      {"variance_before", e.diagnostics.variance_before},
                      {"variance_after", e.diagnostics.variance_after},
                      {"feedback", true}});
  }
  trace["pulses"] = std::move(pulses);
  write_json(dir / "trace.json", trace);
}

std::string summary_text(const RunOutcome& out) {
  std::ostringstream s;
  s << std::setprecision(6);
  const auto& f = out.correlation_fit;
  s << "config " << out.hash << "  target=" << out.config.target
    << "  d=" << depth_label(out.config.ensemble.optical_depth) << '\n';
  s << "pulses " << out.plan.pulses.size() << "  total_eta " << out.plan.total_eta << "  clipped_mass "
    << out.design.clipped_mass << '\n';
  s << "correlation fit (" << qnd::to_string(f.law) << ", [" << f.range.first << ", " << f.range.last
    << "]): " << (f.law == qnd::DecayLaw::exponential ? "xi " : "zeta ") << f.parameter << "  r2 " << f.r_squared
    << "  C_inf " << f.offset;
  if (!f.ok()) s << "  [" << f.flag << "]";
  s << '\n';
  s << "spectrum match ";
  if (out.spectrum_match) s << *out.spectrum_match;
  else s << "undefined";
  s << "  squeezing peak p=" << out.squeezing_peak << '\n';
  const auto& w = out.witness_fit;
  s << "witness fit (" << qnd::to_string(w.law) << ", [" << w.range.first << ", " << w.range.last
    << "]): parameter " << w.parameter << "  r2 " << w.r_squared;
  if (!w.ok()) s << "  [" << w.flag << "]";
  s << '\n';
  s << "order sensitivity vs " << qnd::to_string(out.order_compared) << ": " << out.order_sensitivity << '\n';
  s << "wall " << out.result.report.wall_seconds << " s\n";
  return s.str();
}

}  // namespace qndsim

#include "app/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <future>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "app/artifacts.hpp"
#include "app/run_config.hpp"
#include "json.hpp"
#include "qnd/errors.hpp"

namespace qndsim {

namespace {

constexpr int kMonotoneSeparations = 20;
constexpr double kMonotoneTolerance = 1e-6;

int classify(std::exception_ptr ep, std::ostream& err) {
  try {
    std::rethrow_exception(ep);
  } catch (const qnd::InfeasibleTarget& e) {
    err << "infeasible target: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const qnd::DegenerateTarget& e) {
    err << "degenerate target: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const qnd::InvariantViolation& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::logic_error& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "output error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

struct Member {
  double d;
  std::filesystem::path dir;
  std::optional<RunOutcome> outcome;
  int code = kExitOk;
  std::string message;
};

int run_sweep(const RunConfig& base, const std::vector<std::string>& values, std::ostream& out, std::ostream& err) {
  std::vector<Member> members;
  for (const auto& v : values) {
    if (v.find_first_not_of(" \t") == std::string::npos) continue;
    const double d = parse_depth(v);
    members.push_back({d, base.output_dir / ("d=" + depth_label(d)), std::nullopt, kExitOk, {}});
  }
  if (members.empty()) throw qnd::ConfigError("--sweep needs at least one optical depth");
  std::stable_sort(members.begin(), members.end(), [](const Member& a, const Member& b) { return a.d < b.d; });

  std::vector<std::future<void>> jobs;
  for (auto& m : members) {
    jobs.push_back(std::async(std::launch::async, [&m, &base] {
      RunConfig cfg = base;
      cfg.ensemble.optical_depth = m.d;
      cfg.output_dir = m.dir;
      try {
        m.outcome = simulate(cfg);
        write_artifacts(*m.outcome, m.dir);
      } catch (...) {
        std::ostringstream msg;
        m.code = classify(std::current_exception(), msg);
        m.message = msg.str();
      }
    }));
  }
  for (auto& j : jobs) j.get();

  for (const auto& m : members)
    if (m.code != kExitOk) {
      err << "sweep member d=" << depth_label(m.d) << ": " << m.message;
      return m.code;
    }

  std::filesystem::create_directories(base.output_dir);
  const int half = base.ensemble.n_sites / 2;
  {
    std::ofstream f(base.output_dir / "sweep_correlation.csv");
    f << std::setprecision(17) << "d,delta_r,C\n";
    for (const auto& m : members) {
      const auto& c = m.outcome->result.report.correlation;
      for (int dr = 0; dr <= half; ++dr) f << depth_label(m.d) << ',' << dr << ',' << c(dr) << '\n';
    }
  }
  {
    std::ofstream f(base.output_dir / "sweep_summary.csv");
    f << std::setprecision(17) << "d,parameter,r_squared,offset,spectrum_match,total_eta\n";
    for (const auto& m : members) {
      const auto& o = *m.outcome;
      f << depth_label(m.d) << ',' << o.correlation_fit.parameter << ',' << o.correlation_fit.r_squared << ','
        << o.correlation_fit.offset << ',' << o.spectrum_match.value_or(std::nan("")) << ',' << o.plan.total_eta
        << '\n';
    }
  }

  // |C(dr)| may only grow with optical depth
  double worst = 0.0;
  std::string where;
  const int last = std::min(kMonotoneSeparations, half);
  for (std::size_t i = 1; i < members.size(); ++i) {
    const auto& lo = members[i - 1].outcome->result.report.correlation;
    const auto& hi = members[i].outcome->result.report.correlation;
    for (int dr = 1; dr <= last; ++dr) {
      const double drop = std::abs(lo(dr)) - std::abs(hi(dr));
      if (drop > worst) {
        worst = drop;
        where = "dr=" + std::to_string(dr) + " between d=" + depth_label(members[i - 1].d) + " and d=" +
                depth_label(members[i].d);
      }
    }
  }
  const bool monotone = worst <= kMonotoneTolerance;
  nlohmann::ordered_json j;
  j["depths"] = nlohmann::ordered_json::array();
  for (const auto& m : members) j["depths"].push_back(depth_label(m.d));
  j["monotonicity"] = monotone ? "pass" : "fail";
  j["monotone_in_d"] = monotone;
  j["largest_decrease"] = worst;
  j["largest_decrease_at"] = where;
  std::ofstream(base.output_dir / "sweep.json") << j.dump(2) << '\n';

  for (const auto& m : members) out << "== d=" << depth_label(m.d) << '\n' << summary_text(*m.outcome);
  out << "monotonicity in d (|C(dr)|, dr <= " << last << "): " << (monotone ? "pass" : "fail");
  if (!monotone) out << " (largest decrease " << worst << " at " << where << ")";
  out << '\n';
  if (!monotone) {
    err << "monotonicity in optical depth violated\n";
    return kExitInvariant;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inverse-designed spatial correlations in a lattice spin ensemble"};
  std::string preset_name;
  std::string config_path;
  std::string depth;
  std::string out_dir;
  std::string target_file;
  std::string order;
  std::string sweep;
  app.add_option("--preset", preset_name, "paper-a, paper-b or paper-critical (default paper-a)");
  app.add_option("--config", config_path, "key = value file applied on top of the preset");
  app.add_option("--d", depth, "optical depth, a positive number or inf");
  app.add_option("--out", out_dir, "output directory (default out, or $QNDSIM_OUTPUT_DIR)");
  app.add_option("--target-file", target_file, "two-column dr,value table; implies target = tabulated");
  app.add_option("--order-policy", order, "ascending_p, descending_p or descending_coupling");
  auto* sweep_opt = app.add_option("--sweep", sweep, "comma-separated optical depths, one run per value");

  std::vector<const char*> argv{"qndsim"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig cfg = preset(preset_name.empty() ? "paper-a" : preset_name);
    if (!config_path.empty()) cfg = load_config(config_path, cfg);
    if (!depth.empty()) cfg.ensemble.optical_depth = parse_depth(depth);
    if (!target_file.empty()) {
      cfg.target = "tabulated";
      cfg.target_file = target_file;
    }
    if (!order.empty()) cfg.order = qnd::parse_order_policy(order);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    else if (const char* env = std::getenv("QNDSIM_OUTPUT_DIR"); env && *env) cfg.output_dir = env;

    if (sweep_opt->count() > 0) return run_sweep(cfg, CLI::detail::split(sweep, ','), out, err);

    const RunOutcome outcome = simulate(cfg);
    write_artifacts(outcome, cfg.output_dir);
    out << summary_text(outcome);
    return kExitOk;
  } catch (...) {
    return classify(std::current_exception(), err);
  }
}

}  // namespace qndsim

#include "edgepose/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "edgepose/plot.hpp"
#include "edgepose/scenario_file.hpp"
#include "edgepose/sim.hpp"

namespace edgepose {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v.has_value() ? fmt(*v) : "nan";
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw std::invalid_argument("cannot write output file " + path);
  }
  return f;
}

std::string thresholds_field(const ThresholdSet& t) {
  std::string s;
  for (std::size_t i = 0; i < t.per_device.size(); ++i) {
    if (i) s += ";";
    s += fmt(t.per_device[i].low) + ":" + fmt(t.per_device[i].high) + ":" +
         fmt(t.per_device[i].server);
  }
  return s;
}

std::string tau_field(const TimeAllocation& tau) {
  std::string s;
  for (std::size_t i = 0; i < tau.tau.size(); ++i) {
    if (i) s += ";";
    s += fmt(tau.tau[i]);
  }
  return s;
}

void print_solution(std::ostream& out, const ScenarioFile& sf, const Solution& sol) {
  out << "feasible: " << (sol.feasible ? "yes" : "no") << "\n";
  if (!sol.feasible) {
    out << "minimum_achievable_delay_s: " << fmt(sol.min_achievable_delay_s) << "\n";
  }
  out << "sum_accuracy: " << fmt(sol.sum_accuracy) << "\n";
  out << "mean_accuracy: "
      << fmt(sol.sum_accuracy / static_cast<double>(sf.scenario.n_devices)) << "\n";
  out << "mean_delay_s: " << fmt(sol.mean_delay_s) << "\n";
  out << "d_req_s: " << fmt(sf.config.resolve_d_req(sf.scenario)) << "\n";
  out << "outer_iterations: " << sol.outer_iterations
      << (sol.converged ? " (converged)" : " (iteration cap)") << "\n";
  out << "delay breakdown [s]: device_proc=" << fmt(sol.breakdown.device_proc)
      << " device_inf=" << fmt(sol.breakdown.device_inf)
      << " uplink=" << fmt(sol.breakdown.uplink_tx)
      << " backhaul=" << fmt(sol.breakdown.backhaul_tx)
      << " server_inf=" << fmt(sol.breakdown.server_inf)
      << " server_proc=" << fmt(sol.breakdown.server_proc)
      << " downlink=" << fmt(sol.breakdown.downlink_tx) << "\n";
  out << "device thresholds (low high server) and tau:\n";
  for (int i = 0; i < sf.scenario.n_devices; ++i) {
    const auto& t = sol.thresholds.per_device[i];
    out << "  device " << i << ": " << fmt(t.low) << " " << fmt(t.high) << " "
        << fmt(t.server) << "  tau=" << fmt(sol.tau.tau[i]) << "\n";
  }
}

int cmd_optimize(const std::string& scenario_path, const std::string& diagnostics_path,
                 std::ostream& out) {
  const ScenarioFile sf = load_scenario_file(scenario_path);
  const Solution sol = optimize(sf.scenario, sf.config);
  print_solution(out, sf, sol);
  if (!diagnostics_path.empty()) {
    auto f = open_output(diagnostics_path);
    write_provenance(f, sf);
    f << "iter,sum_acc,delay_s,lambda,mu\n";
    for (const auto& r : sol.diagnostics) {
      f << r.iter << "," << fmt(r.sum_accuracy) << "," << fmt(r.delay_s) << ","
        << fmt(r.lambda) << "," << fmt(r.mu) << "\n";
    }
  }
  return sol.feasible ? kExitOk : kExitInfeasible;
}

int cmd_compare(const std::string& scenario_path, const std::string& csv_path,
                std::ostream& out) {
  const ScenarioFile sf = load_scenario_file(scenario_path);
  const Strategy all[] = {Strategy::kDeviceCentric, Strategy::kServerCentric,
                          Strategy::kCascade, Strategy::kProposed};
  std::ostringstream csv;
  write_provenance(csv, sf);
  csv << "strategy,sum_accuracy,delay_s,feasible,thresholds,tau\n";
  out << "strategy     sum_acc      delay_s      feasible\n";
  for (Strategy s : all) {
    const Solution sol = optimize_strategy(sf.scenario, s, sf.config);
    csv << strategy_name(s) << "," << fmt(sol.sum_accuracy) << "," << fmt(sol.mean_delay_s)
        << "," << (sol.feasible ? 1 : 0) << "," << thresholds_field(sol.thresholds) << ","
        << tau_field(sol.tau) << "\n";
    char line[160];
    std::snprintf(line, sizeof(line), "%-12s %-12.6f %-12.6f %s\n", strategy_name(s),
                  sol.sum_accuracy, sol.mean_delay_s, sol.feasible ? "yes" : "no");
    out << line;
  }
  if (!csv_path.empty()) {
    auto f = open_output(csv_path);
    f << csv.str();
  }
  return kExitOk;
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "d_req") return SweepAxis::kDReq;
  if (name == "n_devices") return SweepAxis::kNDevices;
  if (name == "gain_db") return SweepAxis::kGainDb;
  if (name == "image_bytes") return SweepAxis::kImageBytes;
  if (name == "t_inf_device") return SweepAxis::kTInfDevice;
  throw std::invalid_argument("unknown sweep axis '" + name +
                              "' (expected d_req, n_devices, gain_db, image_bytes, "
                              "t_inf_device)");
}

std::vector<Strategy> parse_strategies(const std::string& csv) {
  std::vector<Strategy> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "device") {
      out.push_back(Strategy::kDeviceCentric);
    } else if (item == "server") {
      out.push_back(Strategy::kServerCentric);
    } else if (item == "cascade") {
      out.push_back(Strategy::kCascade);
    } else if (item == "proposed") {
      out.push_back(Strategy::kProposed);
    } else {
      throw std::invalid_argument("unknown strategy '" + item + "'");
    }
  }
  if (out.empty()) {
    throw std::invalid_argument("no strategies requested");
  }
  return out;
}

int cmd_sweep(const std::string& scenario_path, const std::string& axis_name,
              const std::vector<double>& values, const std::string& strategies_csv,
              const std::string& out_path, bool with_sim, int frames,
              const std::string& plot_prefix, std::ostream& out) {
  const ScenarioFile sf = load_scenario_file(scenario_path);
  const SweepAxis axis = parse_axis(axis_name);
  if (values.empty()) {
    throw std::invalid_argument("sweep: --values is required");
  }
  const auto strategies = parse_strategies(strategies_csv);
  const auto rows = sweep(sf.scenario, axis, values, strategies, sf.config, with_sim, frames);

  std::ostringstream csv;
  write_provenance(csv, sf);
  csv << "axis_value,strategy,sum_accuracy,mpjpe_m,delay_s,feasible,drop_rate\n";
  for (const auto& r : rows) {
    csv << fmt(r.axis_value) << "," << strategy_name(r.strategy) << ","
        << fmt(r.sum_accuracy) << "," << fmt_opt(r.mpjpe_m) << "," << fmt(r.delay_s) << ","
        << (r.feasible ? 1 : 0) << "," << fmt_opt(r.drop_rate) << "\n";
  }
  if (!out_path.empty()) {
    auto f = open_output(out_path);
    f << csv.str();
  } else {
    out << csv.str();
  }

  if (!plot_prefix.empty()) {
    const std::map<Strategy, std::string> colors = {
        {Strategy::kDeviceCentric, "#1f77b4"},
        {Strategy::kServerCentric, "#d62728"},
        {Strategy::kCascade, "#2ca02c"},
        {Strategy::kProposed, "#9467bd"},
    };
    auto series_for = [&](auto value_of) {
      std::vector<PlotSeries> series;
      for (Strategy s : strategies) {
        PlotSeries ps;
        ps.label = strategy_name(s);
        ps.color = colors.at(s);
        for (const auto& r : rows) {
          if (r.strategy != s) continue;
          const auto v = value_of(r);
          if (v.has_value()) ps.points.emplace_back(r.axis_value, *v);
        }
        series.push_back(std::move(ps));
      }
      return series;
    };
    write_line_chart(plot_prefix + "_accuracy.svg", "sum accuracy vs " + axis_name, axis_name,
                     "sum accuracy", series_for([](const SweepRow& r) {
                       return std::optional<double>(r.sum_accuracy);
                     }));
    write_line_chart(plot_prefix + "_delay.svg", "mean delay vs " + axis_name, axis_name,
                     "delay [s]", series_for([](const SweepRow& r) {
                       return std::optional<double>(r.delay_s);
                     }));
    if (with_sim) {
      write_line_chart(plot_prefix + "_mpjpe.svg", "MPJPE vs " + axis_name, axis_name,
                       "MPJPE [m]",
                       series_for([](const SweepRow& r) { return r.mpjpe_m; }));
    }
  }
  return kExitOk;
}

int cmd_simulate(const std::string& scenario_path, int frames,
                 const std::vector<double>& thresholds_arg, const std::string& out_path,
                 std::ostream& out) {
  const ScenarioFile sf = load_scenario_file(scenario_path);
  const Scenario& s = sf.scenario;

  ThresholdSet thresholds;
  TimeAllocation tau;
  if (!thresholds_arg.empty()) {
    if (thresholds_arg.size() != 3) {
      throw std::invalid_argument("--thresholds expects low,high,server");
    }
    thresholds =
        ThresholdSet::uniform(s.n_devices, thresholds_arg[0], thresholds_arg[1],
                              thresholds_arg[2]);
    tau = solve_tau(s, thresholds, sf.config).tau;
  } else {
    const Solution sol = optimize(s, sf.config);
    thresholds = sol.thresholds;
    tau = sol.tau;
  }

  const SimResult r = simulate(s, thresholds, tau, frames);

  std::ostringstream rep;
  write_provenance(rep, sf);
  rep << "frames: " << r.frames << "\n";
  rep << "thresholds: " << thresholds_field(thresholds) << "\n";
  rep << "tau: " << tau_field(tau) << "\n";
  rep << "device,empirical_accuracy,analytic_accuracy,alpha_hat,alpha,beta_hat,beta\n";
  for (int i = 0; i < s.n_devices; ++i) {
    const auto& t = thresholds.per_device[i];
    const DeviceOutcome d = device_outcomes(s.quad(i), t.low, t.high);
    const ServerOutcome v = server_outcomes(s.quad(i), t.server);
    rep << i << "," << fmt(r.accuracy_per_device[i]) << ","
        << fmt(accuracy_cooperative(d, v)) << "," << fmt(r.alpha_hat[i]) << ","
        << fmt(uncertain_prob(d)) << "," << fmt(r.beta_hat[i]) << ","
        << fmt(positive_prob(d)) << "\n";
  }
  rep << "empirical_mpjpe_m: " << (r.mpjpe_defined ? fmt(r.mpjpe_m) : "undefined") << "\n";
  rep << "drop_rate: " << fmt(r.drop_rate) << "\n";
  rep << "mean_delay_s: " << fmt(r.mean_delay_s) << "\n";
  rep << "analytic_sum_accuracy: " << fmt(r.analytic_sum_accuracy) << "\n";

  if (!out_path.empty()) {
    auto f = open_output(out_path);
    f << rep.str();
  }
  out << rep.str();
  return kExitOk;
}

int cmd_fit(const std::string& samples_path, bool beta_fit, std::ostream& out) {
  const std::vector<double> samples = load_samples(samples_path);
  if (samples.empty()) {
    throw std::invalid_argument("fit: no samples in " + samples_path);
  }
  const ConfidenceModel model = fit_empirical(samples);
  const auto& sorted = model.samples();
  out << "n: " << sorted.size() << "\n";
  out << "min: " << fmt(sorted.front()) << "\n";
  out << "max: " << fmt(sorted.back()) << "\n";
  out << "mean: " << fmt(model.mean()) << "\n";
  out << "deciles:";
  for (int d = 1; d <= 9; ++d) {
    const std::size_t idx =
        std::min(sorted.size() - 1,
                 static_cast<std::size_t>(static_cast<double>(d) / 10.0 *
                                          static_cast<double>(sorted.size())));
    out << " " << fmt(sorted[idx]);
  }
  out << "\n";
  if (beta_fit) {
    const auto [a, b] = fit_beta_moments(samples);
    out << "beta_fit: alpha=" << fmt(a) << " beta=" << fmt(b) << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cooperative multi-view pose inference: analysis, optimization, simulation"};
  app.require_subcommand(1);

  std::string scenario_path, diagnostics_path, csv_path, out_path, plot_prefix;
  std::string axis_name, strategies_csv = "device,server,cascade,proposed";
  std::vector<double> values, thresholds_arg;
  int frames = 10000;
  bool with_sim = false, beta_fit = false;

  auto* opt = app.add_subcommand("optimize", "jointly optimize thresholds and airtime shares");
  opt->add_option("scenario", scenario_path, "scenario file")->required();
  opt->add_option("--diagnostics", diagnostics_path, "per-iteration CSV");

  auto* cmp = app.add_subcommand("compare", "optimize all four strategies side by side");
  cmp->add_option("scenario", scenario_path, "scenario file")->required();
  cmp->add_option("--csv", csv_path, "write the table as CSV");

  auto* swp = app.add_subcommand("sweep", "optimize strategies across an axis");
  swp->add_option("scenario", scenario_path, "scenario file")->required();
  swp->add_option("--axis", axis_name, "d_req | n_devices | gain_db | image_bytes | t_inf_device")
      ->required();
  swp->add_option("--values", values, "axis values")->required()->delimiter(',');
  swp->add_option("--strategies", strategies_csv, "subset of device,server,cascade,proposed");
  swp->add_option("--out", out_path, "output CSV path");
  swp->add_flag("--simulate", with_sim, "run the frame simulator at each point");
  swp->add_option("--frames", frames, "frames per simulated point");
  swp->add_option("--plot", plot_prefix, "write SVG charts with this prefix");

  auto* simc = app.add_subcommand("simulate", "frame-level Monte Carlo at an operating point");
  simc->add_option("scenario", scenario_path, "scenario file")->required();
  simc->add_option("--frames", frames, "number of frames");
  simc->add_option("--thresholds", thresholds_arg, "low,high,server applied to all devices")
      ->delimiter(',');
  simc->add_option("--out", out_path, "also write the report to this file");

  auto* fit = app.add_subcommand("fit", "summarize a confidence sample file");
  fit->add_option("samples", scenario_path, "sample file, one value per line")->required();
  fit->add_flag("--beta", beta_fit, "add a method-of-moments beta fit");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    if (opt->parsed()) return cmd_optimize(scenario_path, diagnostics_path, out);
    if (cmp->parsed()) return cmd_compare(scenario_path, csv_path, out);
    if (swp->parsed()) {
      return cmd_sweep(scenario_path, axis_name, values, strategies_csv, out_path, with_sim,
                       frames, plot_prefix, out);
    }
    if (simc->parsed()) {
      return cmd_simulate(scenario_path, frames, thresholds_arg, out_path, out);
    }
    if (fit->parsed()) return cmd_fit(scenario_path, beta_fit, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumericalFailure;
  }
  err << "error: no command\n";
  return kExitInputError;
}

}  // namespace edgepose

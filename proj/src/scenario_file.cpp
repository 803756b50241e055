#include "edgepose/scenario_file.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "edgepose/confidence.hpp"

namespace edgepose {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("scenario: key '" + key + "' has non-numeric value '" +
                                value + "'");
  }
  if (pos != value.size()) {
    throw std::invalid_argument("scenario: key '" + key + "' has trailing junk in '" +
                                value + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_number(key, item));
  }
  if (out.empty()) {
    throw std::invalid_argument("scenario: key '" + key + "' has an empty list");
  }
  return out;
}

ConfidenceModel parse_distribution(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.rfind("beta(", 0) == 0 && v.back() == ')') {
    const std::string args = v.substr(5, v.size() - 6);
    const auto comma = args.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("scenario: key '" + key + "' needs beta(a,b)");
    }
    const double a = parse_number(key, trim(args.substr(0, comma)));
    const double b = parse_number(key, trim(args.substr(comma + 1)));
    return ConfidenceModel::beta(a, b);
  }
  if (v.rfind("file(", 0) == 0 && v.back() == ')') {
    const std::string path = trim(v.substr(5, v.size() - 6));
    return fit_empirical(load_samples(path));
  }
  throw std::invalid_argument("scenario: key '" + key + "' must be beta(a,b) or file(path), got '" +
                              v + "'");
}

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

ScenarioFile parse_scenario_text(const std::string& text, const std::string& origin) {
  ScenarioFile sf = default_scenario_file();
  Scenario& s = sf.scenario;
  s.gains_db.clear();  // re-resolved after parsing

  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(origin + ": line " + std::to_string(line_no) +
                                  " is not 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument(origin + ": line " + std::to_string(line_no) +
                                  " has an empty key or value");
    }
    if (!kv.emplace(key, value).second) {
      throw std::invalid_argument(origin + ": duplicate key '" + key + "'");
    }
  }

  ConfidenceQuad quad = s.quads.front();
  for (const auto& [key, value] : kv) {
    if (key == "n_devices") {
      s.n_devices = static_cast<int>(parse_number(key, value));
    } else if (key == "fps") {
      s.traffic.fps = parse_number(key, value);
    } else if (key == "image_bytes") {
      s.traffic.image_bits = static_cast<std::int64_t>(parse_number(key, value)) * 8;
    } else if (key == "message_bytes") {
      s.traffic.message_bits = static_cast<std::int64_t>(parse_number(key, value)) * 8;
    } else if (key == "t_inf_device_ms") {
      s.compute.t_inf_device_s = parse_number(key, value) / 1000.0;
    } else if (key == "t_inf_server_ms") {
      s.compute.t_inf_server_s = parse_number(key, value) / 1000.0;
    } else if (key == "t_pr_device_ms") {
      s.compute.t_pr_device_s = parse_number(key, value) / 1000.0;
    } else if (key == "t_pr_server_ms") {
      s.compute.t_pr_server_s = parse_number(key, value) / 1000.0;
    } else if (key == "t_bs_mode") {
      if (value == "fixed") {
        s.compute.backhaul_mode = BackhaulMode::kFixedTime;
      } else if (value == "rate") {
        s.compute.backhaul_mode = BackhaulMode::kRate;
      } else {
        throw std::invalid_argument("scenario: t_bs_mode must be 'fixed' or 'rate'");
      }
    } else if (key == "t_bs_tx_ms") {
      s.compute.backhaul_fixed_s = parse_number(key, value) / 1000.0;
    } else if (key == "backhaul_rate_bps") {
      s.compute.backhaul_rate_bps = parse_number(key, value);
    } else if (key == "t_sc_tx_ms") {
      s.compute.t_sc_tx_s = parse_number(key, value) / 1000.0;
    } else if (key == "d_req_ms") {
      s.d_req_s = parse_number(key, value) / 1000.0;
    } else if (key == "bandwidth_hz") {
      s.bandwidth_hz = parse_number(key, value);
    } else if (key == "noise_dbm_hz") {
      s.noise_dbm_hz = parse_number(key, value);
    } else if (key == "tx_power_dbm") {
      s.tx_power_dbm = parse_number(key, value);
    } else if (key == "gain_mean_db") {
      s.gain_mean_db = parse_number(key, value);
    } else if (key == "gain_std_db") {
      s.gain_std_db = parse_number(key, value);
    } else if (key == "gains_db") {
      s.gains_db = parse_list(key, value);
    } else if (key == "joints") {
      s.joints = static_cast<int>(parse_number(key, value));
    } else if (key == "room_x_m") {
      s.room_x_m = parse_number(key, value);
    } else if (key == "room_y_m") {
      s.room_y_m = parse_number(key, value);
    } else if (key == "room_z_m") {
      s.room_z_m = parse_number(key, value);
    } else if (key == "occlusion_prob") {
      s.occlusion_prob = parse_number(key, value);
    } else if (key == "noise_sigma0_px") {
      s.noise_sigma0_px = parse_number(key, value);
    } else if (key == "noise_sigmamin_px") {
      s.noise_sigma_min_px = parse_number(key, value);
    } else if (key == "seed") {
      s.seed = static_cast<std::uint64_t>(parse_number(key, value));
    } else if (key == "grid_points") {
      sf.config.grid_points_m = static_cast<int>(parse_number(key, value));
    } else if (key == "kappa1") {
      sf.config.kappa1 = parse_number(key, value);
    } else if (key == "kappa2") {
      sf.config.kappa2 = parse_number(key, value);
    } else if (key == "epsilon") {
      sf.config.epsilon = parse_number(key, value);
    } else if (key == "max_inner_iters") {
      sf.config.max_inner_iters = static_cast<int>(parse_number(key, value));
    } else if (key == "max_outer_iters") {
      sf.config.max_outer_iters = static_cast<int>(parse_number(key, value));
    } else if (key == "dev_pos") {
      quad.dev_pos = parse_distribution(key, value);
      sf.dev_pos_spec = value;
    } else if (key == "dev_neg") {
      quad.dev_neg = parse_distribution(key, value);
      sf.dev_neg_spec = value;
    } else if (key == "srv_pos") {
      quad.srv_pos = parse_distribution(key, value);
      sf.srv_pos_spec = value;
    } else if (key == "srv_neg") {
      quad.srv_neg = parse_distribution(key, value);
      sf.srv_neg_spec = value;
    } else {
      throw std::invalid_argument(origin + ": unknown key '" + key + "'");
    }
  }
  s.quads = {quad};
  s.finalize();
  sf.config.validate();
  return sf;
}

ScenarioFile load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("scenario: cannot open " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

ScenarioFile default_scenario_file() {
  ScenarioFile sf;
  sf.scenario = default_scenario();
  return sf;
}

void write_provenance(std::ostream& out, const ScenarioFile& sf) {
  const Scenario& s = sf.scenario;
  out << "# resolved scenario\n";
  out << "# n_devices = " << s.n_devices << "\n";
  out << "# fps = " << format_g(s.traffic.fps) << "\n";
  out << "# image_bytes = " << s.traffic.image_bits / 8 << "\n";
  out << "# message_bytes = " << s.traffic.message_bits / 8 << "\n";
  out << "# t_inf_device_ms = " << format_g(s.compute.t_inf_device_s * 1000.0) << "\n";
  out << "# t_inf_server_ms = " << format_g(s.compute.t_inf_server_s * 1000.0) << "\n";
  out << "# t_pr_device_ms = " << format_g(s.compute.t_pr_device_s * 1000.0) << "\n";
  out << "# t_pr_server_ms = " << format_g(s.compute.t_pr_server_s * 1000.0) << "\n";
  out << "# t_bs_mode = "
      << (s.compute.backhaul_mode == BackhaulMode::kFixedTime ? "fixed" : "rate") << "\n";
  out << "# t_bs_tx_ms = " << format_g(s.compute.backhaul_fixed_s * 1000.0) << "\n";
  out << "# backhaul_rate_bps = " << format_g(s.compute.backhaul_rate_bps) << "\n";
  out << "# t_sc_tx_ms = " << format_g(s.compute.t_sc_tx_s * 1000.0) << "\n";
  out << "# d_req_ms = " << format_g(s.d_req_s * 1000.0) << "\n";
  out << "# bandwidth_hz = " << format_g(s.bandwidth_hz) << "\n";
  out << "# noise_dbm_hz = " << format_g(s.noise_dbm_hz) << "\n";
  out << "# tx_power_dbm = " << format_g(s.tx_power_dbm) << "\n";
  out << "# gain_mean_db = " << format_g(s.gain_mean_db) << "\n";
  out << "# gain_std_db = " << format_g(s.gain_std_db) << "\n";
  out << "# gains_db = ";
  for (std::size_t i = 0; i < s.gains_db.size(); ++i) {
    if (i) out << ",";
    out << format_g(s.gains_db[i]);
  }
  out << "\n";
  out << "# joints = " << s.joints << "\n";
  out << "# room_x_m = " << format_g(s.room_x_m) << "\n";
  out << "# room_y_m = " << format_g(s.room_y_m) << "\n";
  out << "# room_z_m = " << format_g(s.room_z_m) << "\n";
  out << "# occlusion_prob = " << format_g(s.occlusion_prob) << "\n";
  out << "# noise_sigma0_px = " << format_g(s.noise_sigma0_px) << "\n";
  out << "# noise_sigmamin_px = " << format_g(s.noise_sigma_min_px) << "\n";
  out << "# seed = " << s.seed << "\n";
  out << "# grid_points = " << sf.config.grid_points_m << "\n";
  out << "# kappa1 = " << format_g(sf.config.kappa1) << "\n";
  out << "# kappa2 = " << format_g(sf.config.kappa2) << "\n";
  out << "# epsilon = " << format_g(sf.config.epsilon) << "\n";
  out << "# max_inner_iters = " << sf.config.max_inner_iters << "\n";
  out << "# max_outer_iters = " << sf.config.max_outer_iters << "\n";
  out << "# dev_pos = " << sf.dev_pos_spec << "\n";
  out << "# dev_neg = " << sf.dev_neg_spec << "\n";
  out << "# srv_pos = " << sf.srv_pos_spec << "\n";
  out << "# srv_neg = " << sf.srv_neg_spec << "\n";
}

}  // namespace edgepose

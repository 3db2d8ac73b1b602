#include "hfl/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "hfl/errors.hpp"

namespace hfl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double x = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a real number, got '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::vector<Eigen::Index> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<Eigen::Index> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(key + ": empty list entry");
    out.push_back(static_cast<Eigen::Index>(parse_int(key, item)));
  }
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  bool fd_step_given = false;
  std::vector<std::string> unknown;

  std::stringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "n") cfg.n = parse_int(key, value);
    else if (key == "k") cfg.k = parse_int(key, value);
    else if (key == "snr_db") cfg.snr_db = parse_real(key, value);
    else if (key == "rounds") cfg.rounds = static_cast<int>(parse_int(key, value));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "noiseless") cfg.noiseless = parse_bool(key, value);
    else if (key == "local_batch") cfg.local_batch = parse_int(key, value);
    else if (key == "public_batch") cfg.public_batch = parse_int(key, value);
    else if (key == "arch") cfg.arch.layer_sizes = parse_int_list(key, value);
    else if (key == "scheme") {
      if (value == "fl") cfg.scheme = Scheme::FL;
      else if (value == "fd") cfg.scheme = Scheme::FD;
      else if (value == "hfl") cfg.scheme = Scheme::HFL;
      else throw ConfigError("scheme: expected fl, fd, or hfl, got '" + value + "'");
    } else if (key == "clus_mode") {
      if (value == "forward") cfg.clus_mode = ClusMode::Forward;
      else if (value == "reverse") cfg.clus_mode = ClusMode::Reverse;
      else if (value == "all_fl") cfg.clus_mode = ClusMode::AllFl;
      else if (value == "all_fd") cfg.clus_mode = ClusMode::AllFd;
      else throw ConfigError("clus_mode: expected forward, reverse, all_fl, or all_fd");
    } else if (key == "weight_mode") {
      if (value == "optimized") cfg.fusion.weight_mode = WeightMode::Optimized;
      else if (value == "fixed") cfg.fusion.weight_mode = WeightMode::Fixed;
      else throw ConfigError("weight_mode: expected optimized or fixed");
    } else if (key == "q_mode") {
      if (value == "paper") cfg.q_mode = QMode::Paper;
      else if (value == "exact") cfg.q_mode = QMode::Exact;
      else throw ConfigError("q_mode: expected paper or exact");
    } else if (key == "activation") {
      if (value == "relu") cfg.arch.activation = Activation::Relu;
      else if (value == "identity") cfg.arch.activation = Activation::Identity;
      else throw ConfigError("activation: expected relu or identity");
    } else if (key == "fusion.eta1") cfg.fusion.eta1 = parse_real(key, value);
    else if (key == "fusion.eta2") cfg.fusion.eta2 = parse_real(key, value);
    else if (key == "fusion.eta3") cfg.fusion.eta3 = parse_real(key, value);
    else if (key == "fusion.tau") cfg.fusion.tau = parse_real(key, value);
    else if (key == "fusion.newton_epochs")
      cfg.fusion.newton_epochs = static_cast<int>(parse_int(key, value));
    else if (key == "fusion.fixed_alpha") cfg.fusion.fixed_alpha = parse_real(key, value);
    else if (key == "fusion.fd_step") {
      cfg.fusion.fd_step = parse_real(key, value);
      fd_step_given = true;
    } else if (key == "data.source") {
      if (value == "synthetic") cfg.data.source = DataSource::Synthetic;
      else if (value == "idx_files") cfg.data.source = DataSource::IdxFiles;
      else throw ConfigError("data.source: expected synthetic or idx_files");
    } else if (key == "data.image_path") cfg.data.image_path = value;
    else if (key == "data.label_path") cfg.data.label_path = value;
    else if (key == "data.max_examples") cfg.data.max_examples = parse_int(key, value);
    else if (key == "data.classes") cfg.data.classes = parse_int(key, value);
    else if (key == "data.input_dim") cfg.data.input_dim = parse_int(key, value);
    else if (key == "data.samples") cfg.data.samples = parse_int(key, value);
    else if (key == "data.separation") cfg.data.separation = parse_real(key, value);
    else if (key == "data.sigma") cfg.data.sigma = parse_real(key, value);
    else if (key == "data.public_size") cfg.data.public_size = parse_int(key, value);
    else if (key == "data.test_size") cfg.data.test_size = parse_int(key, value);
    else unknown.push_back(key);
  }

  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }

  // The FD local rate tracks eta1 unless the config pins it.
  if (!fd_step_given) cfg.fusion.fd_step = cfg.fusion.eta1;

  const ExperimentConfig effective = cfg.normalized();
  effective.validate();
  return effective;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_echo(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  const auto scheme = cfg.scheme == Scheme::FL ? "fl" : cfg.scheme == Scheme::FD ? "fd" : "hfl";
  const auto clus = cfg.clus_mode == ClusMode::Forward   ? "forward"
                    : cfg.clus_mode == ClusMode::Reverse ? "reverse"
                    : cfg.clus_mode == ClusMode::AllFl   ? "all_fl"
                                                         : "all_fd";
  out << "n = " << cfg.n << "\nk = " << cfg.k << "\nsnr_db = " << cfg.snr_db
      << "\nrounds = " << cfg.rounds << "\nscheme = " << scheme << "\nclus_mode = " << clus
      << "\nweight_mode = "
      << (cfg.fusion.weight_mode == WeightMode::Optimized ? "optimized" : "fixed")
      << "\nq_mode = " << (cfg.q_mode == QMode::Paper ? "paper" : "exact")
      << "\nseed = " << cfg.seed << "\nnoiseless = " << (cfg.noiseless ? "true" : "false")
      << "\nlocal_batch = " << cfg.local_batch << "\npublic_batch = " << cfg.public_batch
      << "\nactivation = "
      << (cfg.arch.activation == Activation::Relu ? "relu" : "identity") << "\narch = ";
  for (std::size_t i = 0; i < cfg.arch.layer_sizes.size(); ++i)
    out << (i ? "," : "") << cfg.arch.layer_sizes[i];
  out << "\nfusion.eta1 = " << cfg.fusion.eta1 << "\nfusion.eta2 = " << cfg.fusion.eta2
      << "\nfusion.eta3 = " << cfg.fusion.eta3 << "\nfusion.tau = " << cfg.fusion.tau
      << "\nfusion.newton_epochs = " << cfg.fusion.newton_epochs
      << "\nfusion.fixed_alpha = " << cfg.fusion.fixed_alpha
      << "\nfusion.fd_step = " << cfg.fusion.fd_step;
  if (cfg.data.source == DataSource::Synthetic) {
    out << "\ndata.source = synthetic\ndata.classes = " << cfg.data.classes
        << "\ndata.input_dim = " << cfg.data.input_dim
        << "\ndata.samples = " << cfg.data.samples
        << "\ndata.separation = " << cfg.data.separation
        << "\ndata.sigma = " << cfg.data.sigma;
  } else {
    out << "\ndata.source = idx_files\ndata.image_path = " << cfg.data.image_path
        << "\ndata.label_path = " << cfg.data.label_path
        << "\ndata.max_examples = " << cfg.data.max_examples;
  }
  out << "\ndata.public_size = " << cfg.data.public_size
      << "\ndata.test_size = " << cfg.data.test_size << "\n";
  return out.str();
}

}  // namespace hfl

#include "movsep/config.hpp"

#include <fstream>
#include <sstream>

namespace movsep {

void PipelineConfig::validate() const {
  if (window_length == 0 || (window_length & 1)) throw InvalidInput("config: window_length must be even and > 0");
  if (hop == 0 || hop > window_length) throw InvalidInput("config: hop must be in (0, window_length]");
  if (sample_rate <= 0.0) throw InvalidInput("config: sample_rate must be > 0");
  if (num_directions < 2) throw InvalidInput("config: num_directions must be >= 2");
  if (wgmm_components == 0) throw InvalidInput("config: wgmm_components must be > 0");
  if (sigma_threshold <= 0.0) throw InvalidInput("config: sigma_threshold must be > 0");
  if (var_sum <= var_max) throw InvalidInput("config: var_sum must exceed var_max");
  if (var_min <= 0.0 || var_max <= var_min) throw InvalidInput("config: need 0 < var_min < var_max");
  if (nmf_components == 0) throw InvalidInput("config: nmf_components must be > 0");
  if (nmf_iterations < 0) throw InvalidInput("config: nmf_iterations must be >= 0");
  if (epsilon <= 0.0) throw InvalidInput("config: epsilon must be > 0");
  if (num_particles <= 0) throw InvalidInput("config: num_particles must be > 0");
  if (clutter_prior < 0.0 || birth_prior < 0.0 || clutter_prior + birth_prior >= 1.0)
    throw InvalidInput("config: priors must be nonnegative and sum below 1");
}

SrpOptions PipelineConfig::srp_options() const {
  SrpOptions o;
  o.exponent = srp_exponent;
  o.phat_guard = phat_guard;
  return o;
}

MeasurementOptions PipelineConfig::measurement_options() const {
  MeasurementOptions o;
  o.num_components = wgmm_components;
  o.sigma_max_rad = sigma_threshold;
  o.weight_min = weight_threshold;
  return o;
}

TrackerConfig PipelineConfig::tracker_config() const {
  TrackerConfig c;
  c.num_particles = num_particles;
  c.clutter_prior = clutter_prior;
  c.birth_prior = birth_prior;
  c.assoc_prior = 1.0 - clutter_prior - birth_prior;
  c.gamma_alpha = gamma_alpha;
  c.gamma_beta = gamma_beta;
  c.process_noise_var = process_noise_var;
  c.init_mean = init_state;
  c.mean_meas_var = mean_measurement_var;
  c.min_track_s = min_track_s;
  c.seed = seed;
  return c;
}

SpatialWeightOptions PipelineConfig::spatial_options() const {
  SpatialWeightOptions o;
  o.var_min = var_min;
  o.var_max = var_max;
  o.var_sum = var_sum;
  o.background_threshold = background_threshold;
  return o;
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::string rest = line;
      rest.erase(0, rest.find_first_not_of(" \t\r"));
      if (!rest.empty()) throw InvalidInput("config: malformed line: " + line);
      continue;
    }
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
    };
    trim(key);
    trim(value);
    if (key.empty()) throw InvalidInput("config: missing key: " + line);
    if (key == "window_length") cfg.window_length = std::stoul(value);
    else if (key == "hop") cfg.hop = std::stoul(value);
    else if (key == "sample_rate") cfg.sample_rate = std::stod(value);
    else if (key == "num_directions") cfg.num_directions = std::stoul(value);
    else if (key == "srp_exponent") cfg.srp_exponent = std::stod(value);
    else if (key == "phat_guard") cfg.phat_guard = std::stod(value);
    else if (key == "wgmm_components") cfg.wgmm_components = std::stoul(value);
    else if (key == "sigma_threshold") cfg.sigma_threshold = std::stod(value);
    else if (key == "weight_threshold") cfg.weight_threshold = std::stod(value);
    else if (key == "mean_measurement_var") cfg.mean_measurement_var = std::stod(value);
    else if (key == "clutter_prior") cfg.clutter_prior = std::stod(value);
    else if (key == "birth_prior") cfg.birth_prior = std::stod(value);
    else if (key == "gamma_alpha") cfg.gamma_alpha = std::stod(value);
    else if (key == "gamma_beta") cfg.gamma_beta = std::stod(value);
    else if (key == "init_state") {
      std::istringstream vs(value);
      for (auto& x : cfg.init_state)
        if (!(vs >> x)) throw InvalidInput("config: init_state needs 4 numbers");
    } else if (key == "num_particles") cfg.num_particles = std::stoi(value);
    else if (key == "process_noise_var") cfg.process_noise_var = std::stod(value);
    else if (key == "min_track_s") cfg.min_track_s = std::stod(value);
    else if (key == "var_min") cfg.var_min = std::stod(value);
    else if (key == "var_max") cfg.var_max = std::stod(value);
    else if (key == "var_sum") cfg.var_sum = std::stod(value);
    else if (key == "background_threshold") cfg.background_threshold = std::stod(value);
    else if (key == "nmf_components") cfg.nmf_components = std::stoul(value);
    else if (key == "nmf_iterations") cfg.nmf_iterations = std::stoi(value);
    else if (key == "epsilon") cfg.epsilon = std::stod(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else throw InvalidInput("config: unknown key: " + key);
  }
  cfg.validate();
  return cfg;
}

PipelineConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void write_config(const std::string& path, const PipelineConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write config file: " + path);
  out.precision(12);
  out << "window_length = " << cfg.window_length << "\n";
  out << "hop = " << cfg.hop << "\n";
  out << "sample_rate = " << cfg.sample_rate << "\n";
  out << "num_directions = " << cfg.num_directions << "\n";
  out << "srp_exponent = " << cfg.srp_exponent << "\n";
  out << "phat_guard = " << cfg.phat_guard << "\n";
  out << "wgmm_components = " << cfg.wgmm_components << "\n";
  out << "sigma_threshold = " << cfg.sigma_threshold << "\n";
  out << "weight_threshold = " << cfg.weight_threshold << "\n";
  out << "mean_measurement_var = " << cfg.mean_measurement_var << "\n";
  out << "clutter_prior = " << cfg.clutter_prior << "\n";
  out << "birth_prior = " << cfg.birth_prior << "\n";
  out << "gamma_alpha = " << cfg.gamma_alpha << "\n";
  out << "gamma_beta = " << cfg.gamma_beta << "\n";
  out << "init_state = " << cfg.init_state[0] << " " << cfg.init_state[1] << " "
      << cfg.init_state[2] << " " << cfg.init_state[3] << "\n";
  out << "num_particles = " << cfg.num_particles << "\n";
  out << "process_noise_var = " << cfg.process_noise_var << "\n";
  out << "min_track_s = " << cfg.min_track_s << "\n";
  out << "var_min = " << cfg.var_min << "\n";
  out << "var_max = " << cfg.var_max << "\n";
  out << "var_sum = " << cfg.var_sum << "\n";
  out << "background_threshold = " << cfg.background_threshold << "\n";
  out << "nmf_components = " << cfg.nmf_components << "\n";
  out << "nmf_iterations = " << cfg.nmf_iterations << "\n";
  out << "epsilon = " << cfg.epsilon << "\n";
  out << "seed = " << cfg.seed << "\n";
}

}  // namespace movsep

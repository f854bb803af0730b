#include "movsep/geometry.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace movsep {

void ArrayGeometry::validate() const {
  if (mic_positions.empty()) throw InvalidInput("ArrayGeometry: need at least 1 microphone");
  if (speed_of_sound <= 0.0) throw InvalidInput("ArrayGeometry: speed_of_sound must be > 0");
  for (const auto& p : mic_positions)
    for (double c : p)
      if (!std::isfinite(c)) throw InvalidInput("ArrayGeometry: non-finite mic position");
}

ArrayGeometry parse_geometry(const std::string& text) {
  ArrayGeometry geom;
  std::map<int, Vec3> mics;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
    };
    trim(key);
    trim(value);
    if (key.rfind("mic.", 0) == 0) {
      int idx = std::stoi(key.substr(4));
      std::istringstream vs(value);
      Vec3 p{};
      if (!(vs >> p[0] >> p[1] >> p[2]))
        throw InvalidInput("geometry: bad mic position line: " + line);
      mics[idx] = p;
    } else if (key == "speed_of_sound") {
      geom.speed_of_sound = std::stod(value);
    } else if (!key.empty()) {
      throw InvalidInput("geometry: unknown key: " + key);
    }
  }
  for (auto& [idx, p] : mics) geom.mic_positions.push_back(p);
  geom.validate();
  return geom;
}

ArrayGeometry read_geometry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open geometry file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_geometry(ss.str());
}

void write_geometry(const std::string& path, const ArrayGeometry& geom) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write geometry file: " + path);
  out << "speed_of_sound = " << geom.speed_of_sound << "\n";
  for (std::size_t i = 0; i < geom.mic_positions.size(); ++i) {
    const auto& p = geom.mic_positions[i];
    out << "mic." << (i + 1) << " = " << p[0] << " " << p[1] << " " << p[2] << "\n";
  }
}

ArrayGeometry default_geometry() {
  // Four-mic diamond, centimeter scale, mic 1 at the phase center.
  ArrayGeometry geom;
  geom.mic_positions = {
      {0.000, 0.000, 0.000},
      {-0.022, 0.038, 0.000},
      {0.022, 0.038, 0.000},
      {0.000, 0.107, -0.024},
  };
  return geom;
}

DirectionGrid DirectionGrid::uniform(std::size_t count) {
  DirectionGrid grid;
  grid.azimuths.resize(count);
  for (std::size_t d = 0; d < count; ++d) grid.azimuths[d] = kTwoPi * double(d) / double(count);
  return grid;
}

std::size_t DirectionGrid::nearest(double theta) const {
  std::size_t best = 0;
  double best_err = 1e9;
  for (std::size_t d = 0; d < azimuths.size(); ++d) {
    double err = std::abs(wrap_angle(theta - azimuths[d]));
    if (err < best_err) {
      best_err = err;
      best = d;
    }
  }
  return best;
}

Vec3 unit_vector(double azimuth) { return {std::cos(azimuth), std::sin(azimuth), 0.0}; }

double tdoa(const ArrayGeometry& geom, const Vec3& k, std::size_t m1, std::size_t m2) {
  const double norm = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
  if (std::abs(norm - 1.0) > 1e-9) throw InvalidInput("tdoa: direction vector must be unit length");
  const auto& p1 = geom.mic_positions[m1];
  const auto& p2 = geom.mic_positions[m2];
  double dot = 0.0;
  for (int i = 0; i < 3; ++i) dot += k[i] * (p1[i] - p2[i]);
  return -dot / geom.speed_of_sound;
}

std::vector<cplx> steering_vector(const ArrayGeometry& geom, const Vec3& k, double omega) {
  const double norm = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
  if (std::abs(norm - 1.0) > 1e-9)
    throw InvalidInput("steering_vector: direction vector must be unit length");
  std::vector<cplx> a(geom.num_mics());
  for (std::size_t m = 0; m < geom.num_mics(); ++m) {
    const auto& p = geom.mic_positions[m];
    const double dot = k[0] * p[0] + k[1] * p[1] + k[2] * p[2];
    const double phase = omega * dot / geom.speed_of_sound;
    a[m] = cplx(std::cos(phase), std::sin(phase));
  }
  return a;
}

DoaKernelSet::DoaKernelSet(const ArrayGeometry& geom, const DirectionGrid& grid,
                           std::size_t num_bins, std::size_t window_length, double sample_rate)
    : geom_(geom), grid_(grid), num_bins_(num_bins), num_mics_(geom.num_mics()) {
  geom_.validate();
  if (num_bins != window_length / 2 + 1)
    throw InvalidInput("DoaKernelSet: num_bins must equal window_length/2 + 1");
  steer_.resize(num_bins_ * grid_.size() * num_mics_);
  for (std::size_t f = 0; f < num_bins_; ++f) {
    const double omega = kTwoPi * double(f) * sample_rate / double(window_length);
    for (std::size_t d = 0; d < grid_.size(); ++d) {
      auto a = steering_vector(geom_, grid_.direction(d), omega);
      std::copy(a.begin(), a.end(), steer_.begin() + std::ptrdiff_t((f * grid_.size() + d) * num_mics_));
    }
  }
}

std::vector<cplx> DoaKernelSet::dense(std::size_t f, std::size_t d) const {
  std::vector<cplx> w(num_mics_ * num_mics_);
  const cplx* a = steering(f, d);
  for (std::size_t i = 0; i < num_mics_; ++i)
    for (std::size_t j = 0; j < num_mics_; ++j) w[i * num_mics_ + j] = a[i] * std::conj(a[j]);
  return w;
}

}  // namespace movsep

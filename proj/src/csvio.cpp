#include "movsep/csvio.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace movsep {

namespace {

constexpr double kRad2Deg = 180.0 / kPi;
constexpr double kDeg2Rad = kPi / 180.0;

std::ofstream open_out(const std::string& path, std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write: " + path);
  out.precision(12);
  out << "# seed = " << seed << "\n";
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

bool skip_line(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

}  // namespace

void write_trajectories(const std::string& path, const TrajectorySet& traj, std::uint64_t seed) {
  auto out = open_out(path, seed);
  // so empty or fully-inactive sets still round-trip their timing
  out << "# frames = " << traj.num_frames << "\n";
  out << "# hop_s = " << traj.frame_hop_s << "\n";
  out << "source_id,frame,time_s,azimuth_deg,state_variance,active\n";
  for (const auto& track : traj.tracks)
    for (std::size_t n = 0; n < traj.num_frames; ++n) {
      const bool act = n < track.active.size() && track.active[n];
      out << track.id << "," << n << "," << double(n) * traj.frame_hop_s << ","
          << (act ? track.azimuth[n] * kRad2Deg : 0.0) << ","
          << (act ? track.state_var[n] : 0.0) << "," << (act ? 1 : 0) << "\n";
    }
}

TrajectorySet read_trajectories(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open trajectory file: " + path);
  TrajectorySet traj;
  std::map<int, SourceTrack> tracks;
  std::map<int, std::map<std::size_t, std::pair<double, double>>> rows;  // id -> frame -> (az, var)
  std::map<int, std::map<std::size_t, bool>> actives;
  std::string line;
  bool header_seen = false;
  std::size_t max_frame = 0, declared_frames = 0;
  double hop_s = 0.0;
  while (std::getline(in, line)) {
    if (skip_line(line)) {
      std::istringstream meta(line);
      std::string hash, key, eq;
      if (meta >> hash >> key >> eq && hash == "#" && eq == "=") {
        if (key == "frames") meta >> declared_frames;
        else if (key == "hop_s") meta >> hop_s;
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (line.find("source_id") != std::string::npos) continue;
    }
    auto f = split_csv(line);
    if (f.size() != 6) throw InvalidInput("trajectory CSV: expected 6 columns: " + line);
    const int id = std::stoi(f[0]);
    const std::size_t frame = std::stoul(f[1]);
    const double time_s = std::stod(f[2]);
    rows[id][frame] = {std::stod(f[3]) * kDeg2Rad, std::stod(f[4])};
    actives[id][frame] = std::stoi(f[5]) != 0;
    max_frame = std::max(max_frame, frame);
    if (frame > 0) hop_s = time_s / double(frame);
  }
  traj.num_frames = std::max(declared_frames, rows.empty() ? 0 : max_frame + 1);
  traj.frame_hop_s = hop_s;
  for (auto& [id, frames] : rows) {
    SourceTrack t;
    t.id = id;
    t.active.assign(traj.num_frames, 0);
    t.azimuth.assign(traj.num_frames, 0.0);
    t.state_var.assign(traj.num_frames, 0.0);
    for (auto& [n, av] : frames) {
      t.azimuth[n] = wrap_angle(av.first);
      t.state_var[n] = av.second;
      t.active[n] = actives[id][n] ? 1 : 0;
    }
    traj.tracks.push_back(std::move(t));
  }
  return traj;
}

void write_measurements(const std::string& path, const DoaMeasurementSet& meas,
                        std::uint64_t seed) {
  auto out = open_out(path, seed);
  out << "frame,time_s,azimuth_deg,sigma2,weight\n";
  for (std::size_t n = 0; n < meas.frames.size(); ++n)
    for (const auto& m : meas.frames[n])
      out << n << "," << double(n) * meas.frame_hop_s << "," << m.mean * kRad2Deg << ","
          << m.var << "," << m.weight << "\n";
}

void write_srp_peaks(const std::string& path, const SrpMap& srp, const DirectionGrid& grid,
                     double frame_hop_s, std::uint64_t seed) {
  auto out = open_out(path, seed);
  out << "frame,time_s,azimuth_deg,energy\n";
  for (std::size_t n = 0; n < srp.num_frames; ++n) {
    const std::size_t d = srp.argmax(n);
    out << n << "," << double(n) * frame_hop_s << "," << grid.azimuths[d] * kRad2Deg << ","
        << srp.at(d, n) << "\n";
  }
}

void write_spatial_weights(const std::string& path, const SpatialWeightTensor& z,
                           const DirectionGrid& grid, std::uint64_t seed) {
  auto out = open_out(path, seed);
  out << "frame,source,azimuth_deg,weight\n";
  for (std::size_t n = 0; n < z.num_frames; ++n)
    for (std::size_t p = 0; p < z.num_sources; ++p)
      for (std::size_t d = 0; d < z.num_directions; ++d)
        if (z.at(n, d, p) > 0.0)
          out << n << "," << p << "," << grid.azimuths[d] * kRad2Deg << "," << z.at(n, d, p)
              << "\n";
}

void write_cost_trace(const std::string& path, const std::vector<double>& trace,
                      std::uint64_t seed) {
  auto out = open_out(path, seed);
  out.precision(15);
  out << "iteration,cost\n";
  for (std::size_t i = 0; i < trace.size(); ++i) out << i + 1 << "," << trace[i] << "\n";
}

std::vector<double> read_cost_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open cost trace: " + path);
  std::vector<double> trace;
  std::string line;
  while (std::getline(in, line)) {
    if (skip_line(line) || line.find("iteration") != std::string::npos) continue;
    auto f = split_csv(line);
    if (f.size() != 2) throw InvalidInput("cost trace CSV: expected 2 columns: " + line);
    trace.push_back(std::stod(f[1]));
  }
  return trace;
}

void write_vad(const std::string& path, const VadFlags& vad, std::uint64_t seed) {
  auto out = open_out(path, seed);
  out << "source,frame,active\n";
  for (std::size_t p = 0; p < vad.active.size(); ++p)
    for (std::size_t n = 0; n < vad.active[p].size(); ++n)
      out << p << "," << n << "," << int(vad.active[p][n]) << "\n";
}

VadFlags read_vad(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open VAD file: " + path);
  VadFlags vad;
  std::string line;
  while (std::getline(in, line)) {
    if (skip_line(line) || line.find("source") != std::string::npos) continue;
    auto f = split_csv(line);
    if (f.size() != 3) throw InvalidInput("VAD CSV: expected 3 columns: " + line);
    const std::size_t p = std::stoul(f[0]);
    const std::size_t n = std::stoul(f[1]);
    if (p >= vad.active.size()) vad.active.resize(p + 1);
    if (n >= vad.active[p].size()) vad.active[p].resize(n + 1, 0);
    vad.active[p][n] = std::uint8_t(std::stoi(f[2]) != 0);
  }
  return vad;
}

}  // namespace movsep

#include "nlslab/snapshot_io.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nlslab {

namespace {

template <class T>
void put_le(std::ostream& os, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U bits = std::bit_cast<U>(value);
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  os.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& is) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  std::array<unsigned char, sizeof(T)> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!is) throw std::runtime_error("snapshot truncated");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

SnapshotHeader read_header(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "NLSF", 4) != 0) throw std::runtime_error("not an NLSF snapshot");
  SnapshotHeader h{};
  h.version = get_le<std::uint32_t>(is);
  if (h.version != kSnapshotVersion) throw std::runtime_error("unsupported snapshot version");
  h.n = get_le<std::uint32_t>(is);
  h.R = get_le<double>(is);
  return h;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const RadialField& f, const nlohmann::json& provenance) {
  {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os.write("NLSF", 4);
    put_le<std::uint32_t>(os, kSnapshotVersion);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.size()));
    put_le<double>(os, f.grid->radius());
    for (const auto& v : f.values) {
      put_le<double>(os, v.real());
      put_le<double>(os, v.imag());
    }
    if (!os) throw std::runtime_error("write failed for " + path.string());
  }
  nlohmann::json meta = {
      {"format", "NLSF"},
      {"version", kSnapshotVersion},
      {"grid", {{"n", f.size()}, {"R", f.grid->radius()}, {"kmax", f.grid->kmax()}, {"nodes", "bessel-j0-zeros"}}},
      {"provenance", provenance},
  };
  std::ofstream js(path.string() + ".json", std::ios::trunc);
  js << meta.dump(2) << '\n';
}

SnapshotHeader read_snapshot_header(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_header(is);
}

RadialField read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  const auto h = read_header(is);
  RadialField f(make_grid(static_cast<int>(h.n), h.R));
  for (auto& v : f.values) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    v = cplx(re, im);
  }
  return f;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  char buf[32];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      os << (i ? "," : "") << buf;
    }
    os << '\n';
  }
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::string> write_trajectory(const std::filesystem::path& dir, const Trajectory& traj,
                                          const nlohmann::json& provenance) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "snapshots");
  std::vector<std::string> written;

  std::vector<std::vector<double>> rows;
  rows.reserve(traj.series.size());
  for (const auto& s : traj.series) rows.push_back({s.t, s.dt, s.mass, s.energy, s.linf, s.l4_cum});
  write_csv(dir / "series.csv", {"t", "dt", "mass", "energy", "linf", "l4_cum"}, rows);
  written.push_back("series.csv");

  nlohmann::json index = nlohmann::json::array();
  char name[32];
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    std::snprintf(name, sizeof name, "snap_%05zu.nlsf", i);
    const auto rel = fs::path("snapshots") / name;
    write_snapshot(dir / rel, traj.snapshots[i].u, {{"t", traj.snapshots[i].t}});
    index.push_back({{"t", traj.snapshots[i].t}, {"file", rel.generic_string()}});
    written.push_back(rel.generic_string());
    written.push_back(rel.generic_string() + ".json");
  }

  nlohmann::json meta = {
      {"mu", traj.mu},
      {"termination", to_string(traj.termination)},
      {"resolution_limited", traj.resolution_limited},
      {"message", traj.message},
      {"snapshots", index},
      {"provenance", provenance},
  };
  if (traj.blowup) {
    const auto& b = *traj.blowup;
    meta["blowup"] = {{"t_star", b.t_star},           {"exponent", b.exponent},   {"log_prefactor", b.log_prefactor},
                      {"window_begin", b.window_begin}, {"window_end", b.window_end}, {"rms", b.rms}};
  }
  std::ofstream js(dir / "trajectory.json", std::ios::trunc);
  js << meta.dump(2) << '\n';
  if (!js) throw std::runtime_error("write failed for " + (dir / "trajectory.json").string());
  written.push_back("trajectory.json");
  return written;
}

Trajectory read_trajectory(const std::filesystem::path& dir) {
  std::ifstream js(dir / "trajectory.json");
  if (!js) throw std::runtime_error("no trajectory.json in " + dir.string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(js);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed trajectory.json: " + std::string(e.what()));
  }
  Trajectory traj;
  try {
    traj.mu = meta.at("mu").get<double>();
    const auto term = meta.at("termination").get<std::string>();
    for (auto t : {Termination::ReachedEnd, Termination::BlowupForward, Termination::BlowupBackward,
                   Termination::NumericFailure})
      if (to_string(t) == term) traj.termination = t;
    traj.resolution_limited = meta.value("resolution_limited", false);
    traj.message = meta.value("message", "");
    for (const auto& s : meta.at("snapshots"))
      traj.snapshots.push_back({s.at("t").get<double>(), read_snapshot(dir / s.at("file").get<std::string>())});
    if (meta.contains("blowup")) {
      const auto& b = meta["blowup"];
      traj.blowup = BlowupEstimate{b.at("t_star"), b.at("exponent"), b.at("log_prefactor"),
                                   b.at("window_begin"), b.at("window_end"), b.at("rms")};
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed trajectory.json: " + std::string(e.what()));
  }
  if (traj.snapshots.empty()) throw std::runtime_error("trajectory has no snapshots");

  std::ifstream cs(dir / "series.csv");
  if (!cs) throw std::runtime_error("no series.csv in " + dir.string());
  std::string line;
  std::getline(cs, line);
  while (std::getline(cs, line)) {
    std::istringstream ss(line);
    std::array<double, 6> v{};
    char comma;
    ss >> v[0];
    for (int i = 1; i < 6; ++i) ss >> comma >> v[i];
    if (!ss) throw std::runtime_error("malformed series.csv row");
    traj.series.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
  }
  return traj;
}

}  // namespace nlslab

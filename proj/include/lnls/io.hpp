#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lnls/dynamics.hpp"
#include "lnls/error.hpp"
#include "lnls/lattice.hpp"
#include "lnls/records.hpp"

// Artifact files: lattice function binaries, trajectory directories, plot data.
namespace lnls {

static_assert(std::endian::native == std::endian::little, "binary artifacts assume a little-endian host");

inline constexpr std::array<char, 8> kGridMagic = {'L', 'N', 'L', 'S', 'G', 'R', 'I', 'D'};
inline constexpr std::array<char, 8> kSpectrumMagic = {'L', 'N', 'L', 'S', 'S', 'P', 'E', 'C'};
inline constexpr int kSchemaVersion = 1;

namespace detail {

template <class Domain>
constexpr const std::array<char, 8>& magic_for() {
  if constexpr (std::is_same_v<Domain, SpaceDomain>)
    return kGridMagic;
  else
    return kSpectrumMagic;
}

inline std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  return os;
}

}  // namespace detail

/// Layout: 8-byte magic, u16 d, u16 reserved (0), u32 M, then (2M)^d pairs of f64 (re, im),
/// all little-endian, values in slot order.
template <class Domain>
void write_binary(std::ostream& os, const LatticeFunction<Domain>& u) {
  const auto& magic = detail::magic_for<Domain>();
  os.write(magic.data(), magic.size());
  const std::uint16_t d = static_cast<std::uint16_t>(u.lattice().dim()), reserved = 0;
  const std::uint32_t M = static_cast<std::uint32_t>(u.lattice().half_size());
  os.write(reinterpret_cast<const char*>(&d), sizeof d);
  os.write(reinterpret_cast<const char*>(&reserved), sizeof reserved);
  os.write(reinterpret_cast<const char*>(&M), sizeof M);
  static_assert(sizeof(cplx) == 2 * sizeof(double));
  os.write(reinterpret_cast<const char*>(u.values().data()), static_cast<std::streamsize>(u.size() * sizeof(cplx)));
  if (!os) throw IoError("binary write failed");
}

template <class Domain>
LatticeFunction<Domain> read_binary(std::istream& is) {
  std::array<char, 8> magic{};
  std::uint16_t d = 0, reserved = 0;
  std::uint32_t M = 0;
  is.read(magic.data(), magic.size());
  is.read(reinterpret_cast<char*>(&d), sizeof d);
  is.read(reinterpret_cast<char*>(&reserved), sizeof reserved);
  is.read(reinterpret_cast<char*>(&M), sizeof M);
  if (!is) throw IoError("truncated header");
  if (magic != detail::magic_for<Domain>())
    throw IoError("bad magic '" + std::string(magic.begin(), magic.end()) + "', expected '" +
                  std::string(detail::magic_for<Domain>().begin(), detail::magic_for<Domain>().end()) + "'");
  if (M > (1u << 20)) throw IoError("implausible half size " + std::to_string(M));
  const Lattice lat(d, static_cast<int>(M));
  std::vector<cplx> values(lat.size());
  is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(cplx)));
  if (!is) throw IoError("truncated body: expected " + std::to_string(values.size()) + " complex values");
  return LatticeFunction<Domain>(lat, std::move(values));
}

template <class Domain>
void save(const std::filesystem::path& path, const LatticeFunction<Domain>& u) {
  auto os = detail::open_out(path, std::ios::binary);
  write_binary(os, u);
}

template <class Domain>
LatticeFunction<Domain> load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  return read_binary<Domain>(is);
}

inline GridFunction load_grid(const std::filesystem::path& path) { return load<SpaceDomain>(path); }

/// Human-readable form: {"magic", "d", "M", "re": [...], "im": [...]}.
template <class Domain>
nlohmann::json to_debug_json(const LatticeFunction<Domain>& u) {
  const auto& magic = detail::magic_for<Domain>();
  nlohmann::json j;
  j["magic"] = std::string(magic.begin(), magic.end());
  j["d"] = u.lattice().dim();
  j["M"] = u.lattice().half_size();
  std::vector<double> re, im;
  for (const auto& z : u.values()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  j["re"] = re;
  j["im"] = im;
  return j;
}

template <class Domain>
LatticeFunction<Domain> from_debug_json(const nlohmann::json& j) {
  const auto& magic = detail::magic_for<Domain>();
  if (j.at("magic").get<std::string>() != std::string(magic.begin(), magic.end())) throw IoError("debug json: wrong magic");
  const Lattice lat(j.at("d").get<int>(), j.at("M").get<int>());
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != lat.size() || im.size() != lat.size()) throw IoError("debug json: wrong value count");
  std::vector<cplx> values(lat.size());
  for (std::size_t s = 0; s < values.size(); ++s) values[s] = {re[s], im[s]};
  return LatticeFunction<Domain>(lat, std::move(values));
}

// ---------------------------------------------------------------------------
// Trajectories

inline nlohmann::json to_json(const NlsParams& p) { return {{"p", p.p}, {"lambda", p.lambda}, {"free", p.free}}; }

inline nlohmann::json to_json(const EvolutionConfig& c) {
  return {{"dt", c.dt}, {"t_final", c.t_final}, {"integrator", to_string(c.integrator)}, {"record_stride", c.record_stride}};
}

/// Writes snapshot_NNNNN.bin per snapshot plus manifest.json with times, parameters
/// and the conserved-quantity table.
inline void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, const NlsParams& params,
                             const EvolutionConfig& cfg) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["params"] = to_json(params);
  manifest["evolution"] = to_json(cfg);
  if (!traj.snapshots.empty()) {
    const auto& lat = traj.snapshots.front().u.lattice();
    manifest["lattice"] = {{"d", lat.dim()}, {"M", lat.half_size()}, {"h", lat.spacing()}};
  }
  auto& table = manifest["snapshots"] = nlohmann::json::array();
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const auto& s = traj.snapshots[i];
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%05zu.bin", i);
    save(dir / name, s.u);
    table.push_back({{"index", i}, {"t", s.t}, {"file", name}, {"mass", s.conserved.mass}, {"energy", s.conserved.energy}});
  }
  auto os = detail::open_out(dir / "manifest.json");
  os << manifest.dump(2) << '\n';
}

struct LoadedTrajectory {
  nlohmann::json manifest;
  Trajectory trajectory;
};

inline LoadedTrajectory read_trajectory(const std::filesystem::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw IoError("no manifest.json in '" + dir.string() + "'");
  LoadedTrajectory out;
  out.manifest = nlohmann::json::parse(is);
  for (const auto& row : out.manifest.at("snapshots")) {
    out.trajectory.snapshots.push_back({row.at("t").get<double>(), load_grid(dir / row.at("file").get<std::string>()),
                                        {row.at("mass").get<double>(), row.at("energy").get<double>()}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Plot data

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

/// Two whitespace-separated columns, one '#' header line naming the series.
inline void write_tsv(const std::filesystem::path& path, const PlotSeries& series, const std::string& x_name = "log_h",
                      const std::string& y_name = "log_error") {
  auto os = detail::open_out(path);
  os << "# " << series.label << '\n' << x_name << '\t' << y_name << '\n';
  for (std::size_t i = 0; i < series.x.size(); ++i) os << format_double(series.x[i]) << '\t' << format_double(series.y[i]) << '\n';
}

/// Self-contained SVG line chart of several series on shared axes.
inline std::string svg_line_chart(const std::vector<PlotSeries>& series, const std::string& title, const std::string& x_label,
                                  const std::string& y_label) {
  constexpr double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", xv);
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", yv);
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << buf << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (T + H - B) / 2
     << ")\">" << y_label << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = palette[k % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    os << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      os << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    os << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 * (k + 1) << "\" fill=\"" << color << "\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  auto os = detail::open_out(path);
  os << text;
}

inline void write_records(const std::filesystem::path& dir, const std::string& stem, const std::vector<ExperimentRecord>& records) {
  std::filesystem::create_directories(dir);
  {
    auto os = detail::open_out(dir / (stem + ".csv"));
    write_csv(os, records);
  }
  auto os = detail::open_out(dir / (stem + ".jsonl"));
  write_json_lines(os, records);
}

}  // namespace lnls

#include "gsmlab/homogenize/microstructure.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace gsmlab::homogenize {

std::vector<std::uint16_t> spherocylinder_fiber(const GridDims& dims, double volume_fraction, std::uint64_t seed) {
  dims.validate();
  if (!(volume_fraction > 0.0 && volume_fraction < 0.5))
    throw std::invalid_argument("fiber volume fraction must lie in (0, 0.5)");
  const double edge = std::min({dims.nx, dims.ny, dims.nz});
  const double total_len = 0.75 * std::max(dims.nx, dims.ny);
  const double target = volume_fraction * static_cast<double>(dims.size());
  // capsule volume pi r^2 (L - 2r) + 4/3 pi r^3 is increasing in r for r < L/2
  auto volume = [&](double r) {
    return std::numbers::pi * r * r * (total_len - 2.0 * r) + 4.0 / 3.0 * std::numbers::pi * r * r * r;
  };
  double lo = 0.0, hi = std::min(0.5 * total_len, 0.5 * edge);
  if (volume(hi) < target) throw std::invalid_argument("fiber does not fit the requested volume fraction");
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (volume(mid) < target ? lo : hi) = mid;
  }
  const double radius = 0.5 * (lo + hi);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Eigen::Vector3d center(unit(rng) * dims.nx, unit(rng) * dims.ny, unit(rng) * dims.nz);
  const double angle = unit(rng) * std::numbers::pi;
  const Eigen::Vector3d axis(std::cos(angle), std::sin(angle), 0.0);
  const double half = 0.5 * total_len - radius;

  const Eigen::Vector3d n(dims.nx, dims.ny, dims.nz);
  std::vector<std::uint16_t> ids(dims.size(), 0);
  for (int z = 0; z < dims.nz; ++z)
    for (int y = 0; y < dims.ny; ++y)
      for (int x = 0; x < dims.nx; ++x) {
        Eigen::Vector3d d = Eigen::Vector3d(x + 0.5, y + 0.5, z + 0.5) - center;
        for (int a = 0; a < 3; ++a) d(a) -= n(a) * std::round(d(a) / n(a));
        const double s = std::clamp(d.dot(axis), -half, half);
        if ((d - s * axis).norm() <= radius) ids[dims.index(x, y, z)] = 1;
      }
  return ids;
}

Geometry read_geometry(const std::filesystem::path& sidecar) {
  std::ifstream in(sidecar);
  if (!in) throw std::runtime_error("cannot open geometry sidecar " + sidecar.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("geometry sidecar " + sidecar.string() + ": " + e.what());
  }
  Geometry g;
  try {
    const auto dims = j.at("dims").get<std::vector<int>>();
    if (dims.size() != 3) throw std::runtime_error("\"dims\" needs three entries");
    g.dims = {dims[0], dims[1], dims[2]};
    g.dims.validate();
    const std::string dtype = j.value("dtype", "u8");
    if (dtype != "u8" && dtype != "u16") throw std::runtime_error("dtype must be u8 or u16");
    const std::filesystem::path raw = sidecar.parent_path() / j.at("raw").get<std::string>();
    std::ifstream rin(raw, std::ios::binary);
    if (!rin) throw std::runtime_error("cannot open raw voxel file " + raw.string());
    const std::size_t width = dtype == "u8" ? 1 : 2;
    std::vector<unsigned char> bytes(g.dims.size() * width);
    rin.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(rin.gcount()) != bytes.size() || rin.peek() != std::char_traits<char>::eof())
      throw std::runtime_error("raw voxel file " + raw.string() + " does not hold exactly " +
                               std::to_string(g.dims.size()) + " " + dtype + " values");
    g.ids.resize(g.dims.size());
    for (std::size_t i = 0; i < g.ids.size(); ++i)
      g.ids[i] = width == 1 ? bytes[i] : static_cast<std::uint16_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
    g.sidecar_json = j.dump();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("geometry sidecar " + sidecar.string() + ": " + e.what());
  }
  return g;
}

void write_geometry(const std::filesystem::path& sidecar, const GridDims& dims, const std::vector<std::uint16_t>& ids,
                    const std::string& materials_json) {
  if (ids.size() != dims.size()) throw std::invalid_argument("write_geometry: id count does not match the grid");
  const bool wide = std::any_of(ids.begin(), ids.end(), [](std::uint16_t v) { return v > 255; });
  std::filesystem::path raw = sidecar;
  raw.replace_extension(".raw");
  std::ofstream rout(raw, std::ios::binary);
  for (std::uint16_t v : ids) {
    rout.put(static_cast<char>(v & 0xff));
    if (wide) rout.put(static_cast<char>(v >> 8));
  }
  if (!rout) throw std::runtime_error("cannot write " + raw.string());
  nlohmann::json j;
  j["dims"] = {dims.nx, dims.ny, dims.nz};
  j["dtype"] = wide ? "u16" : "u8";
  j["raw"] = raw.filename().string();
  j["materials"] = nlohmann::json::parse(materials_json);
  std::ofstream out(sidecar);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + sidecar.string());
}

}  // namespace gsmlab::homogenize

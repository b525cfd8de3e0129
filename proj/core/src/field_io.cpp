#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "nlfilt/grid.hpp"

namespace nlfilt {

namespace {

constexpr std::array<char, 8> kMagic = {'N', 'L', 'F', 'F', 'I', 'E', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "binary field format assumes a little-endian host");

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("read_field_binary: truncated header");
  return v;
}

}  // namespace

void write_field_csv(const DiscreteField& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_field_csv: cannot open '" + path + "'");
  const GridSpec& g = f.grid;
  for (int k = 0; k < g.n; ++k) out << "xi" << k + 1 << ',';
  for (int k = 0; k < g.n; ++k) out << "eta" << k + 1 << ',';
  out << "s,value\n";
  out << std::setprecision(17);
  std::vector<double> c(static_cast<std::size_t>(g.coords_per_node()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    g.node_coords(i, c.data());
    for (double v : c) out << v << ',';
    out << f.values[i] << '\n';
  }
}

DiscreteField read_field_csv(const GridSpec& grid, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_field_csv: cannot open '" + path + "'");
  DiscreteField f(grid);
  std::string line;
  std::getline(in, line);  // header
  const auto cols = static_cast<std::size_t>(grid.coords_per_node()) + 1;
  std::vector<double> expected(cols - 1);
  std::size_t i = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (i >= f.size()) throw std::runtime_error(path + ":" + std::to_string(line_no) + ": too many rows");
    std::stringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != cols) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(cols) + " columns");
    }
    grid.node_coords(i, expected.data());
    for (std::size_t k = 0; k + 1 < cols; ++k) {
      if (std::abs(vals[k] - expected[k]) > 1e-9 * (1.0 + std::abs(expected[k]))) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": coordinates do not match grid node order");
      }
    }
    f.values[i++] = vals.back();
  }
  if (i != f.size()) throw std::runtime_error("read_field_csv: row count does not match grid");
  return f;
}

void write_field_binary(const DiscreteField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_field_binary: cannot open '" + path + "'");
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid.n));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid.points_per_axis_z));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid.points_per_axis_s));
  put<double>(out, f.grid.half_extent_z);
  put<double>(out, f.grid.half_extent_s);
  put<std::uint32_t>(out, f.grid.closure == Closure::censored ? 0u : 1u);
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
}

DiscreteField read_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_field_binary: cannot open '" + path + "'");
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("read_field_binary: bad magic");
  if (get<std::uint32_t>(in) != kVersion) throw std::runtime_error("read_field_binary: unsupported version");
  GridSpec g;
  g.n = static_cast<int>(get<std::uint32_t>(in));
  g.points_per_axis_z = static_cast<int>(get<std::uint32_t>(in));
  g.points_per_axis_s = static_cast<int>(get<std::uint32_t>(in));
  g.half_extent_z = get<double>(in);
  g.half_extent_s = get<double>(in);
  g.closure = get<std::uint32_t>(in) == 0u ? Closure::censored : Closure::dirichlet_zero;
  g.validate();
  DiscreteField f(g);
  in.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!in) throw std::runtime_error("read_field_binary: truncated payload");
  return f;
}

}  // namespace nlfilt

#include "mlab/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace mlab {
namespace {

static_assert(std::endian::native == std::endian::little,
              "field snapshots assume a little-endian host");

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("field snapshot: truncated header");
  return v;
}

}  // namespace

void write_field(std::ostream& os, const Field& f) {
  os.write(kFieldMagic, sizeof(kFieldMagic));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.d));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.n));
  put<double>(os, f.grid.period);
  put<std::uint8_t>(os, 0);
  for (Eigen::Index i = 0; i < f.samples.size(); ++i) {
    put<double>(os, f.samples[i].real());
    put<double>(os, f.samples[i].imag());
  }
  if (!os) throw std::runtime_error("field snapshot: write failed");
}

Field read_field(std::istream& is) {
  char magic[16];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kFieldMagic, sizeof(magic)) != 0)
    throw std::runtime_error("field snapshot: bad magic");
  GridSpec g;
  g.d = static_cast<int>(get<std::uint32_t>(is));
  g.n = static_cast<int>(get<std::uint32_t>(is));
  g.period = get<double>(is);
  const auto flag = get<std::uint8_t>(is);
  if (flag != 0) throw std::runtime_error("field snapshot: unsupported sample flag");
  g.validate();
  ComplexVector<double> s(static_cast<Eigen::Index>(g.size()));
  std::vector<double> raw(2 * g.size());
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(double)));
  if (!is) throw std::runtime_error("field snapshot: truncated samples");
  for (std::size_t i = 0; i < g.size(); ++i) s[static_cast<Eigen::Index>(i)] = {raw[2 * i], raw[2 * i + 1]};
  return Field(g, std::move(s));
}

std::vector<Field> read_fields(std::istream& is) {
  std::vector<Field> out;
  while (is.peek() != std::char_traits<char>::eof()) out.push_back(read_field(is));
  return out;
}

void save_field(const std::filesystem::path& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  write_field(os, f);
}

Field load_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_field(is);
}

}  // namespace mlab

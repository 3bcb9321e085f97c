#include <bit>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "tfcond/grid.hpp"

// Binary layout: 4-byte magic "TFCF", uint32 little-endian header length,
// UTF-8 JSON header {"d","n","L","basis"}, then n^d (re, im) pairs as
// little-endian IEEE doubles.

namespace tfcond {

namespace {

constexpr char kMagic[4] = {'T', 'F', 'C', 'F'};

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

template <class T>
void put(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated field file");
  return to_little(v);
}

}  // namespace

void write_field_binary(const Field& f, std::ostream& out) {
  const Grid& g = f.grid();
  nlohmann::json header = {{"d", g.dim()},
                           {"n", g.n()},
                           {"L", g.half_width()},
                           {"basis", f.basis() == Basis::position ? "position" : "frequency"}};
  const std::string text = header.dump();
  out.write(kMagic, 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& v : f.values()) {
    put<double>(out, v.real());
    put<double>(out, v.imag());
  }
  if (!out) throw std::runtime_error("failed writing field");
}

Field read_field_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("not a field file");
  const auto len = get<std::uint32_t>(in);
  std::string text(len, '\0');
  in.read(text.data(), len);
  if (!in) throw std::runtime_error("truncated field header");
  const auto header = nlohmann::json::parse(text);
  const Grid g = make_grid(header.at("d").get<int>(), header.at("n").get<int>(),
                           header.at("L").get<double>());
  const auto basis_name = header.at("basis").get<std::string>();
  Basis basis;
  if (basis_name == "position")
    basis = Basis::position;
  else if (basis_name == "frequency")
    basis = Basis::frequency;
  else
    throw std::runtime_error("unknown basis tag '" + basis_name + "'");
  Field f(g, basis);
  for (auto& v : f.values()) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    v = cplx(re, im);
  }
  return f;
}

void write_field_csv(const Field& f, std::ostream& out) {
  const Grid& g = f.grid();
  const bool freq = f.basis() == Basis::frequency;
  static const char* xs[3] = {"x", "y", "z"};
  static const char* ks[3] = {"kx", "ky", "kz"};
  for (int a = 0; a < g.dim(); ++a) out << (freq ? ks[a] : xs[a]) << ',';
  out << "re,im\n";
  out << std::setprecision(17);
  const auto k = g.wavenumbers();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto p = g.point(i);
    const auto idx = g.unravel(i);
    for (int a = 0; a < g.dim(); ++a) out << (freq ? k[idx[a]] : p[a]) << ',';
    out << f[i].real() << ',' << f[i].imag() << '\n';
  }
}

}  // namespace tfcond

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "kappadyn/scenario_io.hpp"

namespace kappadyn {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot payload is little-endian; big-endian hosts need byte swaps");

constexpr char kMagic[4] = {'W', 'P', 'S', '1'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint16_t kFlagComplex = 1u << 0;
constexpr std::uint16_t kFlagUnified = 1u << 1;
constexpr std::size_t kHeaderBytes = 80;

struct Header {
  std::uint16_t version;
  std::uint16_t flags;
  std::uint32_t nx;
  std::uint32_t np;
  double x_min, x_max, p_min, p_max;
  double hbar, kappa, mass, t;
};

void pack(char* dst, const Header& h) {
  std::memcpy(dst, kMagic, 4);
  std::memcpy(dst + 4, &h.version, 2);
  std::memcpy(dst + 6, &h.flags, 2);
  std::memcpy(dst + 8, &h.nx, 4);
  std::memcpy(dst + 12, &h.np, 4);
  std::memcpy(dst + 16, &h.x_min, 64);
}

Header unpack(const char* src, const std::filesystem::path& path) {
  if (std::memcmp(src, kMagic, 4) != 0) {
    throw IoError("not a snapshot file: " + path.string());
  }
  Header h;
  std::memcpy(&h.version, src + 4, 2);
  std::memcpy(&h.flags, src + 6, 2);
  std::memcpy(&h.nx, src + 8, 4);
  std::memcpy(&h.np, src + 12, 4);
  std::memcpy(&h.x_min, src + 16, 64);
  if (h.version != kVersion) {
    throw IoError("unsupported snapshot version in " + path.string());
  }
  return h;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const PhaseSpaceState& state,
                    const PhaseSpaceGrid& grid) {
  if (state.field.size() != grid.size()) throw ConfigError("field size does not match the grid");

  bool complex_payload = false;
  for (const cplx& v : state.field) {
    if (v.imag() != 0.0) {
      complex_payload = true;
      break;
    }
  }

  Header h{};
  h.version = kVersion;
  h.flags = (complex_payload ? kFlagComplex : 0) |
            (state.rep == Representation::unified ? kFlagUnified : 0);
  h.nx = static_cast<std::uint32_t>(grid.nx);
  h.np = static_cast<std::uint32_t>(grid.np);
  h.x_min = grid.x_min;
  h.x_max = grid.x_max;
  h.p_min = grid.p_min;
  h.p_max = grid.p_max;
  h.hbar = state.params.hbar;
  h.kappa = state.params.kappa;
  h.mass = state.params.mass;
  h.t = state.time;

  char header[kHeaderBytes];
  pack(header, h);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(header, kHeaderBytes);
  if (complex_payload) {
    out.write(reinterpret_cast<const char*>(state.field.data()),
              static_cast<std::streamsize>(state.field.size() * sizeof(cplx)));
  } else {
    std::vector<double> re(state.field.size());
    for (std::size_t i = 0; i < re.size(); ++i) re[i] = state.field[i].real();
    out.write(reinterpret_cast<const char*>(re.data()),
              static_cast<std::streamsize>(re.size() * sizeof(double)));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

LoadedSnapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());

  char header[kHeaderBytes];
  in.read(header, kHeaderBytes);
  if (in.gcount() != static_cast<std::streamsize>(kHeaderBytes)) {
    throw IoError("truncated snapshot header in " + path.string());
  }
  const Header h = unpack(header, path);
  if (h.nx < 8 || h.np < 8 || h.nx % 2 || h.np % 2 || h.nx > (1u << 20) || h.np > (1u << 20)) {
    throw IoError("invalid grid shape in " + path.string());
  }

  LoadedSnapshot loaded;
  try {
    loaded.grid = build_grid(static_cast<int>(h.nx), static_cast<int>(h.np), h.x_min, h.x_max,
                             h.p_min, h.p_max);
    loaded.state.params.hbar = h.hbar;
    loaded.state.params.kappa = h.kappa;
    loaded.state.params.mass = h.mass;
    loaded.state.params.validate();
  } catch (const ConfigError& e) {
    throw IoError("invalid snapshot header in " + path.string() + ": " + e.what());
  }
  loaded.state.rep =
      (h.flags & kFlagUnified) ? Representation::unified : Representation::wigner;
  loaded.state.time = h.t;

  const std::size_t n = loaded.grid.size();
  const bool complex_payload = h.flags & kFlagComplex;
  const std::size_t payload = n * (complex_payload ? 2 : 1) * sizeof(double);
  std::vector<char> raw(payload);
  in.read(raw.data(), static_cast<std::streamsize>(payload));
  if (in.gcount() != static_cast<std::streamsize>(payload)) {
    throw IoError("truncated snapshot payload in " + path.string() + ": expected " +
                  std::to_string(payload) + " bytes, got " + std::to_string(in.gcount()));
  }
  in.peek();
  if (!in.eof()) throw IoError("trailing bytes after snapshot payload in " + path.string());

  loaded.state.field.resize(n);
  if (complex_payload) {
    std::memcpy(loaded.state.field.data(), raw.data(), payload);
  } else {
    const double* re = reinterpret_cast<const double*>(raw.data());
    for (std::size_t i = 0; i < n; ++i) loaded.state.field[i] = cplx{re[i], 0.0};
  }
  return loaded;
}

}  // namespace kappadyn

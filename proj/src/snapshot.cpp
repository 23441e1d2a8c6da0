#include "patchflow/snapshot.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

namespace patchflow {
namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

template <class T>
void put(std::vector<char>& buf, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  buf.insert(buf.end(), b, b + sizeof(T));
}

template <class T>
T get(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

}  // namespace

void write_snapshot(const ScalarField& f, FieldRole role, double t, std::ostream& sink) {
  if (!f.all_finite()) throw SnapshotError(SnapshotErrorKind::non_finite, "refusing to write non-finite field");
  std::vector<char> buf;
  buf.reserve(kSnapshotHeaderBytes + 8 * f.size());
  buf.insert(buf.end(), {'T', 'P', 'F', '1'});
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(f.grid.nx));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(f.grid.ny));
  put<double>(buf, f.grid.h);
  put<double>(buf, t);
  put<std::uint8_t>(buf, static_cast<std::uint8_t>(role));
  for (double v : f.values) put<double>(buf, v);
  sink.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!sink) throw SnapshotError(SnapshotErrorKind::io, "snapshot write failed");
}

Snapshot read_snapshot(std::istream& source) {
  char head[kSnapshotHeaderBytes];
  source.read(head, kSnapshotHeaderBytes);
  if (source.gcount() < 4 || std::memcmp(head, "TPF1", 4) != 0) {
    if (source.gcount() >= 4) throw SnapshotError(SnapshotErrorKind::bad_magic, "bad snapshot magic");
    throw SnapshotError(SnapshotErrorKind::truncated, "snapshot header truncated");
  }
  if (source.gcount() < static_cast<std::streamsize>(kSnapshotHeaderBytes))
    throw SnapshotError(SnapshotErrorKind::truncated, "snapshot header truncated");

  const auto nx = get<std::uint32_t>(head + 4);
  const auto ny = get<std::uint32_t>(head + 8);
  const double h = get<double>(head + 12);
  const double t = get<double>(head + 20);
  const auto role = get<std::uint8_t>(head + 28);
  if (nx < 8 || ny < 8 || nx > (1u << 15) || ny > (1u << 15) || !(h > 0.0) || !std::isfinite(h) ||
      !std::isfinite(t) || role > 2)
    throw SnapshotError(SnapshotErrorKind::bad_header, "invalid snapshot header fields");

  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  std::vector<double> values(n);
  source.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(n * 8));
  if (static_cast<std::size_t>(source.gcount()) != n * 8)
    throw SnapshotError(SnapshotErrorKind::truncated, "snapshot payload truncated");
  for (double v : values)
    if (!std::isfinite(v)) throw SnapshotError(SnapshotErrorKind::non_finite, "snapshot payload contains NaN/Inf");

  const double half = 0.5 * nx * h;
  const double half_y = 0.5 * ny * h;
  Grid2D grid(static_cast<int>(nx), static_cast<int>(ny), h, -half, -half_y);
  return Snapshot{ScalarField(grid, std::move(values)), static_cast<FieldRole>(role), t};
}

void write_snapshot_file(const ScalarField& f, FieldRole role, double t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SnapshotError(SnapshotErrorKind::io, "cannot open " + path.string() + " for writing");
  write_snapshot(f, role, t, out);
}

Snapshot read_snapshot_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError(SnapshotErrorKind::io, "cannot open snapshot " + path.string());
  return read_snapshot(in);
}

}  // namespace patchflow

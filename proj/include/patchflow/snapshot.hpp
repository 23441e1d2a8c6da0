#pragma once

#include <filesystem>
#include <iosfwd>

#include "patchflow/grid.hpp"

namespace patchflow {

// TPF1 snapshot: 29-byte little-endian header
//   "TPF1" | nx u32 | ny u32 | h f64 | t f64 | role u8
// followed by nx*ny f64 values, row-major. The header carries no origin;
// readers assume the centered box [-nx*h/2, nx*h/2) used by the simulator.
inline constexpr std::size_t kSnapshotHeaderBytes = 29;

enum class SnapshotErrorKind { bad_magic, truncated, non_finite, bad_header, io };

class SnapshotError : public Error {
 public:
  SnapshotError(SnapshotErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  SnapshotErrorKind kind() const { return kind_; }

 private:
  SnapshotErrorKind kind_;
};

struct Snapshot {
  ScalarField field;
  FieldRole role = FieldRole::density;
  double t = 0.0;
};

void write_snapshot(const ScalarField& f, FieldRole role, double t, std::ostream& sink);
Snapshot read_snapshot(std::istream& source);

void write_snapshot_file(const ScalarField& f, FieldRole role, double t, const std::filesystem::path& path);
Snapshot read_snapshot_file(const std::filesystem::path& path);

}  // namespace patchflow

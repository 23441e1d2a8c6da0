#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "patchflow/grid.hpp"
#include "patchflow/nutrient.hpp"
#include "patchflow/projection.hpp"

namespace patchflow {

enum class Scheme { I, II };

struct DensityShape {
  enum class Kind { disk, annulus, union_of_disks, file };
  struct Disk {
    Point2 center;
    double radius = 0.0;
  };

  Kind kind = Kind::disk;
  Point2 center;
  double radius = 0.2;        // disk
  double inner_radius = 0.1;  // annulus
  double outer_radius = 0.2;  // annulus
  std::vector<Disk> disks;    // union_of_disks
  std::string path;           // file

  ScalarField rasterize(const Grid2D& g) const;
};

struct NutrientInit {
  bool from_file = false;
  double value = 1.0;
  std::string path;

  ScalarField build(const Grid2D& g) const;
};

struct RunConfig {
  Grid2D grid = Grid2D::centered_box(128, 1.0);
  double tau = 1.0 / 256.0;
  double T = 0.5;
  Scheme scheme = Scheme::I;
  double b = 0.0;
  ProjectionConfig projection;
  NutrientConfig nutrient;
  DensityShape initial_density;
  NutrientInit initial_nutrient;
  int snapshot_every = 1;
  std::uint64_t seed = 0;
  std::string name = "run";

  int steps() const;
  /// Throws ConfigError on any violated precondition, including a box too
  /// small for the support-radius growth bound R0 exp(T |n0|_inf / 2).
  void validate() const;
  /// The projection settings with tau synchronised to the run's tau.
  ProjectionConfig projection_config() const;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct SimState {
  double t = 0.0;
  ScalarField rho;
  ScalarField n;
  ScalarField p;
  ScalarField rho_lag;  // density driving absorption over the next interval (Scheme II)
  int step_index = 0;
};

struct SeriesRow {
  double t = 0.0;
  double mass = 0.0;
  double max_rho = 0.0;
  double p_l2 = 0.0;
  double grad_p_l2 = 0.0;
  double support_radius = 0.0;
  double n_min = 0.0;
};

struct Trajectory {
  std::vector<SimState> states;  // snapshots, in step order
  std::vector<SeriesRow> series;  // one row per step, initial state included
  bool valid = true;
  std::string error;
};

SimState initial_state(const RunConfig& cfg);
SeriesRow series_row(const SimState& s);

SimState step(const SimState& state, const RunConfig& cfg);

/// ceil(T / tau) steps. Step errors end the run with the partial trajectory
/// marked invalid.
Trajectory run(const RunConfig& cfg);

/// Sample-and-hold: the stored state with the largest time <= t.
const SimState& interpolant(const Trajectory& traj, double t);

/// Snapshot steps emitted by run(): 0, every snapshot_every-th step and the last.
std::vector<int> snapshot_steps(const RunConfig& cfg);

std::string snapshot_name(int step, const char* field);
void write_trajectory(const Trajectory& traj, const std::filesystem::path& dir);
void write_series(const std::vector<SeriesRow>& rows, std::ostream& out);
/// Loads the snapshots expected for cfg; a missing file names its step.
Trajectory read_trajectory(const std::filesystem::path& dir, const RunConfig& cfg);

}  // namespace patchflow

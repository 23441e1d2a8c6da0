#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

#include "patchflow/cli.hpp"
#include "patchflow/config.hpp"
#include "patchflow/csv.hpp"
#include "patchflow/diagnostics.hpp"

namespace patchflow::cli {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

void save_run(const ExperimentConfig& cfg, const Trajectory& traj, const fs::path& dir) {
  write_trajectory(traj, dir);
  ExperimentConfig own = cfg;
  own.sweep_D.clear();
  own.sweep_times.clear();
  write_text(dir / "run.cfg", serialize_config(own));
}

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("PATCHFLOW_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_simulate(const fs::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load_config_file(config);
    cfg.run.validate();
    const Trajectory traj = run(cfg.run);
    const fs::path dir = fs::path(cfg.output_dir) / cfg.run.name;
    save_run(cfg, traj, dir);
    if (!traj.valid) {
      err << "error: run aborted at " << traj.error << "; partial trajectory kept in " << dir.string() << '\n';
      return static_cast<int>(kFailure);
    }
    out << "simulate: " << cfg.run.steps() << " steps written to " << dir.string() << '\n';
    return static_cast<int>(kSuccess);
  });
}

int cmd_sweep(const fs::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig base = load_config_file(config);
    if (base.sweep_D.empty()) throw ConfigError("sweep.D_values must list at least one value");
    for (double D : base.sweep_D)
      if (!(D >= 0.0)) throw ConfigError("sweep.D_values must be >= 0");
    base.run.validate();

    std::vector<ExperimentConfig> jobs;
    std::vector<double> Ds{0.0};
    Ds.insert(Ds.end(), base.sweep_D.begin(), base.sweep_D.end());
    const fs::path root = fs::path(base.output_dir) / base.run.name;
    for (std::size_t k = 0; k < Ds.size(); ++k) {
      ExperimentConfig c = base;
      c.run.nutrient.D = Ds[k];
      c.run.snapshot_every = 1;
      c.run.name = "D" + std::to_string(k);
      c.output_dir = root.string();
      jobs.push_back(c);
    }

    std::vector<Trajectory> results(jobs.size());
    std::atomic<std::size_t> next{0};
    const int workers = std::min<int>(worker_count(), static_cast<int>(jobs.size()));
    auto worker = [&] {
      for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) {
        try {
          results[k] = run(jobs[k].run);
        } catch (const std::exception& e) {
          results[k].valid = false;
          results[k].error = e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    fs::create_directories(root);
    std::string index = "index,D,dir,valid\n";
    bool ok = true;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      const fs::path dir = root / jobs[k].run.name;
      save_run(jobs[k], results[k], dir);
      index += csv::row({csv::format(static_cast<int>(k)), csv::format(Ds[k]), jobs[k].run.name,
                         results[k].valid ? "1" : "0"});
      if (!results[k].valid) {
        err << "error: sweep run D=" << csv::format(Ds[k]) << " failed: " << results[k].error << '\n';
        ok = false;
      }
    }
    write_text(root / "sweep_runs.csv", index);
    if (!ok) return static_cast<int>(kFailure);

    std::vector<SweepRun> runs;
    for (std::size_t k = 1; k < jobs.size(); ++k) runs.push_back({Ds[k], &results[k]});
    const std::vector<double> times = base.sweep_times.empty() ? std::vector<double>{results[0].states.back().t}
                                                               : base.sweep_times;
    {
      std::ofstream h1(root / "h1.csv", std::ios::binary);
      write_h1_csv(h1_convergence_report(runs, results[0]), h1);
    }
    {
      std::ofstream hd(root / "hausdorff.csv", std::ios::binary);
      write_hausdorff_csv(hausdorff_convergence_report(runs, results[0], times, base.run.projection.tol_orth), hd);
    }
    out << "sweep: " << jobs.size() << " runs (" << workers << " workers), reports in " << root.string() << '\n';
    return static_cast<int>(kSuccess);
  });
}

int cmd_invariants(const fs::path& dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!fs::exists(dir / "run.cfg")) throw Error("no run.cfg in " + dir.string());
    ExperimentConfig cfg;
    try {
      cfg = load_config_file(dir / "run.cfg");
    } catch (const ConfigError& e) {
      throw Error(std::string("run.cfg: ") + e.what());
    }
    const Trajectory traj = read_trajectory(dir, cfg.run);
    const InvariantReport rep = check_run(traj, cfg.run);
    std::ofstream csvout(dir / "invariants.csv", std::ios::binary);
    rep.write_csv(csvout);
    for (const auto& e : rep.entries)
      if (!e.pass)
        err << "FAIL " << e.name << ": measured " << csv::format(e.measured) << " bound " << csv::format(e.bound)
            << " tolerance " << csv::format(e.tolerance) << '\n';
    out << "invariants: " << rep.entries.size() << " entries, " << (rep.all_pass() ? "all pass" : "failures")
        << '\n';
    return static_cast<int>(rep.all_pass() ? kSuccess : kFailure);
  });
}

int cmd_oracle_test(std::uint64_t seed, int count, bool inject_ct_bug, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (count < 0) throw ConfigError("--count must be >= 0");
    const OracleSuiteResult r = run_oracle_suite(seed, count, inject_ct_bug ? 1.01 : 1.0);
    out << "oracle-test seed=" << seed << " count=" << r.instances
        << " worst_projection_l1=" << csv::format(r.worst_projection_l1)
        << " worst_c_transform=" << csv::format(r.worst_c_transform)
        << " worst_mass_error=" << csv::format(r.worst_mass_error) << (r.pass ? " PASS" : " FAIL") << '\n';
    return static_cast<int>(r.pass ? kSuccess : kFailure);
  });
}

}  // namespace patchflow::cli

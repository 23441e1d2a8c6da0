#include "patchflow/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "patchflow/csv.hpp"

namespace patchflow {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("config key '" + key + "': not an integer: '" + v + "'");
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const std::string& item : split(v, ',')) out.push_back(to_double(key, item));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + csv::format(v[k]);
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"grid.n",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const long long n = to_int(k, v);
         if (n < 8 || n > 1 << 14) throw ConfigError("grid.n must lie in [8, 16384]");
         c.run.grid = Grid2D::centered_box(static_cast<int>(n), 0.5 * c.run.grid.length_x());
       }},
      {"grid.half_width",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const double L = to_double(k, v);
         if (!(L > 0.0)) throw ConfigError("grid.half_width must be positive");
         c.run.grid = Grid2D::centered_box(c.run.grid.nx, L);
       }},
      {"run.name", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.run.name = v; }},
      {"run.output_dir", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
      {"run.tau", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.run.tau = to_double(k, v); }},
      {"run.T", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.run.T = to_double(k, v); }},
      {"run.b", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.run.b = to_double(k, v); }},
      {"run.scheme",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         if (v == "I")
           c.run.scheme = Scheme::I;
         else if (v == "II")
           c.run.scheme = Scheme::II;
         else
           throw ConfigError("run.scheme must be I or II, got '" + v + "'");
       }},
      {"run.snapshot_every",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.snapshot_every = static_cast<int>(to_int(k, v));
       }},
      {"run.seed",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.seed = static_cast<std::uint64_t>(to_int(k, v));
       }},
      {"run.initial_density",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         using K = DensityShape::Kind;
         static const std::map<std::string, K> kinds = {
             {"disk", K::disk}, {"annulus", K::annulus}, {"union_of_disks", K::union_of_disks}, {"file", K::file}};
         auto it = kinds.find(v);
         if (it == kinds.end()) throw ConfigError("run.initial_density must be disk, annulus, union_of_disks or file");
         c.run.initial_density.kind = it->second;
       }},
      {"run.density_center_x",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.initial_density.center.x = to_double(k, v);
       }},
      {"run.density_center_y",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.initial_density.center.y = to_double(k, v);
       }},
      {"run.density_radius",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.initial_density.radius = to_double(k, v);
       }},
      {"run.density_inner_radius",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.initial_density.inner_radius = to_double(k, v);
       }},
      {"run.density_outer_radius",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.initial_density.outer_radius = to_double(k, v);
       }},
      {"run.density_disks",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.initial_density.disks.clear();
         for (const std::string& item : split(v, ';')) {
           const std::vector<std::string> xyz = split(item, ':');
           if (xyz.size() != 3) throw ConfigError("run.density_disks entries are x:y:r separated by ';'");
           c.run.initial_density.disks.push_back({{to_double(k, xyz[0]), to_double(k, xyz[1])}, to_double(k, xyz[2])});
         }
       }},
      {"run.density_file",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.run.initial_density.path = v; }},
      {"run.initial_nutrient",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         if (v == "constant")
           c.run.initial_nutrient.from_file = false;
         else if (v == "file")
           c.run.initial_nutrient.from_file = true;
         else
           throw ConfigError("run.initial_nutrient must be constant or file");
       }},
      {"run.nutrient_value",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.initial_nutrient.value = to_double(k, v);
       }},
      {"run.nutrient_file",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.run.initial_nutrient.path = v; }},
      {"projection.tol_mass",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.projection.tol_mass = to_double(k, v);
       }},
      {"projection.tol_constraint",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.projection.tol_constraint = to_double(k, v);
       }},
      {"projection.tol_orth",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.projection.tol_orth = to_double(k, v);
       }},
      {"projection.max_iterations",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.projection.max_iterations = static_cast<int>(to_int(k, v));
       }},
      {"nutrient.D",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.run.nutrient.D = to_double(k, v); }},
      {"nutrient.substeps",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.nutrient.substeps = static_cast<int>(to_int(k, v));
       }},
      {"nutrient.far_field",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.nutrient.far_field = to_double(k, v);
       }},
      {"nutrient.boundary_guard_tol",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.run.nutrient.boundary_guard_tol = to_double(k, v);
       }},
      {"sweep.D_values",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.sweep_D = to_list(k, v); }},
      {"sweep.times",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.sweep_times = to_list(k, v); }},
  };
  return table;
}

// Keys whose setters read other keys run after everything else.
int priority(const std::string& key) {
  if (key == "grid.half_width") return 0;
  if (key == "grid.n") return 1;
  return 2;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!setters().count(key)) throw ConfigError("unknown config key '" + key + "' (line " + std::to_string(lineno) + ")");
    if (!kv.emplace(key, value).second) throw ConfigError("repeated config key '" + key + "'");
  }

  ExperimentConfig cfg;
  bool far_field_given = kv.count("nutrient.far_field") != 0;
  for (int pass = 0; pass < 3; ++pass)
    for (const auto& [key, value] : kv)
      if (priority(key) == pass) setters().at(key)(cfg, key, value);
  if (!far_field_given && !cfg.run.initial_nutrient.from_file)
    cfg.run.nutrient.far_field = cfg.run.initial_nutrient.value;
  return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  const RunConfig& r = c.run;
  const DensityShape& d = r.initial_density;
  std::ostringstream out;
  auto put = [&](const char* key, const std::string& v) { out << key << '=' << v << '\n'; };
  put("grid.n", csv::format(r.grid.nx));
  put("grid.half_width", csv::format(0.5 * r.grid.length_x()));
  put("run.name", r.name);
  put("run.output_dir", c.output_dir);
  put("run.tau", csv::format(r.tau));
  put("run.T", csv::format(r.T));
  put("run.b", csv::format(r.b));
  put("run.scheme", r.scheme == Scheme::I ? "I" : "II");
  put("run.snapshot_every", csv::format(r.snapshot_every));
  put("run.seed", csv::format(static_cast<long long>(r.seed)));
  static const char* kinds[] = {"disk", "annulus", "union_of_disks", "file"};
  put("run.initial_density", kinds[static_cast<int>(d.kind)]);
  put("run.density_center_x", csv::format(d.center.x));
  put("run.density_center_y", csv::format(d.center.y));
  put("run.density_radius", csv::format(d.radius));
  put("run.density_inner_radius", csv::format(d.inner_radius));
  put("run.density_outer_radius", csv::format(d.outer_radius));
  std::string disks;
  for (std::size_t k = 0; k < d.disks.size(); ++k)
    disks += (k ? ";" : "") + csv::format(d.disks[k].center.x) + ":" + csv::format(d.disks[k].center.y) + ":" +
             csv::format(d.disks[k].radius);
  put("run.density_disks", disks);
  put("run.density_file", d.path);
  put("run.initial_nutrient", r.initial_nutrient.from_file ? "file" : "constant");
  put("run.nutrient_value", csv::format(r.initial_nutrient.value));
  put("run.nutrient_file", r.initial_nutrient.path);
  put("projection.tol_mass", csv::format(r.projection.tol_mass));
  put("projection.tol_constraint", csv::format(r.projection.tol_constraint));
  put("projection.tol_orth", csv::format(r.projection.tol_orth));
  put("projection.max_iterations", csv::format(r.projection.max_iterations));
  put("nutrient.D", csv::format(r.nutrient.D));
  put("nutrient.substeps", csv::format(r.nutrient.substeps));
  put("nutrient.far_field", csv::format(r.nutrient.far_field));
  put("nutrient.boundary_guard_tol", csv::format(r.nutrient.boundary_guard_tol));
  put("sweep.D_values", join(c.sweep_D));
  put("sweep.times", join(c.sweep_times));
  return out.str();
}

}  // namespace patchflow

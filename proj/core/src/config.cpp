#include "specgap/config.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "specgap/errors.hpp"

namespace specgap {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw config_error("unknown key '" + it.key() + "' in " + where);
  }
}

const json& object_at(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_object())
    throw config_error(std::string(key) + " must be an object");
  return v;
}

double number_of(const json& v, const std::string& name) {
  if (!v.is_number()) throw config_error(name + " must be a number");
  return v.get<double>();
}

int integer_of(const json& v, const std::string& name) {
  if (!v.is_number_integer()) throw config_error(name + " must be an integer");
  return v.get<int>();
}

// "auto" maps to 0, which every consumer treats as the automatic policy.
int integer_or_auto(const json& v, const std::string& name) {
  if (v.is_string()) {
    if (v.get<std::string>() == "auto") return 0;
    throw config_error(name + " must be an integer or \"auto\"");
  }
  int value = integer_of(v, name);
  if (value < 1) throw config_error(name + " must be positive");
  return value;
}

std::vector<double> number_list(const json& v, const std::string& name) {
  if (!v.is_array()) throw config_error(name + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(number_of(e, name + " entry"));
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw config_error("config root must be an object");
  reject_unknown(root, "the config",
                 {"intervals", "L", "geometry", "gamma", "epsilons", "grid",
                  "M", "K", "coefficients", "radial", "tolerances",
                  "thresholds", "output_dir"});

  RunConfig cfg;

  if (!root.contains("geometry")) throw config_error("geometry is required");
  {
    const json& g = object_at(root, "geometry");
    reject_unknown(g, "geometry", {"n", "r", "centers"});
    if (!g.contains("n") || !g.contains("r") || !g.contains("centers"))
      throw config_error("geometry needs n, r and centers");
    int dim = integer_of(g.at("n"), "geometry.n");
    if (dim < 2 || dim > 3) throw config_error("geometry.n must be 2 or 3");
    cfg.geometry.dim = dim;
    cfg.geometry.radius = number_of(g.at("r"), "geometry.r");
    const json& centers = g.at("centers");
    if (!centers.is_array())
      throw config_error("geometry.centers must be an array");
    cfg.geometry.centers.clear();
    for (const auto& c : centers) {
      auto coords = number_list(c, "geometry center");
      if (static_cast<int>(coords.size()) != dim)
        throw config_error("geometry center needs " + std::to_string(dim) +
                           " coordinates");
      std::array<double, 3> x{0.0, 0.0, 0.0};
      for (int d = 0; d < dim; ++d) x[d] = coords[d];
      cfg.geometry.centers.push_back(x);
    }
  }

  const bool has_intervals = root.contains("intervals");
  if (has_intervals && !root.contains("L"))
    throw config_error("L is required when intervals are given");
  if (root.contains("L")) {
    GapSpec spec;
    spec.window = number_of(root.at("L"), "L");
    if (has_intervals) {
      const json& intervals = root.at("intervals");
      if (!intervals.is_array())
        throw config_error("intervals must be an array of pairs");
      for (const auto& pair : intervals) {
        auto ends = number_list(pair, "interval");
        if (ends.size() != 2)
          throw config_error("each interval needs exactly two numbers");
        spec.alpha.push_back(ends[0]);
        spec.beta.push_back(ends[1]);
      }
      if (spec.count() != cfg.geometry.count())
        throw config_error("interval count must match the inclusion count");
    }
    cfg.targets = std::move(spec);
  }

  if (root.contains("gamma")) {
    cfg.gamma = number_of(root.at("gamma"), "gamma");
    if (!(cfg.gamma > 3.0)) throw config_error("gamma must exceed 3");
  }

  if (root.contains("epsilons")) {
    cfg.epsilons = number_list(root.at("epsilons"), "epsilons");
    if (cfg.epsilons.empty()) throw config_error("epsilons must be nonempty");
    for (double eps : cfg.epsilons)
      if (!(eps > 0.0 && eps < 1.0))
        throw config_error("every epsilon must lie in (0, 1)");
  }

  if (root.contains("grid")) {
    const json& g = object_at(root, "grid");
    reject_unknown(g, "grid", {"N", "N_max", "policy"});
    if (g.contains("N")) {
      cfg.grid_n = integer_or_auto(g.at("N"), "grid.N");
      if (cfg.grid_n != 0 && cfg.grid_n < 2)
        throw config_error("grid.N must be at least 2");
    }
    if (g.contains("N_max")) {
      cfg.grid_n_max = integer_of(g.at("N_max"), "grid.N_max");
      if (cfg.grid_n_max < 2) throw config_error("grid.N_max must be at least 2");
    }
    if (g.contains("policy")) {
      const json& p = g.at("policy");
      if (!p.is_string()) throw config_error("grid.policy must be a string");
      cfg.grid_policy = p.get<std::string>();
      if (cfg.grid_policy != "auto" && cfg.grid_policy != "direct" &&
          cfg.grid_policy != "snap")
        throw config_error("grid.policy must be auto, direct or snap");
    }
  }

  if (root.contains("M")) {
    cfg.theta_samples = integer_of(root.at("M"), "M");
    if (cfg.theta_samples < 1) throw config_error("M must be at least 1");
  }
  if (root.contains("K")) cfg.bands = integer_or_auto(root.at("K"), "K");

  if (root.contains("coefficients")) {
    const json& c = object_at(root, "coefficients");
    reject_unknown(c, "coefficients", {"a", "b"});
    if (!c.contains("a") || !c.contains("b"))
      throw config_error("coefficients need both a and b");
    MediumCoefficients mc;
    mc.a = number_list(c.at("a"), "coefficients.a");
    mc.b = number_list(c.at("b"), "coefficients.b");
    if (mc.a.size() != mc.b.size() || mc.a.size() != cfg.geometry.count())
      throw config_error(
          "coefficients must list one a and one b per inclusion");
    for (double v : mc.a)
      if (!(v > 0.0)) throw config_error("coefficients.a must be positive");
    for (double v : mc.b)
      if (!(v > 0.0)) throw config_error("coefficients.b must be positive");
    cfg.coefficients = std::move(mc);
  }

  if (root.contains("radial")) {
    const json& r = object_at(root, "radial");
    reject_unknown(r, "radial", {"inclusion", "N"});
    if (r.contains("inclusion")) {
      cfg.radial_inclusion = integer_of(r.at("inclusion"), "radial.inclusion");
      if (cfg.radial_inclusion < 1 ||
          (cfg.geometry.count() > 0 &&
           static_cast<std::size_t>(cfg.radial_inclusion) >
               cfg.geometry.count()))
        throw config_error("radial.inclusion is out of range");
    }
    if (r.contains("N")) {
      cfg.radial_n = integer_of(r.at("N"), "radial.N");
      if (cfg.radial_n < 2) throw config_error("radial.N must be at least 2");
    }
  }

  if (root.contains("tolerances")) {
    const json& t = object_at(root, "tolerances");
    reject_unknown(t, "tolerances", {"root", "eigensolver", "merge"});
    if (t.contains("root")) {
      cfg.tol_root = number_of(t.at("root"), "tolerances.root");
      if (!(cfg.tol_root > 0.0))
        throw config_error("tolerances.root must be positive");
    }
    if (t.contains("eigensolver")) {
      cfg.tol_eigensolver =
          number_of(t.at("eigensolver"), "tolerances.eigensolver");
      if (!(cfg.tol_eigensolver > 0.0))
        throw config_error("tolerances.eigensolver must be positive");
    }
    if (t.contains("merge")) {
      const json& m = t.at("merge");
      if (m.is_string()) {
        if (m.get<std::string>() != "auto")
          throw config_error("tolerances.merge must be a number or \"auto\"");
        cfg.tol_merge = 0.0;
      } else {
        cfg.tol_merge = number_of(m, "tolerances.merge");
        if (cfg.tol_merge < 0.0)
          throw config_error("tolerances.merge must be nonnegative");
      }
    }
  }

  if (root.contains("thresholds")) {
    const json& t = object_at(root, "thresholds");
    reject_unknown(t, "thresholds", {"endpoint_rel_error"});
    if (t.contains("endpoint_rel_error")) {
      cfg.endpoint_rel_error =
          number_of(t.at("endpoint_rel_error"), "thresholds.endpoint_rel_error");
      if (!(cfg.endpoint_rel_error > 0.0))
        throw config_error("thresholds.endpoint_rel_error must be positive");
    }
  }

  if (root.contains("output_dir")) {
    const json& o = root.at("output_dir");
    if (!o.is_string() || o.get<std::string>().empty())
      throw config_error("output_dir must be a nonempty string");
    cfg.output_dir = o.get<std::string>();
  }

  return cfg;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in)
    throw config_error("cannot read config file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace specgap

#include "lv/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lv/errors.hpp"
#include "lv/version.hpp"

namespace lv {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key()))
      throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number())
    throw ConfigError("config: expected a number for " + where);
  return j.get<double>();
}

CoefficientField parse_coefficient(const json& j, const std::string& name) {
  if (j.is_number()) return CoefficientField::constant(j.get<double>());
  if (!j.is_object())
    throw ConfigError("config: coefficient '" + name +
                      "' must be a number or an object");
  const std::string kind = j.value("kind", "");
  if (kind == "constant") {
    reject_unknown_keys(j, {"kind", "value"}, "coefficient " + name);
    if (!j.contains("value"))
      throw ConfigError("config: coefficient '" + name + "' needs 'value'");
    return CoefficientField::constant(get_number(j.at("value"), name));
  }
  if (kind == "expr") {
    reject_unknown_keys(j, {"kind", "expr"}, "coefficient " + name);
    if (!j.contains("expr") || !j.at("expr").is_string())
      throw ConfigError("config: coefficient '" + name + "' needs string 'expr'");
    try {
      return CoefficientField::expression(j.at("expr").get<std::string>());
    } catch (const ConfigError& e) {
      throw ConfigError("config: coefficient '" + name + "': " + e.what());
    }
  }
  if (kind == "sampled") {
    reject_unknown_keys(j, {"kind", "shape", "extents", "period", "values"},
                        "coefficient " + name);
    if (!j.contains("shape") || !j.at("shape").is_array())
      throw ConfigError("config: sampled coefficient '" + name + "' needs 'shape'");
    std::array<int, 2> shape{1, 1};
    int dim = 0;
    for (const auto& s : j.at("shape")) {
      if (dim >= 2) throw ConfigError("config: 'shape' supports up to 2 axes");
      shape[dim++] = s.get<int>();
    }
    std::array<double, 2> lo{0.0, 0.0}, hi{1.0, 1.0};
    if (j.contains("extents")) {
      int ax = 0;
      for (const auto& e : j.at("extents")) {
        if (ax >= dim) throw ConfigError("config: sampled 'extents' rank mismatch");
        lo[ax] = get_number(e.at(0), name + " extents");
        hi[ax] = get_number(e.at(1), name + " extents");
        ++ax;
      }
    }
    const double period = j.value("period", 0.0);
    if (!j.contains("values") || !j.at("values").is_array())
      throw ConfigError("config: sampled coefficient '" + name + "' needs 'values'");
    std::vector<std::vector<double>> slices;
    const json& values = j.at("values");
    const bool nested = !values.empty() && values.front().is_array();
    if (nested) {
      for (const auto& s : values) slices.push_back(s.get<std::vector<double>>());
    } else {
      slices.push_back(values.get<std::vector<double>>());
    }
    try {
      return CoefficientField::sampled(dim, shape, lo, hi, period,
                                       std::move(slices));
    } catch (const DataError& e) {
      throw ConfigError("config: coefficient '" + name + "': " + e.what());
    }
  }
  throw ConfigError("config: coefficient '" + name +
                    "': kind must be constant, expr, or sampled");
}

}  // namespace

ParsedConfig parse_config_text(const std::string& text,
                               const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("config " + origin + ": invalid JSON: " + e.what());
  }
  if (!root.is_object()) throw ConfigError("config " + origin + ": not an object");
  reject_unknown_keys(root,
                      {"version", "dim", "extents", "bc", "q", "r",
                       "coefficients", "period", "class_params", "grid",
                       "horizon", "controls", "initial", "threshold", "lambda"},
                      "top level");

  if (!root.contains("version"))
    throw ConfigError("config " + origin + ": missing 'version'");
  if (root.at("version").get<int>() != kConfigVersion)
    throw ConfigError("config " + origin + ": unsupported version " +
                      root.at("version").dump() + " (expected " +
                      std::to_string(kConfigVersion) + ")");

  ParsedConfig out;
  out.raw = text;
  ProblemSpec& spec = out.spec;
  spec.dim = root.value("dim", 1);
  if (spec.dim < 1 || spec.dim > 2)
    throw ConfigError("config " + origin + ": dim must be 1 or 2");

  if (root.contains("extents")) {
    const json& ext = root.at("extents");
    if (!ext.is_array() || static_cast<int>(ext.size()) != spec.dim)
      throw ConfigError("config " + origin + ": 'extents' needs one [lo, hi] per axis");
    for (int ax = 0; ax < spec.dim; ++ax) {
      spec.lo[ax] = get_number(ext.at(ax).at(0), "extents");
      spec.hi[ax] = get_number(ext.at(ax).at(1), "extents");
      if (!(spec.lo[ax] < spec.hi[ax]))
        throw ConfigError("config " + origin + ": extents must be increasing");
    }
  }

  const std::string bc = root.value("bc", "dirichlet");
  if (bc == "dirichlet") spec.bc = BoundaryKind::Dirichlet;
  else if (bc == "neumann") spec.bc = BoundaryKind::Neumann;
  else if (bc == "none") spec.bc = BoundaryKind::None;
  else throw ConfigError("config " + origin + ": bc must be dirichlet, neumann, or none");

  spec.q = root.value("q", 1.0);
  spec.r = root.value("r", 1.0);

  if (!root.contains("coefficients") || !root.at("coefficients").is_object())
    throw ConfigError("config " + origin + ": missing 'coefficients' object");
  const json& co = root.at("coefficients");
  reject_unknown_keys(co, {"a1", "a2", "b1", "b2", "c1", "c2"}, "coefficients");
  for (const char* name : {"a1", "a2", "b1", "b2", "c1", "c2"}) {
    if (!co.contains(name))
      throw ConfigError("config " + origin + ": missing coefficient '" +
                        std::string(name) + "'");
  }
  spec.a1 = parse_coefficient(co.at("a1"), "a1");
  spec.a2 = parse_coefficient(co.at("a2"), "a2");
  spec.b1 = parse_coefficient(co.at("b1"), "b1");
  spec.b2 = parse_coefficient(co.at("b2"), "b2");
  spec.c1 = parse_coefficient(co.at("c1"), "c1");
  spec.c2 = parse_coefficient(co.at("c2"), "c2");

  if (root.contains("period")) spec.period = get_number(root.at("period"), "period");

  if (root.contains("class_params")) {
    const json& cp = root.at("class_params");
    reject_unknown_keys(cp, {"eps0", "m0", "lipschitz"}, "class_params");
    spec.class_params.eps0 = cp.value("eps0", spec.class_params.eps0);
    spec.class_params.m0 = cp.value("m0", spec.class_params.m0);
    spec.class_params.lipschitz =
        cp.value("lipschitz", spec.class_params.lipschitz);
  }

  RunOptions& opt = out.options;
  if (root.contains("grid")) {
    const json& gr = root.at("grid");
    if (!gr.is_array() || static_cast<int>(gr.size()) != spec.dim)
      throw ConfigError("config " + origin + ": 'grid' needs one entry per axis");
    for (int ax = 0; ax < spec.dim; ++ax) opt.grid_n[ax] = gr.at(ax).get<int>();
    opt.grid_set = true;
  }
  if (root.contains("horizon")) {
    const json& h = root.at("horizon");
    if (h.is_string() && h.get<std::string>() == "inf")
      opt.horizon = std::numeric_limits<double>::infinity();
    else
      opt.horizon = get_number(h, "horizon");
  }
  if (root.contains("controls")) {
    const json& c = root.at("controls");
    reject_unknown_keys(c,
                        {"dt_init", "dt_min", "dt_max", "theta",
                         "blow_norm_cap", "quiescence_cap", "snapshot_every",
                         "max_snapshots", "max_steps"},
                        "controls");
    StepControls& sc = opt.controls;
    sc.dt_max = c.value("dt_max", sc.dt_max);
    sc.dt_init = c.value("dt_init", sc.dt_max);
    sc.dt_min = c.value("dt_min", sc.dt_min);
    sc.theta = c.value("theta", sc.theta);
    sc.blow_norm_cap = c.value("blow_norm_cap", sc.blow_norm_cap);
    sc.quiescence_cap = c.value("quiescence_cap", sc.quiescence_cap);
    sc.snapshot_every = c.value("snapshot_every", sc.snapshot_every);
    sc.max_snapshots = c.value("max_snapshots", sc.max_snapshots);
    sc.max_steps = c.value("max_steps", sc.max_steps);
    sc.validate();
  } else {
    opt.controls.dt_init = opt.controls.dt_max;
  }
  if (root.contains("initial")) {
    const json& in = root.at("initial");
    reject_unknown_keys(in, {"profile", "amplitude", "v_scale"}, "initial");
    const std::string p = in.value("profile", "sine");
    if (p == "sine") opt.profile = ProfileKind::SineProduct;
    else if (p == "gaussian") opt.profile = ProfileKind::Gaussian;
    else if (p == "constant") opt.profile = ProfileKind::Constant;
    else throw ConfigError("config " + origin + ": initial.profile must be sine, gaussian, or constant");
    opt.amplitude = in.value("amplitude", 1.0);
    opt.v_scale = in.value("v_scale", 1.0);
  }
  if (root.contains("threshold")) {
    const json& th = root.at("threshold");
    reject_unknown_keys(th, {"alpha_lo", "alpha_hi", "tol"}, "threshold");
    opt.threshold_alpha_lo = th.value("alpha_lo", 0.0);
    opt.threshold_alpha_hi = th.value("alpha_hi", 0.0);
    opt.threshold_tol = th.value("tol", 1e-3);
  }
  opt.lambda = root.value("lambda", 1.0);

  // Delegate the class checks to validate_problem on a coarse probe grid.
  std::array<int, 2> probe = opt.grid_set ? opt.grid_n : std::array<int, 2>{64, 64};
  for (int ax = 0; ax < spec.dim; ++ax) probe[ax] = std::min(probe[ax], 64);
  const ValidationReport report = validate_problem(spec, *spec.grid_for(probe));
  if (!report.valid())
    throw ConfigError("config " + origin + ": problem violates the coefficient class:\n" +
                      report.summary());
  return out;
}

ParsedConfig parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace lv

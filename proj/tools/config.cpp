#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nlfilt::cli {

namespace {

json arr(std::initializer_list<double> v) { return json(std::vector<double>(v)); }

// Keys whose value must be an integer.
bool integral_key(const std::string& key) {
  static const std::vector<std::string> keys{
      "seed",  "grid.n", "grid.points_per_axis_z", "grid.points_per_axis_s", "quad.subcell_refinement",
      "quad.dense_threshold", "quad.tail_samples", "evolution.resolvent_max_iters", "verify.fields",
      "verify.problems", "verify.holder_depth"};
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

const char* type_name(const json& v) {
  if (v.is_boolean()) return "boolean";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  return "other";
}

bool same_kind(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return true;
  return std::string(type_name(a)) == type_name(b);
}

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

}  // namespace

const std::vector<KeyInfo>& config_reference() {
  static const std::vector<KeyInfo> ref{
      {"seed", 12345, "seed for every random draw (test fields, Monte Carlo tails)"},
      {"grid.n", 1, "Heisenberg dimension n (H^n has 2n+1 coordinates)"},
      {"grid.half_extent_z", 2.0, "lattice half-width along each xi/eta axis"},
      {"grid.half_extent_s", 2.0, "lattice half-width along s"},
      {"grid.points_per_axis_z", 9, "odd node count per xi/eta axis"},
      {"grid.points_per_axis_s", 9, "odd node count along s"},
      {"grid.closure", "censored", "censored | dirichlet_zero"},
      {"kernel.family", "pure_power", "pure_power | log_rough | tabulated_radial"},
      {"kernel.alpha", 1.0, "order alpha in (0, 2)"},
      {"kernel.amplitude", 0.5, "log_rough: a in [0, 1) in 1 + a sin(log d)"},
      {"kernel.Lambda", 2.0, "tabulated_radial: ellipticity bound, multiplier clipped to [1/Lambda, Lambda]"},
      {"kernel.profile", "", "tabulated_radial: CSV file with columns distance,multiplier"},
      {"quad.inner_cutoff_factor", 2.0, "rho0 = factor * max(h_z, sqrt(h_s))"},
      {"quad.tail_radius", 0.0, "far-field radius R for the dirichlet exterior; 0 = outside the lattice box"},
      {"quad.subcell_refinement", 0, "extra subcell samples per axis for pairs closer than 3 rho0"},
      {"quad.dense_threshold", 8000, "grids up to this many nodes store the weight matrix"},
      {"quad.tail_samples", 20000, "Monte Carlo samples per node for non-radial tails"},
      {"evolution.m", 2.0, "nonlinearity exponent m > 0"},
      {"evolution.dt", 0.05, "time step (first step for geometric schedules)"},
      {"evolution.horizon", 1.0, "final time T"},
      {"evolution.schedule", "uniform", "uniform | geometric"},
      {"evolution.dt_ratio", 1.1, "geometric schedule growth factor"},
      {"evolution.resolvent_tol", 1e-10, "sup-norm residual tolerance of each implicit step"},
      {"evolution.resolvent_max_iters", 100, "Newton iteration cap per step"},
      {"evolution.p_list", arr({1.0, 2.0}), "L^p norms recorded every step (p >= 1)"},
      {"evolution.diagnostics_only", false, "store fields only at step 0, checkpoints and the final step"},
      {"evolution.checkpoint_times", json::array(), "times at which fields are stored and written"},
      {"initial.preset", "koranyi_bump", "koranyi_bump | koranyi_indicator | two_bump | signed_two_bump"},
      {"initial.amplitude", 1.0, "peak value"},
      {"initial.radius", 1.0, "Koranyi radius of each bump"},
      {"initial.separation", 0.75, "two-bump centers at xi_1 = -separation, +separation"},
      {"verify.fields", 20, "random fields per operator check"},
      {"verify.m_values", arr({0.5, 1.0, 2.0, 3.0}), "exponents for the Stroock-Varopoulos and resolvent suites"},
      {"verify.problems", 20, "random resolvent problems per exponent"},
      {"verify.epsilon", 0.5, "resolvent step size in the resolvent suite"},
      {"verify.lambda", 2.0, "amplitude factor of the scaling suite"},
      {"verify.smoothing_p", 1.0, "p of the smoothing exponent gamma_p"},
      {"verify.smoothing_rel_tol", 0.15, "relative tolerance on the fitted smoothing slope"},
      {"verify.extinction_p", 3.0, "p of the extinction differential inequality"},
      {"verify.extinction_threshold", 1e-6, "sup-norm level counted as extinct"},
      {"verify.radii", arr({4.0, 8.0, 16.0}), "far-field radii of the dirichlet mass-leak fit"},
      {"verify.mass_rate_rel_tol", 0.2, "relative tolerance on the mass-leak slope"},
      {"verify.holder_R", 2.0, "radius ratio between nested cylinders"},
      {"verify.holder_depth", 3, "number of nested cylinders after the first"},
      {"verify.holder_r_base", 1.0, "radius of the outermost cylinder"},
      {"verify.holder_center", arr({0.0, 0.0, 0.0}), "cylinder center (2n+1 coordinates)"},
      {"verify.holder_t0", 0.0, "top time of the cylinders; 0 = end of the run"},
      {"verify.holder_degenerate", false, "scale cylinder depths by the oscillation (vanishing points)"},
  };
  return ref;
}

Config::Config() {
  values_ = json::object();
  for (const auto& k : config_reference()) values_[k.key] = k.default_value;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot read config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

Config Config::parse(const std::string& text, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  cfg.text_ = text;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1) << ": malformed JSON: " << e.what();
    throw ConfigError(msg.str());
  }
  if (!doc.is_object()) throw ConfigError(source + ":1: config must be a JSON object of dotted keys");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    if (!cfg.values_.contains(key)) cfg.fail(key, "unknown key");
    const json& def = cfg.values_[key];
    if (!same_kind(def, it.value())) {
      cfg.fail(key, std::string("expected ") + type_name(def) + ", got " + type_name(it.value()));
    }
    if (it.value().is_array()) {
      for (const auto& e : it.value()) {
        if (!e.is_number()) cfg.fail(key, "array entries must be numbers");
      }
    }
    cfg.values_[key] = it.value();
  }
  cfg.validate();
  return cfg;
}

void Config::fail(const std::string& key, const std::string& message) const {
  std::ostringstream msg;
  msg << source_;
  const std::string quoted = "\"" + key + "\"";
  const std::size_t pos = text_.find(quoted);
  if (pos != std::string::npos) msg << ":" << line_of_offset(text_, pos);
  msg << ": " << key << ": " << message;
  throw ConfigError(msg.str());
}

bool Config::is_numeric_key(const std::string& key) const {
  return values_.contains(key) && values_.at(key).is_number();
}

void Config::set_number(const std::string& key, double value) {
  if (!values_.contains(key)) throw ConfigError("unknown key '" + key + "'");
  if (!values_[key].is_number()) throw ConfigError(key + ": not a numeric key");
  if (integral_key(key)) {
    if (value != std::round(value)) throw ConfigError(key + ": expects an integer, got " + std::to_string(value));
    values_[key] = static_cast<std::int64_t>(value);
  } else {
    values_[key] = value;
  }
  validate();
}

double Config::number(const std::string& key) const { return values_.at(key).get<double>(); }
int Config::integer(const std::string& key) const { return static_cast<int>(values_.at(key).get<double>()); }
bool Config::flag(const std::string& key) const { return values_.at(key).get<bool>(); }
std::string Config::text(const std::string& key) const { return values_.at(key).get<std::string>(); }
std::vector<double> Config::numbers(const std::string& key) const {
  return values_.at(key).get<std::vector<double>>();
}

std::uint64_t Config::seed() const { return static_cast<std::uint64_t>(values_.at("seed").get<double>()); }

void Config::validate() const {
  for (const auto& k : config_reference()) {
    const json& v = values_.at(k.key);
    if (v.is_number()) {
      const double x = v.get<double>();
      if (!std::isfinite(x)) fail(k.key, "must be finite");
      if (integral_key(k.key) && x != std::round(x)) fail(k.key, "must be an integer");
    }
  }
  auto positive = [&](const char* key) {
    if (!(number(key) > 0.0)) fail(key, "must be > 0");
  };
  if (number("seed") < 0) fail("seed", "must be >= 0");
  if (integer("grid.n") < 1) fail("grid.n", "must be >= 1");
  for (const char* key : {"grid.points_per_axis_z", "grid.points_per_axis_s"}) {
    const int p = integer(key);
    if (p < 3 || p % 2 == 0) fail(key, "must be odd and >= 3");
  }
  positive("grid.half_extent_z");
  positive("grid.half_extent_s");
  try {
    closure_from_string(text("grid.closure"));
  } catch (const std::exception&) {
    fail("grid.closure", "expected censored or dirichlet_zero, got '" + text("grid.closure") + "'");
  }

  const std::string family = text("kernel.family");
  if (family != "pure_power" && family != "log_rough" && family != "tabulated_radial") {
    fail("kernel.family", "expected pure_power, log_rough or tabulated_radial, got '" + family + "'");
  }
  const double alpha = number("kernel.alpha");
  if (!(alpha > 0.0 && alpha < 2.0)) fail("kernel.alpha", "must lie in (0, 2)");
  const double a = number("kernel.amplitude");
  if (!(a >= 0.0 && a < 1.0)) fail("kernel.amplitude", "must lie in [0, 1)");
  if (!(number("kernel.Lambda") >= 1.0)) fail("kernel.Lambda", "must be >= 1");
  if (family == "tabulated_radial" && text("kernel.profile").empty()) {
    fail("kernel.profile", "tabulated_radial needs a profile file");
  }

  positive("quad.inner_cutoff_factor");
  if (number("quad.tail_radius") < 0.0) fail("quad.tail_radius", "must be >= 0 (0 selects the lattice box)");
  if (integer("quad.subcell_refinement") < 0) fail("quad.subcell_refinement", "must be >= 0");
  if (number("quad.dense_threshold") < 0) fail("quad.dense_threshold", "must be >= 0");
  if (integer("quad.tail_samples") < 1) fail("quad.tail_samples", "must be >= 1");

  positive("evolution.m");
  positive("evolution.dt");
  positive("evolution.horizon");
  positive("evolution.resolvent_tol");
  if (integer("evolution.resolvent_max_iters") < 1) fail("evolution.resolvent_max_iters", "must be >= 1");
  const std::string schedule = text("evolution.schedule");
  if (schedule != "uniform" && schedule != "geometric") {
    fail("evolution.schedule", "expected uniform or geometric, got '" + schedule + "'");
  }
  if (schedule == "geometric" && !(number("evolution.dt_ratio") >= 1.0)) fail("evolution.dt_ratio", "must be >= 1");
  for (double p : numbers("evolution.p_list")) {
    if (!(p >= 1.0)) fail("evolution.p_list", "every p must be >= 1");
  }
  for (double t : numbers("evolution.checkpoint_times")) {
    if (!(t >= 0.0)) fail("evolution.checkpoint_times", "times must be >= 0");
  }

  const auto& presets = initial_data_presets();
  if (std::find(presets.begin(), presets.end(), text("initial.preset")) == presets.end()) {
    fail("initial.preset", "unknown preset '" + text("initial.preset") + "'");
  }
  positive("initial.radius");
  if (!(number("initial.separation") >= 0.0)) fail("initial.separation", "must be >= 0");

  if (integer("verify.fields") < 1) fail("verify.fields", "must be >= 1");
  if (integer("verify.problems") < 1) fail("verify.problems", "must be >= 1");
  for (double m : numbers("verify.m_values")) {
    if (!(m > 0.0)) fail("verify.m_values", "every m must be > 0");
  }
  positive("verify.epsilon");
  positive("verify.lambda");
  if (!(number("verify.smoothing_p") >= 1.0)) fail("verify.smoothing_p", "must be >= 1");
  if (!(number("verify.extinction_p") >= 1.0)) fail("verify.extinction_p", "must be >= 1");
  positive("verify.extinction_threshold");
  positive("verify.smoothing_rel_tol");
  positive("verify.mass_rate_rel_tol");
  for (double r : numbers("verify.radii")) {
    if (!(r > 0.0)) fail("verify.radii", "radii must be > 0");
  }
  if (!(number("verify.holder_R") > 1.0)) fail("verify.holder_R", "must be > 1");
  if (integer("verify.holder_depth") < 1) fail("verify.holder_depth", "must be >= 1");
  positive("verify.holder_r_base");
  if (numbers("verify.holder_center").size() != static_cast<std::size_t>(2 * integer("grid.n") + 1)) {
    fail("verify.holder_center", "needs 2n+1 coordinates");
  }
  if (number("verify.holder_t0") < 0.0) fail("verify.holder_t0", "must be >= 0");
}

GridSpec Config::grid() const {
  GridSpec g;
  g.n = integer("grid.n");
  g.half_extent_z = number("grid.half_extent_z");
  g.half_extent_s = number("grid.half_extent_s");
  g.points_per_axis_z = integer("grid.points_per_axis_z");
  g.points_per_axis_s = integer("grid.points_per_axis_s");
  g.closure = closure_from_string(text("grid.closure"));
  return g;
}

KernelSpec Config::kernel() const {
  const std::string family = text("kernel.family");
  const double alpha = number("kernel.alpha");
  if (family == "log_rough") return KernelSpec::log_rough(alpha, number("kernel.amplitude"));
  if (family == "tabulated_radial") {
    try {
      return KernelSpec::tabulated(alpha, number("kernel.Lambda"), RadialProfile::load_csv(text("kernel.profile")));
    } catch (const std::exception& e) {
      fail("kernel.profile", e.what());
    }
  }
  return KernelSpec::pure_power(alpha);
}

QuadratureConfig Config::quad() const {
  QuadratureConfig q;
  q.inner_cutoff_factor = number("quad.inner_cutoff_factor");
  if (number("quad.tail_radius") > 0.0) q.tail_radius = number("quad.tail_radius");
  q.subcell_refinement = integer("quad.subcell_refinement");
  q.dense_threshold = static_cast<std::size_t>(number("quad.dense_threshold"));
  q.tail_samples = static_cast<std::size_t>(number("quad.tail_samples"));
  q.seed = seed();
  return q;
}

EvolutionConfig Config::evolution() const {
  EvolutionConfig e;
  e.m = number("evolution.m");
  e.kernel = kernel();
  e.grid = grid();
  e.quad = quad();
  const double dt = number("evolution.dt");
  const double horizon = number("evolution.horizon");
  e.dt_schedule = text("evolution.schedule") == "geometric"
                      ? geometric_schedule(dt, number("evolution.dt_ratio"), horizon)
                      : uniform_schedule(dt, horizon);
  e.resolvent_tol = number("evolution.resolvent_tol");
  e.resolvent_max_iters = integer("evolution.resolvent_max_iters");
  e.diagnostics_p_list = numbers("evolution.p_list");
  e.diagnostics_only = flag("evolution.diagnostics_only");
  e.checkpoint_times = numbers("evolution.checkpoint_times");
  return e;
}

InitialData Config::initial() const {
  InitialData d;
  d.preset = text("initial.preset");
  d.amplitude = number("initial.amplitude");
  d.radius = number("initial.radius");
  d.separation = number("initial.separation");
  return d;
}

std::string defaults_reference_markdown() {
  std::ostringstream out;
  out << "# nlfilt configuration keys\n\n"
      << "A config file is one flat JSON object. Keys left out take the defaults below.\n\n"
      << "| key | default | meaning |\n|---|---|---|\n";
  for (const auto& k : config_reference()) {
    out << "| `" << k.key << "` | `" << k.default_value.dump() << "` | " << k.help << " |\n";
  }
  return out.str();
}

}  // namespace nlfilt::cli

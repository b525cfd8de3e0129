// nlfilt: batch driver for the nonlocal filtration solver.
//
//   nlfilt run            --config run.json --out DIR
//   nlfilt verify SUITE   --config run.json --out DIR
//   nlfilt sweep          --config run.json --axis grid.half_extent_z --values 4,8,16
//   nlfilt export-defaults --out DIR
//
// Exit codes: 0 success, 1 bad config or usage, 2 solver failure,
// 3 a verification check failed.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "config.hpp"
#include "nlfilt/checks.hpp"
#include "nlfilt/evolution.hpp"
#include "nlfilt/fit.hpp"
#include "nlfilt/initial_data.hpp"
#include "nlfilt/parallel.hpp"
#include "suites.hpp"

#ifndef NLFILT_VERSION
#define NLFILT_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using namespace nlfilt;
using nlfilt::cli::Config;
using nlfilt::cli::ConfigError;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kSolver = 2;
constexpr int kChecks = 3;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out = "nlfilt_out";
  std::string suite;
  std::string axis;
  std::vector<double> values;
};

class Manifest {
 public:
  Manifest(std::string command, const Config& cfg) : command_(std::move(command)), config_(cfg.values()) {
    seed_ = cfg.seed();
  }

  template <class F>
  auto phase(const std::string& name, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    struct Stop {
      Manifest* self;
      std::string name;
      std::chrono::steady_clock::time_point start;
      ~Stop() {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
        self->timings_[name] = self->timings_.value(name, 0.0) + dt.count();
      }
    } stop{this, name, start};
    return body();
  }

  void add_file(const fs::path& p) { files_.push_back(p.string()); }
  void set(const std::string& key, json value) { extra_[key] = std::move(value); }

  void write(const fs::path& dir, const std::string& status) {
    json j;
    j["tool"] = "nlfilt";
    j["version"] = NLFILT_VERSION;
    j["command"] = command_;
    j["seed"] = seed_;
    j["threads"] = thread_count();
    j["config"] = config_;
    j["timings_s"] = timings_;
    j["files"] = files_;
    for (auto it = extra_.begin(); it != extra_.end(); ++it) j[it.key()] = it.value();
    j["status"] = status;
    std::ofstream out(dir / "manifest.json");
    out << j.dump(2) << '\n';
  }

 private:
  std::string command_;
  json config_;
  std::uint64_t seed_ = 0;
  json timings_ = json::object();
  std::vector<std::string> files_;
  json extra_ = json::object();
};

Config load_config(const Options& opt) {
  Config cfg = opt.config_path.empty() ? Config() : Config::load(opt.config_path);
  if (opt.seed) cfg.set_number("seed", static_cast<double>(*opt.seed));
  return cfg;
}

std::string format_value(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

struct RunOutcome {
  Trajectory traj;
  std::vector<fs::path> files;
};

RunOutcome evolve_and_write(const Config& cfg, const fs::path& dir, Manifest& manifest) {
  const EvolutionConfig e = cfg.evolution();
  const NonlocalOperator op = manifest.phase("assemble", [&] { return assemble(e.grid, e.kernel, e.quad); });
  const DiscreteField u0 = make_initial_data(e.grid, cfg.initial());
  RunOutcome out;
  out.traj = manifest.phase("evolve", [&] { return run(op, e, u0); });
  manifest.phase("write", [&] {
    const fs::path csv = dir / "trajectory.csv";
    write_diagnostics_csv(out.traj, csv.string());
    out.files.push_back(csv);
    const auto& t = out.traj;
    for (std::size_t k = 0; k < t.fields.size(); ++k) {
      const std::size_t s = t.field_steps[k];
      const bool last = k + 1 == t.fields.size();
      if (!e.diagnostics_only && !last) continue;
      const fs::path f = dir / ("field_step" + std::to_string(s) + ".csv");
      write_field_csv(t.fields[k], f.string());
      out.files.push_back(f);
    }
    return 0;
  });
  return out;
}

int cmd_run(const Options& opt) {
  const Config cfg = load_config(opt);
  const fs::path dir(opt.out);
  fs::create_directories(dir);
  Manifest manifest("run", cfg);
  RunOutcome r = evolve_and_write(cfg, dir, manifest);
  for (const auto& f : r.files) manifest.add_file(f);
  manifest.set("steps", r.traj.steps());
  manifest.set("warnings", r.traj.warnings);
  for (const auto& w : r.traj.warnings) std::cerr << "warning: " << w << '\n';
  if (!r.traj.completed) {
    manifest.set("failure", r.traj.failure);
    manifest.write(dir, "solver_failure");
    std::cerr << "error: solver failure at " << r.traj.failure << '\n';
    return kSolver;
  }
  manifest.write(dir, "ok");
  const auto& last = r.traj.diagnostics.back();
  std::cout << "run: " << r.traj.steps() << " steps to t = " << last.t << ", mass " << last.mass << ", |u|_inf "
            << last.linf << '\n';
  return kOk;
}

int cmd_verify(const Options& opt) {
  const auto& names = cli::suite_names();
  if (std::find(names.begin(), names.end(), opt.suite) == names.end()) {
    std::cerr << "error: unknown suite '" << opt.suite << "'; valid suites:";
    for (const auto& n : names) std::cerr << ' ' << n;
    std::cerr << '\n';
    return kUsage;
  }
  const Config cfg = load_config(opt);
  const fs::path dir(opt.out);
  fs::create_directories(dir);
  Manifest manifest("verify " + opt.suite, cfg);
  const auto checks = manifest.phase("verify", [&] { return cli::run_suite(opt.suite, cfg); });
  const fs::path report = dir / ("verify_" + opt.suite + ".json");
  {
    std::ofstream out(report);
    out << suite_to_json(opt.suite, cfg.seed(), checks).dump(2) << '\n';
  }
  manifest.add_file(report);
  for (const auto& c : checks) std::cout << c.name << ": " << c.status << '\n';
  const bool failed = any_failed(checks);
  manifest.write(dir, failed ? "checks_failed" : "ok");
  return failed ? kChecks : kOk;
}

int cmd_sweep(const Options& opt) {
  if (opt.values.empty()) {
    std::cerr << "error: sweep needs at least one value in --values\n";
    return kUsage;
  }
  const Config base = load_config(opt);
  if (!base.is_numeric_key(opt.axis)) {
    std::cerr << "error: --axis '" << opt.axis << "' is not a numeric config key\n";
    return kUsage;
  }
  std::vector<Config> configs;
  for (double v : opt.values) {
    Config c = base;
    try {
      c.set_number(opt.axis, v);
    } catch (const ConfigError& e) {
      std::cerr << "error: --values " << format_value(v) << ": " << e.what() << '\n';
      return kUsage;
    }
    configs.push_back(std::move(c));
  }

  const fs::path dir(opt.out);
  fs::create_directories(dir);
  Manifest manifest("sweep " + opt.axis, base);
  const fs::path table = dir / "sweep.csv";
  std::ofstream csv(table);
  csv << opt.axis << ",steps,t_final,mass_initial,mass_final,mass_drift,linf_final,l1_final,completed\n";
  csv << std::setprecision(17);
  std::vector<double> xs, drift, linf;
  bool all_completed = true;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    const double v = opt.values[k];
    const fs::path sub = dir / (opt.axis + "_" + format_value(v));
    fs::create_directories(sub);
    RunOutcome r = evolve_and_write(configs[k], sub, manifest);
    for (const auto& f : r.files) manifest.add_file(f);
    const auto& d0 = r.traj.diagnostics.front();
    const auto& dn = r.traj.diagnostics.back();
    const double dm = std::abs(dn.mass - d0.mass);
    csv << v << ',' << r.traj.steps() << ',' << dn.t << ',' << d0.mass << ',' << dn.mass << ',' << dm << ','
        << dn.linf << ',' << dn.l1 << ',' << (r.traj.completed ? 1 : 0) << '\n';
    all_completed = all_completed && r.traj.completed;
    if (v > 0.0 && dm > 0.0 && dn.linf > 0.0) {
      xs.push_back(v);
      drift.push_back(dm);
      linf.push_back(dn.linf);
    }
  }
  csv.close();
  manifest.add_file(table);

  json fits = json::object();
  if (xs.size() >= 2) {
    auto record = [&](const char* name, const std::vector<double>& ys) {
      try {
        const LinearFit f = fit_power_law(xs, ys);
        fits[name] = {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"points", f.points}};
        std::cout << "sweep fit " << name << " ~ " << opt.axis << "^" << f.slope << " (r^2 " << f.r_squared << ")\n";
      } catch (const std::invalid_argument&) {
      }
    };
    record("mass_drift", drift);
    record("linf_final", linf);
  }
  manifest.set("axis", opt.axis);
  manifest.set("values", opt.values);
  manifest.set("power_law_fits", fits);
  manifest.write(dir, all_completed ? "ok" : "solver_failure");
  std::cout << "sweep: " << configs.size() << " runs written to " << table.string() << '\n';
  return all_completed ? kOk : kSolver;
}

int cmd_export_defaults(const Options& opt) {
  const fs::path dir(opt.out);
  fs::create_directories(dir);
  const Config cfg;
  Manifest manifest("export-defaults", cfg);
  const fs::path json_path = dir / "config_defaults.json";
  const fs::path md_path = dir / "config_reference.md";
  std::ofstream(json_path) << cfg.values().dump(2) << '\n';
  std::ofstream(md_path) << cli::defaults_reference_markdown();
  manifest.add_file(json_path);
  manifest.add_file(md_path);
  manifest.write(dir, "ok");
  std::cout << "wrote " << json_path.string() << " and " << md_path.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nlfilt: nonlocal filtration equation on the Heisenberg group"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--config", opt.config_path, "flat JSON config file");
  app.add_option("--seed", opt.seed, "override the config seed");
  app.add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", opt.out, "output directory")->capture_default_str();

  auto* run_cmd = app.add_subcommand("run", "run one evolution and write its trajectory");
  auto* verify_cmd = app.add_subcommand("verify", "run a verification suite and write its JSON report");
  verify_cmd->add_option("suite", opt.suite, "suite name or 'all'")->required();
  auto* sweep_cmd = app.add_subcommand("sweep", "repeat the run over values of one numeric key");
  sweep_cmd->add_option("--axis", opt.axis, "dotted config key")->required();
  sweep_cmd->add_option("--values", opt.values, "comma-separated values")->delimiter(',');
  auto* export_cmd = app.add_subcommand("export-defaults", "write the default config and key reference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    set_thread_count(opt.threads);
    if (*run_cmd) return cmd_run(opt);
    if (*verify_cmd) return cmd_verify(opt);
    if (*sweep_cmd) return cmd_sweep(opt);
    if (*export_cmd) return cmd_export_defaults(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalFailure& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

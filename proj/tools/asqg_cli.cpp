#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "asqg/analysis.hpp"
#include "asqg/config.hpp"
#include "asqg/errors.hpp"
#include "asqg/flow.hpp"
#include "asqg/particles.hpp"
#include "asqg/records.hpp"

namespace fs = std::filesystem;
using namespace asqg;

namespace {

struct Common {
  std::string config = "default";
  std::string output_dir;
  bool quiet = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "config file, or 'default'");
  sub->add_option("--output-dir", c.output_dir, "overrides run.output_dir");
  sub->add_flag("--quiet", c.quiet, "suppress progress output");
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = load_config(c.config);
  if (!c.output_dir.empty()) cfg.output_dir = c.output_dir;
  return cfg;
}

fs::path prepare_dir(const ExperimentConfig& cfg) {
  fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << std::setprecision(17);
  return out;
}

void set_threads() {
  const char* env = std::getenv("ASQG_NUM_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw ConfigError("ASQG_NUM_THREADS", "must be an integer >= 1");
#ifdef _OPENMP
  omp_set_num_threads(static_cast<int>(n));
#endif
}

int gen_data(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  const fs::path dir = prepare_dir(cfg);
  const ParticleEnsemble ens = discretize(make_data(cfg), cfg.nodes_per_bubble, cfg.eps_kappa);
  auto out = open_out(dir / "ensemble.csv");
  write_ensemble_csv(out, ens);
  if (!c.quiet) std::cout << "wrote " << ens.size() << " nodes to " << (dir / "ensemble.csv").string() << '\n';
  return out ? 0 : 1;
}

int check_kernel(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  const fs::path dir = prepare_dir(cfg);
  const ParticleEnsemble ens = discretize(make_data(cfg), cfg.nodes_per_bubble, cfg.eps_kappa);
  const ModulusFit fit = log_lipschitz_modulus(ens, cfg.pair_budget, 0.0, cfg.seed);
  auto out = open_out(dir / "modulus.csv");
  out << "separation,plain,corrected\n";
  for (const auto& s : fit.samples) out << s.separation << ',' << s.plain << ',' << s.corrected << '\n';
  if (!c.quiet)
    std::cout << "log-Lipschitz C_sup " << fit.c_sup << "  p95 " << fit.c_p95 << "  plain sup "
              << fit.lipschitz_sup << '\n';
  return out ? 0 : 1;
}

int check_velocity(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  const fs::path dir = prepare_dir(cfg);
  const InitialData data = make_data(cfg);
  const ParticleEnsemble ens = discretize(data, cfg.nodes_per_bubble, cfg.eps_kappa);
  const ThetaNorm norm = holder_norm(ens, cfg.holder_pairs, cfg.seed);
  auto out = open_out(dir / "residuals.csv");
  out << "n,x1,x2,r1_Q,r2_Q,r1_R,r2_R\n";
  double worst = 0.0;
  for (const BubbleSpec& b : data.bubbles) {
    const Residual q = velocity_residual(ens, b.center, norm, Region::Q);
    const Residual r = velocity_residual(ens, b.center, norm, Region::R);
    out << b.n << ',' << b.center.x1 << ',' << b.center.x2 << ',' << q.r1 << ',' << q.r2 << ',' << r.r1 << ','
        << r.r2 << '\n';
    worst = std::max({worst, q.r1, q.r2});
  }
  if (!c.quiet) std::cout << "max residual over bubble centers " << worst << '\n';
  return out ? 0 : 1;
}

RunRecord evolve_and_write(const Common& c, const ExperimentConfig& cfg, const fs::path& dir) {
  RunCallbacks cb;
  if (!c.quiet) cb.on_output = [](const FlowState& s) { std::cerr << "t = " << s.t << '\n'; };
  RunRecord rec = run(cfg, cb);
  write_series(rec, dir);
  if (!c.quiet)
    std::cout << rec.steps << " steps of dt " << rec.dt << " in " << rec.wall_seconds << " s"
              << (rec.truncated ? " (truncated by wall budget)" : "") << '\n';
  return rec;
}

int evolve(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  evolve_and_write(c, cfg, prepare_dir(cfg));
  return 0;
}

void print_report(const InflationReport& rep) {
  for (const TracerGrowth& g : rep.tracers)
    std::cout << "bubble " << g.n << ": witness growth " << g.growth << ", ratio max " << g.ratio_max << '\n';
  std::cout << "innermost monotone " << rep.innermost_monotone << ", innermost exceeds outermost "
            << rep.innermost_exceeds_outermost << '\n';
}

int inflate(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  const fs::path dir = prepare_dir(cfg);
  const RunRecord rec = evolve_and_write(c, cfg, dir);
  const InflationReport rep = inflation_report(rec);
  auto out = open_out(dir / "report.json");
  out << report_json(rep) << '\n';
  if (!c.quiet) print_report(rep);
  return out ? 0 : 1;
}

int stability(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  const fs::path dir = prepare_dir(cfg);
  const TwinRunSeries s = twin_run_distance(cfg, cfg.perturbation);
  auto out = open_out(dir / "stability.csv");
  out << "t,riesz_dist\n";
  for (std::size_t k = 0; k < s.times.size(); ++k) out << s.times[k] << ',' << s.distance[k] << '\n';
  if (!c.quiet && !s.distance.empty())
    std::cout << "twin distance " << s.distance.front() << " -> " << s.distance.back() << '\n';
  return out ? 0 : 1;
}

int report(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  const fs::path dir(cfg.output_dir);
  const InflationReport rep = inflation_report(read_run(dir));
  auto out = open_out(dir / "report.json");
  out << report_json(rep) << '\n';
  if (!c.quiet) print_report(rep);
  return out ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alpha-SQG particle simulator"};
  app.require_subcommand(1);
  Common common;
  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const Common&);
  };
  const Entry entries[] = {
      {"gen-data", "discretize the initial data and write ensemble.csv", gen_data},
      {"check-kernel", "log-Lipschitz modulus probes of the velocity", check_kernel},
      {"check-velocity", "quadrant-integral residuals at bubble centers", check_velocity},
      {"evolve", "run the flow and write series.csv", evolve},
      {"inflate", "evolve and write the inflation report", inflate},
      {"stability", "twin-run Riesz distance", stability},
      {"report", "re-render report.json from stored series", report},
  };
  int (*chosen)(const Common&) = nullptr;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, common);
    sub->callback([&chosen, fn = e.fn] { chosen = fn; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    set_threads();
    return chosen(common);
  } catch (const ConfigError& e) {
    std::cerr << "config error [" << e.key() << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

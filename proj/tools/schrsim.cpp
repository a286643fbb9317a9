// schrsim: single solves and studies from the command line.
#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "schr/config.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Flags {
  std::string config;
  std::optional<std::string> system;
  std::optional<std::string> psi;
  std::optional<double> eps;
  std::optional<double> L, R;
  std::optional<std::size_t> n_p;
  bool lift = false;
  std::optional<std::size_t> lift_ns;
  std::optional<int> lift_m;
  std::optional<double> lift_S;
  bool average = false;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  bool recovery_dump = false;
  // study-only
  std::string study;
  std::vector<std::size_t> np_list;
  std::vector<double> eps_list;
  std::vector<double> offsets;
  int rmax = 0;
  double beta = 1.0;
  double alpha = 10.0;
  double horizon = 1.0;
  double ratio = 1.0;
  double kappa = 1.0;
  std::size_t np_cap = std::size_t{1} << 20;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON run configuration; flags override its values")->check(CLI::ExistingFile);
  app->add_option("--system", f.system, "builtin system name or path to a system JSON file");
  app->add_option("--psi", f.psi, "profile: exp_abs | cutoff:d=V | hermite:r=V | erf:eps=V | quartic:eps=V");
  app->add_option("--eps", f.eps, "target accuracy in (0, 1)");
  app->add_option("--L", f.L, "left end of the p-domain (overrides the criterion)");
  app->add_option("--R", f.R, "right end of the p-domain (overrides the criterion)");
  app->add_option("--np", f.n_p, "number of p nodes (power of two)");
  app->add_flag("--lift", f.lift, "use the dimension-lifted evolution even for constant A");
  app->add_option("--lift-ns", f.lift_ns, "s nodes of the lifted evolution (power of two)");
  app->add_option("--lift-m", f.lift_m, "kernel half-width in s cells");
  app->add_option("--lift-S", f.lift_S, "half-length of the s-domain");
  app->add_flag("--average", f.average, "average e^{p_k} row_k over the whole recovery window");
  app->add_option("--out", f.out, "output directory (default: $SCHRSIM_OUT_DIR or .)");
  app->add_option("--threads", f.threads, "worker cap (0 = all cores)");
  app->add_option("--seed", f.seed, "seed recorded for reproducibility");
}

schr::RunConfig merged_config(const Flags& f) {
  schr::RunConfig c = f.config.empty() ? schr::RunConfig{} : schr::load_run_config(f.config);
  if (f.system) {
    c.system = *f.system;
    c.inline_system.reset();
  }
  if (f.psi) c.psi = *f.psi;
  if (f.eps) {
    if (!(*f.eps > 0.0 && *f.eps < 1.0)) throw schr::ConfigError("--eps must lie in (0, 1)");
    c.epsilon = *f.eps;
  }
  if (f.L) c.L = f.L;
  if (f.R) c.R = f.R;
  if (f.n_p) c.n_p = f.n_p;
  if (f.lift) c.force_lift = true;
  if (f.lift_ns) c.lift_ns = f.lift_ns;
  if (f.lift_m) c.lift_m = f.lift_m;
  if (f.lift_S) c.lift_S = f.lift_S;
  if (f.average) c.average = true;
  if (f.out) c.output_dir = *f.out;
  if (f.threads) c.threads = *f.threads;
  if (f.seed) c.seed = *f.seed;
  if (c.output_dir.empty()) {
    const char* env = std::getenv("SCHRSIM_OUT_DIR");
    c.output_dir = env && *env ? env : ".";
  }
  return c;
}

fs::path output_file(const schr::RunConfig& c, const std::string& name) {
  fs::create_directories(c.output_dir);
  return fs::path(c.output_dir) / name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw schr::ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

std::string vec_str(const schr::CVector& v) {
  std::ostringstream os;
  os << std::setprecision(17) << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v(i).real();
    if (v(i).imag() != 0.0) os << (v(i).imag() < 0 ? " - " : " + ") << std::abs(v(i).imag()) << 'i';
  }
  return os.str() + ']';
}

json vec_json(const schr::CVector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back({v(i).real(), v(i).imag()});
  return arr;
}

int cmd_run(const Flags& f) {
  const schr::RunConfig c = merged_config(f);
  const schr::DynamicalSystem sys = schr::build_system(c);
  const schr::ProfileSpec spec = schr::parse_profile_spec(c.psi);
  const schr::PipelineOptions opts = schr::pipeline_options(c, sys.horizon());

  const auto start = std::chrono::steady_clock::now();
  const schr::PipelineResult r = schr::run_pipeline(sys, spec, opts);
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const schr::ReferenceSolution ref = schr::solve_reference(sys);
  const double err = schr::relative_error(r.recovery.u, ref.u_T);

  std::cout << std::setprecision(17);
  std::cout << "profile        " << r.profile_id << '\n';
  std::cout << "domain         [-" << r.domain.L() << ", " << r.domain.R() << "), n_p = " << r.domain.n_p() << '\n';
  std::cout << "mu_max         " << r.domain.mu_max() << '\n';
  std::cout << "u(T) recovered " << vec_str(r.recovery.u) << '\n';
  std::cout << "u(T) oracle    " << vec_str(ref.u_T) << "  (" << schr::to_string(ref.method) << ")\n";
  std::cout << "relative error " << err << '\n';
  std::cout << "pr_w           " << r.probability.pr_w << '\n';
  std::cout << "pr_u           " << r.probability.pr_u << '\n';
  std::cout << "g              " << r.probability.g << '\n';

  json j = schr::to_json(r);
  j["config"] = schr::to_json(c);
  j["oracle"] = {{"u_T", vec_json(ref.u_T)}, {"method", schr::to_string(ref.method)}, {"est_error", ref.est_error}};
  j["relative_error"] = err;
  j["runtime_s"] = runtime;
  const fs::path path = output_file(c, "run.json");
  write_text(path, j.dump(2) + "\n");
  std::cout << "wrote          " << path.string() << '\n';
  if (f.recovery_dump) {
    std::ostringstream csv;
    csv << std::setprecision(17);
    schr::write_recovery_csv(csv, r.physical_T, r.domain, sys.dim());
    const fs::path dump = output_file(c, "recovery.csv");
    write_text(dump, csv.str());
    std::cout << "wrote          " << dump.string() << '\n';
  }
  return 0;
}

std::string family_of(const std::string& psi) { return psi.substr(0, psi.find(':')); }

schr::ProfileKind kind_of(const std::string& family) {
  if (family == "erf") return schr::ProfileKind::Erf;
  if (family == "cutoff") return schr::ProfileKind::Cutoff;
  if (family == "quartic") return schr::ProfileKind::Quartic;
  if (family == "exp_abs") return schr::ProfileKind::ExpAbs;
  if (family == "hermite") return schr::ProfileKind::Hermite;
  throw schr::ConfigError("unknown profile family '" + family + "'");
}

// Profile family for the eps sweep; the cutoff order follows d = ceil(ln(1/eps)).
schr::ProfileFamily sweep_family(const std::string& family) {
  switch (kind_of(family)) {
    case schr::ProfileKind::ExpAbs:
      return [](double) { return schr::ProfileSpec{schr::ProfileKind::ExpAbs, 0.0}; };
    case schr::ProfileKind::Erf:
      return [](double e) { return schr::ProfileSpec{schr::ProfileKind::Erf, e}; };
    case schr::ProfileKind::Quartic:
      return [](double e) { return schr::ProfileSpec{schr::ProfileKind::Quartic, e}; };
    case schr::ProfileKind::Cutoff:
      return [](double e) { return schr::ProfileSpec{schr::ProfileKind::Cutoff, std::max(1.0, std::ceil(std::log(1.0 / e)))}; };
    default:
      throw schr::ConfigError("mu-scaling: family must be exp_abs, erf, quartic or cutoff");
  }
}

template <class Report>
void emit(const schr::RunConfig& c, const std::string& stem, const Report& rep, json extra = json::object()) {
  std::ostringstream csv;
  schr::write_csv(csv, rep);
  write_text(output_file(c, stem + ".csv"), csv.str());
  json j = schr::to_json(rep);
  j["config"] = schr::to_json(c);
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  write_text(output_file(c, stem + ".json"), j.dump(2) + "\n");
  std::cout << csv.str();
  std::cout << "wrote " << output_file(c, stem + ".csv").string() << " and " << stem << ".json\n";
}

int cmd_study(const Flags& f) {
  Flags g = f;
  const std::string& study = f.study;
  if (study == "converge") {
    if (!g.psi) g.psi = "exp_abs";
    const schr::RunConfig c = merged_config(g);
    const schr::DynamicalSystem sys = schr::build_system(c);
    std::vector<std::size_t> list = f.np_list;
    if (list.empty()) list = {64, 128, 256, 512, 1024};
    schr::PipelineOptions opts = schr::pipeline_options(c, sys.horizon());
    opts.n_p.reset();
    emit(c, "converge", schr::convergence_study(sys, schr::parse_profile_spec(c.psi), list, opts));
  } else if (study == "mu-scaling") {
    if (!g.psi) g.psi = "erf";
    const schr::RunConfig c = merged_config(g);
    const schr::DynamicalSystem sys = schr::build_system(c);
    std::vector<double> eps = f.eps_list;
    if (eps.empty()) eps = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
    schr::PipelineOptions opts = schr::pipeline_options(c, sys.horizon());
    opts.n_p.reset();
    const std::string family = family_of(c.psi);
    emit(c, "mu-scaling", schr::mu_scaling_study(sys, family, sweep_family(family), eps, f.np_cap, opts));
  } else if (study == "growth") {
    if (!g.psi) g.psi = "erf";
    const schr::RunConfig c = merged_config(g);
    const schr::ProfileKind kind = kind_of(family_of(c.psi));
    const int rmax = f.rmax > 0 ? f.rmax : (kind == schr::ProfileKind::Cutoff ? 20 : 40);
    std::vector<int> r;
    if (rmax < 10) {
      for (int k = 1; k <= rmax; ++k) r.push_back(k);
    } else {
      for (int k = 5; k <= rmax; k += 5) r.push_back(k);
    }
    emit(c, "growth", schr::growth_study(kind, r));
  } else if (study == "truncation") {
    if (!g.psi) g.psi = "erf:eps=1e-6";
    const schr::RunConfig c = merged_config(g);
    const schr::DynamicalSystem sys = schr::build_system(c);
    std::vector<double> offsets = f.offsets;
    if (offsets.empty()) offsets = {-8, -7, -6, -5, -4, -3, -2, -1, 0, 2};
    emit(c, "truncation",
         schr::truncation_check(sys, schr::parse_profile_spec(c.psi), c.epsilon, offsets, 1.0 / 64.0, c.threads));
  } else if (study == "complexity") {
    const schr::RunConfig c = merged_config(g);
    schr::ComplexityInputs in;
    in.alpha_h = f.alpha;
    in.T = f.horizon;
    in.epsilon = c.epsilon;
    in.norm_ratio = f.ratio;
    in.beta = f.beta;
    in.kappa_v = f.kappa;
    emit(c, "complexity", schr::query_estimate(in));
  } else {
    throw schr::ConfigError("unknown study '" + study + "'");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Warped-phase simulator for linear ODEs: single solves and verification studies"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* run = app.add_subcommand("run", "solve one system and compare with the oracle");
  add_common(run, f);
  run->add_flag("--recovery", f.recovery_dump, "also write recovery.csv: k, p_k, row norm, e^{p_k} row_k");

  CLI::App* study = app.add_subcommand("study", "run a verification study");
  study->add_option("name", f.study, "converge | mu-scaling | growth | truncation | complexity")
      ->required()
      ->check(CLI::IsMember({"converge", "mu-scaling", "growth", "truncation", "complexity"}));
  add_common(study, f);
  study->add_option("--np-list", f.np_list, "converge: resolutions (default 64 128 256 512 1024)");
  study->add_option("--eps-list", f.eps_list, "mu-scaling: decreasing eps values (default 1e-2 ... 1e-7)");
  study->add_option("--np-cap", f.np_cap, "mu-scaling: largest n_p tried");
  study->add_option("--offsets", f.offsets, "truncation: domain offsets from the criterion size");
  study->add_option("--rmax", f.rmax, "growth: largest derivative order");
  study->add_option("--beta", f.beta, "complexity: Gevrey exponent beta in (0, 1]");
  study->add_option("--alpha", f.alpha, "complexity: alpha_H");
  study->add_option("--T", f.horizon, "complexity: evolution time");
  study->add_option("--ratio", f.ratio, "complexity: ||u_I|| / ||u(T)||");
  study->add_option("--kappa", f.kappa, "complexity: eigenbasis condition number (spectral row)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(f);
    return cmd_study(f);
  } catch (const schr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const schr::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

#include <fftw3.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fns2d/acceptance.hpp"
#include "fns2d/dpd.hpp"
#include "fns2d/field_io.hpp"
#include "fns2d/gibbs.hpp"
#include "fns2d/run_config.hpp"
#include "fns2d/series.hpp"
#include "fns2d/wick.hpp"

namespace fs = std::filesystem;
using namespace fns2d;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Context {
  std::string command;
  RunConfig cfg;
  fs::path out;
  std::string manifest;
  std::vector<std::string> artifacts;
  int threads = 1;

  std::uint64_t seed() const { return static_cast<std::uint64_t>(cfg.integer("seed", 1)); }

  std::ofstream open(const std::string& name) {
    fs::create_directories(out);
    std::ofstream f(out / name, std::ios::binary);
    require(f.good(), "cannot write " + (out / name).string());
    f << "# " << manifest << "\n";
    artifacts.push_back(name);
    return f;
  }
};

std::string num(double x) { return fmt_double(x); }

void check_hurst_open(double h) { require(h > 0.0 && h < 1.0, "hurst must lie in (0, 1), got " + num(h)); }
void check_positive(const char* key, double v) { require(v > 0.0, std::string(key) + " must be > 0, got " + num(v)); }

bool cmd_sample_fbm(Context& c) {
  double h = c.cfg.number("hurst", 0.75), dt = c.cfg.number("dt", 0.01), t = c.cfg.number("t_final", 1.0);
  check_hurst_open(h);
  check_positive("dt", dt);
  FbmPath p = sample_fbm(h, steps_for(t, dt), dt, c.seed());
  auto f = c.open("fbm.csv");
  f << "t,b\n";
  for (std::size_t i = 0; i < p.values.size(); ++i) f << num(p.t0 + static_cast<double>(i) * p.dt) << ',' << num(p.values[i]) << '\n';
  return true;
}

bool cmd_fou_variance(Context& c) {
  double h = c.cfg.number("hurst", 0.75), lam = c.cfg.number("lambda", 1.0);
  long reps = c.cfg.integer("replicas", 20000);
  check_hurst_open(h);
  check_positive("lambda", lam);
  require(reps >= 2, "replicas must be >= 2");
  FouVarianceCheck v = fou_variance_check(lam, h, static_cast<std::size_t>(reps), c.seed());
  ChConstant ch = compute_ch(h);
  auto f = c.open("fou_variance.csv");
  f << "lambda,hurst,replicas,variance,se,theory,ch,ch_error,pass\n";
  f << num(lam) << ',' << num(h) << ',' << reps << ',' << num(v.empirical.value) << ',' << num(v.empirical.se) << ','
    << num(v.theory) << ',' << num(ch.value) << ',' << num(ch.error) << ',' << v.pass << '\n';
  return v.pass;
}

bool cmd_z_regularity(Context& c) {
  double h = c.cfg.number("hurst", 0.75);
  long reps = c.cfg.integer("replicas", 200);
  check_hurst_open(h);
  require(reps >= 0, "replicas must be >= 0");
  double rs = z_regularity_threshold(h);
  auto rows = z_regularity_report(h, {rs - 0.1, rs + 0.1}, {8, 16, 32}, static_cast<std::size_t>(reps), c.seed());
  auto f = c.open("z_regularity.csv");
  f << "hurst,r,cutoff,series,mc,mc_se,converged\n";
  bool ok = true;
  for (const auto& r : rows) {
    f << num(r.hurst) << ',' << num(r.r) << ',' << r.cutoff << ',' << num(r.series_value) << ',' << num(r.mc.value)
      << ',' << num(r.mc.se) << ',' << r.converged << '\n';
    if (reps >= 2) ok = ok && r.mc.within(r.series_value, 4.0);
  }
  return ok;
}

bool cmd_bilinear_check(Context& c) {
  int n = static_cast<int>(c.cfg.integer("cutoff", 8));
  long pairs = c.cfg.integer("replicas", 20);
  require(n >= 1, "cutoff must be >= 1");
  require(pairs >= 1, "replicas must be >= 1");
  auto f = c.open("bilinear_check.csv");
  f << "pair,cutoff,max_rel_error,cancellation\n";
  bool ok = true;
  for (long i = 0; i < pairs; ++i) {
    FourierField u = random_smooth_field(n, stream_key(c.seed(), i, 0), 1.0, 1.0);
    FourierField v = random_smooth_field(n, stream_key(c.seed(), i, 1), 1.0, 0.5);
    double e = accept::max_rel_coeff_error(bilinear_fft(u, v), bilinear_direct(u, v));
    double can = std::abs(trilinear(u, v, v)) / (sobolev_norm(u, 0.0) * sobolev_norm(v, 1.0) * sobolev_norm(v, 0.0));
    ok = ok && e < 1e-10 && can < 1e-10;
    f << i << ',' << n << ',' << num(e) << ',' << num(can) << '\n';
  }
  return ok;
}

bool cmd_bzz_moment(Context& c) {
  double h = c.cfg.number("hurst", 0.75), rho = c.cfg.number("rho", -0.75);
  int n = static_cast<int>(c.cfg.integer("cutoff", 8));
  long m = c.cfg.integer("m", 1), samples = c.cfg.integer("replicas", 5000);
  require_bzz_hurst(h);
  require(n >= 1, "cutoff must be >= 1");
  require(m == 1 || m == 2, "m must be 1 or 2");
  require(samples >= 2, "replicas must be >= 2");
  GibbsSpec spec = GibbsSpec::make(h, n);
  auto f = c.open("bzz_moment.csv");
  if (m == 1) {
    MomentReport r = bzz_second_moment(spec, rho, static_cast<std::size_t>(samples), c.seed());
    f << "hurst,rho,m,cutoff,series,mc,mc_se,samples,agrees\n";
    f << num(h) << ',' << num(rho) << ",1," << n << ',' << num(r.series_value) << ',' << num(r.mc.value) << ','
      << num(r.mc.se) << ',' << samples << ',' << r.agrees(4.0) << '\n';
    return r.agrees(4.0);
  }
  FourthMomentReport r = bzz_fourth_moment(spec.spectrum(), rho, static_cast<std::size_t>(samples), c.seed());
  bool same = std::abs(r.generic.total - r.cases.total) <= 1e-10 * std::abs(r.generic.total);
  bool mc = r.mc.within(r.generic.total, 4.0);
  f << "hurst,rho,m,cutoff,generic,cases,block_internal,second_moment_sq,mc,mc_se,samples,engines_agree,mc_agrees\n";
  f << num(h) << ',' << num(rho) << ",2," << n << ',' << num(r.generic.total) << ',' << num(r.cases.total) << ','
    << num(r.cases.block_diagonal) << ',' << num(r.second_moment_series * r.second_moment_series) << ','
    << num(r.mc.value) << ',' << num(r.mc.se) << ',' << samples << ',' << same << ',' << mc << '\n';
  auto t = c.open("bzz_fourth_terms.csv");
  t << "pairing,case,generic,cases\n";
  for (const auto& [key, g] : r.generic.terms) {
    auto it = r.cases.terms.find(key);
    t << key << ',' << static_cast<int>(key[1] - '0') - 2 << ',' << num(g) << ','
      << (it == r.cases.terms.end() ? std::string("nan") : num(it->second)) << '\n';
  }
  return same && mc;
}

bool cmd_series_oracle(Context& c) {
  double h = c.cfg.number("hurst", 0.75), rho = c.cfg.number("rho", -0.75);
  int R = static_cast<int>(c.cfg.integer("cutoff", 1024));
  require(h > 0.25 && h < 1.0, "series-oracle needs 1/4 < H < 1");
  require(R >= 65, "cutoff (lattice radius) must be >= 65 to cover the fit range");
  auto f = c.open("series_oracle.csv");
  f << "quantity,k,value,tail_bound\n";
  SlopeFit s1 = fit_slope([&](Wave k) { return s1_sum(k, h, R).value; }, -s1_exponent(h));
  for (std::size_t i = 0; i < s1.ks.size(); ++i)
    f << "S1," << num(s1.ks[i]) << ',' << num(s1.values[i]) << ',' << num(s1_sum(Wave{int(s1.ks[i]), 0}, h, R).tail_bound) << '\n';
  f << "S1_slope,," << num(s1.slope) << ",\nS1_expected,," << num(s1.expected) << ",\n";
  if (h > 0.5 && rho > -1.0 && rho < 2 * (h - 1)) {
    SlopeFit s2 = fit_slope([&](Wave k) { return s2_sum(k, h, rho, R).value; }, -(4 * h - 2 * rho - 2));
    for (std::size_t i = 0; i < s2.ks.size(); ++i) f << "S2," << num(s2.ks[i]) << ',' << num(s2.values[i]) << ",\n";
    f << "S2_slope,," << num(s2.slope) << ",\nS2_expected,," << num(s2.expected) << ",\n";
  }
  if (s3_admissible(h, rho))
    for (int r : {6, 12, 24}) f << "S3," << r << ',' << num(s3_sum(h, rho, r)) << ",\n";
  BzzTailExponent t = bzz_tail_exponent(h, rho);
  f << "Bzz_summand_exponent,," << num(t.summand_exponent) << ",\nBzz_shell_exponent,," << num(t.shell_exponent)
    << ",\nBzz_converged,," << t.converged << ",\n";
  return true;
}

SolverConfig solver_config(const Context& c, double h_def, int n_def, double dt_def, double t_def) {
  SolverConfig s;
  s.hurst = c.cfg.number("hurst", h_def);
  s.cutoff = static_cast<int>(c.cfg.integer("cutoff", n_def));
  s.dt = c.cfg.number("dt", dt_def);
  s.t_final = c.cfg.number("t_final", t_def);
  s.sigma = c.cfg.number("sigma", 0.4);
  s.picard_tol = c.cfg.number("tol", 1e-10);
  s.snap_every = static_cast<std::size_t>(c.cfg.integer("snap_every", 0));
  std::string sch = c.cfg.text("scheme", "exponential_euler");
  require(sch == "exponential_euler" || sch == "imex", "scheme must be exponential_euler or imex");
  s.scheme = sch == "imex" ? Scheme::imex : Scheme::exponential_euler;
  check_hurst_open(s.hurst);
  require(s.cutoff >= 1, "cutoff must be >= 1");
  check_positive("dt", s.dt);
  check_positive("t_final", s.t_final);
  steps_for(s.t_final, s.dt);
  return s;
}

Trajectory forcing(const SolverConfig& s, std::uint64_t seed) {
  auto fam = stokes_family(s.hurst, s.cutoff, s.dt, s.t_final, seed);
  return sample_z_field(fam, uniform_times(s.dt, steps_for(s.t_final, s.dt)));
}

bool cmd_picard(Context& c) {
  SolverConfig s = solver_config(c, 0.47, 16, 1e-3, 0.1);
  s.set_local(sample_point(s.hurst));
  if (c.cfg.has("sigma")) s.sigma = c.cfg.number("sigma", s.sigma);
  double amp = c.cfg.number("amplitude", 0.1);
  PicardResult r = picard_solve(s, random_smooth_field(s.cutoff, stream_key(c.seed(), 2), amp, 2.0), forcing(s, c.seed()));
  auto f = c.open("picard.csv");
  f << "iteration,residual,factor\n";
  for (std::size_t i = 0; i < r.residuals.size(); ++i)
    f << i + 1 << ',' << num(r.residuals[i]) << ',' << (i ? num(r.factors[i - 1]) : std::string()) << '\n';
  auto g = c.open("picard_summary.csv");
  g << "status,iterations,tau,worst_factor,alpha,sigma,beta,p,q\n";
  g << to_string(r.status) << ',' << r.iterations << ',' << num(r.tau) << ',' << num(r.worst_factor) << ','
    << num(s.alpha) << ',' << num(s.sigma) << ',' << num(s.beta) << ',' << num(s.p) << ',' << num(s.q) << '\n';
  std::cerr << r.report << "\n";
  return r.status != PicardStatus::no_contraction;
}

void write_diagnostics(Context& c, const std::string& name, const std::vector<StepDiagnostics>& ds) {
  auto f = c.open(name);
  f << "t,l2,grad,sigma_norm,v_sigma,z_sigma,production,transport,energy_residual\n";
  for (const auto& d : ds)
    f << num(d.t) << ',' << num(d.l2) << ',' << num(d.grad) << ',' << num(d.sigma_norm) << ',' << num(d.v_sigma) << ','
      << num(d.z_sigma) << ',' << num(d.production) << ',' << num(d.transport) << ',' << num(d.energy_residual) << '\n';
}

bool cmd_simulate(Context& c) {
  SolverConfig s = solver_config(c, 0.75, 32, 5e-3, 1.0);
  Trajectory z = forcing(s, c.seed());
  FourierField v0 = random_smooth_field(s.cutoff, stream_key(c.seed(), 3));
  SolveResult r = global_solve(s, v0, z);
  write_diagnostics(c, "diagnostics.csv", r.diagnostics);
  if (s.snap_every > 0) {
    Trajectory v = reconstruct_v(r.u, z);
    for (std::size_t i = 0; i < r.u.size(); ++i) {
      char name[64];
      auto step = static_cast<long>(std::llround(r.u.times[i] / s.dt));
      std::snprintf(name, sizeof name, "u_%06ld.csv", step);
      auto fu = c.open(name);
      write_field(fu, r.u.fields[i], "t=" + num(r.u.times[i]));
      std::snprintf(name, sizeof name, "v_%06ld.csv", step);
      auto fv = c.open(name);
      write_field(fv, v.fields[i], "t=" + num(v.times[i]));
    }
  }
  if (r.blew_up)
    std::cerr << "blow-up: ||u||_H^sigma exceeded " << s.blowup_threshold << " at t=" << r.stopped_at
              << "; diagnostics in " << (c.out / "diagnostics.csv").string() << "\n";
  return !r.blew_up;
}

bool cmd_uniqueness(Context& c) {
  SolverConfig s = solver_config(c, 0.75, 16, 2e-3, 1.0);
  Trajectory z = forcing(s, c.seed()), zc = forcing(s, stream_key(c.seed(), 4));
  UniquenessReport u = uniqueness_check(s, random_smooth_field(s.cutoff, stream_key(c.seed(), 3)), z, zc,
                                        {1e-3, 1e-5, 1e-7}, stream_key(c.seed(), 5));
  auto f = c.open("uniqueness.csv");
  f << "quantity,delta,value\n";
  f << "replay_sup,," << num(u.replay_sup) << '\n';
  for (std::size_t i = 0; i < u.deltas.size(); ++i) {
    f << "final_response," << num(u.deltas[i]) << ',' << num(u.final_response[i]) << '\n';
    f << "sup_response," << num(u.deltas[i]) << ',' << num(u.sup_response[i]) << '\n';
  }
  f << "response_spread,," << num(u.response_spread()) << "\ncontrol_sup,," << num(u.control_sup) << '\n';
  return !u.blew_up && u.replay_sup < 1e-12 && u.response_spread() < 2.0 && u.control_sup > 1e-3;
}

bool cmd_accept(Context& c) {
  bool quick = c.cfg.integer("quick", 0) != 0;
  std::vector<int> ids;
  std::string sel = c.cfg.text("criterion", "");
  if (sel.empty()) {
    for (int i = 1; i <= accept::criterion_count(); ++i) ids.push_back(i);
  } else {
    std::stringstream ss(sel);
    for (std::string t; std::getline(ss, t, ',');) ids.push_back(std::stoi(t));
  }
  auto f = c.open("accept.csv");
  f << "criterion,title,pass\n";
  bool all = true;
  for (int id : ids) {
    accept::Result r = accept::run(id, quick ? accept::Tier::quick : accept::Tier::full, c.threads);
    for (const auto& d : r.details) std::cout << "    " << d << "\n";
    std::cout << accept::summary_line(r) << std::endl;
    f << r.id << ",\"" << r.title << "\"," << (r.pass ? "PASS" : "FAIL") << '\n';
    all = all && r.pass;
  }
  return all;
}

void write_manifest(const Context& c, double wall, bool pass) {
  std::ofstream m(c.out / "manifest.txt", std::ios::binary);
  m << "command=" << c.command << "\nconfig_hash=" << hex64(c.cfg.hash(c.command)) << "\nseed=" << c.seed()
    << "\nfns2d=" << kVersion << "\ncompiler=" << __VERSION__ << "\nfftw=" << fftw_version << "\nthreads=" << c.threads
    << "\nwall_seconds=" << wall << "\npass=" << pass << "\n[config]\n"
    << c.cfg.canonical() << "[artifacts]\n";
  for (const auto& a : c.artifacts) m << a << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<bool(Context&)>> commands = {
      {"sample-fbm", cmd_sample_fbm},     {"fou-variance", cmd_fou_variance}, {"z-regularity", cmd_z_regularity},
      {"bilinear-check", cmd_bilinear_check}, {"bzz-moment", cmd_bzz_moment}, {"series-oracle", cmd_series_oracle},
      {"picard", cmd_picard},             {"simulate", cmd_simulate},         {"uniqueness", cmd_uniqueness},
      {"accept", cmd_accept}};

  CLI::App app{"fns2d: spectral stochastic Navier-Stokes with fractional noise"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  RunConfig flags;
  std::string config_path;
  app.add_option("--config", config_path, "key = value file; flags override it");
  // Flags are recorded verbatim and validated with the config file values.
  const std::vector<std::pair<std::string, std::string>> opts = {
      {"--hurst", "hurst"},   {"--cutoff", "cutoff"}, {"--dt", "dt"},         {"--t-final", "t_final"},
      {"--seed", "seed"},     {"--replicas", "replicas"}, {"--rho", "rho"},   {"--sigma", "sigma"},
      {"--tol", "tol"},       {"--threads", "threads"}, {"--out", "out"},     {"--snap-every", "snap_every"},
      {"--lambda", "lambda"}, {"--m", "m"},           {"--scheme", "scheme"}, {"--amplitude", "amplitude"},
      {"--criterion", "criterion"}};
  for (const auto& [flag, key] : opts)
    app.add_option_function<std::string>(flag, [&flags, key = key](const std::string& v) { flags.set(key, v); });
  app.add_flag_function("--quick", [&flags](std::int64_t) { flags.set("quick", "1"); }, "accept: reduced sample sizes");
  for (const auto& [name, fn] : commands) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  Context c;
  c.command = app.get_subcommands().front()->get_name();
  try {
    if (!config_path.empty()) c.cfg = RunConfig::load(config_path);
    c.cfg.merge(flags);
    c.threads = static_cast<int>(c.cfg.integer("threads", default_threads()));
    require(c.threads >= 1, "threads must be >= 1");
    c.out = c.cfg.text("out", "out/" + c.command);
    c.manifest = "manifest config_hash=" + hex64(c.cfg.hash(c.command)) + " seed=" + std::to_string(c.seed()) +
                 " command=" + c.command;
    auto t0 = std::chrono::steady_clock::now();
    bool pass = commands.at(c.command)(c);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(c, wall, pass);
    std::cerr << c.command << ": " << (pass ? "pass" : "FAIL") << ", artifacts in " << c.out.string() << "\n";
    return pass ? 0 : 1;
  } catch (const PreconditionError& e) {
    std::cerr << c.command << ": invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << c.command << ": numerical failure: " << e.what() << "; partial artifacts in " << c.out.string() << "\n";
    return 3;
  }
}

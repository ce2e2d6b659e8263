// Batch driver: every verification as one reproducible command writing CSV reports,
// verdict.txt and manifest.txt into the output directory.

#include <fftw3.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hardy/functionals.hpp"
#include "hardy/heat.hpp"
#include "hardy/weights.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using namespace hardy;
using hardy::detail::format_number;

namespace {

constexpr const char* kVersion = "0.3.0";
constexpr int kExitOk = 0, kExitFail = 1, kExitConfig = 2;

struct Config {
  std::string command;
  double delta = 3.0;
  std::optional<double> R;
  int K = 50;
  std::optional<double> tol;
  std::optional<std::size_t> grid_M;
  std::optional<double> box_L;
  std::size_t grid_N = 1024;
  std::size_t steps = 1024;
  std::string potential = "none";
  double amplitude = 0.5;
  std::string out = "out";
  bool plot = false;
  double gamma_factor = 1.0;
  double t = 0.5;
  double xi = 0.5;
  double epsilon = 1e-6;
};

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Outcome {
  bool pass = true;
  double max_violation = 0.0;
  std::string note;
  std::vector<std::pair<std::string, std::string>> summary;

  void add(const std::string& k, double v) { summary.emplace_back(k, format_number(v)); }
  void add(const std::string& k, const std::string& v) { summary.emplace_back(k, v); }
};

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

void validate(const Config& c) {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw config_error(what);
  };
  need(c.delta > 2.0 && c.delta <= 1000.0, "delta must lie in (2, 1000]");
  need(!c.R || *c.R > 0.0, "R must be positive");
  need(c.K >= 1 && c.K <= 100000, "K must lie in [1, 100000]");
  need(!c.tol || (*c.tol > 0.0 && *c.tol < 1.0), "tol must lie in (0, 1)");
  need(!c.grid_M || (*c.grid_M >= 64 && *c.grid_M <= 65536), "grid-M must lie in [64, 65536]");
  need(!c.box_L || *c.box_L > 0.0, "box-L must be positive");
  need(c.grid_N >= 256 && (c.grid_N & (c.grid_N - 1)) == 0, "grid-N must be a power of two >= 256");
  need(c.steps >= 1, "steps must be >= 1");
  need(c.amplitude >= 0.0 && c.amplitude <= 10.0, "amplitude must lie in [0, 10]");
  need(c.gamma_factor > 0.0, "gamma-factor must be positive");
  need(c.t > 0.0 && c.t <= 1.0, "t must lie in (0, 1]");
  need(c.epsilon > 0.0, "epsilon must be positive");
  try {
    PotentialSpec::by_name(c.potential, c.amplitude);
  } catch (const precondition_error& e) {
    throw config_error(e.what());
  }
}

Field gaussian_data(const SpaceGrid& g) {
  return Field::sample(g, [](double x) { return cplx(std::exp(-x * x), 0.0); });
}

// construct-weights: the first family of the iteration with every certificate, plus the limit family.
Outcome construct_weights(const Config& c, const fs::path& dir) {
  const std::size_t M = c.grid_M.value_or(512);
  weights::Tolerances tol;
  if (c.tol) tol.residual = tol.agreement = *c.tol;
  Outcome out;
  const auto a = weights::first_weight(c.delta, M);
  const auto A = weights::antiderivative_A(a);
  const auto b = weights::solve_b(a, A, c.delta, tol);
  const auto T = weights::solve_T(a, A, b.value, c.delta, tol);
  const auto cert = weights::convexity_certificate(a, A, tol);
  const auto limit = weights::limit_weight(c.delta, M);
  const auto lcert = weights::convexity_certificate(limit.a, limit.A, tol);
  const weights::WeightFamily fam{c.delta, a, A, b.value, T.value, false, 0.0};
  const auto res = weights::coefficient_residuals(fam);

  auto os = open_out(dir / "weights.csv");
  os << "t,a,A,b,T,convexity\n";
  for (std::size_t i = 0; i < a.size(); ++i)
    os << format_number(a.node(i)) << ',' << format_number(a[i]) << ',' << format_number(A[i]) << ','
       << format_number(b.value[i]) << ',' << format_number(T.value[i]) << ',' << format_number(cert.identity_form[i])
       << '\n';
  auto ls = open_out(dir / "limit.csv");
  ls << "t,a,A,b,T,convexity\n";
  for (std::size_t i = 0; i < limit.a.size(); ++i)
    ls << format_number(limit.a.node(i)) << ',' << format_number(limit.a[i]) << ',' << format_number(limit.A[i])
       << ',' << format_number(limit.b[i]) << ',' << format_number(limit.T[i]) << ','
       << format_number(lcert.identity_form[i]) << '\n';

  out.max_violation = std::max({b.residual, T.residual, res.sup_r1, res.sup_r2, cert.disagreement});
  out.pass = cert.verdict != weights::Verdict::failed && lcert.verdict != weights::Verdict::failed;
  out.add("grid_M", static_cast<double>(M));
  out.add("residual_b", b.residual);
  out.add("residual_T", T.residual);
  out.add("route_gap_b", b.route_gap);
  out.add("route_gap_T", T.route_gap);
  out.add("coefficient_residual_1", res.sup_r1);
  out.add("coefficient_residual_2", res.sup_r2);
  out.add("convexity_verdict", weights::to_string(cert.verdict));
  out.add("limit_convexity_verdict", weights::to_string(lcert.verdict));
  out.add("min_T_interior", T.value.interior_min());
  out.add("ndelta", weights::choose_ndelta(b.value, T.value));

  if (c.plot) {
    std::vector<double> ts(a.values().begin(), a.values().end());
    for (std::size_t i = 0; i < a.size(); ++i) ts[i] = a.node(i);
    auto vec = [](const TimeCurve& v) { return std::vector<double>(v.values().begin(), v.values().end()); };
    plot::write_svg((dir / "weights.svg").string(), "first weight family", "t", ts,
                    {{"a", vec(a)}, {"b", vec(b.value)}, {"T", vec(T.value)}, {"a limit", vec(limit.a)}});
  }
  return out;
}

Outcome iterate(const Config& c, const fs::path& dir) {
  weights::IterationOptions opt;
  if (c.grid_M) opt.intervals = *c.grid_M;
  opt.keep_families = false;
  const double stop = c.tol.value_or(1e-5);
  Outcome out;
  const auto trace = weights::run_iteration(c.delta, c.K, stop, opt);
  auto os = open_out(dir / "trace.csv");
  trace.write_csv(os);
  double worst = 0.0;
  for (const auto& s : trace.steps) worst = std::max({worst, s.residual_b, s.residual_T});
  // invariants are certified inside run_iteration; convergence is reported, not gated
  out.max_violation = worst;
  out.add("iterates", static_cast<double>(trace.steps.size()));
  out.add("converged", trace.converged ? "yes" : "no");
  out.add("stop_tolerance", stop);
  out.add("final_sup_b", trace.final_sup_b());
  out.add("final_gap_to_limit", trace.final_gap());
  out.add("empirical_rate", trace.empirical_rate());
  out.add("ndelta", trace.ndelta);
  out.add("a_mid", trace.steps.back().a_mid);
  if (!trace.converged) out.note = "converged=no";
  if (c.plot) {
    std::vector<double> ks, b, gap;
    for (const auto& s : trace.steps) {
      ks.push_back(s.k);
      b.push_back(std::log10(s.sup_b));
      gap.push_back(std::log10(s.gap_to_limit));
    }
    plot::write_svg((dir / "trace.svg").string(), "iteration trace (log10)", "k", ks,
                    {{"sup |b_k|", b}, {"gap to limit", gap}});
  }
  return out;
}

std::size_t store_stride(std::size_t steps, std::size_t frames) {
  if (steps % frames != 0) throw config_error("steps must be a multiple of " + std::to_string(frames));
  return steps / frames;
}

Outcome evolve(const Config& c, const fs::path& dir) {
  const SpaceGrid g(c.box_L.value_or(12.0), c.grid_N);
  const auto V = PotentialSpec::by_name(c.potential, c.amplitude);
  heat::EvolveOptions opt;
  opt.store_every = store_stride(c.steps, std::min<std::size_t>(c.steps, 128));
  const auto traj = heat::evolve(gaussian_data(g), V, 0.0, 1.0, c.steps, opt);
  traj.write_directory(dir / "trajectory");

  Outcome out;
  const double pde = heat::pde_residual(traj, V);
  const double energy = heat::energy_excess(traj, V);
  const double pde_tol = c.tol.value_or(1e-4);
  double oracle = 0.0;
  auto os = open_out(dir / "energy.csv");
  os << "t,norm\n";
  for (const auto& f : traj.frames) os << format_number(f.time()) << ',' << format_number(f.norm()) << '\n';
  if (V.is_zero()) {
    const Field& last = traj.frames.back();
    const Field exact = Field::sample(g, [](double x) { return cplx(heat::gaussian_heat(x, 1.0, 1.0), 0.0); });
    oracle = (last - exact).norm();
    out.add("closed_form_error", oracle);
  }
  out.add("pde_residual", pde);
  out.add("energy_excess", energy);
  out.pass = pde <= pde_tol && energy <= 1e-6 && oracle <= 1e-6;
  out.max_violation = std::max({pde, energy, oracle});
  if (c.plot) {
    std::vector<double> xs, re, im;
    for (std::size_t j = 0; j < g.size(); ++j) {
      xs.push_back(g.x(j));
      re.push_back(traj.frames.back()[j].real());
      im.push_back(traj.frames.back()[j].imag());
    }
    plot::write_svg((dir / "final.svg").string(), "u(x, 1)", "x", xs, {{"Re u", re}, {"Im u", im}});
  }
  return out;
}

Outcome verify_convexity(const Config& c, const fs::path& dir) {
  const std::size_t M = c.grid_M.value_or(128);
  const SpaceGrid g(c.box_L.value_or(12.0), c.grid_N);
  const auto V = PotentialSpec::by_name(c.potential, c.amplitude);
  const auto a = weights::first_weight(c.delta, M);
  const auto w = weights::make_family(a, weights::antiderivative_A(a), c.delta);
  heat::EvolveOptions opt;
  opt.store_every = store_stride(c.steps, M);
  const auto traj = heat::evolve(gaussian_data(g), V, 0.0, 1.0, c.steps, opt);
  const auto rep = functionals::check_logconvexity(traj, w, c.xi, V, c.epsilon, 0.0, 1.0);
  auto os = open_out(dir / "convexity.csv");
  rep.write_csv(os);

  Outcome out;
  const double floor = -c.tol.value_or(1e-4) * rep.scale;
  out.pass = rep.min_slack >= floor;
  out.max_violation = std::max(0.0, -rep.min_slack);
  out.add("min_slack", rep.min_slack);
  out.add("scale", rep.scale);
  out.add("N_epsilon", rep.Nval);
  out.add("max_M_epsilon", rep.M.sup_norm());
  out.add("conjugation_residual", rep.conjugation_residual);
  out.add("commutator_min", rep.commutator_min);
  if (c.plot) {
    std::vector<double> ts, h, bound;
    for (std::size_t i = 0; i < rep.H.size(); ++i) {
      ts.push_back(rep.H.node(i));
      h.push_back(rep.H[i]);
      bound.push_back(rep.H[i] + rep.slack[i]);
    }
    plot::write_svg((dir / "convexity.svg").string(), "log-convexity bound", "t", ts,
                    {{"H + eps", h}, {"bound", bound}});
  }
  return out;
}

Outcome verify_bound(const Config& c, const fs::path& dir) {
  const double R = c.R.value_or(3.0);
  const SpaceGrid g(c.box_L.value_or(8.0), c.grid_N);
  const auto V = PotentialSpec::by_name(c.potential, c.amplitude);
  heat::EvolveOptions opt;
  opt.store_every = store_stride(c.steps, std::min<std::size_t>(c.steps, 64));
  const auto traj = heat::evolve(gaussian_data(g), V, 0.0, 1.0, c.steps, opt);
  const auto rep = functionals::verify_theorem_bound(traj, R, V);
  auto os = open_out(dir / "bound.csv");
  os << "t,weight,weighted_norm\n";
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    os << format_number(rep.times[i]) << ',' << format_number(functionals::theorem_weight(rep.times[i], R)) << ','
       << format_number(rep.weighted[i]) << '\n';
  Outcome out;
  out.pass = rep.finite && std::isfinite(rep.ratio);
  out.max_violation = 0.0;
  out.add("R", R);
  out.add("lhs_sup", rep.lhs_sup);
  out.add("rhs_data", rep.rhs_data);
  out.add("ratio", rep.ratio);
  out.add("argmax_time", rep.argmax_time);
  out.add("potential_sup", rep.potential_sup);
  if (c.plot)
    plot::write_svg((dir / "bound.svg").string(), "weighted norm along the flow", "t", rep.times,
                    {{"weighted norm", rep.weighted}});
  return out;
}

Outcome sharpness(const Config& c, const fs::path& dir) {
  const double R = c.R.value_or(1.0);
  const auto rep =
      functionals::sharpness_probe(R, c.t, c.gamma_factor, {4.0, 8.0, 16.0, 32.0, 64.0}, c.tol.value_or(1e-6));
  auto os = open_out(dir / "sharpness.csv");
  rep.write_csv(os);
  Outcome out;
  const auto expected = c.gamma_factor < 1.0 ? functionals::Convergence::convergent
                                             : functionals::Convergence::divergent;
  out.pass = rep.verdict == expected;
  if (c.gamma_factor == 1.0) {
    out.max_violation = std::fabs(rep.fit_exponent - 0.5);
    out.pass = out.pass && out.max_violation <= 0.05;
  }
  out.note = std::string("verdict=") + functionals::to_string(rep.verdict);
  out.add("verdict", functionals::to_string(rep.verdict));
  out.add("gamma", rep.gamma);
  out.add("fit_exponent", rep.fit_exponent);
  out.add("growth_rate", rep.growth_rate);
  if (c.plot) {
    std::vector<double> logn;
    for (double n : rep.norms) logn.push_back(std::log10(n));
    plot::write_svg((dir / "sharpness.svg").string(), "weighted norm of u_R against box size", "L", rep.boxes,
                    {{"log10 norm", logn}});
  }
  return out;
}

using Runner = Outcome (*)(const Config&, const fs::path&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> m{
      {"construct-weights", construct_weights}, {"iterate", iterate},          {"evolve", evolve},
      {"verify-convexity", verify_convexity},   {"verify-bound", verify_bound}, {"sharpness", sharpness}};
  return m;
}

std::string echo(const Config& c) {
  auto opt = [](const auto& v) { return v ? format_number(static_cast<double>(*v)) : std::string("default"); };
  std::string s;
  s += "command = " + c.command + "\n";
  s += "delta = " + format_number(c.delta) + "\n";
  s += "R = " + opt(c.R) + "\n";
  s += "K = " + std::to_string(c.K) + "\n";
  s += "tol = " + opt(c.tol) + "\n";
  s += "grid-M = " + opt(c.grid_M) + "\n";
  s += "box-L = " + opt(c.box_L) + "\n";
  s += "grid-N = " + std::to_string(c.grid_N) + "\n";
  s += "steps = " + std::to_string(c.steps) + "\n";
  s += "potential = " + c.potential + "\n";
  s += "amplitude = " + format_number(c.amplitude) + "\n";
  s += "gamma-factor = " + format_number(c.gamma_factor) + "\n";
  s += "t = " + format_number(c.t) + "\n";
  s += "xi = " + format_number(c.xi) + "\n";
  s += "epsilon = " + format_number(c.epsilon) + "\n";
  s += std::string("plot = ") + (c.plot ? "true" : "false") + "\n";
  return s;
}

void write_manifest(const fs::path& dir, const Config& c, const std::vector<std::string>& files) {
  auto os = open_out(dir / "manifest.txt");
  os << "tool = hardy_cli " << kVersion << "\n";
  os << "fftw = " << fftw_version << "\n";
  os << "compiler = " << __VERSION__ << "\n";
  os << echo(c);
  for (const auto& f : files) os << "output = " << f << "\n";
}

void write_verdict(const fs::path& dir, const Outcome& o) {
  auto os = open_out(dir / "verdict.txt");
  os << (o.pass ? "PASS" : "FAIL") << " max_violation=" << format_number(o.max_violation);
  if (!o.note.empty()) os << ' ' << o.note;
  os << '\n';
}

std::vector<std::string> listing(const fs::path& dir) {
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "manifest.txt") files.push_back(fs::relative(e.path(), dir).generic_string());
  std::sort(files.begin(), files.end());
  return files;
}

// Runs one scenario in dir; verification failures are captured as FAIL verdicts.
Outcome run_one(const std::string& name, const Config& c, const fs::path& dir) {
  fs::create_directories(dir);
  Outcome o;
  try {
    o = runners().at(name)(c, dir);
  } catch (const precondition_error& e) {
    throw config_error(e.what());
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    o.pass = false;
    o.max_violation = std::numeric_limits<double>::infinity();
    o.note = std::string("error: ") + e.what();
  }
  auto os = open_out(dir / "summary.txt");
  for (const auto& [k, v] : o.summary) os << k << " = " << v << '\n';
  os.close();
  write_verdict(dir, o);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification driver for Gaussian-weighted heat flow estimates"};
  Config c;
  const std::vector<std::string> commands{"construct-weights", "iterate",      "evolve", "verify-convexity",
                                          "verify-bound",      "sharpness",    "all"};
  app.add_option("command", c.command, "command to run")->required()->check(CLI::IsMember(commands));
  app.add_option("--delta", c.delta, "decay parameter delta > 2");
  app.add_option("--R", c.R, "extremal family parameter R > 0");
  app.add_option("--K", c.K, "maximum number of weight iterates");
  app.add_option("--tol", c.tol, "command tolerance (see README)");
  app.add_option("--grid-M", c.grid_M, "time intervals on [0,1]");
  app.add_option("--box-L", c.box_L, "spatial half width L");
  app.add_option("--grid-N", c.grid_N, "spatial points (power of two)");
  app.add_option("--steps", c.steps, "time steps on [0,1]");
  app.add_option("--potential", c.potential, "none, gauss-real or gauss-imag");
  app.add_option("--amplitude", c.amplitude, "potential amplitude");
  app.add_option("--out", c.out, "output directory");
  app.add_flag("--plot", c.plot, "also write SVG plots");
  app.add_option("--gamma-factor", c.gamma_factor, "sharpness probe weight factor");
  app.add_option("--t", c.t, "sharpness probe time");
  app.add_option("--xi", c.xi, "frozen frequency for the convexity check");
  app.add_option("--epsilon", c.epsilon, "convexity regularization");
  app.set_config("--config", "", "key = value file; flags override it");
  app.allow_config_extras(false);

  try {
    app.parse(argc, argv);
    validate(c);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const fs::path root(c.out);
  try {
    fs::create_directories(root);
    bool pass = true;
    if (c.command == "all") {
      Outcome total;
      for (const auto& [name, fn] : runners()) {
        const Outcome o = run_one(name, c, root / name);
        std::cout << name << ": " << (o.pass ? "PASS" : "FAIL") << (o.note.empty() ? "" : " " + o.note) << '\n';
        total.pass = total.pass && o.pass;
        total.max_violation = std::max(total.max_violation, o.max_violation);
      }
      write_verdict(root, total);
      pass = total.pass;
    } else {
      const Outcome o = run_one(c.command, c, root);
      std::cout << c.command << ": " << (o.pass ? "PASS" : "FAIL") << (o.note.empty() ? "" : " " + o.note) << '\n';
      pass = o.pass;
    }
    write_manifest(root, c, listing(root));
    return pass ? kExitOk : kExitFail;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}

#include "imopt/bench.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "imopt/errors.hpp"
#include "imopt/fgm.hpp"
#include "imopt/gm.hpp"
#include "imopt/mirror_prox.hpp"
#include "imopt/sinkhorn.hpp"

namespace imopt {

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r\n");
  auto b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::string num17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap m;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    m[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return m;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

RunConfig RunConfig::from_map(const ConfigMap& m) {
  RunConfig c;
  auto get = [&](const char* key) -> const std::string* {
    auto it = m.find(key);
    return it == m.end() ? nullptr : &it->second;
  };
  auto num = [&](const char* key, double& slot) {
    if (auto* v = get(key)) {
      try {
        slot = std::stod(*v);
      } catch (const std::exception&) {
        throw ConfigError(std::string("config field '") + key + "': not a number");
      }
    }
  };
  if (auto* v = get("solver")) c.solver = *v;
  if (c.solver.empty()) throw ConfigError("config field 'solver' is required");
  if (auto* v = get("problem")) c.problem = *v;
  if (auto* v = get("set")) c.set_text = *v;
  if (auto* v = get("setup")) c.setup = *v;
  if (auto* v = get("instance")) c.instance = *v;
  if (auto* v = get("out")) c.out = *v;
  if (auto* v = get("oracle")) c.oracle = (*v == "on" || *v == "1" || *v == "true");
  try {
    if (auto* v = get("dim")) c.dim = std::stoi(*v);
    if (auto* v = get("max_iter")) c.max_iter = std::stoi(*v);
    if (auto* v = get("seed")) c.seed = std::stoull(*v);
  } catch (const std::exception&) {
    throw ConfigError("config fields dim/max_iter/seed must be integers");
  }
  if (const char* env = std::getenv("IMOPT_SEED")) c.seed = std::strtoull(env, nullptr, 10);
  num("eps", c.eps);
  num("L0", c.L0);
  num("delta", c.delta);
  num("delta_tilde", c.delta_tilde);
  num("cond", c.cond);
  num("lambda", c.lambda);
  num("nu", c.nu);
  num("L_nu", c.L_nu);
  num("mu", c.mu);
  num("R2", c.R2);
  num("gamma0", c.gamma0);
  return c;
}

void write_trace_csv(std::ostream& os, const SolverRun& run, double R2, bool fgm_weights) {
  os << "# imopt-trace v1\n";
  os << "k,L,alpha,A,f,att,delta,cert\n";
  for (int k = 0; k < run.n_iters(); ++k) {
    const auto& it = run.iters[k];
    Certificate c = fgm_weights ? fgm_certificate_prefix(run, k + 1, R2)
                                : gm_certificate_prefix(run, k + 1, R2);
    os << it.k << ',' << num17(it.L) << ',' << num17(it.alpha) << ',' << num17(it.A) << ','
       << num17(it.f_delta) << ',' << it.attempts << ',' << num17(it.delta) << ','
       << num17(c.bound_value()) << "\n";
  }
}

void write_vi_trace_csv(std::ostream& os, const VIRun& run,
                        const std::vector<double>* gap_series) {
  os << "# imopt-trace v1\n";
  os << (gap_series ? "k,L,alpha,A,f,att,delta,cert,gap\n" : "k,L,alpha,A,f,att,delta,cert\n");
  double S = 0;
  for (int k = 0; k < run.n_iters(); ++k) {
    const auto& it = run.iters[k];
    S += 1.0 / it.L;
    double cert = run.v_max / S + 2.0 * run.delta + 2.0 * run.delta_tilde;
    os << it.k << ',' << num17(it.L) << ',' << num17(1.0 / it.L) << ',' << num17(S) << ','
       << "nan" << ',' << it.attempts << ',' << num17(it.delta) << ',' << num17(cert);
    if (gap_series) os << ',' << num17((*gap_series)[k]);
    os << "\n";
  }
}

namespace {

struct BuiltProblem {
  std::shared_ptr<ModelOracle> model;
  ProxSetup setup = ProxSetup::euclidean();
  FeasibleSet set = FeasibleSet::whole_space(1);
  Vec x0;
  double R2 = 1.0;
  double f_star = kNaN;
  double L_true = kNaN;
  double mu = 0.0;
  HolderProblem holder;  // for universal solvers
  bool has_holder = false;
};

BuiltProblem build_min_problem(const RunConfig& c) {
  Rng rng(c.seed);
  BuiltProblem bp;
  bp.set = c.set_text.empty() ? FeasibleSet::whole_space(c.dim)
                              : FeasibleSet::parse(c.set_text, c.dim);
  if (c.setup == "entropy")
    bp.setup = ProxSetup::entropy(bp.set.dim());
  else if (c.setup == "euclidean")
    bp.setup = ProxSetup::euclidean();
  else
    throw ConfigError("config field 'setup': unknown value '" + c.setup + "'");

  if (c.problem == "quadratic") {
    auto q = QuadraticProblem::random(c.dim, 1.0 / std::max(c.cond, 1.0), 1.0, rng);
    bp.model = make_smooth_model(q);
    bp.mu = q.mu();
    bp.L_true = q.L();
    Vec xs = q.minimizer();
    if (bp.set.kind() == FeasibleSet::Kind::WholeSpace) bp.f_star = q.min_value();
    bp.x0 = bp.set.project(rng.uniform_vector(c.dim, -1.0, 1.0));
    bp.R2 = bp.setup.bregman(bp.x0, bp.set.project(xs)) * 1.01 + 1e-12;
  } else if (c.problem == "lasso") {
    // separable quadratic + lambda ||x||_1 with closed-form optimum
    Vec d = rng.uniform_vector(c.dim, 1.0 / std::max(c.cond, 1.0), 1.0);
    Vec b = rng.uniform_vector(c.dim, -1.0, 1.0);
    double lam = c.lambda;
    CompositeProblem p;
    p.g_value = [d, b](const Vec& x) {
      return 0.5 * x.cwiseProduct(d).dot(x) - b.dot(x);
    };
    p.g_grad = [d, b](const Vec& x) { return Vec(d.cwiseProduct(x) - b); };
    p.h = SimpleTerm::l1(lam);
    bp.model = make_composite_model(p, d.maxCoeff());
    bp.L_true = d.maxCoeff();
    bp.mu = d.minCoeff();
    Vec xs(c.dim);
    for (int i = 0; i < c.dim; ++i) {
      double v = std::abs(b[i]) <= lam ? 0.0 : (b[i] - (b[i] > 0 ? lam : -lam)) / d[i];
      xs[i] = v;
    }
    if (bp.set.kind() == FeasibleSet::Kind::WholeSpace)
      bp.f_star = p.g_value(xs) + lam * xs.lpNorm<1>();
    bp.x0 = bp.set.project(rng.uniform_vector(c.dim, -1.0, 1.0));
    bp.R2 = bp.setup.bregman(bp.x0, bp.set.project(xs)) * 1.01 + 1e-12;
  } else if (c.problem == "holder_norm") {
    // f(x) = ||x - a||_2: nu = 0, L_0 = 2 (subgradients live on the unit ball)
    Vec a = rng.uniform_vector(c.dim, -0.5, 0.5);
    bp.holder.value = [a](const Vec& x) { return (x - a).norm(); };
    bp.holder.subgrad = [a](const Vec& x) {
      double n = (x - a).norm();
      return n < 1e-14 ? Vec(Vec::Zero(x.size())) : Vec((x - a) / n);
    };
    bp.holder.nu = 0.0;
    bp.holder.L_nu = 2.0;
    bp.has_holder = true;
    bp.model = make_universal_model(bp.holder, nullptr);
    Vec xs = bp.set.kind() == FeasibleSet::Kind::WholeSpace ? a : bp.set.project(a);
    if (bp.set.kind() == FeasibleSet::Kind::WholeSpace) bp.f_star = 0.0;
    bp.x0 = bp.set.project(Vec::Constant(c.dim, 1.0));
    bp.R2 = bp.setup.bregman(bp.x0, xs) * 1.01 + 1e-12;
  } else {
    throw ConfigError("config field 'problem': unknown value '" + c.problem + "'");
  }
  if (c.R2 > 0) bp.R2 = c.R2;
  return bp;
}

int run_min_solver(const RunConfig& c, std::ostream& out, std::ostream& err) {
  BuiltProblem bp;
  try {
    bp = build_min_problem(c);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  InexactnessBudget budget{c.delta, c.delta_tilde, nullptr};
  SolverRun run;
  bool fgm_weights = false;
  if (c.solver == "gm") {
    GMConfig cfg{c.L0, c.max_iter, budget, {}, true, nullptr};
    run = gm_solve(*bp.model, bp.setup, bp.set, bp.x0, bp.R2, cfg);
  } else if (c.solver == "fgm") {
    FGMConfig cfg;
    cfg.L0 = c.L0;
    cfg.max_iter = c.max_iter;
    cfg.budget = budget;
    run = fgm_solve(*bp.model, bp.setup, bp.set, bp.x0, bp.R2, cfg);
    fgm_weights = true;
  } else if (c.solver == "fgm_universal") {
    if (!bp.has_holder) throw ConfigError("fgm_universal requires problem=holder_norm");
    FGMConfig cfg;
    cfg.L0 = c.L0;
    cfg.max_iter = c.max_iter;
    run = fgm_universal_solve(bp.holder, bp.setup, bp.set, bp.x0, bp.R2, c.eps, cfg);
    fgm_weights = true;
  } else if (c.solver == "gm_restart") {
    if (c.mu <= 0) throw ConfigError("gm_restart requires mu > 0");
    if (!std::isfinite(bp.L_true)) throw ConfigError("gm_restart needs a smooth problem");
    run = gm_restart_solve(*bp.model, StrongConvexityTag::left_relative(c.mu), bp.setup,
                           bp.set, bp.x0, bp.R2, c.eps, bp.L_true, budget);
  } else if (c.solver == "fgm_restart") {
    if (c.mu <= 0) throw ConfigError("fgm_restart requires mu > 0");
    run = fgm_restart_solve(*bp.model, StrongConvexityTag::left_relative(c.mu), bp.setup,
                            bp.set, bp.x0, bp.R2, c.eps, budget);
    fgm_weights = true;
  } else {
    throw ConfigError("config field 'solver': unknown value '" + c.solver + "'");
  }

  if (!c.out.empty()) {
    std::ofstream of(c.out);
    if (!of) throw ConfigError("cannot write trace file: " + c.out);
    write_trace_csv(of, run, bp.R2, fgm_weights);
  }
  double fin = run.iters.empty() ? kNaN : run.iters.back().f_delta;
  out << "solver=" << c.solver << " iters=" << run.n_iters()
      << " attempts=" << run.total_attempts << " cert=" << run.certificate.bound_value()
      << " f=" << fin;
  if (std::isfinite(bp.f_star)) {
    double fx = bp.model->f_value(c.solver == "gm" ? run.x_bar : run.x_last);
    out << " gap=" << fx - bp.f_star;
  }
  out << " stopped_by=" << run.stopped_by << "\n";
  (void)err;
  return 0;
}

int run_vi_solver(const RunConfig& c, std::ostream& out, std::ostream& err) {
  Rng rng(c.seed);
  if (c.solver == "mirror_prox" || c.solver == "mirror_prox_universal") {
    // matrix game on a product of simplices, entropy setup
    Mat A(c.dim, c.dim);
    for (int i = 0; i < c.dim; ++i)
      for (int j = 0; j < c.dim; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
    SaddleSpec spec = make_matrix_game_spec(A);
    double v_max = std::log(static_cast<double>(spec.n1)) +
                   std::log(static_cast<double>(spec.n2));
    MirrorProxConfig cfg;
    cfg.eps = c.eps;
    cfg.delta = c.solver == "mirror_prox_universal" ? c.eps / 2.0 : c.delta;
    cfg.delta_tilde = c.delta_tilde;
    cfg.L0 = c.L0;
    cfg.max_iter = c.max_iter;
    cfg.V_max = v_max;
    SaddleResult res = saddle_solve(spec, c.eps, cfg);
    std::vector<double> gaps;
    for (int N = 1; N <= res.run.n_iters(); ++N)
      gaps.push_back(saddle_prefix_gap(spec, res.run, N));
    if (!c.out.empty()) {
      std::ofstream of(c.out);
      if (!of) throw ConfigError("cannot write trace file: " + c.out);
      write_vi_trace_csv(of, res.run, &gaps);
    }
    out << "solver=" << c.solver << " iters=" << res.run.n_iters()
        << " attempts=" << res.run.total_attempts << " cert=" << res.run.certificate
        << " gap=" << res.gap << " stopped_by=" << res.run.stopped_by << "\n";
    return 0;
  }
  if (c.solver == "mirror_prox_restart") {
    // strongly monotone affine VI g(x) = x - a over a ball
    Vec a = rng.uniform_vector(c.dim, -0.3, 0.3);
    auto model = make_vi_operator_model([a](const Vec& x) { return Vec(x - a); }, 1.0,
                                        SimpleTerm::none(), 1.0);
    FeasibleSet set = FeasibleSet::ball(Vec::Zero(c.dim), 1.0);
    Vec x0 = Vec::Zero(c.dim);
    VIRun run = mirror_prox_restart_solve(*model, ProxSetup::euclidean(), set, x0,
                                          c.R2 > 0 ? c.R2 : 1.0, c.eps);
    if (!c.out.empty()) {
      std::ofstream of(c.out);
      if (!of) throw ConfigError("cannot write trace file: " + c.out);
      of << "# imopt-restart v1\nstage,R2\n";
      for (size_t p = 0; p < run.stage_radii_sq.size(); ++p)
        of << p << ',' << num17(run.stage_radii_sq[p]) << "\n";
    }
    double dist = (run.x_final - set.project(a)).squaredNorm();
    out << "solver=" << c.solver << " stages=" << run.stages
        << " inner_iters=" << run.total_inner_iterations << " dist_sq=" << dist << "\n";
    return 0;
  }
  (void)err;
  throw ConfigError("config field 'solver': unknown value '" + c.solver + "'");
}

int run_prox_sinkhorn(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.instance.empty()) throw ConfigError("prox_sinkhorn requires instance=<path>");
  OTInstance inst = load_ot_instance(c.instance);
  double gamma0 = c.gamma0 > 0 ? c.gamma0 : std::max(inst.C.maxCoeff(), 1e-6);
  ProxSinkhornResult res = proximal_sinkhorn(inst, gamma0, c.eps);
  if (!c.out.empty()) {
    std::ofstream of(c.out);
    if (!of) throw ConfigError("cannot write trace file: " + c.out);
    of << "# imopt-ot-trace v1\nk,gamma,sweeps,cost,residual\n";
    for (size_t k = 0; k < res.gammas.size(); ++k)
      of << k << ',' << num17(res.gammas[k]) << ',' << res.inner_sweeps[k] << ','
         << num17(res.costs[k]) << ',' << num17(res.residuals[k]) << "\n";
  }
  out << "solver=prox_sinkhorn outer=" << res.run.n_iters()
      << " inner_sweeps=" << res.total_inner_sweeps << " cost=" << res.final_cost
      << " gamma_final=" << res.gamma_final;
  if (c.oracle) {
    double opt = exact_ot_oracle(inst, 1 << 20);
    out << " oracle=" << opt << " deviation=" << std::abs(res.final_cost - opt);
  }
  out << " stopped_by=" << res.run.stopped_by << "\n";
  (void)err;
  return 0;
}

}  // namespace

int cli_run(const std::string& config_path, std::ostream& out, std::ostream& err) {
  RunConfig c;
  try {
    c = RunConfig::from_map(parse_config_file(config_path));
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 3;
  }
  try {
    if (c.solver == "prox_sinkhorn") return run_prox_sinkhorn(c, out, err);
    if (c.solver.rfind("mirror_prox", 0) == 0) return run_vi_solver(c, out, err);
    return run_min_solver(c, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "solver error: " << e.what() << "\n";
    return 2;
  }
}

int cli_compare_sinkhorn(const std::string& instance_path, double eps,
                         const std::vector<double>& gamma_grid, const std::string& out_path,
                         std::ostream& out, std::ostream& err) {
  if (gamma_grid.empty()) {
    err << "config error: empty gamma grid\n";
    return 3;
  }
  OTInstance inst;
  try {
    inst = load_ot_instance(instance_path);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return 3;
  }
  try {
    std::ostringstream table;
    table << "# imopt-compare-sinkhorn v1\nmethod,gamma,outer,total_inner_sweeps,cost\n";
    // plain Sinkhorn at the theoretical gamma = eps / (4 ln n)
    double gamma_plain = eps / (4.0 * std::log(std::max(2, inst.n())));
    Mat prior = inst.l * inst.w.transpose();
    TransportPlan plain = sinkhorn(inst, gamma_plain, prior, 0.1 * eps, 2000000);
    TransportPlan plain_rounded = round_to_polytope(plain.x, inst.l, inst.w);
    table << "sinkhorn," << num17(gamma_plain) << ",1," << plain.sweeps << ','
          << num17(plain_rounded.cost(inst)) << "\n";
    for (double g : gamma_grid) {
      ProxSinkhornOptions opts;
      opts.adaptive_gamma = false;  // fixed gamma per grid point
      ProxSinkhornResult r = proximal_sinkhorn(inst, g, eps, opts);
      table << "prox_sinkhorn," << num17(g) << ',' << r.run.n_iters() << ','
            << r.total_inner_sweeps << ',' << num17(r.final_cost) << "\n";
    }
    out << table.str();
    if (!out_path.empty()) {
      std::ofstream of(out_path);
      if (!of) throw ConfigError("cannot write output file: " + out_path);
      of << table.str();
    }
    return 0;
  } catch (const Error& e) {
    err << "solver error: " << e.what() << "\n";
    return 2;
  }
}

int cli_validate_model(const std::string& config_path, std::ostream& out, std::ostream& err) {
  RunConfig c;
  try {
    c = RunConfig::from_map(parse_config_file(config_path));
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 3;
  }
  try {
    BuiltProblem bp = build_min_problem(c);
    ValidationReport rep =
        validate_min_model(*bp.model, bp.setup, bp.set, c.max_iter, c.seed);
    out << "model=" << c.problem << " " << rep.summary() << "\n";
    return rep.passed ? 0 : 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "solver error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace imopt

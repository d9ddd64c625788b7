#include "imopt/sinkhorn.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "imopt/errors.hpp"

namespace imopt {

void OTInstance::check() const {
  if (C.rows() != C.cols() || C.rows() != l.size() || C.rows() != w.size())
    throw DimensionMismatch("ot instance: C/l/w dimensions");
  require(C.minCoeff() >= 0 && C.allFinite(), "ot instance: C finite, nonnegative");
  require(std::abs(l.sum() - 1.0) <= 1e-12 * l.size() + 1e-12, "ot instance: sum l = 1");
  require(std::abs(w.sum() - 1.0) <= 1e-12 * w.size() + 1e-12, "ot instance: sum w = 1");
  require(l.minCoeff() > 0 && w.minCoeff() > 0, "ot instance: marginals positive");
}

double TransportPlan::residual_against(const Vec& l, const Vec& w) const {
  return (x.rowwise().sum() - l).lpNorm<1>() + (x.colwise().sum().transpose() - w).lpNorm<1>();
}

double kl_matrix(const Mat& x, const Mat& y) {
  double acc = 0;
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) {
      double xi = std::max(x(i, j), 1e-300);
      double yi = std::max(y(i, j), 1e-300);
      acc += xi * std::log(xi / yi) - xi + yi;
    }
  return acc;
}

namespace {

double logsumexp_row(const Mat& M, const Vec& add_cols, int i) {
  double m = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < M.cols(); ++j) m = std::max(m, M(i, j) + add_cols[j]);
  double s = 0;
  for (int j = 0; j < M.cols(); ++j) s += std::exp(M(i, j) + add_cols[j] - m);
  return m + std::log(s);
}

double logsumexp_col(const Mat& M, const Vec& add_rows, int j) {
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < M.rows(); ++i) m = std::max(m, M(i, j) + add_rows[i]);
  double s = 0;
  for (int i = 0; i < M.rows(); ++i) s += std::exp(M(i, j) + add_rows[i] - m);
  return m + std::log(s);
}

}  // namespace

TransportPlan sinkhorn(const OTInstance& inst, double gamma, const Mat& prior, double tol,
                       int max_sweeps, SinkhornDuals* warm) {
  require(gamma > 0, "sinkhorn: gamma > 0");
  require(prior.minCoeff() > 0, "sinkhorn: prior entries must be positive");
  const int n = inst.n();
  const bool log_domain = gamma < 1e-2 * std::max(inst.C.maxCoeff(), 1e-30);

  TransportPlan plan;
  plan.x.resize(n, n);

  // M_ij = ln prior_ij - C_ij / gamma; x = exp(M + (f_i + g_j)/gamma)
  Mat M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = std::log(prior(i, j)) - inst.C(i, j) / gamma;

  Vec phi = Vec::Zero(n), psi = Vec::Zero(n);  // f/gamma, g/gamma
  if (warm && warm->valid && warm->f.size() == n) {
    phi = warm->f / gamma;
    psi = warm->g / gamma;
  }
  Vec log_l = inst.l.array().log();
  Vec log_w = inst.w.array().log();

  auto rebuild_plan = [&]() {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) plan.x(i, j) = std::exp(M(i, j) + phi[i] + psi[j]);
  };

  int sweeps = 0;
  double resid = std::numeric_limits<double>::infinity();
  if (log_domain) {
    for (; sweeps < max_sweeps; ++sweeps) {
      for (int i = 0; i < n; ++i) phi[i] = log_l[i] - logsumexp_row(M, psi, i);
      for (int j = 0; j < n; ++j) psi[j] = log_w[j] - logsumexp_col(M, phi, j);
      rebuild_plan();
      resid = plan.residual_against(inst.l, inst.w);
      plan.residual_history.push_back(resid);
      if (resid <= tol) {
        ++sweeps;
        break;
      }
    }
  } else {
    Mat K(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) K(i, j) = std::exp(M(i, j));
    Vec a = phi.array().exp(), b = psi.array().exp();
    for (; sweeps < max_sweeps; ++sweeps) {
      a = inst.l.array() / (K * b).array().max(1e-300);
      b = inst.w.array() / (K.transpose() * a).array().max(1e-300);
      plan.x = a.asDiagonal() * K * b.asDiagonal();
      resid = plan.residual_against(inst.l, inst.w);
      plan.residual_history.push_back(resid);
      if (resid <= tol) {
        ++sweeps;
        break;
      }
    }
    phi = a.array().max(1e-300).log();
    psi = b.array().max(1e-300).log();
    rebuild_plan();
    resid = plan.residual_against(inst.l, inst.w);
  }

  plan.sweeps = sweeps;
  plan.marginal_residual = resid;
  plan.converged = resid <= tol;
  if (warm) {
    warm->f = gamma * phi;
    warm->g = gamma * psi;
    warm->valid = true;
  }
  return plan;
}

TransportPlan round_to_polytope(const Mat& x, const Vec& l, const Vec& w) {
  require(x.minCoeff() >= -1e-12, "round: entries >= 0");
  const int n = static_cast<int>(x.rows());
  Mat y = x.cwiseMax(0.0);
  Vec rows = y.rowwise().sum();
  for (int i = 0; i < n; ++i) {
    double s = rows[i] > 0 ? std::min(1.0, l[i] / rows[i]) : 1.0;
    y.row(i) *= s;
  }
  Vec cols = y.colwise().sum();
  for (int j = 0; j < n; ++j) {
    double s = cols[j] > 0 ? std::min(1.0, w[j] / cols[j]) : 1.0;
    y.col(j) *= s;
  }
  Vec err_l = l - y.rowwise().sum();
  Vec err_w = w - Vec(y.colwise().sum().transpose());
  double el = err_l.lpNorm<1>();
  if (el > 0) y += (err_l * err_w.transpose()) / el;

  TransportPlan plan;
  plan.x = y;
  plan.marginal_residual = plan.residual_against(l, w);
  plan.converged = true;
  return plan;
}

ProxSinkhornResult proximal_sinkhorn(const OTInstance& inst, double gamma0, double eps,
                                     ProxSinkhornOptions opts) {
  inst.check();
  require(gamma0 > 0, "proximal sinkhorn: gamma0 > 0");
  require(eps > 0, "proximal sinkhorn: eps > 0");
  const int n = inst.n();

  auto tol_rule = opts.inner_tol_rule
                      ? opts.inner_tol_rule
                      : [](int, double, double e) { return std::max(1e-12, 1e-3 * e); };
  const double entry_floor = eps / (2.0 * n * n);

  // V[x*](x0) <= H(l) + H(w) for the product prior x0 = l w'
  double R2 = 0;
  for (int i = 0; i < n; ++i) R2 -= inst.l[i] * std::log(inst.l[i]);
  for (int j = 0; j < n; ++j) R2 -= inst.w[j] * std::log(inst.w[j]);

  ProxSinkhornResult res;
  Mat x = inst.l * inst.w.transpose();
  double gamma = gamma0;
  double A = 0;
  double prev_cost = (inst.C.array() * x.array()).sum();
  SinkhornDuals duals;
  int first_sweeps = -1;
  bool frozen = !opts.adaptive_gamma;
  std::string stop;

  for (int k = 0; k < opts.max_outer; ++k) {
    Mat prior = x.array().max(entry_floor);  // footnote flooring keeps c-bar bounded
    double tol = tol_rule(k, gamma, eps);
    int cap = opts.inner_sweep_cap > 0 ? opts.inner_sweep_cap : opts.max_inner_sweeps;
    TransportPlan inner = sinkhorn(inst, gamma, prior, tol, cap, &duals);
    TransportPlan rounded = round_to_polytope(inner.x, inst.l, inst.w);
    x = rounded.x;
    double cost = (inst.C.array() * x.array()).sum();

    A += 1.0 / gamma;
    res.plan_seq.push_back(x);
    res.inner_sweeps.push_back(inner.sweeps);
    res.total_inner_sweeps += inner.sweeps;
    res.gammas.push_back(gamma);
    res.costs.push_back(cost);
    res.residuals.push_back(inner.marginal_residual);
    res.run.iters.push_back({k, gamma, 1.0 / gamma, A, 1, 0.0, tol, cost});
    res.run.total_attempts += 1;
    res.run.certificate = {R2 / A, 0.0, 0.0};

    if (first_sweeps < 0) first_sweeps = std::max(inner.sweeps, 1);
    bool cert_ok = R2 / A <= eps;
    bool stable = frozen && std::abs(cost - prev_cost) <= 0.25 * eps;
    prev_cost = cost;
    if (cert_ok || stable) {
      stop = cert_ok ? "target_eps" : "stabilized";
      break;
    }
    if (!frozen) {
      if (inner.sweeps > 10 * first_sweeps) {
        frozen = true;  // keep the gamma that triggered the blow-up detector
      } else {
        gamma *= 0.5;
      }
    }
  }
  if (stop.empty()) throw MaxOuterExceeded("proximal sinkhorn: outer iteration cap reached");

  res.run.stopped_by = stop;
  res.run.total_iterations = res.run.n_iters();
  res.plan = round_to_polytope(x, inst.l, inst.w);
  res.final_cost = res.plan.cost(inst);
  res.gamma_final = gamma;
  res.gamma_frozen = frozen;
  return res;
}

ProxSinkhornResult proximal_sinkhorn_doubling(const OTInstance& inst, double gamma0,
                                              double eps, int nbar0, int max_rounds) {
  require(nbar0 >= 1, "doubling: nbar0 >= 1");
  ProxSinkhornResult best;
  double prev_cost = std::numeric_limits<double>::infinity();
  int nbar = nbar0;
  for (int round = 0; round < max_rounds; ++round, nbar *= 2) {
    ProxSinkhornOptions opts;
    opts.inner_sweep_cap = nbar;
    ProxSinkhornResult r;
    try {
      r = proximal_sinkhorn(inst, gamma0, eps, opts);
    } catch (const MaxOuterExceeded&) {
      continue;  // too few inner sweeps to make progress; double and retry
    }
    bool settled = std::abs(r.final_cost - prev_cost) <= 0.25 * eps;
    prev_cost = r.final_cost;
    best = std::move(r);
    if (settled) return best;
  }
  if (best.run.n_iters() == 0)
    throw MaxOuterExceeded("proximal sinkhorn doubling: no round converged");
  return best;
}

// ---------------------------------------------------------------------------
// exact LP oracle: successive shortest augmenting paths (Bellman-Ford)

double exact_ot_oracle(const OTInstance& inst, long scale) {
  inst.check();
  const int n = inst.n();
  require(n <= 12, "exact oracle: n <= 12");
  require(scale >= 1, "exact oracle: scale >= 1");

  std::vector<long> supply(n), demand(n);
  long ssum = 0, dsum = 0;
  for (int i = 0; i < n; ++i) {
    double v = inst.l[i] * scale;
    supply[i] = std::lround(v);
    if (std::abs(v - supply[i]) > 1e-9 * scale)
      throw ScaleError("exact oracle: l not representable over scale");
    ssum += supply[i];
  }
  for (int j = 0; j < n; ++j) {
    double v = inst.w[j] * scale;
    demand[j] = std::lround(v);
    if (std::abs(v - demand[j]) > 1e-9 * scale)
      throw ScaleError("exact oracle: w not representable over scale");
    dsum += demand[j];
  }
  if (ssum != scale || dsum != scale)
    throw ScaleError("exact oracle: scaled marginals do not sum to scale");

  // nodes: 0 = source, 1..n = rows, n+1..2n = cols, 2n+1 = sink
  const int V = 2 * n + 2, S = 0, T = 2 * n + 1;
  struct Edge {
    int to;
    long cap;
    double cost;
    int rev;
  };
  std::vector<std::vector<Edge>> adj(V);
  auto add_edge = [&](int a, int b, long cap, double cost) {
    adj[a].push_back({b, cap, cost, static_cast<int>(adj[b].size())});
    adj[b].push_back({a, 0, -cost, static_cast<int>(adj[a].size()) - 1});
  };
  for (int i = 0; i < n; ++i) add_edge(S, 1 + i, supply[i], 0.0);
  for (int j = 0; j < n; ++j) add_edge(1 + n + j, T, demand[j], 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) add_edge(1 + i, 1 + n + j, scale, inst.C(i, j));

  double total_cost = 0;
  long flow = 0;
  while (flow < scale) {
    std::vector<double> dist(V, std::numeric_limits<double>::infinity());
    std::vector<int> pv(V, -1), pe(V, -1);
    dist[S] = 0;
    for (int pass = 0; pass < V; ++pass) {
      bool changed = false;
      for (int a = 0; a < V; ++a) {
        if (!std::isfinite(dist[a])) continue;
        for (int e = 0; e < static_cast<int>(adj[a].size()); ++e) {
          const Edge& ed = adj[a][e];
          if (ed.cap > 0 && dist[a] + ed.cost < dist[ed.to] - 1e-15) {
            dist[ed.to] = dist[a] + ed.cost;
            pv[ed.to] = a;
            pe[ed.to] = e;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (!std::isfinite(dist[T])) throw Error("exact oracle: no augmenting path");
    long push = scale - flow;
    for (int v = T; v != S; v = pv[v]) push = std::min(push, adj[pv[v]][pe[v]].cap);
    for (int v = T; v != S; v = pv[v]) {
      Edge& ed = adj[pv[v]][pe[v]];
      ed.cap -= push;
      adj[v][ed.rev].cap += push;
    }
    total_cost += push * dist[T];
    flow += push;
  }
  return total_cost / scale;
}

// ---------------------------------------------------------------------------
// instance I/O

OTInstance load_ot_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open OT instance file: " + path);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
  };
  if (!std::getline(in, line)) throw ConfigError("ot file: missing header");
  auto head = split(line);
  if (head.size() < 2 || head[0] != "n") throw ConfigError("ot file: header must be 'n,<int>'");
  int n = std::stoi(head[1]);
  require(n >= 1, "ot file: n >= 1");
  OTInstance inst;
  inst.C.resize(n, n);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw ConfigError("ot file: missing cost row");
    auto toks = split(line);
    if (static_cast<int>(toks.size()) != n) throw ConfigError("ot file: bad cost row width");
    for (int j = 0; j < n; ++j) inst.C(i, j) = std::stod(toks[j]);
  }
  inst.l.resize(n);
  inst.w.resize(n);
  for (Vec* target : {&inst.l, &inst.w}) {
    if (!std::getline(in, line)) throw ConfigError("ot file: missing marginal row");
    auto toks = split(line);
    if (static_cast<int>(toks.size()) != n + 1) throw ConfigError("ot file: bad marginal row");
    for (int j = 0; j < n; ++j) (*target)[j] = std::stod(toks[j + 1]);
  }
  inst.check();
  return inst;
}

void save_ot_instance(const OTInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write OT instance file: " + path);
  const int n = inst.n();
  out << "n," << n << "\n";
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out << (j ? "," : "") << fmt(inst.C(i, j));
    out << "\n";
  }
  out << "l:";
  for (int i = 0; i < n; ++i) out << "," << fmt(inst.l[i]);
  out << "\nw:";
  for (int j = 0; j < n; ++j) out << "," << fmt(inst.w[j]);
  out << "\n";
}

OTInstance random_ot_instance(int n, long scale, Rng& rng) {
  require(n >= 1 && scale >= n, "random_ot_instance: scale >= n");
  OTInstance inst;
  inst.C.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inst.C(i, j) = rng.uniform();
  auto composition = [&](int parts) {
    std::vector<long> v(parts, 1);
    long rem = scale - parts;
    for (int i = 0; i < parts; ++i) {
      long take = i + 1 < parts ? static_cast<long>(rem * rng.uniform()) : rem;
      v[i] += take;
      rem -= take;
    }
    return v;
  };
  auto lv = composition(n), wv = composition(n);
  inst.l.resize(n);
  inst.w.resize(n);
  for (int i = 0; i < n; ++i) inst.l[i] = static_cast<double>(lv[i]) / scale;
  for (int j = 0; j < n; ++j) inst.w[j] = static_cast<double>(wv[j]) / scale;
  return inst;
}

}  // namespace imopt

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "imopt/bench.hpp"
#include "imopt/errors.hpp"
#include "imopt/sinkhorn.hpp"

using namespace imopt;

namespace {

std::string write_tmp(const std::string& name, const std::string& text) {
  std::string path = "/tmp/imopt_" + name;
  std::ofstream out(path);
  out << text;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parser") {
  auto m = parse_config_text("solver=gm\n# comment\n  dim = 5 \n\neps=1e-4 # trailing\n");
  CHECK(m.at("solver") == "gm");
  CHECK(m.at("dim") == "5");
  CHECK(m.at("eps") == "1e-4");
  CHECK_THROWS_AS(parse_config_text("not a pair\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_map(parse_config_text("dim=5\n")), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_map(parse_config_text("solver=gm\neps=abc\n")),
                  ConfigError);
}

TEST_CASE("cli_run: unknown solver exits 3 naming the field") {
  auto path = write_tmp("bad_solver.cfg", "solver=warp_drive\n");
  std::ostringstream out, err;
  CHECK(cli_run(path, out, err) == 3);
  CHECK(err.str().find("solver") != std::string::npos);
  std::ostringstream out2, err2;
  CHECK(cli_run("/nonexistent/file.cfg", out2, err2) == 3);
}

TEST_CASE("cli_run: gm trace schema and determinism") {
  std::string cfg =
      "solver=gm\nproblem=quadratic\ndim=6\ncond=50\nseed=11\nmax_iter=40\n"
      "out=/tmp/imopt_trace_a.csv\n";
  auto path = write_tmp("gm.cfg", cfg);
  std::ostringstream out, err;
  REQUIRE(cli_run(path, out, err) == 0);
  CHECK(out.str().find("cert=") != std::string::npos);
  CHECK(out.str().find("gap=") != std::string::npos);

  std::string trace = slurp("/tmp/imopt_trace_a.csv");
  CHECK(trace.rfind("# imopt-trace v1\nk,L,alpha,A,f,att,delta,cert\n", 0) == 0);

  // identical config + seed produce byte-identical traces
  auto path2 = write_tmp("gm2.cfg",
                         "solver=gm\nproblem=quadratic\ndim=6\ncond=50\nseed=11\n"
                         "max_iter=40\nout=/tmp/imopt_trace_b.csv\n");
  std::ostringstream out2, err2;
  REQUIRE(cli_run(path2, out2, err2) == 0);
  CHECK(slurp("/tmp/imopt_trace_b.csv") == trace);

  // gap <= cert re-checked from the emitted summary
  auto grab = [&](const std::string& s, const std::string& key) {
    auto pos = s.find(key);
    REQUIRE(pos != std::string::npos);
    return std::stod(s.substr(pos + key.size()));
  };
  CHECK(grab(out.str(), "gap=") <= grab(out.str(), "cert=") + 1e-9);
}

TEST_CASE("cli_run: fgm and restart solvers") {
  for (const char* solver : {"fgm", "gm_restart", "fgm_restart"}) {
    std::string cfg = std::string("solver=") + solver +
                      "\nproblem=quadratic\ndim=5\ncond=20\nseed=3\nmax_iter=60\n"
                      "mu=0.05\neps=1e-6\n";
    auto path = write_tmp(std::string("solver_") + solver + ".cfg", cfg);
    std::ostringstream out, err;
    CHECK(cli_run(path, out, err) == 0);
    CHECK(out.str().find("iters=") != std::string::npos);
  }
}

TEST_CASE("cli_run: mirror prox and universal variants") {
  auto path = write_tmp("mp.cfg",
                        "solver=mirror_prox\ndim=4\nseed=5\neps=1e-3\nmax_iter=40000\n"
                        "out=/tmp/imopt_mp.csv\n");
  std::ostringstream out, err;
  REQUIRE(cli_run(path, out, err) == 0);
  CHECK(out.str().find("gap=") != std::string::npos);
  std::string trace = slurp("/tmp/imopt_mp.csv");
  CHECK(trace.find(",gap") != std::string::npos);  // saddle runs append the gap series

  auto path2 = write_tmp("mpr.cfg", "solver=mirror_prox_restart\ndim=3\neps=1e-5\n");
  std::ostringstream out2, err2;
  REQUIRE(cli_run(path2, out2, err2) == 0);
  CHECK(out2.str().find("dist_sq=") != std::string::npos);
}

TEST_CASE("cli_run: IMOPT_SEED overrides the config seed") {
  std::string cfg =
      "solver=gm\nproblem=quadratic\ndim=4\nseed=1\nmax_iter=10\nout=/tmp/imopt_seed_a.csv\n";
  auto path = write_tmp("seed.cfg", cfg);
  std::ostringstream o1, e1;
  REQUIRE(cli_run(path, o1, e1) == 0);
  setenv("IMOPT_SEED", "777", 1);
  std::string cfg2 =
      "solver=gm\nproblem=quadratic\ndim=4\nseed=1\nmax_iter=10\nout=/tmp/imopt_seed_b.csv\n";
  auto path2 = write_tmp("seed2.cfg", cfg2);
  std::ostringstream o2, e2;
  REQUIRE(cli_run(path2, o2, e2) == 0);
  unsetenv("IMOPT_SEED");
  CHECK(slurp("/tmp/imopt_seed_a.csv") != slurp("/tmp/imopt_seed_b.csv"));
}

TEST_CASE("cli_run: prox sinkhorn with oracle deviation") {
  Rng rng(80);
  auto inst = random_ot_instance(3, 1 << 12, rng);
  save_ot_instance(inst, "/tmp/imopt_ot3.csv");
  auto path = write_tmp("ps.cfg",
                        "solver=prox_sinkhorn\ninstance=/tmp/imopt_ot3.csv\neps=1e-4\n"
                        "oracle=on\nout=/tmp/imopt_ps_trace.csv\n");
  std::ostringstream out, err;
  REQUIRE(cli_run(path, out, err) == 0);
  CHECK(out.str().find("deviation=") != std::string::npos);
  auto pos = out.str().find("deviation=");
  CHECK(std::stod(out.str().substr(pos + 10)) <= 1e-3);
  std::string trace = slurp("/tmp/imopt_ps_trace.csv");
  CHECK(trace.rfind("# imopt-ot-trace v1\nk,gamma,sweeps,cost,residual\n", 0) == 0);
}

TEST_CASE("cli_compare_sinkhorn") {
  std::ostringstream out, err;
  CHECK(cli_compare_sinkhorn("/tmp/imopt_ot3.csv", 1e-3, {}, "", out, err) == 3);

  Rng rng(81);
  auto inst = random_ot_instance(2, 1 << 10, rng);
  save_ot_instance(inst, "/tmp/imopt_ot2.csv");
  std::ostringstream out2, err2;
  int rc = cli_compare_sinkhorn("/tmp/imopt_ot2.csv", 1e-3, {0.5, 0.125},
                                "/tmp/imopt_cmp.csv", out2, err2);
  REQUIRE(rc == 0);
  std::string table = slurp("/tmp/imopt_cmp.csv");
  CHECK(table.find("method,gamma,outer,total_inner_sweeps,cost") != std::string::npos);
  CHECK(table.find("sinkhorn,") != std::string::npos);
  CHECK(table.find("prox_sinkhorn,") != std::string::npos);
}

TEST_CASE("cli_validate_model") {
  auto path = write_tmp("vm.cfg", "solver=gm\nproblem=lasso\ndim=4\nseed=9\nmax_iter=500\n");
  std::ostringstream out, err;
  CHECK(cli_validate_model(path, out, err) == 0);
  CHECK(out.str().find("pass") != std::string::npos);
}

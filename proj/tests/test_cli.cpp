#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "invscat/io.hpp"
#include "invscat/pipeline.hpp"
#include "oracles.hpp"

using namespace invscat;
using io::json;
namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("invscat_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string at(const std::string& name) { return (workdir() / name).string(); }

int run(const std::string& args) {
  std::string cmd = std::string(INVSCAT_CLI) + " " + args + " > " + at("stdout.txt") + " 2> " + at("stderr.txt");
  int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load(const std::string& path) { return io::read_json_file(path); }

ScatteringData unit_S(std::vector<BoundPair> b) {
  RunConfig c;
  Grid kg = c.k_grid();
  return ScatteringData(kg, VectorXcd::Ones(kg.size()), std::move(b));
}

const std::string coarse = "--step 0.05 --k-max 30 --dk 0.02";

}  // namespace

TEST_CASE("forward on the zero potential") {
  io::write_json_file(at("zero.json"), io::to_json(potentials::zero(Grid::with_step(0, 15, 0.05))));
  REQUIRE(run("forward " + at("zero.json") + " " + coarse + " --out-dir " + at("fz")) == 0);
  json s = load(at("fz/scattering.json"));
  CHECK(s["bound_states"].empty());
  double dev = 0;
  for (size_t j = 0; j < s["s_re"].size(); ++j)
    dev = std::max(dev, std::abs(std::complex<double>(s["s_re"][j].get<double>(), s["s_im"][j].get<double>()) - 1.0));
  CHECK(dev < 1e-8);
  CHECK(load(at("fz/validation.json"))["kappa"] == 0);
  CHECK(fs::exists(at("fz/jost.json")));
}

TEST_CASE("outputs are byte-identical across runs") {
  io::write_json_file(at("bump.json"), io::to_json(potentials::polynomial_bump(Grid::with_step(0, 15, 0.05), 2, 3)));
  REQUIRE(run("forward " + at("bump.json") + " " + coarse + " --out-dir " + at("b1")) == 0);
  REQUIRE(run("forward " + at("bump.json") + " " + coarse + " --out-dir " + at("b2")) == 0);
  for (const char* f : {"jost.json", "scattering.json", "validation.json"})
    CHECK(slurp(at(std::string("b1/") + f)) == slurp(at(std::string("b2/") + f)));
}

TEST_CASE("forward rejects a potential outside the class") {
  Grid g = Grid::with_step(0, 15, 0.05);
  io::write_json_file(at("slow.json"),
                      io::to_json(potentials::from_function(g, [](double x) { return 1 / (1 + x); }, "slow")));
  CHECK(run("forward " + at("slow.json") + " " + coarse + " --out-dir " + at("fs")) == 2);
  CHECK(run("forward " + at("zero.json") + " --out-dir " + at("fs")) == 2);  // grid does not match h
}

TEST_CASE("invert a reflectionless datum") {
  io::write_json_file(at("s_bound.json"), io::to_json(unit_S({{1.0, 2.0}})));
  // S = 1 with one bound state breaks the Levinson relation
  CHECK(run("invert " + at("s_bound.json") + " --out-dir " + at("inv")) == 2);
  REQUIRE(run("invert " + at("s_bound.json") + " --no-levinson-strict --out-dir " + at("inv")) == 0);
  Potential q = io::potential_from_json(load(at("inv/potential.json")), "potential.json");
  double err = 0;
  for (Index i = 1; i + 1 < q.grid().size(); ++i)
    err = std::max(err, std::abs(q.q.values(i) - oracle::sech2_potential(q.grid()[i])));
  CHECK(err < 5e-3);
  for (const char* f : {"F.json", "kernel.json", "kernel.csv", "estimates.json", "validation.json"})
    CHECK(fs::exists(at(std::string("inv/") + f)));
}

TEST_CASE("invert trivial data") {
  RunConfig c;
  io::write_json_file(at("s_one.json"), io::to_json(unit_S({})));
  REQUIRE(run("invert " + at("s_one.json") + " --out-dir " + at("inv0")) == 0);
  Potential q = io::potential_from_json(load(at("inv0/potential.json")), "potential.json");
  CHECK(q.q.values.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("invert refuses data violating condition A") {
  RunConfig c;
  Grid kg = c.k_grid();
  VectorXcd s = VectorXcd::Constant(kg.size(), 0.5);
  io::write_json_file(at("s_bad.json"), io::to_json(ScatteringData(kg, s)));
  CHECK(run("invert " + at("s_bad.json") + " --out-dir " + at("invbad")) == 2);
  CHECK_FALSE(fs::exists(at("invbad/potential.json")));
}

TEST_CASE("roundtrip on the zero potential") {
  REQUIRE(run("roundtrip " + at("zero.json") + " " + coarse + " --out-dir " + at("rt")) == 0);
  json r = load(at("rt/roundtrip.json"));
  CHECK(r["q_error_max"].get<double>() <= 1e-8);
  CHECK(r["F_error_max"].get<double>() <= 1e-8);
  CHECK(r["S_error_max"].get<double>() <= 1e-8);
  CHECK(r["recovered_bound_states"].empty());
}

TEST_CASE("verify and support on F = 2 e^{-x}") {
  RunConfig c;
  Grid g = c.f_grid();
  VectorXd fd(g.size());
  for (Index i = 0; i < g.size(); ++i) fd(i) = 2 * std::exp(-g[i]);
  io::write_json_file(at("F.json"), io::to_json(FFunction(g, VectorXd::Zero(g.size()), fd)));
  REQUIRE(run("verify --F " + at("F.json") + " --out-dir " + at("ver")) == 0);
  json v = load(at("ver/verify.json"));
  CHECK(std::abs(v["x0"].get<double>() - std::log(2.0) / 2) <= c.h);
  CHECK(v["condition_C"]["passed"] == true);

  REQUIRE(run("support " + at("F.json") + " --support 2 --out-dir " + at("sup")) == 0);
  CHECK(load(at("sup/support.json"))["verdict"] == "fail");
  REQUIRE(run("support " + at("inv/F.json") + " --support 2 --out-dir " + at("sup")) == 0);
  CHECK(load(at("sup/support.json"))["verdict"] == "fail");
}

TEST_CASE("exit codes for bad invocations") {
  CHECK(run("forward " + at("no_such_file.json")) == 4);
  CHECK(run("forward " + at("zero.json") + " " + coarse + " --tol.bogus 1") == 2);
  CHECK(run("forward " + at("zero.json") + " " + coarse + " --tol.marchenko.tol_solve abc") == 2);
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  std::ofstream(at("broken.json")) << "{";
  CHECK(run("forward " + at("broken.json") + " " + coarse) == 4);
}

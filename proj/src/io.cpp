#include "invscat/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace invscat::io {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path + ": malformed JSON (" + e.what() + ")");
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(1) + "\n"); }

namespace {

const json& field(const json& j, const char* name, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected a JSON object");
  auto it = j.find(name);
  if (it == j.end()) throw ParseError(where, std::string("missing field '") + name + "'");
  return *it;
}

double number(const json& j, const char* name, const std::string& where) {
  const json& v = field(j, name, where);
  if (!v.is_number()) throw ParseError(where, std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

Index count(const json& j, const char* name, const std::string& where) {
  const json& v = field(j, name, where);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ParseError(where, std::string("field '") + name + "' must be a nonnegative integer");
  return Index(v.get<long long>());
}

VectorXd vector(const json& j, const char* name, const std::string& where, Index expected) {
  const json& v = field(j, name, where);
  if (!v.is_array()) throw ParseError(where, std::string("field '") + name + "' must be an array");
  if (expected >= 0 && Index(v.size()) != expected)
    throw ParseError(where, std::string("field '") + name + "' has " + std::to_string(v.size()) +
                                " entries, expected " + std::to_string(expected));
  VectorXd out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      throw ParseError(where, std::string("field '") + name + "[" + std::to_string(i) + "]' is not a number");
    out(Index(i)) = v[i].get<double>();
  }
  return out;
}

json array(const VectorXd& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

template <typename Fn>
auto guarded(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(where, e.what());
  }
}

json grid_json(const Grid& g) { return {{"x_min", g.x_min()}, {"x_max", g.x_max()}, {"n", g.intervals()}}; }

Grid grid_from(const json& j, const std::string& where) {
  return guarded(where, [&] { return Grid(number(j, "x_min", where), number(j, "x_max", where), count(j, "n", where)); });
}

std::vector<BoundPair> pairs_from(const json& j, const std::string& where) {
  std::vector<BoundPair> out;
  const json& b = field(j, "bound_states", where);
  if (!b.is_array()) throw ParseError(where, "field 'bound_states' must be an array");
  for (size_t i = 0; i < b.size(); ++i) {
    std::string w = where + " bound_states[" + std::to_string(i) + "]";
    out.push_back({number(b[i], "k", w), number(b[i], "s", w)});
  }
  return out;
}

}  // namespace

json to_json(const Potential& p) {
  json j = {{"label", p.label}, {"x_max", p.grid().x_max()}, {"n", p.grid().intervals()}, {"values", array(p.q.values)}};
  if (p.support_radius) j["support_radius"] = *p.support_radius;
  if (!p.notes.empty()) j["notes"] = p.notes;
  return j;
}

Potential potential_from_json(const json& j, const std::string& where) {
  const double X = number(j, "x_max", where);
  const Index n = count(j, "n", where);
  VectorXd v = vector(j, "values", where, n + 1);
  std::optional<double> a;
  if (j.contains("support_radius") && !j["support_radius"].is_null()) a = number(j, "support_radius", where);
  std::string label = j.contains("label") && j["label"].is_string() ? j["label"].get<std::string>() : "";
  return guarded(where, [&] { return Potential(RealFunction(Grid(0.0, X, n), v), a, label); });
}

Potential read_potential_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<double> xs, qs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream ss(line);
    double x, q;
    if (!(ss >> x >> q)) {
      if (xs.empty() && lineno == 1) continue;  // header
      throw ParseError(path + ":" + std::to_string(lineno), "expected two numeric columns x,q");
    }
    xs.push_back(x);
    qs.push_back(q);
  }
  if (xs.size() < 9) throw ParseError(path, "need at least 9 samples");
  if (std::abs(xs.front()) > 1e-12) throw ParseError(path, "grid must start at x = 0");
  const Index n = Index(xs.size()) - 1;
  const double h = (xs.back() - xs.front()) / double(n);
  for (Index i = 0; i <= n; ++i)
    if (std::abs(xs[i] - double(i) * h) > 1e-9 * std::max(1.0, std::abs(xs.back())))
      throw ParseError(path + ":" + std::to_string(i + 1), "grid is not uniform");
  VectorXd v = Eigen::Map<VectorXd>(qs.data(), n + 1);
  return guarded(path, [&] { return Potential(RealFunction(Grid(0.0, xs.back(), n), v), {}, path); });
}

json to_json(const JostData& jd) {
  json bs = json::array();
  for (const auto& b : jd.bound_states)
    bs.push_back({{"k", b.k}, {"s", b.s}, {"fdot_im", b.fdot().imag()}, {"fprime0", b.fprime0}, {"s_l2", b.s_l2}});
  return {{"k_grid", grid_json(jd.k_grid)},
          {"f_re", array(jd.f.real())},
          {"f_im", array(jd.f.imag())},
          {"fprime0_re", array(jd.fprime0.real())},
          {"fprime0_im", array(jd.fprime0.imag())},
          {"s_re", array(jd.s.real())},
          {"s_im", array(jd.s.imag())},
          {"f_at_zero", jd.f_at_zero},
          {"zero_energy_resonance", jd.zero_energy_resonance},
          {"warnings", jd.warnings},
          {"bound_states", bs}};
}

JostData jost_from_json(const json& j, const std::string& where) {
  JostData jd;
  jd.k_grid = grid_from(field(j, "k_grid", where), where + " k_grid");
  const Index n = jd.k_grid.size();
  auto cplx = [&](const char* re, const char* im) {
    VectorXcd c(n);
    c.real() = vector(j, re, where, n);
    c.imag() = vector(j, im, where, n);
    return c;
  };
  jd.f = cplx("f_re", "f_im");
  jd.s = cplx("s_re", "s_im");
  jd.fprime0 = j.contains("fprime0_re") ? cplx("fprime0_re", "fprime0_im") : VectorXcd::Zero(n);
  if (j.contains("f_at_zero")) jd.f_at_zero = number(j, "f_at_zero", where);
  if (j.contains("zero_energy_resonance")) jd.zero_energy_resonance = j["zero_energy_resonance"].get<bool>();
  const json& b = field(j, "bound_states", where);
  for (size_t i = 0; i < b.size(); ++i) {
    std::string w = where + " bound_states[" + std::to_string(i) + "]";
    BoundState bs;
    bs.k = number(b[i], "k", w);
    bs.s = number(b[i], "s", w);
    if (b[i].contains("fdot_im")) bs.g_prime = -number(b[i], "fdot_im", w);
    if (b[i].contains("fprime0")) bs.fprime0 = number(b[i], "fprime0", w);
    if (b[i].contains("s_l2")) bs.s_l2 = number(b[i], "s_l2", w);
    jd.bound_states.push_back(bs);
  }
  return jd;
}

json to_json(const ScatteringData& sd) {
  json bs = json::array();
  for (const auto& b : sd.bound_states) bs.push_back({{"k", b.k}, {"s", b.s}});
  json j = {{"k_max", sd.k_grid.x_max()},
            {"n_k", sd.k_grid.intervals()},
            {"s_re", array(sd.s_values.real())},
            {"s_im", array(sd.s_values.imag())},
            {"bound_states", bs}};
  if (sd.index_kappa) j["kappa"] = *sd.index_kappa;
  return j;
}

ScatteringData scattering_from_json(const json& j, const std::string& where) {
  const double K = number(j, "k_max", where);
  const Index n = count(j, "n_k", where);
  VectorXcd s(n + 1);
  s.real() = vector(j, "s_re", where, n + 1);
  s.imag() = vector(j, "s_im", where, n + 1);
  auto pairs = pairs_from(j, where);
  ScatteringData sd = guarded(where, [&] { return ScatteringData(Grid(-K, K, n), s, pairs); });
  if (j.contains("kappa") && !j["kappa"].is_null()) {
    if (!j["kappa"].is_number_integer()) throw ParseError(where, "field 'kappa' must be an integer");
    sd.index_kappa = j["kappa"].get<int>();
  }
  return sd;
}

json to_json(const FFunction& F) {
  json j = {{"x_min", F.grid.x_min()}, {"x_max", F.grid.x_max()}, {"n", F.grid.intervals()},
            {"values", array(F.values)}, {"f_s", array(F.f_s)},        {"f_d", array(F.f_d)}};
  if (F.tail_coefficients.size()) j["tail_coefficients"] = array(F.tail_coefficients);
  j["truncation_residual"] = F.truncation_residual;
  return j;
}

FFunction f_from_json(const json& j, const std::string& where) {
  Grid g = guarded(where, [&] { return Grid(number(j, "x_min", where), number(j, "x_max", where), count(j, "n", where)); });
  const Index n = g.size();
  VectorXd values = vector(j, "values", where, n);
  VectorXd fs = j.contains("f_s") ? vector(j, "f_s", where, n) : values;
  VectorXd fd = j.contains("f_d") ? vector(j, "f_d", where, n) : VectorXd::Zero(n);
  if (((fs + fd) - values).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, values.cwiseAbs().maxCoeff()))
    throw ParseError(where, "values differ from f_s + f_d");
  FFunction F = guarded(where, [&] { return FFunction(g, fs, fd); });
  if (j.contains("tail_coefficients")) F.tail_coefficients = vector(j, "tail_coefficients", where, -1);
  if (j.contains("truncation_residual")) F.truncation_residual = number(j, "truncation_residual", where);
  return F;
}

json to_json(const TransformKernel& A) {
  json rows = json::array();
  for (Index i = 0; i < A.size(); ++i) rows.push_back(array(A.row(i)));
  return {{"x_max", A.grid.x_max()}, {"n", A.grid.intervals()}, {"rows", rows}};
}

TransformKernel kernel_from_json(const json& j, const std::string& where) {
  const double X = number(j, "x_max", where);
  const Index n = count(j, "n", where);
  const json& rows = field(j, "rows", where);
  if (!rows.is_array() || Index(rows.size()) != n + 1) throw ParseError(where, "field 'rows' must hold n+1 rows");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (Index i = 0; i <= n; ++i) {
    json holder = {{"row", rows[i]}};
    VectorXd r = vector(holder, "row", where + " rows[" + std::to_string(i) + "]", n + 1 - i);
    A.row(i).tail(n + 1 - i) = r.transpose();
  }
  return guarded(where, [&] { return TransformKernel(Grid(0.0, X, n), A); });
}

std::string kernel_csv(const TransformKernel& A) {
  std::string out = "x,y,A\n";
  char buf[96];
  for (Index i = 0; i < A.size(); ++i)
    for (Index j = i; j < A.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", A.grid[i], A.grid[j], A(i, j));
      out += buf;
    }
  return out;
}

RunConfig config_from_json(const json& j, const std::string& where) {
  RunConfig c;
  if (!j.is_object()) throw ParseError(where, "config must be a JSON object");
  for (const auto& [key, val] : j.items()) {
    if (key == "x_max") c.x_max = number(j, "x_max", where);
    else if (key == "h") c.h = number(j, "h", where);
    else if (key == "k_max") c.k_max = number(j, "k_max", where);
    else if (key == "dk") c.dk = number(j, "dk", where);
    else if (key == "x_neg") c.x_neg = number(j, "x_neg", where);
    else if (key == "seed") c.seed = std::uint64_t(count(j, "seed", where));
    else if (key == "tolerances") {
      if (!val.is_object()) throw ParseError(where, "field 'tolerances' must be an object");
      for (const auto& [name, v] : val.items()) {
        if (!c.tolerances.count(name)) throw ParseError(where, "unknown tolerance '" + name + "'");
        if (!v.is_number()) throw ParseError(where, "tolerance '" + name + "' must be a number");
        c.tolerances[name] = v.get<double>();
      }
    } else {
      throw ParseError(where, "unknown field '" + key + "'");
    }
  }
  return c;
}

json to_json(const RunConfig& c) {
  return {{"x_max", c.x_max}, {"h", c.h},       {"k_max", c.k_max},          {"dk", c.dk},
          {"x_neg", c.x_neg}, {"seed", c.seed}, {"tolerances", c.tolerances}};
}

namespace {
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
}  // namespace

json to_json(const std::vector<Check>& checks) {
  json a = json::array();
  for (const auto& c : checks)
    a.push_back({{"name", c.name},
                 {"value", finite_or_null(c.value)},
                 {"threshold", finite_or_null(c.threshold)},
                 {"verdict", c.pass ? "pass" : "fail"},
                 {"note", c.note}});
  return a;
}

json to_json(const ValidationReport& r) {
  return {{"checks", to_json(r.checks)},
          {"kappa", r.kappa},
          {"winding", r.winding},
          {"zero_energy_resonance", r.zero_energy_resonance},
          {"condition_A", r.condition_A},
          {"condition_B", r.condition_B}};
}

json to_json(const InequalityReport& r) {
  json a = json::array();
  for (const auto& c : r.constants)
    a.push_back({{"name", c.name},
                 {"value", finite_or_null(c.value)},
                 {"at_x", c.at_x},
                 {"used", c.used},
                 {"excluded", c.excluded},
                 {"suspect_x", c.suspect_x}});
  return {{"x0", r.x0}, {"constants", a}, {"all_finite", r.all_finite()}};
}

namespace {
json entries_json(const std::vector<IntegrabilityEntry>& es) {
  json a = json::array();
  for (const auto& e : es)
    a.push_back({{"name", e.name},
                 {"value", finite_or_null(e.value)},
                 {"tail_exponent", finite_or_null(e.tail.exponent)},
                 {"basis", e.tail.basis},
                 {"verdict", e.finite ? "finite" : "infinite"}});
  return a;
}
}  // namespace

json to_json(const ConditionCReport& r) { return {{"entries", entries_json(r.entries)}, {"passed", r.passed()}}; }

json to_json(const CompactSupportReport& r) {
  return {{"a", r.a},         {"delta", r.delta},   {"max_abs", r.max_abs},
          {"threshold", r.threshold}, {"a_hat", r.a_hat}, {"verdict", r.pass ? "pass" : "fail"}};
}

json to_json(const L2Report& r) { return {{"entries", entries_json(r.entries)}, {"passed", r.passed()}}; }

}  // namespace invscat::io

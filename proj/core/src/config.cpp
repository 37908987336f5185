#include "chds/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "chds/expression.hpp"

namespace chds {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw Error(ErrorKind::Config, key + ": " + what);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    bad(key, "expected a number, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long d = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<int>(d);
  } catch (const std::exception&) {
    bad(key, "expected an integer, got '" + v + "'");
  }
}

// "name(arg)" -> arg, or nullopt when v is not of that shape.
std::optional<std::string> call_argument(const std::string& v, const std::string& name) {
  if (v.size() < name.size() + 2 || v.compare(0, name.size() + 1, name + "(") != 0 || v.back() != ')')
    return std::nullopt;
  return trim(v.substr(name.size() + 1, v.size() - name.size() - 2));
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

using Setter = std::function<void(Config&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"epsilon", [](Config& c, const auto& k, const auto& v) { c.params.epsilon = to_double(k, v); }},
      {"gamma", [](Config& c, const auto& k, const auto& v) { c.params.gamma = to_double(k, v); }},
      {"lambda", [](Config& c, const auto& k, const auto& v) { c.params.lambda = to_double(k, v); }},
      {"eta", [](Config& c, const auto& k, const auto& v) { c.params.eta = to_double(k, v); }},
      {"theta", [](Config& c, const auto& k, const auto& v) { c.params.theta = to_double(k, v); }},
      {"omega", [](Config& c, const auto& k, const auto& v) { c.params.omega = to_double(k, v); }},
      {"tau", [](Config& c, const auto& k, const auto& v) { c.params.tau = to_double(k, v); }},
      {"T", [](Config& c, const auto& k, const auto& v) { c.params.final_time = to_double(k, v); }},
      {"picard_tol", [](Config& c, const auto& k, const auto& v) { c.params.picard_tol = to_double(k, v); }},
      {"newton_tol", [](Config& c, const auto& k, const auto& v) { c.params.newton_tol = to_double(k, v); }},
      {"linear_tol", [](Config& c, const auto& k, const auto& v) { c.params.linear_tol = to_double(k, v); }},
      {"max_picard", [](Config& c, const auto& k, const auto& v) { c.params.max_picard = to_int(k, v); }},
      {"max_newton", [](Config& c, const auto& k, const auto& v) { c.params.max_newton = to_int(k, v); }},
      {"coupling",
       [](Config& c, const auto& k, const auto& v) {
         if (v == "picard") c.params.coupling = Coupling::Picard;
         else if (v == "monolithic") c.params.coupling = Coupling::Monolithic;
         else bad(k, "expected picard or monolithic, got '" + v + "'");
       }},
      {"n", [](Config& c, const auto& k, const auto& v) { c.n = to_int(k, v); }},
      {"levels", [](Config& c, const auto& k, const auto& v) { c.levels = to_int(k, v); }},
      {"path_constant", [](Config& c, const auto& k, const auto& v) { c.path_constant = to_double(k, v); }},
      {"domain",
       [](Config& c, const auto& k, const auto& v) {
         std::istringstream s(v);
         Rectangle r;
         if (!(s >> r.x0 >> r.x1 >> r.y0 >> r.y1) || !(s >> std::ws).eof())
           bad(k, "expected four numbers 'x0 x1 y0 y1', got '" + v + "'");
         c.domain = r;
       }},
      {"initial",
       [](Config& c, const auto& k, const auto& v) {
         if (v == "spinodal") {
           c.initial = {InitialSpec::Kind::Spinodal, 0.0, {}};
         } else if (auto a = call_argument(v, "constant")) {
           c.initial = {InitialSpec::Kind::Constant, to_double(k, *a), {}};
         } else if (auto e = call_argument(v, "expr")) {
           Expression check(*e);
           c.initial = {InitialSpec::Kind::Expression, 0.0, *e};
         } else {
           bad(k, "expected spinodal, constant(c) or expr(...), got '" + v + "'");
         }
       }},
      {"init_mode",
       [](Config& c, const auto& k, const auto& v) {
         if (v == "interpolate") c.init_mode = InitMode::Interpolate;
         else if (v == "ritz") c.init_mode = InitMode::Ritz;
         else bad(k, "expected interpolate or ritz, got '" + v + "'");
       }},
      {"initial_velocity",
       [](Config& c, const auto& k, const auto& v) {
         if (v == "zero") c.initial_velocity = {VelocitySpec::Kind::Zero, 0.0};
         else if (auto a = call_argument(v, "vortex")) c.initial_velocity = {VelocitySpec::Kind::Vortex, to_double(k, *a)};
         else bad(k, "expected zero or vortex(a), got '" + v + "'");
       }},
      {"out_dir", [](Config& c, const auto&, const auto& v) { c.out_dir = v; }},
      {"snapshot_every", [](Config& c, const auto& k, const auto& v) { c.snapshot_every = to_int(k, v); }},
  };
  return table;
}

}  // namespace

void Config::validate() const {
  params.validate();
  params.step_count();
  if (n < 1) bad("n", "must satisfy n >= 1 (got " + std::to_string(n) + ")");
  if (levels < 1) bad("levels", "must satisfy levels >= 1 (got " + std::to_string(levels) + ")");
  if (!(path_constant > 0.0)) bad("path_constant", "must satisfy path_constant > 0");
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0)) bad("domain", "must satisfy x1 > x0 and y1 > y0");
  if (snapshot_every < 0) bad("snapshot_every", "must satisfy snapshot_every >= 0");
  if (out_dir.empty()) bad("out_dir", "must not be empty");
  if (params.gamma == 0.0 && initial_velocity.kind != VelocitySpec::Kind::Zero && initial_velocity.amplitude != 0.0)
    bad("initial_velocity", "must be zero when gamma = 0");
}

Config parse_config(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Config, "line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw Error(ErrorKind::Config, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (seen.count(key))
      throw Error(ErrorKind::Config, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    seen[key] = lineno;
    if (value.empty()) bad(key, "missing value");
    it->second(c, key, value);
  }
  c.validate();
  return c;
}

Config parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize(const Config& c) {
  const Params& p = c.params;
  std::ostringstream out;
  out << "epsilon = " << num(p.epsilon) << '\n'
      << "gamma = " << num(p.gamma) << '\n'
      << "lambda = " << num(p.lambda) << '\n'
      << "eta = " << num(p.eta) << '\n'
      << "theta = " << num(p.theta) << '\n'
      << "omega = " << num(p.omega) << '\n'
      << "tau = " << num(p.tau) << '\n'
      << "T = " << num(p.final_time) << '\n'
      << "picard_tol = " << num(p.picard_tol) << '\n'
      << "newton_tol = " << num(p.newton_tol) << '\n'
      << "linear_tol = " << num(p.linear_tol) << '\n'
      << "max_picard = " << p.max_picard << '\n'
      << "max_newton = " << p.max_newton << '\n'
      << "coupling = " << to_string(p.coupling) << '\n'
      << "n = " << c.n << '\n'
      << "levels = " << c.levels << '\n'
      << "path_constant = " << num(c.path_constant) << '\n'
      << "domain = " << num(c.domain.x0) << ' ' << num(c.domain.x1) << ' ' << num(c.domain.y0) << ' '
      << num(c.domain.y1) << '\n';
  switch (c.initial.kind) {
    case InitialSpec::Kind::Spinodal: out << "initial = spinodal\n"; break;
    case InitialSpec::Kind::Constant: out << "initial = constant(" << num(c.initial.value) << ")\n"; break;
    case InitialSpec::Kind::Expression: out << "initial = expr(" << c.initial.expression << ")\n"; break;
  }
  out << "init_mode = " << (c.init_mode == InitMode::Ritz ? "ritz" : "interpolate") << '\n';
  if (c.initial_velocity.kind == VelocitySpec::Kind::Zero)
    out << "initial_velocity = zero\n";
  else
    out << "initial_velocity = vortex(" << num(c.initial_velocity.amplitude) << ")\n";
  out << "out_dir = " << c.out_dir << '\n' << "snapshot_every = " << c.snapshot_every << '\n';
  return out.str();
}

InitialData make_initial_data(const Config& c) {
  InitialData d;
  d.mode = c.init_mode;
  switch (c.initial.kind) {
    case InitialSpec::Kind::Spinodal: d.phi = spinodal_initial_phi(c.domain); break;
    case InitialSpec::Kind::Constant: d.phi = constant_field(c.initial.value); break;
    case InitialSpec::Kind::Expression: d.phi = Expression(c.initial.expression).field(); break;
  }
  if (c.initial_velocity.kind == VelocitySpec::Kind::Vortex)
    d.velocity = vortex_velocity(c.domain, c.initial_velocity.amplitude);
  return d;
}

}  // namespace chds

#include "dualact/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "dualact/errors.hpp"

namespace dualact {
namespace {

// ---------------------------------------------------------------------------
// Key/value file with nested tables:
//
//   name = "harmonic"          # top-level key
//   [solve]                    # table
//   grad_tol = 1e-11
//   [model.growth]             # nested table
//   delta = 1.0
//   diag = [1.0, 1.0]          # array value
//
// Values: numbers, booleans, quoted or bare strings, flat arrays of those.
// ---------------------------------------------------------------------------

struct Value {
  std::variant<double, bool, std::string, std::vector<double>, std::vector<std::string>> data;
  int line = 0;
  mutable bool used = false;
};

using Table = std::map<std::string, Value>;

struct Document {
  std::map<std::string, Table> tables;  // "" holds top-level keys
  std::string origin;
};

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Strips a trailing comment, respecting double quotes.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

bool parse_number(const std::string& token, double& out) {
  const char* begin = token.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + token.size() && !token.empty();
}

Value parse_scalar(const std::string& token, int line, const std::string& origin) {
  if (token.size() >= 2 && token.front() == '"' && token.back() == '"') {
    return {token.substr(1, token.size() - 2), line};
  }
  if (token == "true") return {true, line};
  if (token == "false") return {false, line};
  double num = 0.0;
  if (parse_number(token, num)) return {num, line};
  if (!token.empty() && token.find(' ') == std::string::npos) {
    return {token, line};  // bare word
  }
  throw ScenarioError(origin + ":" + std::to_string(line) + ": cannot parse value '" + token + "'",
                      line);
}

Value parse_value(const std::string& text, int line, const std::string& origin) {
  const std::string token = trim(text);
  if (token.empty()) {
    throw ScenarioError(origin + ":" + std::to_string(line) + ": missing value", line);
  }
  if (token.front() == '[') {
    if (token.back() != ']') {
      throw ScenarioError(origin + ":" + std::to_string(line) + ": unterminated array", line);
    }
    std::vector<double> numbers;
    std::vector<std::string> strings;
    bool any_string = false;
    std::string inner = token.substr(1, token.size() - 2);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string entry = trim(item);
      if (entry.empty()) continue;
      Value v = parse_scalar(entry, line, origin);
      if (std::holds_alternative<double>(v.data)) {
        numbers.push_back(std::get<double>(v.data));
      } else if (std::holds_alternative<std::string>(v.data)) {
        any_string = true;
        strings.push_back(std::get<std::string>(v.data));
      } else {
        throw ScenarioError(origin + ":" + std::to_string(line) + ": arrays hold numbers or strings",
                            line);
      }
    }
    if (any_string) {
      if (!numbers.empty()) {
        throw ScenarioError(origin + ":" + std::to_string(line) + ": mixed array entries", line);
      }
      return {strings, line};
    }
    return {numbers, line};
  }
  return parse_scalar(token, line, origin);
}

Document parse_document(const std::string& text, const std::string& origin) {
  Document doc;
  doc.origin = origin;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string stripped = trim(strip_comment(raw));
    if (stripped.empty()) continue;
    if (stripped.front() == '[') {
      if (stripped.back() != ']') {
        throw ScenarioError(origin + ":" + std::to_string(line) + ": unterminated table header",
                            line);
      }
      section = trim(stripped.substr(1, stripped.size() - 2));
      if (section.empty()) {
        throw ScenarioError(origin + ":" + std::to_string(line) + ": empty table name", line);
      }
      doc.tables[section];  // table may stay empty
      continue;
    }
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ScenarioError(origin + ":" + std::to_string(line) + ": expected 'key = value'", line);
    }
    const std::string key = trim(stripped.substr(0, eq));
    if (key.empty()) {
      throw ScenarioError(origin + ":" + std::to_string(line) + ": empty key", line);
    }
    Table& table = doc.tables[section];
    if (table.count(key)) {
      throw ScenarioError(origin + ":" + std::to_string(line) + ": duplicate key '" + key + "'",
                          line);
    }
    table.emplace(key, parse_value(stripped.substr(eq + 1), line, origin));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Typed access with diagnostics.
// ---------------------------------------------------------------------------

class Reader {
public:
  Reader(const Document& doc, std::string table) : doc_(doc), table_(std::move(table)) {}

  bool present() const { return doc_.tables.count(table_) > 0; }

  const Value* find(const std::string& key) const {
    auto t = doc_.tables.find(table_);
    if (t == doc_.tables.end()) return nullptr;
    auto v = t->second.find(key);
    if (v == t->second.end()) return nullptr;
    v->second.used = true;
    return &v->second;
  }

  template <typename T>
  std::optional<T> get(const std::string& key) const {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    if (!std::holds_alternative<T>(v->data)) {
      fail(key, *v, "has the wrong type");
    }
    return std::get<T>(v->data);
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    if (auto v = get<double>(key)) return *v;
    if (fallback) return *fallback;
    missing(key);
  }

  std::string word(const std::string& key, std::optional<std::string> fallback = std::nullopt) const {
    if (auto v = get<std::string>(key)) return *v;
    if (fallback) return *fallback;
    missing(key);
  }

  std::vector<double> numbers(const std::string& key) const {
    if (auto v = get<std::vector<double>>(key)) return *v;
    missing(key);
  }

  long integer(const std::string& key, std::optional<long> fallback = std::nullopt) const {
    const Value* v = find(key);
    if (!v) {
      if (fallback) return *fallback;
      missing(key);
    }
    if (!std::holds_alternative<double>(v->data)) fail(key, *v, "must be an integer");
    const double d = std::get<double>(v->data);
    const double r = std::round(d);
    if (std::abs(d - r) > 1e-9 || std::abs(r) > 9e15) fail(key, *v, "must be an integer");
    return static_cast<long>(r);
  }

  [[noreturn]] void missing(const std::string& key) const {
    throw ScenarioError(doc_.origin + ": missing required key '" + qualified(key) + "'");
  }

  [[noreturn]] void fail(const std::string& key, const Value& v, const std::string& what) const {
    throw ScenarioError(doc_.origin + ":" + std::to_string(v.line) + ": key '" + qualified(key) +
                            "' " + what,
                        v.line);
  }

  std::string qualified(const std::string& key) const {
    return table_.empty() ? key : table_ + "." + key;
  }

private:
  const Document& doc_;
  std::string table_;
};

void reject_unknown(const Document& doc, const std::set<std::string>& known_tables) {
  for (const auto& [name, table] : doc.tables) {
    if (!known_tables.count(name)) {
      int line = 0;
      for (const auto& [key, value] : table) line = value.line;
      throw ScenarioError(doc.origin + ": unknown table '[" + name + "]'", line);
    }
    for (const auto& [key, value] : table) {
      if (!value.used) {
        throw ScenarioError(doc.origin + ":" + std::to_string(value.line) + ": unknown key '" +
                                (name.empty() ? key : name + "." + key) + "'",
                            value.line);
      }
    }
  }
}

DerivativeScheme parse_scheme(const std::string& word, const std::string& origin) {
  if (word == "central2") return DerivativeScheme::Central2;
  if (word == "fourier") return DerivativeScheme::Fourier;
  throw ScenarioError(origin + ": grid.scheme must be 'central2' or 'fourier', got '" + word + "'");
}

ModelKind parse_model_kind(const std::string& word, const std::string& origin) {
  if (word == "quadratic") return ModelKind::Quadratic;
  if (word == "time-scaled-quadratic") return ModelKind::TimeScaledQuadratic;
  if (word == "quartic-radial") return ModelKind::QuarticRadial;
  if (word == "harmonic-oscillator") return ModelKind::HarmonicOscillator;
  if (word == "helmholtz") return ModelKind::Helmholtz;
  if (word == "free-field") return ModelKind::FreeField;
  throw ScenarioError(origin + ": unknown model.kind '" + word + "'");
}

Optimizer parse_optimizer(const std::string& word, const std::string& origin) {
  if (word == "gradient-descent") return Optimizer::GradientDescentArmijo;
  if (word == "lbfgs") return Optimizer::Lbfgs;
  if (word == "newton-krylov") return Optimizer::NewtonKrylov;
  throw ScenarioError(origin + ": solve.optimizer must be 'gradient-descent', 'lbfgs' or "
                               "'newton-krylov', got '" + word + "'");
}

InitKind parse_init(const std::string& word, const std::string& origin) {
  if (word == "zero") return InitKind::Zero;
  if (word == "random-smooth") return InitKind::RandomSmooth;
  throw ScenarioError(origin + ": solve.init must be 'zero' or 'random-smooth', got '" + word +
                      "'");
}

}  // namespace

MultiTimeGrid Scenario::make_grid() const { return make_grid(resolution); }

MultiTimeGrid Scenario::make_grid(const std::vector<std::size_t>& res) const {
  try {
    return MultiTimeGrid(periods, res);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(name + ": " + e.what());
  }
}

bool Scenario::has_lagrangian() const {
  return model.kind == ModelKind::HarmonicOscillator || model.kind == ModelKind::Helmholtz ||
         model.kind == ModelKind::FreeField;
}

LagrangianModel Scenario::make_lagrangian() const {
  switch (model.kind) {
    case ModelKind::HarmonicOscillator:
      return make_harmonic_oscillator_lagrangian();
    case ModelKind::Helmholtz:
      return make_helmholtz_lagrangian();
    case ModelKind::FreeField:
      return make_free_field_lagrangian(static_cast<int>(periods.size()));
    default:
      throw ScenarioError(name + ": model kind has no Lagrangian form");
  }
}

HamiltonianModel Scenario::make_hamiltonian() const {
  const int p = static_cast<int>(periods.size());
  HamiltonianModel h;
  switch (model.kind) {
    case ModelKind::Quadratic:
      h = make_quadratic_hamiltonian(model.n, p, model.matrix, model.offset);
      break;
    case ModelKind::TimeScaledQuadratic: {
      if (model.scaling == "one-plus-t1") {
        h = make_time_scaled_quadratic(model.n, p, model.matrix,
                                       [](const Eigen::VectorXd& t) { return 1.0 + t[0]; });
      } else {
        throw ScenarioError(name + ": unknown model.scaling '" + model.scaling + "'");
      }
      break;
    }
    case ModelKind::QuarticRadial:
      h = make_quartic_radial(model.n, p, model.quartic_a, model.quartic_b);
      break;
    case ModelKind::HarmonicOscillator: {
      // Closed-form Legendre partner H = (x^2 + p^2)/2.
      if (p != 1) throw ScenarioError(name + ": harmonic-oscillator needs p = 1");
      h = make_quadratic_hamiltonian(1, 1, Eigen::MatrixXd::Identity(2, 2));
      break;
    }
    case ModelKind::Helmholtz: {
      // Closed-form Legendre partner H = (x^2 + (p1)^2 + (p2)^2)/2.
      if (p != 2) throw ScenarioError(name + ": helmholtz needs p = 2");
      h = make_quadratic_hamiltonian(1, 2, Eigen::MatrixXd::Identity(3, 3));
      break;
    }
    case ModelKind::FreeField:
      throw ScenarioError(name +
                          ": free-field has no strictly convex Hamiltonian; "
                          "this scenario supports residual and conservation checks only");
  }
  if (model.growth) {
    const double beta = model.growth->beta;
    const double gamma = model.growth->gamma;
    h.growth = GrowthMetadata{model.growth->delta, model.growth->alpha,
                              [beta](const Eigen::VectorXd&) { return beta; },
                              [gamma](const Eigen::VectorXd&) { return gamma; }};
  }
  return h;
}

SolveConfig Scenario::make_solve_config() const {
  if (!solve) {
    throw ScenarioError(name + ": scenario has no [solve] table");
  }
  SolveConfig cfg;
  cfg.max_iters = solve->max_iters;
  cfg.grad_tol = solve->grad_tol;
  cfg.optimizer = solve->optimizer;
  cfg.lbfgs_memory = solve->lbfgs_memory;
  cfg.seed = solve->seed;
  cfg.init = solve->init;
  cfg.init_kmax = solve->init_kmax;
  cfg.init_amplitude = solve->init_amplitude;
  cfg.newton_max_inner = solve->newton_max_inner;
  cfg.newton_inner_tol = solve->newton_inner_tol;
  return cfg;
}

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
  const Document doc = parse_document(text, origin);

  Scenario scenario;
  {
    Reader top(doc, "");
    scenario.name = top.word("name");
  }

  {
    Reader grid(doc, "grid");
    if (!grid.present()) {
      throw ScenarioError(origin + ": missing [grid] table");
    }
    scenario.periods = grid.numbers("periods");
    const std::vector<double> res = grid.numbers("resolution");
    if (res.size() != scenario.periods.size()) {
      throw ScenarioError(origin + ": grid.resolution and grid.periods must have equal length");
    }
    for (double r : res) {
      if (r < 4 || std::abs(r - std::round(r)) > 1e-9) {
        throw ScenarioError(origin + ": grid.resolution entries must be integers >= 4 nodes");
      }
      scenario.resolution.push_back(static_cast<std::size_t>(std::llround(r)));
    }
    for (double t : scenario.periods) {
      if (!(t > 0.0)) {
        throw ScenarioError(origin + ": grid.periods entries must be positive");
      }
    }
    scenario.scheme = parse_scheme(grid.word("scheme", std::string("central2")), origin);
    if (scenario.scheme == DerivativeScheme::Fourier) {
      for (std::size_t r : scenario.resolution) {
        if (r % 2 != 0) {
          throw ScenarioError(origin + ": the fourier scheme requires even grid.resolution");
        }
      }
    }
  }

  const int p = static_cast<int>(scenario.periods.size());

  {
    Reader model(doc, "model");
    if (!model.present()) {
      throw ScenarioError(origin + ": missing [model] table");
    }
    scenario.model.kind = parse_model_kind(model.word("kind"), origin);
    scenario.model.n = static_cast<int>(model.integer("n", 1));
    if (scenario.model.n < 1) {
      throw ScenarioError(origin + ": model.n must be >= 1");
    }
    const int m = phase_components(scenario.model.n, p);

    if (scenario.model.kind == ModelKind::Quadratic ||
        scenario.model.kind == ModelKind::TimeScaledQuadratic) {
      if (const auto diag = model.get<std::vector<double>>("diag")) {
        if (static_cast<int>(diag->size()) != m) {
          throw ScenarioError(origin + ": model.diag must have n+np entries");
        }
        scenario.model.matrix = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
          scenario.model.matrix(i, i) = (*diag)[static_cast<std::size_t>(i)];
        }
      } else if (const auto flat = model.get<std::vector<double>>("matrix")) {
        if (static_cast<int>(flat->size()) != m * m) {
          throw ScenarioError(origin + ": model.matrix must have (n+np)^2 row-major entries");
        }
        scenario.model.matrix = Eigen::MatrixXd(m, m);
        for (int r = 0; r < m; ++r) {
          for (int c = 0; c < m; ++c) {
            scenario.model.matrix(r, c) = (*flat)[static_cast<std::size_t>(r * m + c)];
          }
        }
      } else {
        throw ScenarioError(origin + ": quadratic models need model.diag or model.matrix");
      }
      scenario.model.offset = Eigen::VectorXd::Zero(m);
      if (const auto off = model.get<std::vector<double>>("offset")) {
        if (static_cast<int>(off->size()) != m) {
          throw ScenarioError(origin + ": model.offset must have n+np entries");
        }
        for (int i = 0; i < m; ++i) {
          scenario.model.offset[i] = (*off)[static_cast<std::size_t>(i)];
        }
      }
      if (scenario.model.kind == ModelKind::TimeScaledQuadratic) {
        scenario.model.scaling = model.word("scaling");
      }
    } else if (scenario.model.kind == ModelKind::QuarticRadial) {
      scenario.model.quartic_a = model.number("a", 1.0);
      scenario.model.quartic_b = model.number("b", 1.0);
    } else if (scenario.model.kind == ModelKind::HarmonicOscillator && scenario.model.n != 1) {
      throw ScenarioError(origin + ": harmonic-oscillator has n = 1");
    } else if (scenario.model.kind == ModelKind::Helmholtz && scenario.model.n != 1) {
      throw ScenarioError(origin + ": helmholtz has n = 1");
    }
  }

  {
    Reader growth(doc, "model.growth");
    if (growth.present()) {
      ScenarioGrowth g;
      g.delta = growth.number("delta");
      g.alpha = growth.number("alpha");
      g.beta = growth.number("beta", 0.0);
      g.gamma = growth.number("gamma", 0.0);
      g.c1 = growth.number("c1", 0.0);
      g.c2 = growth.number("c2", 0.0);
      if (!(g.delta > 0.0) || !(g.alpha > 0.0) || g.delta > g.alpha) {
        throw ScenarioError(origin + ": growth constants need 0 < delta <= alpha");
      }
      if (g.beta < 0.0 || g.gamma < 0.0) {
        throw ScenarioError(origin + ": growth beta and gamma must be nonnegative");
      }
      scenario.model.growth = g;
    }
  }

  {
    Reader top(doc, "");
    if (auto ref = top.get<std::string>("reference")) {
      scenario.reference = *ref;
    }
  }

  {
    Reader solve(doc, "solve");
    if (solve.present()) {
      ScenarioSolve s;
      s.optimizer = parse_optimizer(solve.word("optimizer", std::string("lbfgs")), origin);
      s.max_iters = static_cast<int>(solve.integer("max_iters", 500));
      s.grad_tol = solve.number("grad_tol", 1e-8);
      s.lbfgs_memory = static_cast<int>(solve.integer("lbfgs_memory", 10));
      s.seed = static_cast<std::uint64_t>(solve.integer("seed", 0));
      s.init = parse_init(solve.word("init", std::string("zero")), origin);
      s.init_kmax = static_cast<int>(solve.integer("init_kmax", 2));
      s.init_amplitude = solve.number("init_amplitude", 1.0);
      s.newton_max_inner = static_cast<int>(solve.integer("newton_max_inner", 400));
      s.newton_inner_tol = solve.number("newton_inner_tol", 1e-3);
      if (s.max_iters < 0) throw ScenarioError(origin + ": solve.max_iters must be >= 0");
      if (!(s.grad_tol > 0.0)) throw ScenarioError(origin + ": solve.grad_tol must be positive");
      scenario.solve = s;
    }
  }

  {
    Reader checks(doc, "check");
    if (checks.present()) {
      if (auto v = checks.get<double>("hamilton_residual")) scenario.checks.hamilton_residual = *v;
      if (auto v = checks.get<double>("mean_shift")) scenario.checks.mean_shift = *v;
      if (auto v = checks.get<double>("first_integral")) scenario.checks.first_integral = *v;
      if (auto v = checks.get<double>("divergence")) scenario.checks.divergence = *v;
    }
  }

  {
    Reader cc(doc, "conjugate_check");
    if (cc.present()) {
      ScenarioConjugateCheck c;
      c.samples = static_cast<int>(cc.integer("samples", 1000));
      c.box = cc.number("box", 2.0);
      c.seed = static_cast<std::uint64_t>(cc.integer("seed", 1));
      c.tol_value = cc.number("tol_value", 1e-9);
      c.tol_inverse = cc.number("tol_inverse", 1e-8);
      if (c.samples < 1) throw ScenarioError(origin + ": conjugate_check.samples must be >= 1");
      scenario.conjugate_check = c;
    }
  }

  {
    Reader sweep(doc, "sweep");
    if (sweep.present()) {
      ScenarioSweep s;
      for (double r : sweep.numbers("resolutions")) {
        if (r < 4 || std::abs(r - std::round(r)) > 1e-9) {
          throw ScenarioError(origin + ": sweep.resolutions entries must be integers >= 4 nodes");
        }
        s.resolutions.push_back(static_cast<std::size_t>(std::llround(r)));
      }
      if (s.resolutions.size() < 2) {
        throw ScenarioError(origin + ": sweep needs at least two resolutions");
      }
      s.expected_order = sweep.number("expected_order", 2.0);
      s.order_tol = sweep.number("order_tol", 0.2);
      scenario.sweep = s;
    }
  }

  reject_unknown(doc, {"", "grid", "model", "model.growth", "solve", "check", "conjugate_check",
                       "sweep"});

  return scenario;
}

Scenario parse_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.is_open()) {
    throw ScenarioError("cannot open scenario file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), path.filename().string());
}

}  // namespace dualact

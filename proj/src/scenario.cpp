#include "lightlike/scenario.hpp"

#include <fstream>
#include <random>
#include <sstream>

namespace lightlike::scenario {

namespace {

struct Line {
  int number = 0;
  std::string key;                  // first token
  std::vector<std::string> args;    // tokens between the key and '='
  std::string value;                // after '=', unquoted
  bool quoted = false;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ScenarioError("line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> tokens_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

double to_double(const Line& ln, const std::string& s) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) fail(ln.number, "bad number '" + s + "'");
    return v;
  } catch (const ScenarioError&) {
    throw;
  } catch (...) {
    fail(ln.number, "bad number '" + s + "'");
  }
}

long to_long(const Line& ln, const std::string& s) {
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) fail(ln.number, "bad integer '" + s + "'");
    return v;
  } catch (const ScenarioError&) {
    throw;
  } catch (...) {
    fail(ln.number, "bad integer '" + s + "'");
  }
}

bool to_bool(const Line& ln, const std::string& s) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  fail(ln.number, "bad boolean '" + s + "'");
}

// Parse one content line into key/args/value, handling quotes and comments.
std::optional<Line> scan_line(const std::string& raw, int number) {
  std::string s;
  bool in_quote = false;
  for (char c : raw) {
    if (c == '"') in_quote = !in_quote;
    if (c == '#' && !in_quote) break;
    s += c;
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  s = s.substr(b);
  if (s.empty()) return std::nullopt;

  Line ln;
  ln.number = number;
  if (s.front() == '[') {
    ln.key = s;
    return ln;
  }
  const auto eq = s.find('=');
  if (eq == std::string::npos) fail(number, "expected 'key = value'");
  std::vector<std::string> left = tokens_of(s.substr(0, eq));
  if (left.empty()) fail(number, "missing key before '='");
  ln.key = left.front();
  ln.args.assign(left.begin() + 1, left.end());
  std::string rhs = s.substr(eq + 1);
  std::size_t rb = 0;
  while (rb < rhs.size() && std::isspace(static_cast<unsigned char>(rhs[rb]))) ++rb;
  rhs = rhs.substr(rb);
  if (!rhs.empty() && rhs.front() == '"') {
    const auto close = rhs.find('"', 1);
    if (close == std::string::npos) fail(number, "unterminated quote");
    if (tokens_of(rhs.substr(close + 1)).size())
      fail(number, "trailing content after quoted value");
    ln.value = rhs.substr(1, close - 1);
    ln.quoted = true;
  } else {
    ln.value = rhs;
  }
  return ln;
}

std::vector<int> to_indices(const Line& ln) {
  std::vector<int> out;
  for (const auto& t : tokens_of(ln.value)) out.push_back(int(to_long(ln, t)));
  return out;
}

const std::vector<std::string> kBoolExpect = {
    "qgcr", "proper", "ascreen", "coscreen", "irrotational", "minimal",
    "metric_connection", "totally_geodesic", "integrable_D", "integrable_Dbar",
    "integrability_agree", "trace_agree", "gcr_note",
    "nearly_parallel_D", "nearly_auto_parallel_D",
    "nearly_parallel_Dbar", "nearly_auto_parallel_Dbar"};
const std::vector<std::string> kIndexExpect = {"d1", "d2", "d0", "l", "s"};
const std::vector<std::string> kZeroExpect = {
    "hl_max", "trace_max", "lemma_eta_max", "trace_AW_max", "hs_rad_max"};
const std::vector<std::string> kIntExpect = {"rank", "dim_phiL_phiD2"};
const std::vector<std::string> kExprExpect = {"sigma", "xi_a", "xi_b", "xi_c",
                                              "hs_w", "g_xi_xi"};

template <class C, class V>
bool contains(const C& c, const V& v) {
  return std::find(c.begin(), c.end(), v) != c.end();
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& name) {
  Scenario sc;
  sc.name = name;
  std::string section;
  std::istringstream is(text);
  std::string raw;
  int number = 0;
  while (std::getline(is, raw)) {
    ++number;
    auto maybe = scan_line(raw, number);
    if (!maybe) continue;
    Line ln = *maybe;
    if (ln.key.front() == '[') {
      if (ln.key == "[ambient]" || ln.key == "[immersion]" || ln.key == "[frames]" ||
          ln.key == "[samples]" || ln.key == "[tolerances]" || ln.key == "[expect]")
        section = ln.key;
      else
        fail(number, "unknown section " + ln.key);
      continue;
    }
    if (section.empty()) fail(number, "content before any section header");

    if (section == "[ambient]") {
      auto& a = sc.ambient;
      if (ln.key == "builtin") {
        a.builtin = true;
        a.builtin_name = ln.value;
      } else if (ln.key == "m") {
        a.m = int(to_long(ln, ln.value));
      } else if (ln.key == "q") {
        a.q = int(to_long(ln, ln.value));
      } else if (ln.key == "coords") {
        a.coords = tokens_of(ln.value);
      } else if (ln.key == "mu") {
        a.mu = to_double(ln, ln.value);
      } else if (ln.key == "metric") {
        if (ln.args.size() != 2) fail(number, "metric needs two coordinate names");
        if (a.coords.empty()) fail(number, "coords must come before metric entries");
        auto idx = [&](const std::string& n) {
          auto it = std::find(a.coords.begin(), a.coords.end(), n);
          if (it == a.coords.end()) fail(number, "unknown coordinate '" + n + "'");
          return int(it - a.coords.begin());
        };
        int i = idx(ln.args[0]), j = idx(ln.args[1]);
        if (i > j) std::swap(i, j);
        a.metric[{i, j}] = ln.value;
      } else if (ln.key == "phi") {
        if (ln.args.size() != 1) fail(number, "phi needs one coordinate name");
        auto it = std::find(a.coords.begin(), a.coords.end(), ln.args[0]);
        if (it == a.coords.end()) fail(number, "unknown coordinate '" + ln.args[0] + "'");
        a.phi_cols[int(it - a.coords.begin())] = ln.value;
      } else if (ln.key == "xi") {
        a.xi = ln.value;
      } else if (ln.key == "eta") {
        if (ln.args.size() != 1) fail(number, "eta needs one coordinate name");
        auto it = std::find(a.coords.begin(), a.coords.end(), ln.args[0]);
        if (it == a.coords.end()) fail(number, "unknown coordinate '" + ln.args[0] + "'");
        a.eta[int(it - a.coords.begin())] = ln.value;
      } else {
        fail(number, "unknown ambient key '" + ln.key + "'");
      }
    } else if (section == "[immersion]") {
      if (ln.key == "params") {
        sc.params = tokens_of(ln.value);
      } else {
        if (!ln.args.empty()) fail(number, "unexpected tokens after '" + ln.key + "'");
        sc.map_exprs[ln.key] = ln.value;
        sc.has_immersion = true;
      }
    } else if (section == "[frames]") {
      if (ln.key == "rad") sc.rad.push_back(ln.value);
      else if (ln.key == "screen") sc.screen.push_back(ln.value);
      else if (ln.key == "stransversal") sc.stransversal.push_back(ln.value);
      else fail(number, "unknown frames key '" + ln.key + "'");
    } else if (section == "[samples]") {
      if (ln.key == "point") {
        auto ts = tokens_of(ln.value);
        Eigen::VectorXd p(Eigen::Index(ts.size()));
        for (std::size_t i = 0; i < ts.size(); ++i) p[Eigen::Index(i)] = to_double(ln, ts[i]);
        sc.points.push_back(std::move(p));
      } else if (ln.key == "count") {
        sc.count = int(to_long(ln, ln.value));
      } else if (ln.key == "seed") {
        sc.seed = unsigned(to_long(ln, ln.value));
      } else if (ln.key == "box") {
        auto ts = tokens_of(ln.value);
        if (ts.size() != 2) fail(number, "box needs two numbers");
        std::pair<double, double> b{to_double(ln, ts[0]), to_double(ln, ts[1])};
        if (ln.args.empty())
          sc.global_box = b;
        else if (ln.args.size() == 1)
          sc.boxes[ln.args[0]] = b;
        else
          fail(number, "box takes at most one parameter name");
      } else {
        fail(number, "unknown samples key '" + ln.key + "'");
      }
    } else if (section == "[tolerances]") {
      const double v = to_double(ln, ln.value);
      if (ln.key == "rank") sc.tol.rank = v;
      else if (ln.key == "frame") sc.tol.frame = v;
      else if (ln.key == "classify") sc.tol.classify = v;
      else if (ln.key == "algebraic") sc.tol.algebraic = v;
      else if (ln.key == "structure") sc.tol.structure = v;
      else fail(number, "unknown tolerance '" + ln.key + "'");
    } else if (section == "[expect]") {
      Expectation e;
      e.key = ln.key;
      e.display = ln.key;
      for (const auto& a : ln.args) {
        e.args.push_back(int(to_long(ln, a)));
        e.display += " " + a;
      }
      if (contains(kBoolExpect, ln.key)) {
        e.kind = Expectation::Kind::boolean;
        e.bvalue = to_bool(ln, ln.value);
      } else if (contains(kIndexExpect, ln.key)) {
        e.kind = Expectation::Kind::indices;
        e.indices = to_indices(ln);
      } else if (contains(kZeroExpect, ln.key)) {
        e.kind = Expectation::Kind::zero;
      } else if (contains(kIntExpect, ln.key)) {
        e.kind = Expectation::Kind::integer;
        e.ivalue = to_long(ln, ln.value);
      } else if (contains(kExprExpect, ln.key)) {
        e.kind = Expectation::Kind::expr;
        e.expr = ln.value;
      } else {
        fail(number, "unknown expectation '" + ln.key + "'");
      }
      sc.expects.push_back(std::move(e));
    }
  }
  return sc;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str(), path);
}

ambient::AmbientStructure build_ambient(const Scenario& sc) {
  const auto& a = sc.ambient;
  if (a.builtin) {
    if (a.builtin_name == "cosymplectic") return ambient::builtin_cosymplectic(a.m, a.q);
    if (a.builtin_name == "sasakian") return ambient::builtin_sasakian(a.m, a.q);
    throw ScenarioError("unknown builtin ambient '" + a.builtin_name + "'");
  }
  ambient::AmbientStructure s;
  s.name = sc.name + " (custom ambient)";
  s.coords = a.coords;
  s.dim = Eigen::Index(a.coords.size());
  if (s.dim == 0 || s.dim % 2 == 0)
    throw ScenarioError("custom ambient needs an odd number of coordinates");
  s.mu = a.mu;
  auto zero = [&] { return make_constant(0.0, s.coords); };
  s.metric.assign(std::size_t(s.dim), std::vector<ScalarExpr>(std::size_t(s.dim), zero()));
  for (const auto& [ij, src] : a.metric) {
    ScalarExpr e = parse_scalar(src, s.coords);
    s.metric[std::size_t(ij.first)][std::size_t(ij.second)] = e;
    s.metric[std::size_t(ij.second)][std::size_t(ij.first)] = e;
  }
  s.phi.assign(std::size_t(s.dim), std::vector<ScalarExpr>(std::size_t(s.dim), zero()));
  for (const auto& [col, src] : a.phi_cols) {
    VectorField vf = parse_vector_field(src, s.coords, s.coords);
    for (Eigen::Index row = 0; row < s.dim; ++row)
      s.phi[std::size_t(row)][std::size_t(col)] = vf.comps[std::size_t(row)];
  }
  if (a.xi.empty()) throw ScenarioError("custom ambient needs xi");
  VectorField xf = parse_vector_field(a.xi, s.coords, s.coords);
  s.xi = xf.comps;
  s.eta.assign(std::size_t(s.dim), zero());
  if (!a.eta.empty()) {
    for (const auto& [i, src] : a.eta)
      s.eta[std::size_t(i)] = parse_scalar(src, s.coords);
  } else {
    // eta = g(xi, .) componentwise: eta_b = sum_a g_ab xi^a, built as an
    // expression tree so later evaluation needs no special casing.
    for (Eigen::Index b = 0; b < s.dim; ++b) {
      ScalarExpr acc = zero();
      bool any = false;
      for (Eigen::Index aa = 0; aa < s.dim; ++aa) {
        const ScalarExpr& gab = s.metric[std::size_t(aa)][std::size_t(b)];
        const ScalarExpr& xa = xf.comps[std::size_t(aa)];
        if (is_zero_constant(gab) || is_zero_constant(xa)) continue;
        ScalarExpr term = expr_mul(gab, xa);
        acc = any ? expr_add(acc, term) : term;
        any = true;
      }
      if (any) s.eta[std::size_t(b)] = acc;
    }
  }
  return s;
}

subm::Immersion build_immersion(const Scenario& sc,
                                const ambient::AmbientStructure& space) {
  subm::Immersion imm;
  if (sc.params.empty()) throw ScenarioError("[immersion] params is required");
  imm.params = sc.params;
  for (const auto& c : space.coords) {
    auto it = sc.map_exprs.find(c);
    if (it == sc.map_exprs.end())
      throw ScenarioError("immersion does not define coordinate '" + c + "'");
    imm.map.push_back(parse_scalar(it->second, imm.params));
  }
  for (const auto& [k, v] : sc.map_exprs)
    if (std::find(space.coords.begin(), space.coords.end(), k) == space.coords.end())
      throw ScenarioError("immersion defines unknown coordinate '" + k + "'");
  std::vector<std::string> combined = imm.params;
  combined.insert(combined.end(), space.coords.begin(), space.coords.end());
  auto F = [&](const std::string& src) {
    return parse_vector_field(src, combined, space.coords);
  };
  for (const auto& s : sc.rad) imm.declared_rad.push_back(F(s));
  for (const auto& s : sc.screen) imm.declared_screen.push_back(F(s));
  for (const auto& s : sc.stransversal) imm.declared_stransversal.push_back(F(s));
  return imm;
}

std::vector<Eigen::VectorXd> sample_points(const Scenario& sc, int count_override,
                                           long seed_override) {
  std::vector<Eigen::VectorXd> pts = sc.points;
  const Eigen::Index m = Eigen::Index(sc.params.size());
  for (const auto& p : pts)
    if (p.size() != m)
      throw ScenarioError("sample point has " + std::to_string(p.size()) +
                          " entries; expected " + std::to_string(m));
  const int count = count_override >= 0 ? count_override : sc.count;
  if (count > 0) {
    if (!sc.global_box && sc.boxes.empty())
      throw ScenarioError("[samples] count needs a box");
    std::mt19937_64 rng(seed_override >= 0 ? std::uint64_t(seed_override) : sc.seed);
    for (int t = 0; t < count; ++t) {
      Eigen::VectorXd p(m);
      for (Eigen::Index k = 0; k < m; ++k) {
        std::pair<double, double> box =
            sc.global_box.value_or(std::pair<double, double>{0.0, 1.0});
        auto it = sc.boxes.find(sc.params[std::size_t(k)]);
        if (it != sc.boxes.end()) box = it->second;
        std::uniform_real_distribution<double> u(box.first, box.second);
        p[k] = u(rng);
      }
      pts.push_back(std::move(p));
    }
  }
  if (pts.empty()) throw ScenarioError("no sample points given");
  return pts;
}

}  // namespace lightlike::scenario

#include "rotshock/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rotshock/error.hpp"

namespace rotshock {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::Config, path + ": " + what);
}

// Reads one JSON object, remembering which keys were consumed so that unknown
// ones can be reported with their full path.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& k) const { return j_.contains(k); }
  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  const json* get(const std::string& k) {
    seen_.insert(k);
    auto it = j_.find(k);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class T>
  void read(const std::string& k, T& out) {
    const json* v = get(k);
    if (!v) return;
    try {
      out = v->get<T>();
    } catch (const json::exception& e) {
      fail(key(k), std::string("wrong type (") + e.what() + ")");
    }
  }

  double number(const std::string& k, double def) {
    const json* v = get(k);
    if (!v) return def;
    if (!v->is_number()) fail(key(k), "expected a number");
    return v->get<double>();
  }

  int integer(const std::string& k, int def) {
    const json* v = get(k);
    if (!v) return def;
    if (!v->is_number_integer()) fail(key(k), "expected an integer");
    return v->get<int>();
  }

  bool boolean(const std::string& k, bool def) {
    const json* v = get(k);
    if (!v) return def;
    if (!v->is_boolean()) fail(key(k), "expected true or false");
    return v->get<bool>();
  }

  std::optional<Section> sub(const std::string& k) {
    const json* v = get(k);
    if (!v) return std::nullopt;
    return Section(*v, key(k));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(key(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ProfileSpec read_profile(const json& v, const std::string& path) {
  ProfileSpec p;
  if (v.is_number()) {
    p.poly = {v.get<double>()};
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) fail(path, "polynomial coefficients must be numbers");
      p.poly.push_back(x.get<double>());
    }
  } else if (v.is_object()) {
    Section s(v, path);
    if (const json* t = s.get("table")) {
      if (!t->is_string()) fail(path + ".table", "expected a file path");
      p.table = t->get<std::string>();
    }
    if (const json* c = s.get("poly")) {
      if (!p.table.empty()) fail(path, "give either poly or table, not both");
      p = read_profile(*c, path + ".poly");
    }
    s.finish();
    if (p.table.empty() && p.poly.empty()) fail(path, "empty profile");
  } else {
    fail(path, "expected a number, a coefficient array or {\"table\": path}");
  }
  return p;
}

void profile(Section& s, const std::string& k, ProfileSpec& out) {
  if (const json* v = s.get(k)) out = read_profile(*v, s.key(k));
}

json write_profile(const ProfileSpec& p) {
  if (!p.table.empty()) return json{{"table", p.table}};
  return json(p.poly.empty() ? std::vector<double>{0.0} : p.poly);
}

RunConfig from_json(const json& j, const std::filesystem::path& base) {
  RunConfig c;
  c.base_dir = base;
  Section root(j, "");
  if (!root.has("schema")) fail("schema", "missing required key");
  c.schema = root.integer("schema", 1);
  if (c.schema != 1) fail("schema", "unsupported version " + std::to_string(c.schema));

  if (auto s = root.sub("gas")) {
    c.gamma = s->number("gamma", c.gamma);
    c.beta = s->number("beta", c.beta);
    s->finish();
  }
  if (auto s = root.sub("nozzle")) {
    c.L = s->number("L", c.L);
    c.sigma = s->number("sigma", c.sigma);
    profile(*s, "g", c.g);
    s->finish();
  }
  if (auto s = root.sub("upstream")) {
    profile(*s, "u_minus", c.u_minus);
    c.M_top = s->number("M_top", c.M_top);
    c.P_top = s->number("P_top", c.P_top);
    s->finish();
  }
  if (auto s = root.sub("perturbation")) {
    profile(*s, "u1_en", c.u1_en);
    profile(*s, "u2_en", c.u2_en);
    profile(*s, "S_en", c.S_en);
    profile(*s, "B_en", c.B_en);
    profile(*s, "P_ex", c.P_ex);
    s->finish();
  }
  if (auto s = root.sub("solver")) {
    auto& v = c.solver;
    v.nx = s->integer("nx", v.nx);
    v.ny = s->integer("ny", v.ny);
    v.tol_fp = s->number("tol_fp", v.tol_fp);
    v.tol_res = s->number("tol_res", v.tol_res);
    v.max_iter = s->integer("max_iter", v.max_iter);
    v.defect_tol = s->number("defect_tol", v.defect_tol);
    if (const json* b = s->get("psi_bracket"); b && !b->is_null()) {
      if (!b->is_array() || b->size() != 2 || !(*b)[0].is_number() || !(*b)[1].is_number()) {
        fail(s->key("psi_bracket"), "expected [a, b] or null");
      }
      v.psi_bracket = std::make_pair((*b)[0].get<double>(), (*b)[1].get<double>());
    }
    v.bracket_fraction = s->number("bracket_fraction", v.bracket_fraction);
    v.trust_factor = s->number("trust_factor", v.trust_factor);
    v.psi_bar_unperturbed = s->number("psi_bar_unperturbed", v.psi_bar_unperturbed);
    v.background_nodes = s->integer("background_nodes", v.background_nodes);
    s->finish();
  }
  if (auto s = root.sub("output")) {
    s->read("dir", c.output.dir);
    c.output.dump_fields = s->boolean("dump_fields", c.output.dump_fields);
    s->finish();
  }
  root.finish();

  // Invariants that do not need the background.
  const auto& v = c.solver;
  if (!(c.gamma > 1.0)) fail("gas.gamma", "must exceed 1");
  if (!(c.L > 0.0)) fail("nozzle.L", "must be positive");
  if (!(c.sigma >= 0.0)) fail("nozzle.sigma", "must be non-negative");
  if (v.nx < 9 || v.ny < 9) fail("solver.nx", "grid needs at least 9 nodes per direction");
  if (!(v.tol_fp > 0.0)) fail("solver.tol_fp", "must be positive");
  if (!(v.tol_res > 0.0)) fail("solver.tol_res", "must be positive");
  if (v.max_iter < 1) fail("solver.max_iter", "must be at least 1");
  if (v.psi_bracket && !(v.psi_bracket->first >= 0.0 && v.psi_bracket->second <= c.L &&
                         v.psi_bracket->first < v.psi_bracket->second)) {
    fail("solver.psi_bracket", "must satisfy 0 <= a < b <= L");
  }
  if (!(v.bracket_fraction > 0.0 && v.bracket_fraction < 1.0)) {
    fail("solver.bracket_fraction", "must lie in (0, 1)");
  }
  if (!(v.psi_bar_unperturbed > 0.0 && v.psi_bar_unperturbed < 1.0)) {
    fail("solver.psi_bar_unperturbed", "must lie in (0, 1)");
  }
  if (v.background_nodes < 65) fail("solver.background_nodes", "must be at least 65");
  for (const auto* p : {&c.g, &c.u_minus, &c.u1_en, &c.u2_en, &c.S_en, &c.B_en, &c.P_ex}) {
    if (!p->table.empty() && !std::filesystem::exists(base / p->table)) {
      fail("profile table", "file not found: " + (base / p->table).string());
    }
  }
  if (c.g.table.empty()) {
    const auto& k = c.g.poly;
    for (std::size_t i = 0; i < k.size() && i < 4; ++i) {
      if (k[i] != 0.0) fail("nozzle.g", "coefficients of order 0 to 3 must vanish");
    }
  }
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["schema"] = c.schema;
  j["gas"] = {{"gamma", c.gamma}, {"beta", c.beta}};
  j["nozzle"] = {{"L", c.L}, {"sigma", c.sigma}, {"g", write_profile(c.g)}};
  j["upstream"] = {{"u_minus", write_profile(c.u_minus)}, {"M_top", c.M_top}, {"P_top", c.P_top}};
  j["perturbation"] = {{"u1_en", write_profile(c.u1_en)}, {"u2_en", write_profile(c.u2_en)},
                       {"S_en", write_profile(c.S_en)},   {"B_en", write_profile(c.B_en)},
                       {"P_ex", write_profile(c.P_ex)}};
  const auto& v = c.solver;
  json s = {{"nx", v.nx},
            {"ny", v.ny},
            {"tol_fp", v.tol_fp},
            {"tol_res", v.tol_res},
            {"max_iter", v.max_iter},
            {"defect_tol", v.defect_tol},
            {"bracket_fraction", v.bracket_fraction},
            {"trust_factor", v.trust_factor},
            {"psi_bar_unperturbed", v.psi_bar_unperturbed},
            {"background_nodes", v.background_nodes}};
  s["psi_bracket"] = v.psi_bracket ? json::array({v.psi_bracket->first, v.psi_bracket->second})
                                   : json(nullptr);
  j["solver"] = s;
  j["output"] = {{"dir", c.output.dir}, {"dump_fields", c.output.dump_fields}};
  return j;
}

ProfileSpec normalized(const ProfileSpec& p) {
  return p.table.empty() && p.poly.empty() ? ProfileSpec::polynomial({0.0}) : p;
}

}  // namespace

Profile ProfileSpec::build(const std::filesystem::path& base) const {
  if (!table.empty()) return Profile::table_csv((base / table).string());
  if (poly.empty()) return Profile();
  return Profile::poly(poly);
}

bool RunConfig::operator==(const RunConfig& o) const {
  const auto same = [](const ProfileSpec& a, const ProfileSpec& b) {
    return normalized(a) == normalized(b);
  };
  return schema == o.schema && gamma == o.gamma && beta == o.beta && L == o.L &&
         sigma == o.sigma && same(g, o.g) && same(u_minus, o.u_minus) && M_top == o.M_top &&
         P_top == o.P_top && same(u1_en, o.u1_en) && same(u2_en, o.u2_en) &&
         same(S_en, o.S_en) && same(B_en, o.B_en) && same(P_ex, o.P_ex) && solver == o.solver &&
         output == o.output;
}

RunConfig parse_config_string(const std::string& text, const std::filesystem::path& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("malformed JSON: ") + e.what());
  }
  return from_json(j, base);
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str(), path.parent_path());
}

std::string serialize(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

RunConfig with_override(const RunConfig& c, const std::string& key, const std::string& value) {
  json j = to_json(c);
  json v;
  try {
    v = json::parse(value);
  } catch (const json::parse_error&) {
    throw Error(ErrorKind::Config, key + ": value is not valid JSON: " + value);
  }
  json* node = &j;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw Error(ErrorKind::Config, "empty override key");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i])) fail(key, "unknown key");
    node = &(*node)[parts[i]];
  }
  if (!node->is_object() || !node->contains(parts.back())) fail(key, "unknown key");
  (*node)[parts.back()] = v;
  return from_json(j, c.base_dir);
}

Problem build_problem(const RunConfig& c) {
  GasModel gas{c.gamma, c.beta};
  UpstreamSpec up;
  up.u_minus = c.u_minus.build(c.base_dir);
  up.M_top = c.M_top;
  up.P_top = c.P_top;
  Geometry geo;
  geo.L = c.L;
  geo.sigma = c.sigma;
  geo.g = c.g.build(c.base_dir);
  Perturbation p;
  p.u1_en = c.u1_en.build(c.base_dir);
  p.u2_en = c.u2_en.build(c.base_dir);
  p.S_en = c.S_en.build(c.base_dir);
  p.B_en = c.B_en.build(c.base_dir);
  p.P_ex = c.P_ex.build(c.base_dir);
  return Problem::build(gas, up, geo, p, static_cast<std::size_t>(c.solver.background_nodes));
}

ShockfitOptions shockfit_options(const RunConfig& c) {
  ShockfitOptions o;
  o.sup.nx = c.solver.nx;
  o.sup.ny = c.solver.ny;
  o.defect_tol = c.solver.defect_tol;
  o.bracket = c.solver.psi_bracket;
  o.bracket_fraction = c.solver.bracket_fraction;
  o.psi_bar_unperturbed = c.solver.psi_bar_unperturbed * c.L;
  return o;
}

RunOptions run_options(const RunConfig& c) {
  RunOptions o;
  o.shock = shockfit_options(c);
  o.iter.tol_fp = c.solver.tol_fp;
  o.iter.max_iter = c.solver.max_iter;
  o.iter.trust_factor = c.solver.trust_factor;
  o.iter.defect_tol = c.solver.defect_tol;
  return o;
}

}  // namespace rotshock

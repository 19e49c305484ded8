#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fractail/error.hpp"

namespace fractail::cli {

namespace {

using json = nlohmann::json;

[[noreturn]] void config_error(const std::string& field, const std::string& message) {
  fail(ErrorCode::ConfigError, field + ": " + message);
}

// Object view that remembers which keys were read; finish() rejects the rest.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) config_error(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    if (!j_.contains(key)) config_error(at(key), "required field is missing");
    used_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_number()) config_error(at(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) config_error(at(key), "must be finite");
    return d;
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  long long integer(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_number_integer()) config_error(at(key), "expected an integer");
    return v.get<long long>();
  }
  long long integer(const std::string& key, long long fallback) { return has(key) ? integer(key) : fallback; }

  std::size_t count(const std::string& key, std::size_t minimum) {
    const long long v = integer(key);
    if (v < static_cast<long long>(minimum)) config_error(at(key), "must be at least " + std::to_string(minimum));
    return static_cast<std::size_t>(v);
  }
  std::size_t count(const std::string& key, std::size_t minimum, std::size_t fallback) {
    return has(key) ? count(key, minimum) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_boolean()) config_error(at(key), "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_string()) config_error(at(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_array()) config_error(at(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) config_error(at(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  Fields object(const std::string& key) { return Fields(raw(key), at(key)); }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!used_.count(key)) config_error(at(key), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Experiment parse_experiment(const std::string& s, const std::string& field) {
  static const std::vector<std::pair<std::string, Experiment>> names{
      {"forward", Experiment::Forward},           {"tail", Experiment::Tail},
      {"extract", Experiment::Extract},           {"scalar", Experiment::Scalar},
      {"uniqueness", Experiment::Uniqueness},     {"heat-contrast", Experiment::HeatContrast},
      {"mlf-table", Experiment::MlfTable}};
  for (const auto& [n, e] : names) {
    if (n == s) return e;
  }
  config_error(field, "unknown experiment '" + s +
                          "' (forward, tail, extract, scalar, uniqueness, heat-contrast, mlf-table)");
}

FunctionSpec parse_function(Fields f) {
  FunctionSpec out;
  const bool poly = f.has("polynomial"), table = f.has("table"), constant = f.has("constant");
  if (poly + table + constant != 1) config_error(f.at("<kind>"), "give exactly one of polynomial, table, constant");
  if (constant) out.polynomial = {f.number("constant")};
  if (poly) {
    out.polynomial = f.numbers("polynomial");
    if (out.polynomial.empty()) config_error(f.at("polynomial"), "needs at least one coefficient");
  }
  if (table) {
    auto t = f.object("table");
    out.table_x = t.numbers("x");
    out.table_values = t.numbers("values");
    t.finish();
    if (out.table_x.size() != out.table_values.size() || out.table_x.size() < 2) {
      config_error(f.at("table"), "x and values need equal length, at least 2");
    }
    for (std::size_t i = 1; i < out.table_x.size(); ++i) {
      if (!(out.table_x[i] > out.table_x[i - 1])) config_error(f.at("table.x"), "must increase strictly");
    }
  }
  f.finish();
  return out;
}

GridSpec parse_grid(Fields f) {
  GridSpec g;
  g.t_min = f.number("t_min");
  g.t_max = f.number("t_max");
  g.points_per_decade = static_cast<int>(f.count("points_per_decade", 1, 16));
  if (!(g.t_min > 0.0)) config_error(f.at("t_min"), "must be positive");
  if (!(g.t_max > g.t_min)) config_error(f.at("t_max"), "must exceed t_min");
  f.finish();
  return g;
}

ProfileSpec parse_profile(Fields f) {
  ProfileSpec p;
  if (f.has("modal") == f.has("function")) config_error(f.at("<kind>"), "give exactly one of modal, function");
  if (f.has("modal")) {
    p.modal = f.numbers("modal");
    if (p.modal.empty()) config_error(f.at("modal"), "needs at least one coefficient");
  } else {
    p.function = parse_function(f.object("function"));
  }
  f.finish();
  return p;
}

MuSpec parse_mu(Fields f, double t0) {
  MuSpec mu;
  const int kinds = f.has("constant") + f.has("polynomial") + f.has("segments") + f.has("samples");
  if (kinds != 1) config_error(f.at("<kind>"), "give exactly one of constant, polynomial, segments, samples");
  if (f.has("constant")) {
    mu.kind = MuSpec::Kind::Constant;
    mu.constant = f.number("constant");
  } else if (f.has("polynomial")) {
    mu.kind = MuSpec::Kind::Polynomial;
    mu.polynomial = f.numbers("polynomial");
    if (mu.polynomial.empty()) config_error(f.at("polynomial"), "needs at least one coefficient");
  } else if (f.has("segments")) {
    mu.kind = MuSpec::Kind::Segments;
    const auto& arr = f.raw("segments");
    if (!arr.is_array() || arr.empty()) config_error(f.at("segments"), "expected a non-empty array");
    double expect = 0.0;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Fields s(arr[i], f.at("segments") + "[" + std::to_string(i) + "]");
      MuSpec::Segment seg{s.number("begin"), s.number("end"), s.numbers("coeffs")};
      if (std::abs(seg.begin - expect) > 1e-12 * std::max(1.0, t0)) {
        config_error(s.at("begin"), "segments must be contiguous from 0");
      }
      if (!(seg.end > seg.begin)) config_error(s.at("end"), "must exceed begin");
      s.finish();
      expect = seg.end;
      mu.segments.push_back(std::move(seg));
    }
    if (std::abs(expect - t0) > 1e-12 * std::max(1.0, t0)) config_error(f.at("segments"), "must end at source.t0");
  } else {
    mu.kind = MuSpec::Kind::Samples;
    auto s = f.object("samples");
    mu.sample_t = s.numbers("t");
    mu.sample_values = s.numbers("values");
    s.finish();
    if (mu.sample_t.size() != mu.sample_values.size() || mu.sample_t.size() < 2) {
      config_error(f.at("samples"), "t and values need equal length, at least 2");
    }
    if (mu.sample_t.front() != 0.0) config_error(f.at("samples.t"), "must start at 0");
    if (std::abs(mu.sample_t.back() - t0) > 1e-12 * std::max(1.0, t0)) {
      config_error(f.at("samples.t"), "must end at source.t0");
    }
  }
  f.finish();
  return mu;
}

OperatorSpec parse_operator(Fields f) {
  OperatorSpec op;
  const std::string kind = f.text("kind");
  op.length = f.number("length", 1.0);
  if (!(op.length > 0.0)) config_error(f.at("length"), "must be positive");
  op.modes = f.count("modes", 1, 16);
  if (kind == "laplacian") {
    op.kind = OperatorSpec::Kind::Laplacian;
    op.grid_points = f.count("grid_points", 3, 1025);
  } else if (kind == "sturm-liouville") {
    op.kind = OperatorSpec::Kind::SturmLiouville;
    op.interior_points = f.count("interior_points", 3, 1000);
    op.a = parse_function(f.object("a"));
    op.c = f.has("c") ? parse_function(f.object("c")) : FunctionSpec{{0.0}, {}, {}};
    if (op.modes > op.interior_points) config_error(f.at("modes"), "cannot exceed interior_points");
  } else {
    config_error(f.at("kind"), "expected laplacian or sturm-liouville");
  }
  f.finish();
  return op;
}

ObservationCfg parse_observation(Fields f) {
  ObservationCfg o;
  const std::string kind = f.text("kind");
  if (kind == "interior") {
    o.kind = ObservationCfg::Kind::Interior;
    o.begin = f.number("begin");
    o.end = f.number("end");
    if (!(o.end > o.begin)) config_error(f.at("end"), "must exceed begin");
    auto tf = f.object("test_function");
    if (tf.has("mode")) {
      o.test_mode = tf.count("mode", 1);
      tf.finish();
    } else {
      o.test_function = parse_function(std::move(tf));
    }
  } else if (kind == "flux") {
    o.kind = ObservationCfg::Kind::Flux;
    o.left = f.number("left", 0.0);
    o.right = f.number("right", 0.0);
    if (o.left == 0.0 && o.right == 0.0) config_error(f.at("left"), "flux weights are both zero");
  } else {
    config_error(f.at("kind"), "expected interior or flux");
  }
  f.finish();
  return o;
}

void set_tolerance_defaults(Scenario& s) {
  std::map<std::string, double> d;
  switch (s.experiment) {
    case Experiment::Forward: d = {{"route_consistency", 1e-10}}; break;
    case Experiment::Tail: d = {{"slope_rel", 0.05}}; break;
    case Experiment::Extract: d = {{"A1_rel", 1e-4}, {"a_rel", 1e-2}}; break;
    case Experiment::Scalar: d = {{"moment_rel", 0.01}, {"offset_rel", 1e-6}}; break;
    case Experiment::Uniqueness: d = {{"exponent_rel", 0.05}}; break;
    case Experiment::HeatContrast: d = {{"r_squared", 0.999}, {"slope_rel", 0.01}, {"engineered_orders", 6.0}}; break;
    case Experiment::MlfTable: d = {{"max_rel_error", 1e-10}}; break;
  }
  for (const auto& [k, v] : s.tolerances) {
    if (!d.count(k)) config_error("tolerances." + k, std::string("not a tolerance of experiment ") + to_string(s.experiment));
    d[k] = v;
  }
  s.tolerances = d;
}

void parse_block(Scenario& s, Fields& root) {
  const char* name = nullptr;
  switch (s.experiment) {
    case Experiment::Forward: name = "forward"; break;
    case Experiment::Tail: name = "tail"; break;
    case Experiment::Extract: name = "extract"; break;
    case Experiment::Scalar: name = "scalar"; break;
    case Experiment::Uniqueness: name = "uniqueness"; break;
    case Experiment::HeatContrast: name = "heat_contrast"; break;
    case Experiment::MlfTable: name = "mlf_table"; break;
  }
  if (!root.has(name)) {
    if (s.experiment == Experiment::Forward) return;
    config_error(name, "required block for this experiment is missing");
  }
  Fields b = root.object(name);
  switch (s.experiment) {
    case Experiment::Forward:
      s.forward_modes = b.count("modes", 1, 0);
      break;
    case Experiment::Tail:
    case Experiment::Extract:
      s.K = static_cast<int>(b.count("K", 1));
      s.M = static_cast<int>(b.count("M", 0));
      if (b.has("pairings")) {
        s.pairings = b.numbers("pairings");
        if (s.pairings.empty()) config_error(b.at("pairings"), "needs at least one value");
      }
      if (s.experiment == Experiment::Extract) s.recover_modes = b.count("recover_modes", 1, 0);
      break;
    case Experiment::Scalar:
      s.M = static_cast<int>(b.count("M", 0));
      s.offset = b.number("offset", 0.0);
      break;
    case Experiment::Uniqueness:
      s.f1 = parse_profile(b.object("f1"));
      s.f2 = parse_profile(b.object("f2"));
      s.K = static_cast<int>(b.count("K", 1, 4));
      s.M = static_cast<int>(b.count("M", 0, 4));
      s.recover_modes = b.count("recover_modes", 0, 3);
      break;
    case Experiment::HeatContrast: {
      const auto modes = b.numbers("modes");
      if (modes.empty()) config_error(b.at("modes"), "needs at least one mode");
      for (double m : modes) {
        if (m < 1 || m != std::floor(m)) config_error(b.at("modes"), "modes are 1-based integers");
        s.contrast_modes.push_back(static_cast<std::size_t>(m));
      }
      s.fractional_alpha = b.number("fractional_alpha", 0.5);
      if (!(s.fractional_alpha > 0.0 && s.fractional_alpha < 2.0) || s.fractional_alpha == 1.0) {
        config_error(b.at("fractional_alpha"), "must lie in (0, 2) and differ from 1");
      }
      s.engineered = b.boolean("engineered", false);
      break;
    }
    case Experiment::MlfTable:
      s.beta = b.number("beta", s.alpha);
      if (!(s.beta > 0.0)) config_error(b.at("beta"), "must be positive");
      s.eta = parse_grid(b.object("eta"));
      break;
  }
  b.finish();
}

}  // namespace

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::Forward: return "forward";
    case Experiment::Tail: return "tail";
    case Experiment::Extract: return "extract";
    case Experiment::Scalar: return "scalar";
    case Experiment::Uniqueness: return "uniqueness";
    case Experiment::HeatContrast: return "heat-contrast";
    case Experiment::MlfTable: return "mlf-table";
  }
  return "?";
}

double FunctionSpec::operator()(double x) const {
  if (!polynomial.empty()) {
    double v = 0.0;
    for (auto it = polynomial.rbegin(); it != polynomial.rend(); ++it) v = v * x + *it;
    return v;
  }
  if (x <= table_x.front()) return table_values.front();
  if (x >= table_x.back()) return table_values.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(table_x.begin(), table_x.end(), x) - table_x.begin());
  const double w = (x - table_x[hi - 1]) / (table_x[hi] - table_x[hi - 1]);
  return (1.0 - w) * table_values[hi - 1] + w * table_values[hi];
}

Scenario parse_scenario(const std::string& text, const std::string& path) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    config_error("<file>", std::string("not valid JSON: ") + e.what());
  }
  Scenario s;
  s.path = path;
  s.digest = fnv1a_hex(text);
  Fields root(j, "");
  s.experiment = parse_experiment(root.text("experiment"), "experiment");
  const bool needs_domain = s.experiment != Experiment::MlfTable;
  const bool needs_observation = s.experiment == Experiment::Tail || s.experiment == Experiment::Extract ||
                                 s.experiment == Experiment::Uniqueness;

  s.alpha = root.number("alpha");
  if (s.experiment == Experiment::HeatContrast) {
    if (s.alpha != 1.0) config_error("alpha", "heat-contrast compares against alpha = 1; set heat_contrast.fractional_alpha");
  } else if (!(s.alpha > 0.0 && s.alpha < 2.0) || std::abs(s.alpha - 1.0) <= 1e-9) {
    config_error("alpha", "must lie in (0, 2) and differ from 1");
  }

  if (needs_domain) {
    if (s.experiment != Experiment::Scalar) s.op = parse_operator(root.object("operator"));
    auto src = root.object("source");
    s.t0 = src.number("t0");
    if (!(s.t0 > 0.0)) config_error("source.t0", "must be positive");
    s.mu = parse_mu(src.object("mu"), s.t0);
    if (src.has("profile")) s.profile = parse_profile(src.object("profile"));
    src.finish();
    s.grid = parse_grid(root.object("time_grid"));
    if (!(s.grid->t_min > s.t0)) {
      config_error("time_grid.t_min", "must exceed source.t0 (tail times lie after the source support)");
    }
  }
  if (root.has("observation")) {
    if (s.experiment == Experiment::Scalar || !needs_domain) config_error("observation", "not used by this experiment");
    s.observation = parse_observation(root.object("observation"));
  }
  if (root.has("noise")) {
    auto n = root.object("noise");
    s.noise.level = n.number("level", 0.0);
    if (s.noise.level < 0.0) config_error("noise.level", "must be non-negative");
    s.noise.rng_seed = static_cast<std::uint64_t>(n.integer("rng_seed", 1));
    n.finish();
  }
  if (root.has("tolerances")) {
    auto t = root.object("tolerances");
    for (const auto& [k, v] : root.raw("tolerances").items()) {
      s.tolerances[k] = t.number(k);
      if (!(s.tolerances[k] > 0.0)) config_error(t.at(k), "must be positive");
    }
    t.finish();
  }
  if (root.has("output")) {
    auto o = root.object("output");
    s.output_dir = o.text("dir");
    o.finish();
  }
  parse_block(s, root);
  root.finish();

  if (needs_observation && !s.observation && s.pairings.empty() && s.experiment != Experiment::Uniqueness) {
    config_error("observation", "needed to form pairings (or give explicit pairings)");
  }
  if (s.experiment == Experiment::Uniqueness && !s.observation) config_error("observation", "required for uniqueness");
  if ((s.experiment == Experiment::Tail || s.experiment == Experiment::Extract) && s.pairings.empty() && !s.profile) {
    config_error("source.profile", "needed to form pairings (or give explicit pairings)");
  }
  if (s.op && !s.pairings.empty() && s.pairings.size() > s.op->modes) {
    config_error("pairings", "more pairings than operator modes");
  }
  if (s.op) {
    for (std::size_t m : s.contrast_modes) {
      if (m > s.op->modes) config_error("heat_contrast.modes", "mode beyond operator.modes");
    }
    if (s.forward_modes > s.op->modes) config_error("forward.modes", "cannot exceed operator.modes");
  }
  set_tolerance_defaults(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("<file>", "cannot open scenario '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

}  // namespace fractail::cli

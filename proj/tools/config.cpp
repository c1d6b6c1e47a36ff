#include "emlab/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "emlab/error.hpp"

namespace emlab::cli {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::Config, msg); }

std::string where(const YAML::Node& node, const std::string& source) {
  const auto mark = node.Mark();
  if (mark.line < 0) return source;
  return source + ":" + std::to_string(mark.line + 1);
}

// Map node reader that remembers which keys were consumed, so leftovers can
// be reported as unknown.
class Section {
 public:
  Section(YAML::Node node, std::string path, std::string source)
      : node_(std::move(node)), path_(std::move(path)), source_(std::move(source)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      fail(where(node_, source_) + ": '" + path_ + "' must be a mapping");
    }
  }

  bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    return node_[key];
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    out = convert<T>(raw(key), name(key));
  }

  Section sub(const std::string& key) {
    seen_.insert(key);
    return Section(has(key) ? node_[key] : YAML::Node(), name(key), source_);
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const std::string& source() const { return source_; }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) {
        fail(where(kv.first, source_) + ": unknown key '" + name(key) + "'");
      }
    }
  }

  template <class T>
  T convert(const YAML::Node& node, const std::string& what) const;

 private:
  YAML::Node node_;
  std::string path_;
  std::string source_;
  std::set<std::string> seen_;
};

double parse_real(const YAML::Node& node, const std::string& what, const std::string& source) {
  if (!node.IsScalar()) fail(where(node, source) + ": '" + what + "' must be a number");
  const std::string text = node.Scalar();
  if (text == "inf" || text == ".inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    fail(where(node, source) + ": '" + what + "' must be a number, got '" + text + "'");
  }
}

template <>
double Section::convert<double>(const YAML::Node& node, const std::string& what) const {
  return parse_real(node, what, source_);
}

template <>
int Section::convert<int>(const YAML::Node& node, const std::string& what) const {
  try {
    return node.as<int>();
  } catch (const YAML::Exception&) {
    fail(where(node, source_) + ": '" + what + "' must be an integer");
  }
}

template <>
std::uint64_t Section::convert<std::uint64_t>(const YAML::Node& node, const std::string& what) const {
  try {
    return node.as<std::uint64_t>();
  } catch (const YAML::Exception&) {
    fail(where(node, source_) + ": '" + what + "' must be an unsigned integer");
  }
}

template <>
bool Section::convert<bool>(const YAML::Node& node, const std::string& what) const {
  try {
    return node.as<bool>();
  } catch (const YAML::Exception&) {
    fail(where(node, source_) + ": '" + what + "' must be true or false");
  }
}

template <>
std::string Section::convert<std::string>(const YAML::Node& node, const std::string& what) const {
  if (!node.IsScalar()) fail(where(node, source_) + ": '" + what + "' must be a string");
  return node.Scalar();
}

template <class T>
std::vector<T> as_list(const Section& s, const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence()) fail(where(node, s.source()) + ": '" + what + "' must be a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(s.convert<T>(node[i], what + "[" + std::to_string(i) + "]"));
  }
  return out;
}

template <>
std::vector<int> Section::convert<std::vector<int>>(const YAML::Node& node, const std::string& what) const {
  return as_list<int>(*this, node, what);
}

template <>
std::vector<std::string> Section::convert<std::vector<std::string>>(const YAML::Node& node,
                                                                    const std::string& what) const {
  return as_list<std::string>(*this, node, what);
}

template <>
Vec3 Section::convert<Vec3>(const YAML::Node& node, const std::string& what) const {
  const auto v = as_list<double>(*this, node, what);
  if (v.size() != 3) fail(where(node, source_) + ": '" + what + "' needs 3 entries");
  return {v[0], v[1], v[2]};
}

template <>
std::array<int, 3> Section::convert<std::array<int, 3>>(const YAML::Node& node, const std::string& what) const {
  const auto v = as_list<int>(*this, node, what);
  if (v.size() != 3) fail(where(node, source_) + ": '" + what + "' needs 3 entries");
  return {v[0], v[1], v[2]};
}

template <>
FitWindow Section::convert<FitWindow>(const YAML::Node& node, const std::string& what) const {
  const auto v = as_list<double>(*this, node, what);
  if (v.size() != 2 || !(v[0] >= 0.0 && v[1] > v[0])) {
    fail(where(node, source_) + ": '" + what + "' must be [t0, t1] with 0 <= t0 < t1");
  }
  return {v[0], v[1]};
}

// Runs fn on each mapping in a list, with unknown-key checking per entry.
template <class Fn>
void each_entry(Section& parent, const std::string& key, Fn fn) {
  if (!parent.has(key)) return;
  const YAML::Node list = parent.raw(key);
  const std::string what = parent.name(key);
  if (!list.IsSequence()) fail(where(list, parent.source()) + ": '" + what + "' must be a list");
  for (std::size_t i = 0; i < list.size(); ++i) {
    Section entry(list[i], what + "[" + std::to_string(i) + "]", parent.source());
    fn(entry, list[i]);
    entry.finish();
  }
}

template <class T, class Parse>
T parse_enum(Section& s, const std::string& key, T fallback, Parse parse) {
  if (!s.has(key)) return fallback;
  const YAML::Node node = s.raw(key);
  const auto text = s.convert<std::string>(node, s.name(key));
  try {
    return parse(text);
  } catch (const Error& e) {
    fail(where(node, s.source()) + ": " + e.what());
  }
}

NegativeNorm parse_norm_kind(std::string_view name) {
  if (name == "sobolev") return NegativeNorm::Sobolev;
  if (name == "besov") return NegativeNorm::Besov;
  throw Error(ErrorCode::InvalidArgument, "kind must be sobolev or besov, got '" + std::string(name) + "'");
}

const char* norm_name(NegativeNorm k) { return k == NegativeNorm::Sobolev ? "sobolev" : "besov"; }

nlohmann::json real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

// Parse errors from module validators are reported as configuration errors.
template <class Fn>
void checked(const std::string& what, Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    fail(what + ": " + e.what());
  }
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Simulate: return "simulate";
    case Experiment::Linear: return "linear";
    case Experiment::Inequalities: return "inequalities";
    case Experiment::Fit: return "fit";
  }
  return "?";
}

Experiment parse_experiment(std::string_view name) {
  for (auto e : {Experiment::Simulate, Experiment::Linear, Experiment::Inequalities, Experiment::Fit}) {
    if (to_string(e) == name) return e;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown experiment '" + std::string(name) + "'");
}

InequalitySuite::InequalitySuite() {
  const double inf = std::numeric_limits<double>::infinity();
  gn = {{2.0, 1, 0.0, 2.0}, {6.0, 0, 1.0, 1.0}, {3.0, 1, 1.0, 2.0}, {inf, 0, 1.0, 2.0}, {inf, 1, 1.0, 3.0}};
  embeddings = {{NegativeNorm::Sobolev, 0.0},
                {NegativeNorm::Sobolev, 0.5},
                {NegativeNorm::Sobolev, 1.0},
                {NegativeNorm::Besov, 0.5},
                {NegativeNorm::Besov, 1.5}};
  for (double l : {0.0, 1.0, 2.0}) {
    for (double s : {0.5, 1.0, 1.5}) interpolation.push_back({NegativeNorm::Sobolev, l, s});
  }
  for (double s : {0.5, 1.5}) interpolation.push_back({NegativeNorm::Besov, 1.0, s});
}

RunConfig::RunConfig() { solver.end_time = 10.0; }

void RunConfig::resolve() {
  checked("data", [&] {
    if (data.p) {
      const double s = s_of_p(*data.p);
      if (std::abs(data.s - s) > 1e-12) {
        throw Error(ErrorCode::InvalidArgument, "s and p disagree: s_of_p(p) = " + std::to_string(s));
      }
      data.s = s;
    }
    if (!(data.s > 0.0 && data.s <= 1.5)) throw Error(ErrorCode::SOutOfRange, "s must be in (0, 3/2]");
  });
  if (grid.points < 8 || grid.points % 2 != 0) fail("grid.points must be even and >= 8");
  if (!(grid.box_length > 0.0)) fail("grid.box_length must be positive");
  checked("constants", [&] { constants.validate(); });
  checked("solver", [&] { solver.validate(); });
  initial.seed = seed;
  initial.s = data.s;
  linear.s = data.s;
  if (!(initial.amplitude >= 0.0)) fail("initial.amplitude must be >= 0");
  if (inequalities.trials < 2) fail("inequalities.trials must be >= 2");
  if (!(fit.tolerance > 0.0)) fail("fit.tolerance must be positive");
  if (!(monitor.eps > 0.0 && monitor.eps < 1.0)) fail("monitor.eps must be in (0, 1)");
  if (!(monitor.eta > 0.0)) fail("monitor.eta must be positive");
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    fail(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  RunConfig c;
  bool s_given = false;

  Section top(root, "", source);
  if (top.has("experiment")) {
    c.experiment = parse_enum(top, "experiment", c.experiment, parse_experiment);
  }
  top.get("seed", c.seed);
  top.get("output", c.output);
  top.get("plot_script", c.plot_script);

  {
    Section s = top.sub("grid");
    s.get("points", c.grid.points);
    s.get("box_length", c.grid.box_length);
    s.finish();
  }
  {
    Section s = top.sub("constants");
    auto& k = c.constants;
    s.get("gamma", k.gamma);
    s.get("A", k.A);
    s.get("tau", k.tau);
    s.get("lambda", k.lambda);
    s.get("epsilon", k.epsilon);
    s.get("n_infty", k.n_infty);
    s.get("B_infty", k.B_infty);
    s.finish();
  }
  {
    Section s = top.sub("data");
    s_given = s.has("s");
    s.get("s", c.data.s);
    if (s.has("p")) {
      double p = 0.0;
      s.get("p", p);
      c.data.p = p;
    }
    s.finish();
  }
  {
    Section s = top.sub("initial");
    auto& d = c.initial;
    d.kind = parse_enum(s, "kind", d.kind, parse_initial_kind);
    s.get("amplitude", d.amplitude);
    s.get("rolloff", d.rolloff);
    s.get("bump_radius", d.bump_radius);
    s.get("mode", d.mode);
    s.get("transverse_E", d.transverse_E);
    s.finish();
  }
  {
    Section s = top.sub("solver");
    auto& v = c.solver;
    s.get("dt", v.dt);
    s.get("cfl", v.cfl);
    s.get("end_time", v.end_time);
    s.get("dealias", v.dealias);
    s.get("gauss_projection_every", v.gauss_projection_every);
    s.get("output_stride", v.output_stride);
    s.get("gauss_tol", v.gauss_tol);
    s.finish();
  }
  {
    Section s = top.sub("monitor");
    auto& m = c.monitor;
    s.get("energy_N", m.energy_N);
    s.get("window_k", m.window_k);
    s.get("eps", m.eps);
    s.get("eta", m.eta);
    if (s.has("norms")) {
      m.norms.clear();
      each_entry(s, "norms", [&](Section& e, const YAML::Node&) {
        MonitorSpec::Norm n;
        n.quantity = parse_enum(e, "quantity", n.quantity, parse_quantity);
        e.get("k", n.k);
        m.norms.push_back(n);
      });
    }
    s.finish();
  }
  {
    Section s = top.sub("linear");
    auto& l = c.linear;
    s.get("k_list", l.k_list);
    if (s.has("quantities")) {
      const YAML::Node node = s.raw("quantities");
      l.quantities.clear();
      for (const auto& name : s.convert<std::vector<std::string>>(node, s.name("quantities"))) {
        try {
          l.quantities.push_back(parse_quantity(name));
        } catch (const Error& e) {
          fail(where(node, source) + ": " + e.what());
        }
      }
    }
    s.get("window", l.window);
    s.get("n_times", l.n_times);
    s.get("rolloff", l.rolloff);
    Section q = s.sub("quadrature");
    auto& qs = l.quadrature;
    q.get("xi_min", qs.xi_min);
    q.get("panels_per_decade", qs.panels_per_decade);
    q.get("nodes_per_panel", qs.nodes_per_panel);
    q.get("tail_tol", qs.tail_tol);
    q.get("polar_nodes", qs.polar_nodes);
    q.get("azimuth_nodes", qs.azimuth_nodes);
    q.get("axisymmetric", qs.axisymmetric);
    q.get("check_convergence", qs.check_convergence);
    q.get("convergence_tol", qs.convergence_tol);
    q.get("convergence_floor", qs.convergence_floor);
    q.finish();
    s.finish();
  }
  {
    Section s = top.sub("inequalities");
    auto& q = c.inequalities;
    s.get("trials", q.trials);
    s.get("points", q.points);
    s.get("box_length", q.box_length);
    if (s.has("gn")) {
      q.gn.clear();
      each_entry(s, "gn", [&](Section& e, const YAML::Node&) {
        InequalitySuite::Gn g;
        e.get("p", g.p);
        e.get("alpha", g.alpha);
        e.get("m", g.m);
        e.get("l", g.l);
        q.gn.push_back(g);
      });
    }
    s.get("f_k", q.f_k);
    s.get("f_gamma", q.f_gamma);
    s.get("f_amplitude", q.f_amplitude);
    s.get("commutator_k", q.commutator_k);
    if (s.has("embeddings")) {
      q.embeddings.clear();
      each_entry(s, "embeddings", [&](Section& e, const YAML::Node&) {
        InequalitySuite::Embedding m;
        m.kind = parse_enum(e, "kind", m.kind, parse_norm_kind);
        e.get("s", m.s);
        q.embeddings.push_back(m);
      });
    }
    if (s.has("interpolation")) {
      q.interpolation.clear();
      each_entry(s, "interpolation", [&](Section& e, const YAML::Node&) {
        InequalitySuite::Interpolation m;
        m.kind = parse_enum(e, "kind", m.kind, parse_norm_kind);
        e.get("l", m.l);
        e.get("s", m.s);
        q.interpolation.push_back(m);
      });
    }
    s.finish();
  }
  {
    Section s = top.sub("fit");
    auto& f = c.fit;
    s.get("csv", f.csv);
    s.get("time_column", f.time_column);
    s.get("columns", f.columns);
    s.get("window", f.window);
    s.get("floor", f.floor);
    s.get("tolerance", f.tolerance);
    if (s.has("targets")) {
      const YAML::Node node = s.raw("targets");
      if (!node.IsMap()) fail(where(node, source) + ": 'fit.targets' must map column names to exponents");
      for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        f.targets[key] = parse_real(kv.second, "fit.targets." + key, source);
      }
    }
    s.finish();
  }
  top.finish();

  if (c.data.p && !s_given) c.data.s = s_of_p(*c.data.p);
  c.resolve();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

nlohmann::json resolved_json(const RunConfig& c) {
  using nlohmann::json;
  json j;
  j["experiment"] = to_string(c.experiment);
  j["seed"] = c.seed;
  j["output"] = c.output;
  j["plot_script"] = c.plot_script;
  j["grid"] = {{"points", c.grid.points}, {"box_length", c.grid.box_length}};
  const auto& k = c.constants;
  j["constants"] = {{"gamma", k.gamma}, {"A", k.A}, {"tau", k.tau}, {"lambda", k.lambda},
                    {"epsilon", k.epsilon}, {"n_infty", k.n_infty}, {"B_infty", k.B_infty}};
  j["data"] = {{"s", c.data.s}};
  if (c.data.p) j["data"]["p"] = *c.data.p;
  const auto& d = c.initial;
  j["initial"] = {{"kind", to_string(d.kind)},
                  {"amplitude", d.amplitude},
                  {"rolloff", d.rolloff > 0.0 ? d.rolloff : default_rolloff(d.kind)},
                  {"bump_radius", d.bump_radius},
                  {"mode", d.mode},
                  {"transverse_E", d.transverse_E}};
  const auto& v = c.solver;
  j["solver"] = {{"dt", v.dt},
                 {"cfl", v.cfl},
                 {"end_time", v.end_time},
                 {"dealias", v.dealias},
                 {"gauss_projection_every", v.gauss_projection_every},
                 {"output_stride", v.output_stride},
                 {"gauss_tol", v.gauss_tol}};
  const auto& m = c.monitor;
  json norms = json::array();
  for (const auto& n : m.norms) norms.push_back({{"quantity", to_string(n.quantity)}, {"k", n.k}});
  j["monitor"] = {{"energy_N", m.energy_N}, {"window_k", m.window_k}, {"eps", m.eps},
                  {"eta", m.eta}, {"norms", norms}};
  const auto& l = c.linear;
  json quantities = json::array();
  for (auto q : l.quantities) quantities.push_back(to_string(q));
  const auto& qs = l.quadrature;
  j["linear"] = {{"k_list", l.k_list},
                 {"quantities", quantities},
                 {"window", {l.window.t_min, l.window.t_max}},
                 {"n_times", l.n_times},
                 {"rolloff", l.rolloff},
                 {"quadrature",
                  {{"xi_min", qs.xi_min},
                   {"panels_per_decade", qs.panels_per_decade},
                   {"nodes_per_panel", qs.nodes_per_panel},
                   {"tail_tol", qs.tail_tol},
                   {"polar_nodes", qs.polar_nodes},
                   {"azimuth_nodes", qs.azimuth_nodes},
                   {"axisymmetric", qs.axisymmetric},
                   {"check_convergence", qs.check_convergence},
                   {"convergence_tol", qs.convergence_tol},
                   {"convergence_floor", qs.convergence_floor}}}};
  const auto& q = c.inequalities;
  json gn = json::array();
  for (const auto& g : q.gn) gn.push_back({{"p", real(g.p)}, {"alpha", g.alpha}, {"m", g.m}, {"l", g.l}});
  json emb = json::array();
  for (const auto& e : q.embeddings) emb.push_back({{"kind", norm_name(e.kind)}, {"s", e.s}});
  json interp = json::array();
  for (const auto& e : q.interpolation) {
    interp.push_back({{"kind", norm_name(e.kind)}, {"l", e.l}, {"s", e.s}});
  }
  j["inequalities"] = {{"trials", q.trials},       {"points", q.points},   {"box_length", q.box_length},
                       {"gn", gn},                 {"f_k", q.f_k},         {"f_gamma", q.f_gamma},
                       {"f_amplitude", q.f_amplitude}, {"commutator_k", q.commutator_k},
                       {"embeddings", emb},        {"interpolation", interp}};
  const auto& f = c.fit;
  j["fit"] = {{"csv", f.csv},
              {"time_column", f.time_column},
              {"columns", f.columns},
              {"window", {f.window.t_min, f.window.t_max}},
              {"floor", f.floor},
              {"tolerance", f.tolerance},
              {"targets", f.targets}};
  return j;
}

}  // namespace emlab::cli

#include "jobspec.hpp"

#include <fstream>
#include <limits>
#include <set>

#include "projmetric/numeric_function.hpp"

namespace projmetric::cli {

namespace {

std::string get_string(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) throw JobError(std::string("missing string field '") + key + "'");
  return j[key].get<std::string>();
}

Expr parse_field(const std::string& text, const JobSpec& job, const std::string& where) {
  try {
    return parse_expression(text, job.chart, &job.aliases);
  } catch (const ParseError& e) {
    throw JobError(where + ": " + e.what());
  }
}

std::size_t index_of(const Json& v, std::size_t n, const std::string& where) {
  if (!v.is_number_integer()) throw JobError(where + ": indices must be integers");
  const auto i = v.get<long>();
  if (i < 1 || static_cast<std::size_t>(i) > n) throw JobError(where + ": index out of range 1.." + std::to_string(n));
  return static_cast<std::size_t>(i - 1);
}

std::vector<std::size_t> indices(const Json& e, const char* key, std::size_t n, const std::string& where) {
  std::vector<std::size_t> out;
  if (!e.contains(key)) return out;
  if (!e[key].is_array()) throw JobError(where + ": '" + key + "' must be a list");
  for (const auto& v : e[key]) out.push_back(index_of(v, n, where));
  return out;
}

UnivariateFn missing_numeric(const std::string& name) {
  return [name](double, int, double*) { throw EvaluationError("function '" + name + "' has no numeric definition"); };
}

std::vector<double> number_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw JobError(where + " must be a list of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw JobError(where + " must be a list of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

Connection JobSpec::working_connection() const {
  if (connection) return *connection;
  if (metric) return levi_civita(*metric);
  throw JobError("job has no connection or exact metric");
}

std::string JobSpec::print(const Expr& e) const {
  return to_string(e, [this](Var v) -> std::string {
    if (v.kind() == VarKind::Function && v.order() > 0) {
      auto it = derivative_names.find({v.index(), v.order()});
      if (it != derivative_names.end()) return it->second;
      return chart.functions()[v.index()].name + "_d" + std::to_string(v.order());
    }
    return chart.name(v);
  });
}

JobSpec parse_job(const Json& j) {
  if (!j.is_object()) throw JobError("job must be a JSON object");
  JobSpec job;
  job.source = j;

  if (!j.contains("coordinates") || !j["coordinates"].is_array()) throw JobError("missing 'coordinates'");
  std::vector<std::string> coords;
  for (const auto& c : j["coordinates"]) {
    if (!c.is_string()) throw JobError("coordinates must be strings");
    coords.push_back(c.get<std::string>());
  }
  if (j.contains("dimension") && (!j["dimension"].is_number_integer() || j["dimension"].get<std::size_t>() != coords.size()))
    throw JobError("dimension does not match the coordinate count");
  if (coords.size() < 2) throw JobError("dimension must be at least 2");
  const std::size_t n = coords.size();

  std::vector<std::string> params;
  std::map<std::string, double> param_values;
  if (j.contains("parameters")) {
    for (const auto& p : j["parameters"]) {
      if (p.is_string()) {
        params.push_back(p.get<std::string>());
      } else if (p.is_object()) {
        params.push_back(get_string(p, "name"));
        if (p.contains("value")) {
          if (!p["value"].is_number()) throw JobError("parameter value must be a number");
          param_values[params.back()] = p["value"].get<double>();
        }
      } else {
        throw JobError("parameters must be names or {name, value} objects");
      }
    }
  }

  // Function symbols first; definitions and derivative aliases need the chart.
  const Json functions = j.contains("functions") ? j["functions"] : Json::array();
  if (!functions.is_array()) throw JobError("'functions' must be a list");
  std::vector<FunctionSymbol> symbols;
  for (const auto& f : functions) {
    if (f.contains("of") || f.contains("define")) continue;
    FunctionSymbol s;
    s.name = get_string(f, "name");
    const std::string arg = f.contains("argument") ? get_string(f, "argument") : coords.back();
    auto it = std::find(coords.begin(), coords.end(), arg);
    if (it == coords.end()) throw JobError("function '" + s.name + "': unknown argument '" + arg + "'");
    s.arg = static_cast<std::size_t>(it - coords.begin());
    symbols.push_back(s);
  }
  try {
    job.chart = Chart(coords, symbols, params);
  } catch (const std::invalid_argument& e) {
    throw JobError(e.what());
  }
  const Chart& ch = job.chart;

  job.env.functions.assign(ch.functions().size(), {});
  for (std::size_t i = 0; i < ch.functions().size(); ++i) job.env.functions[i] = missing_numeric(ch.functions()[i].name);
  // NaN marks a parameter without a value; evaluating it is an error.
  job.env.parameters.assign(params.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto it = param_values.find(params[i]);
    if (it != param_values.end()) job.env.parameters[*ch.parameter_index(params[i])] = it->second;
  }

  for (const auto& f : functions) {
    if (f.contains("of") || f.contains("define")) continue;
    const std::string name = get_string(f, "name");
    const std::size_t fi = *ch.function_index(name);
    if (f.contains("exp_rate"))
      job.chart.set_exp_rate(fi, parse_field(get_string(f, "exp_rate"), job, "function '" + name + "' exp_rate"));
    if (f.contains("numeric")) {
      try {
        job.env.functions[fi] = compile_univariate(get_string(f, "numeric"), coords[ch.functions()[fi].arg], param_values);
      } catch (const std::exception& e) {
        throw JobError("function '" + name + "' numeric: " + e.what());
      }
    }
  }

  std::map<std::string, std::size_t> defined_arg;  // defined name -> argument coordinate
  for (const auto& f : functions) {
    const std::string name = get_string(f, "name");
    if (f.contains("define")) {
      const std::string arg = f.contains("argument") ? get_string(f, "argument") : coords.back();
      auto it = std::find(coords.begin(), coords.end(), arg);
      if (it == coords.end()) throw JobError("function '" + name + "': unknown argument '" + arg + "'");
      Expr v = parse_field(get_string(f, "define"), job, "function '" + name + "'");
      const auto a = static_cast<std::size_t>(it - coords.begin());
      for (std::size_t b = 0; b < n; ++b)
        if (b != a && depends_on(v, b, ch)) throw JobError("function '" + name + "': definition depends on another coordinate");
      job.aliases[name] = v;
      defined_arg[name] = a;
    } else if (f.contains("of")) {
      const std::string of = get_string(f, "of");
      const long order = f.contains("order") ? f["order"].get<long>() : 1;
      if (order < 1) throw JobError("function '" + name + "': order must be positive");
      if (auto fi = ch.function_index(of)) {
        // Differentiation applies the exp-type rule where one is set.
        Expr v = ch.f(*fi);
        for (long k = 0; k < order; ++k) v = ch.differentiate(v, ch.functions()[*fi].arg);
        job.aliases[name] = v;
        if (!ch.functions()[*fi].exp_rate) job.derivative_names[{*fi, static_cast<std::uint32_t>(order)}] = name;
      } else if (auto d = defined_arg.find(of); d != defined_arg.end()) {
        Expr v = job.aliases[of];
        for (long k = 0; k < order; ++k) v = ch.differentiate(v, d->second);
        job.aliases[name] = v;
      } else {
        throw JobError("function '" + name + "': '" + of + "' is not a declared function");
      }
    }
  }

  const int given = static_cast<int>(j.contains("connection")) + static_cast<int>(j.contains("metric")) +
                    static_cast<int>(j.contains("metric_samples"));
  if (given != 1) throw JobError("exactly one of 'connection', 'metric' or 'metric_samples' is required");

  if (j.contains("connection")) {
    std::vector<GammaEntry> entries;
    for (const auto& e : j["connection"]) {
      const std::string where = "connection entry";
      auto up = indices(e, "upper", n, where), lo = indices(e, "lower", n, where);
      if (up.size() != 1 || lo.size() != 2) throw JobError(where + ": needs one upper and two lower indices");
      entries.push_back({up[0], lo[0], lo[1], parse_field(get_string(e, "expr"), job, where)});
    }
    try {
      job.connection = make_connection(job.chart, entries);
    } catch (const std::invalid_argument& e) {
      throw JobError(std::string("connection: ") + e.what());
    }
  } else if (j.contains("metric")) {
    Tensor<Expr> g(n, "dd");
    std::vector<std::vector<bool>> set(n, std::vector<bool>(n, false));
    for (const auto& e : j["metric"]) {
      const std::string where = "metric entry";
      auto up = indices(e, "upper", n, where), lo = indices(e, "lower", n, where);
      if (!up.empty() || lo.size() != 2) throw JobError(where + ": needs two lower indices");
      Expr v = parse_field(get_string(e, "expr"), job, where);
      for (auto [a, b] : {std::pair{lo[0], lo[1]}, std::pair{lo[1], lo[0]}}) {
        if (set[a][b] && g(a, b) != v) throw JobError(where + ": conflicting duplicate entry");
        g(a, b) = v;
        set[a][b] = true;
      }
    }
    std::optional<std::pair<int, int>> sig;
    if (j.contains("signature")) sig = std::pair{j["signature"][0].get<int>(), j["signature"][1].get<int>()};
    try {
      job.metric = Metric(job.chart, g, sig);
    } catch (const std::exception& e) {
      throw JobError(std::string("metric: ") + e.what());
    }
  } else {
    for (const auto& s : j["metric_samples"]) {
      MetricSample m;
      m.x = number_list(s.at("x"), "sample x");
      m.g = number_list(s.at("g"), "sample g");
      m.dg = number_list(s.at("dg"), "sample dg");
      if (m.x.size() != n || m.g.size() != n * n || m.dg.size() != n * n * n)
        throw JobError("metric sample has the wrong shape");
      job.metric_samples.push_back(std::move(m));
    }
    if (job.metric_samples.empty()) throw JobError("'metric_samples' is empty");
  }

  auto& o = job.options;
  o.env = job.env;
  if (j.contains("backend")) {
    const std::string b = get_string(j, "backend");
    if (b == "symbolic") o.backend = Backend::Symbolic;
    else if (b == "numeric") o.backend = Backend::Numeric;
    else if (b == "auto") o.backend = Backend::Auto;
    else throw JobError("backend must be symbolic, numeric or auto");
  }
  if (j.contains("sample_points")) o.sample_points = j["sample_points"].get<std::size_t>();
  if (j.contains("seed")) o.seed = j["seed"].get<unsigned>();
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (t.contains("rank")) o.rank_tol = t["rank"].get<double>();
    if (t.contains("ode")) o.ode_tol = t["ode"].get<double>();
    if (t.contains("verify")) o.verify_tol = t["verify"].get<double>();
  }
  if (j.contains("base_point")) {
    o.base_point = number_list(j["base_point"], "base_point");
    if (o.base_point->size() != n) throw JobError("base_point has the wrong length");
  }
  if (j.contains("time_limit")) o.symbolic_time_limit = j["time_limit"].get<double>();
  return job;
}

JobSpec load_job(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw JobError("cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw JobError(path + ": " + e.what());
  }
  try {
    return parse_job(j);
  } catch (const Json::exception& e) {
    throw JobError(path + ": " + e.what());
  }
}

Json tensor_entries(const Tensor<Expr>& t, const JobSpec& job, std::optional<std::pair<std::size_t, std::size_t>> symmetric) {
  Json out = Json::array();
  const std::string& var = t.variance();
  std::vector<std::size_t> idx(t.rank());
  for (std::size_t k = 0; k < t.size(); ++k) {
    const Expr& v = t.flat(k);
    if (v.is_zero()) continue;
    t.unflatten(k, idx.data());
    if (symmetric && idx[symmetric->first] > idx[symmetric->second]) continue;
    Json e;
    e["upper"] = Json::array();
    e["lower"] = Json::array();
    for (std::size_t s = 0; s < idx.size(); ++s) e[var[s] == 'u' ? "upper" : "lower"].push_back(idx[s] + 1);
    e["expr"] = job.print(v);
    out.push_back(std::move(e));
  }
  return out;
}

Json chart_section(const JobSpec& job, const std::vector<Expr>& used) {
  Json out;
  out["dimension"] = job.chart.dimension();
  out["coordinates"] = job.source["coordinates"];
  if (job.source.contains("parameters")) out["parameters"] = job.source["parameters"];
  Json fns = job.source.contains("functions") ? job.source["functions"] : Json::array();
  std::set<std::pair<std::size_t, std::uint32_t>> extra;
  for (const auto& e : used)
    for (Var v : e.variables())
      if (v.kind() == VarKind::Function && v.order() > 0 && !job.derivative_names.count({v.index(), v.order()}))
        extra.insert({v.index(), v.order()});
  for (auto [f, k] : extra) {
    const std::string& name = job.chart.functions()[f].name;
    Json a;
    a["name"] = name + "_d" + std::to_string(k);
    a["of"] = name;
    a["order"] = k;
    fns.push_back(std::move(a));
  }
  if (!fns.empty()) out["functions"] = fns;
  return out;
}

}  // namespace projmetric::cli

#include "memostrange/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace memostrange {

namespace fs = std::filesystem;

namespace {

std::string join(const std::vector<std::string>& items, const char* sep)
{
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string prefixed(const std::string& where, const std::string& key)
{
  return where.empty() ? key : where + "." + key;
}

double number_or(const json& obj, const char* key, double fallback,
                 std::vector<std::string>& issues, const std::string& where)
{
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) {
    issues.push_back(prefixed(where, key) + " must be a number");
    return fallback;
  }
  return v.get<double>();
}

long integer_or(const json& obj, const char* key, long fallback, std::vector<std::string>& issues,
                const std::string& where)
{
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) {
    issues.push_back(prefixed(where, key) + " must be an integer");
    return fallback;
  }
  return v.get<long>();
}

std::vector<double> numbers_or(const json& obj, const char* key, std::vector<std::string>& issues,
                               const std::string& where)
{
  std::vector<double> out;
  if (!obj.contains(key)) return out;
  const auto& v = obj.at(key);
  if (!v.is_array()) {
    issues.push_back(prefixed(where, key) + " must be an array of numbers");
    return out;
  }
  for (const auto& x : v) {
    if (!x.is_number()) {
      issues.push_back(prefixed(where, key) + " must be an array of numbers");
      return {};
    }
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<int> ints_or(const json& obj, const char* key, std::vector<std::string>& issues,
                         const std::string& where)
{
  std::vector<int> out;
  if (!obj.contains(key)) return out;
  const auto& v = obj.at(key);
  if (!v.is_array()) {
    issues.push_back(prefixed(where, key) + " must be an array of integers");
    return out;
  }
  for (const auto& x : v) {
    if (!x.is_number_integer()) {
      issues.push_back(prefixed(where, key) + " must be an array of integers");
      return {};
    }
    out.push_back(x.get<int>());
  }
  return out;
}

json profile_to_json(const TimeProfile& p)
{
  return json{{"poly", p.poly},         {"sine_amp", p.sine_amp},   {"sine_freq", p.sine_freq},
              {"relax_amp", p.relax_amp}, {"relax_rate", p.relax_rate}};
}

TimeProfile profile_from_json(const json& j, std::vector<std::string>& issues,
                              const std::string& where)
{
  TimeProfile p;
  if (!j.is_object()) {
    issues.push_back(where + " must be an object");
    return p;
  }
  check_keys(j, {"poly", "sine_amp", "sine_freq", "relax_amp", "relax_rate"}, issues, where);
  p.poly = numbers_or(j, "poly", issues, where);
  p.sine_amp = number_or(j, "sine_amp", 0.0, issues, where);
  p.sine_freq = number_or(j, "sine_freq", 0.0, issues, where);
  p.relax_amp = number_or(j, "relax_amp", 0.0, issues, where);
  p.relax_rate = number_or(j, "relax_rate", 0.0, issues, where);
  return p;
}

const char* probe_kind_name(ProbeKind k)
{
  switch (k) {
  case ProbeKind::Point: return "point";
  case ProbeKind::L2: return "l2";
  case ProbeKind::Min: return "min";
  case ProbeKind::Max: return "max";
  }
  return "l2";
}

const char* probe_field_name(ProbeField f)
{
  return f == ProbeField::U ? "u" : f == ProbeField::V ? "v" : "H";
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

} // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join(issues, "; ")), issues_(std::move(issues))
{}

json read_json_file(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot open " + path.string()});
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError({path.string() + ":" + std::to_string(line) + ":" + std::to_string(column) +
                       ": JSON parse error: " + e.what()});
  }
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                std::vector<std::string>& issues, const std::string& where)
{
  if (!obj.is_object()) return;
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) issues.push_back("unknown key: " + prefixed(where, item.key()));
  }
}

json params_to_json(const ModelParams& p)
{
  return json{{"n", p.n},
              {"C0", p.C0},
              {"lambda", p.lambda},
              {"alpha", p.alpha},
              {"beta", p.beta},
              {"gamma", p.gamma},
              {"omega_n", p.omega_n},
              {"A_strange", p.A_strange},
              {"mu", p.mu}};
}

ModelParams params_from_json(const json& j, std::vector<std::string>& issues)
{
  ModelParams raw;
  if (!j.is_object()) {
    issues.emplace_back("params must be an object");
    return raw;
  }
  check_keys(j, {"n", "C0", "lambda", "alpha", "beta", "gamma", "omega_n", "A_strange", "mu"},
             issues, "params");
  const std::size_t before = issues.size();
  raw.n = static_cast<int>(integer_or(j, "n", 3, issues, "params"));
  raw.C0 = number_or(j, "C0", 1.0, issues, "params");
  raw.lambda = number_or(j, "lambda", 1.0, issues, "params");
  raw.alpha = number_or(j, "alpha", 1.0, issues, "params");
  raw.beta = number_or(j, "beta", 1.0, issues, "params");
  auto problems = validate_params(raw);
  issues.insert(issues.end(), problems.begin(), problems.end());
  if (issues.size() != before) return raw;

  ModelParams p = derive_params(raw.n, raw.C0, raw.lambda, raw.alpha, raw.beta);
  const std::pair<const char*, double> derived[] = {
      {"gamma", p.gamma}, {"omega_n", p.omega_n}, {"A_strange", p.A_strange}, {"mu", p.mu}};
  for (const auto& [key, value] : derived) {
    if (j.contains(key)) {
      const double given = number_or(j, key, value, issues, "params");
      if (!near(given, value)) {
        issues.push_back(std::string("params.") + key + " is inconsistent with the raw fields");
      }
    }
  }
  return p;
}

json source_to_json(const SourceSpec& spec)
{
  return std::visit(
      [](const auto& src) -> json {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, ConstantSource>) {
          return json{{"kind", "constant"}, {"value", src.value}};
        } else if constexpr (std::is_same_v<T, SeparableSineSource>) {
          json terms = json::array();
          for (const auto& t : src.terms) {
            terms.push_back(json{{"amplitude", t.amplitude},
                                 {"modes", t.modes},
                                 {"omega", t.omega},
                                 {"phase", t.phase}});
          }
          return json{{"kind", "separable-sine"},
                      {"terms", terms},
                      {"negated_square", src.negated_square}};
        } else if constexpr (std::is_same_v<T, PolynomialTimeSource>) {
          return json{{"kind", "polynomial-time"}, {"coeffs", src.coeffs}, {"modes", src.modes}};
        } else if constexpr (std::is_same_v<T, ManufacturedSource>) {
          return json{{"kind", "manufactured"},
                      {"modes", src.solution.modes},
                      {"u_time", profile_to_json(src.solution.u_time)},
                      {"v_time", profile_to_json(src.solution.v_time)},
                      {"discrete_laplacian", src.discrete_laplacian}};
        } else {
          json values = json::array();
          for (const auto& v : src.values) {
            if (v.size() == 1) {
              values.push_back(v[0]);
            } else {
              values.push_back(std::vector<double>(v.data(), v.data() + v.size()));
            }
          }
          return json{{"kind", "tabulated"}, {"times", src.times}, {"values", values}};
        }
      },
      spec);
}

SourceSpec source_from_json(const json& j, const ModelParams& params, SourceRole role,
                            std::vector<std::string>& issues, const std::string& where)
{
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    issues.push_back(where + " must be an object with a string \"kind\"");
    return ConstantSource{};
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    check_keys(j, {"kind", "value"}, issues, where);
    return ConstantSource{number_or(j, "value", 0.0, issues, where)};
  }
  if (kind == "separable-sine") {
    check_keys(j, {"kind", "terms", "negated_square"}, issues, where);
    SeparableSineSource src;
    if (j.contains("negated_square")) {
      if (j.at("negated_square").is_boolean()) {
        src.negated_square = j.at("negated_square").get<bool>();
      } else {
        issues.push_back(where + ".negated_square must be a boolean");
      }
    }
    if (j.contains("terms") && j.at("terms").is_array()) {
      std::size_t i = 0;
      for (const auto& t : j.at("terms")) {
        const std::string at = where + ".terms[" + std::to_string(i++) + "]";
        check_keys(t, {"amplitude", "modes", "omega", "phase"}, issues, at);
        SineTerm term;
        term.amplitude = number_or(t, "amplitude", 0.0, issues, at);
        term.modes = ints_or(t, "modes", issues, at);
        term.omega = number_or(t, "omega", 0.0, issues, at);
        term.phase = number_or(t, "phase", 0.0, issues, at);
        src.terms.push_back(std::move(term));
      }
    } else if (j.contains("terms")) {
      issues.push_back(where + ".terms must be an array");
    }
    return src;
  }
  if (kind == "polynomial-time") {
    check_keys(j, {"kind", "coeffs", "modes"}, issues, where);
    return PolynomialTimeSource{numbers_or(j, "coeffs", issues, where),
                                ints_or(j, "modes", issues, where)};
  }
  if (kind == "manufactured") {
    check_keys(j, {"kind", "modes", "u_time", "v_time", "discrete_laplacian"}, issues, where);
    ManufacturedSolution sol;
    sol.modes = ints_or(j, "modes", issues, where);
    if (j.contains("u_time")) sol.u_time = profile_from_json(j.at("u_time"), issues, where + ".u_time");
    if (j.contains("v_time")) sol.v_time = profile_from_json(j.at("v_time"), issues, where + ".v_time");
    bool discrete = false;
    if (j.contains("discrete_laplacian")) {
      if (j.at("discrete_laplacian").is_boolean()) {
        discrete = j.at("discrete_laplacian").get<bool>();
      } else {
        issues.push_back(where + ".discrete_laplacian must be a boolean");
      }
    }
    return ManufacturedSource{sol, role, params, discrete};
  }
  if (kind == "tabulated") {
    check_keys(j, {"kind", "times", "values"}, issues, where);
    TabulatedSource src;
    src.times = numbers_or(j, "times", issues, where);
    if (j.contains("values") && j.at("values").is_array()) {
      for (const auto& v : j.at("values")) {
        if (v.is_number()) {
          src.values.push_back(Field::Constant(1, v.get<double>()));
        } else if (v.is_array()) {
          Field f(static_cast<Eigen::Index>(v.size()));
          Eigen::Index i = 0;
          for (const auto& x : v) f[i++] = x.is_number() ? x.get<double>() : std::nan("");
          src.values.push_back(std::move(f));
        } else {
          issues.push_back(where + ".values entries must be numbers or arrays");
        }
      }
    } else {
      issues.push_back(where + ".values must be an array");
    }
    if (src.times.size() != src.values.size()) {
      issues.push_back(where + ": times and values differ in length");
    }
    for (std::size_t i = 1; i < src.times.size(); ++i) {
      if (!(src.times[i] > src.times[i - 1])) {
        issues.push_back(where + ".times must be strictly increasing");
        break;
      }
    }
    return src;
  }
  issues.push_back(where + ": unknown source kind \"" + kind + "\"");
  return ConstantSource{};
}

json config_to_json(const RunConfig& c)
{
  json probes = json::array();
  for (const auto& p : c.probes) {
    json jp{{"kind", probe_kind_name(p.kind)}, {"field", probe_field_name(p.field)}};
    if (p.kind == ProbeKind::Point) jp["x"] = p.point;
    if (!p.name.empty()) jp["name"] = p.name;
    probes.push_back(std::move(jp));
  }
  const Grid g = c.grid();
  json extent = json::array();
  for (int d = 0; d < g.dim(); ++d) extent.push_back(json::array({g.lower(d), g.upper(d)}));
  return json{{"params", params_to_json(c.params)},
              {"grid", {{"cells_per_axis", c.cells_per_axis}, {"extent", extent}}},
              {"dt", c.dt},
              {"T", c.T},
              {"scheme", to_string(c.scheme)},
              {"sources", {{"f", source_to_json(c.sources.f)}, {"g", source_to_json(c.sources.g)}}},
              {"probes", probes},
              {"output_stride", c.output_stride},
              {"output_dir", c.output_dir},
              {"seed", c.seed},
              {"solver", {{"tol", c.tol}, {"max_iter", c.max_iter}}},
              {"dump_fields", c.dump_fields}};
}

RunConfig config_from_json(const json& j)
{
  std::vector<std::string> issues;
  RunConfig c;
  if (!j.is_object()) throw ConfigError({"configuration must be a JSON object"});
  check_keys(j, {"params", "grid", "dt", "T", "scheme", "sources", "probes", "output_stride",
                 "output_dir", "seed", "solver", "dump_fields"},
             issues);

  if (j.contains("params")) c.params = params_from_json(j.at("params"), issues);
  const int n = c.params.n;

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    check_keys(g, {"cells_per_axis", "extent"}, issues, "grid");
    c.cells_per_axis = static_cast<int>(integer_or(g, "cells_per_axis", 32, issues, "grid"));
    if (g.contains("extent")) {
      const auto& e = g.at("extent");
      if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        c.lower.assign(static_cast<std::size_t>(std::max(n, 0)), e[0].get<double>());
        c.upper.assign(static_cast<std::size_t>(std::max(n, 0)), e[1].get<double>());
      } else if (e.is_array() && e.size() == static_cast<std::size_t>(n)) {
        for (const auto& axis : e) {
          if (axis.is_array() && axis.size() == 2 && axis[0].is_number() && axis[1].is_number()) {
            c.lower.push_back(axis[0].get<double>());
            c.upper.push_back(axis[1].get<double>());
          } else {
            issues.emplace_back("grid.extent entries must be [lower, upper] pairs");
            break;
          }
        }
      } else {
        issues.emplace_back("grid.extent must be [lower, upper] or one pair per axis");
      }
      for (std::size_t d = 0; d < c.lower.size() && d < c.upper.size(); ++d) {
        if (!(c.upper[d] > c.lower[d])) {
          issues.emplace_back("grid.extent must satisfy lower < upper");
          break;
        }
      }
    }
    if (c.cells_per_axis < 2) issues.emplace_back("grid.cells_per_axis must be ≥ 2");
  }

  c.dt = number_or(j, "dt", c.dt, issues, "");
  c.T = number_or(j, "T", c.T, issues, "");
  if (!(c.dt > 0.0)) issues.emplace_back("dt must be positive");
  if (!(c.T >= 0.0)) issues.emplace_back("T must be ≥ 0");
  if (c.T > 0.0 && c.dt > c.T) issues.emplace_back("dt must not exceed T");

  if (j.contains("scheme")) {
    if (j.at("scheme").is_string()) {
      try {
        c.scheme = parse_memory_scheme(j.at("scheme").get<std::string>());
      } catch (const std::invalid_argument& e) {
        issues.emplace_back(e.what());
      }
    } else {
      issues.emplace_back("scheme must be a string");
    }
  }

  if (j.contains("sources")) {
    const auto& s = j.at("sources");
    check_keys(s, {"f", "g"}, issues, "sources");
    if (s.contains("f")) c.sources.f = source_from_json(s.at("f"), c.params, SourceRole::Bulk, issues, "sources.f");
    if (s.contains("g")) c.sources.g = source_from_json(s.at("g"), c.params, SourceRole::Surface, issues, "sources.g");
    const auto* mf = std::get_if<ManufacturedSource>(&c.sources.f);
    const auto* mg = std::get_if<ManufacturedSource>(&c.sources.g);
    if (mf || mg) {
      if (!(mf && mg) || !(mf->solution == mg->solution)) {
        issues.emplace_back("manufactured sources f and g must describe the same exact pair");
      } else {
        try {
          manufacture_sources(mf->solution, c.params);
        } catch (const std::invalid_argument& e) {
          issues.emplace_back(e.what());
        }
      }
    }
  }

  if (j.contains("probes")) {
    const auto& ps = j.at("probes");
    if (!ps.is_array()) {
      issues.emplace_back("probes must be an array");
    } else {
      std::size_t i = 0;
      for (const auto& pj : ps) {
        const std::string at = "probes[" + std::to_string(i++) + "]";
        check_keys(pj, {"kind", "field", "x", "name"}, issues, at);
        Probe p;
        const std::string kind = pj.value("kind", std::string("l2"));
        const std::string field = pj.value("field", std::string("u"));
        if (kind == "point") p.kind = ProbeKind::Point;
        else if (kind == "l2") p.kind = ProbeKind::L2;
        else if (kind == "min") p.kind = ProbeKind::Min;
        else if (kind == "max") p.kind = ProbeKind::Max;
        else issues.push_back(at + ".kind must be point, l2, min or max");
        if (field == "u") p.field = ProbeField::U;
        else if (field == "v") p.field = ProbeField::V;
        else if (field == "H") p.field = ProbeField::H;
        else issues.push_back(at + ".field must be u, v or H");
        p.point = numbers_or(pj, "x", issues, at);
        if (pj.contains("name")) {
          p.name = pj.at("name").is_string() ? pj.at("name").get<std::string>() : "";
          if (p.name.find_first_of(",\n\"") != std::string::npos) {
            issues.push_back(at + ".name must not contain commas, quotes or newlines");
          }
        }
        if (p.kind == ProbeKind::Point) {
          const auto lo = c.lower.empty() ? std::vector<double>(static_cast<std::size_t>(std::max(n, 0)), 0.0) : c.lower;
          const auto hi = c.upper.empty() ? std::vector<double>(static_cast<std::size_t>(std::max(n, 0)), 1.0) : c.upper;
          bool inside = p.point.size() == lo.size();
          for (std::size_t d = 0; inside && d < lo.size(); ++d) {
            inside = p.point[d] >= lo[d] && p.point[d] <= hi[d];
          }
          if (!inside) issues.push_back(at + ".x must be a point inside the domain");
        }
        c.probes.push_back(std::move(p));
      }
    }
  }

  const long stride = integer_or(j, "output_stride", c.output_stride, issues, "");
  if (stride < 1) issues.emplace_back("output_stride must be a positive integer");
  c.output_stride = static_cast<int>(stride);
  if (j.contains("output_dir")) {
    if (j.at("output_dir").is_string()) c.output_dir = j.at("output_dir").get<std::string>();
    else issues.emplace_back("output_dir must be a string");
  }
  if (j.contains("seed")) {
    if (j.at("seed").is_number_unsigned()) c.seed = j.at("seed").get<std::uint64_t>();
    else issues.emplace_back("seed must be a nonnegative integer");
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    check_keys(s, {"tol", "max_iter"}, issues, "solver");
    c.tol = number_or(s, "tol", c.tol, issues, "solver");
    c.max_iter = static_cast<int>(integer_or(s, "max_iter", c.max_iter, issues, "solver"));
    if (!(c.tol > 0.0)) issues.emplace_back("solver.tol must be positive");
    if (c.max_iter < 1) issues.emplace_back("solver.max_iter must be ≥ 1");
  }
  if (j.contains("dump_fields")) {
    if (j.at("dump_fields").is_boolean()) c.dump_fields = j.at("dump_fields").get<bool>();
    else issues.emplace_back("dump_fields must be a boolean");
  }

  if (issues.empty()) {
    const Grid grid = c.grid();
    for (const auto* spec : {&c.sources.f, &c.sources.g}) {
      if (const auto* tab = std::get_if<TabulatedSource>(spec)) {
        for (const auto& v : tab->values) {
          if (v.size() != 1 && v.size() != grid.size()) {
            issues.push_back("tabulated source fields must have " + std::to_string(grid.size()) +
                             " interior values");
            break;
          }
        }
      }
    }
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

RunConfig load_config(const fs::path& path) { return config_from_json(read_json_file(path)); }

std::string format_double(double value)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::ofstream open_output(const fs::path& path)
{
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path)
{
  out.flush();
  if (!out) throw std::runtime_error("I/O error while writing " + path.string());
}

} // namespace

void write_series_csv(const Series& series, const fs::path& path)
{
  if (series.rows.empty()) throw std::invalid_argument("write_series_csv: empty series");
  auto out = open_output(path);
  out << 't';
  for (const auto& name : series.names) out << ',' << name;
  out << '\n';
  for (const auto& row : series.rows) {
    out << format_double(row.t);
    for (double v : row.values) out << ',' << format_double(v);
    out << '\n';
  }
  finish(out, path);
}

Series read_series_csv(const fs::path& path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Series series;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  {
    std::istringstream header(line);
    std::string cell;
    std::getline(header, cell, ',');
    while (std::getline(header, cell, ',')) series.names.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row_in(line);
    std::string cell;
    SeriesRow row;
    std::getline(row_in, cell, ',');
    row.t = std::strtod(cell.c_str(), nullptr);
    while (std::getline(row_in, cell, ',')) row.values.push_back(std::strtod(cell.c_str(), nullptr));
    series.rows.push_back(std::move(row));
  }
  return series;
}

void emit_plot_script(const fs::path& series_csv, const fs::path& out_path)
{
  std::ifstream in(series_csv);
  if (!in) throw std::runtime_error("series CSV not found: " + series_csv.string());
  std::string header;
  std::getline(in, header);
  std::vector<std::string> names;
  {
    std::istringstream cells(header);
    std::string cell;
    std::getline(cells, cell, ',');
    while (std::getline(cells, cell, ',')) names.push_back(cell);
  }
  fs::path svg = out_path;
  svg.replace_extension(".svg");

  auto out = open_output(out_path);
  out << "# gnuplot script; run with: gnuplot " << out_path.filename().string() << '\n';
  out << "set terminal svg size 900,600 dynamic\n";
  out << "set output '" << svg.filename().string() << "'\n";
  out << "set datafile separator ','\n";
  out << "set key autotitle columnhead\n";
  out << "set xlabel 't'\n";
  out << "set grid\n";
  out << "plot";
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << (i ? ", \\\n    " : " ") << "'" << series_csv.filename().string() << "' using 1:"
        << i + 2 << " with lines title '" << names[i] << "'";
  }
  out << '\n';
  finish(out, out_path);
}

void write_field_dump(const Field& field, const Grid& grid, double t, const fs::path& path)
{
  if (field.size() != grid.size()) {
    throw std::invalid_argument("write_field_dump: field does not match the grid");
  }
  std::string h;
  bool uniform = true;
  for (int d = 1; d < grid.dim(); ++d) uniform = uniform && grid.h(d) == grid.h(0);
  for (int d = 0; d < (uniform ? 1 : grid.dim()); ++d) {
    if (d) h += 'x';
    h += format_double(grid.h(d));
  }
  auto out = open_output(path);
  out << "# dims=" << grid.dims_string() << " h=" << h << " t=" << format_double(t) << '\n';
  for (Eigen::Index i = 0; i < field.size(); ++i) out << format_double(field[i]) << '\n';
  finish(out, path);
}

FieldDump read_field_dump(const fs::path& path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  FieldDump dump;
  std::string line;
  std::getline(in, line);
  std::istringstream header(line);
  std::string token;
  while (header >> token) {
    if (token.rfind("dims=", 0) == 0) dump.dims = token.substr(5);
    else if (token.rfind("h=", 0) == 0) dump.h = token.substr(2);
    else if (token.rfind("t=", 0) == 0) dump.t = std::strtod(token.c_str() + 2, nullptr);
  }
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (!line.empty()) values.push_back(std::strtod(line.c_str(), nullptr));
  }
  dump.values = Eigen::Map<Field>(values.data(), static_cast<Eigen::Index>(values.size()));
  return dump;
}

json report_to_json(const ConvergenceReport& r)
{
  return json{{"study", r.study},
              {"norm_kind", r.norm_kind},
              {"resolutions", r.resolutions},
              {"errors", r.errors},
              {"fitted_order", std::isfinite(r.fitted_order) ? json(r.fitted_order) : json()},
              {"expected_order", r.expected_order},
              {"tolerance", r.tolerance},
              {"pass", r.pass}};
}

void write_json(const json& j, const fs::path& path)
{
  auto out = open_output(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

} // namespace memostrange

#include "memostrange/io.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <unistd.h>

using namespace memostrange;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir()
{
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("memostrange_io_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> config_issues(const std::string& text)
{
  try {
    config_from_json(json::parse(text));
  } catch (const ConfigError& e) {
    return e.issues();
  }
  return {};
}

bool has(const std::vector<std::string>& v, const std::string& s)
{
  return std::find(v.begin(), v.end(), s) != v.end();
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

} // namespace

TEST_CASE("minimal config fills defaults")
{
  const RunConfig c = config_from_json(json::parse(R"({"params": {"n": 3, "C0": 1, "lambda": 1, "alpha": 1, "beta": 1}})"));
  CHECK(c.cells_per_axis == 32);
  CHECK(c.dt == 1e-2);
  CHECK(c.T == 1.0);
  CHECK(c.tol == 1e-10);
  CHECK(c.scheme == MemoryScheme::BackwardEuler);
  CHECK(c.output_stride == 1);
  CHECK(c.params.A_strange == doctest::Approx(4.0 * std::numbers::pi));
}

TEST_CASE("strict config validation")
{
  CHECK(has(config_issues(R"({"params": {"n": 3, "C0": 1, "lamda": 1, "alpha": 1, "beta": 1}})"),
            "unknown key: params.lamda"));
  CHECK(has(config_issues(R"({"lamda": 1})"), "unknown key: lamda"));
  CHECK(has(config_issues(R"({"dt": -0.1})"), "dt must be positive"));
  CHECK(has(config_issues(R"({"dt": 2, "T": 1})"), "dt must not exceed T"));

  // Every violation is reported at once.
  const auto many = config_issues(R"({"dt": -1, "scheme": "leapfrog", "bogus": 0,
                                      "probes": [{"kind": "point", "x": [2, 0.5, 0.5]}]})");
  CHECK(many.size() >= 4);
  CHECK(has(many, "unknown key: bogus"));
  CHECK(has(many, "probes[0].x must be a point inside the domain"));

  CHECK(has(config_issues(R"({"params": {"n": 3, "C0": 1, "lambda": 1, "alpha": 0, "beta": 0}})"),
            "alpha and beta cannot both vanish"));
  CHECK(has(config_issues(R"({"params": {"n": 3, "C0": 1, "lambda": 1, "alpha": 1, "beta": 1, "mu": 3}})"),
            "params.mu is inconsistent with the raw fields"));
}

TEST_CASE("parse errors carry line and column")
{
  const fs::path p = scratch_dir() / "broken.json";
  std::ofstream(p) << "{\n  \"dt\": 0.1,\n  \"T\": ]\n}\n";
  try {
    load_config(p);
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("broken.json:3:") != std::string::npos);
  }
}

TEST_CASE("config round trip")
{
  RunConfig c;
  c.params = derive_params(4, 0.5, 2.0, 0.0, 3.0);
  c.cells_per_axis = 10;
  c.lower = {0, 0, -1, 0};
  c.upper = {1, 2, 1, 1};
  c.dt = 0.05;
  c.T = 0.3;
  c.scheme = MemoryScheme::Trapezoid;
  c.sources.f = SeparableSineSource{{SineTerm{1.5, {1, 2, 1, 1}, 3.0, 0.25}}, true};
  c.sources.g = PolynomialTimeSource{{0.0, -1.0, 0.5}, {1, 1, 1, 1}};
  c.probes = {Probe{ProbeKind::Point, ProbeField::H, {0.5, 1.0, 0.0, 0.5}, "centre"},
              Probe{ProbeKind::Min, ProbeField::V, {}, {}}};
  c.output_stride = 3;
  c.seed = 12345;
  c.tol = 1e-9;
  c.max_iter = 77;
  c.dump_fields = true;

  const json once = config_to_json(c);
  const RunConfig back = config_from_json(json::parse(once.dump()));
  CHECK(config_to_json(back) == once);
  CHECK(back.params == c.params);
  CHECK(back.probes == c.probes);
  CHECK(back.grid() == c.grid());
  CHECK(std::get<SeparableSineSource>(back.sources.f) == std::get<SeparableSineSource>(c.sources.f));

  RunConfig m;
  const MmsCase mms = mms_case(Regime::Parabolic);
  m.params = mms.params;
  m.sources = manufacture_sources(mms.exact, mms.params, true);
  const RunConfig mb = config_from_json(config_to_json(m));
  CHECK(std::get<ManufacturedSource>(mb.sources.f) == std::get<ManufacturedSource>(m.sources.f));
}

TEST_CASE("series CSV")
{
  Series one{{"l2_u"}, {SeriesRow{0.0, {0.0}}}};
  const fs::path p1 = scratch_dir() / "one.csv";
  write_series_csv(one, p1);
  CHECK(slurp(p1) == "t,l2_u\n0,0\n");

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1e3, 1e3);
  Series s{{"a", "b", "c"}, {}};
  for (int k = 0; k < 20; ++k) s.rows.push_back({d(rng) * 1e-7, {d(rng), d(rng) * 1e-300, 1.0 / 3.0}});
  const fs::path p = scratch_dir() / "series.csv";
  write_series_csv(s, p);
  const Series back = read_series_csv(p);
  CHECK(back.names == s.names);
  REQUIRE(back.rows.size() == s.rows.size());
  bool identical = true;
  for (std::size_t k = 0; k < s.rows.size(); ++k) {
    identical = identical && same_bits(back.rows[k].t, s.rows[k].t);
    for (std::size_t i = 0; i < 3; ++i) {
      identical = identical && same_bits(back.rows[k].values[i], s.rows[k].values[i]);
    }
  }
  CHECK(identical);
  CHECK(slurp(p).back() == '\n');
  CHECK_THROWS_AS(write_series_csv(Series{}, p), std::invalid_argument);
}

TEST_CASE("plot script")
{
  const fs::path csv = scratch_dir() / "plot.csv";
  write_series_csv(Series{{"l2_u", "l2_v", "l2_H"}, {SeriesRow{0.0, {1, 2, 3}}}}, csv);
  const fs::path gp = scratch_dir() / "plot.gp";
  emit_plot_script(csv, gp);
  const std::string script = slurp(gp);
  std::size_t clauses = 0;
  for (std::size_t at = script.find("with lines"); at != std::string::npos;
       at = script.find("with lines", at + 1)) {
    ++clauses;
  }
  CHECK(clauses == 3);
  CHECK(script.find("using 1:4 with lines title 'l2_H'") != std::string::npos);
  CHECK(script.find("plot.svg") != std::string::npos);

  write_series_csv(Series{{"x"}, {SeriesRow{0.0, {1}}}}, csv);
  emit_plot_script(csv, gp);
  const std::string single = slurp(gp);
  CHECK(single.find("using 1:2 with lines title 'x'") != std::string::npos);
  CHECK(single.find("using 1:3") == std::string::npos);

  CHECK_THROWS_WITH(emit_plot_script(scratch_dir() / "missing.csv", gp),
                    ("series CSV not found: " + (scratch_dir() / "missing.csv").string()).c_str());
}

TEST_CASE("field dumps")
{
  const Grid g(3, 3);
  const fs::path p = scratch_dir() / "zero.txt";
  write_field_dump(Field::Zero(g.size()), g, 0.5, p);
  const std::string text = slurp(p);
  CHECK(text.rfind("# dims=2x2x2 h=", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 9);
  CHECK(text.find("\n0\n0\n0\n0\n0\n0\n0\n0\n") != std::string::npos);

  const Grid g2(2, 7);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  Field f(g2.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = n(rng) * std::pow(10.0, static_cast<double>(i % 7) - 3);
  const fs::path q = scratch_dir() / "field.txt";
  write_field_dump(f, g2, 0.1, q);
  const FieldDump back = read_field_dump(q);
  CHECK(back.dims == "6x6");
  CHECK(same_bits(back.t, 0.1));
  REQUIRE(back.values.size() == f.size());
  bool identical = true;
  for (Eigen::Index i = 0; i < f.size(); ++i) identical = identical && same_bits(back.values[i], f[i]);
  CHECK(identical);
}

TEST_CASE("report JSON")
{
  ConvergenceReport r;
  r.study = "demo";
  r.resolutions = {0.1, 0.05, 0.025};
  r.errors = {1e-2, 2.5e-3, 6.25e-4};
  r.expected_order = 2.0;
  r.tolerance = 0.1;
  r.finalize();
  const json j = report_to_json(r);
  CHECK(j.at("pass").get<bool>());
  CHECK(j.at("fitted_order").get<double>() == doctest::Approx(2.0));
  CHECK(j.at("resolutions").size() == 3);
}

#pragma once

#include "memostrange/macro_solver.hpp"
#include "memostrange/model_params.hpp"
#include "memostrange/verification.hpp"

#include <json.hpp>

#include <filesystem>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace memostrange {

using json = nlohmann::json;

/// Configuration problems; `issues` holds every violation found.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

private:
  std::vector<std::string> issues_;
};

/// Reads and parses a JSON file. Syntax errors are reported with line and
/// column.
json read_json_file(const std::filesystem::path& path);

/// Appends "unknown key: <k>" for every key of `obj` not in `allowed`.
void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                std::vector<std::string>& issues, const std::string& where = "");

json params_to_json(const ModelParams& params);

/// Raw fields are required; derived fields are optional and, when present,
/// must agree with the recomputed values.
ModelParams params_from_json(const json& j, std::vector<std::string>& issues);

json source_to_json(const SourceSpec& spec);
SourceSpec source_from_json(const json& j, const ModelParams& params, SourceRole role,
                            std::vector<std::string>& issues, const std::string& where);

json config_to_json(const RunConfig& config);

/// Strict parse of a RunConfig document: unknown keys are fatal and all
/// violations are reported together.
RunConfig config_from_json(const json& j);
RunConfig load_config(const std::filesystem::path& path);

/// `t,<names>` header and one row per record, 17 significant digits.
void write_series_csv(const Series& series, const std::filesystem::path& path);
Series read_series_csv(const std::filesystem::path& path);

/// Gnuplot script plotting each column of the series CSV against t into an
/// SVG next to the script. The script is written, never executed.
void emit_plot_script(const std::filesystem::path& series_csv,
                      const std::filesystem::path& out_path);

/// `# dims=<a>x<b>x<c> h=<h> t=<t>` followed by one value per line in
/// lexicographic interior order.
void write_field_dump(const Field& field, const Grid& grid, double t,
                      const std::filesystem::path& path);

struct FieldDump {
  std::string dims;
  std::string h;
  double t = 0.0;
  Field values;
};
FieldDump read_field_dump(const std::filesystem::path& path);

json report_to_json(const ConvergenceReport& report);
void write_json(const json& j, const std::filesystem::path& path);

/// Full-precision decimal rendering of a double (round-trips exactly).
std::string format_double(double value);

} // namespace memostrange

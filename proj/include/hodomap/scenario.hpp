#pragma once

#include "hodomap/critical.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace hodomap {

struct DomainSpec {
  std::string kind = "halfdisk";  ///< halfdisk | polygon | graph
  std::string phi = "zero";       ///< graph only: zero | dmo | corner | custom-polyline
  double half_width = 0.5;
  std::vector<Point> vertices;  ///< polygon, counterclockwise
  std::size_t nodal_edges = 1;
  Point anchor{0, 0};
  std::vector<Point> nodes;  ///< custom-polyline
};

/// Either a named closed form or bumps given as fractions of the free part.
struct DataSpec {
  std::string closed_form;
  std::vector<std::array<double, 4>> bumps;  ///< start, peak, end, height
  bool closed() const { return !closed_form.empty(); }
};

struct ScenarioConfig {
  std::string name;
  unsigned long long seed = 0;
  std::string output = "out";
  DomainSpec domain;
  SolverConfig solver;
  DataSpec v, u;
  std::optional<std::array<double, 2>> rect;  ///< nullopt = auto
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3, 1e-6};
  std::size_t gradient_samples = 8192;
  std::string expect_interior = "zero";  ///< zero | positive | any
  std::size_t levels = 10;
  std::size_t probes = 10000;
  std::size_t law_samples = 500;
};

/// INI text: key = value inside [scenario], [domain], [solver], [v], [u],
/// [region], [critical], [checks]. Unknown keys and out-of-range values throw
/// Error("config", ...).
ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text);

Domain build_domain(const DomainSpec& spec);
BoundaryData build_data(const Domain& domain, const DataSpec& spec);

struct FigureData {
  std::vector<Point> boundary;
  std::optional<std::vector<Point>> region;
  std::vector<std::vector<Point>> levels;
  std::vector<Point> critical;        ///< z-plane markers
  std::optional<Rect> image;          ///< image rectangle, drawn as an inset
  std::vector<Point> image_critical;  ///< Z-plane markers inside the inset
  std::vector<std::string> warnings;
};

/// Deterministic SVG on a 1000 x 1000 viewbox.
std::string emit_figure(const FigureData& data);

struct ScenarioResult {
  nlohmann::json report;
  int exit_code = 0;  ///< 0 pass, 1 hard error or failed check, 2 inconclusive
  std::string points_csv, curves_csv, svg;
};

ScenarioResult run_scenario(const ScenarioConfig& config, bool verbose = false);
/// Invariant suites only (no localization, ledger or files).
ScenarioResult verify_scenario(const ScenarioConfig& config, bool verbose = false);
/// report.json, points.csv, curves.csv, figure.svg.
void write_outputs(const ScenarioResult& result, const std::string& dir);

/// Report serialization with every float rounded to 15 significant digits.
std::string dump_report(const nlohmann::json& report);

/// Bundled report schema and a validator for the subset of JSON Schema it
/// uses (type, required, properties, additionalProperties, items, enum,
/// minimum). Returns one message per violation.
const nlohmann::json& report_schema();
std::vector<std::string> validate_against_schema(const nlohmann::json& instance,
                                                 const nlohmann::json& schema);

}  // namespace hodomap

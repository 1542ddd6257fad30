#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "bregaccel/driver.hpp"
#include "bregaccel/model.hpp"
#include "bregaccel/portfolio.hpp"

namespace bregaccel {

/// Returns CSV: header `date,ASSET1,ASSET2,...`, one row per period. With `percent`,
/// every value is divided by 100. Errors carry the 1-based line number.
ReturnPanel parse_returns_csv(std::istream& in, const std::string& source_name, bool percent);
ReturnPanel read_returns_csv(const std::string& path, bool percent);

/// Self-contained problem description. Portfolio problems keep their blocks and returns
/// so the assembled matrices can be rebuilt exactly; generic ones store C, D, A, b.
struct ProblemFile {
  ConstrainedL1Problem problem;
  std::optional<PortfolioModel> portfolio;
  nlohmann::json meta = nlohmann::json::object();
};

inline constexpr const char* kProblemFormat = "bregaccel-problem";
inline constexpr int kProblemFormatVersion = 1;

nlohmann::json problem_to_json(const ProblemFile& file);
ProblemFile problem_from_json(const nlohmann::json& doc, const std::string& source_name);
void write_problem_file(const std::string& path, const ProblemFile& file);
ProblemFile read_problem_file(const std::string& path);

/// A solution vector: either a JSON report with `x_final`/`u`, or whitespace-separated numbers.
Vector read_solution(const std::string& path);

nlohmann::json report_to_json(const SolveReport& report, Index n);
nlohmann::json metrics_to_json(const PortfolioMetrics& metrics);

/// key = value lines, one per scalar field.
std::string report_to_text(const SolveReport& report, Index n,
                           const std::optional<PortfolioMetrics>& metrics);

/// k,violation_A,violation_D,violation,subproblem_value,gamma,branch
std::string trace_to_csv(const SolveReport& report);

}  // namespace bregaccel

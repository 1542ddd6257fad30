#include "bregaccel/problem_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "bregaccel/error.hpp"

namespace bregaccel {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* begin = text.data();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where, 0, "expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError(where, 0, "non-numeric entry at position " + std::to_string(i));
    v[static_cast<Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const json& j, const std::string& where, Index cols_if_empty = 0) {
  if (!j.is_array()) throw InputError(where, 0, "expected an array of rows");
  if (j.empty()) return Matrix(0, cols_if_empty);
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vector row = vector_from_json(j[i], where + " row " + std::to_string(i));
    if (static_cast<std::size_t>(row.size()) != cols) throw InputError(where, 0, "ragged matrix");
    m.row(static_cast<Index>(i)) = row.transpose();
  }
  return m;
}

double number_field(const json& doc, const char* key, const std::string& where) {
  if (!doc.contains(key) || !doc[key].is_number()) throw InputError(where, 0, std::string("missing number `") + key + "`");
  return doc[key].get<double>();
}

}  // namespace

ReturnPanel parse_returns_csv(std::istream& in, const std::string& source_name, bool percent) {
  ReturnPanel panel;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (!have_header) {
      if (cells.size() < 2) throw InputError(source_name, line_no, "header needs a date column and at least one asset");
      panel.asset_names.assign(cells.begin() + 1, cells.end());
      have_header = true;
      continue;
    }
    if (cells.size() != panel.asset_names.size() + 1)
      throw InputError(source_name, line_no,
                       "expected " + std::to_string(panel.asset_names.size() + 1) + " fields, found " +
                           std::to_string(cells.size()));
    std::vector<double> values(panel.asset_names.size());
    for (std::size_t a = 0; a < values.size(); ++a) {
      if (!parse_double(cells[a + 1], values[a]))
        throw InputError(source_name, line_no, "field " + std::to_string(a + 2) + " (`" + cells[a + 1] + "`) is not a number");
      if (percent) values[a] /= 100.0;
      if (values[a] <= -1.0) throw InputError(source_name, line_no, "return at or below -100%");
    }
    panel.periods.push_back(cells[0]);
    rows.push_back(std::move(values));
  }
  if (!have_header) throw InputError(source_name, 0, "empty returns file");
  panel.returns.resize(static_cast<Index>(rows.size()), static_cast<Index>(panel.asset_names.size()));
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t a = 0; a < rows[t].size(); ++a) panel.returns(static_cast<Index>(t), static_cast<Index>(a)) = rows[t][a];
  return panel;
}

ReturnPanel read_returns_csv(const std::string& path, bool percent) {
  std::ifstream in(path);
  if (!in) throw InputError(path, 0, "cannot open file");
  return parse_returns_csv(in, path, percent);
}

json problem_to_json(const ProblemFile& file) {
  json doc;
  doc["format"] = kProblemFormat;
  doc["version"] = kProblemFormatVersion;
  doc["meta"] = file.meta;
  if (file.portfolio) {
    const PortfolioModel& pm = *file.portfolio;
    doc["kind"] = "portfolio";
    doc["n_assets"] = pm.num_assets();
    doc["periods"] = pm.num_periods();
    doc["xi_ini"] = pm.xi_ini;
    doc["xi_fin"] = pm.xi_fin;
    doc["tau1"] = pm.tau1;
    doc["tau2"] = pm.tau2;
    json blocks = json::array();
    for (const Matrix& c : pm.C_blocks) blocks.push_back(matrix_to_json(c));
    doc["C_blocks"] = std::move(blocks);
    json returns = json::array();
    for (const Vector& r : pm.r) returns.push_back(vector_to_json(r));
    doc["r"] = std::move(returns);
  } else {
    const ConstrainedL1Problem& p = file.problem;
    doc["kind"] = "generic";
    doc["n"] = p.n();
    doc["tau1"] = p.tau1;
    doc["tau2"] = p.tau2;
    doc["C"] = matrix_to_json(p.C);
    doc["D"] = matrix_to_json(p.D);
    doc["A"] = matrix_to_json(p.A);
    doc["b"] = vector_to_json(p.b);
  }
  return doc;
}

ProblemFile problem_from_json(const json& doc, const std::string& where) {
  if (!doc.is_object() || doc.value("format", "") != kProblemFormat)
    throw InputError(where, 0, std::string("not a ") + kProblemFormat + " document");
  if (doc.value("version", 0) != kProblemFormatVersion)
    throw InputError(where, 0, "unsupported format version");
  ProblemFile file;
  if (doc.contains("meta")) file.meta = doc["meta"];
  const std::string kind = doc.value("kind", "");
  if (kind == "portfolio") {
    if (!doc.contains("C_blocks") || !doc.contains("r")) throw InputError(where, 0, "portfolio needs C_blocks and r");
    std::vector<Matrix> blocks;
    for (const json& b : doc["C_blocks"]) blocks.push_back(matrix_from_json(b, where + ": C_blocks"));
    std::vector<Vector> returns;
    for (const json& r : doc["r"]) returns.push_back(vector_from_json(r, where + ": r"));
    file.portfolio = build_model(std::move(blocks), std::move(returns), number_field(doc, "xi_ini", where),
                                 number_field(doc, "xi_fin", where), number_field(doc, "tau1", where),
                                 number_field(doc, "tau2", where));
    file.problem = file.portfolio->assembled;
  } else if (kind == "generic") {
    const Index n = static_cast<Index>(number_field(doc, "n", where));
    ConstrainedL1Problem& p = file.problem;
    p.C = matrix_from_json(doc.at("C"), where + ": C", n);
    p.D = matrix_from_json(doc.at("D"), where + ": D", n);
    p.A = matrix_from_json(doc.at("A"), where + ": A", n);
    p.b = vector_from_json(doc.at("b"), where + ": b");
    p.tau1 = number_field(doc, "tau1", where);
    p.tau2 = number_field(doc, "tau2", where);
    p.validate();
  } else {
    throw InputError(where, 0, "unknown problem kind `" + kind + "`");
  }
  return file;
}

void write_problem_file(const std::string& path, const ProblemFile& file) {
  std::ofstream out(path);
  if (!out) throw InputError(path, 0, "cannot open file for writing");
  out << problem_to_json(file).dump(1) << '\n';
  if (!out) throw InputError(path, 0, "write failed");
}

ProblemFile read_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path, 0, "cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& err) {
    throw InputError(path, 0, err.what());
  }
  return problem_from_json(doc, path);
}

Vector read_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path, 0, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const std::string head = trim(text.substr(0, std::min<std::size_t>(text.size(), 64)));
  if (!head.empty() && head.front() == '{') {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& err) {
      throw InputError(path, 0, err.what());
    }
    if (doc.contains("u")) return vector_from_json(doc["u"], path + ": u");
    if (doc.contains("x_final")) return vector_from_json(doc["x_final"], path + ": x_final");
    throw InputError(path, 0, "JSON solution needs `u` or `x_final`");
  }
  std::vector<double> values;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string token;
    while (tokens >> token) {
      double v = 0.0;
      if (!parse_double(token, v)) throw InputError(path, line_no, "`" + token + "` is not a number");
      values.push_back(v);
    }
  }
  return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

json report_to_json(const SolveReport& report, Index n) {
  json doc;
  doc["solver"] = report.solver;
  doc["termination"] = to_string(report.termination);
  doc["outer_iters"] = report.outer_iters;
  doc["accel_steps_taken"] = report.accel_steps_taken;
  doc["accel_steps_rejected"] = report.accel_steps_rejected;
  doc["inner"] = {{"fista_iters", report.inner.fista_iters},
                  {"fista_calls", report.inner.fista_calls},
                  {"cg_iters", report.inner.cg_iters},
                  {"cg_calls", report.inner.cg_calls},
                  {"line_search_trials", report.inner.line_search_trials}};
  doc["wall_time"] = report.wall_time;
  doc["objective"] = report.objective;
  doc["violation_A"] = report.violation_A;
  doc["violation_D"] = report.violation_D;
  doc["lambda"] = report.lambda;
  if (!report.message.empty()) doc["message"] = report.message;
  doc["u"] = vector_to_json(report.x_final.head(n));
  doc["x_final"] = vector_to_json(report.x_final);
  doc["final_shift"] = vector_to_json(report.final_shift);
  json trace = json::array();
  for (const IterationRecord& rec : report.trace)
    trace.push_back({{"k", rec.k},
                     {"violation_A", rec.violation_A},
                     {"violation_D", rec.violation_D},
                     {"violation", rec.violation},
                     {"subproblem_value", rec.subproblem_value},
                     {"gamma", rec.gamma},
                     {"branch", to_string(rec.branch)}});
  doc["trace"] = std::move(trace);
  return doc;
}

namespace {

json stats_to_json(const PositionStats& st) {
  return {{"ratio", std::isfinite(st.ratio) ? json(st.ratio) : json("inf")},
          {"density_pct", st.density_pct},
          {"shorts", st.shorts},
          {"T", st.T_cost},
          {"V_norm1", st.V_norm1},
          {"V_normInf", st.V_normInf}};
}

}  // namespace

json metrics_to_json(const PortfolioMetrics& metrics) {
  return {{"thresholded", stats_to_json(metrics.thresholded)}, {"raw", stats_to_json(metrics.raw)}};
}

std::string report_to_text(const SolveReport& report, Index n, const std::optional<PortfolioMetrics>& metrics) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "solver = " << report.solver << '\n'
      << "termination = " << to_string(report.termination) << '\n'
      << "outer_iters = " << report.outer_iters << '\n'
      << "accel_steps_taken = " << report.accel_steps_taken << '\n'
      << "accel_steps_rejected = " << report.accel_steps_rejected << '\n'
      << "fista_iters = " << report.inner.fista_iters << '\n'
      << "fista_calls = " << report.inner.fista_calls << '\n'
      << "cg_iters = " << report.inner.cg_iters << '\n'
      << "cg_calls = " << report.inner.cg_calls << '\n'
      << "line_search_trials = " << report.inner.line_search_trials << '\n'
      << "wall_time = " << report.wall_time << '\n'
      << "objective = " << report.objective << '\n'
      << "violation_A = " << report.violation_A << '\n'
      << "violation_D = " << report.violation_D << '\n';
  if (!report.message.empty()) out << "message = " << report.message << '\n';
  if (metrics) {
    auto emit = [&](const char* prefix, const PositionStats& st) {
      out << prefix << "ratio = " << st.ratio << '\n'
          << prefix << "density_pct = " << st.density_pct << '\n'
          << prefix << "shorts = " << st.shorts << '\n'
          << prefix << "T = " << st.T_cost << '\n'
          << prefix << "V_norm1 = " << st.V_norm1 << '\n'
          << prefix << "V_normInf = " << st.V_normInf << '\n';
    };
    emit("", metrics->thresholded);
    emit("raw_", metrics->raw);
  }
  out << "u = ";
  out << std::setprecision(17);
  for (Index i = 0; i < n; ++i) out << (i ? " " : "") << report.x_final[i];
  out << '\n';
  return out.str();
}

std::string trace_to_csv(const SolveReport& report) {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "k,violation_A,violation_D,violation,subproblem_value,gamma,branch\n";
  for (const IterationRecord& rec : report.trace)
    out << rec.k << ',' << rec.violation_A << ',' << rec.violation_D << ',' << rec.violation << ','
        << rec.subproblem_value << ',' << rec.gamma << ',' << to_string(rec.branch) << '\n';
  return out.str();
}

}  // namespace bregaccel

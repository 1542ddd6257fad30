#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using bregaccel::cli::run;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct TempDir {
  fs::path root;
  TempDir() {
    root = fs::temp_directory_path() / ("bregaccel_cli_" + std::to_string(::getpid()));
    fs::create_directories(root);
  }
  ~TempDir() { fs::remove_all(root); }
  std::string file(const std::string& name) const { return (root / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(file(name)) << text;
    return file(name);
  }
};

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string returns_csv() {
  std::ostringstream os;
  os << "date,AAA,BBB,CCC\n";
  for (int t = 0; t < 12; ++t) {
    os << "2020-" << (t + 1) << ',' << 0.02 * std::sin(t + 1.0) + 0.01 << ',' << 0.03 * std::cos(0.7 * t) + 0.005
       << ',' << 0.015 * std::sin(2.3 * t + 0.4) + 0.002 << '\n';
  }
  return os.str();
}

std::string field(const std::string& text, const std::string& key) {
  const std::string tag = key + " = ";
  const auto at = text.find("\n" + tag) != std::string::npos ? text.find("\n" + tag) + 1 : text.find(tag);
  if (at != 0 && text.compare(at, tag.size(), tag) != 0) return "";
  const auto end = text.find('\n', at);
  return text.substr(at + tag.size(), end - at - tag.size());
}

}  // namespace

TEST_CASE("synth output is reproducible") {
  TempDir dir;
  const Result a = call({"synth", "--seed", "42", "--n-assets", "3", "--periods", "2"});
  const Result b = call({"synth", "--seed", "42", "--n-assets", "3", "--periods", "2"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(nlohmann::json::parse(a.out)["format"] == "bregaccel-problem");
  CHECK(call({"synth", "--seed", "42", "-o", dir.file("p.json")}).code == 0);
  CHECK(read(dir.file("p.json")) == call({"synth", "--seed", "42"}).out);
  CHECK(call({"synth", "--n-assets", "0"}).code == 1);
}

TEST_CASE("solve on a returns file") {
  TempDir dir;
  const std::string data = dir.write("r.csv", returns_csv());
  const std::vector<std::string> base = {"solve", "--data", data, "--window", "4", "--stride", "2", "--years", "2"};
  const Result r = call(base);
  CHECK(r.code == 0);
  CHECK(field(r.out, "solver") == "sbsa");
  CHECK(field(r.out, "termination") == "converged");
  CHECK(std::stod(field(r.out, "violation_A")) <= 1e-4);
  CHECK_FALSE(field(r.out, "ratio").empty());

  std::vector<std::string> sb = base;
  sb.insert(sb.end(), {"--mode", "sb", "--format", "json", "--plot", dir.file("trace.csv")});
  const Result j = call(sb);
  CHECK(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["solver"] == "sb");
  CHECK(doc["u"].size() == 6);
  CHECK(doc.contains("metrics"));
  const std::string trace = read(dir.file("trace.csv"));
  CHECK(trace.rfind("k,violation_A", 0) == 0);
  CHECK(static_cast<int>(std::count(trace.begin(), trace.end(), '\n')) == doc["trace"].size() + 1);
}

TEST_CASE("solve error reporting") {
  TempDir dir;
  const Result missing = call({"solve", "--data", dir.file("nope.csv")});
  CHECK(missing.code == 1);
  CHECK(missing.err.find(dir.file("nope.csv")) != std::string::npos);

  const std::string bad = dir.write("bad.csv", "date,A,B\nx,0.1,0.2\ny,0.1,oops\n");
  const Result malformed = call({"solve", "--data", bad, "--window", "2", "--stride", "1"});
  CHECK(malformed.code == 1);
  CHECK(malformed.err.find("bad.csv:3") != std::string::npos);

  CHECK(call({"solve"}).code == 1);
  CHECK(call({"solve", "--data", bad, "--problem", bad}).code == 1);
  CHECK(call({"frobnicate"}).code == 1);
  CHECK(call({"--help"}).code == 0);
  const std::string p = dir.file("p.json");
  call({"synth", "-o", p});
  CHECK(call({"solve", "--problem", p, "--mode", "fast"}).code == 1);
  CHECK(call({"solve", "--problem", p, "--format", "xml"}).code == 1);
  CHECK(call({"solve", "--problem", p, "--tol-b", "-1"}).code == 1);
}

TEST_CASE("config file precedence") {
  TempDir dir;
  const std::string p = dir.file("p.json");
  REQUIRE(call({"synth", "--seed", "3", "--eig-min", "0.1", "--eig-max", "1", "--return-sd", "0.1", "-o", p}).code == 0);
  const std::string cfg = dir.write("run.cfg", "# settings\nmode = sb\nmax-outer = 1\n");
  const Result from_file = call({"solve", "--problem", p, "--config", cfg});
  CHECK(field(from_file.out, "solver") == "sb");
  CHECK(field(from_file.out, "outer_iters") == "1");
  CHECK(from_file.code == 2);

  const Result overridden = call({"solve", "--problem", p, "--config", cfg, "--max-outer", "10000"});
  CHECK(field(overridden.out, "solver") == "sb");
  CHECK(overridden.code == 0);

  const std::string bad = dir.write("bad.cfg", "mode = sb\n\nspeed = 11\n");
  const Result r = call({"solve", "--problem", p, "--config", bad});
  CHECK(r.code == 1);
  CHECK(r.err.find("bad.cfg:3") != std::string::npos);
}

TEST_CASE("compare prints one row per solver") {
  TempDir dir;
  const std::string p = dir.file("p.json");
  REQUIRE(call({"synth", "--seed", "9", "--eig-min", "0.1", "--eig-max", "1", "--return-sd", "0.1", "-o", p}).code == 0);
  const Result a = call({"compare", "--problem", p, "--format", "csv", "--csv", dir.file("t.csv")});
  CHECK(a.code == 0);
  std::istringstream lines(a.out);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::istringstream cs(line);
    std::string cell;
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  REQUIRE(rows.size() == 5);
  CHECK(rows[1][0] == "sbsa");
  CHECK(rows[2][0] == "sbsa_lsa");
  CHECK(rows[3][0] == "sb");
  CHECK(rows[4][0] == "admm");
  CHECK(read(dir.file("t.csv")) == a.out);

  const Result b = call({"compare", "--problem", p, "--format", "csv"});
  std::istringstream again(b.out);
  for (const auto& row : rows) {
    std::getline(again, line);
    std::vector<std::string> cells;
    std::istringstream cs(line);
    std::string cell;
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == row.size());
    for (std::size_t i = 0; i < row.size(); ++i)
      if (i != 1) CHECK(cells[i] == row[i]);
  }

  const Result capped = call({"compare", "--problem", p, "--admm-max-iters", "1"});
  CHECK(capped.code == 0);
  const auto admm_row = capped.out.find("\nadmm ");
  REQUIRE(admm_row != std::string::npos);
  const std::string admm_line = capped.out.substr(admm_row + 1, capped.out.find('\n', admm_row + 1) - admm_row - 1);
  CHECK(admm_line.find("---") != std::string::npos);
  CHECK(admm_line.find("converged") == std::string::npos);
  CHECK(capped.out.find("# admm: ") != std::string::npos);
  CHECK(call({"compare", "--problem", p, "--mode", "sb"}).code == 1);
}

TEST_CASE("metrics of a stored solution") {
  TempDir dir;
  const std::string p = dir.file("p.json");
  REQUIRE(call({"synth", "--seed", "4", "--eig-min", "0.1", "--eig-max", "1", "--return-sd", "0.1", "-o", p}).code == 0);
  REQUIRE(call({"solve", "--problem", p, "--format", "json", "-o", dir.file("s.json")}).code == 0);
  const Result m = call({"metrics", "--problem", p, "--solution", dir.file("s.json")});
  CHECK(m.code == 0);
  const Result s = call({"solve", "--problem", p});
  CHECK(field(m.out, "ratio") == field(s.out, "ratio"));
  CHECK(field(m.out, "raw_density_pct") == field(s.out, "raw_density_pct"));
  const Result j = call({"metrics", "--problem", p, "--solution", dir.file("s.json"), "--format", "json"});
  CHECK(nlohmann::json::parse(j.out).contains("raw"));
  CHECK(call({"metrics", "--problem", p}).code == 1);
  const std::string shortsol = dir.write("short.txt", "0.5\n");
  CHECK(call({"metrics", "--problem", p, "--solution", shortsol}).code == 1);
}

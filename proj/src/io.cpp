#include "hpq/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hpq/error.hpp"

namespace hpq {

using nlohmann::json;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double round_sig(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             const std::string& what) {
  fail(ErrorCode::ParseError, path + ":" + std::to_string(line) + ": " + what);
}

std::vector<double> split_csv_line(const std::string& text, const std::string& path,
                                   std::size_t line_no) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string field = text.substr(pos, comma - pos);
    if (field.empty()) parse_fail(path, line_no, "empty field");
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
    if (!end || *end != '\0') parse_fail(path, line_no, "not a number: '" + field + "'");
    if (!std::isfinite(v)) parse_fail(path, line_no, "non-finite value");
    out.push_back(v);
    pos = comma + 1;
    if (comma == text.size()) break;
  }
  return out;
}

Matrix read_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, path + ": cannot open");
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) parse_fail(path, 1, "missing header");
  ++line_no;
  std::size_t rows = 0, cols = 0;
  {
    std::istringstream hs(line);
    char comma = 0;
    if (!(hs >> rows >> comma >> cols) || comma != ',' || rows == 0 || cols == 0)
      parse_fail(path, 1, "header must be 'rows,cols'");
  }
  Matrix M(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) parse_fail(path, line_no + 1, "unexpected end of file");
    ++line_no;
    const auto vals = split_csv_line(line, path, line_no);
    if (vals.size() != cols)
      parse_fail(path, line_no,
                 "expected " + std::to_string(cols) + " values, got " +
                     std::to_string(vals.size()));
    for (std::size_t j = 0; j < cols; ++j) M(i, j) = vals[j];
  }
  return M;
}

void write_csv_table(const std::string& path, const Matrix& M) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ParseError, path + ": cannot open for writing");
  out << M.rows() << "," << M.cols() << "\n";
  for (std::size_t i = 0; i < M.rows(); ++i) {
    for (std::size_t j = 0; j < M.cols(); ++j) {
      if (j) out << ",";
      out << format_number(M(i, j));
    }
    out << "\n";
  }
}

Point2 parse_point(const json& j, const std::string& path, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(ErrorCode::ParseError, path + ": " + what + " must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, path + ": cannot open");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
  return j;
}

}  // namespace

Matrix read_matrix_csv(const std::string& path) { return read_csv_table(path); }

void write_matrix_csv(const std::string& path, const Matrix& M) {
  write_csv_table(path, M);
}

Vector read_vector_csv(const std::string& path) {
  Matrix M = read_csv_table(path);
  if (M.cols() != 1)
    fail(ErrorCode::ParseError, path + ": expected a single-column vector file");
  return M.data();
}

void write_vector_csv(const std::string& path, const Vector& v) {
  Matrix M(v.size(), 1);
  M.data() = v;
  write_csv_table(path, M);
}

DelayTable read_delays_csv(const std::string& path) {
  Matrix M = read_csv_table(path);
  DelayTable t(M.rows(), M.cols());
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t k = 0; k < M.cols(); ++k) t.at(i, k) = M(i, k) * 1e-9;
  return t;
}

void write_delays_csv(const std::string& path, const DelayTable& table) {
  Matrix M(table.receiver_rows, table.target_cols);
  for (std::size_t i = 0; i < table.receiver_rows; ++i)
    for (std::size_t k = 0; k < table.target_cols; ++k)
      M(i, k) = table.at(i, k) * 1e9;
  write_csv_table(path, M);
}

SceneFile read_scene_json(const std::string& path) {
  const json j = load_json(path);
  SceneFile f;
  try {
    if (!j.contains("receivers") || !j["receivers"].is_array())
      fail(ErrorCode::ParseError, path + ": missing receivers array");
    for (const auto& r : j["receivers"])
      f.scene.receivers.push_back(parse_point(r, path, "receiver"));
    if (j.contains("targets"))
      for (const auto& t : j["targets"])
        f.scene.targets.push_back(parse_point(t, path, "target"));
    f.scene.c = j.value("c", 3e8);
    f.scene.noise_sigma = j.value("noise_sigma_ns", 0.0) * 1e-9;
    if (!j.contains("zone") || !j.contains("grid"))
      fail(ErrorCode::ParseError, path + ": missing zone or grid");
    f.zone_min = parse_point(j["zone"].at("min"), path, "zone.min");
    f.zone_max = parse_point(j["zone"].at("max"), path, "zone.max");
    f.nx = j["grid"].value("nx", 0);
    f.ny = j["grid"].value("ny", 0);
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
  f.scene.validate();
  require(f.nx >= 2 && f.ny >= 2, ErrorCode::ParseError, path + ": grid needs nx, ny >= 2");
  auto inside = [&](const Point2& p) {
    return p.x >= f.zone_min.x && p.x <= f.zone_max.x && p.y >= f.zone_min.y &&
           p.y <= f.zone_max.y;
  };
  for (const auto& r : f.scene.receivers)
    require(inside(r), ErrorCode::ParseError, path + ": receiver outside zone");
  for (const auto& t : f.scene.targets)
    require(inside(t), ErrorCode::ParseError, path + ": target outside zone");
  return f;
}

void write_scene_json(const std::string& path, const SceneFile& f) {
  json j;
  for (const auto& r : f.scene.receivers)
    j["receivers"].push_back({round_sig(r.x), round_sig(r.y)});
  for (const auto& t : f.scene.targets)
    j["targets"].push_back({round_sig(t.x), round_sig(t.y)});
  j["c"] = round_sig(f.scene.c);
  j["noise_sigma_ns"] = round_sig(f.scene.noise_sigma * 1e9);
  j["zone"]["min"] = {round_sig(f.zone_min.x), round_sig(f.zone_min.y)};
  j["zone"]["max"] = {round_sig(f.zone_max.x), round_sig(f.zone_max.y)};
  j["grid"]["nx"] = f.nx;
  j["grid"]["ny"] = f.ny;
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ParseError, path + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

LocatorConfig read_locator_config_json(const std::string& path) {
  const json j = load_json(path);
  LocatorConfig cfg;
  try {
    cfg.surrogate = SurrogateParams(j.value("p", 0.1), j.value("q", 1.0));
    cfg.a = j.value("a", 0.5);
    cfg.G = j.value("G", 2);
    cfg.delta = j.value("delta", 0.0);
    cfg.epsilon_score = j.value("epsilon_score", 0.3);
    cfg.K = j.at("K").get<std::size_t>();
    cfg.U = j.value("U", 0);
    cfg.refine = j.value("refine", true);
    cfg.solver = SolverConfig::constrained_defaults();
    cfg.solver.max_iters = j.value("max_iters", cfg.solver.max_iters);
    cfg.solver.eta = j.value("eta", cfg.solver.eta);
    if (j.contains("va")) {
      cfg.solver.va_low = j["va"].at(0).get<double>();
      cfg.solver.va_high = j["va"].at(1).get<double>();
    }
    if (j.contains("epsilon")) cfg.epsilon_override = j["epsilon"].get<double>();
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

void SweepSpec::validate() const {
  require(!receiver_counts.empty(), ErrorCode::ParseError, "sweep: no receiver counts");
  require(!target_counts.empty(), ErrorCode::ParseError, "sweep: no target counts");
  require(!noise_ns.empty(), ErrorCode::ParseError, "sweep: no noise levels");
  require(trials >= 1, ErrorCode::ParseError, "sweep: trials must be >= 1");
  for (int m : receiver_counts)
    require(m >= 2, ErrorCode::ParseError, "sweep: receiver count must be >= 2");
  for (int k : target_counts)
    require(k >= 1, ErrorCode::ParseError, "sweep: target count must be >= 1");
  for (double s : noise_ns)
    require(s >= 0.0, ErrorCode::ParseError, "sweep: negative noise");
  require(offgrid_fraction >= 0.0 && offgrid_fraction <= 1.0, ErrorCode::ParseError,
          "sweep: offgrid_fraction in [0, 1]");
  require(nx >= 2 && ny >= 2, ErrorCode::ParseError, "sweep: grid needs nx, ny >= 2");
}

SweepSpec read_sweep_spec_json(const std::string& path) {
  const json j = load_json(path);
  SweepSpec s;
  try {
    for (const auto& v : j.at("receivers")) s.receiver_counts.push_back(v.get<int>());
    for (const auto& v : j.at("K")) s.target_counts.push_back(v.get<int>());
    for (const auto& v : j.at("noise_ns")) s.noise_ns.push_back(v.get<double>());
    s.trials = j.at("trials").get<int>();
    s.seed = j.value("seed", 1);
    if (j.contains("zone")) {
      s.zone_min = parse_point(j["zone"].at("min"), path, "zone.min");
      s.zone_max = parse_point(j["zone"].at("max"), path, "zone.max");
    }
    if (j.contains("grid")) {
      s.nx = j["grid"].value("nx", 21);
      s.ny = j["grid"].value("ny", 21);
    }
    s.c = j.value("c", 3e8);
    s.on_grid = j.value("on_grid", true);
    s.offgrid_fraction = j.value("offgrid_fraction", 0.5);
    s.threads = j.value("threads", 0);

    const json loc = j.value("locator", json::object());
    s.locator.surrogate = SurrogateParams(loc.value("p", 0.1), loc.value("q", 1.0));
    s.locator.a = loc.value("a", 0.5);
    s.locator.G = loc.value("G", 2);
    s.locator.epsilon_score = loc.value("epsilon_score", 0.3);
    s.locator.refine = loc.value("refine", true);
    s.locator.solver = SolverConfig::constrained_defaults();
    s.locator.solver.max_iters = loc.value("max_iters", s.locator.solver.max_iters);
    s.locator.solver.eta = loc.value("eta", s.locator.solver.eta);
    if (loc.contains("va")) {
      s.locator.solver.va_low = loc["va"].at(0).get<double>();
      s.locator.solver.va_high = loc["va"].at(1).get<double>();
    }
    if (loc.contains("epsilon")) s.locator.epsilon_override = loc["epsilon"].get<double>();
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
  s.validate();
  return s;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, path + ": cannot open");
  std::uint64_t h = 1469598103934665603ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hpq

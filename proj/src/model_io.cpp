#include "cutplane/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cutplane {

namespace {

using nlohmann::json;

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector vector_from_json(const json& a) {
  Vector v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    v(static_cast<int>(i)) = a[i].get<double>();
  return v;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, int expect_cols) {
  const int nr = static_cast<int>(rows.size());
  int nc = expect_cols;
  if (nr > 0) nc = static_cast<int>(rows[0].size());
  Matrix m = Matrix::Zero(nr, nc < 0 ? 0 : nc);
  for (int r = 0; r < nr; ++r) {
    const json& row = rows[static_cast<std::size_t>(r)];
    if (static_cast<int>(row.size()) != m.cols())
      throw InvalidProgramError("ragged matrix in model file");
    for (int c = 0; c < m.cols(); ++c)
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json realization_to_json(const StageRealization& real) {
  json o;
  o["A"] = matrix_to_json(real.A);
  o["B"] = matrix_to_json(real.B);
  o["rhs"] = vector_to_json(real.rhs);
  o["cost"] = vector_to_json(real.cost);
  o["probability"] = real.probability;
  json kinds = json::array();
  for (RowKind k : real.row_kinds)
    kinds.push_back(k == RowKind::Equality ? "eq" : "le");
  o["row_kinds"] = std::move(kinds);
  json frees = json::array();
  for (std::size_t i = 0; i < real.free_vars.size(); ++i)
    if (real.free_vars[i]) frees.push_back(static_cast<int>(i));
  if (!frees.empty()) o["free_vars"] = std::move(frees);
  return o;
}

StageRealization realization_from_json(const json& o) {
  StageRealization real;
  real.rhs = vector_from_json(o.at("rhs"));
  real.cost = vector_from_json(o.at("cost"));
  real.A = matrix_from_json(o.at("A"), static_cast<int>(real.cost.size()));
  real.B = matrix_from_json(o.at("B"), -1);
  real.probability = o.at("probability").get<double>();
  for (const json& k : o.at("row_kinds")) {
    const std::string s = k.get<std::string>();
    if (s == "eq")
      real.row_kinds.push_back(RowKind::Equality);
    else if (s == "le")
      real.row_kinds.push_back(RowKind::LessEq);
    else
      throw InvalidProgramError("unknown row kind '" + s + "'");
  }
  if (o.contains("free_vars")) {
    real.free_vars.assign(static_cast<std::size_t>(real.decision_dim()), 0);
    for (const json& idx : o.at("free_vars")) {
      const int i = idx.get<int>();
      if (i < 0 || i >= real.decision_dim())
        throw InvalidProgramError("free variable index out of range");
      real.free_vars[static_cast<std::size_t>(i)] = 1;
    }
  }
  return real;
}

}  // namespace

std::string serialize_program(const StochasticProgram& program) {
  json o;
  o["format"] = kModelFormat;
  o["num_stages"] = program.num_stages;
  o["initial_state"] = vector_to_json(program.initial_state);
  if (program.terminal_cost.size() != 0)
    o["terminal_cost"] = vector_to_json(program.terminal_cost);
  if (program.recourse_lower_bounds.size() != 0)
    o["recourse_lower_bounds"] = vector_to_json(program.recourse_lower_bounds);
  json stages = json::array();
  for (const auto& stage : program.stages) {
    json reals = json::array();
    for (const auto& real : stage) reals.push_back(realization_to_json(real));
    stages.push_back(std::move(reals));
  }
  o["stages"] = std::move(stages);
  return o.dump(2);
}

StochasticProgram parse_program(const std::string& text) {
  json o;
  try {
    o = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidProgramError(std::string("model parse error: ") + e.what());
  }
  try {
    if (!o.contains("format") || o.at("format").get<std::string>() != kModelFormat)
      throw InvalidProgramError(std::string("model file is not ") + kModelFormat);
    StochasticProgram p;
    p.num_stages = o.at("num_stages").get<int>();
    p.initial_state = vector_from_json(o.at("initial_state"));
    if (o.contains("terminal_cost"))
      p.terminal_cost = vector_from_json(o.at("terminal_cost"));
    if (o.contains("recourse_lower_bounds"))
      p.recourse_lower_bounds = vector_from_json(o.at("recourse_lower_bounds"));
    for (const json& stage : o.at("stages")) {
      std::vector<StageRealization> reals;
      for (const json& r : stage) reals.push_back(realization_from_json(r));
      p.stages.push_back(std::move(reals));
    }
    return p;
  } catch (const json::exception& e) {
    throw InvalidProgramError(std::string("model field error: ") + e.what());
  }
}

void save_program(const std::string& path, const StochasticProgram& program) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << serialize_program(program) << "\n";
}

StochasticProgram load_program(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_program(buf.str());
}

}  // namespace cutplane

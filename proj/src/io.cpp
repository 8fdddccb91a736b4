#include "cvp/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cvp {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CvpError("cannot open " + path + " for writing");
  out << "{\n  \"dim\": " << inst.dim << ",\n  \"points\": [";
  for (Index i = 0; i < inst.size(); ++i) {
    out << (i ? ", [" : "[");
    for (int a = 0; a < inst.dim; ++a)
      out << (a ? ", " : "") << format_double(inst.points(i, a));
    out << "]";
  }
  out << "],\n  \"weights\": [";
  for (Index i = 0; i < inst.size(); ++i)
    out << (i ? ", " : "") << format_double(inst.weights[i]);
  out << "],\n  \"kernel\": {\"name\": \"" << kernel_kind_name(inst.kernel.kind)
      << "\", \"range\": " << format_double(inst.kernel.range)
      << ", \"amplitude\": " << format_double(inst.kernel.amplitude)
      << ", \"cone_slope\": " << format_double(inst.kernel.cone_slope) << "},\n";
  out << "  \"s_param\": " << format_double(inst.s_param) << ",\n  \"periodic\": [";
  for (int a = 0; a < inst.dim; ++a) {
    const double p = a < static_cast<int>(inst.periodic.size()) ? inst.periodic[a] : 0.0;
    out << (a ? ", " : "");
    if (p > 0.0)
      out << format_double(p);
    else
      out << "null";
  }
  out << "]\n}\n";
}

Instance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CvpError("cannot open instance file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw CvpError("instance file " + path + ": " + e.what());
  }
  Instance inst;
  try {
    inst.dim = j.at("dim").get<int>();
    const auto& pts = j.at("points");
    inst.points = Mat::Zero(static_cast<Index>(pts.size()), inst.dim);
    for (Index i = 0; i < inst.points.rows(); ++i) {
      const auto& row = pts.at(i);
      if (static_cast<int>(row.size()) != inst.dim)
        throw CvpError("point " + std::to_string(i) + " has wrong dimension");
      for (int a = 0; a < inst.dim; ++a) inst.points(i, a) = row.at(a).get<double>();
    }
    const auto& ws = j.at("weights");
    inst.weights = Vec::Zero(static_cast<Index>(ws.size()));
    for (Index i = 0; i < inst.weights.size(); ++i) inst.weights[i] = ws.at(i).get<double>();
    const auto& k = j.at("kernel");
    inst.kernel.kind = kernel_kind_from_name(k.at("name").get<std::string>());
    inst.kernel.range = k.at("range").get<double>();
    inst.kernel.amplitude = k.at("amplitude").get<double>();
    if (k.contains("cone_slope") && !k.at("cone_slope").is_null())
      inst.kernel.cone_slope = k.at("cone_slope").get<double>();
    inst.s_param = j.at("s_param").get<double>();
    inst.periodic.assign(inst.dim, 0.0);
    if (j.contains("periodic") && !j.at("periodic").is_null()) {
      const auto& per = j.at("periodic");
      for (int a = 0; a < inst.dim && a < static_cast<int>(per.size()); ++a)
        if (!per.at(a).is_null()) inst.periodic[a] = per.at(a).get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw CvpError("instance file " + path + ": " + e.what());
  }
  validate_instance(inst);
  return inst;
}

void write_jet(const Instance& inst, const Vec& v, const std::string& path) {
  if (v.size() != inst.coeff_count()) throw CvpError("write_jet: coefficient length mismatch");
  std::ofstream out(path);
  if (!out) throw CvpError("cannot open " + path + " for writing");
  out << "[";
  for (Index c = 0; c < v.size(); ++c) out << (c ? ", " : "") << format_double(v[c]);
  out << "]\n";
}

Vec read_jet(const Instance& inst, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CvpError("cannot open jet file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw CvpError("jet file " + path + ": " + e.what());
  }
  if (!j.is_array() || static_cast<Index>(j.size()) != inst.coeff_count())
    throw CvpError("jet file " + path + ": expected array of length " +
                   std::to_string(inst.coeff_count()));
  Vec v(inst.coeff_count());
  for (Index c = 0; c < v.size(); ++c) v[c] = j.at(c).get<double>();
  return v;
}

void write_matrix_csv(const Mat& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CvpError("cannot open " + path + " for writing");
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << "\n";
  }
}

Mat read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CvpError("cannot open matrix file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && rows.front().size() != row.size())
      throw CvpError("matrix file " + path + ": ragged row " + std::to_string(rows.size()));
    rows.push_back(std::move(row));
  }
  Mat m(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows[0].size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_relation_csv(const CausalRelation& rel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CvpError("cannot open " + path + " for writing");
  out << "i,j\n";
  for (Index x = 0; x < rel.n; ++x)
    for (Index y = 0; y < rel.n; ++y)
      if (rel.pairs[x][y]) out << x << "," << y << "\n";
}

void write_relation_dot(const CausalRelation& rel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CvpError("cannot open " + path + " for writing");
  out << "digraph causal {\n";
  for (Index x = 0; x < rel.n; ++x)
    for (Index y = 0; y < rel.n; ++y)
      if (rel.pairs[x][y]) out << "  p" << x << " -> p" << y << ";\n";
  out << "}\n";
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::string>& inputs, const std::string& params_json,
                    double wall_seconds) {
  std::ofstream out(path);
  if (!out) throw CvpError("cannot open " + path + " for writing");
  out << "{\n  \"tool\": \"cvp 0.1.0\",\n  \"command\": \"" << command << "\",\n  \"inputs\": [";
  for (std::size_t k = 0; k < inputs.size(); ++k)
    out << (k ? ", " : "") << "\"" << inputs[k] << "\"";
  out << "],\n  \"parameters\": " << (params_json.empty() ? "{}" : params_json)
      << ",\n  \"wall_seconds\": " << format_double(wall_seconds) << "\n}\n";
}

}  // namespace cvp

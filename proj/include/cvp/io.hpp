#ifndef CVP_IO_HPP
#define CVP_IO_HPP

#include <string>

#include "cvp/cones.hpp"

namespace cvp {

// Instance files are JSON documents with all numbers printed to 17
// significant digits so reload reproduces them bit-exactly.
void write_instance(const Instance& inst, const std::string& path);
Instance read_instance(const std::string& path);

void write_jet(const Instance& inst, const Vec& v, const std::string& path);
Vec read_jet(const Instance& inst, const std::string& path);

void write_matrix_csv(const Mat& m, const std::string& path);
Mat read_matrix_csv(const std::string& path);

void write_relation_csv(const CausalRelation& rel, const std::string& path);
void write_relation_dot(const CausalRelation& rel, const std::string& path);

// Every CLI run emits a manifest: command, inputs, parameters, version,
// wall time. `params_json` is a pre-rendered JSON object.
void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::string>& inputs, const std::string& params_json,
                    double wall_seconds);

std::string format_double(double x);  // 17 significant digits

}  // namespace cvp

#endif

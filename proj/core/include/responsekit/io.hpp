#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "responsekit/kernels.hpp"
#include "responsekit/paths.hpp"
#include "responsekit/response.hpp"
#include "responsekit/signature.hpp"
#include "responsekit/srnn.hpp"
#include "responsekit/volterra.hpp"

namespace responsekit::io {

using nlohmann::json;

// Path CSV: header `t,x1,...,xd`, one row per sample.
Path read_path_csv(const std::filesystem::path& file);
Path parse_path_csv(const std::string& text);
std::string format_path_csv(const Path& p);
void write_path_csv(const Path& p, const std::filesystem::path& file);

// Writes text to a sibling temporary and renames it over `file`.
void write_file_atomic(const std::filesystem::path& file, const std::string& text);
std::string read_file(const std::filesystem::path& file);

// {dim, level, levels: [[...], ...]}
json to_json(const TruncatedSignature& s);
TruncatedSignature signature_from_json(const json& j);

json to_json(const Path& p);
Path path_from_json(const json& j, const std::string& field = "path");

json to_json(const PolyBasis& b);
PolyBasis basis_from_json(const json& j, const std::string& field = "basis");
json to_json(const KernelSpec& s);
KernelSpec kernel_spec_from_json(const json& j, const std::string& field = "kernel");

json to_json(const SrnnParams& p);
SrnnParams srnn_from_json(const json& j, const std::string& field = "srnn");

json to_json(const ImpulseSpec& s);
ImpulseSpec impulse_from_json(const json& j, const std::string& field = "impulse");

// {orders, grid, kernels: {"1": [...], ...}}; arrays in storage order.
json to_json(const VolterraKernels& k);
VolterraKernels volterra_from_json(const json& j, const std::string& field = "kernels");

std::string format_matrix_csv(const Eigen::MatrixXd& m);
// t,h1..hn
std::string format_trajectory_csv(const Trajectory& tr);
// tau,impulse,correlation,stderr_i,stderr_c
std::string format_fdt_csv(const std::vector<FdtRow>& rows);

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& field);
Eigen::VectorXd vector_from_json(const json& j, const std::string& field);
json to_json(const Eigen::MatrixXd& m);
json to_json(const Eigen::VectorXd& v);

}  // namespace responsekit::io

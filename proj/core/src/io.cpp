#include "responsekit/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "responsekit/error.hpp"

namespace responsekit::io {

namespace {

std::string join(const std::string& field, const std::string& key) {
  return field.empty() ? key : field + "." + key;
}

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::config_error, field + ": " + what, field);
}

const json& need(const json& j, const std::string& key, const std::string& field) {
  if (!j.is_object()) bad(field, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(join(field, key), "missing required field");
  return *it;
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) bad(field, "expected an integer");
  return j.get<int>();
}

std::string text(const json& j, const std::string& field) {
  if (!j.is_string()) bad(field, "expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& field) {
  if (!j.is_array()) bad(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

// ---- path CSV -------------------------------------------------------------

Path parse_path_csv(const std::string& content) {
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  std::vector<double> times, values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (line_no == 1 && !cells.empty() && cells[0] == "t") {
      dim = cells.size() - 1;
      continue;
    }
    if (dim == 0) dim = cells.size() - 1;
    if (cells.size() != dim + 1 || dim == 0)
      throw Error(ErrorCode::corrupt_file,
                  "path CSV line " + std::to_string(line_no) + " has the wrong number of columns");
    for (std::size_t k = 0; k < cells.size(); ++k) {
      double v = 0.0;
      const char* b = cells[k].data();
      while (*b == ' ') ++b;
      auto res = std::from_chars(b, cells[k].data() + cells[k].size(), v);
      if (res.ec != std::errc())
        throw Error(ErrorCode::corrupt_file, "path CSV line " + std::to_string(line_no) +
                                                 ": cannot parse '" + cells[k] + "'");
      (k == 0 ? times : values).push_back(v);
    }
  }
  if (dim == 0) throw Error(ErrorCode::corrupt_file, "path CSV has no data");
  return Path::make(std::move(times), std::move(values), dim);
}

Path read_path_csv(const std::filesystem::path& file) { return parse_path_csv(read_file(file)); }

std::string format_path_csv(const Path& p) {
  std::string out = "t";
  for (std::size_t k = 1; k <= p.dim(); ++k) out += ",x" + std::to_string(k);
  out += "\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    out += fmt(p.times()[i]);
    for (double v : p.value(i)) out += "," + fmt(v);
    out += "\n";
  }
  return out;
}

void write_path_csv(const Path& p, const std::filesystem::path& file) {
  write_file_atomic(file, format_path_csv(p));
}

// ---- files -----------------------------------------------------------------

void write_file_atomic(const std::filesystem::path& file, const std::string& content) {
  std::error_code ec;
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path(), ec);
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::io_error, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, file, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot rename onto " + file.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- signatures and paths --------------------------------------------------

json to_json(const TruncatedSignature& s) {
  json levels = json::array();
  for (int n = 0; n <= s.level(); ++n) {
    auto d = s.level_data(n);
    levels.push_back(std::vector<double>(d.begin(), d.end()));
  }
  return {{"dim", s.dim()}, {"level", s.level()}, {"levels", levels}};
}

TruncatedSignature signature_from_json(const json& j) {
  try {
    auto s = TruncatedSignature::zero(j.at("dim").get<std::size_t>(), j.at("level").get<int>());
    for (int n = 0; n <= s.level(); ++n) {
      auto v = j.at("levels").at(static_cast<std::size_t>(n)).get<std::vector<double>>();
      auto d = s.level_data(n);
      if (v.size() != d.size()) throw Error(ErrorCode::corrupt_file, "signature level size mismatch");
      std::copy(v.begin(), v.end(), d.begin());
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::corrupt_file, std::string("malformed signature: ") + e.what());
  }
}

json to_json(const Path& p) {
  json values = json::array();
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto v = p.value(i);
    values.push_back(std::vector<double>(v.begin(), v.end()));
  }
  return {{"times", std::vector<double>(p.times().begin(), p.times().end())}, {"values", values}};
}

Path path_from_json(const json& j, const std::string& field) {
  auto times = numbers(need(j, "times", field), join(field, "times"));
  const auto& vals = need(j, "values", field);
  if (!vals.is_array()) bad(join(field, "values"), "expected an array");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const std::string f = join(field, "values") + "[" + std::to_string(i) + "]";
    rows.push_back(vals[i].is_number() ? std::vector<double>{vals[i].get<double>()}
                                       : numbers(vals[i], f));
  }
  try {
    return Path::make(std::move(times), rows);
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), field);
  }
}

// ---- kernels ---------------------------------------------------------------

json to_json(const PolyBasis& b) {
  return {{"kind", b.kind == PolyBasis::Kind::monomial ? "monomial" : "legendre"},
          {"degree", b.degree},
          {"domain", {b.t_begin, b.t_end}}};
}

PolyBasis basis_from_json(const json& j, const std::string& field) {
  PolyBasis b;
  if (!j.is_object()) bad(field, "expected an object");
  if (j.contains("kind")) {
    const auto kind = text(j["kind"], join(field, "kind"));
    if (kind == "monomial") b.kind = PolyBasis::Kind::monomial;
    else if (kind == "legendre") b.kind = PolyBasis::Kind::legendre;
    else bad(join(field, "kind"), "unknown basis '" + kind + "' (monomial, legendre)");
  }
  if (j.contains("degree")) b.degree = integer(j["degree"], join(field, "degree"));
  if (j.contains("domain")) {
    const auto d = numbers(j["domain"], join(field, "domain"));
    if (d.size() != 2) bad(join(field, "domain"), "expected [t_begin, t_end]");
    b.t_begin = d[0];
    b.t_end = d[1];
  }
  try {
    b.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::config_error, e.what(), join(field, e.field().substr(e.field().find('.') + 1)));
  }
  return b;
}

json to_json(const KernelSpec& s) {
  return {{"kind", s.kind == KernelSpec::Kind::piecewise_exp ? "piecewise_exp" : "fock_truncated"},
          {"level", s.level},
          {"basis", to_json(s.basis)},
          {"segment_grid", s.segment_grid},
          {"refinement", s.refinement},
          {"normalize_variation", s.normalize_variation}};
}

KernelSpec kernel_spec_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) bad(field, "expected an object");
  KernelSpec s;
  if (j.contains("kind")) {
    const auto kind = text(j["kind"], join(field, "kind"));
    if (kind == "piecewise_exp") s.kind = KernelSpec::Kind::piecewise_exp;
    else if (kind == "fock_truncated") s.kind = KernelSpec::Kind::fock_truncated;
    else bad(join(field, "kind"), "unknown kernel '" + kind + "' (piecewise_exp, fock_truncated)");
  }
  if (j.contains("level")) s.level = integer(j["level"], join(field, "level"));
  if (j.contains("basis")) s.basis = basis_from_json(j["basis"], join(field, "basis"));
  if (j.contains("refinement")) s.refinement = integer(j["refinement"], join(field, "refinement"));
  if (j.contains("normalize_variation")) {
    if (!j["normalize_variation"].is_boolean()) bad(join(field, "normalize_variation"), "expected a boolean");
    s.normalize_variation = j["normalize_variation"].get<bool>();
  }
  if (j.contains("segment_grid")) {
    s.segment_grid = numbers(j["segment_grid"], join(field, "segment_grid"));
  } else if (s.kind == KernelSpec::Kind::piecewise_exp) {
    const int L = j.contains("segments") ? integer(j["segments"], join(field, "segments")) : 10;
    if (L < 1) bad(join(field, "segments"), "must be >= 1");
    s.segment_grid = uniform_grid(s.basis.t_begin, s.basis.t_end, static_cast<std::size_t>(L));
  }
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::config_error, e.what(), field);
  }
  return s;
}

// ---- SRNN ------------------------------------------------------------------

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& field) {
  if (j.is_number()) return Eigen::MatrixXd::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) bad(field, "expected a matrix (array of rows)");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Eigen::MatrixXd m;
  for (std::size_t i = 0; i < rows; ++i) {
    const auto row = j[i].is_number() ? std::vector<double>{j[i].get<double>()}
                                      : numbers(j[i], field + "[" + std::to_string(i) + "]");
    if (i == 0) {
      cols = row.size();
      m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    } else if (row.size() != cols) {
      bad(field, "rows have different lengths");
    }
    for (std::size_t k = 0; k < cols; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& field) {
  if (j.is_number()) return Eigen::VectorXd::Constant(1, j.get<double>());
  const auto v = numbers(j, field);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(row);
  }
  return out;
}

json to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

json to_json(const SrnnParams& p) {
  json readout;
  switch (p.readout.kind) {
    case Readout::Kind::coordinate: readout = {{"kind", "coordinate"}, {"index", p.readout.index}}; break;
    case Readout::Kind::linear: readout = {{"kind", "linear"}, {"weights", to_json(p.readout.weights)}}; break;
    case Readout::Kind::tanh:
      readout = {{"kind", "tanh"}, {"index", p.readout.index}};
      if (p.readout.weights.size() > 0) readout["weights"] = to_json(p.readout.weights);
      break;
  }
  json init;
  if (p.init.kind == InitialDistribution::Kind::point) {
    init = {{"kind", "point"}, {"mean", to_json(p.init.mean)}};
  } else {
    init = {{"kind", "gaussian"}, {"mean", to_json(p.init.mean)}, {"cov", to_json(p.init.cov)}};
  }
  return {{"gamma", to_json(p.gamma)}, {"W", to_json(p.W)},         {"b", to_json(p.b)},
          {"C", to_json(p.C)},         {"sigma", to_json(p.sigma)}, {"activation", p.activation.name()},
          {"readout", readout},        {"init", init}};
}

SrnnParams srnn_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) bad(field, "expected an object");
  SrnnParams p;
  p.gamma = matrix_from_json(need(j, "gamma", field), join(field, "gamma"));
  const auto n = p.gamma.rows();
  p.C = j.contains("C") ? matrix_from_json(j["C"], join(field, "C")) : Eigen::MatrixXd::Identity(n, n);
  p.W = j.contains("W") ? matrix_from_json(j["W"], join(field, "W")) : Eigen::MatrixXd::Zero(n, n);
  p.b = j.contains("b") ? vector_from_json(j["b"], join(field, "b")) : Eigen::VectorXd::Zero(n);
  p.sigma = matrix_from_json(need(j, "sigma", field), join(field, "sigma"));
  if (j.contains("activation")) {
    try {
      p.activation = Activation(text(j["activation"], join(field, "activation")));
    } catch (const Error& e) {
      throw Error(ErrorCode::config_error, e.what(), join(field, "activation"));
    }
  }
  if (j.contains("readout")) {
    const auto& r = j["readout"];
    const std::string rf = join(field, "readout");
    const auto kind = text(need(r, "kind", rf), join(rf, "kind"));
    if (kind == "coordinate") p.readout.kind = Readout::Kind::coordinate;
    else if (kind == "linear") p.readout.kind = Readout::Kind::linear;
    else if (kind == "tanh") p.readout.kind = Readout::Kind::tanh;
    else bad(join(rf, "kind"), "unknown readout '" + kind + "' (coordinate, linear, tanh)");
    if (r.contains("index")) p.readout.index = integer(r["index"], join(rf, "index"));
    if (r.contains("weights")) p.readout.weights = vector_from_json(r["weights"], join(rf, "weights"));
    if (p.readout.kind == Readout::Kind::linear && p.readout.weights.size() == 0)
      bad(join(rf, "weights"), "linear readout needs weights");
  }
  bool stationary = false;
  if (j.contains("init")) {
    const auto& i = j["init"];
    const std::string inf = join(field, "init");
    const auto kind = text(need(i, "kind", inf), join(inf, "kind"));
    if (kind == "point") {
      p.init.kind = InitialDistribution::Kind::point;
      p.init.mean = i.contains("mean") ? vector_from_json(i["mean"], join(inf, "mean"))
                                       : Eigen::VectorXd::Zero(n);
    } else if (kind == "gaussian") {
      p.init.kind = InitialDistribution::Kind::gaussian;
      p.init.mean = i.contains("mean") ? vector_from_json(i["mean"], join(inf, "mean"))
                                       : Eigen::VectorXd::Zero(n);
      p.init.cov = matrix_from_json(need(i, "cov", inf), join(inf, "cov"));
    } else if (kind == "stationary") {
      stationary = true;
    } else {
      bad(join(inf, "kind"), "unknown initial law '" + kind + "' (point, gaussian, stationary)");
    }
  } else {
    p.init.mean = Eigen::VectorXd::Zero(n);
  }
  try {
    if (stationary) p = with_stationary_init(p);
    p.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::config_error, e.what(), e.field().empty() ? field : e.field());
  }
  return p;
}

json to_json(const ImpulseSpec& s) {
  return {{"epsilon", s.epsilon},
          {"width", s.width},
          {"shape", s.shape == ImpulseSpec::Shape::box ? "box" : "triangle"}};
}

ImpulseSpec impulse_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) bad(field, "expected an object");
  ImpulseSpec s;
  if (j.contains("epsilon")) s.epsilon = number(j["epsilon"], join(field, "epsilon"));
  if (j.contains("width")) s.width = number(j["width"], join(field, "width"));
  if (j.contains("shape")) {
    const auto shape = text(j["shape"], join(field, "shape"));
    if (shape == "box") s.shape = ImpulseSpec::Shape::box;
    else if (shape == "triangle") s.shape = ImpulseSpec::Shape::triangle;
    else bad(join(field, "shape"), "unknown shape '" + shape + "' (box, triangle)");
  }
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::config_error, e.what(), e.field());
  }
  return s;
}

// ---- Volterra kernels ------------------------------------------------------

json to_json(const VolterraKernels& k) {
  json kernels = json::object();
  for (int n = 1; n <= k.orders(); ++n) {
    auto d = k.raw(n);
    kernels[std::to_string(n)] = std::vector<double>(d.begin(), d.end());
  }
  return {{"orders", k.orders()},
          {"grid", std::vector<double>(k.grid().begin(), k.grid().end())},
          {"kernels", kernels}};
}

VolterraKernels volterra_from_json(const json& j, const std::string& field) {
  const int orders = integer(need(j, "orders", field), join(field, "orders"));
  auto grid = numbers(need(j, "grid", field), join(field, "grid"));
  VolterraKernels k;
  try {
    k = VolterraKernels(std::move(grid), orders);
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), join(field, "grid"));
  }
  const auto& kernels = need(j, "kernels", field);
  for (int n = 1; n <= orders; ++n) {
    const std::string key = std::to_string(n);
    const std::string kf = join(join(field, "kernels"), key);
    const auto v = numbers(need(kernels, key, join(field, "kernels")), kf);
    auto d = k.raw(n);
    if (v.size() != d.size())
      bad(kf, "expected " + std::to_string(d.size()) + " entries, got " + std::to_string(v.size()));
    std::copy(v.begin(), v.end(), d.begin());
  }
  return k;
}

// ---- CSV reports -----------------------------------------------------------

std::string format_matrix_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) out += (k ? "," : "") + fmt(m(i, k));
    out += "\n";
  }
  return out;
}

std::string format_trajectory_csv(const Trajectory& tr) {
  std::string out = "t";
  for (Eigen::Index k = 1; k <= tr.states.cols(); ++k) out += ",h" + std::to_string(k);
  out += "\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    out += fmt(tr.times[i]);
    for (Eigen::Index k = 0; k < tr.states.cols(); ++k)
      out += "," + fmt(tr.states(static_cast<Eigen::Index>(i), k));
    out += "\n";
  }
  return out;
}

std::string format_fdt_csv(const std::vector<FdtRow>& rows) {
  std::string out = "tau,impulse,correlation,stderr_i,stderr_c\n";
  for (const auto& r : rows)
    out += fmt(r.lag) + "," + fmt(r.impulse) + "," + fmt(r.correlation) + "," +
           fmt(r.std_error_impulse) + "," + fmt(r.std_error_correlation) + "\n";
  return out;
}

}  // namespace responsekit::io

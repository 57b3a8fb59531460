#include "cli.hpp"

#include <CLI11.hpp>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include "acceptance.hpp"
#include "responsekit/error.hpp"
#include "responsekit/io.hpp"
#include "responsekit/kernels.hpp"
#include "responsekit/learn.hpp"
#include "responsekit/random.hpp"
#include "responsekit/response.hpp"
#include "responsekit/signature.hpp"
#include "responsekit/srnn.hpp"
#include "responsekit/volterra.hpp"

namespace responsekit::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

const std::vector<std::string> kCommands = {"sig",    "kernel", "simulate", "respond",
                                            "volterra", "fit", "predict",  "repro"};

struct Context {
  std::string command;
  json config = json::object();
  fs::path config_dir = ".";
  fs::path out_dir;
  std::uint64_t seed = acceptance::kDefaultSeed;
  bool gnuplot = false;
  std::ostream* out = nullptr;
};

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::config_error, field + ": " + what, field);
}

const json& need(const json& j, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) config_error(key, "missing required field");
  return *it;
}

double number(const json& j, const std::string& key, std::optional<double> fallback = {}) {
  auto it = j.find(key);
  if (it == j.end()) {
    if (fallback) return *fallback;
    config_error(key, "missing required field");
  }
  if (!it->is_number()) config_error(key, "expected a number");
  return it->get<double>();
}

std::size_t count(const json& j, const std::string& key, std::optional<std::size_t> fallback = {}) {
  auto it = j.find(key);
  if (it == j.end()) {
    if (fallback) return *fallback;
    config_error(key, "missing required field");
  }
  if (!it->is_number_integer() || it->get<long long>() < 0)
    config_error(key, "expected a non-negative integer");
  return it->get<std::size_t>();
}

std::vector<double> numbers(const json& j, const std::string& key) {
  const json& v = need(j, key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) config_error(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) config_error(key, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

fs::path resolve(const Context& ctx, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : ctx.config_dir / path;
}

Path load_path(const Context& ctx, const json& j, const std::string& field) {
  if (j.is_string()) return io::read_path_csv(resolve(ctx, j.get<std::string>()));
  return io::path_from_json(j, field);
}

// A directory of CSV files (sorted by file name) or an array of paths.
std::vector<std::pair<std::string, Path>> load_path_set(const Context& ctx, const json& j,
                                                        const std::string& field) {
  std::vector<std::pair<std::string, Path>> out;
  if (j.is_string()) {
    const fs::path dir = resolve(ctx, j.get<std::string>());
    if (!fs::is_directory(dir)) throw Error(ErrorCode::io_error, "not a directory: " + dir.string(), field);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.emplace_back(f.stem().string(), io::read_path_csv(f));
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string name = j[i].is_string() ? fs::path(j[i].get<std::string>()).stem().string()
                                                : "path" + std::to_string(i);
      out.emplace_back(name, load_path(ctx, j[i], field + "[" + std::to_string(i) + "]"));
    }
  } else {
    config_error(field, "expected a directory name or an array of paths");
  }
  if (out.empty()) config_error(field, "no paths found");
  return out;
}

std::string to_gnuplot(const std::string& csv) {
  std::string out = "# ";
  for (char ch : csv) out += ch == ',' ? ' ' : ch;
  return out;
}

void emit(const Context& ctx, const std::string& name, const std::string& content) {
  const fs::path file = ctx.out_dir / name;
  io::write_file_atomic(file, content);
  *ctx.out << "wrote " << file.string() << "\n";
}

void emit_table(const Context& ctx, const std::string& stem, const std::string& csv) {
  emit(ctx, stem + ".csv", csv);
  if (ctx.gnuplot) emit(ctx, stem + ".dat", to_gnuplot(csv));
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

// ---- commands ----------------------------------------------------------------

int cmd_sig(Context& ctx) {
  const Path p = load_path(ctx, need(ctx.config, "path"), "path");
  const auto level = static_cast<int>(count(ctx.config, "level", 2));
  const auto s = signature(p, level);
  json report = io::to_json(s);
  if (s.flat().size() <= 4096) {
    json words = json::object();
    for (int n = 1; n <= level; ++n)
      for (const auto& w : words_of_length(p.dim(), n)) {
        std::string key;
        for (int letter : w.letters) key += (key.empty() ? "" : ",") + std::to_string(letter);
        words[key] = s.coeff(w);
      }
    report["words"] = words;
  }
  emit(ctx, "signature.json", report.dump(2) + "\n");
  return kExitOk;
}

int cmd_kernel(Context& ctx) {
  const auto paths = load_path_set(ctx, need(ctx.config, "paths"), "paths");
  const KernelSpec spec = ctx.config.contains("kernel")
                              ? io::kernel_spec_from_json(ctx.config["kernel"], "kernel")
                              : KernelSpec::piecewise(0.0, 1.0, 10, 3);
  std::vector<Path> prepared;
  json names = json::array();
  for (const auto& [name, p] : paths) {
    prepared.push_back(prepare_path(p, spec));
    names.push_back(name);
  }
  const Eigen::MatrixXd G = gram(prepared, spec);
  emit_table(ctx, "gram", io::format_matrix_csv(G));
  emit(ctx, "gram.json", json{{"names", names}, {"kernel", io::to_json(spec)}, {"gram", io::to_json(G)}}.dump(2) + "\n");
  return kExitOk;
}

Path input_or_zero(const Context& ctx, const SrnnParams& p, double T) {
  if (ctx.config.contains("input")) return load_path(ctx, ctx.config["input"], "input");
  return Path::make({0.0, T}, std::vector<double>(2 * p.m(), 0.0), p.m());
}

int cmd_simulate(Context& ctx) {
  const SrnnParams p = io::srnn_from_json(need(ctx.config, "srnn"), "srnn");
  const double T = number(ctx.config, "T");
  const double dt = number(ctx.config, "dt");
  const Path u = input_or_zero(ctx, p, T);
  const std::uint64_t seed = derive_seed(ctx.seed, "simulate");
  const auto tr = euler_maruyama(p, u, T, dt, seed, count(ctx.config, "stream", 0));
  emit_table(ctx, "trajectory", io::format_trajectory_csv(tr));
  if (ctx.config.contains("samples")) {
    const std::size_t K = count(ctx.config, "samples");
    const Estimate e = output_functional(p, u, T, dt, K, derive_seed(seed, "output"));
    emit(ctx, "output_functional.json",
         json{{"T", T}, {"samples", K}, {"value", e.value}, {"std_error", e.std_error}}.dump(2) + "\n");
    *ctx.out << "E[f(h_T)] = " << fmt(e.value) << " +- " << fmt(e.std_error) << "\n";
  }
  return kExitOk;
}

// w^T e^{-Gamma tau} C d for linear SRNNs with a linear or coordinate readout.
std::optional<double> analytic_linear_response(const SrnnParams& p, const Eigen::VectorXd& d,
                                               double tau) {
  if (!p.activation.is_zero() || p.readout.kind == Readout::Kind::tanh) return std::nullopt;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.n()));
  if (p.readout.kind == Readout::Kind::coordinate) w(p.readout.index) = 1.0;
  else w = p.readout.weights;
  const Eigen::MatrixXd scaled = -tau * p.gamma;
  const Eigen::MatrixXd decay = scaled.exp();
  return w.dot(decay * (p.C * d));
}

int cmd_respond(Context& ctx) {
  const SrnnParams p = io::srnn_from_json(need(ctx.config, "srnn"), "srnn");
  std::vector<double> direction(p.m(), 0.0);
  direction[0] = 1.0;
  if (ctx.config.contains("direction")) direction = numbers(ctx.config, "direction");
  const double s = number(ctx.config, "s");
  const auto lags = numbers(ctx.config, "lags");
  const ImpulseSpec spec = ctx.config.contains("impulse")
                               ? io::impulse_from_json(ctx.config["impulse"], "impulse")
                               : ImpulseSpec{};
  const double dt = number(ctx.config, "dt");
  const std::size_t K = count(ctx.config, "samples");
  const std::uint64_t seed = derive_seed(ctx.seed, "respond");
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(direction.data(), static_cast<Eigen::Index>(direction.size()));
  if (d.size() != static_cast<Eigen::Index>(p.m()))
    config_error("direction", "expected " + std::to_string(p.m()) + " entries");

  json rows = json::array();
  json warnings = json::array();
  // Same labelled seeds as fdt_report, so both entry points agree.
  const auto curve =
      impulse_response_curve(p, direction, s, lags, spec, dt, K, derive_seed(seed, "impulse"));
  std::string csv = "tau,t,impulse,stderr,second,stderr_second,quadratic_ratio,analytic\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto& e = curve[i];
    const auto analytic = analytic_linear_response(p, d, lags[i]);
    json row{{"tau", lags[i]},          {"t", e.t},
             {"impulse", e.value},      {"std_error", e.std_error},
             {"second", e.second},      {"second_std_error", e.second_std_error},
             {"quadratic_ratio", e.quadratic_ratio}};
    if (analytic) row["analytic"] = *analytic;
    rows.push_back(row);
    csv += fmt(lags[i]) + "," + fmt(e.t) + "," + fmt(e.value) + "," + fmt(e.std_error) + "," +
           fmt(e.second) + "," + fmt(e.second_std_error) + "," + fmt(e.quadratic_ratio) + "," +
           (analytic ? fmt(*analytic) : std::string("nan")) + "\n";
    if (e.large_epsilon) {
      const std::string w = "epsilon may be too large at tau=" + fmt(lags[i]) +
                            ": quadratic proxy is " + fmt(e.quadratic_ratio) + " of the linear term";
      warnings.push_back(w);
      *ctx.out << "warning: " << w << "\n";
    }
  }
  emit_table(ctx, "impulse", csv);

  const bool fdt = ctx.config.value("fdt", p.activation.is_zero() &&
                                               p.init.kind == InitialDistribution::Kind::gaussian);
  if (fdt) {
    const auto corr = fdt_correlation_ou(p, direction, lags, dt, K, derive_seed(seed, "correlation"));
    std::vector<FdtRow> report;
    for (std::size_t i = 0; i < corr.size(); ++i) {
      report.push_back({lags[i], curve[i].value, corr[i].value, curve[i].std_error, corr[i].std_error});
      rows[i]["correlation"] = corr[i].value;
      rows[i]["correlation_std_error"] = corr[i].std_error;
    }
    emit_table(ctx, "fdt", io::format_fdt_csv(report));
  }
  emit(ctx, "respond.json", json{{"rows", rows}, {"warnings", warnings}}.dump(2) + "\n");
  return kExitOk;
}

VolterraKernels load_kernels(const Context& ctx, const json& j, const std::string& field) {
  if (j.is_string()) {
    const std::string text = io::read_file(resolve(ctx, j.get<std::string>()));
    json parsed;
    try {
      parsed = json::parse(text);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::corrupt_file, "kernel file is not valid JSON: " + std::string(e.what()), field);
    }
    return io::volterra_from_json(parsed, field);
  }
  if (j.is_object() && j.contains("exponential")) {
    // First-order kernel e^{-rate (t - s)}, the scalar OU response.
    const json& e = j["exponential"];
    const double rate = number(e, "rate", 1.0);
    const double t_end = number(e, "t_end");
    const std::size_t segments = count(e, "segments");
    return VolterraKernels::tabulate(uniform_grid(0.0, t_end, segments), 1,
                                     [rate](int, double t, std::span<const double> s) {
                                       return std::exp(-rate * (t - s[0]));
                                     });
  }
  return io::volterra_from_json(j, field);
}

std::string series_csv(const Path& series) {
  std::string csv = "t,value\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    csv += fmt(series.times()[i]) + "," + fmt(series.value(i)[0]) + "\n";
  return csv;
}

int cmd_volterra(Context& ctx) {
  const std::string mode = ctx.config.value("mode", std::string("eval"));
  const VolterraKernels k = load_kernels(ctx, need(ctx.config, "kernels"), "kernels");
  if (mode == "eval") {
    const Path gamma = load_path(ctx, need(ctx.config, "gamma"), "gamma");
    emit_table(ctx, "series", series_csv(volterra_series_path(k, gamma)));
    return kExitOk;
  }
  if (mode == "compose") {
    const VolterraKernels inner = load_kernels(ctx, need(ctx.config, "inner"), "inner");
    const VolterraKernels composed = compose_kernels(k, inner);
    emit(ctx, "composed.json", io::to_json(composed).dump() + "\n");
    *ctx.out << "composed " << k.orders() << " + " << inner.orders() << " -> " << composed.orders()
             << " kernels\n";
    if (ctx.config.contains("gamma")) {
      const Path gamma = load_path(ctx, ctx.config["gamma"], "gamma");
      emit_table(ctx, "series", series_csv(volterra_series_path(composed, gamma)));
    }
    return kExitOk;
  }
  config_error("mode", "unknown mode '" + mode + "' (eval, compose)");
}

int cmd_fit(Context& ctx) {
  const KernelSpec spec = ctx.config.contains("kernel")
                              ? io::kernel_spec_from_json(ctx.config["kernel"], "kernel")
                              : KernelSpec::piecewise(0.0, 1.0, 10, 3);
  const double lambda = number(ctx.config, "lambda", 1e-3);
  const json& data = need(ctx.config, "data");
  std::vector<Path> inputs;
  std::vector<double> targets;
  if (data.contains("teacher")) {
    const json& t = data["teacher"];
    const SrnnParams p = io::srnn_from_json(need(t, "srnn"), "data.teacher.srnn");
    const double T = number(t, "T", 1.0);
    const double dt = number(t, "dt", 0.01);
    const std::size_t K = count(t, "samples", 10000);
    const json& in = need(data, "inputs");
    const std::size_t N = count(in, "count");
    const std::size_t segments = count(in, "segments", 10);
    const double scale = number(in, "scale", 1.0);
    Stream rng(derive_seed(ctx.seed, "fit-inputs"), 0);
    const std::uint64_t target_seed = derive_seed(ctx.seed, "fit-targets");
    for (std::size_t i = 0; i < N; ++i) {
      inputs.push_back(random_walk_path(rng, p.m(), segments, scale, 0.0, T));
      targets.push_back(output_functional(p, inputs.back(), T, dt, K, target_seed).value);
    }
  } else {
    for (auto& [name, p] : load_path_set(ctx, need(data, "paths"), "data.paths")) inputs.push_back(std::move(p));
    targets = numbers(data, "targets");
    if (targets.size() != inputs.size())
      config_error("data.targets", "expected one target per path (" + std::to_string(inputs.size()) + ")");
  }
  const KernelModel model = fit(inputs, targets, spec, lambda);
  save_model(model, ctx.out_dir / "model.json");
  *ctx.out << "wrote " << (ctx.out_dir / "model.json").string() << "\n";
  double ss = 0.0;
  for (double r : training_residuals(model, targets)) ss += r * r;
  const double train_rmse = std::sqrt(ss / static_cast<double>(targets.size()));
  emit(ctx, "fit.json",
       json{{"examples", inputs.size()}, {"lambda", lambda}, {"jitter", model.jitter},
            {"target_mean", model.target_mean}, {"train_rmse", train_rmse}, {"targets", targets}}
               .dump(2) + "\n");
  return kExitOk;
}

int cmd_predict(Context& ctx) {
  const KernelModel model = load_model(resolve(ctx, need(ctx.config, "model").get<std::string>()));
  std::string csv = "name,prediction\n";
  for (const auto& [name, p] : load_path_set(ctx, need(ctx.config, "paths"), "paths"))
    csv += name + "," + fmt(predict(model, p)) + "\n";
  emit_table(ctx, "predictions", csv);
  return kExitOk;
}

int cmd_repro(Context& ctx) {
  std::vector<int> only;
  if (ctx.config.contains("criteria"))
    for (double id : numbers(ctx.config, "criteria")) only.push_back(static_cast<int>(id));
  std::vector<acceptance::CriterionResult> results;
  json report = json::array();
  bool ok = true;
  for (int id = 1; id <= acceptance::kCriterionCount; ++id) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto r = acceptance::run_criterion(id, ctx.seed);
    *ctx.out << acceptance::format_line(r) << std::endl;
    ok = ok && r.passed;
    results.push_back(r);
    report.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail},
                      {"seconds", r.seconds}, {"limit_seconds", r.limit_seconds}});
  }
  emit(ctx, "repro.txt", acceptance::format_summary(results));
  emit(ctx, "repro.json", json{{"seed", ctx.seed}, {"criteria", report}}.dump(2) + "\n");
  return ok ? kExitOk : kExitCriteriaFailed;
}

int dispatch(Context& ctx) {
  if (ctx.command == "sig") return cmd_sig(ctx);
  if (ctx.command == "kernel") return cmd_kernel(ctx);
  if (ctx.command == "simulate") return cmd_simulate(ctx);
  if (ctx.command == "respond") return cmd_respond(ctx);
  if (ctx.command == "volterra") return cmd_volterra(ctx);
  if (ctx.command == "fit") return cmd_fit(ctx);
  if (ctx.command == "predict") return cmd_predict(ctx);
  return cmd_repro(ctx);
}

void print_error(std::ostream& err, ErrorCode code, const std::string& message,
                 const std::string& field) {
  json e{{"code", std::string(to_string(code))}, {"message", message}};
  e["field"] = field.empty() ? json(nullptr) : json(field);
  err << json{{"error", e}}.dump() << std::endl;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (!args.empty() && args[0].rfind('-', 0) != 0 &&
      std::find(kCommands.begin(), kCommands.end(), args[0]) == kCommands.end()) {
    print_error(err, ErrorCode::unknown_command, "unknown command '" + args[0] + "'", "command");
    return kExitError;
  }

  CLI::App app{"responsekit: SRNN simulation, response kernels, signatures and kernel learning"};
  app.require_subcommand(1);
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "responsekit-out";
  bool gnuplot = false;
  app.add_option("--config", config_file, "JSON configuration file");
  app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_flag("--gnuplot", gnuplot, "also write gnuplot data files");
  const std::map<std::string, std::string> help = {
      {"sig", "signature of a path file"},
      {"kernel", "Gram matrix over a set of paths"},
      {"simulate", "Euler-Maruyama trajectory and output functional"},
      {"respond", "impulse response and fluctuation-dissipation report"},
      {"volterra", "evaluate or compose Volterra kernel sets"},
      {"fit", "fit a kernel ridge model"},
      {"predict", "predict with a saved model"},
      {"repro", "run the acceptance suite"}};
  for (const auto& name : kCommands) app.add_subcommand(name, help.at(name))->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    print_error(err, ErrorCode::config_error, e.what(), "arguments");
    return kExitError;
  }

  Context ctx;
  ctx.command = app.get_subcommands().front()->get_name();
  ctx.out = &out;
  ctx.gnuplot = gnuplot;
  ctx.out_dir = out_dir;
  try {
    if (!config_file.empty()) {
      ctx.config_dir = fs::path(config_file).parent_path();
      if (ctx.config_dir.empty()) ctx.config_dir = ".";
      try {
        ctx.config = json::parse(io::read_file(config_file));
      } catch (const json::exception& e) {
        throw Error(ErrorCode::config_error, "config is not valid JSON: " + std::string(e.what()), "config");
      }
      if (!ctx.config.is_object()) config_error("config", "expected a JSON object");
    } else if (ctx.command != "repro") {
      config_error("config", "--config is required for '" + ctx.command + "'");
    }
    if (ctx.config.contains("seed")) {
      if (!ctx.config["seed"].is_number_unsigned()) config_error("seed", "expected a non-negative integer");
      ctx.seed = ctx.config["seed"].get<std::uint64_t>();
    }
    if (seed) ctx.seed = *seed;

    json canonical = ctx.config;
    canonical["seed"] = ctx.seed;
    canonical["command"] = ctx.command;
    emit(ctx, "config.json", canonical.dump(2) + "\n");
    return dispatch(ctx);
  } catch (const Error& e) {
    print_error(err, e.code(), e.what(), e.field());
  } catch (const std::exception& e) {
    print_error(err, ErrorCode::invalid_argument, e.what(), "");
  }
  return kExitError;
}

}  // namespace responsekit::cli

#include "zeno/harness.hpp"

#include "zeno/format.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

namespace zeno {

using nlohmann::json;

namespace {

constexpr const char* kCircleNote =
    "discrete circle of length 2*pi; t restricted so the translated window stays inside the chart";

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!j.is_object()) throw ValidationError(std::string(where) + " must be a JSON object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw ValidationError(std::string(where) + ": unknown key '" + item.key() + "'");
  }
}

std::uint64_t get_unsigned(const json& j, std::string_view what) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw ValidationError(std::string(what) + " must be a non-negative integer");
}

double get_real(const json& j, std::string_view what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
  }
  throw ValidationError(std::string(what) + " must be a number");
}

// Non-finite values are stored as strings so JSON output stays valid.
json number_to_json(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "NaN";
  return x > 0 ? "Infinity" : "-Infinity";
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
  if (s == "Infinity") return std::numeric_limits<double>::infinity();
  if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
  throw ValidationError("invalid number in record: " + s);
}

bool same_number(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

bool same_optional(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || same_number(*a, *b);
}

FunctionEntry parse_function_entry(const json& j) {
  if (j.is_string()) return {j.get<std::string>(), std::nullopt};
  reject_unknown_keys(j, {"id", "cutoff"}, "function entry");
  if (!j.contains("id") || !j.at("id").is_string()) throw ValidationError("function entry needs a string id");
  FunctionEntry entry{j.at("id").get<std::string>(), std::nullopt};
  if (j.contains("cutoff")) {
    const json& c = j.at("cutoff");
    if (!c.is_array()) throw ValidationError("cutoff must be a list of [lower, upper] pairs");
    std::vector<Interval> intervals;
    for (const json& pair : c) {
      if (!pair.is_array() || pair.size() != 2) throw ValidationError("cutoff must be a list of [lower, upper] pairs");
      intervals.push_back({get_real(pair[0], "cutoff bound"), get_real(pair[1], "cutoff bound")});
    }
    entry.cutoff = IntervalUnion(std::move(intervals));
  }
  return entry;
}

struct CellContext {
  const ExperimentConfig& config;
  const ZenoModel& model;
  ComplexMatrix test_vectors;
};

template <class Fn>
void guarded(ConvergenceRecord& record, Metric metric, Fn&& fn) {
  try {
    fn();
  } catch (const NumericalGuardError& e) {
    record.guard_tripped = true;
    record.notes.push_back(std::string(to_string(metric)) + ": numerical guard: " + e.what());
  } catch (const std::exception& e) {
    record.notes.push_back(std::string(to_string(metric)) + ": " + e.what());
  }
}

ConvergenceRecord evaluate_cell(const CellContext& ctx, const FunctionSpec& spec, double t, std::uint64_t n) {
  const ExperimentConfig& cfg = ctx.config;
  const ZenoModel& model = ctx.model;
  ConvergenceRecord r;
  r.model_id = model.id();
  r.function_id = spec.id;
  r.t = t;
  r.n = n;

  const bool want_norm = cfg.has(Metric::norm);
  const bool want_strong = cfg.has(Metric::strong);
  if (want_norm || want_strong) {
    guarded(r, want_norm ? Metric::norm : Metric::strong, [&] {
      const ComplexMatrix target = zeno_target(model, t);
      const ErrorMetrics m = error_metrics(zeno_product(model, spec, t, n), target, ctx.test_vectors);
      if (want_norm) r.norm_error = m.norm_error;
      if (want_strong) r.strong_errors = m.strong_errors;
    });
  }
  if (cfg.has(Metric::time_averaged)) {
    guarded(r, Metric::time_averaged, [&] {
      r.avg_error = time_averaged_error(model, spec, n, t, cfg.quadrature_nodes, ctx.test_vectors);
    });
  }
  if (cfg.has(Metric::bound)) {
    guarded(r, Metric::bound, [&] {
      const BoundCertificate c = certify_bound(model, spec, t, n, cfg.alpha);
      r.bound_lhs = c.lhs;
      r.bound_rhs = c.rhs;
      r.bound_pass = c.pass;
      r.diagnostics["bound_c_p"] = c.c_p;
      r.diagnostics["bound_c_alpha"] = c.c_alpha;
    });
  }
  if (cfg.has(Metric::diagnostics)) {
    const double tau = t / static_cast<double>(n);
    guarded(r, Metric::diagnostics, [&] {
      r.diagnostics["factorization_residual"] = factorization_residual(model, spec, tau);
    });
    guarded(r, Metric::diagnostics, [&] {
      const std::vector<double> taus{tau};
      for (const auto& [name, values] : proof_path_diagnostics(model, spec, taus)) r.diagnostics[name] = values.front();
    });
  }
  if (cfg.has(Metric::graf_guekos)) {
    guarded(r, Metric::graf_guekos, [&] { r.diagnostics["graf_guekos"] = graf_guekos_residual(model, t); });
  }
  if (cfg.has(Metric::counterexample)) {
    guarded(r, Metric::counterexample, [&] {
      if (!model.flags().out_of_assumption)
        throw ValidationError("counterexample needs an out-of-assumption model with a circle chart");
      const CounterexampleReport c = counterexample_run(model, t, n, counterexample_vectors(model, t));
      r.diagnostics["identity_residual"] = c.identity_residual;
      r.diagnostics["limit_residual"] = c.limit_residual;
      r.diagnostics["contraction_witness"] = c.contraction_witness;
      r.diagnostics["product_norm"] = c.product_norm;
      if (!c.evolved_norms.empty()) r.diagnostics["edge_evolved_norm"] = c.evolved_norms.front();
      r.notes.push_back(std::string("counterexample: ") + kCircleNote + "; uses exp(-isH) whatever the function");
    });
  }
  return r;
}

std::vector<double> metric_series(const std::vector<ConvergenceRecord>& cells, std::string_view metric,
                                  std::vector<double>& ns) {
  std::vector<double> errors;
  ns.clear();
  for (const auto& c : cells) {
    std::optional<double> v;
    if (metric == "norm_error") v = c.norm_error;
    else if (metric == "avg_error") v = c.avg_error;
    else if (metric == "strong_error_max" && !c.strong_errors.empty())
      v = *std::max_element(c.strong_errors.begin(), c.strong_errors.end());
    if (v) {
      ns.push_back(static_cast<double>(c.n));
      errors.push_back(*v);
    }
  }
  return errors;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
  if (!out) throw ValidationError("failed writing " + path.string());
}

}  // namespace

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::strong: return "strong";
    case Metric::norm: return "norm";
    case Metric::time_averaged: return "time-averaged";
    case Metric::bound: return "bound";
    case Metric::diagnostics: return "diagnostics";
    case Metric::graf_guekos: return "graf-guekos";
    case Metric::counterexample: return "counterexample";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  for (Metric m : {Metric::strong, Metric::norm, Metric::time_averaged, Metric::bound, Metric::diagnostics,
                   Metric::graf_guekos, Metric::counterexample}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown metric: " + std::string(name));
}

bool ExperimentConfig::has(Metric m) const {
  return std::find(metrics.begin(), metrics.end(), m) != metrics.end();
}

ModelSpec parse_model_spec(const json& j) {
  try {
    reject_unknown_keys(j, {"kind", "dim", "rank", "window", "indices", "spectrum", "spectral_radius", "seed"},
                        "model");
    ModelSpec spec;
    if (!j.contains("kind") || !j.at("kind").is_string()) throw ValidationError("model needs a string kind");
    spec.kind = parse_model_kind(j.at("kind").get<std::string>());
    if (!j.contains("dim")) throw ValidationError("model needs dim");
    spec.dim = static_cast<Index>(get_unsigned(j.at("dim"), "model.dim"));
    if (j.contains("rank")) spec.rank = static_cast<Index>(get_unsigned(j.at("rank"), "model.rank"));
    if (j.contains("window")) {
      const json& w = j.at("window");
      if (!w.is_array() || w.size() != 2) throw ValidationError("model.window must be [first, last]");
      spec.window = Window{static_cast<Index>(get_unsigned(w[0], "model.window")),
                           static_cast<Index>(get_unsigned(w[1], "model.window"))};
    }
    if (j.contains("indices")) {
      if (!j.at("indices").is_array()) throw ValidationError("model.indices must be a list");
      for (const json& i : j.at("indices")) spec.indices.push_back(static_cast<Index>(get_unsigned(i, "model.indices")));
    }
    if (j.contains("spectrum")) {
      if (!j.at("spectrum").is_array()) throw ValidationError("model.spectrum must be a list");
      for (const json& s : j.at("spectrum")) spec.spectrum.push_back(get_real(s, "model.spectrum"));
    }
    if (j.contains("spectral_radius")) spec.spectral_radius = get_real(j.at("spectral_radius"), "model.spectral_radius");
    if (j.contains("seed")) spec.seed = get_unsigned(j.at("seed"), "model.seed");

    if (spec.dim < 1) throw ValidationError("model.dim must be >= 1");
    if (!(spec.spectral_radius > 0.0) || !std::isfinite(spec.spectral_radius))
      throw ValidationError("model.spectral_radius must be finite and > 0");
    if (spec.kind == ModelKind::random && (spec.rank < 1 || spec.rank > spec.dim))
      throw ValidationError("random model needs 1 <= rank <= dim");
    if (spec.kind == ModelKind::commuting && spec.indices.empty())
      throw ValidationError("commuting model needs indices");
    return spec;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model: ") + e.what());
  }
}

json model_spec_to_json(const ModelSpec& spec) {
  json j;
  j["kind"] = std::string(to_string(spec.kind));
  j["dim"] = spec.dim;
  if (spec.kind == ModelKind::random) j["rank"] = spec.rank;
  if (spec.window) j["window"] = {spec.window->first, spec.window->last};
  if (!spec.indices.empty()) j["indices"] = spec.indices;
  if (!spec.spectrum.empty()) j["spectrum"] = spec.spectrum;
  j["spectral_radius"] = spec.spectral_radius;
  j["seed"] = spec.seed;
  return j;
}

ExperimentConfig parse_config(const json& j) {
  try {
    reject_unknown_keys(j, {"model", "functions", "t_grid", "n_list", "alpha", "metrics", "quadrature_nodes", "seed",
                            "output"},
                        "config");
    ExperimentConfig cfg;
    if (!j.contains("model")) throw ValidationError("config needs a model");
    cfg.model = parse_model_spec(j.at("model"));
    for (const char* key : {"functions", "t_grid", "n_list", "metrics"}) {
      if (!j.contains(key) || !j.at(key).is_array()) throw ValidationError(std::string("config.") + key + " must be a list");
    }
    for (const json& f : j.at("functions")) cfg.functions.push_back(parse_function_entry(f));
    for (const json& t : j.at("t_grid")) cfg.t_grid.push_back(get_real(t, "t_grid entry"));
    for (const json& n : j.at("n_list")) cfg.n_list.push_back(get_unsigned(n, "n_list entry"));
    for (const json& m : j.at("metrics")) {
      if (!m.is_string()) throw ValidationError("metrics entries must be strings");
      cfg.metrics.push_back(parse_metric(m.get<std::string>()));
    }
    if (j.contains("alpha")) cfg.alpha = get_real(j.at("alpha"), "alpha");
    if (j.contains("quadrature_nodes"))
      cfg.quadrature_nodes = static_cast<std::size_t>(get_unsigned(j.at("quadrature_nodes"), "quadrature_nodes"));
    if (j.contains("seed")) cfg.seed = get_unsigned(j.at("seed"), "seed");
    if (j.contains("output")) {
      if (!j.at("output").is_string()) throw ValidationError("output must be a string path");
      cfg.output = j.at("output").get<std::string>();
    }
    validate(cfg);
    return cfg;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ValidationError("config " + path.string() + " is not valid JSON");
  return parse_config(j);
}

void validate(const ExperimentConfig& c) {
  if (c.functions.empty()) throw ValidationError("functions must be nonempty");
  for (const auto& f : c.functions) builtin(f.id);
  if (c.t_grid.empty()) throw ValidationError("t_grid must be nonempty");
  for (double t : c.t_grid) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("t_grid entries must be finite and > 0");
  }
  if (c.n_list.empty()) throw ValidationError("n_list must be nonempty");
  for (std::size_t i = 0; i < c.n_list.size(); ++i) {
    if (c.n_list[i] < 1) throw ValidationError("n_list entries must be >= 1");
    if (i > 0 && c.n_list[i] <= c.n_list[i - 1]) throw ValidationError("n_list must be strictly increasing");
  }
  if (c.metrics.empty()) throw ValidationError("metrics must be nonempty");
  std::set<Metric> seen(c.metrics.begin(), c.metrics.end());
  if (seen.size() != c.metrics.size()) throw ValidationError("metrics contain duplicates");
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) throw ValidationError("alpha must be finite and > 0");
  if (c.quadrature_nodes < 33 || c.quadrature_nodes % 2 == 0)
    throw ValidationError("quadrature_nodes must be odd and >= 33");
  if (c.output.empty()) throw ValidationError("output must be a nonempty path");
}

FunctionSpec resolve_function(const FunctionEntry& entry) {
  FunctionSpec spec = builtin(entry.id);
  if (entry.cutoff) return cutoff_regularize(spec, *entry.cutoff);
  return verified(std::move(spec));
}

RateFit fit_rate(std::span<const double> n_values, std::span<const double> errors) {
  if (n_values.size() != errors.size()) throw ValidationError("fit_rate: size mismatch");
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i] > kConvergedError && n_values[i] > 0.0 && std::isfinite(errors[i])) {
      xs.push_back(std::log(n_values[i]));
      ys.push_back(std::log(errors[i]));
    }
  }
  RateFit fit;
  fit.points = xs.size();
  if (xs.size() < 3) return fit;
  const double m = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) return fit;
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = ys[i] - (intercept + slope * xs[i]);
    ss_res += d * d;
  }
  fit.beta = -slope;
  fit.prefactor = std::exp(intercept);
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.fitted = true;
  return fit;
}

unsigned default_worker_count() {
  if (const char* env = std::getenv("ZENO_LAB_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ValidationError("ZENO_LAB_THREADS must be a positive integer");
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ComplexMatrix counterexample_vectors(const ZenoModel& model, double t) {
  if (!model.chart()) throw ValidationError("counterexample_vectors: model has no circle chart");
  const CircleChart& chart = *model.chart();
  const Index rank = model.rank();
  const double tol = 1e-9 * chart.grid_step;
  const double b = chart.b();
  const double centre = 0.5 * (chart.a() + b);
  const double half_width = 0.25 * (b - chart.a());
  ComplexMatrix vectors = ComplexMatrix::Zero(rank, 2);
  for (Index i = 0; i < rank; ++i) {
    const double x = chart.position(chart.first + i);
    if (x >= b - 0.5 * t - tol) vectors(i, 0) = 1.0;
    const double u = (x - centre) / half_width;
    if (std::abs(u) < 1.0) vectors(i, 1) = std::exp(-1.0 / (1.0 - u * u));
  }
  for (Index c = 0; c < 2; ++c) {
    const double norm = vectors.col(c).norm();
    if (!(norm > 0.0)) throw ValidationError("counterexample_vectors: window too small for the test vectors");
    vectors.col(c) /= norm;
  }
  return vectors;
}

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned workers, bool write_files) {
  validate(config);
  const ZenoModel model = build_model(config.model);
  std::vector<FunctionSpec> specs;
  for (const auto& entry : config.functions) specs.push_back(resolve_function(entry));

  struct Cell {
    std::size_t spec;
    double t;
    std::uint64_t n;
  };
  std::vector<Cell> cells;
  for (std::size_t f = 0; f < specs.size(); ++f)
    for (double t : config.t_grid)
      for (std::uint64_t n : config.n_list) cells.push_back({f, t, n});

  const CellContext ctx{config, model, standard_test_vectors(model.rank(), config.seed)};
  std::vector<ConvergenceRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        records[i] = evaluate_cell(ctx, specs[cells[i].spec], cells[i].t, cells[i].n);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(cells.size())));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < count; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::stable_sort(records.begin(), records.end(), [](const ConvergenceRecord& a, const ConvergenceRecord& b) {
    return std::tie(a.function_id, a.t, a.n) < std::tie(b.function_id, b.t, b.n);
  });

  ExperimentResult result;
  result.records = std::move(records);
  for (const auto& r : result.records) result.guard_tripped = result.guard_tripped || r.guard_tripped;

  // Records are sorted, so each (function, t) series is a contiguous run.
  for (std::size_t begin = 0; begin < result.records.size();) {
    std::size_t end = begin;
    while (end < result.records.size() && result.records[end].function_id == result.records[begin].function_id &&
           result.records[end].t == result.records[begin].t)
      ++end;
    const std::vector<ConvergenceRecord> series(result.records.begin() + static_cast<std::ptrdiff_t>(begin),
                                                result.records.begin() + static_cast<std::ptrdiff_t>(end));
    for (const char* metric : {"norm_error", "strong_error_max", "avg_error"}) {
      std::vector<double> ns;
      const std::vector<double> errors = metric_series(series, metric, ns);
      if (errors.empty()) continue;
      result.fits.push_back({series.front().function_id, series.front().t, metric, fit_rate(ns, errors)});
    }
    begin = end;
  }

  if (write_files) {
    const std::filesystem::path dir(config.output);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory " + dir.string() + ": " + ec.message());
    write_text(dir / "records.csv", records_csv(result.records));
    write_text(dir / "records.json", records_to_json(result.records).dump(2) + "\n");
    write_text(dir / "summary.json", summary_json(result).dump(2) + "\n");
  }
  return result;
}

std::string records_csv(const std::vector<ConvergenceRecord>& records) {
  std::ostringstream out;
  out << "model_id,function_id,t,n,norm_error,strong_error_max,avg_error,bound_lhs,bound_rhs,pass\n";
  auto opt = [&](const std::optional<double>& v) {
    if (v) out << format_double(*v);
  };
  for (const auto& r : records) {
    out << r.model_id << ',' << r.function_id << ',' << format_double(r.t) << ',' << r.n << ',';
    opt(r.norm_error);
    out << ',';
    if (!r.strong_errors.empty()) out << format_double(*std::max_element(r.strong_errors.begin(), r.strong_errors.end()));
    out << ',';
    opt(r.avg_error);
    out << ',';
    opt(r.bound_lhs);
    out << ',';
    opt(r.bound_rhs);
    out << ',';
    if (r.bound_pass) out << (*r.bound_pass ? "true" : "false");
    out << '\n';
  }
  return out.str();
}

json record_to_json(const ConvergenceRecord& r) {
  json j;
  j["model_id"] = r.model_id;
  j["function_id"] = r.function_id;
  j["t"] = number_to_json(r.t);
  j["n"] = r.n;
  j["norm_error"] = r.norm_error ? number_to_json(*r.norm_error) : json(nullptr);
  json strong = json::array();
  for (double e : r.strong_errors) strong.push_back(number_to_json(e));
  j["strong_errors"] = std::move(strong);
  j["avg_error"] = r.avg_error ? number_to_json(*r.avg_error) : json(nullptr);
  j["bound_lhs"] = r.bound_lhs ? number_to_json(*r.bound_lhs) : json(nullptr);
  j["bound_rhs"] = r.bound_rhs ? number_to_json(*r.bound_rhs) : json(nullptr);
  j["bound_pass"] = r.bound_pass ? json(*r.bound_pass) : json(nullptr);
  json diag = json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = number_to_json(v);
  j["diagnostics"] = std::move(diag);
  j["notes"] = r.notes;
  j["guard_tripped"] = r.guard_tripped;
  return j;
}

ConvergenceRecord record_from_json(const json& j) {
  try {
    ConvergenceRecord r;
    r.model_id = j.at("model_id").get<std::string>();
    r.function_id = j.at("function_id").get<std::string>();
    r.t = number_from_json(j.at("t"));
    r.n = j.at("n").get<std::uint64_t>();
    auto opt = [&](const char* key) -> std::optional<double> {
      if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
      return number_from_json(j.at(key));
    };
    r.norm_error = opt("norm_error");
    for (const json& e : j.at("strong_errors")) r.strong_errors.push_back(number_from_json(e));
    r.avg_error = opt("avg_error");
    r.bound_lhs = opt("bound_lhs");
    r.bound_rhs = opt("bound_rhs");
    if (j.contains("bound_pass") && !j.at("bound_pass").is_null()) r.bound_pass = j.at("bound_pass").get<bool>();
    for (const auto& item : j.at("diagnostics").items()) r.diagnostics[item.key()] = number_from_json(item.value());
    r.notes = j.at("notes").get<std::vector<std::string>>();
    r.guard_tripped = j.at("guard_tripped").get<bool>();
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("record: ") + e.what());
  }
}

json records_to_json(const std::vector<ConvergenceRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) arr.push_back(record_to_json(r));
  return arr;
}

std::vector<ConvergenceRecord> records_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("records: expected a JSON array");
  std::vector<ConvergenceRecord> out;
  for (const json& r : j) out.push_back(record_from_json(r));
  return out;
}

json summary_json(const ExperimentResult& result) {
  json fits = json::array();
  for (const auto& s : result.fits) {
    json f;
    f["function_id"] = s.function_id;
    f["t"] = s.t;
    f["metric"] = s.metric;
    f["fitted"] = s.fit.fitted;
    f["points"] = s.fit.points;
    if (s.fit.fitted) {
      f["beta"] = s.fit.beta;
      f["prefactor"] = s.fit.prefactor;
      f["r_squared"] = s.fit.r_squared;
    } else {
      f["reason"] = "fewer than 3 errors above 1e-14";
    }
    fits.push_back(std::move(f));
  }
  std::size_t bound_pass = 0, bound_fail = 0, with_notes = 0, guards = 0;
  for (const auto& r : result.records) {
    if (r.bound_pass) (*r.bound_pass ? bound_pass : bound_fail)++;
    if (!r.notes.empty()) ++with_notes;
    if (r.guard_tripped) ++guards;
  }
  json summary;
  summary["cells"] = result.records.size();
  summary["rate_fits"] = std::move(fits);
  summary["tallies"] = {{"bound_pass", bound_pass},
                        {"bound_fail", bound_fail},
                        {"cells_with_notes", with_notes},
                        {"guard_trips", guards}};
  return summary;
}

bool operator==(const ConvergenceRecord& a, const ConvergenceRecord& b) {
  if (a.model_id != b.model_id || a.function_id != b.function_id || !same_number(a.t, b.t) || a.n != b.n) return false;
  if (!same_optional(a.norm_error, b.norm_error) || !same_optional(a.avg_error, b.avg_error) ||
      !same_optional(a.bound_lhs, b.bound_lhs) || !same_optional(a.bound_rhs, b.bound_rhs))
    return false;
  if (a.bound_pass != b.bound_pass || a.notes != b.notes || a.guard_tripped != b.guard_tripped) return false;
  if (a.strong_errors.size() != b.strong_errors.size() || a.diagnostics.size() != b.diagnostics.size()) return false;
  for (std::size_t i = 0; i < a.strong_errors.size(); ++i)
    if (!same_number(a.strong_errors[i], b.strong_errors[i])) return false;
  for (auto ia = a.diagnostics.begin(), ib = b.diagnostics.begin(); ia != a.diagnostics.end(); ++ia, ++ib)
    if (ia->first != ib->first || !same_number(ia->second, ib->second)) return false;
  return true;
}

}  // namespace zeno

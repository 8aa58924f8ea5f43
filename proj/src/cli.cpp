#include "zeno/cli.hpp"

#include "zeno/format.hpp"
#include "zeno/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <string>

namespace zeno {

namespace {

const char* yes_no(bool b) { return b ? "true" : "false"; }

void print_report(std::ostream& out, const FunctionSpec& spec, const AdmissibilityReport& rep) {
  out << "id=" << spec.id << '\n';
  if (spec.cutoff) out << "cutoff=" << spec.cutoff->to_string() << '\n';
  out << "admissible=" << yes_no(rep.admissible) << '\n';
  out << "im_nonpositive=" << yes_no(rep.im_nonpositive) << '\n';
  out << "kato=" << to_string(with_verification(spec, rep).flags.kato) << '\n';
  out << "bounded_by_one=" << yes_no(rep.bounded_by_one) << '\n';
  out << "value_one_at_zero=" << yes_no(rep.value_one_at_zero) << '\n';
  out << "derivative_at_zero=" << format_double(rep.derivative_at_zero.real()) << (rep.derivative_at_zero.imag() < 0 ? "" : "+")
      << format_double(rep.derivative_at_zero.imag()) << "i\n";
  out << "derivative_is_minus_i=" << yes_no(rep.derivative_is_minus_i) << '\n';
  out << "sup_modulus=" << format_double(rep.sup_modulus) << '\n';
  out << "im_positive_points=" << rep.violating_points.size() << '\n';
  out << "checked on grid of " << standard_grid().size() << " points in [" << format_double(standard_grid().front())
      << ", " << format_double(standard_grid().back()) << "]\n";
}

int cmd_run(const std::string& path, std::optional<unsigned> threads, std::ostream& out) {
  const ExperimentConfig cfg = load_config(path);
  const ExperimentResult res = run_experiment(cfg, threads.value_or(default_worker_count()));
  std::size_t notes = 0;
  for (const auto& r : res.records) notes += r.notes.empty() ? 0 : 1;
  out << "cells=" << res.records.size() << " cells_with_notes=" << notes << '\n';
  for (const auto& f : res.fits) {
    out << "fit function=" << f.function_id << " t=" << format_double(f.t) << " metric=" << f.metric;
    if (f.fit.fitted)
      out << " beta=" << format_double(f.fit.beta) << " r_squared=" << format_double(f.fit.r_squared) << '\n';
    else
      out << " no-fit (" << f.fit.points << " usable points)\n";
  }
  out << "output=" << cfg.output << '\n';
  return res.guard_tripped ? kExitGuard : kExitOk;
}

int cmd_describe(const std::string& inline_json, std::ostream& out) {
  const auto j = nlohmann::json::parse(inline_json, nullptr, false);
  if (j.is_discarded()) throw ValidationError("--spec is not valid JSON");
  const ModelSpec spec = parse_model_spec(j);
  const ZenoModel model = build_model(spec);
  const auto& f = model.flags();
  out << "id=" << model.id() << '\n';
  out << "kind=" << to_string(spec.kind) << '\n';
  out << "ambient_dim=" << model.ambient_dim() << " rank=" << model.rank() << '\n';
  out << "spectrum=[" << format_double(model.hamiltonian().min_eigenvalue()) << ", "
      << format_double(model.hamiltonian().max_eigenvalue()) << "]\n";
  out << "non_negative=" << yes_no(f.non_negative) << " commuting=" << yes_no(f.commuting)
      << " out_of_assumption=" << yes_no(f.out_of_assumption) << '\n';
  out << "commutator_norm=" << format_double(model.commutator_norm()) << '\n';
  const ComplexMatrix& v = model.subspace().isometry();
  out << "isometry_defect=" << format_double(unitarity_defect(v.adjoint() * v)) << '\n';
  if (f.non_negative) out << "generator_norm=" << format_double(operator_norm(zeno_generator(model))) << '\n';
  if (const auto& c = model.chart())
    out << "chart points=" << c->points << " a=" << format_double(c->a()) << " b=" << format_double(c->b()) << '\n';
  return kExitOk;
}

int cmd_counterexample(Index n, double t, std::uint64_t steps, std::ostream& out) {
  if (steps < 1) throw ValidationError("--steps must be >= 1");
  const ZenoModel model = momentum_circle_model(n, middle_half_window(n));
  const ComplexMatrix vectors = counterexample_vectors(model, t);
  const CounterexampleReport rep = counterexample_run(model, t, steps, vectors);
  out << "model=" << model.id() << '\n';
  out << "t=" << format_double(t) << " steps=" << steps << " s=" << format_double(rep.step) << '\n';
  out << "identity_residual=" << format_double(rep.identity_residual) << '\n';
  out << "limit_residual=" << format_double(rep.limit_residual) << '\n';
  out << "contraction_witness=" << format_double(rep.evolved_norms.front()) << '\n';
  out << "interior_bump_norm=" << format_double(rep.evolved_norms.back()) << '\n';
  out << "product_norm=" << format_double(rep.product_norm) << '\n';
  out << "note: discrete circle of length 2*pi with " << n
      << " points; t restricted so the translated window stays inside the chart\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Modified Zeno product formula laboratory", "zeno-lab"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<unsigned> threads;
  auto* run = app.add_subcommand("run", "Run an experiment sweep from a JSON config");
  run->add_option("--config", config_path, "Path to the experiment config")->required();
  run->add_option("--threads", threads, "Worker cap (overrides ZENO_LAB_THREADS)")->check(CLI::PositiveNumber);

  auto* functions = app.add_subcommand("functions", "Inspect builtin functions");
  functions->require_subcommand(1);
  auto* list = functions->add_subcommand("list", "List builtin ids with verified flags");
  std::string function_id;
  auto* verify = functions->add_subcommand("verify", "Verify admissibility on the standard grid");
  verify->add_option("--id", function_id, "Builtin function id")->required();

  auto* models = app.add_subcommand("models", "Inspect model builders");
  models->require_subcommand(1);
  std::string spec_json;
  auto* describe = models->add_subcommand("describe", "Build a model and print its properties");
  describe->add_option("--spec", spec_json, "Inline JSON model spec")->required();

  Index grid_points = 0;
  double time = 0.0;
  std::uint64_t steps = 1024;
  auto* counter = app.add_subcommand("counterexample", "Momentum operator on a discrete circle");
  counter->add_option("--n", grid_points, "Grid points (power of two >= 64)")->required();
  counter->add_option("--t", time, "Evolution time")->required();
  counter->add_option("--steps", steps, "Product steps")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, threads, out);
    if (list->parsed()) {
      for (const auto& id : builtin_ids()) {
        const FunctionSpec spec = verified(builtin(id));
        out << id << " admissible=" << to_string(spec.flags.admissible)
            << " im_nonpositive=" << to_string(spec.flags.im_nonpositive) << " kato=" << to_string(spec.flags.kato)
            << '\n';
      }
      return kExitOk;
    }
    if (verify->parsed()) {
      const FunctionSpec spec = builtin(function_id);
      print_report(out, spec, verify_admissible(spec));
      return kExitOk;
    }
    if (describe->parsed()) return cmd_describe(spec_json, out);
    if (counter->parsed()) {
      if (!(time > 0.0)) throw ValidationError("--t must be > 0");
      return cmd_counterexample(grid_points, time, steps, out);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalGuardError& e) {
    err << "numerical guard: " << e.what() << '\n';
    return kExitGuard;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitGuard;
  }
  return kExitValidation;
}

}  // namespace zeno

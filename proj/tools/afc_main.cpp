// Command-line frontend: check, simulate, classify, litmus, normalize.
// Exit codes: 0 valid/ok, 1 invalid/violation, 2 usage or parse error,
// 3 enumeration cap overflow. Diagnostics go to stderr, data to stdout.

#include <cstdlib>
#include <iostream>

#include "afc/json_io.hpp"

#include "CLI11.hpp"

namespace {

struct GlobalFlags {
  int json_indent = 2;
  bool quiet = false;
};

void emit(const afc::Json& j, const GlobalFlags& g) {
  if (g.quiet) return;
  std::cout << j.dump(g.json_indent) << "\n";
}

afc::ConsistencyModel load_model(const std::string& arg) {
  try {
    return afc::builtin_model(arg);
  } catch (const std::invalid_argument&) {
    // Not a builtin name: treat as a model file in the formula DSL.
    std::ifstream in(arg);
    if (!in) throw afc::IoError("not a builtin model and not a readable file: " + arg);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return afc::parse_model_source(text, arg);
  }
}

std::pair<std::size_t, std::size_t> default_bounds() {
  std::size_t depth = 3, size = 6;
  if (const char* env = std::getenv("AFC_DEFAULT_BOUNDS")) {
    std::string s(env);
    auto comma = s.find(',');
    if (comma != std::string::npos) {
      depth = std::stoul(s.substr(0, comma));
      size = std::stoul(s.substr(comma + 1));
    }
  }
  return {depth, size};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"consistency-model laboratory"};
  app.require_subcommand(1);
  GlobalFlags flags;
  app.add_option("--json-indent", flags.json_indent, "indentation of JSON output");
  app.add_flag("--quiet", flags.quiet, "suppress stdout data");

  auto [env_depth, env_size] = default_bounds();

  // check
  std::string model_arg, opspec_arg, history_path, exec_path;
  std::size_t cap = 100000;
  CLI::App* check = app.add_subcommand("check", "validity of a history or execution");
  check->add_option("--model", model_arg, "consistency model")->required();
  check->add_option("--opspec", opspec_arg, "operation specification")->required();
  check->add_option("--history", history_path, "history JSON file");
  check->add_option("--exec", exec_path, "execution JSON file");
  check->add_option("--cap", cap, "extension enumeration cap");

  // simulate
  std::string program_path, sched_name = "no_receive";
  std::uint64_t seed = 0;
  bool emit_exec = false;
  CLI::App* simulate = app.add_subcommand("simulate", "run a program on the causal store");
  simulate->add_option("--opspec", opspec_arg, "operation specification")->required();
  simulate->add_option("--program", program_path, "program JSON file")->required();
  simulate->add_option("--sched", sched_name,
                       "no_receive|eager_delivery|seeded_random|adversarial_delay");
  simulate->add_option("--seed", seed, "scheduler seed");
  simulate->add_flag("--emit-exec", emit_exec, "include induced executions");

  // classify
  std::size_t depth = env_depth, size = env_size;
  CLI::App* classify = app.add_subcommand("classify", "arbitration-freeness");
  classify->add_option("--model", model_arg)->required();
  classify->add_option("--opspec", opspec_arg)->required();
  classify->add_option("--depth", depth, "unfolding depth");
  classify->add_option("--size", size, "vacuity search size");

  // litmus
  bool litmus_run = false;
  CLI::App* litmus = app.add_subcommand("litmus", "generate a litmus program");
  litmus->add_option("--model", model_arg)->required();
  litmus->add_option("--opspec", opspec_arg)->required();
  litmus->add_flag("--run", litmus_run, "run and verify the violation");
  litmus->add_option("--depth", depth);
  litmus->add_option("--size", size);

  // normalize
  CLI::App* normalize = app.add_subcommand("normalize", "simple formulas + vacuity");
  normalize->add_option("--model", model_arg)->required();
  normalize->add_option("--opspec", opspec_arg)->required();
  normalize->add_option("--depth", depth);
  normalize->add_option("--size", size);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*check) {
      afc::ConsistencyModel m = load_model(model_arg);
      afc::OpSpecPtr spec = afc::builtin_opspec(opspec_arg);
      if (history_path.empty() == exec_path.empty())
        throw afc::IoError("check needs exactly one of --history / --exec");
      afc::Verdict verdict;
      if (!exec_path.empty()) {
        afc::AbstractExecution xe =
            afc::execution_from_json(afc::load_json_file(exec_path));
        auto well = afc::validate_execution(xe);
        if (!well.ok) {
          afc::Json j{{"valid", false}, {"malformed", well.violations}};
          emit(j, flags);
          return 1;
        }
        verdict = afc::check_exec(m, *spec, xe);
      } else {
        afc::History h = afc::history_from_json(afc::load_json_file(history_path));
        auto well = afc::validate_history(h);
        if (!well.ok) {
          afc::Json j{{"valid", false}, {"malformed", well.violations}};
          emit(j, flags);
          return 1;
        }
        verdict = afc::check_history(m, *spec, h, cap);
      }
      emit(afc::verdict_to_json(verdict), flags);
      return verdict.valid ? 0 : 1;
    }

    if (*simulate) {
      afc::OpSpecPtr spec = afc::builtin_opspec(opspec_arg);
      afc::Program p = afc::program_from_json(afc::load_json_file(program_path));
      auto store = afc::causal_store(spec);
      afc::Trace t = afc::run(p, *store, afc::Scheduler::parse(sched_name, seed));
      afc::Json j;
      j["trace"] = afc::trace_to_json(t);
      j["history"] = afc::history_to_json(afc::induced_history(t));
      if (emit_exec) {
        afc::Json execs = afc::Json::array();
        for (const auto& xe : afc::induced_executions(t, cap))
          execs.push_back(afc::execution_to_json(xe));
        j["executions"] = execs;
      }
      emit(j, flags);
      return 0;
    }

    if (*classify) {
      afc::ConsistencyModel m = load_model(model_arg);
      afc::OpSpecPtr spec = afc::builtin_opspec(opspec_arg);
      afc::Classification c = afc::classify(m, *spec, depth, size);
      afc::Json j = afc::classification_to_json(c);
      if (model_arg.rfind("psi", 0) == 0)
        j["note"] = "psi instantiates the n-PSI family up to its parameter";
      emit(j, flags);
      return 0;
    }

    if (*litmus) {
      afc::ConsistencyModel m = load_model(model_arg);
      afc::OpSpecPtr spec = afc::builtin_opspec(opspec_arg);
      afc::Classification c = afc::classify(m, *spec, depth, size);
      if (c.result != afc::Classification::Result::NotArbitrationFree) {
        afc::Json j{{"refused", true},
                    {"reason", "model is " + c.result_str() + " w.r.t. " +
                                   spec->name() + "; no litmus program exists"}};
        emit(j, flags);
        return c.result == afc::Classification::Result::ArbitrationFree ? 1 : 3;
      }
      afc::GeneratedLitmus g = afc::generate_general(*c.witness_formula, *spec);
      afc::Json j = afc::litmus_to_json(g);
      if (litmus_run) {
        auto store = afc::causal_store(spec);
        afc::LitmusVerification v = afc::run_and_verify(g.program, *store, m, *spec);
        j["verification"] = afc::verification_to_json(v);
        emit(j, flags);
        return v.violation_confirmed ? 0 : 1;
      }
      emit(j, flags);
      return 0;
    }

    if (*normalize) {
      afc::ConsistencyModel m = load_model(model_arg);
      afc::OpSpecPtr spec = afc::builtin_opspec(opspec_arg);
      afc::UnfoldResult unfolded = afc::unfold_model(m, depth);
      afc::ConsistencyModel simple{m.name + "-simple", unfolded.formulas};
      afc::Json out;
      out["truncated"] = unfolded.truncated;
      afc::Json forms = afc::Json::array();
      for (const auto& f : unfolded.formulas) {
        auto witness = afc::vacuity_witness(f, simple, *spec, size);
        forms.push_back(afc::Json{{"formula", f.str()},
                                  {"vacuous_up_to_bound", !witness.has_value()}});
      }
      out["formulas"] = forms;
      out["bounds"] = afc::Json{{"depth", depth}, {"size", size}};
      emit(out, flags);
      return 0;
    }
  } catch (const afc::EnumerationOverflow& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const afc::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const afc::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

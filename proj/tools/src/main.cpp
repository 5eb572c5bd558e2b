#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using nikit::cli::CommandResult;

int emit(const CommandResult& result) {
  const std::string text = nikit::cli::dump_json(result.report);
  std::fwrite(text.data(), 1, text.size(), stdout);
  std::fflush(stdout);
  if (result.report.contains("error")) {
    std::cerr << "nikit: " << result.report["error"]["message"].get<std::string>() << "\n";
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Negative-imaginary certification toolkit for discrete-time LTI systems"};
  app.require_subcommand(1);
  bool timing = false;
  app.add_flag("--timing", timing, "Add wall_time_s to the report (breaks byte-identical output)");

  std::function<CommandResult()> run;

  nikit::cli::CertifyArgs certify;
  auto* c = app.add_subcommand("certify", "Search for or check a quadratic NI storage");
  c->add_option("model", certify.model, "Discrete model JSON")->required();
  c->add_option("--osni", certify.osni, "Require output strictness EPS (LMI convention)");
  auto* sani = c->add_flag("--sani", certify.sani, "Model is step-advanced; certify its inner system");
  auto* saosni = c->add_flag("--saosni", certify.saosni,
                             "As --sani, and report the largest output strictness");
  sani->excludes(saosni);
  c->add_option("--with-P", certify.with_P, "Check this storage ({\"P\": [[..]]}) instead of searching");
  c->add_option("--seed", certify.seed, "Audit RNG seed")->capture_default_str();
  c->add_option("--samples", certify.samples, "Audit sample count")->capture_default_str();
  c->add_option("--route", certify.route, "Search route")
      ->check(CLI::IsMember({"auto", "A", "B"}))
      ->capture_default_str();
  c->callback([&] { run = [&] { return nikit::cli::run_certify(certify); }; });

  nikit::cli::FreqArgs freq;
  auto* f = app.add_subcommand("freq", "Grid check of the frequency-domain NI conditions");
  f->add_option("model", freq.model, "Discrete model JSON")->required();
  f->add_option("--grid", freq.grid, "Interior grid points on (0, pi)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  f->add_option("--exclusion", freq.exclusion, "Half-width of the window around circle poles")
      ->capture_default_str();
  f->callback([&] { run = [&] { return nikit::cli::run_freq(freq); }; });

  nikit::cli::ZohArgs zoh;
  auto* z = app.add_subcommand("zoh", "Zero-order-hold discretization");
  z->add_option("model", zoh.model, "Continuous model JSON")->required();
  z->add_option("--period", zoh.period, "Sampling period in seconds")->required();
  z->add_option("--out", zoh.out, "Write the discrete model here");
  z->callback([&] { run = [&] { return nikit::cli::run_zoh(zoh); }; });

  nikit::cli::LoopArgs loop;
  auto* l = app.add_subcommand("loop", "Positive-feedback interconnection analysis");
  l->add_option("plant", loop.plant, "Plant model JSON")->required();
  l->add_option("controller", loop.controller, "Controller model JSON")->required();
  l->add_option("--advance", loop.advance, "Side carrying the one-step advance")
      ->check(CLI::IsMember({"plant", "controller"}))
      ->capture_default_str();
  l->add_option("--simulate", loop.simulate, "Simulation steps (0 disables)")->capture_default_str();
  l->add_option("--x0", loop.x0, "Initial stacked state, comma-separated (default all ones)");
  l->add_option("--csv", loop.csv, "Write the trajectory here");
  l->callback([&] { run = [&] { return nikit::cli::run_loop(loop); }; });

  nikit::cli::AuditArgs audit;
  auto* a = app.add_subcommand("audit", "Sampled check of the dissipation inequality");
  a->add_option("model", audit.model, "Discrete model JSON")->required();
  a->add_option("--P", audit.P, "Storage ({\"P\": [[..]]}); defaults to the model's P");
  a->add_option("--epsilon", audit.epsilon, "Output strictness (LMI convention)");
  a->add_option("--seed", audit.seed, "RNG seed")->capture_default_str();
  a->add_option("--samples", audit.samples, "Sample count")->capture_default_str();
  a->add_option("--box", audit.box, "Samples are uniform in [-box, box]")->capture_default_str();
  a->add_flag("--inner", audit.inner, "Audit the inner system of a step-advanced model");
  a->callback([&] { run = [&] { return nikit::cli::run_audit(audit); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return nikit::cli::kExitError;
  }

  const auto start = std::chrono::steady_clock::now();
  CommandResult result = run();
  if (timing) {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    result.report["wall_time_s"] = elapsed.count();
  }
  return emit(result);
}

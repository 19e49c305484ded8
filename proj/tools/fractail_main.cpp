#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "acceptance.hpp"
#include "fractail/error.hpp"
#include "fractail/mittag_leffler.hpp"
#include "fractail/oracle/mp_oracle.hpp"
#include "runner.hpp"
#include "scenario.hpp"

namespace {

constexpr int kUsageError = 2;

int cmd_run(const std::string& path, bool plots, std::string out_dir) {
  const auto scenario = fractail::cli::load_scenario(path);
  if (out_dir.empty()) out_dir = scenario.output_dir;
  if (out_dir.empty()) out_dir = "fractail-out/" + std::filesystem::path(path).stem().string();
  const auto report = fractail::cli::run_scenario(scenario, {out_dir, plots});
  std::cout << report.text;
  return report.passed() ? 0 : 1;
}

int cmd_verify(const std::string& suite) {
  const auto ids = fractail::acceptance::suite_criteria(suite);
  if (!ids) {
    std::cerr << "fractail verify: unknown suite '" << suite << "' (expected one of:";
    for (const auto& n : fractail::acceptance::suite_names()) std::cerr << " " << n;
    std::cerr << ")\n";
    return kUsageError;
  }
  int failed = 0;
  for (int id : *ids) {
    const auto r = fractail::acceptance::run_criterion(id);
    std::cout << r.line() << std::endl;
    failed += !r.passed();
  }
  std::cout << "suite " << suite << ": " << ids->size() - failed << "/" << ids->size() << " passed" << std::endl;
  return failed == 0 ? 0 : 1;
}

int cmd_mlf(double alpha, double beta, double x, bool check) {
  const double v = fractail::ml_eval({alpha, beta}, x);
  std::printf("E_{%.17g,%.17g}(%.17g) = %.17g\n", alpha, beta, x, v);
  if (!check) return 0;
  fractail::oracle::MittagLefflerOracle ref(alpha, beta);
  const auto r = ref(x);
  const double err = std::abs(v - r.value) / std::max(std::abs(r.value), 1e-300);
  std::printf("oracle = %.17g, relative error %.3e\n", r.value, err);
  return err <= 1e-10 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractail: long-time tails of time-fractional diffusion and source recovery"};
  app.require_subcommand(1);

  std::string scenario, out_dir, suite;
  bool plots = false, check = false;
  double alpha = 0.0, beta = 0.0, x = 0.0;

  auto* run = app.add_subcommand("run", "execute a scenario file");
  run->add_option("scenario", scenario, "scenario file (JSON)")->required();
  run->add_flag("--plots", plots, "also write SVG plots");
  run->add_option("--out", out_dir, "output directory");

  auto* verify = app.add_subcommand("verify", "run acceptance suites");
  verify->add_option("suite", suite, "mlf | forward | asymptotic | inverse | scalar | contrast | all")->required();

  auto* mlf = app.add_subcommand("mlf", "evaluate E_{alpha,beta}(x) for x <= 0");
  mlf->add_option("--alpha", alpha, "alpha in (0, 2)")->required();
  mlf->add_option("--beta", beta, "beta > 0")->required();
  mlf->add_option("--x", x, "argument, x <= 0")->required()->allow_extra_args(false);
  mlf->add_flag("--check", check, "compare with the multiprecision oracle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*run) return cmd_run(scenario, plots, out_dir);
    if (*verify) return cmd_verify(suite);
    if (*mlf) return cmd_mlf(alpha, beta, x, check);
  } catch (const fractail::Error& e) {
    std::cerr << "fractail: " << e.what() << "\n";
    return e.code() == fractail::ErrorCode::ConfigError ? kUsageError : 1;
  } catch (const std::exception& e) {
    std::cerr << "fractail: " << e.what() << "\n";
    return 1;
  }
  return kUsageError;
}

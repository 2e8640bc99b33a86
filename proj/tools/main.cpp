#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bem2d/harness.hpp"

namespace {

void print_report(const bem2d::Report& rep) {
  std::printf("case %s  problem %s  path %s  nodes %d\n", rep.case_id.c_str(),
              rep.problem.c_str(), rep.path.c_str(), rep.nodes);
  for (const auto& a : rep.assertions)
    std::printf("  [%s] %-42s %.3e  (tol %.1e)\n", a.pass ? "PASS" : "FAIL", a.name.c_str(),
                a.value, a.tolerance);
  if (rep.extra.contains("metrics"))
    std::printf("  metrics: %s\n", rep.extra["metrics"].dump().c_str());
  if (rep.extra.contains("convergence"))
    std::printf("  convergence: %s\n", rep.extra["convergence"].dump().c_str());
  if (rep.extra.contains("robin_constant"))
    std::printf("  robin constant: %.10f  exceptional: %s\n",
                rep.extra["robin_constant"].get<double>(),
                rep.extra["is_exceptional"].get<bool>() ? "yes" : "no");
  std::printf("%s\n", rep.passed ? "OK" : "FAILED");
}

int finish(const bem2d::Report& rep) { return rep.passed ? 0 : 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2-D Laplace boundary-integral solver for multiply connected domains"};
  app.require_subcommand(1);

  std::string config_path;
  std::string report_override, csv_override;
  std::vector<int> nodes{32, 64, 128};

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "JSON case configuration")->required();
    cmd->add_option("--report", report_override, "write the JSON report to this path");
    cmd->add_option("--csv", csv_override, "prefix for CSV dumps of densities and fields");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve one boundary value problem");
  add_common(solve);
  CLI::App* conv = app.add_subcommand("convergence", "repeat a case over several grids");
  add_common(conv);
  conv->add_option("--nodes", nodes, "node counts per component")->delimiter(',');
  CLI::App* detect = app.add_subcommand("detect-exceptional",
                                        "compute the Robin constant of the outer boundary");
  add_common(detect);
  CLI::App* ident = app.add_subcommand("identities", "run the operator-identity suite");
  add_common(ident);
  CLI::App* oracle = app.add_subcommand("oracle",
                                        "recompute fixture values with the independent oracle");
  add_common(oracle);

  CLI11_PARSE(app, argc, argv);

  try {
    bem2d::CaseConfig cfg = bem2d::load_config(config_path);
    if (!report_override.empty()) cfg.report_path = report_override;
    if (!csv_override.empty()) cfg.csv_prefix = csv_override;

    bem2d::Report rep;
    if (app.got_subcommand(solve)) rep = bem2d::run_case(cfg);
    else if (app.got_subcommand(conv)) rep = bem2d::run_convergence(cfg, nodes);
    else if (app.got_subcommand(detect)) rep = bem2d::run_detect_exceptional(cfg);
    else if (app.got_subcommand(ident)) rep = bem2d::run_identities(cfg);
    else rep = bem2d::run_oracle_checks(cfg);

    print_report(rep);
    return finish(rep);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

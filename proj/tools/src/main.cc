#include <iostream>

#include "CLI11.hpp"
#include "wiretap_app/commands.h"

using wiretap::app::CommonOptions;

namespace {

void AddCommon(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "INI experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out_dir,
                  "output directory (relative paths resolve under $WIRETAP_OUTPUT_ROOT)");
  cmd->add_option("--seed", o.seed, "training / oracle seed");
  cmd->add_option("--lambda", o.lambda, "privacy weight (comma list for sweep and oracle)");
  cmd->add_option("--eps-b", o.eps_b, "Bob's crossover, applied to every band");
  cmd->add_option("--eps-e", o.eps_e, "Eve's crossover (comma list for sweep)");
  cmd->add_option("--bands", o.bands, "channel bands as width:eps_b:eps_e,...");
}

}  // namespace

int main(int argc, char** argv) {
  namespace app = wiretap::app;
  CLI::App cli{"Privacy-aware joint source-channel coding over binary symmetric wiretap channels"};
  cli.require_subcommand(1);
  CommonOptions o;
  std::string checkpoint;
  bool corrupt = false;

  auto* gen = cli.add_subcommand("gen-data", "generate the glyph dataset and cache it");
  auto* train = cli.add_subcommand("train", "train encoder, decoder and eavesdropper");
  auto* sweep = cli.add_subcommand("sweep", "privacy-utility sweep over lambda x eps_E");
  auto* eval = cli.add_subcommand("eval", "evaluate a checkpoint: leakage, accuracy, grids");
  auto* parallel = cli.add_subcommand("parallel", "per-band analysis of a multi-band channel");
  auto* oracle = cli.add_subcommand("oracle", "exact frontier on a tiny discrete system");
  auto* gradcheck = cli.add_subcommand("gradcheck", "finite-difference gradient checks");
  for (auto* c : {gen, train, sweep, eval, parallel, oracle, gradcheck}) AddCommon(c, o);
  eval->add_option("--checkpoint", checkpoint, "models.ckpt from train")->required();
  gradcheck->add_flag("--corrupt", corrupt, "perturb backward passes (negative control)");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? app::kExitOk : app::kExitUsage;
  }

  const app::Io io{std::cout, std::cerr};
  return app::Guarded(std::cerr, [&]() -> int {
    if (*gen) return app::CmdGenData(o, io);
    if (*train) return app::CmdTrain(o, io);
    if (*sweep) return app::CmdSweep(o, io);
    if (*eval) return app::CmdEval(o, checkpoint, io);
    if (*parallel) return app::CmdParallel(o, io);
    if (*oracle) return app::CmdOracle(o, io);
    return app::CmdGradCheck(corrupt, o, io);
  });
}

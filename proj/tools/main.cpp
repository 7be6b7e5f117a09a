#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <specgap/config.hpp>
#include <specgap/pipeline.hpp>

using namespace specgap;

int main(int argc, char** argv) {
  CLI::App app{"Design media with prescribed spectral gaps and verify them"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 1;
  std::uint64_t seed = 0;
  bool dry_run = false;

  app.add_option("--config", config_path, "JSON run configuration")
      ->required();
  app.add_option("--out", out_dir,
                 "output directory (default: output_dir from the config)");
  app.add_option("--threads", threads, "sweep worker count")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for the eigensolver starting block");
  app.add_flag("--dry-run", dry_run,
               "validate the config and print the plan without solving");

  app.add_subcommand("design", "closed-form medium for the target intervals");
  app.add_subcommand("limit", "limiting spectrum and band layout");
  app.add_subcommand("radial", "resonance table of one inclusion");
  app.add_subcommand("bloch", "band sheets per epsilon");
  app.add_subcommand("gaps", "detected gaps against the window");
  app.add_subcommand("cell", "effective coefficient matrix");
  app.add_subcommand("verify", "score finite-epsilon gaps against targets");

  CLI11_PARSE(app, argc, argv);

  try {
    RunContext ctx;
    ctx.config = load_config(config_path);
    ctx.out_dir = out_dir.empty() ? std::filesystem::path(ctx.config.output_dir)
                                  : std::filesystem::path(out_dir);
    ctx.threads = threads;
    ctx.seed = seed;
    ctx.dry_run = dry_run;

    if (app.got_subcommand("verify")) {
      VerifyOutcome outcome = cmd_verify(ctx);
      std::printf("%s\n", outcome.summary.c_str());
      return outcome.passed ? 0 : 1;
    }

    std::string summary;
    if (app.got_subcommand("design")) summary = cmd_design(ctx);
    else if (app.got_subcommand("limit")) summary = cmd_limit(ctx);
    else if (app.got_subcommand("radial")) summary = cmd_radial(ctx);
    else if (app.got_subcommand("bloch")) summary = cmd_bloch(ctx);
    else if (app.got_subcommand("gaps")) summary = cmd_gaps(ctx);
    else if (app.got_subcommand("cell")) summary = cmd_cell(ctx);
    std::printf("%s\n", summary.c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

#include <CLI11.hpp>

#include "wcurv/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"wcurvlab: weighted-curvature laboratory on structured grids"};
  app.require_subcommand(1);

  wcurv::CliOptions opts;
  const char* subs[] = {"curvature", "verify",    "static-check", "kernel",
                        "warp-check", "prescribe", "ode"};
  const char* descs[] = {
      "compute and dump the weighted curvature tensors",
      "run the identity suites with seeded random fields",
      "evaluate the weighted and classical static residuals",
      "assemble DRDR*, detect its kernel, report the spectral margin",
      "fiber-warp and static-warp consistency checks",
      "solve the prescribed weighted-scalar-curvature problem",
      "integrate and check the 1-d static profile system"};

  for (int i = 0; i < 7; ++i) {
    CLI::App* sub = app.add_subcommand(subs[i], descs[i]);
    sub->add_option("--config", opts.config_path, "config file path")
        ->required();
    sub->add_option("--out", opts.out_dir, "output directory (default .)");
    sub->add_option("--seed", opts.seed, "random-field seed (default 42)");
    sub->add_option("--order", opts.order_override,
                    "override the stencil order (2, 4, 6, 8)");
    sub->add_option("--refine", opts.refine,
                    "refinement levels for verify (default 3)");
    sub->callback([&opts, i, &subs] { opts.subcommand = subs[i]; });
  }

  CLI11_PARSE(app, argc, argv);
  return wcurv::run_command(opts);
}

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "minivc/driver.hpp"

int main(int argc, char **argv) {
  CLI::App app{"minivc - a small auto-active program verifier"};
  app.require_subcommand(1);

  minivc::VerifyOptions opt;
  std::string file, method, dir, manifest;
  std::vector<std::string> runArgs;

  auto addVerifyOpts = [&](CLI::App *cmd) {
    cmd->add_option("--fuel", opt.fuel,
                    "recursive function unrolling depth (default 2)");
    cmd->add_option("--timeout", opt.timeoutSec,
                    "per-obligation solver timeout in seconds (default 10)");
    cmd->add_option("--workers", opt.workers,
                    "parallel solver processes (default: hardware threads)");
    cmd->add_option("--solver-path", opt.solverPath,
                    "SMT solver executable (default: $MINIVC_SOLVER)");
  };

  CLI::App *verify = app.add_subcommand("verify", "verify a file");
  verify->add_option("file", file)->required();
  addVerifyOpts(verify);
  verify->add_flag("--json", opt.json, "emit a JSON report on stdout");
  verify->add_flag("--show-decreases", opt.showDecreases,
                   "print termination metrics, including guessed ones");
  verify->add_option("--dump-smt", opt.dumpSmtDir,
                     "write one .smt2 file per obligation into this directory");

  CLI::App *run = app.add_subcommand("run", "execute a method");
  run->add_option("file", file)->required();
  run->add_option("method", method)->required();
  // method arguments are taken verbatim: CLI11 would otherwise expand
  // bracketed lists like [1,2,3] into separate elements
  run->allow_extras();

  CLI::App *corpus =
      app.add_subcommand("corpus", "verify a corpus against a manifest");
  corpus->add_option("dir", dir)->required();
  corpus->add_option("--manifest", manifest)->required();
  addVerifyOpts(corpus);

  CLI11_PARSE(app, argc, argv);

  if (verify->parsed()) {
    minivc::VerifyResult r = minivc::verify_file(file, opt);
    for (const auto &d : r.diagnostics)
      std::cerr << minivc::format_diagnostic(d) << "\n";
    if (opt.showDecreases)
      for (const auto &line : r.metricLines)
        std::cout << line << "\n";
    if (opt.json)
      std::cout << r.jsonReport << "\n";
    else
      std::cout << file << ": " << r.verdict << "\n";
    return r.exitCode;
  }
  if (run->parsed()) {
    runArgs = run->remaining();
    return minivc::run_method(file, method, runArgs);
  }
  return minivc::run_corpus(dir, manifest, opt);
}

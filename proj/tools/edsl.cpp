#include <iostream>

#include <CLI11.hpp>

#include "edsl/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"edsl: energy-dependent Sturm-Liouville problems"};
  std::string command, config, out, format;
  bool verbose = false;
  app.add_option("command", command, "one of spectrum, charfn, factor-check, kernel-check, chain-check, "
                                     "oracle-compare, norming")
      ->required();
  app.add_option("--config", config, "JSON config file")->required();
  app.add_option("--out", out, "artifact path (sidecar goes to <out>.meta.json)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("-v,--verbose", verbose, "diagnostics on stderr");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  edsl::cli::RunOptions opt;
  if (!out.empty()) opt.out = out;
  if (!format.empty()) opt.format = format;
  opt.verbose = verbose;
  return edsl::cli::run(command, config, opt, std::cout, std::cerr);
}

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "papevo/experiment.hpp"
#include "papevo/interp.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pseudo almost periodic evolution experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string outdir;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "key=value config file")->required();
  run->add_option("--outdir", outdir, "Override the config's output directory");

  std::string fault = "none";
  auto* selftest = app.add_subcommand("selftest", "Run the fast invariant suite");
  selftest->add_option("--inject-fault", fault, "Deliberate fault to prove detection")
      ->check(CLI::IsMember({"none", "kernel-constant"}));

  int d = 3;
  int m = 4;
  double r = 9.0;
  auto* exponents = app.add_subcommand("exponents", "Print the derived exponent set");
  exponents->add_option("--d", d, "Space dimension");
  exponents->add_option("--m", m, "Nonlinearity power");
  exponents->add_option("--r", r, "Stability exponent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : papevo::kExitConfig;
  }

  if (run->parsed()) {
    return papevo::run(config_path, std::cerr,
                       outdir.empty() ? std::nullopt : std::optional<std::string>(outdir));
  }
  if (selftest->parsed()) {
    const auto res =
        papevo::selftest(fault == "kernel-constant" ? papevo::SelftestFault::kernel_constant
                                                    : papevo::SelftestFault::none);
    std::cout << res.summary();
    return res.passed() ? papevo::kExitOk : papevo::kExitFail;
  }
  try {
    std::cout << papevo::derive_application_exponents(d, m, r).to_key_value();
  } catch (const papevo::InvalidArgument& e) {
    std::cerr << e.what() << '\n';
    return papevo::kExitConfig;
  }
  return papevo::kExitOk;
}

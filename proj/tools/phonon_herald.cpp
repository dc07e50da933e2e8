// Command-line front end: runs one job and writes its CSV.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phonon_herald/config.hpp"
#include "phonon_herald/errors.hpp"
#include "phonon_herald/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitFlagged = 4;

int run(const std::string& command, const std::string& config, const std::string& figure,
        const std::string& out, bool strict, const std::vector<std::string>& sets) {
  using namespace herald;
  exp::Overrides overrides;
  for (const auto& s : sets) overrides.push_back(exp::parse_override(s));

  std::optional<exp::FigureId> id;
  if (command == "figure") {
    if (!figure.empty()) id = exp::figure_from_string(figure);
  } else {
    id = exp::figure_from_string(command);
  }
  exp::FigureJob job = exp::load_job(config, overrides, id);
  if (command == "figure" && (job.figure == exp::FigureId::G2 || job.figure == exp::FigureId::Dlcz ||
                              job.figure == exp::FigureId::Validate ||
                              job.figure == exp::FigureId::OracleCompare) && figure.empty())
    throw ConfigError("'figure' needs a figure id (fig1e, fig2a, ...); use the dedicated subcommand otherwise");
  job.output = out;

  const io::CsvTable table = exp::run_job(job);
  if (out.empty() || out == "-") {
    table.write(std::cout);
  } else {
    std::ofstream f(out);
    if (!f) throw ConfigError("cannot open output file '" + out + "'");
    table.write(f);
  }
  for (const auto& w : table.warnings) std::cerr << "warning: " << w << '\n';
  return strict && table.flagged() ? kExitFlagged : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heralded single-phonon simulations"};
  std::string command, config, figure, out;
  bool strict = false;
  std::vector<std::string> sets;
  app.add_option("command", command, "figure | g2 | dlcz | validate | oracle-compare")
      ->required()
      ->check(CLI::IsMember({"figure", "g2", "dlcz", "validate", "oracle-compare"}));
  app.add_option("--config,-c", config, "INI job file")->required();
  app.add_option("--figure,-f", figure, "figure id for the 'figure' command");
  app.add_option("--out,-o", out, "output CSV path (stdout if omitted)");
  app.add_flag("--strict", strict, "exit 4 when the output carries warnings");
  app.add_option("--set", sets, "override section.key=value (repeatable)")->take_all();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitNumerical;
  }

  try {
    return run(command, config, figure, out, strict, sets);
  } catch (const herald::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const herald::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const herald::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

// Command-line front end: run scenario files, generate models, self-test.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ppbasis/scenario.hpp"

namespace sc = ppbasis::scenario;

namespace {

bool write_json(const std::string& path, const sc::json& data) {
  if (path == "-") {
    std::cout << data.dump(2) << "\n";
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    return false;
  }
  out << data.dump(2) << "\n";
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pimsner-Popa systems and bases for finite-dimensional inclusions"};
  app.require_subcommand(1);

  std::string file, json_out;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps;
  auto* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("file", file, "scenario JSON")->required();
  run->add_option("--json", json_out, "write the machine report here ('-' for stdout)");
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--eps", eps, "override eps_rel")->check(CLI::PositiveNumber);

  std::string kind;
  std::vector<std::string> params;
  auto* gen = app.add_subcommand("generate", "print a scenario for a generator kind");
  gen->add_option("kind", kind, "diagonal_in_matrix | group_algebra_pair | crossed_product | quadruple")->required();
  gen->add_option("params", params, "key=value pairs");

  std::string selftest_json;
  auto* self = app.add_subcommand("selftest", "run the built-in scenario corpus");
  self->add_option("--json", selftest_json, "write the machine report here ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : sc::kInputError;
  }

  if (*run) {
    sc::RunOptions opts;
    opts.seed = seed;
    opts.eps = eps;
    const sc::Report r = sc::run_file(file, opts);
    std::cout << r.text;
    if (!json_out.empty() && !write_json(json_out, r.data)) return sc::kInputError;
    return r.exit_code;
  }

  if (*gen) {
    std::map<std::string, std::string> kv;
    for (const auto& p : params) {
      const auto eq = p.find('=');
      if (eq == std::string::npos) {
        std::cerr << "parameter \"" << p << "\" is not key=value\n";
        return sc::kInputError;
      }
      kv[p.substr(0, eq)] = p.substr(eq + 1);
    }
    try {
      std::cout << sc::generate_model(kind, kv).dump(2) << "\n";
    } catch (const ppbasis::Error& e) {
      std::cerr << "generate: " << e.what() << "\n";
      return sc::is_input_error(e.code()) ? sc::kInputError : sc::kNumericFailure;
    }
    return sc::kPass;
  }

  const sc::SelftestResult r = sc::run_selftest();
  std::cout << r.text;
  if (!selftest_json.empty() && !write_json(selftest_json, r.data)) return sc::kInputError;
  return r.exit_code;
}

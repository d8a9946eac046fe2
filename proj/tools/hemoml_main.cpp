// hemoml command line: generate virtual-patient cohorts, run the
// measurement-combination sweeps and the follow-up studies.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hemoml/cli.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "run configuration JSON")
      ->required();
  cmd->add_option("--seed", flags.seed, "master seed override");
  cmd->add_option("--jobs", flags.jobs, "worker cap (0 = all cores)");
  cmd->add_option("--out", flags.out_dir, "output directory override");
}

hemoml::RunConfig load(const CommonFlags& flags) {
  hemoml::RunConfig cfg = hemoml::load_config(flags.config_path);
  if (flags.seed) {
    cfg.seed = *flags.seed;
    cfg.seed_set = true;
  }
  if (flags.jobs) cfg.jobs = *flags.jobs;
  if (flags.out_dir) cfg.out_dir = *flags.out_dir;
  cfg.validate();
  return cfg;
}

std::vector<hemoml::Method> parse_methods(const std::string& list) {
  std::vector<hemoml::Method> methods;
  std::istringstream in(list);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) methods.push_back(hemoml::method_from_string(item));
  return methods;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"arterial disease detection pipeline"};
  app.require_subcommand(1);

  CommonFlags flags;

  auto* generate = app.add_subcommand("generate", "write VPD cohort files");
  CommonFlags gen_flags;
  add_common(generate, gen_flags);

  auto* sweep = app.add_subcommand("sweep", "measurement-combination search");
  CommonFlags sweep_flags;
  add_common(sweep, sweep_flags);
  std::string sweep_disease, sweep_methods, sweep_combos = "all";
  bool sweep_force = false;
  sweep->add_option("--disease", sweep_disease,
                    "restrict to one cohort (cas,sas,pad,aaa,aaa-l)");
  sweep->add_option("--methods", sweep_methods, "comma list, e.g. gb,rf");
  sweep->add_option("--combos", sweep_combos,
                    "all | explicit list like q1+p1,q3+q2+q1");
  sweep->add_flag("--force", sweep_force, "ignore resume manifests");

  auto* gridsearch = app.add_subcommand("gridsearch", "hyperparameter grid");
  CommonFlags grid_flags;
  add_common(gridsearch, grid_flags);
  std::string grid_method, grid_disease;
  gridsearch->add_option("--method", grid_method, "rf | gb | mlp")->required();
  gridsearch->add_option("--disease", grid_disease, "cohort tag")->required();

  auto* summarize =
      app.add_subcommand("summarize", "measurement-count and Q1 summaries");
  CommonFlags sum_flags;
  add_common(summarize, sum_flags);
  std::string sum_disease, sum_methods;
  summarize->add_option("--disease", sum_disease, "cohort tag")->required();
  summarize->add_option("--methods", sum_methods, "comma list (default: all)");

  auto* ratio =
      app.add_subcommand("ratio-study", "AAA_L vs AAA F1 ratios (GB)");
  CommonFlags ratio_flags;
  add_common(ratio, ratio_flags);

  auto* unilateral =
      app.add_subcommand("unilateral", "Q1/P3 single-side AAA study (GB)");
  CommonFlags uni_flags;
  add_common(unilateral, uni_flags);

  auto* import_cmd =
      app.add_subcommand("import-vpd", "convert external tabular data");
  std::string import_input, import_descriptor, import_out, import_cohort = "H";
  import_cmd->add_option("--input", import_input, "CSV table")->required();
  import_cmd
      ->add_option("--descriptor", import_descriptor,
                   "column-mapping JSON (sites, period_column, id_column)")
      ->required();
  import_cmd->add_option("--out", import_out, "output JSONL path")->required();
  import_cmd->add_option("--cohort", import_cohort, "cohort tag (default H)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return hemoml::cli::run_generate(load(gen_flags));
    if (sweep->parsed()) {
      hemoml::cli::SweepOptions options;
      if (!sweep_disease.empty())
        options.diseases = {hemoml::disease_kind_from_string(sweep_disease)};
      if (!sweep_methods.empty()) options.methods = parse_methods(sweep_methods);
      options.combos = sweep_combos;
      options.force = sweep_force;
      return hemoml::cli::run_sweep(load(sweep_flags), options);
    }
    if (gridsearch->parsed())
      return hemoml::cli::run_gridsearch(
          load(grid_flags), hemoml::method_from_string(grid_method),
          hemoml::disease_kind_from_string(grid_disease));
    if (summarize->parsed())
      return hemoml::cli::run_summarize(
          load(sum_flags), hemoml::disease_kind_from_string(sum_disease),
          sum_methods.empty() ? std::vector<hemoml::Method>{}
                              : parse_methods(sum_methods));
    if (ratio->parsed()) return hemoml::cli::run_ratio_study(load(ratio_flags));
    if (unilateral->parsed())
      return hemoml::cli::run_unilateral(load(uni_flags));
    if (import_cmd->parsed()) {
      const auto descriptor = hemoml::cli::ImportDescriptor::from_json(
          nlohmann::json::parse(hemoml::read_file(import_descriptor)));
      const auto result =
          hemoml::cli::import_vpd(import_input, descriptor, import_out,
                                  import_cohort);
      std::cout << "accepted " << result.accepted << " record(s)\n";
      for (const auto& err : result.row_errors) std::cerr << err << "\n";
      return result.row_errors.empty() ? hemoml::cli::kExitOk
                                       : hemoml::cli::kExitValidation;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hemoml::cli::kExitValidation;
  }
  return hemoml::cli::kExitOk;
}

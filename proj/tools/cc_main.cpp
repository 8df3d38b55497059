// cc -- ClassContrast command line: embeddings, node classification,
// link prediction, homophily reports, and spatial/context ablations.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "classcontrast/dataset_io.hpp"
#include "classcontrast/pipeline.hpp"

namespace cc = classcontrast;
namespace fs = std::filesystem;

namespace {

struct CliOptions {
  std::string dataset;
  std::string recipe = "generic-directed";
  std::string seeds = "0,1,2,3,4,5,6,7,8,9";
  int iterations = 2;
  std::string mode = "both";
  std::string out = ".";
  std::string config_file;
  int epochs = 0;  // 0 = recipe default
};

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoull(tok));
  }
  if (out.empty()) throw cc::config_error("no seeds given");
  return out;
}

cc::AblationMode parse_mode(const std::string& m) {
  if (m == "both") return cc::AblationMode::Both;
  if (m == "spatial-only") return cc::AblationMode::SpatialOnly;
  if (m == "context-only") return cc::AblationMode::ContextOnly;
  throw cc::config_error("unknown mode: " + m +
                         " (expected both|spatial-only|context-only)");
}

// key=value lines mirroring the flags; '#' starts a comment
void apply_config_file(CliOptions& opts, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw cc::config_error("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw cc::config_error(path + ":" + std::to_string(lineno) +
                             ": expected key=value");
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "dataset") opts.dataset = value;
    else if (key == "recipe") opts.recipe = value;
    else if (key == "seeds") opts.seeds = value;
    else if (key == "iterations") opts.iterations = std::stoi(value);
    else if (key == "mode") opts.mode = value;
    else if (key == "out") opts.out = value;
    else if (key == "epochs") opts.epochs = std::stoi(value);
    else
      throw cc::config_error(path + ":" + std::to_string(lineno) +
                             ": unknown key '" + key + "'");
  }
}

// A dataset directory holds either Planetoid-style <base>.content/.cites
// files or nodes.csv/edges.csv.
cc::Dataset load_dataset(const std::string& path, const cc::DatasetRecipe& recipe) {
  fs::path dir(path);
  if (!fs::exists(dir)) throw cc::data_error("dataset path does not exist: " + path);
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".content") {
        fs::path cites = entry.path();
        cites.replace_extension(".cites");
        if (!fs::exists(cites))
          throw cc::data_error("missing .cites next to " + entry.path().string());
        return cc::load_content_cites(entry.path().string(), cites.string());
      }
    }
    fs::path nodes = dir / "nodes.csv";
    fs::path edges = dir / "edges.csv";
    if (fs::exists(nodes) && fs::exists(edges)) {
      cc::CsvOptions opts;
      opts.undirected = !recipe.directed;
      return cc::load_generic_csv(nodes.string(), edges.string(), opts);
    }
    throw cc::data_error("no recognized dataset files under " + path);
  }
  throw cc::data_error("dataset path must be a directory: " + path);
}

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw cc::data_error("cannot write " + path);
  f << j.dump(2) << "\n";
}

cc::PipelineConfig make_config(const CliOptions& opts) {
  cc::PipelineConfig config;
  config.seeds = parse_seeds(opts.seeds);
  config.iterations = opts.iterations;
  config.mode = parse_mode(opts.mode);
  config.out_dir = opts.out;
  if (opts.epochs > 0) {
    config.node_train.epochs = opts.epochs;
    config.link_train.epochs = opts.epochs;
  }
  return config;
}

int run(const std::string& command, CliOptions& opts) {
  if (!opts.config_file.empty()) {
    CliOptions from_file = opts;
    apply_config_file(from_file, opts.config_file);
    opts = from_file;
  }
  if (opts.dataset.empty()) throw cc::config_error("--dataset is required");

  cc::DatasetRecipe recipe = cc::recipe_by_name(opts.recipe);
  cc::Dataset ds = load_dataset(opts.dataset, recipe);
  cc::PipelineConfig config = make_config(opts);
  fs::create_directories(opts.out);

  if (command == "embed") {
    config.write_embeddings = true;
    cc::run_transductive(ds.graph, ds.table, recipe, config);
    std::cout << "embeddings written to " << opts.out << "\n";
  } else if (command == "classify") {
    cc::EvalReport report = cc::run_transductive(ds.graph, ds.table, recipe, config);
    write_json(report.to_json(), opts.out + "/metrics.json");
    auto means = report.mean_test_per_iteration();
    for (std::size_t t = 0; t < means.size(); ++t)
      std::cout << "P" << t << " mean test accuracy: " << means[t] << "\n";
  } else if (command == "linkpred") {
    cc::EvalReport report = cc::run_link_prediction(ds.graph, ds.table, recipe, config);
    write_json(report.to_json(), opts.out + "/metrics.json");
    std::cout << "mean AUC: " << report.mean_auc() << " +- " << report.std_auc()
              << "\n";
  } else if (command == "homophily") {
    nlohmann::json report = cc::run_homophily_report(ds.graph, ds.table, recipe);
    write_json(report, opts.out + "/homophily.json");
    std::cout << "node homophily: " << report["node_homophily"] << "\n";
  } else if (command == "ablation") {
    nlohmann::json combined;
    for (cc::AblationMode m : {cc::AblationMode::SpatialOnly,
                               cc::AblationMode::ContextOnly,
                               cc::AblationMode::Both}) {
      cc::PipelineConfig mc = config;
      mc.mode = m;
      cc::EvalReport report = cc::run_transductive(ds.graph, ds.table, recipe, mc);
      combined[cc::ablation_mode_name(m)] = report.to_json();
      auto means = report.mean_test_per_iteration();
      std::cout << cc::ablation_mode_name(m)
                << " final mean test accuracy: " << means.back() << "\n";
    }
    write_json(combined, opts.out + "/metrics.json");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ClassContrast node embeddings, classification, and homophily analysis"};
  app.require_subcommand(1);

  CliOptions opts;
  std::vector<CLI::App*> subs;
  for (const char* name : {"embed", "classify", "linkpred", "homophily", "ablation"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--dataset", opts.dataset, "dataset directory");
    sub->add_option("--recipe", opts.recipe, "recipe name (cora, citeseer, ...)");
    sub->add_option("--seeds", opts.seeds, "comma-separated seed list");
    sub->add_option("--iterations", opts.iterations, "transductive iterations T");
    sub->add_option("--mode", opts.mode, "both|spatial-only|context-only");
    sub->add_option("--out", opts.out, "output directory");
    sub->add_option("--config", opts.config_file, "key=value config file");
    sub->add_option("--epochs", opts.epochs, "override training epochs");
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);
  try {
    return run(app.get_subcommands().front()->get_name(), opts);
  } catch (const cc::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cc::argument_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cc::data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

// poirec: contextual POI recommendation from the command line.
//
// Subcommands: build-index, recommend, evaluate, sweep, kb-inspect.
// Exit codes: 0 ok, 1 usage error, 2 data error, 3 degenerate estimation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "poirec/corpus.hpp"
#include "poirec/errors.hpp"
#include "poirec/eval.hpp"
#include "poirec/recommender.hpp"

namespace fs = std::filesystem;
using namespace poirec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDegenerate = 3;

struct PipelineOpts {
  bool no_lowercase = false;
  std::string stemmer = "porter";
  std::string stopwords = "default";  // default | none | <file>

  PipelineConfig make() const {
    PipelineConfig cfg;
    cfg.lowercase = !no_lowercase;
    cfg.stemmer = stemmer_from_string(stemmer);
    if (stopwords == "default") {
      cfg.stopword_list = default_stopwords();
    } else if (stopwords == "none") {
      cfg.stopword_list.reset();
    } else {
      std::ifstream in(stopwords);
      if (!in) throw DataError("cannot open stopword file: " + stopwords);
      std::set<std::string> words;
      std::string w;
      while (in >> w) words.insert(w);
      cfg.stopword_list = std::move(words);
    }
    return cfg;
  }
};

void add_pipeline_flags(CLI::App* cmd, PipelineOpts& opts) {
  cmd->add_flag("--no-lowercase", opts.no_lowercase, "Keep original letter case");
  cmd->add_option("--stemmer", opts.stemmer, "Stemmer: porter|none")
      ->check(CLI::IsMember({"porter", "none"}));
  cmd->add_option("--stopwords", opts.stopwords,
                  "Stopword handling: default|none|<path to word list>");
}

struct ModelOpts {
  std::string model = "frlm";
  std::string psi = "l";
  std::optional<std::size_t> fb_docs, fb_terms, top_poi;
  std::optional<double> gamma_h, lambda, kernel_h, mu, k1, b, threshold;
  bool no_model_defaults = false;

  Model model_id() const { return model_from_string(model); }

  FeedbackConfig make() const {
    Model m = model_id();
    PsiMode pm = psi_mode_from_string(psi);
    FeedbackConfig cfg;
    cfg.psi_mode = pm;
    if (!no_model_defaults) cfg = model_defaults(m, pm, cfg);
    if (fb_docs) cfg.fb_docs = *fb_docs;
    if (fb_terms) cfg.fb_terms = *fb_terms;
    if (top_poi) cfg.top_poi = *top_poi;
    if (gamma_h) cfg.gamma_h = *gamma_h;
    if (lambda) cfg.lambda = *lambda;
    if (kernel_h) cfg.kernel.h = *kernel_h;
    if (mu) cfg.mu = *mu;
    if (k1) cfg.k1 = *k1;
    if (b) cfg.b = *b;
    if (threshold) cfg.relevance_threshold = *threshold;
    return cfg;
  }
};

void add_model_flags(CLI::App* cmd, ModelOpts& opts) {
  std::vector<std::string> names;
  for (Model m : all_models()) names.push_back(to_string(m));
  cmd->add_option("--model", opts.model, "Retrieval model")->check(CLI::IsMember(names));
  cmd->add_option("--psi", opts.psi, "Soft-constraint mode: l|s|j")
      ->check(CLI::IsMember({"l", "s", "j"}));
  cmd->add_option("--fb-docs", opts.fb_docs, "Feedback documents (M)");
  cmd->add_option("--fb-terms", opts.fb_terms, "Expansion terms (tau)");
  cmd->add_option("--top-poi", opts.top_poi, "Ranked-list depth");
  cmd->add_option("--gamma-h", opts.gamma_h, "Exploitation/exploration trade-off");
  cmd->add_option("--lambda", opts.lambda, "Query-model mixture weight");
  cmd->add_option("--kernel-h", opts.kernel_h, "Gaussian kernel bandwidth");
  cmd->add_option("--mu", opts.mu, "Dirichlet smoothing for retrieval");
  cmd->add_option("--k1", opts.k1, "BM25 k1");
  cmd->add_option("--b", opts.b, "BM25 b");
  cmd->add_option("--threshold", opts.threshold, "Relevant-history rating threshold");
  cmd->add_flag("--no-model-defaults", opts.no_model_defaults,
                "Do not apply per-model default parameters");
}

struct DataOpts {
  std::string index_path;
  std::string profiles_path;
  std::string embeddings_path;
  std::string kb_single_path;
  std::string kb_joint_path;
};

void add_data_flags(CLI::App* cmd, DataOpts& opts, bool need_profiles = true) {
  cmd->add_option("--index", opts.index_path, "Index file from build-index")
      ->required()
      ->check(CLI::ExistingFile);
  if (need_profiles) {
    cmd->add_option("--profiles", opts.profiles_path, "User profiles (JSON lines)")
        ->required()
        ->check(CLI::ExistingFile);
  }
  cmd->add_option("--embeddings", opts.embeddings_path, "word2vec text embeddings")
      ->check(CLI::ExistingFile);
  cmd->add_option("--kb-single", opts.kb_single_path, "Single-context KB (TSV)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--kb-joint", opts.kb_joint_path, "Joint-context KB (TSV)")
      ->check(CLI::ExistingFile);
}

struct LoadedData {
  InvertedIndex index;
  std::optional<EmbeddingStore> store;
  std::optional<ContextKB> kb;
  std::vector<UserProfile> profiles;
};

LoadedData load_data(const DataOpts& opts) {
  LoadedData data{InvertedIndex::load(opts.index_path), std::nullopt, std::nullopt, {}};
  if (!opts.embeddings_path.empty()) {
    data.store = EmbeddingStore::load(opts.embeddings_path);
  }
  if (!opts.kb_single_path.empty() || !opts.kb_joint_path.empty()) {
    if (opts.kb_single_path.empty() || opts.kb_joint_path.empty()) {
      throw DataError("--kb-single and --kb-joint must be given together");
    }
    data.kb = ContextKB::load(opts.kb_single_path, opts.kb_joint_path, data.index.pipeline());
  }
  if (!opts.profiles_path.empty()) {
    data.profiles = load_profiles(opts.profiles_path, data.index.pipeline());
  }
  return data;
}

// Write-temp-then-rename so readers never observe a partial file.
void write_atomically(const std::string& path, const std::string& content) {
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw DataError("cannot write: " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

void write_run_meta(const std::string& run_path, const FeedbackConfig& cfg, Model model) {
  std::ostringstream meta;
  meta << "model=" << to_string(model) << "\n"
       << "psi=" << to_string(cfg.psi_mode) << "\n"
       << "fb_docs=" << cfg.fb_docs << "\n"
       << "fb_terms=" << cfg.fb_terms << "\n"
       << "gamma_h=" << cfg.gamma_h << "\n"
       << "lambda=" << cfg.lambda << "\n"
       << "kernel_h=" << cfg.kernel.h << "\n"
       << "kernel_sigma=" << cfg.kernel.sigma << "\n"
       << "mu=" << cfg.mu << "\n"
       << "k1=" << cfg.k1 << "\n"
       << "b=" << cfg.b << "\n"
       << "floor_eps=" << cfg.floor_eps << "\n"
       << "threshold=" << cfg.relevance_threshold << "\n"
       << "top_poi=" << cfg.top_poi << "\n"
       << "run_tag=" << run_tag(cfg, model) << "\n";
  write_atomically(run_path + ".meta", meta.str());
}

std::vector<GridAxis> parse_grid(const std::string& spec) {
  // "gamma_h=0:0.2:1.0;fb_terms=10,25,50"
  std::vector<GridAxis> grid;
  std::istringstream axes(spec);
  std::string axis;
  while (std::getline(axes, axis, ';')) {
    if (axis.empty()) continue;
    auto eq = axis.find('=');
    if (eq == std::string::npos) throw DataError("grid axis needs 'name=values': " + axis);
    GridAxis g;
    g.name = axis.substr(0, eq);
    std::string vals = axis.substr(eq + 1);
    if (vals.find(':') != std::string::npos) {
      double start, step, stop;
      char c1, c2;
      std::istringstream ss(vals);
      if (!(ss >> start >> c1 >> step >> c2 >> stop) || c1 != ':' || c2 != ':' || step <= 0) {
        throw DataError("bad grid range (want start:step:stop): " + vals);
      }
      for (double v = start; v <= stop + 1e-12; v += step) g.values.push_back(v);
    } else {
      std::istringstream ss(vals);
      std::string v;
      while (std::getline(ss, v, ',')) {
        if (!v.empty()) g.values.push_back(std::stod(v));
      }
    }
    if (g.values.empty()) throw DataError("empty grid axis: " + g.name);
    grid.push_back(std::move(g));
  }
  if (grid.empty()) throw DataError("empty grid spec");
  return grid;
}

FeedbackConfig apply_assignment(FeedbackConfig cfg,
                                const std::vector<std::pair<std::string, double>>& assignment) {
  for (const auto& [name, v] : assignment) {
    if (name == "gamma_h") {
      cfg.gamma_h = v;
    } else if (name == "lambda") {
      cfg.lambda = v;
    } else if (name == "fb_docs") {
      cfg.fb_docs = static_cast<std::size_t>(v);
    } else if (name == "fb_terms") {
      cfg.fb_terms = static_cast<std::size_t>(v);
    } else if (name == "kernel_h") {
      cfg.kernel.h = v;
    } else if (name == "mu") {
      cfg.mu = v;
    } else if (name == "k1") {
      cfg.k1 = v;
    } else if (name == "b") {
      cfg.b = v;
    } else if (name == "threshold") {
      cfg.relevance_threshold = v;
    } else {
      throw DataError("unknown sweep parameter: " + name);
    }
  }
  return cfg;
}

int cmd_build_index(const std::string& pois_path, const std::string& out_path,
                    const PipelineOpts& pipeline_opts) {
  PipelineConfig pipeline = pipeline_opts.make();
  std::vector<PoiDocument> docs = load_pois(pois_path, pipeline);
  InvertedIndex index = InvertedIndex::build(docs, pipeline);
  fs::path tmp = fs::path(out_path).string() + ".tmp";
  index.save(tmp.string());
  fs::rename(tmp, out_path);
  std::cout << "indexed " << index.num_docs() << " documents, " << index.num_terms()
            << " terms -> " << out_path << "\n";
  return kExitOk;
}

int cmd_recommend(const DataOpts& data_opts, const ModelOpts& model_opts,
                  const std::string& out_path, const std::optional<std::string>& user,
                  const std::string& tag_override) {
  LoadedData data = load_data(data_opts);
  FeedbackConfig cfg = model_opts.make();
  Model model = model_opts.model_id();

  Recommender rec(&data.index, data.store ? &*data.store : nullptr,
                  data.kb ? &*data.kb : nullptr, &data.profiles, cfg);
  Run run = rec.run_all(model, user);

  std::ostringstream body;
  write_run(body, run, tag_override.empty() ? run_tag(cfg, model) : tag_override);
  write_atomically(out_path, body.str());
  write_run_meta(out_path, cfg, model);
  std::cout << "wrote " << out_path << " (" << run.size() << " users)\n";
  return kExitOk;
}

int cmd_evaluate(const std::string& run_path, const std::string& qrels_path,
                 const std::string& csv_path, const std::string& compare_path,
                 int binary_cutoff) {
  Run run = read_run(run_path);
  Qrels qrels = Qrels::load(qrels_path);
  MetricReport report = evaluate(run, qrels, binary_cutoff);
  std::cout << report_table(report);
  if (!csv_path.empty()) write_atomically(csv_path, report_csv(report));

  if (!compare_path.empty()) {
    Run other = read_run(compare_path);
    MetricReport other_report = evaluate(other, qrels, binary_cutoff);
    std::vector<double> a, b;
    for (const auto& [qid, m] : report.per_query) {
      for (const auto& [oqid, om] : other_report.per_query) {
        if (oqid == qid) {
          a.push_back(m.ndcg5);
          b.push_back(om.ndcg5);
          break;
        }
      }
    }
    if (a.size() < 2) throw DataError("fewer than two shared queries to compare");
    TTestResult tt = paired_t_test(a, b);
    std::printf("paired t-test on nDCG@5 vs %s: t=%.4f p=%.6f%s\n", compare_path.c_str(), tt.t,
                tt.p, tt.degenerate ? " (degenerate)" : "");
  }
  return kExitOk;
}

int cmd_sweep(const DataOpts& data_opts, const ModelOpts& model_opts,
              const std::string& qrels_path, const std::string& grid_spec,
              const std::string& csv_path) {
  LoadedData data = load_data(data_opts);
  Qrels qrels = Qrels::load(qrels_path);
  FeedbackConfig base = model_opts.make();
  Model model = model_opts.model_id();
  std::vector<GridAxis> grid = parse_grid(grid_spec);

  SweepResult result = sweep(grid, [&](const auto& assignment) {
    FeedbackConfig cfg = apply_assignment(base, assignment);
    Recommender rec(&data.index, data.store ? &*data.store : nullptr,
                    data.kb ? &*data.kb : nullptr, &data.profiles, cfg);
    return evaluate(rec.run_all(model), qrels);
  });

  std::string csv = sweep_csv(result, grid);
  if (csv_path.empty()) {
    std::cout << csv;
  } else {
    write_atomically(csv_path, csv);
  }
  if (result.best) {
    const SweepCell& best = result.cells[*result.best];
    std::cout << "best nDCG@5 " << best.report->mean.ndcg5 << " at";
    for (const auto& [name, v] : best.assignment) std::cout << ' ' << name << '=' << v;
    std::cout << "\n";
  } else {
    std::cout << "no successful sweep cell\n";
  }
  return kExitOk;
}

int cmd_kb_inspect(const std::string& kb_single, const std::string& kb_joint,
                   const std::string& embeddings_path, const PipelineOpts& pipeline_opts,
                   const std::string& context_spec, const std::string& psi_mode,
                   const std::vector<std::string>& terms) {
  PipelineConfig pipeline = pipeline_opts.make();
  ContextKB kb = ContextKB::load(kb_single, kb_joint, pipeline);

  std::optional<EmbeddingStore> store;
  if (!embeddings_path.empty()) store = EmbeddingStore::load(embeddings_path);

  TripContext ctx;
  {
    std::istringstream ss(context_spec);
    std::string t, d, a;
    if (!std::getline(ss, t, ',') || !std::getline(ss, d, ',') || !std::getline(ss, a)) {
      throw DataError("context must be 'trip_type,trip_duration,accompanied_by'");
    }
    ctx.trip_type = trip_type_from_string(t);
    ctx.trip_duration = trip_duration_from_string(d);
    ctx.accompanied_by = accompanied_by_from_string(a);
  }

  PsiMode mode = psi_mode_from_string(psi_mode);
  std::optional<PsiScorer> psi;
  if (mode == PsiMode::location) {
    psi.emplace(mode, ctx, &kb, nullptr);
  } else {
    if (!store) throw DataError("psi mode '" + psi_mode + "' needs --embeddings");
    psi.emplace(mode, ctx, &kb, &*store);
  }

  std::printf("%-24s %8s %8s %8s %8s %8s\n", "term", "psi", "k_j", "k_s:type", "k_s:dur",
              "k_s:acc");
  for (const auto& t : terms) {
    double kappa_type = kb.kappa_s(t, "trip-type", to_string(ctx.trip_type));
    double kappa_dur = kb.kappa_s(t, "trip-duration", to_string(ctx.trip_duration));
    double kappa_acc = kb.kappa_s(t, "accompanied-by", to_string(ctx.accompanied_by));
    std::printf("%-24s %8.4f %8d %8.4f %8.4f %8.4f\n", t.c_str(), (*psi)(t),
                kb.kappa_j(t, ctx), kappa_type, kappa_dur, kappa_acc);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contextual POI recommendation engine"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value config file; flags override");

  // build-index
  auto* build = app.add_subcommand("build-index", "Build and persist an inverted index");
  std::string pois_path, index_out;
  PipelineOpts build_pipeline;
  build->add_option("--pois", pois_path, "POI corpus (JSON lines)")
      ->required()
      ->check(CLI::ExistingFile);
  build->add_option("--out", index_out, "Output index path")->required();
  add_pipeline_flags(build, build_pipeline);

  // recommend
  auto* rec = app.add_subcommand("recommend", "Write a TREC run file for one or all users");
  DataOpts rec_data;
  ModelOpts rec_model;
  std::string rec_out;
  std::string rec_user;
  add_data_flags(rec, rec_data);
  add_model_flags(rec, rec_model);
  rec->add_option("--out", rec_out, "Output run file")->required();
  rec->add_option("--user", rec_user, "Only this user id");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Score a run file against qrels");
  std::string ev_run, ev_qrels, ev_csv, ev_compare;
  int ev_cutoff = 1;
  ev->add_option("--run", ev_run, "Run file")->required()->check(CLI::ExistingFile);
  ev->add_option("--qrels", ev_qrels, "Relevance judgments")
      ->required()
      ->check(CLI::ExistingFile);
  ev->add_option("--out-csv", ev_csv, "Write per-query CSV here");
  ev->add_option("--compare", ev_compare, "Second run file for a paired t-test on nDCG@5");
  ev->add_option("--cutoff", ev_cutoff, "Binary relevance cutoff (grade >= cutoff)");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Grid search over model parameters");
  DataOpts sw_data;
  ModelOpts sw_model;
  std::string sw_qrels, sw_grid, sw_csv;
  add_data_flags(sw, sw_data);
  add_model_flags(sw, sw_model);
  sw->add_option("--qrels", sw_qrels, "Relevance judgments")
      ->required()
      ->check(CLI::ExistingFile);
  sw->add_option("--grid", sw_grid, "e.g. 'gamma_h=0:0.2:1.0;fb_terms=10,25,50'")->required();
  sw->add_option("--out-csv", sw_csv, "Write grid results here (stdout otherwise)");

  // kb-inspect
  auto* kbi = app.add_subcommand("kb-inspect", "Dump psi/kappa scores for terms in a context");
  std::string kbi_single, kbi_joint, kbi_embeddings, kbi_context, kbi_psi = "j";
  std::vector<std::string> kbi_terms;
  PipelineOpts kbi_pipeline;
  kbi->add_option("--kb-single", kbi_single)->required()->check(CLI::ExistingFile);
  kbi->add_option("--kb-joint", kbi_joint)->required()->check(CLI::ExistingFile);
  kbi->add_option("--embeddings", kbi_embeddings)->check(CLI::ExistingFile);
  kbi->add_option("--context", kbi_context, "trip_type,trip_duration,accompanied_by")
      ->required();
  kbi->add_option("--psi", kbi_psi, "Mode: l|s|j")->check(CLI::IsMember({"l", "s", "j"}));
  kbi->add_option("terms", kbi_terms, "Terms or phrases to score")->required();
  add_pipeline_flags(kbi, kbi_pipeline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (build->parsed()) return cmd_build_index(pois_path, index_out, build_pipeline);
    if (rec->parsed()) {
      std::optional<std::string> user;
      if (!rec_user.empty()) user = rec_user;
      return cmd_recommend(rec_data, rec_model, rec_out, user);
    }
    if (ev->parsed()) return cmd_evaluate(ev_run, ev_qrels, ev_csv, ev_compare, ev_cutoff);
    if (sw->parsed()) return cmd_sweep(sw_data, sw_model, sw_qrels, sw_grid, sw_csv);
    if (kbi->parsed()) {
      return cmd_kb_inspect(kbi_single, kbi_joint, kbi_embeddings, kbi_pipeline, kbi_context,
                            kbi_psi, kbi_terms);
    }
  } catch (const DegenerateEstimate& e) {
    std::cerr << "degenerate estimation: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

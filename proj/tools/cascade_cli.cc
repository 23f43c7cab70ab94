// tools/cascade_cli.cc
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Copyright 2026 The Cascade Authors.
//
// `cascade`: every pipeline stage as a subcommand of one binary.
//
// Exit status: 0 on success, 1 on usage errors, 2 on data errors.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "cascade/arpa.h"
#include "cascade/corpus.h"
#include "cascade/errors.h"
#include "cascade/lm_eval.h"
#include "cascade/metrics.h"
#include "cascade/nbest.h"
#include "cascade/ngram.h"
#include "cascade/parallel.h"
#include "cascade/pronunciation.h"
#include "cascade/prune.h"
#include "cascade/qe.h"
#include "cascade/rescoring.h"
#include "cascade/rover.h"
#include "cascade/selection.h"
#include "json.hpp"
#include "manifest.h"

namespace cascade::tools {
namespace {

using nlohmann::json;

// A subcommand body. It returns the primary output path (the manifest goes
// next to it) and appends every file it read to `inputs`.
using Command = std::function<std::string(std::vector<std::string> *inputs)>;

std::ofstream OpenOut(const std::string &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out.precision(9);
  return out;
}

std::ifstream OpenIn(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

json ReadJson(const std::string &path) {
  auto in = OpenIn(path);
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw DataError(path + ": " + e.what());
  }
}

// Transcripts keyed by utterance id, in file order.
std::map<std::string, Sentence> TranscriptMap(const std::string &path) {
  std::map<std::string, Sentence> out;
  for (auto &t : ReadTranscripts(path)) out.emplace(t.utt_id, std::move(t.tokens));
  return out;
}

std::vector<std::shared_ptr<const LanguageModel>> LoadModels(
    const std::vector<std::string> &paths) {
  std::vector<std::shared_ptr<const LanguageModel>> models;
  for (const auto &p : paths) models.push_back(std::make_shared<NGramModel>(ReadArpa(p)));
  return models;
}

// Reads a weights document written by lm-interp, checking it names the same
// number of components.
std::vector<double> LoadWeights(const std::string &path, std::size_t components) {
  const json doc = ReadJson(path);
  try {
    auto weights = doc.at("weights").get<std::vector<double>>();
    if (weights.size() != components) {
      throw DataError(path + ": " + std::to_string(weights.size()) + " weights for " +
                      std::to_string(components) + " models");
    }
    return weights;
  } catch (const json::exception &e) {
    throw DataError(path + ": " + e.what());
  }
}

// `key\tvalue...` with a header line; only the first value column is used.
std::unordered_map<std::string, double> ReadTargets(const std::string &path) {
  auto in = OpenIn(path);
  std::unordered_map<std::string, double> targets;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    if (++number == 1) continue;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(path, number, "expected key<TAB>value");
    const auto end = line.find('\t', tab + 1);
    const auto value = ParseDouble(std::string_view(line).substr(
        tab + 1, end == std::string::npos ? std::string::npos : end - tab - 1));
    if (!value || !std::isfinite(*value)) throw ParseError(path, number, "bad target value");
    if (!targets.emplace(line.substr(0, tab), *value).second) {
      throw ParseError(path, number, "duplicate key " + line.substr(0, tab));
    }
  }
  return targets;
}

FeatureTable LoadFeatures(const std::string &path) {
  auto in = OpenIn(path);
  return ReadFeatureTable(in, path);
}

GPModel LoadGp(const std::string &path) { return GPModel::FromJson(ReadJson(path)); }

std::vector<double> ParseGrid(const std::string &text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = ParseDouble(item);
    if (!v) throw CLI::ValidationError("grid", "not a number: " + item);
    values.push_back(*v);
  }
  if (values.empty()) throw CLI::ValidationError("grid", "empty list");
  return values;
}

void AddThreads(CLI::App *sub, int *threads) {
  sub->add_option("--threads", *threads, "Worker threads (default: CASCADE_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
}

// ---------------------------------------------------------------- LM

Command LmTrain(CLI::App &app) {
  auto *sub = app.add_subcommand("lm-train", "Train an interpolated modified Kneser-Ney LM");
  struct Opts {
    std::string corpus, output, vocab;
    int order = 4;
    std::size_t vocab_size = 60000, min_count = 1;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--corpus", o->corpus, "Training text, one sentence per line")->required();
  sub->add_option("--order", o->order, "N-gram order")->check(CLI::Range(1, 10));
  sub->add_option("--vocab", o->vocab, "Fixed word list, one per line (overrides --vocab-size)");
  sub->add_option("--vocab-size", o->vocab_size, "Most frequent words kept")
      ->check(CLI::Range(std::size_t{3}, std::size_t{1} << 31));
  sub->add_option("--min-count", o->min_count, "Minimum count for a vocabulary word")
      ->check(CLI::PositiveNumber);
  sub->add_option("-o,--output", o->output, "ARPA output")->required();
  return [o](std::vector<std::string> *inputs) {
    inputs->push_back(o->corpus);
    const auto corpus = ReadCorpus(o->corpus);
    Vocabulary vocab;
    if (!o->vocab.empty()) {
      inputs->push_back(o->vocab);
      for (const auto &w : ReadLines(o->vocab)) {
        if (!w.empty()) vocab.Add(w);
      }
    } else {
      vocab = BuildVocabulary(corpus, o->vocab_size, o->min_count);
    }
    const NGramModel model = TrainMkn(corpus, o->order, vocab);
    WriteArpa(model, o->output);
    return o->output;
  };
}

Command LmEval(CLI::App &app) {
  auto *sub = app.add_subcommand("lm-eval", "Perplexity of one LM or an interpolation");
  struct Opts {
    std::vector<std::string> lms;
    std::string corpus, weights, output;
    int threads = 0;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--lm", o->lms, "ARPA model (repeat with --weights to interpolate)")
      ->required();
  sub->add_option("--weights", o->weights, "Weights document from lm-interp");
  sub->add_option("--corpus", o->corpus, "Evaluation text")->required();
  sub->add_option("-o,--output", o->output, "Also write the summary here");
  AddThreads(sub, &o->threads);
  return [o](std::vector<std::string> *inputs) {
    *inputs = o->lms;
    inputs->push_back(o->corpus);
    if (o->lms.size() > 1 && o->weights.empty()) {
      throw CLI::RequiresError("--lm (more than one)", "--weights");
    }
    auto models = LoadModels(o->lms);
    std::shared_ptr<const LanguageModel> lm = models.front();
    if (!o->weights.empty()) {
      inputs->push_back(o->weights);
      lm = std::make_shared<InterpolatedModel>(models, LoadWeights(o->weights, models.size()));
    }
    const auto corpus = ReadCorpus(o->corpus);
    const CorpusEntropy e = ScoreCorpus(*lm, corpus, ResolveThreads(o->threads));
    std::ostringstream line;
    line.precision(9);
    line << "sentences " << corpus.size() << " events " << e.events << " logprob "
         << e.log10_prob << " bits/word " << e.bits_per_word() << " ppl " << e.perplexity()
         << '\n';
    std::cout << line.str();
    if (!o->output.empty()) OpenOut(o->output) << line.str();
    return o->output;
  };
}

Command LmInterp(CLI::App &app) {
  auto *sub = app.add_subcommand("lm-interp", "Estimate interpolation weights by EM");
  struct Opts {
    std::vector<std::string> lms;
    std::string dev, output;
    int max_iterations = 200;
    double tolerance = 1e-6;
    int threads = 0;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--lm", o->lms, "Component ARPA models")->required()->expected(2, 1 << 20);
  sub->add_option("--dev", o->dev, "Tuning text")->required();
  sub->add_option("--max-iter", o->max_iterations)->check(CLI::PositiveNumber);
  sub->add_option("--tolerance", o->tolerance)->check(CLI::PositiveNumber);
  sub->add_option("-o,--output", o->output, "Weights JSON")->required();
  AddThreads(sub, &o->threads);
  return [o](std::vector<std::string> *inputs) {
    *inputs = o->lms;
    inputs->push_back(o->dev);
    if (o->lms.size() < 2) throw CLI::ValidationError("--lm", "needs at least two models");
    const auto models = LoadModels(o->lms);
    std::vector<const LanguageModel *> raw;
    for (const auto &m : models) raw.push_back(m.get());
    const auto dev = ReadCorpus(o->dev);
    InterpolationOptions options;
    options.max_iterations = o->max_iterations;
    options.tolerance = o->tolerance;
    options.threads = ResolveThreads(o->threads);
    const InterpolationResult r = EstimateInterpolation(raw, dev, options);
    const InterpolatedModel mixed(models, r.weights);
    const json doc = {{"components", o->lms},
                      {"weights", r.weights},
                      {"iterations", r.iterations},
                      {"converged", r.converged},
                      {"skipped_events", r.skipped_events},
                      {"log_likelihood", r.log_likelihood},
                      {"dev_perplexity", Perplexity(mixed, dev, options.threads)}};
    OpenOut(o->output) << doc.dump(2) << '\n';
    return o->output;
  };
}

Command LmPrune(CLI::App &app) {
  auto *sub = app.add_subcommand("lm-prune", "Relative-entropy pruning");
  struct Opts {
    std::string lm, output;
    double threshold = 1e-10;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--lm", o->lm, "ARPA model")->required();
  sub->add_option("--threshold", o->threshold, "Maximum relative-entropy increase")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("-o,--output", o->output, "Pruned ARPA model")->required();
  return [o](std::vector<std::string> *inputs) {
    inputs->push_back(o->lm);
    PruneStats stats;
    const NGramModel pruned = Prune(ReadArpa(o->lm), o->threshold, &stats);
    WriteArpa(pruned, o->output);
    std::cout << "removed " << stats.total_removed();
    for (std::size_t n = 0; n < stats.removed.size(); ++n) {
      std::cout << ' ' << (n + 1) << "-grams:" << stats.removed[n];
    }
    std::cout << '\n';
    return o->output;
  };
}

// ---------------------------------------------------------------- selection

Command Select(CLI::App &app) {
  auto *sub = app.add_subcommand("select", "Cross-entropy-difference data selection");
  struct Opts {
    std::string corpus, in_domain, dev, output, scores, target, target_output, grid;
    double fraction = 0.25;
    bool line_search = false;
    int order = 3;
    std::size_t vocab_size = 60000;
    int threads = 0;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--corpus", o->corpus, "General-domain text to select from")->required();
  sub->add_option("--in-domain", o->in_domain, "In-domain text for the in-domain LM")
      ->required();
  sub->add_option("--order", o->order, "Order of the scoring LMs")->check(CLI::Range(1, 10));
  sub->add_option("--vocab-size", o->vocab_size, "Shared vocabulary size")
      ->check(CLI::Range(std::size_t{3}, std::size_t{1} << 31));
  auto *fraction = sub->add_option("--fraction", o->fraction, "Fraction kept")
                       ->check(CLI::Range(0.0, 1.0));
  auto *search = sub->add_flag("--line-search", o->line_search,
                               "Choose the batch size minimizing dev cross-entropy");
  sub->add_option("--grid", o->grid, "Candidate batch sizes, comma-separated")->needs(search);
  sub->add_option("--dev", o->dev, "In-domain dev text for the line search")->needs(search);
  fraction->excludes(search);
  sub->add_option("-o,--output", o->output, "Selected sentences")->required();
  sub->add_option("--scores", o->scores, "Score TSV (default: <output>.scores.tsv)");
  sub->add_option("--target", o->target, "Line-aligned target-language corpus");
  sub->add_option("--target-output", o->target_output, "Selected target lines");
  AddThreads(sub, &o->threads);
  return [o](std::vector<std::string> *inputs) {
    *inputs = {o->corpus, o->in_domain};
    if (o->line_search && (o->grid.empty() || o->dev.empty())) {
      throw CLI::RequiresError("--line-search", "--grid and --dev");
    }
    if (!o->target.empty() && o->target_output.empty()) {
      throw CLI::RequiresError("--target", "--target-output");
    }
    if (!o->line_search && !(o->fraction > 0.0)) {
      throw CLI::ValidationError("--fraction", "must be in (0, 1]");
    }
    const int threads = ResolveThreads(o->threads);
    const auto corpus = ReadCorpus(o->corpus);
    const auto in_domain = ReadCorpus(o->in_domain);
    // One vocabulary for both models so OOV handling is symmetric.
    std::vector<Sentence> both = in_domain;
    both.insert(both.end(), corpus.begin(), corpus.end());
    const Vocabulary vocab = BuildVocabulary(both, o->vocab_size);
    const NGramModel id_lm = TrainMkn(in_domain, o->order, vocab);
    const NGramModel ood_lm = TrainMkn(corpus, o->order, vocab);
    const auto scored = ScoreCed(id_lm, ood_lm, corpus, threads);

    SelectionReport report;
    if (o->line_search) {
      inputs->push_back(o->dev);
      std::vector<std::size_t> grid;
      for (double v : ParseGrid(o->grid)) {
        if (!(v >= 1.0) || v != std::floor(v)) {
          throw CLI::ValidationError("--grid", "sizes must be positive integers");
        }
        grid.push_back(static_cast<std::size_t>(v));
      }
      LineSearchOptions options;
      options.threads = threads;
      report = LineSearchBatch(scored, corpus, ReadCorpus(o->dev), grid, options);
      for (std::size_t i = 0; i < report.grid.size(); ++i) {
        std::cerr << "batch " << report.grid[i] << " dev bits/word " << report.grid_values[i]
                  << '\n';
      }
    } else {
      report = SelectFraction(scored, o->fraction);
    }

    std::vector<char> chosen(corpus.size(), 0);
    std::vector<Sentence> selected;
    for (std::size_t i : report.selected()) {
      chosen[i] = 1;
      selected.push_back(corpus[i]);
    }
    {
      auto out = OpenOut(o->output);
      WriteCorpus(selected, out);
    }
    auto scores = OpenOut(o->scores.empty() ? o->output + ".scores.tsv" : o->scores);
    scores << "line_index\tced\tselected\n";
    for (const auto &s : scored) {
      scores << s.index << '\t' << FormatDouble(s.ced) << '\t' << int{chosen[s.index]} << '\n';
    }
    if (!o->target.empty()) {
      inputs->push_back(o->target);
      auto out = OpenOut(o->target_output);
      for (const auto &line : ExtractParallel(report, ReadLines(o->target))) {
        out << line << '\n';
      }
    }
    std::cout << "selected " << report.chosen << " of " << corpus.size() << '\n';
    return o->output;
  };
}

// ---------------------------------------------------------------- ROVER

Command Rover(CLI::App &app) {
  auto *sub = app.add_subcommand("rover", "Combine system hypotheses by voting");
  struct Opts {
    std::vector<std::string> systems;
    std::string output;
    double alpha = 1.0, null_conf = kDefaultNullConfidence;
    int threads = 0;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("systems", o->systems, "Hypothesis files, in alignment order")
      ->required()
      ->expected(1, 1 << 20);
  sub->add_option("--alpha", o->alpha, "Weight of vote frequency against confidence")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--null-conf", o->null_conf, "Confidence of the empty word")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("-o,--output", o->output, "Combined hypotheses")->required();
  AddThreads(sub, &o->threads);
  return [o](std::vector<std::string> *inputs) {
    *inputs = o->systems;
    std::vector<std::vector<Transcript>> systems;
    for (const auto &path : o->systems) systems.push_back(ReadTranscripts(path));
    RoverOptions options;
    options.alpha = o->alpha;
    options.null_confidence = o->null_conf;
    options.threads = ResolveThreads(o->threads);
    auto out = OpenOut(o->output);
    WriteTranscripts(RoverCombine(systems, options), out);
    return o->output;
  };
}

// ---------------------------------------------------------------- QE

Command QeExtract(CLI::App &app) {
  auto *sub = app.add_subcommand("qe-extract", "Quality-estimation features for N-best lists");
  struct Opts {
    std::string nbest, lm, corpus, output;
    int order = 3;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--nbest", o->nbest, "N-best TSV")->required();
  sub->add_option("--lm", o->lm, "Source-side ARPA model")->required();
  sub->add_option("--corpus", o->corpus, "Text for frequency and n-gram coverage features")
      ->required();
  sub->add_option("--order", o->order, "Order of the coverage counts")
      ->check(CLI::Range(3, 10));
  sub->add_option("-o,--output", o->output, "Feature TSV")->required();
  return [o](std::vector<std::string> *inputs) {
    *inputs = {o->nbest, o->lm, o->corpus};
    const NGramModel lm = ReadArpa(o->lm);
    const auto corpus = ReadCorpus(o->corpus);
    const CountTable counts = CountNGrams(corpus, o->order, BuildVocabulary(corpus, 1u << 31));
    const FeatureExtractor extractor(lm, counts);
    FeatureTable table;
    table.names = QeFeatureNames();
    std::vector<Eigen::MatrixXd> blocks;
    Eigen::Index rows = 0;
    NBestReader reader(o->nbest);
    while (auto list = reader.Next()) {
      for (const auto &h : list->hypotheses) table.keys.push_back(FeatureKey(h.utt_id, h.rank));
      blocks.push_back(extractor.Extract(*list));
      rows += blocks.back().rows();
    }
    table.values.resize(rows, static_cast<Eigen::Index>(table.names.size()));
    Eigen::Index r = 0;
    for (const auto &b : blocks) {
      table.values.middleRows(r, b.rows()) = b;
      r += b.rows();
    }
    auto out = OpenOut(o->output);
    WriteFeatureTable(table, out);
    return o->output;
  };
}

Command QeTrain(CLI::App &app) {
  auto *sub = app.add_subcommand("qe-train", "Fit the GP quality estimator");
  struct Opts {
    std::string features, targets, nbest, ref, output, ranking;
    std::size_t top_k = 0;
    GPTrainOptions gp;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--features", o->features, "Feature TSV from qe-extract")->required();
  auto *targets = sub->add_option("--targets", o->targets, "TSV key<TAB>target with header");
  auto *nbest = sub->add_option("--nbest", o->nbest, "N-best TSV (targets from --ref)");
  auto *ref = sub->add_option("--ref", o->ref, "Reference transcripts for sentence-BLEU targets");
  nbest->needs(ref);
  ref->needs(nbest);
  targets->excludes(nbest);
  sub->add_option("--top-k", o->top_k, "Refit on the k most relevant features (0: all)");
  sub->add_option("--restarts", o->gp.restarts, "Random restarts")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--max-iter", o->gp.max_iterations, "Optimizer iterations per start")
      ->check(CLI::PositiveNumber);
  sub->add_option("--opt-rows", o->gp.optimization_rows,
                  "Rows used for hyperparameter fitting (0: all)");
  sub->add_option("--seed", o->gp.seed, "Restart and subset seed");
  sub->add_option("--ranking", o->ranking, "Write the ARD relevance ranking here");
  sub->add_option("-o,--output", o->output, "Model JSON")->required();
  return [o](std::vector<std::string> *inputs) {
    inputs->push_back(o->features);
    if (o->targets.empty() && o->nbest.empty()) {
      throw CLI::RequiresError("qe-train", "--targets or --nbest with --ref");
    }
    FeatureTable table = LoadFeatures(o->features);
    std::unordered_map<std::string, double> targets;
    if (!o->targets.empty()) {
      inputs->push_back(o->targets);
      targets = ReadTargets(o->targets);
    } else {
      *inputs = {o->features, o->nbest, o->ref};
      const auto refs = TranscriptMap(o->ref);
      for (const auto &list : ReadNBest(o->nbest)) {
        auto it = refs.find(list.utt_id);
        if (it == refs.end()) throw StructuralError("no reference for utterance " + list.utt_id);
        for (const auto &h : list.hypotheses) {
          targets[FeatureKey(h.utt_id, h.rank)] = SentenceBleu(it->second, h.tokens);
        }
      }
    }
    Eigen::VectorXd y(table.values.rows());
    for (std::size_t r = 0; r < table.keys.size(); ++r) {
      auto it = targets.find(table.keys[r]);
      if (it == targets.end()) throw StructuralError("no target for " + table.keys[r]);
      y(static_cast<Eigen::Index>(r)) = it->second;
    }
    GPModel model = GPModel::Train(table.values, y, table.names, o->gp);
    if (o->top_k > 0 && o->top_k < table.names.size()) {
      std::vector<std::size_t> columns;
      for (const auto &f : SelectFeatures(model, o->top_k)) columns.push_back(f.index);
      const FeatureTable reduced = table.SelectColumns(columns);
      model = GPModel::Train(reduced.values, y, reduced.names, o->gp);
    }
    if (!o->ranking.empty()) {
      auto out = OpenOut(o->ranking);
      out << "feature\trelevance\n";
      for (const auto &f : model.Rank()) out << f.name << '\t' << FormatDouble(f.relevance) << '\n';
    }
    OpenOut(o->output) << model.ToJson().dump() << '\n';
    return o->output;
  };
}

Command QePredict(CLI::App &app) {
  auto *sub = app.add_subcommand("qe-predict", "Predict quality with a trained GP");
  struct Opts {
    std::string model, features, output;
    int threads = 0;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--model", o->model, "Model JSON from qe-train")->required();
  sub->add_option("--features", o->features, "Feature TSV")->required();
  sub->add_option("-o,--output", o->output, "TSV key<TAB>mean<TAB>variance")->required();
  AddThreads(sub, &o->threads);
  return [o](std::vector<std::string> *inputs) {
    *inputs = {o->model, o->features};
    const GPModel model = LoadGp(o->model);
    const FeatureTable table = LoadFeatures(o->features);
    std::vector<std::size_t> columns;
    for (const auto &name : model.feature_names()) {
      auto it = std::find(table.names.begin(), table.names.end(), name);
      if (it == table.names.end()) throw DataError("feature table lacks column " + name);
      columns.push_back(static_cast<std::size_t>(it - table.names.begin()));
    }
    const Eigen::MatrixXd pred =
        model.PredictBatch(table.SelectColumns(columns).values, ResolveThreads(o->threads));
    auto out = OpenOut(o->output);
    out << "key\tmean\tvariance\n";
    for (std::size_t r = 0; r < table.keys.size(); ++r) {
      const auto i = static_cast<Eigen::Index>(r);
      out << table.keys[r] << '\t' << FormatDouble(pred(i, 0)) << '\t'
          << FormatDouble(pred(i, 1)) << '\n';
    }
    return o->output;
  };
}

// ---------------------------------------------------------------- rescoring

Command Rescore(CLI::App &app) {
  auto *sub = app.add_subcommand("rescore", "Confidence-gated QE rescoring of N-best lists");
  struct Opts {
    std::string nbest, model, features, output, decisions, tune_ref;
    std::string alpha_grid = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
    std::string gate_grid = "0,0.1,0.2,0.3,0.4,0.5,0.55,0.6,0.7,0.8,0.9,1";
    RescoreConfig config;
    int threads = 0;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--nbest", o->nbest, "N-best TSV")->required();
  sub->add_option("--qe-model", o->model, "Model JSON from qe-train")->required();
  sub->add_option("--features", o->features, "Feature TSV for the same N-best lists")
      ->required();
  sub->add_option("--alpha", o->config.alpha, "Weight of the ASR score")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--gate-quantile", o->config.gate_quantile,
                  "Fraction of least confident utterances rescored")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--depth", o->config.depth, "Hypotheses considered per list")
      ->check(CLI::PositiveNumber);
  auto *tune = sub->add_option("--tune-ref", o->tune_ref,
                               "Grid-search alpha and gate on these reference transcripts");
  sub->add_option("--alpha-grid", o->alpha_grid)->needs(tune);
  sub->add_option("--gate-grid", o->gate_grid)->needs(tune);
  sub->add_option("-o,--output", o->output, "Chosen hypotheses as transcripts")->required();
  sub->add_option("--decisions", o->decisions, "Decision log (default: <output>.decisions.tsv)");
  AddThreads(sub, &o->threads);
  return [o](std::vector<std::string> *inputs) {
    *inputs = {o->nbest, o->model, o->features};
    RescoreConfig config = o->config;
    config.threads = ResolveThreads(o->threads);
    const auto lists = ReadNBest(o->nbest);
    const GPModel model = LoadGp(o->model);
    const FeatureTable features = LoadFeatures(o->features);
    const auto qe = PredictQuality(lists, model, features, config.depth, config.threads);
    if (!o->tune_ref.empty()) {
      inputs->push_back(o->tune_ref);
      const auto alphas = ParseGrid(o->alpha_grid);
      const auto gates = ParseGrid(o->gate_grid);
      const TuningResult tuned =
          TuneRescoring(lists, qe, TranscriptMap(o->tune_ref), alphas, gates, config);
      for (const auto &p : tuned.grid) {
        std::cerr << "alpha " << p.alpha << " gate " << p.gate_quantile << " BLEU " << p.bleu
                  << '\n';
      }
      std::cout << "best alpha " << tuned.best.alpha << " gate " << tuned.best.gate_quantile
                << " BLEU " << tuned.best.bleu << '\n';
      config.alpha = tuned.best.alpha;
      config.gate_quantile = tuned.best.gate_quantile;
    }
    const RescoreResult result = GateAndRescore(lists, qe, config);
    {
      auto out = OpenOut(o->output);
      WriteTranscripts(result.output, out);
    }
    auto log = OpenOut(o->decisions.empty() ? o->output + ".decisions.tsv" : o->decisions);
    WriteDecisions(result.decisions, log);
    std::size_t gated = 0, changed = 0;
    for (const auto &d : result.decisions) {
      gated += d.gated;
      changed += d.chosen_rank != 1;
    }
    std::cout << "gated " << gated << " changed " << changed << " of " << lists.size()
              << '\n';
    return o->output;
  };
}

// ---------------------------------------------------------------- metrics

Command Score(CLI::App &app) {
  auto *sub = app.add_subcommand("score", "WER or BLEU of a hypothesis corpus");
  struct Opts {
    std::string metric, ref, hyp, output, per_sentence_path;
    bool lowercase = false, per_sentence = false, transcripts = false;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--metric", o->metric)->required()->check(CLI::IsMember({"wer", "bleu"}));
  sub->add_option("--ref", o->ref, "Reference text")->required();
  sub->add_option("--hyp", o->hyp, "Hypothesis text")->required();
  sub->add_flag("--lowercase", o->lowercase, "Lowercase both sides first");
  sub->add_flag("--per-sentence", o->per_sentence, "Print a per-sentence TSV after the summary");
  sub->add_flag("--transcripts", o->transcripts,
                "Inputs are utt_id<TAB>text files matched by id");
  sub->add_option("-o,--output", o->output, "Also write the summary here");
  return [o](std::vector<std::string> *inputs) {
    *inputs = {o->ref, o->hyp};
    std::vector<Sentence> refs, hyps;
    if (o->transcripts) {
      const auto ref_map = TranscriptMap(o->ref);
      for (auto &t : ReadTranscripts(o->hyp)) {
        auto it = ref_map.find(t.utt_id);
        if (it == ref_map.end()) throw StructuralError("no reference for utterance " + t.utt_id);
        refs.push_back(it->second);
        hyps.push_back(std::move(t.tokens));
      }
      if (refs.size() != ref_map.size()) {
        throw StructuralError("hypotheses cover " + std::to_string(refs.size()) + " of " +
                              std::to_string(ref_map.size()) + " references");
      }
    } else {
      refs = ReadCorpus(o->ref);
      hyps = ReadCorpus(o->hyp);
    }
    if (o->lowercase) {
      for (auto &s : refs) s = Lowercase(s);
      for (auto &s : hyps) s = Lowercase(s);
    }
    std::ostringstream text;
    text.setf(std::ios::fixed);
    text.precision(2);
    if (o->metric == "wer") {
      const WerReport total = CorpusWer(refs, hyps);
      text << 100.0 * total.wer() << " (S " << total.substitutions << " D " << total.deletions
           << " I " << total.insertions << " N " << total.reference_length << ")\n";
      if (o->per_sentence) {
        text << "line\twer\terrors\tref_length\n";
        for (std::size_t i = 0; i < refs.size(); ++i) {
          const WerReport r = Wer(refs[i], hyps[i]);
          text << i << '\t' << 100.0 * r.wer() << '\t' << r.errors() << '\t'
               << r.reference_length << '\n';
        }
      }
    } else {
      const BleuReport report = Bleu(refs, hyps, kBleuOrder, o->per_sentence);
      text << report.bleu << " (BP " << report.brevity_penalty;
      for (std::size_t n = 0; n < report.precisions.size(); ++n) {
        text << " p" << (n + 1) << ' ' << 100.0 * report.precisions[n];
      }
      text << ')';
      if (!report.diagnostic.empty()) text << ' ' << report.diagnostic;
      text << '\n';
      if (o->per_sentence) {
        text << "line\tbleu\n";
        for (std::size_t i = 0; i < report.sentence_bleu.size(); ++i) {
          text << i << '\t' << report.sentence_bleu[i] << '\n';
        }
      }
    }
    std::cout << text.str();
    if (!o->output.empty()) OpenOut(o->output) << text.str();
    return o->output;
  };
}

// ---------------------------------------------------------------- lexicon

Command PronProbs(CLI::App &app) {
  auto *sub = app.add_subcommand("pron-probs", "Pronunciation probabilities from alignments");
  struct Opts {
    std::string counts, lexicon, output;
    double floor = kDefaultPronFloor;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--counts", o->counts, "TSV word<TAB>pronunciation<TAB>count")->required();
  sub->add_option("--lexicon", o->lexicon, "Decoding lexicon, word<TAB>pronunciation")
      ->required();
  sub->add_option("--floor", o->floor, "Mass for pronunciations never observed")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("-o,--output", o->output, "Lexicon with probabilities")->required();
  return [o](std::vector<std::string> *inputs) {
    *inputs = {o->counts, o->lexicon};
    auto counts_in = OpenIn(o->counts);
    auto lexicon_in = OpenIn(o->lexicon);
    const PronLexicon lexicon =
        EstimatePronunciationProbs(ReadPronCounts(counts_in, o->counts),
                                   ReadDecodeLexicon(lexicon_in, o->lexicon), o->floor);
    auto out = OpenOut(o->output);
    WritePronLexicon(lexicon, out);
    return o->output;
  };
}

// Resolved option values of a subcommand, for the manifest.
json ResolvedConfig(const CLI::App &sub) {
  json config = json::object();
  for (const CLI::Option *opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "h") continue;
    if (opt->get_expected_max() == 0 && opt->nonpositional()) {
      config[name] = opt->count() > 0;
    } else if (opt->count() == 0) {
      config[name] = opt->get_default_str();
    } else if (opt->get_expected_max() > 1) {
      config[name] = opt->results();
    } else {
      config[name] = opt->results().back();
    }
  }
  return config;
}

int Main(int argc, char **argv) {
  CLI::App app{"Text-side tools for cascaded speech translation", "cascade"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML-style file of option values; flags take precedence");
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.option_defaults()->always_capture_default();
  std::string manifest_path;
  app.add_option("--manifest", manifest_path,
                 "Manifest path (default: <output>.manifest.json, or stderr without output)");

  std::map<std::string, Command> commands;
  for (auto add : {LmTrain, LmEval, LmInterp, LmPrune, Select, Rover, QeExtract, QeTrain,
                   QePredict, Rescore, Score, PronProbs}) {
    Command c = add(app);
    commands.emplace(app.get_subcommands({}).back()->get_name(), std::move(c));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 1;
  }

  const CLI::App *sub = app.get_subcommands().front();
  Manifest manifest;
  manifest.subcommand = sub->get_name();
  manifest.config = ResolvedConfig(*sub);
  const auto start = std::chrono::steady_clock::now();
  try {
    const std::string output = commands.at(sub->get_name())(&manifest.inputs);
    manifest.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!manifest_path.empty()) {
      WriteManifest(manifest, manifest_path);
    } else if (!output.empty()) {
      WriteManifest(manifest, output + ".manifest.json");
    } else {
      std::cerr << manifest.ToJson().dump() << '\n';
    }
  } catch (const CLI::Error &e) {
    std::cerr << "cascade " << sub->get_name() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "cascade " << sub->get_name() << ": " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace
}  // namespace cascade::tools

int main(int argc, char **argv) { return cascade::tools::Main(argc, argv); }

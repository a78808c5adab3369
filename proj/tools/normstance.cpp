// normstance command-line driver.
//
// Exit status: 0 success, 2 invalid input or usage, 1 runtime failure.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "normstance/corpus.hpp"
#include "normstance/embeddings.hpp"
#include "normstance/error.hpp"
#include "normstance/harness/analyze.hpp"
#include "normstance/harness/config.hpp"
#include "normstance/harness/grid.hpp"
#include "normstance/harness/predictions.hpp"
#include "normstance/metrics.hpp"
#include "normstance/pulearn/model_io.hpp"
#include "normstance/pulearn/trainer.hpp"
#include "normstance/stats.hpp"
#include "normstance/util.hpp"

namespace fs = std::filesystem;
using namespace normstance;

namespace {

struct Globals {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool force = false;
    int jobs = 0;
};

struct Inputs {
    std::string corpus;
    std::string embeddings;
    std::string folds;
};

fs::path require_out(const Globals& g) {
    if (g.out.empty()) throw ValidationError("--out is required");
    return g.out;
}

std::vector<corpus::StancePair> load_pairs(const std::string& path) {
    if (path.empty()) throw ValidationError("--corpus is required");
    return corpus::make_pairs(corpus::load_corpus(path)).pairs;
}

corpus::FoldSplit load_or_make_folds(const Inputs& in, const std::vector<corpus::StancePair>& pairs, int k,
                                     std::uint64_t seed) {
    return in.folds.empty() ? corpus::make_folds(pairs, k, seed) : corpus::load_folds(in.folds);
}

pulearn::TrainConfig model_config(const Globals& g, const std::string& model) {
    if (!g.config.empty()) {
        const auto cfg = harness::load_experiment_config(g.config);
        for (const auto& m : cfg.models) {
            if (m.name == model) return m.config;
        }
        throw ValidationError("model '" + model + "' is not configured in " + g.config);
    }
    for (const auto& m : harness::ExperimentConfig::default_models()) {
        if (m.name == model) return m.config;
    }
    throw ValidationError("unknown model '" + model + "' (expected linear or mlp, or use --config)");
}

std::string report_json(const metrics::MetricsReport& r) {
    nlohmann::ordered_json j{{"macro_f1", r.macro_f1},         {"f1_disagree", r.f1_per_class[0]},
                             {"f1_agree", r.f1_per_class[1]},  {"fpr_overall", r.fpr_overall},
                             {"fpr_implicit", r.fpr_implicit}, {"fpr_explicit", r.fpr_explicit},
                             {"fpr_gap", r.fpr_gap},           {"eo_violation", r.eo_violation},
                             {"n", r.n}};
    return j.dump(2);
}

// Gold labels and groups for the ids of `file`.
metrics::MetricsReport score_against(const harness::PredictionFile& file,
                                     const std::vector<corpus::StancePair>& pairs) {
    std::map<std::string, const corpus::StancePair*> by_id;
    for (const auto& p : pairs) by_id[p.pair_id] = &p;
    std::vector<int> predicted, labels, groups;
    for (const auto& r : file.rows) {
        const auto* p = by_id.at(r.pair_id);
        predicted.push_back(r.label);
        labels.push_back(p->label);
        groups.push_back(p->group);
    }
    return metrics::evaluate(predicted, labels, groups);
}

std::vector<int> gold_labels(const std::vector<std::string>& ids, const std::vector<corpus::StancePair>& pairs) {
    std::map<std::string, int> by_id;
    for (const auto& p : pairs) by_id[p.pair_id] = p.label;
    std::vector<int> out;
    for (const auto& id : ids) out.push_back(by_id.at(id));
    return out;
}

void write_or_print(const Globals& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
    } else {
        write_text_file(g.out, text);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Normative stance alignment: corpus tools, fairness-aware PU training and analytics"};
    app.require_subcommand(1);

    Globals g;
    app.add_option("--config", g.config, "Experiment config file")->option_text("FILE");
    app.add_option("--out", g.out, "Output file or directory");
    auto* seed_opt = app.add_option("--seed", g.seed, "Random seed");
    app.add_flag("--force", g.force, "Recompute completed grid cells");
    app.add_option("--jobs", g.jobs, "Worker threads for the grid")->check(CLI::PositiveNumber);
    app.fallthrough();

    Inputs in;
    int k = 5;
    int fold = 0;
    double portion = 1.0;
    std::string model = "linear";

    // validate
    auto* validate = app.add_subcommand("validate", "Load a corpus and report schema problems and counts");
    validate->add_option("--corpus", in.corpus)->required();

    // pairs
    auto* pairs_cmd = app.add_subcommand("pairs", "Export stance pairs as JSONL for the embedding encoder");
    pairs_cmd->add_option("--corpus", in.corpus)->required();

    // folds
    auto* folds_cmd = app.add_subcommand("folds", "Assign stratified cross-validation folds");
    folds_cmd->add_option("--corpus", in.corpus)->required();
    folds_cmd->add_option("-k", k, "Number of folds")->check(CLI::Range(2, 1000));
    std::string stance_table;
    folds_cmd->add_option("--stance-table", stance_table, "Also write per-split stance percentages here");

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "Write the pairs of one fold with a sampled implicit portion");
    sample_cmd->add_option("--corpus", in.corpus)->required();
    sample_cmd->add_option("--folds", in.folds)->required();
    sample_cmd->add_option("--fold", fold)->required();
    sample_cmd->add_option("--portion", portion)->required()->check(CLI::Range(0.0, 1.0));

    // train
    auto* train_cmd = app.add_subcommand("train", "Train one model on one fold and portion");
    train_cmd->add_option("--corpus", in.corpus)->required();
    train_cmd->add_option("--embeddings", in.embeddings)->required();
    train_cmd->add_option("--folds", in.folds);
    train_cmd->add_option("--fold", fold);
    train_cmd->add_option("--portion", portion)->check(CLI::Range(0.0, 1.0));
    train_cmd->add_option("--model", model, "Model name (linear, mlp, or a config section)");
    std::string mode, fairness;
    double lambda_fair = -1.0;
    int rounds = 0;
    train_cmd->add_option("--mode", mode, "pu or pn");
    train_cmd->add_option("--fairness", fairness, "eo or none");
    train_cmd->add_option("--lambda-fair", lambda_fair);
    train_cmd->add_option("--rounds", rounds)->check(CLI::PositiveNumber);

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Score a saved model on a fold's test split");
    std::string model_path;
    eval_cmd->add_option("--model", model_path, "model.bin")->required();
    eval_cmd->add_option("--corpus", in.corpus)->required();
    eval_cmd->add_option("--embeddings", in.embeddings)->required();
    eval_cmd->add_option("--folds", in.folds)->required();
    eval_cmd->add_option("--fold", fold)->required();

    // grid
    auto* grid_cmd = app.add_subcommand("grid", "Run the portions x models x folds x seeds grid");

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "Write the discourse analytics bundle");
    analyze_cmd->add_option("--corpus", in.corpus)->required();

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "Validate an external prediction file against a corpus");
    std::string predictions, name;
    ingest_cmd->add_option("--corpus", in.corpus)->required();
    ingest_cmd->add_option("--predictions", predictions)->required();
    ingest_cmd->add_option("--name", name, "Provenance tag");

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "Significance tests");
    stats_cmd->require_subcommand(1);
    auto* mcnemar_cmd = stats_cmd->add_subcommand("mcnemar", "McNemar test between two prediction files");
    std::string pred_a, pred_b;
    mcnemar_cmd->add_option("--corpus", in.corpus)->required();
    mcnemar_cmd->add_option("--a", pred_a)->required();
    mcnemar_cmd->add_option("--b", pred_b)->required();
    auto* portions_cmd = stats_cmd->add_subcommand("portions", "Fold-averaged McNemar p-values between grid portions");
    std::string grid_dir;
    portions_cmd->add_option("--corpus", in.corpus)->required();
    portions_cmd->add_option("--grid", grid_dir, "Grid output directory")->required();
    portions_cmd->add_option("--model", model)->required();
    auto* kappa_cmd = stats_cmd->add_subcommand("kappa", "Cohen's kappa per annotation column and on average");
    kappa_cmd->add_option("--a", pred_a, "CSV: id column then one column per dimension")->required();
    kappa_cmd->add_option("--b", pred_b)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    g.seed_set = seed_opt->count() > 0;

    try {
        if (*validate) {
            const auto c = corpus::load_corpus(in.corpus);
            const auto issues = corpus::validate_corpus(c);
            for (const auto& issue : issues) std::cout << issue.conversation_id << ": " << issue.message << '\n';
            const auto pairs = corpus::make_pairs(c);
            std::cout << "conversations " << c.size() << ", turns " << corpus::count_turns(c) << ", stance pairs "
                      << pairs.pairs.size() << " (excluded: " << pairs.excluded.neutral_toxicity
                      << " neutral user turns, " << pairs.excluded.non_binary_stance << " non-binary stances)\n";
            if (!g.out.empty()) write_text_file(g.out, corpus::summary_csv(corpus::corpus_summary(c)));
        } else if (*pairs_cmd) {
            const auto set = corpus::make_pairs(corpus::load_corpus(in.corpus));
            corpus::write_pairs_jsonl(require_out(g), set.pairs);
            std::cout << set.pairs.size() << " pairs written, " << set.excluded.total() << " couples excluded\n";
        } else if (*folds_cmd) {
            const auto pairs = load_pairs(in.corpus);
            const auto folds = corpus::make_folds(pairs, k, g.seed);
            corpus::write_folds(require_out(g), folds);
            if (!stance_table.empty()) {
                write_text_file(stance_table, corpus::split_stance_csv(corpus::split_stance_table(pairs, folds)));
            }
        } else if (*sample_cmd) {
            const auto pairs = load_pairs(in.corpus);
            const auto view = corpus::fold_view(pairs, corpus::load_folds(in.folds), fold);
            const auto sampled = corpus::sample_portion(view, portion, mix_seed(g.seed, static_cast<std::uint64_t>(fold)));
            corpus::write_pairs_jsonl(require_out(g), sampled);
            std::cout << sampled.size() << " of " << view.size() << " pairs kept\n";
        } else if (*train_cmd) {
            const auto out = require_out(g);
            const auto pairs = load_pairs(in.corpus);
            const auto folds = load_or_make_folds(in, pairs, k, g.seed);
            const auto embeddings = load_embeddings(in.embeddings);
            auto config = model_config(g, model);
            config.seed = g.seed;
            if (!mode.empty()) config.learning_mode = pulearn::parse_learning_mode(mode);
            if (!fairness.empty()) config.fairness_kind = pulearn::parse_fairness_kind(fairness);
            if (lambda_fair >= 0.0) config.lambda_fair = lambda_fair;
            if (rounds > 0) config.rounds = rounds;

            std::vector<corpus::StancePair> train;
            const auto view = corpus::fold_view(pairs, folds, fold);
            for (const auto& p : corpus::sample_portion(view, portion, mix_seed(g.seed, static_cast<std::uint64_t>(fold)))) {
                if (p.split == corpus::Split::Train) train.push_back(p);
            }
            const auto trained = pulearn::train_online(pulearn::make_training_set(train, embeddings), config);
            pulearn::save_model(out / "model.bin", trained);
            write_text_file(out / "history.csv", pulearn::history_csv(trained.history));
            std::cout << "trained on " << train.size() << " pairs, class prior " << format_double(trained.class_prior)
                      << '\n';
        } else if (*eval_cmd) {
            const auto out = require_out(g);
            const auto trained = pulearn::load_model(model_path);
            const auto pairs = load_pairs(in.corpus);
            const auto embeddings = load_embeddings(in.embeddings);
            harness::PredictionFile preds;
            preds.provenance = fs::path(model_path).stem().string();
            for (const auto& p : corpus::fold_view(pairs, corpus::load_folds(in.folds), fold)) {
                if (p.split != corpus::Split::Test) continue;
                const auto pr = pulearn::predict(trained.model, embeddings.at(p.pair_id));
                preds.rows.push_back({p.pair_id, pr.label, pr.score});
            }
            harness::write_predictions(out / "preds.csv", preds);
            const auto report = report_json(score_against(preds, pairs));
            write_text_file(out / "metrics.json", report + '\n');
            std::cout << report << '\n';
        } else if (*grid_cmd) {
            if (g.config.empty()) throw ValidationError("grid needs --config");
            auto cfg = harness::load_experiment_config(g.config);
            if (!g.out.empty()) cfg.out = g.out;
            if (g.jobs > 0) cfg.jobs = g.jobs;
            if (g.seed_set) cfg.fold_seed = g.seed;
            const auto result = harness::run_grid(cfg, g.force);
            std::cout << result.trained << " cells trained, " << result.skipped << " already complete\n"
                      << "summary: " << (cfg.out / "summary").string() << '\n';
        } else if (*analyze_cmd) {
            const auto result = harness::analyze(corpus::load_corpus(in.corpus), require_out(g));
            std::cout << result.files.size() << " files written to " << g.out << '\n';
        } else if (*ingest_cmd) {
            const auto pairs = load_pairs(in.corpus);
            const auto file = harness::ingest_predictions(predictions, pairs, name);
            std::cout << "accepted " << file.size() << " predictions (" << file.provenance << ") for "
                      << pairs.size() << " corpus pairs\n";
            if (file.size() > 0) std::cout << report_json(score_against(file, pairs)) << '\n';
            if (!g.out.empty()) harness::write_predictions(g.out, file);
        } else if (*mcnemar_cmd) {
            const auto pairs = load_pairs(in.corpus);
            const auto a = harness::ingest_predictions(pred_a, pairs);
            const auto b = harness::ingest_predictions(pred_b, pairs);
            std::vector<std::string> ids;
            for (const auto& r : a.rows) ids.push_back(r.pair_id);
            const auto result = stats::mcnemar(harness::aligned_labels(a, ids), harness::aligned_labels(b, ids),
                                               gold_labels(ids, pairs));
            write_or_print(g, stats::tests_csv({{"mcnemar", a.provenance + " vs " + b.provenance, "paired errors",
                                                 result, ""}}));
        } else if (*portions_cmd) {
            const auto pairs = load_pairs(in.corpus);
            std::vector<stats::PortionPredictions> portions;
            std::vector<std::vector<int>> labels;
            std::vector<std::vector<std::string>> fold_ids;
            std::vector<fs::path> portion_dirs;
            for (const auto& entry : fs::directory_iterator(grid_dir)) {
                if (entry.is_directory() && fs::exists(entry.path() / model)) portion_dirs.push_back(entry.path());
            }
            std::sort(portion_dirs.begin(), portion_dirs.end());
            for (const auto& dir : portion_dirs) {
                stats::PortionPredictions pp{dir.filename().string(), {}};
                std::vector<fs::path> folds_here;
                for (const auto& e : fs::directory_iterator(dir / model)) {
                    if (e.is_directory()) folds_here.push_back(e.path());
                }
                std::sort(folds_here.begin(), folds_here.end(), [](const fs::path& x, const fs::path& y) {
                    return std::stoi(x.filename().string()) < std::stoi(y.filename().string());
                });
                for (std::size_t f = 0; f < folds_here.size(); ++f) {
                    const auto file = harness::ingest_predictions(folds_here[f] / std::to_string(g.seed) / "preds.csv", pairs);
                    if (fold_ids.size() <= f) {
                        std::vector<std::string> ids;
                        for (const auto& r : file.rows) ids.push_back(r.pair_id);
                        labels.push_back(gold_labels(ids, pairs));
                        fold_ids.push_back(std::move(ids));
                    }
                    pp.folds.push_back(harness::aligned_labels(file, fold_ids[f]));
                }
                portions.push_back(std::move(pp));
            }
            write_or_print(g, stats::portion_matrix_csv(stats::mcnemar_portion_matrix(portions, labels)));
        } else if (*kappa_cmd) {
            const auto ta = read_csv(pred_a);
            const auto tb = read_csv(pred_b);
            if (ta.header != tb.header || ta.header.size() < 2) {
                throw ValidationError("kappa inputs need identical headers: id column plus dimension columns");
            }
            std::map<std::string, const std::vector<std::string>*> rows_b;
            for (const auto& r : tb.rows) rows_b[r[0]] = &r;
            std::vector<stats::KappaDimension> dims;
            for (std::size_t c = 1; c < ta.header.size(); ++c) dims.push_back({ta.header[c], {}, {}});
            for (const auto& r : ta.rows) {
                const auto it = rows_b.find(r[0]);
                if (it == rows_b.end()) throw ValidationError("id " + r[0] + " missing from " + pred_b);
                for (std::size_t c = 1; c < r.size(); ++c) {
                    dims[c - 1].annotator1.push_back(r[c]);
                    dims[c - 1].annotator2.push_back((*it->second)[c]);
                }
            }
            const auto summary = stats::average_kappa(dims);
            std::string text = "dimension,kappa\n";
            for (const auto& [dim, kappa] : summary.per_dimension) text += csv_escape(dim) + ',' + format_double(kappa) + '\n';
            text += "average," + format_double(summary.average) + '\n';
            write_or_print(g, text);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

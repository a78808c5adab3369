#include "normstance/harness/grid.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include <json.hpp>

#include "normstance/error.hpp"
#include "normstance/harness/predictions.hpp"
#include "normstance/pulearn/model_io.hpp"
#include "normstance/pulearn/trainer.hpp"
#include "normstance/util.hpp"

namespace normstance::harness {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string portion_name(double p) { return format_fixed(p, 2); }

std::string cell_name(const ExperimentConfig& config, const GridCell& c) {
    return "portion " + portion_name(c.portion) + ", model " + config.models[c.model].name + ", fold " +
           std::to_string(c.fold) + ", seed " + std::to_string(c.seed);
}

ordered_json report_json(const metrics::MetricsReport& r) {
    return ordered_json{{"macro_f1", r.macro_f1},         {"f1_disagree", r.f1_per_class[0]},
                        {"f1_agree", r.f1_per_class[1]},  {"fpr_overall", r.fpr_overall},
                        {"fpr_implicit", r.fpr_implicit}, {"fpr_explicit", r.fpr_explicit},
                        {"fpr_gap", r.fpr_gap},           {"eo_violation", r.eo_violation},
                        {"n", r.n}};
}

metrics::MetricsReport report_from(const nlohmann::json& j) {
    metrics::MetricsReport r;
    r.macro_f1 = j.at("macro_f1").get<double>();
    r.f1_per_class = {j.at("f1_disagree").get<double>(), j.at("f1_agree").get<double>()};
    r.fpr_overall = j.at("fpr_overall").get<double>();
    r.fpr_implicit = j.at("fpr_implicit").get<double>();
    r.fpr_explicit = j.at("fpr_explicit").get<double>();
    r.fpr_gap = j.at("fpr_gap").get<double>();
    r.eo_violation = j.at("eo_violation").get<double>();
    r.n = j.at("n").get<std::size_t>();
    return r;
}

// nullopt when the cell has not completed.
std::optional<metrics::MetricsReport> read_cell(const fs::path& dir) {
    const auto path = dir / "metrics.json";
    if (!fs::exists(path)) return std::nullopt;
    try {
        return report_from(nlohmann::json::parse(read_text_file(path)).at("report"));
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

metrics::MetricsReport run_cell(const GridInputs& inputs, const ExperimentConfig& config, const GridCell& cell,
                                const fs::path& dir) {
    const auto& spec = config.models[cell.model];
    const auto view = corpus::fold_view(inputs.pairs, inputs.folds, cell.fold);
    const auto sampled = corpus::sample_portion(view, cell.portion, mix_seed(cell.seed, static_cast<std::uint64_t>(cell.fold)));

    std::vector<corpus::StancePair> train, test;
    for (const auto& p : sampled) (p.split == corpus::Split::Train ? train : test).push_back(p);
    if (train.empty()) throw ValidationError("no training pairs");
    if (test.empty()) throw ValidationError("no test pairs");

    auto train_config = spec.config;
    train_config.seed = cell.seed;
    const auto model = pulearn::train_online(pulearn::make_training_set(train, inputs.embeddings), train_config);

    PredictionFile preds;
    preds.provenance = spec.name;
    std::vector<int> predicted, labels, groups;
    for (const auto& p : test) {
        const auto pr = pulearn::predict(model.model, inputs.embeddings.at(p.pair_id));
        preds.rows.push_back({p.pair_id, pr.label, pr.score});
        predicted.push_back(pr.label);
        labels.push_back(p.label);
        groups.push_back(p.group);
    }
    const auto report = metrics::evaluate(predicted, labels, groups);

    pulearn::save_model(dir / "model.bin", model);
    write_text_file(dir / "history.csv", pulearn::history_csv(model.history));
    write_predictions(dir / "preds.csv", preds);
    const ordered_json doc{{"portion", portion_name(cell.portion)},
                           {"model", spec.name},
                           {"fold", cell.fold},
                           {"seed", cell.seed},
                           {"n_train", train.size()},
                           {"n_test", test.size()},
                           {"class_prior", model.class_prior},
                           {"report", report_json(report)}};
    write_text_file(dir / "metrics.json", doc.dump(2) + '\n');
    return report;
}

std::string mean_std(double mean, double std) { return format_fixed(mean, 3) + " ± " + format_fixed(std, 3); }

}  // namespace

GridInputs load_grid_inputs(const ExperimentConfig& config) {
    config.validate(true);
    GridInputs in;
    in.pairs = corpus::make_pairs(corpus::load_corpus(config.corpus)).pairs;
    in.embeddings = load_embeddings(config.embeddings);
    for (const auto& p : in.pairs) {
        if (!in.embeddings.contains(p.pair_id)) throw ValidationError("no embedding for pair " + p.pair_id);
    }
    in.folds = config.folds ? corpus::load_folds(*config.folds) : corpus::make_folds(in.pairs, config.k, config.fold_seed);
    return in;
}

fs::path cell_dir(const fs::path& out, const std::string& portion, const std::string& model, int fold,
                  std::uint64_t seed) {
    return out / portion / model / std::to_string(fold) / std::to_string(seed);
}

GridResult run_grid(const GridInputs& inputs, const ExperimentConfig& config, bool force) {
    config.validate(false);
    std::vector<GridCell> cells;
    for (double p : config.portions) {
        for (std::size_t m = 0; m < config.models.size(); ++m) {
            for (int f = 0; f < inputs.folds.k; ++f) {
                for (auto s : config.seeds) cells.push_back({p, m, f, s});
            }
        }
    }

    std::vector<std::optional<metrics::MetricsReport>> reports(cells.size());
    std::vector<char> trained(cells.size(), 0);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr error;

    auto worker = [&] {
        while (!failed.load()) {
            const auto i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const auto& cell = cells[i];
            const auto dir = cell_dir(config.out, portion_name(cell.portion), config.models[cell.model].name,
                                      cell.fold, cell.seed);
            try {
                if (!force) reports[i] = read_cell(dir);
                if (!reports[i]) {
                    fs::remove(dir / "metrics.json");
                    reports[i] = run_cell(inputs, config, cell, dir);
                    trained[i] = 1;
                }
            } catch (const ValidationError& e) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::make_exception_ptr(ValidationError(cell_name(config, cell) + ": " + e.what()));
                failed = true;
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::make_exception_ptr(std::runtime_error(cell_name(config, cell) + ": " + e.what()));
                failed = true;
            }
        }
    };

    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), std::max<std::size_t>(cells.size(), 1));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    GridResult result;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        result.rows.push_back({portion_name(c.portion), config.models[c.model].name, c.fold, c.seed, *reports[i]});
        trained[i] ? ++result.trained : ++result.skipped;
    }
    write_summary(config.out, config, result.rows);
    return result;
}

GridResult run_grid(const ExperimentConfig& config, bool force) {
    const auto inputs = load_grid_inputs(config);
    if (!config.folds) corpus::write_folds(config.out / "folds.csv", inputs.folds);
    return run_grid(inputs, config, force);
}

void write_summary(const fs::path& out, const ExperimentConfig& config, const std::vector<metrics::ReportRow>& rows) {
    const auto dir = out / "summary";

    std::string metrics_csv = std::string(metrics::kReportHeader) + '\n';
    for (const auto& r : rows) metrics_csv += metrics::report_csv_line(r) + '\n';
    write_text_file(dir / "metrics.csv", metrics_csv);

    std::string aggregate = "portion,model,cells,n_mean";
    for (const auto* f : metrics::kReportFields) aggregate += std::string(",") + f + "_mean," + f + "_std";
    aggregate += '\n';
    std::string table2 = "model";
    for (double p : config.portions) table2 += ',' + portion_name(p);
    table2 += '\n';
    std::string fpr = "portion,model,fpr_overall_mean,fpr_overall_std,fpr_implicit_mean,fpr_implicit_std,"
                      "fpr_explicit_mean,fpr_explicit_std,fpr_gap_mean,fpr_gap_std\n";

    std::vector<std::string> table2_rows(config.models.size());
    for (std::size_t m = 0; m < config.models.size(); ++m) table2_rows[m] = csv_escape(config.models[m].name);

    for (double p : config.portions) {
        const auto portion = portion_name(p);
        for (std::size_t m = 0; m < config.models.size(); ++m) {
            const auto& name = config.models[m].name;
            std::vector<metrics::MetricsReport> group;
            for (const auto& r : rows) {
                if (r.portion == portion && r.model == name) group.push_back(r.report);
            }
            if (group.empty()) {
                table2_rows[m] += ',';
                continue;
            }
            const auto agg = metrics::aggregate_folds(group);
            aggregate += portion + ',' + csv_escape(name) + ',' + std::to_string(agg.count) + ',' +
                         format_double(agg.n_mean);
            for (std::size_t f = 0; f < agg.mean.size(); ++f) {
                aggregate += ',' + format_double(agg.mean[f]) + ',' + format_double(agg.std[f]);
            }
            aggregate += '\n';
            table2_rows[m] += ',' + mean_std(agg.mean_of("macro_f1"), agg.std_of("macro_f1"));
            fpr += portion + ',' + csv_escape(name);
            for (const char* f : {"fpr_overall", "fpr_implicit", "fpr_explicit", "fpr_gap"}) {
                fpr += ',' + format_double(agg.mean_of(f)) + ',' + format_double(agg.std_of(f));
            }
            fpr += '\n';
        }
    }
    for (const auto& r : table2_rows) table2 += r + '\n';

    write_text_file(dir / "aggregate.csv", aggregate);
    write_text_file(dir / "table2.csv", table2);
    write_text_file(dir / "fpr_by_portion.csv", fpr);
}

}  // namespace normstance::harness

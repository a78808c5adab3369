#include "normstance/harness/predictions.hpp"

#include <unordered_map>

#include "normstance/error.hpp"
#include "normstance/util.hpp"

namespace normstance::harness {

const PredictionRow* PredictionFile::find(const std::string& pair_id) const {
    for (const auto& r : rows) {
        if (r.pair_id == pair_id) return &r;
    }
    return nullptr;
}

PredictionFile ingest_predictions(const std::filesystem::path& path, const std::set<std::string>& known_ids,
                                  std::string provenance) {
    const auto table = read_csv(path);
    const auto origin = path.string();
    const auto id_col = table.column("pair_id");
    const auto label_col = table.column("label");
    const auto score_col = table.column("score");
    if (!id_col || !label_col) throw ParseError(origin, 1, "header must contain pair_id and label");

    PredictionFile out;
    out.provenance = provenance.empty() ? path.stem().string() : std::move(provenance);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const auto line = table.line_numbers[i];
        PredictionRow p;
        p.pair_id = row[*id_col];
        if (!known_ids.contains(p.pair_id)) throw ParseError(origin, line, "unknown pair_id '" + p.pair_id + "'");
        if (!seen.insert(p.pair_id).second) throw ParseError(origin, line, "duplicate pair_id '" + p.pair_id + "'");
        const auto& label = row[*label_col];
        if (label != "0" && label != "1") {
            throw ParseError(origin, line, "label '" + label + "' for " + p.pair_id + " is not 0 or 1");
        }
        p.label = label == "1";
        if (score_col && !row[*score_col].empty()) {
            try {
                p.score = parse_double(row[*score_col]);
            } catch (const ValidationError& e) {
                throw ParseError(origin, line, e.what());
            }
        }
        out.rows.push_back(std::move(p));
    }
    return out;
}

PredictionFile ingest_predictions(const std::filesystem::path& path, const std::vector<corpus::StancePair>& pairs,
                                  std::string provenance) {
    std::set<std::string> ids;
    for (const auto& p : pairs) ids.insert(p.pair_id);
    return ingest_predictions(path, ids, std::move(provenance));
}

std::string predictions_csv(const PredictionFile& file) {
    bool scored = !file.rows.empty();
    for (const auto& r : file.rows) scored = scored && r.score.has_value();
    std::string out = scored ? "pair_id,label,score\n" : "pair_id,label\n";
    for (const auto& r : file.rows) {
        out += csv_escape(r.pair_id) + ',' + std::to_string(r.label);
        if (scored) out += ',' + format_double(*r.score);
        out += '\n';
    }
    return out;
}

void write_predictions(const std::filesystem::path& path, const PredictionFile& file) {
    write_text_file(path, predictions_csv(file));
}

std::vector<int> aligned_labels(const PredictionFile& file, const std::vector<std::string>& pair_ids) {
    std::unordered_map<std::string, int> by_id;
    for (const auto& r : file.rows) by_id.emplace(r.pair_id, r.label);
    std::vector<int> out;
    out.reserve(pair_ids.size());
    for (const auto& id : pair_ids) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw ValidationError("prediction file '" + file.provenance + "' has no row for " + id);
        }
        out.push_back(it->second);
    }
    return out;
}

}  // namespace normstance::harness

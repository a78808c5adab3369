#include "normstance/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "normstance/error.hpp"
#include "normstance/pulearn/fairness.hpp"
#include "normstance/util.hpp"

namespace normstance::metrics {

namespace {

void check_binary(std::span<const int> values, const char* what) {
    for (int v : values) {
        if (v != 0 && v != 1) throw std::invalid_argument(std::string("confusion: ") + what + " must be 0 or 1");
    }
}

void tally(ConfusionCounts& c, int prediction, int label) {
    if (label == 1) {
        prediction == 1 ? ++c.tp : ++c.fn;
    } else {
        prediction == 1 ? ++c.fp : ++c.tn;
    }
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
    const double precision = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fp));
    const double recall = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fn));
    return safe_ratio(2.0 * precision * recall, precision + recall);
}

std::size_t field_index(std::string_view field) {
    for (std::size_t i = 0; i < kReportFields.size(); ++i) {
        if (field == kReportFields[i]) return i;
    }
    throw std::invalid_argument("unknown report field '" + std::string(field) + "'");
}

}  // namespace

ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size()) throw std::invalid_argument("confusion: length mismatch");
    check_binary(predictions, "predictions");
    check_binary(labels, "labels");
    ConfusionCounts c;
    for (std::size_t i = 0; i < predictions.size(); ++i) tally(c, predictions[i], labels[i]);
    return c;
}

GroupedConfusion confusion(std::span<const int> predictions, std::span<const int> labels,
                           std::span<const int> groups) {
    if (predictions.size() != labels.size() || predictions.size() != groups.size()) {
        throw std::invalid_argument("confusion: length mismatch");
    }
    check_binary(predictions, "predictions");
    check_binary(labels, "labels");
    check_binary(groups, "groups");
    GroupedConfusion out;
    out.by_group[0].group = 0;
    out.by_group[1].group = 1;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        tally(out.overall, predictions[i], labels[i]);
        tally(out.by_group[static_cast<std::size_t>(groups[i])], predictions[i], labels[i]);
    }
    return out;
}

std::array<double, 2> f1_per_class(const ConfusionCounts& c) {
    // Disagree as the positive class swaps tp<->tn and fp<->fn.
    return {f1(c.tn, c.fn, c.fp), f1(c.tp, c.fp, c.fn)};
}

double macro_f1(const ConfusionCounts& counts) {
    const auto f = f1_per_class(counts);
    return 0.5 * (f[0] + f[1]);
}

double fpr(const ConfusionCounts& c) {
    if (c.fp + c.tn == 0) {
        warn(c.group ? "fpr: group " + std::to_string(*c.group) + " has no negatives; FPR taken as 0"
                     : std::string("fpr: no negatives; FPR taken as 0"));
        return 0.0;
    }
    return static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
}

MetricsReport evaluate(std::span<const int> predictions, std::span<const int> labels, std::span<const int> groups) {
    const auto cm = confusion(predictions, labels, groups);
    MetricsReport r;
    r.n = cm.overall.total();
    r.f1_per_class = f1_per_class(cm.overall);
    r.macro_f1 = 0.5 * (r.f1_per_class[0] + r.f1_per_class[1]);
    r.fpr_overall = fpr(cm.overall);
    r.fpr_implicit = fpr(cm.by_group[0]);
    r.fpr_explicit = fpr(cm.by_group[1]);
    r.fpr_gap = std::abs(r.fpr_implicit - r.fpr_explicit);
    r.eo_violation = predictions.empty() ? 0.0 : pulearn::eo_violation(predictions, labels, groups);
    return r;
}

std::array<double, kReportFields.size()> report_values(const MetricsReport& r) {
    return {r.macro_f1,     r.f1_per_class[0], r.f1_per_class[1], r.fpr_overall,
            r.fpr_implicit, r.fpr_explicit,    r.fpr_gap,         r.eo_violation};
}

double Aggregate::mean_of(std::string_view field) const { return mean[field_index(field)]; }
double Aggregate::std_of(std::string_view field) const { return std[field_index(field)]; }

Aggregate aggregate_folds(std::span<const MetricsReport> reports) {
    if (reports.empty()) throw std::invalid_argument("aggregate_folds: no reports");
    Aggregate a;
    a.count = reports.size();
    const double n = static_cast<double>(reports.size());
    for (const auto& r : reports) {
        const auto v = report_values(r);
        for (std::size_t i = 0; i < v.size(); ++i) a.mean[i] += v[i];
        a.n_mean += static_cast<double>(r.n);
    }
    for (auto& m : a.mean) m /= n;
    a.n_mean /= n;

    // Constant fields must aggregate to exactly the constant.
    for (std::size_t i = 0; i < a.mean.size(); ++i) {
        const double first = report_values(reports[0])[i];
        bool constant = true;
        for (const auto& r : reports) constant = constant && report_values(r)[i] == first;
        if (constant) a.mean[i] = first;
    }
    if (reports.size() > 1) {
        for (const auto& r : reports) {
            const auto v = report_values(r);
            for (std::size_t i = 0; i < v.size(); ++i) a.std[i] += (v[i] - a.mean[i]) * (v[i] - a.mean[i]);
        }
        for (auto& s : a.std) s = std::sqrt(s / (n - 1.0));
    }
    return a;
}

std::string report_csv_line(const ReportRow& row) {
    const auto& r = row.report;
    std::string out;
    out += csv_escape(row.portion) + ',' + csv_escape(row.model) + ',' + std::to_string(row.fold) + ',' +
           std::to_string(row.seed) + ',';
    out += format_double(r.macro_f1) + ',' + format_double(r.fpr_implicit) + ',' + format_double(r.fpr_explicit) +
           ',' + format_double(r.fpr_gap) + ',' + format_double(r.eo_violation) + ',' + std::to_string(r.n);
    return out;
}

ReportRow parse_report_csv_line(const std::vector<std::string>& f) {
    if (f.size() != 10) throw ValidationError("report row: expected 10 fields, got " + std::to_string(f.size()));
    ReportRow row;
    row.portion = f[0];
    row.model = f[1];
    row.fold = static_cast<int>(parse_integer(f[2]));
    row.seed = static_cast<std::uint64_t>(parse_integer(f[3]));
    row.report.macro_f1 = parse_double(f[4]);
    row.report.fpr_implicit = parse_double(f[5]);
    row.report.fpr_explicit = parse_double(f[6]);
    row.report.fpr_gap = parse_double(f[7]);
    row.report.eo_violation = parse_double(f[8]);
    row.report.n = static_cast<std::size_t>(parse_integer(f[9]));
    return row;
}

}  // namespace normstance::metrics

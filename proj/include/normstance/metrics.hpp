#pragma once
// Binary classification and group fairness metrics. The positive class is
// Agree (label 1); group 0 is implicit, group 1 explicit.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace normstance::metrics {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
    std::optional<int> group;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
};

struct GroupedConfusion {
    ConfusionCounts overall;
    std::array<ConfusionCounts, 2> by_group;
};

// Throws std::invalid_argument on length mismatch or values outside {0,1}.
ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> labels);
GroupedConfusion confusion(std::span<const int> predictions, std::span<const int> labels,
                           std::span<const int> groups);

// F1 of Disagree (index 0) and Agree (index 1). Empty denominators give 0.
std::array<double, 2> f1_per_class(const ConfusionCounts& counts);
double macro_f1(const ConfusionCounts& counts);

// fp / (fp + tn); 0 with a warning when there are no negatives.
double fpr(const ConfusionCounts& counts);

struct MetricsReport {
    double macro_f1 = 0.0;
    std::array<double, 2> f1_per_class{};
    double fpr_overall = 0.0;
    double fpr_implicit = 0.0;
    double fpr_explicit = 0.0;
    double fpr_gap = 0.0;
    double eo_violation = 0.0;
    std::size_t n = 0;
};

MetricsReport evaluate(std::span<const int> predictions, std::span<const int> labels, std::span<const int> groups);

// Numeric fields of MetricsReport in report order.
inline constexpr std::array<const char*, 8> kReportFields{
    "macro_f1", "f1_disagree", "f1_agree", "fpr_overall", "fpr_implicit", "fpr_explicit", "fpr_gap", "eo_violation"};

std::array<double, kReportFields.size()> report_values(const MetricsReport& report);

struct Aggregate {
    std::array<double, kReportFields.size()> mean{};
    std::array<double, kReportFields.size()> std{};  // sample (n - 1); 0 for one report
    double n_mean = 0.0;
    std::size_t count = 0;

    double mean_of(std::string_view field) const;
    double std_of(std::string_view field) const;
};

// Throws std::invalid_argument on an empty list.
Aggregate aggregate_folds(std::span<const MetricsReport> reports);

struct ReportRow {
    std::string portion;
    std::string model;
    int fold = 0;
    std::uint64_t seed = 0;
    MetricsReport report;
};

inline constexpr const char* kReportHeader =
    "portion,model,fold,seed,macro_f1,fpr_implicit,fpr_explicit,fpr_gap,eo_violation,n";

std::string report_csv_line(const ReportRow& row);
ReportRow parse_report_csv_line(const std::vector<std::string>& fields);

}  // namespace normstance::metrics

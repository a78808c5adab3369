#pragma once
// Significance tests and agreement statistics.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace normstance::stats {

enum class TestKind { ChiSquare, MannWhitney, McNemar };

std::string_view to_string(TestKind kind);

struct TestResult {
    TestKind test = TestKind::ChiSquare;
    double statistic = 0.0;
    std::optional<int> dof;
    double p_value = 1.0;
    std::string method_note;
};

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x),
// series below x < a + 1 and Lentz continued fraction above.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper tail of the chi-square distribution.
double chi_square_sf(double x, double dof);

// Pearson test of independence on an r x c table of counts. Throws
// std::invalid_argument for fewer than 2 rows or columns, ragged rows,
// negative counts or a zero row/column sum.
TestResult chi_square_independence(const std::vector<std::vector<double>>& table);

enum class MannWhitneyMethod { Auto, Exact, Normal };

// U of sample_a from pooled midranks. Auto uses the exact permutation
// distribution (ties included) when n_a * n_b <= 400 and the normal
// approximation with tie and continuity correction otherwise.
inline constexpr std::size_t kExactMannWhitneyLimit = 400;

TestResult mann_whitney_u(std::span<const double> sample_a, std::span<const double> sample_b,
                          MannWhitneyMethod method = MannWhitneyMethod::Auto);

// b = A right and B wrong, c = A wrong and B right.
struct Discordance {
    std::size_t b = 0;
    std::size_t c = 0;
};

Discordance discordance(std::span<const int> model_a, std::span<const int> model_b, std::span<const int> labels);

// Exact two-sided binomial p when b + c < 25, else (|b - c| - 1)^2 / (b + c)
// on one degree of freedom.
inline constexpr std::size_t kExactMcNemarLimit = 25;

TestResult mcnemar(std::size_t b, std::size_t c);
TestResult mcnemar(std::span<const int> model_a, std::span<const int> model_b, std::span<const int> labels);

// (p_o - p_e) / (1 - p_e); 1 when both annotators use one identical label.
// Throws std::invalid_argument on empty input or length mismatch.
double cohens_kappa(std::span<const std::string> annotator1, std::span<const std::string> annotator2);
double cohens_kappa(std::span<const int> annotator1, std::span<const int> annotator2);

struct KappaDimension {
    std::string name;
    std::vector<std::string> annotator1;
    std::vector<std::string> annotator2;
};

struct KappaSummary {
    std::vector<std::pair<std::string, double>> per_dimension;
    double average = 0.0;
};

// Unweighted mean over dimensions.
KappaSummary average_kappa(const std::vector<KappaDimension>& dimensions);

// "***" below .001, "**" below .01, "*" below .05, otherwise empty.
std::string significance_stars(double p);

struct PortionPredictions {
    std::string portion;
    std::vector<std::vector<int>> folds;  // predictions per fold
};

struct PortionComparison {
    std::string portion_a;
    std::string portion_b;
    std::vector<double> fold_p;
    double mean_p = 1.0;
    std::string stars;
};

// McNemar per fold for every unordered portion pair, averaged across folds.
// `labels` holds the per-fold test labels. Throws ValidationError when fold
// counts or fold lengths disagree.
std::vector<PortionComparison> mcnemar_portion_matrix(const std::vector<PortionPredictions>& portions,
                                                      const std::vector<std::vector<int>>& labels);

std::string portion_matrix_csv(const std::vector<PortionComparison>& rows);

// One row of the tests CSV. A missing result is written with empty numeric
// fields and the note (e.g. "insufficient n").
struct TestRow {
    std::string test;
    std::string group;
    std::string comparison;
    std::optional<TestResult> result;
    std::string note;
};

inline constexpr const char* kTestsHeader = "test,group,comparison,statistic,dof,p_value,method_note";

std::string tests_csv(const std::vector<TestRow>& rows);

}  // namespace normstance::stats

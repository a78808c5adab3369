#include "normstance/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "normstance/error.hpp"
#include "normstance/util.hpp"

namespace normstance::stats {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 10000;

double gamma_prefactor(double a, double x) { return std::exp(-x + a * std::log(x) - std::lgamma(a)); }

double gamma_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < kMaxIterations; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    return sum * gamma_prefactor(a, x);
}

// Modified Lentz.
double gamma_continued_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h * gamma_prefactor(a, x);
}

void check_gamma_args(double a, double x) {
    if (!(a > 0.0) || std::isnan(x)) throw std::invalid_argument("incomplete gamma: need a > 0 and x not NaN");
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

// Doubled midranks (always integers) of the pooled sample.
std::vector<long long> doubled_midranks(std::span<const double> pooled, std::vector<std::size_t>* tie_sizes) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
    std::vector<long long> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const auto doubled = static_cast<long long>(i + j + 2);
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = doubled;
        if (tie_sizes) tie_sizes->push_back(j - i + 1);
        i = j + 1;
    }
    return ranks;
}

// Permutation distribution of the doubled rank sum of a size-k subset.
// ways[s] counts subsets with doubled sum s.
std::vector<double> subset_sum_counts(const std::vector<long long>& ranks, std::size_t k) {
    const auto total = static_cast<std::size_t>(std::accumulate(ranks.begin(), ranks.end(), 0LL));
    std::vector<std::vector<double>> ways(k + 1, std::vector<double>(total + 1, 0.0));
    ways[0][0] = 1.0;
    for (long long r : ranks) {
        const auto step = static_cast<std::size_t>(r);
        for (std::size_t j = k; j >= 1; --j) {
            auto& dst = ways[j];
            const auto& src = ways[j - 1];
            for (std::size_t s = total; s >= step; --s) {
                if (src[s - step] != 0.0) dst[s] += src[s - step];
                if (s == step) break;
            }
        }
    }
    return ways[k];
}

}  // namespace

std::string_view to_string(TestKind kind) {
    switch (kind) {
        case TestKind::ChiSquare: return "chi_square";
        case TestKind::MannWhitney: return "mann_whitney_u";
        case TestKind::McNemar: return "mcnemar";
    }
    return "unknown";
}

double gamma_p(double a, double x) {
    check_gamma_args(a, x);
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return x < a + 1.0 ? clamp01(gamma_series(a, x)) : clamp01(1.0 - gamma_continued_fraction(a, x));
}

double gamma_q(double a, double x) {
    check_gamma_args(a, x);
    if (x <= 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return x < a + 1.0 ? clamp01(1.0 - gamma_series(a, x)) : clamp01(gamma_continued_fraction(a, x));
}

double chi_square_sf(double x, double dof) {
    if (!(dof > 0.0)) throw std::invalid_argument("chi_square_sf: dof must be positive");
    return gamma_q(0.5 * dof, 0.5 * x);
}

TestResult chi_square_independence(const std::vector<std::vector<double>>& table) {
    const std::size_t rows = table.size();
    if (rows < 2) throw std::invalid_argument("chi_square_independence: need at least 2 rows");
    const std::size_t cols = table[0].size();
    if (cols < 2) throw std::invalid_argument("chi_square_independence: need at least 2 columns");

    std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (table[i].size() != cols) throw std::invalid_argument("chi_square_independence: ragged table");
        for (std::size_t j = 0; j < cols; ++j) {
            const double o = table[i][j];
            if (!(o >= 0.0) || !std::isfinite(o)) {
                throw std::invalid_argument("chi_square_independence: counts must be finite and nonnegative");
            }
            row_sum[i] += o;
            col_sum[j] += o;
            total += o;
        }
    }
    for (std::size_t i = 0; i < rows; ++i) {
        if (row_sum[i] == 0.0) throw std::invalid_argument("chi_square_independence: row " + std::to_string(i) + " sums to zero");
    }
    for (std::size_t j = 0; j < cols; ++j) {
        if (col_sum[j] == 0.0) throw std::invalid_argument("chi_square_independence: column " + std::to_string(j) + " sums to zero");
    }

    double statistic = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const double expected = row_sum[i] * col_sum[j] / total;
            const double diff = table[i][j] - expected;
            statistic += diff * diff / expected;
        }
    }
    const int dof = static_cast<int>((rows - 1) * (cols - 1));
    return {TestKind::ChiSquare, statistic, dof, chi_square_sf(statistic, dof), "pearson"};
}

TestResult mann_whitney_u(std::span<const double> sample_a, std::span<const double> sample_b,
                          MannWhitneyMethod method) {
    if (sample_a.empty() || sample_b.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
    const std::size_t na = sample_a.size(), nb = sample_b.size(), n = na + nb;

    std::vector<double> pooled(sample_a.begin(), sample_a.end());
    pooled.insert(pooled.end(), sample_b.begin(), sample_b.end());
    if (std::any_of(pooled.begin(), pooled.end(), [](double v) { return std::isnan(v); })) {
        throw std::invalid_argument("mann_whitney_u: NaN in sample");
    }
    std::vector<std::size_t> ties;
    const auto ranks = doubled_midranks(pooled, &ties);

    long long ra2 = 0;
    for (std::size_t i = 0; i < na; ++i) ra2 += ranks[i];
    const double u = 0.5 * static_cast<double>(ra2) - 0.5 * static_cast<double>(na * (na + 1));
    const double mean_u = 0.5 * static_cast<double>(na * nb);

    const bool exact = method == MannWhitneyMethod::Exact ||
                       (method == MannWhitneyMethod::Auto && na * nb <= kExactMannWhitneyLimit);
    TestResult r{TestKind::MannWhitney, u, std::nullopt, 1.0, ""};

    if (exact) {
        // Enumerate subsets of the smaller sample; the two-sided p is the same
        // whichever side is counted.
        const bool use_a = na <= nb;
        const std::size_t k = use_a ? na : nb;
        long long observed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if ((i < na) == use_a) observed += ranks[i];
        }
        const auto counts = subset_sum_counts(ranks, k);
        double below = 0.0, above = 0.0, all = 0.0;
        for (std::size_t s = 0; s < counts.size(); ++s) {
            if (counts[s] == 0.0) continue;
            all += counts[s];
            if (static_cast<long long>(s) <= observed) below += counts[s];
            if (static_cast<long long>(s) >= observed) above += counts[s];
        }
        r.p_value = std::min(1.0, 2.0 * std::min(below, above) / all);
        r.method_note = "exact";
        return r;
    }

    double tie_term = 0.0;
    for (std::size_t t : ties) {
        const double td = static_cast<double>(t);
        tie_term += td * td * td - td;
    }
    const double nd = static_cast<double>(n);
    const double variance = static_cast<double>(na * nb) / 12.0 * ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
    if (!(variance > 0.0)) {
        r.method_note = "normal approximation; all values tied";
        return r;
    }
    const double z = std::max(0.0, std::abs(u - mean_u) - 0.5) / std::sqrt(variance);
    r.p_value = clamp01(std::erfc(z / std::sqrt(2.0)));
    r.method_note = "normal approximation, tie and continuity corrected";
    return r;
}

Discordance discordance(std::span<const int> model_a, std::span<const int> model_b, std::span<const int> labels) {
    if (model_a.size() != model_b.size() || model_a.size() != labels.size()) {
        throw std::invalid_argument("mcnemar: length mismatch");
    }
    if (labels.empty()) throw std::invalid_argument("mcnemar: empty input");
    Discordance d;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool a_right = model_a[i] == labels[i];
        const bool b_right = model_b[i] == labels[i];
        if (a_right && !b_right) ++d.b;
        if (!a_right && b_right) ++d.c;
    }
    return d;
}

TestResult mcnemar(std::size_t b, std::size_t c) {
    const std::size_t n = b + c;
    const std::string counts = "b=" + std::to_string(b) + " c=" + std::to_string(c);
    if (n == 0) return {TestKind::McNemar, 0.0, std::nullopt, 1.0, "no discordant pairs"};
    if (n < kExactMcNemarLimit) {
        const std::size_t k = std::min(b, c);
        double coef = 1.0, tail = 0.0;
        for (std::size_t i = 0; i <= k; ++i) {
            tail += coef;
            coef = coef * static_cast<double>(n - i) / static_cast<double>(i + 1);
        }
        const double p = std::min(1.0, 2.0 * std::ldexp(tail, -static_cast<int>(n)));
        return {TestKind::McNemar, static_cast<double>(k), std::nullopt, p, "exact binomial " + counts};
    }
    const double diff = std::abs(static_cast<double>(b) - static_cast<double>(c)) - 1.0;
    const double stat = diff * diff / static_cast<double>(n);
    return {TestKind::McNemar, stat, 1, chi_square_sf(stat, 1.0), "continuity-corrected chi-square " + counts};
}

TestResult mcnemar(std::span<const int> model_a, std::span<const int> model_b, std::span<const int> labels) {
    const auto d = discordance(model_a, model_b, labels);
    return mcnemar(d.b, d.c);
}

double cohens_kappa(std::span<const std::string> annotator1, std::span<const std::string> annotator2) {
    if (annotator1.size() != annotator2.size()) throw std::invalid_argument("cohens_kappa: length mismatch");
    if (annotator1.empty()) throw std::invalid_argument("cohens_kappa: empty input");
    std::map<std::string, std::pair<std::size_t, std::size_t>> marginals;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < annotator1.size(); ++i) {
        ++marginals[annotator1[i]].first;
        ++marginals[annotator2[i]].second;
        agree += annotator1[i] == annotator2[i];
    }
    const double n = static_cast<double>(annotator1.size());
    const double po = static_cast<double>(agree) / n;
    double pe = 0.0;
    for (const auto& [label, m] : marginals) {
        pe += static_cast<double>(m.first) / n * (static_cast<double>(m.second) / n);
    }
    if (pe >= 1.0) return 1.0;
    return (po - pe) / (1.0 - pe);
}

double cohens_kappa(std::span<const int> annotator1, std::span<const int> annotator2) {
    std::vector<std::string> a, b;
    a.reserve(annotator1.size());
    b.reserve(annotator2.size());
    for (int v : annotator1) a.push_back(std::to_string(v));
    for (int v : annotator2) b.push_back(std::to_string(v));
    return cohens_kappa(std::span<const std::string>(a), std::span<const std::string>(b));
}

KappaSummary average_kappa(const std::vector<KappaDimension>& dimensions) {
    if (dimensions.empty()) throw std::invalid_argument("average_kappa: no dimensions");
    KappaSummary out;
    for (const auto& d : dimensions) {
        const double k = cohens_kappa(std::span<const std::string>(d.annotator1), std::span<const std::string>(d.annotator2));
        out.per_dimension.emplace_back(d.name, k);
        out.average += k;
    }
    out.average /= static_cast<double>(dimensions.size());
    return out;
}

std::string significance_stars(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

std::vector<PortionComparison> mcnemar_portion_matrix(const std::vector<PortionPredictions>& portions,
                                                      const std::vector<std::vector<int>>& labels) {
    for (const auto& p : portions) {
        if (p.folds.size() != labels.size()) {
            throw ValidationError("portion " + p.portion + " has " + std::to_string(p.folds.size()) +
                                  " folds, expected " + std::to_string(labels.size()));
        }
        for (std::size_t f = 0; f < labels.size(); ++f) {
            if (p.folds[f].size() != labels[f].size()) {
                throw ValidationError("portion " + p.portion + " fold " + std::to_string(f) + " has " +
                                      std::to_string(p.folds[f].size()) + " predictions, expected " +
                                      std::to_string(labels[f].size()));
            }
        }
    }
    if (labels.empty()) throw ValidationError("mcnemar_portion_matrix: no folds");

    std::vector<PortionComparison> out;
    for (std::size_t i = 0; i < portions.size(); ++i) {
        for (std::size_t j = i + 1; j < portions.size(); ++j) {
            PortionComparison row{portions[i].portion, portions[j].portion, {}, 0.0, ""};
            for (std::size_t f = 0; f < labels.size(); ++f) {
                row.fold_p.push_back(mcnemar(portions[i].folds[f], portions[j].folds[f], labels[f]).p_value);
            }
            row.mean_p = std::accumulate(row.fold_p.begin(), row.fold_p.end(), 0.0) /
                         static_cast<double>(row.fold_p.size());
            row.stars = significance_stars(row.mean_p);
            out.push_back(std::move(row));
        }
    }
    return out;
}

std::string portion_matrix_csv(const std::vector<PortionComparison>& rows) {
    std::string out = "portion_a,portion_b,mean_p,stars,fold_p\n";
    for (const auto& r : rows) {
        std::string folds;
        for (std::size_t f = 0; f < r.fold_p.size(); ++f) {
            if (f) folds += ';';
            folds += format_double(r.fold_p[f]);
        }
        out += csv_escape(r.portion_a) + ',' + csv_escape(r.portion_b) + ',' + format_double(r.mean_p) + ',' +
               r.stars + ',' + folds + '\n';
    }
    return out;
}

std::string tests_csv(const std::vector<TestRow>& rows) {
    std::string out = std::string(kTestsHeader) + '\n';
    for (const auto& r : rows) {
        out += csv_escape(r.test) + ',' + csv_escape(r.group) + ',' + csv_escape(r.comparison) + ',';
        if (r.result) {
            out += format_double(r.result->statistic) + ',';
            out += r.result->dof ? std::to_string(*r.result->dof) : std::string();
            out += ',' + format_double(r.result->p_value) + ',';
            out += csv_escape(r.note.empty() ? r.result->method_note : r.note);
        } else {
            out += ",,," + csv_escape(r.note);
        }
        out += '\n';
    }
    return out;
}

}  // namespace normstance::stats

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "clir/types.hpp"

namespace clir {

namespace detail {

/// Continued-fraction helper for the regularized incomplete beta function
/// (modified Lentz iteration).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr double kEps = 3e-14;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

/// Regularized incomplete beta I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_continued_fraction(a, b, x) / a;
    return 1.0 - bt * beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// Two-sided p-value of a Student-t statistic with df degrees of freedom:
/// I_{df/(df+t^2)}(df/2, 1/2).
inline double student_t_two_sided_p(double t, double df) {
    if (std::isinf(t)) return 0.0;
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

inline double log2_discount(std::size_t rank) {  // rank is 1-based
    return std::log2(static_cast<double>(rank) + 1.0);
}

}  // namespace detail

/// How relevance grades turn into nDCG gains. Linear (the raw grade) is the
/// trec_eval convention and the default; Exponential is 2^grade - 1.
enum class GainFunction { Linear, Exponential };

namespace detail {

inline double gain_of(int grade, GainFunction gain) {
    if (gain == GainFunction::Linear) return static_cast<double>(grade);
    return std::pow(2.0, static_cast<double>(grade)) - 1.0;
}

}  // namespace detail

/// nDCG@k per judged topic: unjudged docs gain 0, discount log2(rank+1),
/// ideal from the grades sorted descending. Topics with no relevant
/// documents score 0.
inline std::map<std::string, double> ndcg_at_k(const Run& run, const Qrels& qrels,
                                               std::size_t k = 20,
                                               GainFunction gain = GainFunction::Linear) {
    if (k < 1) throw Error("ndcg cutoff must be >= 1");
    std::map<std::string, double> scores;
    for (const auto& [topic, judged] : qrels.judgments()) {
        const auto& entries = run.entries(topic);
        double dcg = 0.0;
        const std::size_t cutoff = std::min(k, entries.size());
        for (std::size_t i = 0; i < cutoff; ++i)
            dcg += detail::gain_of(qrels.grade(topic, entries[i].doc_id), gain) /
                   detail::log2_discount(i + 1);

        std::vector<int> grades;
        grades.reserve(judged.size());
        for (const auto& [doc, grade] : judged)
            if (grade > 0) grades.push_back(grade);
        std::sort(grades.begin(), grades.end(), std::greater<>());
        double idcg = 0.0;
        for (std::size_t i = 0; i < std::min(k, grades.size()); ++i)
            idcg += detail::gain_of(grades[i], gain) / detail::log2_discount(i + 1);

        scores[topic] = idcg > 0.0 ? dcg / idcg : 0.0;
    }
    return scores;
}

/// Recall@k per judged topic: fraction of relevant (grade > 0) documents
/// retrieved in the top k. Topics with no relevant documents score 0.
inline std::map<std::string, double> recall_at_k(const Run& run, const Qrels& qrels,
                                                 std::size_t k = 1000) {
    if (k < 1) throw Error("recall cutoff must be >= 1");
    std::map<std::string, double> scores;
    for (const auto& [topic, judged] : qrels.judgments()) {
        const std::size_t relevant = qrels.relevant_count(topic);
        if (relevant == 0) {
            scores[topic] = 0.0;
            continue;
        }
        const auto& entries = run.entries(topic);
        std::size_t hits = 0;
        for (std::size_t i = 0; i < std::min(k, entries.size()); ++i)
            if (qrels.grade(topic, entries[i].doc_id) > 0) ++hits;
        scores[topic] = static_cast<double>(hits) / static_cast<double>(relevant);
    }
    return scores;
}

/// Average precision per judged topic over the full run depth.
inline std::map<std::string, double> average_precision(const Run& run, const Qrels& qrels) {
    std::map<std::string, double> scores;
    for (const auto& [topic, judged] : qrels.judgments()) {
        const std::size_t relevant = qrels.relevant_count(topic);
        if (relevant == 0) {
            scores[topic] = 0.0;
            continue;
        }
        const auto& entries = run.entries(topic);
        std::size_t hits = 0;
        double sum = 0.0;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (qrels.grade(topic, entries[i].doc_id) > 0) {
                ++hits;
                sum += static_cast<double>(hits) / static_cast<double>(i + 1);
            }
        }
        scores[topic] = sum / static_cast<double>(relevant);
    }
    return scores;
}

struct TopicMetrics {
    double ndcg = 0.0;
    double recall = 0.0;
    double ap = 0.0;
};

struct EvalParams {
    std::size_t ndcg_k = 20;
    std::size_t recall_k = 1000;
    GainFunction gain = GainFunction::Linear;
};

struct EvalReport {
    EvalParams params;
    std::map<std::string, TopicMetrics> topics;  // judged topics only
    TopicMetrics mean;                           // arithmetic mean over judged topics
};

/// Scores a run against qrels. Only topics present in the qrels are scored
/// and averaged; topics missing from the run count as empty rankings.
inline EvalReport evaluate(const Run& run, const Qrels& qrels, EvalParams params = {}) {
    EvalReport report;
    report.params = params;
    const auto ndcg = ndcg_at_k(run, qrels, params.ndcg_k, params.gain);
    const auto recall = recall_at_k(run, qrels, params.recall_k);
    const auto ap = average_precision(run, qrels);
    for (const auto& [topic, value] : ndcg) {
        TopicMetrics m;
        m.ndcg = value;
        m.recall = recall.at(topic);
        m.ap = ap.at(topic);
        report.topics.emplace(topic, m);
    }
    const auto n = static_cast<double>(report.topics.size());
    if (n > 0) {
        for (const auto& [topic, m] : report.topics) {
            report.mean.ndcg += m.ndcg / n;
            report.mean.recall += m.recall / n;
            report.mean.ap += m.ap / n;
        }
    }
    return report;
}

/// TSV report: "metric topic value" per topic plus an "all" aggregate row
/// per metric.
inline void write_eval_report(const EvalReport& report, std::ostream& out) {
    char buf[32];
    auto emit = [&](const std::string& metric, const std::string& topic, double value) {
        std::snprintf(buf, sizeof(buf), "%.4f", value);
        out << metric << '\t' << topic << '\t' << buf << '\n';
    };
    const std::string ndcg_name = "ndcg@" + std::to_string(report.params.ndcg_k);
    const std::string recall_name = "recall@" + std::to_string(report.params.recall_k);
    for (const auto& [topic, m] : report.topics) emit(ndcg_name, topic, m.ndcg);
    emit(ndcg_name, "all", report.mean.ndcg);
    for (const auto& [topic, m] : report.topics) emit(recall_name, topic, m.recall);
    emit(recall_name, "all", report.mean.recall);
    for (const auto& [topic, m] : report.topics) emit("map", topic, m.ap);
    emit("map", "all", report.mean.ap);
}

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
};

/// Two-sided paired t-test over aligned samples. Zero-variance differences
/// give p = 1 when the means agree (identical inputs) and p = 0 otherwise.
inline TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw Error("paired t-test needs equal-length samples");
    const std::size_t n = a.size();
    if (n < 2) throw Error("paired t-test needs at least 2 pairs");

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += (a[i] - b[i]) / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (a[i] - b[i]) - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    TTestResult result;
    if (sd == 0.0) {
        if (mean == 0.0) return {0.0, 1.0};
        result.t = mean > 0 ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
        result.p = 0.0;
        return result;
    }
    result.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    result.p = detail::student_t_two_sided_p(result.t, static_cast<double>(n - 1));
    return result;
}

/// Per-topic overload; the topic sets must match exactly.
inline TTestResult paired_t_test(const std::map<std::string, double>& a,
                                 const std::map<std::string, double>& b) {
    if (a.size() != b.size()) throw Error("paired t-test needs identical topic sets");
    std::vector<double> va, vb;
    va.reserve(a.size());
    vb.reserve(b.size());
    for (const auto& [topic, value] : a) {
        auto it = b.find(topic);
        if (it == b.end()) throw Error("paired t-test needs identical topic sets");
        va.push_back(value);
        vb.push_back(it->second);
    }
    return paired_t_test(va, vb);
}

/// Bonferroni correction: p' = min(1, m * p). m defaults to the number of
/// p-values.
inline std::vector<double> bonferroni(const std::vector<double>& p_values, std::size_t m = 0) {
    if (m == 0) m = p_values.size();
    if (m == 0) throw Error("bonferroni needs at least one p-value");
    std::vector<double> adjusted;
    adjusted.reserve(p_values.size());
    for (double p : p_values) adjusted.push_back(std::min(1.0, static_cast<double>(m) * p));
    return adjusted;
}

}  // namespace clir

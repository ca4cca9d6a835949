#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kgc {

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;

    friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

/// Binary classification metrics at one threshold.
///
/// A sample is predicted positive when score >= threshold. F1 is 0 when
/// precision + recall is 0. AUC and average precision are empty when the labels
/// contain a single class; accuracy and F1 are always present.
struct EvalReport {
    double threshold = 0.5;
    double accuracy = 0.0;
    double f1 = 0.0;
    std::optional<double> auc;
    std::optional<double> average_precision;
    std::vector<RocPoint> roc_points;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

/// Throws ShapeError on length mismatch or labels outside {0, 1}.
EvalReport evaluate(std::span<const double> scores, std::span<const int> labels,
                    double threshold = 0.5);

// The functions below throw DegenerateLabels unless both classes are present.

/// Mann-Whitney statistic from mid-ranks; tied pairs count 1/2.
double auc_rank(std::span<const double> scores, std::span<const int> labels);

/// Step-wise average precision: mean over positives of precision at the
/// positive's rank. Ranks come from a stable sort by descending score, so ties
/// keep their input order.
double average_precision(std::span<const double> scores, std::span<const int> labels);

/// ROC vertices from (0,0) to (1,1). Samples with equal scores form one
/// diagonal segment; collinear interior vertices are dropped.
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels);

double trapezoid_area(std::span<const RocPoint> points);

// ROC export: header `fpr,tpr`, one vertex per line.
void write_roc(std::ostream& out, std::span<const RocPoint> points);

// Report export: `key = value` lines; missing AUC/AP are written as `NA`.
void write_report(std::ostream& out, const EvalReport& report);

struct Prediction {
    std::string id;
    int label = 0;
    double score = 0.0;
};

// Predictions file: header `id,label,score`.
std::vector<Prediction> read_predictions(std::istream& in);
void write_predictions(std::ostream& out, std::span<const Prediction> predictions);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

/// Mean and sample standard deviation (n - 1 denominator; 0 for n = 1).
MeanStd mean_std(std::span<const double> values);

}  // namespace kgc

#include "kgc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>

#include "kgc/error.hpp"
#include "kgc/text.hpp"

namespace kgc {

namespace {

void check_shape(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        fail(ErrorCode::ShapeError, "scores and labels differ in length");
    }
    for (const int y : labels) {
        if (y != 0 && y != 1) fail(ErrorCode::ShapeError, "labels must be 0 or 1");
    }
}

std::pair<std::size_t, std::size_t> count_classes(std::span<const int> labels) {
    const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    return {pos, labels.size() - pos};
}

void require_both_classes(std::span<const int> labels) {
    const auto [pos, neg] = count_classes(labels);
    if (pos == 0 || neg == 0) {
        fail(ErrorCode::DegenerateLabels, "AUC and AP need both positive and negative labels");
    }
}

// Indices by descending score; ties keep input order.
std::vector<std::size_t> rank_descending(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

}  // namespace

double auc_rank(std::span<const double> scores, std::span<const int> labels) {
    check_shape(scores, labels);
    require_both_classes(labels);
    const auto [n_pos, n_neg] = count_classes(labels);

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of mid-ranks (1-based) of the positives. Ranks are half-integers, so
    // the sum is exact.
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) rank_sum += mid_rank;
        }
        i = j;
    }
    const double p = static_cast<double>(n_pos);
    const double u = rank_sum - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(n_neg));
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
    check_shape(scores, labels);
    require_both_classes(labels);
    const auto [n_pos, n_neg] = count_classes(labels);
    const auto order = rank_descending(scores);
    double sum = 0.0;
    std::size_t tp = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (labels[order[k]] == 1) {
            ++tp;
            sum += static_cast<double>(tp) / static_cast<double>(k + 1);
        }
    }
    return sum / static_cast<double>(n_pos);
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
    check_shape(scores, labels);
    require_both_classes(labels);
    const auto [n_pos, n_neg] = count_classes(labels);
    const auto order = rank_descending(scores);

    // Vertices as integer (fp, tp) counts so collinearity tests are exact.
    struct Vertex {
        std::int64_t fp, tp;
    };
    std::vector<Vertex> vertices{{0, 0}};
    std::int64_t fp = 0, tp = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] == 1 ? tp : fp) += 1;
            ++j;
        }
        vertices.push_back({fp, tp});
        i = j;
    }

    std::vector<Vertex> kept;
    for (const Vertex& v : vertices) {
        while (kept.size() >= 2) {
            const Vertex& a = kept[kept.size() - 2];
            const Vertex& b = kept.back();
            const std::int64_t cross = (b.fp - a.fp) * (v.tp - b.tp) - (b.tp - a.tp) * (v.fp - b.fp);
            if (cross != 0) break;
            kept.pop_back();
        }
        kept.push_back(v);
    }

    std::vector<RocPoint> points;
    points.reserve(kept.size());
    for (const Vertex& v : kept) {
        points.push_back({static_cast<double>(v.fp) / static_cast<double>(n_neg),
                          static_cast<double>(v.tp) / static_cast<double>(n_pos)});
    }
    return points;
}

double trapezoid_area(std::span<const RocPoint> points) {
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) * 0.5;
    }
    return area;
}

EvalReport evaluate(std::span<const double> scores, std::span<const int> labels, double threshold) {
    check_shape(scores, labels);
    if (scores.empty()) fail(ErrorCode::EmptyDataset, "nothing to evaluate");
    EvalReport report;
    report.threshold = threshold;
    std::tie(report.n_pos, report.n_neg) = count_classes(labels);

    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] >= threshold;
        if (labels[i] == 1) {
            (predicted ? tp : fn) += 1;
        } else {
            (predicted ? fp : tn) += 1;
        }
    }
    report.accuracy = static_cast<double>(tp + tn) / static_cast<double>(scores.size());
    const double precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    report.f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;

    if (report.n_pos > 0 && report.n_neg > 0) {
        report.auc = auc_rank(scores, labels);
        report.average_precision = average_precision(scores, labels);
        report.roc_points = roc_curve(scores, labels);
    }
    return report;
}

void write_roc(std::ostream& out, std::span<const RocPoint> points) {
    out << "fpr,tpr\n";
    for (const auto& p : points) {
        out << text::format_double(p.fpr) << ',' << text::format_double(p.tpr) << '\n';
    }
}

void write_report(std::ostream& out, const EvalReport& report) {
    const auto opt = [](const std::optional<double>& v) {
        return v ? text::format_double(*v) : std::string("NA");
    };
    out << "threshold = " << text::format_double(report.threshold) << '\n';
    out << "n_pos = " << report.n_pos << '\n';
    out << "n_neg = " << report.n_neg << '\n';
    out << "accuracy = " << text::format_double(report.accuracy) << '\n';
    out << "auc = " << opt(report.auc) << '\n';
    out << "average_precision = " << opt(report.average_precision) << '\n';
    out << "f1 = " << text::format_double(report.f1) << '\n';
}

std::vector<Prediction> read_predictions(std::istream& in) {
    const auto bad = [](std::size_t line_no, const std::string& what) {
        fail(ErrorCode::ManifestParseError, "line " + std::to_string(line_no) + ": " + what);
    };
    std::string line;
    if (!std::getline(in, line) || text::strip_cr(line) != "id,label,score") {
        bad(1, "header must be id,label,score");
    }
    std::vector<Prediction> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = text::strip_cr(line);
        if (row.empty()) continue;
        const auto fields = text::split(row, ',');
        if (fields.size() != 3) bad(line_no, "expected 3 fields");
        Prediction p;
        p.id = std::string(fields[0]);
        if (fields[1] == "0") {
            p.label = 0;
        } else if (fields[1] == "1") {
            p.label = 1;
        } else {
            bad(line_no, "label must be 0 or 1");
        }
        const auto score = text::parse_double(fields[2]);
        if (!score || !std::isfinite(*score)) bad(line_no, "bad score");
        p.score = *score;
        out.push_back(std::move(p));
    }
    return out;
}

void write_predictions(std::ostream& out, std::span<const Prediction> predictions) {
    out << "id,label,score\n";
    for (const auto& p : predictions) {
        out << p.id << ',' << p.label << ',' << text::format_double(p.score) << '\n';
    }
}

MeanStd mean_std(std::span<const double> values) {
    if (values.empty()) return {};
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= n;
    if (values.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace kgc

#include "kgc/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "kgc/error.hpp"
#include "kgc/text.hpp"

namespace kgc {

namespace {

using Counts = std::pair<std::string, std::size_t>;

const Counts kTrainCounts[] = {{"normal", 800}, {"a", 88}, {"b", 340}, {"c", 84},
                               {"d", 11},       {"e", 42}, {"f", 27}};
const Counts kTestCounts[] = {{"normal", 400}, {"a", 10}, {"b", 44}, {"c", 9},
                              {"d", 2},        {"e", 4},  {"f", 4}};

std::string make_id(std::string_view prefix, std::size_t index, std::size_t total) {
    const int width = static_cast<int>(std::to_string(total > 0 ? total - 1 : 0).size());
    char digits[32];
    std::snprintf(digits, sizeof(digits), "%0*zu", width, index);
    return std::string(prefix) + "-" + digits;
}

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
    fail(ErrorCode::ManifestParseError, "line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

void ClassProfile::validate() const {
    if (dimension < 2) fail(ErrorCode::ProfileError, "dimension must be >= 2");
    if (!(noise_sigma > 0.0) || !std::isfinite(noise_sigma)) {
        fail(ErrorCode::ProfileError, "noise sigma must be finite and > 0");
    }
    std::set<std::string, std::less<>> seen;
    std::size_t normals = 0;
    std::size_t fractures = 0;
    for (const auto& cls : classes) {
        if (cls.fine_label.empty()) fail(ErrorCode::ProfileError, "empty fine label");
        if (!seen.insert(cls.fine_label).second) {
            fail(ErrorCode::ProfileError, "duplicate class '" + cls.fine_label + "'");
        }
        if (!std::isfinite(cls.margin) || cls.margin < 0.0) {
            fail(ErrorCode::ProfileError, "margin of '" + cls.fine_label + "' must be >= 0");
        }
        (cls.fine_label == kNormalLabel ? normals : fractures) += cls.count;
    }
    if (normals == 0 || fractures == 0) {
        fail(ErrorCode::ProfileError, "profile needs both normal and fracture samples");
    }
}

std::size_t ClassProfile::total() const noexcept {
    std::size_t n = 0;
    for (const auto& cls : classes) n += cls.count;
    return n;
}

ClassProfile ClassProfile::from_scores(std::span<const std::pair<std::string, std::size_t>> counts,
                                       const ScoreTable& scores, double max_margin,
                                       double normal_margin, double noise_sigma,
                                       std::size_t dimension) {
    ClassProfile profile;
    profile.noise_sigma = noise_sigma;
    profile.dimension = dimension;
    for (const auto& [label, count] : counts) {
        const double margin = label == kNormalLabel
                                  ? normal_margin
                                  : static_cast<double>(scores.score(label)) / 100.0 * max_margin;
        profile.classes.push_back({label, count, margin});
    }
    profile.validate();
    return profile;
}

ClassProfile ClassProfile::default_train(const ScoreTable& scores) {
    return from_scores(kTrainCounts, scores);
}

ClassProfile ClassProfile::default_test(const ScoreTable& scores) {
    return from_scores(kTestCounts, scores);
}

std::vector<SampleRecord> generate(const ClassProfile& profile, const SeedSpec& seed,
                                   StreamTag tag, std::string_view id_prefix) {
    profile.validate();
    const std::size_t total = profile.total();
    std::vector<SampleRecord> records;
    records.reserve(total);
    for (std::size_t c = 0; c < profile.classes.size(); ++c) {
        const ClassSpec& cls = profile.classes[c];
        const bool is_normal = cls.fine_label == kNormalLabel;
        const double centre = is_normal ? -cls.margin : cls.margin;
        Stream stream = seed.stream(tag, c);
        for (std::size_t k = 0; k < cls.count; ++k) {
            SampleRecord rec;
            rec.id = make_id(id_prefix, records.size(), total);
            rec.label = is_normal ? 0 : 1;
            rec.fine_label = cls.fine_label;
            rec.features.resize(profile.dimension);
            for (double& x : rec.features) x = profile.noise_sigma * stream.normal();
            rec.features[0] += centre;
            records.push_back(std::move(rec));
        }
    }
    return records;
}

void validate_records(std::span<const SampleRecord> records, const ScoreTable& scores) {
    std::set<std::string_view> ids;
    const std::size_t dim = records.empty() ? 0 : records.front().features.size();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const SampleRecord& r = records[i];
        const auto where = "record " + std::to_string(i) + " ('" + r.id + "'): ";
        if (!scores.contains(r.fine_label)) fail(ErrorCode::UnknownFineLabel, r.fine_label);
        if (r.label != 0 && r.label != 1) fail(ErrorCode::ManifestParseError, where + "y must be 0 or 1");
        if ((r.label == 0) != (r.fine_label == kNormalLabel)) {
            fail(ErrorCode::ManifestParseError, where + "y = 0 must coincide with f = normal");
        }
        if (!ids.insert(r.id).second) fail(ErrorCode::ManifestParseError, where + "duplicate id");
        if (r.features.size() != dim) {
            fail(ErrorCode::ManifestParseError, where + "inconsistent feature dimension");
        }
    }
}

void write_manifest(std::ostream& out, std::span<const SampleRecord> records) {
    const std::size_t dim = records.empty() ? 0 : records.front().features.size();
    out << "id,y,f";
    for (std::size_t k = 0; k < dim; ++k) out << ",x" << k;
    out << '\n';
    for (const auto& r : records) {
        if (r.features.size() != dim) fail(ErrorCode::ShapeError, "inconsistent feature dimension");
        out << r.id << ',' << r.label << ',' << r.fine_label;
        for (const double x : r.features) out << ',' << text::format_double(x);
        out << '\n';
    }
}

void write_manifest(const std::filesystem::path& path, std::span<const SampleRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
    write_manifest(out, records);
}

std::vector<SampleRecord> read_manifest(std::istream& in, const ScoreTable& scores) {
    std::string line;
    if (!std::getline(in, line)) parse_error(1, "missing header");
    const auto header = text::split(text::strip_cr(line), ',');
    if (header.size() < 3 || header[0] != "id" || header[1] != "y" || header[2] != "f") {
        parse_error(1, "header must start with id,y,f");
    }
    const std::size_t dim = header.size() - 3;
    for (std::size_t k = 0; k < dim; ++k) {
        if (header[3 + k] != "x" + std::to_string(k)) {
            parse_error(1, "expected column x" + std::to_string(k));
        }
    }

    std::vector<SampleRecord> records;
    std::set<std::string, std::less<>> ids;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view row = text::strip_cr(line);
        if (row.empty()) continue;
        const auto fields = text::split(row, ',');
        if (fields.size() != header.size()) {
            parse_error(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        }
        SampleRecord rec;
        rec.id = std::string(fields[0]);
        if (rec.id.empty()) parse_error(line_no, "empty id");
        if (fields[1] == "0") {
            rec.label = 0;
        } else if (fields[1] == "1") {
            rec.label = 1;
        } else {
            parse_error(line_no, "y must be 0 or 1");
        }
        rec.fine_label = std::string(fields[2]);
        if (!scores.contains(rec.fine_label)) {
            fail(ErrorCode::UnknownFineLabel,
                 rec.fine_label + " (line " + std::to_string(line_no) + ")");
        }
        if ((rec.label == 0) != (rec.fine_label == kNormalLabel)) {
            parse_error(line_no, "y = 0 must coincide with f = normal");
        }
        if (!ids.insert(rec.id).second) parse_error(line_no, "duplicate id '" + rec.id + "'");
        rec.features.reserve(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            const auto value = text::parse_double(fields[3 + k]);
            if (!value || !std::isfinite(*value)) {
                parse_error(line_no, "bad feature value '" + std::string(fields[3 + k]) + "'");
            }
            rec.features.push_back(*value);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<SampleRecord> read_manifest(const std::filesystem::path& path,
                                        const ScoreTable& scores) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open manifest " + path.string());
    return read_manifest(in, scores);
}

std::vector<std::string> fine_labels_of(std::span<const SampleRecord> records) {
    std::vector<std::string> labels;
    labels.reserve(records.size());
    for (const auto& r : records) labels.push_back(r.fine_label);
    return labels;
}

}  // namespace kgc

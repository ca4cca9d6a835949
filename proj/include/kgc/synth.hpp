#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgc/random.hpp"
#include "kgc/schedule.hpp"

namespace kgc {

inline constexpr std::string_view kNormalLabel = "normal";

/// One training or test sample. `label` is 0 exactly when `fine_label` is normal.
struct SampleRecord {
    std::string id;
    int label = 0;
    std::string fine_label;
    std::vector<double> features;

    friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct ClassSpec {
    std::string fine_label;
    std::size_t count = 0;
    // Distance of the class mean from the origin along the first axis. Normal
    // samples sit on the negative side, every fracture subtype on the positive side.
    double margin = 0.0;
};

/// Class structure of a synthetic split.
///
/// Difficulty transfers to feature space as distance from the decision
/// boundary: a subtype with score s is centred at +(s/100) * max_margin on the
/// first axis, the normal class at -normal_margin, all with isotropic noise.
/// Higher-scored (easier) subtypes are therefore easier to separate.
struct ClassProfile {
    std::vector<ClassSpec> classes;
    double noise_sigma = 1.0;
    std::size_t dimension = 16;

    /// Throws ProfileError.
    void validate() const;
    std::size_t total() const noexcept;

    static constexpr double kDefaultMaxMargin = 2.0;
    static constexpr double kDefaultNormalMargin = 1.0;

    /// Counts per fine label, margins derived from the score table. Labels are
    /// laid out in `counts` order.
    static ClassProfile from_scores(std::span<const std::pair<std::string, std::size_t>> counts,
                                    const ScoreTable& scores,
                                    double max_margin = kDefaultMaxMargin,
                                    double normal_margin = kDefaultNormalMargin,
                                    double noise_sigma = 1.0, std::size_t dimension = 16);

    /// 800/88/340/84/11/42/27 (N = 1392, 592 fractures).
    static ClassProfile default_train(const ScoreTable& scores = ScoreTable::defaults());
    /// 400/10/44/9/2/4/4 (N = 473, 73 fractures).
    static ClassProfile default_test(const ScoreTable& scores = ScoreTable::defaults());
};

/// Draws every class with its own stream, seed.stream(tag, class_index), and
/// concatenates them in profile order. Ids are `<prefix>-<index>`, zero padded.
std::vector<SampleRecord> generate(const ClassProfile& profile, const SeedSpec& seed,
                                   StreamTag tag = StreamTag::TrainData,
                                   std::string_view id_prefix = "train");

/// Checks label consistency, known fine labels, unique ids and a common
/// feature dimension. Throws ManifestParseError / UnknownFineLabel.
void validate_records(std::span<const SampleRecord> records, const ScoreTable& scores);

// Manifest: CSV with header `id,y,f,x0,...,x{d-1}`, LF line endings. Reals
// use the shortest round-trip representation.
void write_manifest(std::ostream& out, std::span<const SampleRecord> records);
void write_manifest(const std::filesystem::path& path, std::span<const SampleRecord> records);

/// Malformed rows raise ManifestParseError naming the line; labels missing
/// from `scores` raise UnknownFineLabel.
std::vector<SampleRecord> read_manifest(std::istream& in, const ScoreTable& scores);
std::vector<SampleRecord> read_manifest(const std::filesystem::path& path,
                                        const ScoreTable& scores);

std::vector<std::string> fine_labels_of(std::span<const SampleRecord> records);

}  // namespace kgc

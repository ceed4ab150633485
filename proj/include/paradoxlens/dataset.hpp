#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace paradoxlens {

// The three measured/derived columns of a record. Group membership is a
// separate binary label.
enum class Variable { w_initial, w_final, gain };

std::string variable_name(Variable v);

struct Observation {
    std::string subject_id;
    int group = 0;          // 0 or 1
    double w_initial = 0.0;
    double w_final = 0.0;
    double gain = 0.0;      // always recomputed as w_final - w_initial

    double value(Variable v) const;
};

// Immutable collection of observations. Construction recomputes every gain,
// checks measurement finiteness, group labels and subject-id uniqueness.
class Dataset {
public:
    Dataset() = default;
    static Dataset from_observations(std::vector<Observation> observations);

    const std::vector<Observation>& observations() const { return observations_; }
    std::size_t size() const { return observations_.size(); }
    bool empty() const { return observations_.empty(); }
    int group_count(int group) const { return group == 0 ? count0_ : count1_; }

    std::vector<double> values(Variable v) const;
    std::vector<double> values(Variable v, int group) const;
    std::vector<double> group_indicator() const;   // 1.0 where group == 1

    // Hash of all rows; ties fits made on the same data together.
    std::uint64_t fingerprint() const { return fingerprint_; }

    bool operator==(const Dataset& other) const;

private:
    std::vector<Observation> observations_;
    int count0_ = 0;
    int count1_ = 0;
    std::uint64_t fingerprint_ = 0;
};

// Throws ValidationError unless both groups are nonempty.
void require_both_groups(const Dataset& ds, const std::string& operation);

struct CsvSchema {
    std::string id = "id";
    std::string group = "sex";
    std::string initial = "w_initial";
    std::string final = "w_final";
};

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
Dataset load_csv_text(const std::string& text, const CsvSchema& schema = {});
void save_csv(const Dataset& ds, const std::filesystem::path& path, const CsvSchema& schema = {});
std::string to_csv_text(const Dataset& ds, const CsvSchema& schema = {});

// Covariate binning, always on the pooled w_initial distribution so a bin
// index means the same subgroup in both groups.
struct BinningSpec {
    enum class Strategy { fixed_width, quantile, explicit_edges };

    Strategy strategy = Strategy::quantile;
    int bin_count = 1;               // fixed_width / quantile
    std::vector<double> edges;       // explicit_edges only

    static BinningSpec fixed_width(int k);
    static BinningSpec quantile(int k);
    static BinningSpec explicit_edges(std::vector<double> edges);

    void validate() const;
};

// Heuristic default: quantile bins, k = max(2, floor(sqrt(n)/2)), capped so
// the expected per-group bin occupancy stays >= 5.
BinningSpec default_binning(const Dataset& ds);

struct BinAssignment {
    std::vector<int> bin_of;       // per observation, in [0, bin_count)
    std::vector<double> edges;     // bin_count + 1 ascending edges
    int bin_count() const { return static_cast<int>(edges.size()) - 1; }
    std::vector<double> centers() const;
    std::vector<int> sizes() const;
};

// Intervals are left-closed right-open; the last interval is closed.
BinAssignment assign_bins(const Dataset& ds, const BinningSpec& spec);

struct OverlapReport {
    double group0_min = 0.0, group0_max = 0.0;
    double group1_min = 0.0, group1_max = 0.0;
    bool intersection_empty = false;
    double intersection_min = 0.0, intersection_max = 0.0;
    double fraction0_inside = 0.0;   // share of group 0 inside the intersection
    double fraction1_inside = 0.0;
    bool extrapolation_required = false;
};

// Range overlap of w_initial between the groups. Comparisons outside the
// intersection extrapolate beyond the common support.
OverlapReport support_overlap(const Dataset& ds);

} // namespace paradoxlens

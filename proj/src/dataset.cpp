#include "paradoxlens/dataset.hpp"

#include "paradoxlens/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace paradoxlens {

namespace {

std::uint64_t fnv1a(std::uint64_t hash, const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t hash_rows(const std::vector<Observation>& rows) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& obs : rows) {
        h = fnv1a(h, obs.subject_id.data(), obs.subject_id.size());
        h = fnv1a(h, &obs.group, sizeof(obs.group));
        h = fnv1a(h, &obs.w_initial, sizeof(double));
        h = fnv1a(h, &obs.w_final, sizeof(double));
    }
    return h;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

// One CSV record; handles double-quoted fields and embedded commas.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    if (quoted) {
        throw ParseError("line " + std::to_string(line_no) + ": unterminated quoted field");
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_measurement(const std::string& raw, const std::string& column, std::size_t line_no) {
    const std::string text = trim(raw);
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty()) {
        throw ParseError("line " + std::to_string(line_no) + ": column '" + column +
                         "' value '" + raw + "' is not numeric");
    }
    if (!std::isfinite(value)) {
        throw ParseError("line " + std::to_string(line_no) + ": column '" + column +
                         "' value '" + raw + "' is not finite");
    }
    return value;
}

int parse_group(const std::string& raw, std::size_t line_no) {
    const std::string text = trim(raw);
    if (text == "0") return 0;
    if (text == "1") return 1;
    throw ValidationError("line " + std::to_string(line_no) + ": group value '" + raw +
                          "' is outside {0,1}");
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

std::string variable_name(Variable v) {
    switch (v) {
        case Variable::w_initial: return "w_initial";
        case Variable::w_final: return "w_final";
        case Variable::gain: return "gain";
    }
    return "?";
}

double Observation::value(Variable v) const {
    switch (v) {
        case Variable::w_initial: return w_initial;
        case Variable::w_final: return w_final;
        case Variable::gain: return gain;
    }
    return 0.0;
}

Dataset Dataset::from_observations(std::vector<Observation> observations) {
    Dataset ds;
    std::unordered_set<std::string> seen;
    seen.reserve(observations.size());
    for (auto& obs : observations) {
        if (!std::isfinite(obs.w_initial) || !std::isfinite(obs.w_final)) {
            throw ValidationError("subject '" + obs.subject_id + "': non-finite measurement");
        }
        if (obs.group != 0 && obs.group != 1) {
            throw ValidationError("subject '" + obs.subject_id + "': group label " +
                                  std::to_string(obs.group) + " is outside {0,1}");
        }
        if (!seen.insert(obs.subject_id).second) {
            throw ValidationError("duplicate subject_id '" + obs.subject_id + "'");
        }
        obs.gain = obs.w_final - obs.w_initial;
        if (obs.group == 0) ++ds.count0_;
        else ++ds.count1_;
    }
    ds.observations_ = std::move(observations);
    ds.fingerprint_ = hash_rows(ds.observations_);
    return ds;
}

std::vector<double> Dataset::values(Variable v) const {
    std::vector<double> out;
    out.reserve(observations_.size());
    for (const auto& obs : observations_) out.push_back(obs.value(v));
    return out;
}

std::vector<double> Dataset::values(Variable v, int group) const {
    std::vector<double> out;
    for (const auto& obs : observations_) {
        if (obs.group == group) out.push_back(obs.value(v));
    }
    return out;
}

std::vector<double> Dataset::group_indicator() const {
    std::vector<double> out;
    out.reserve(observations_.size());
    for (const auto& obs : observations_) out.push_back(obs.group == 1 ? 1.0 : 0.0);
    return out;
}

bool Dataset::operator==(const Dataset& other) const {
    if (observations_.size() != other.observations_.size()) return false;
    for (std::size_t i = 0; i < observations_.size(); ++i) {
        const auto& a = observations_[i];
        const auto& b = other.observations_[i];
        if (a.subject_id != b.subject_id || a.group != b.group ||
            a.w_initial != b.w_initial || a.w_final != b.w_final || a.gain != b.gain) {
            return false;
        }
    }
    return true;
}

void require_both_groups(const Dataset& ds, const std::string& operation) {
    if (ds.group_count(0) == 0 || ds.group_count(1) == 0) {
        throw ValidationError(operation + ": both groups must be nonempty (group 0: " +
                              std::to_string(ds.group_count(0)) + ", group 1: " +
                              std::to_string(ds.group_count(1)) + ")");
    }
}

Dataset load_csv_text(const std::string& text, const CsvSchema& schema) {
    std::istringstream stream(text);
    std::string line;
    if (!std::getline(stream, line)) {
        throw SchemaError("empty input: missing header row");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_csv_line(line, 1);
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) index[trim(header[i])] = i;

    auto column = [&](const std::string& name) {
        auto it = index.find(name);
        if (it == index.end()) {
            throw SchemaError("missing column '" + name + "' in header");
        }
        return it->second;
    };
    const std::size_t id_col = column(schema.id);
    const std::size_t group_col = column(schema.group);
    const std::size_t initial_col = column(schema.initial);
    const std::size_t final_col = column(schema.final);

    std::vector<Observation> rows;
    std::size_t line_no = 1;
    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line, line_no);
        const std::size_t needed = std::max({id_col, group_col, initial_col, final_col});
        if (fields.size() <= needed) {
            throw ParseError("line " + std::to_string(line_no) + ": expected at least " +
                             std::to_string(needed + 1) + " fields, got " +
                             std::to_string(fields.size()));
        }
        Observation obs;
        obs.subject_id = trim(fields[id_col]);
        obs.group = parse_group(fields[group_col], line_no);
        obs.w_initial = parse_measurement(fields[initial_col], schema.initial, line_no);
        obs.w_final = parse_measurement(fields[final_col], schema.final, line_no);
        rows.push_back(std::move(obs));
    }
    return Dataset::from_observations(std::move(rows));
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_csv_text(buffer.str(), schema);
}

std::string to_csv_text(const Dataset& ds, const CsvSchema& schema) {
    std::string out = schema.id + "," + schema.group + "," + schema.initial + "," + schema.final + "\n";
    for (const auto& obs : ds.observations()) {
        out += quote_if_needed(obs.subject_id);
        out += ',';
        out += obs.group == 1 ? '1' : '0';
        out += ',';
        out += format_double(obs.w_initial);
        out += ',';
        out += format_double(obs.w_final);
        out += '\n';
    }
    return out;
}

void save_csv(const Dataset& ds, const std::filesystem::path& path, const CsvSchema& schema) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << to_csv_text(ds, schema);
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

BinningSpec BinningSpec::fixed_width(int k) {
    BinningSpec spec;
    spec.strategy = Strategy::fixed_width;
    spec.bin_count = k;
    spec.validate();
    return spec;
}

BinningSpec BinningSpec::quantile(int k) {
    BinningSpec spec;
    spec.strategy = Strategy::quantile;
    spec.bin_count = k;
    spec.validate();
    return spec;
}

BinningSpec BinningSpec::explicit_edges(std::vector<double> edges) {
    BinningSpec spec;
    spec.strategy = Strategy::explicit_edges;
    spec.edges = std::move(edges);
    spec.bin_count = static_cast<int>(spec.edges.size()) - 1;
    spec.validate();
    return spec;
}

void BinningSpec::validate() const {
    if (strategy == Strategy::explicit_edges) {
        if (edges.size() < 2) {
            throw ConfigError("explicit binning needs at least two edges");
        }
        for (std::size_t i = 1; i < edges.size(); ++i) {
            if (!(edges[i] > edges[i - 1])) {
                throw ConfigError("explicit bin edges must be strictly increasing");
            }
        }
    } else if (bin_count < 1) {
        throw ConfigError("bin count must be >= 1");
    }
}

BinningSpec default_binning(const Dataset& ds) {
    const int n = static_cast<int>(ds.size());
    const int smaller_group = std::min(ds.group_count(0), ds.group_count(1));
    int k = std::max(2, static_cast<int>(std::floor(std::sqrt(static_cast<double>(n)) / 2.0)));
    const int cap = std::max(1, smaller_group / 5);
    k = std::min(k, cap);
    k = std::max(k, 1);
    return BinningSpec::quantile(k);
}

namespace {

// Type-7 quantile (linear interpolation) of sorted values.
double quantile_of_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

} // namespace

std::vector<double> BinAssignment::centers() const {
    std::vector<double> out;
    out.reserve(edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        out.push_back(0.5 * (edges[i] + edges[i + 1]));
    }
    return out;
}

std::vector<int> BinAssignment::sizes() const {
    std::vector<int> out(static_cast<std::size_t>(bin_count()), 0);
    for (int b : bin_of) ++out[static_cast<std::size_t>(b)];
    return out;
}

BinAssignment assign_bins(const Dataset& ds, const BinningSpec& spec) {
    spec.validate();
    if (ds.empty()) {
        throw ValidationError("assign_bins: dataset is empty");
    }
    const auto pooled = ds.values(Variable::w_initial);
    const auto [min_it, max_it] = std::minmax_element(pooled.begin(), pooled.end());
    const double lo = *min_it;
    const double hi = *max_it;

    std::vector<double> edges;
    switch (spec.strategy) {
        case BinningSpec::Strategy::fixed_width: {
            const int k = (hi == lo) ? 1 : spec.bin_count;
            edges.reserve(static_cast<std::size_t>(k) + 1);
            for (int i = 0; i <= k; ++i) {
                edges.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k));
            }
            break;
        }
        case BinningSpec::Strategy::quantile: {
            std::vector<double> sorted = pooled;
            std::sort(sorted.begin(), sorted.end());
            edges.push_back(lo);
            for (int i = 1; i < spec.bin_count; ++i) {
                edges.push_back(quantile_of_sorted(sorted, static_cast<double>(i) /
                                                               static_cast<double>(spec.bin_count)));
            }
            edges.push_back(hi);
            // ties can collapse interior edges; keep strictly increasing ones
            std::vector<double> unique_edges;
            for (double e : edges) {
                if (unique_edges.empty() || e > unique_edges.back()) unique_edges.push_back(e);
            }
            if (unique_edges.size() < 2) unique_edges = {lo, hi == lo ? lo : hi};
            if (unique_edges.size() < 2) unique_edges = {lo, lo};
            edges = std::move(unique_edges);
            break;
        }
        case BinningSpec::Strategy::explicit_edges: {
            edges = spec.edges;
            std::vector<double> uncovered;
            for (double v : pooled) {
                if (v < edges.front() || v > edges.back()) uncovered.push_back(v);
            }
            if (!uncovered.empty()) {
                std::string msg = "explicit edges [" + std::to_string(edges.front()) + ", " +
                                  std::to_string(edges.back()) + "] do not cover values:";
                const std::size_t shown = std::min<std::size_t>(uncovered.size(), 8);
                for (std::size_t i = 0; i < shown; ++i) {
                    msg += " " + std::to_string(uncovered[i]);
                }
                if (uncovered.size() > shown) msg += " ...";
                throw CoverageError(msg);
            }
            break;
        }
    }

    BinAssignment assignment;
    assignment.edges = edges;
    assignment.bin_of.reserve(ds.size());
    const int bins = assignment.bin_count();
    for (double v : pooled) {
        // left-closed right-open; the last interval is closed
        int idx = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin()) - 1;
        if (idx < 0) idx = 0;
        if (idx >= bins) idx = bins - 1;
        assignment.bin_of.push_back(idx);
    }
    return assignment;
}

OverlapReport support_overlap(const Dataset& ds) {
    require_both_groups(ds, "support_overlap");
    OverlapReport report;
    const auto g0 = ds.values(Variable::w_initial, 0);
    const auto g1 = ds.values(Variable::w_initial, 1);
    const auto [min0, max0] = std::minmax_element(g0.begin(), g0.end());
    const auto [min1, max1] = std::minmax_element(g1.begin(), g1.end());
    report.group0_min = *min0;
    report.group0_max = *max0;
    report.group1_min = *min1;
    report.group1_max = *max1;
    report.intersection_min = std::max(report.group0_min, report.group1_min);
    report.intersection_max = std::min(report.group0_max, report.group1_max);
    report.intersection_empty = report.intersection_min > report.intersection_max;

    auto inside_fraction = [&](const std::vector<double>& values) {
        if (report.intersection_empty) return 0.0;
        std::size_t inside = 0;
        for (double v : values) {
            if (v >= report.intersection_min && v <= report.intersection_max) ++inside;
        }
        return static_cast<double>(inside) / static_cast<double>(values.size());
    };
    report.fraction0_inside = inside_fraction(g0);
    report.fraction1_inside = inside_fraction(g1);
    report.extrapolation_required =
        report.intersection_empty || report.fraction0_inside < 1.0 || report.fraction1_inside < 1.0;
    return report;
}

} // namespace paradoxlens

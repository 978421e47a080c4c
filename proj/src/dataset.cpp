#include "whsboost/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "whsboost/rng.hpp"

namespace whsboost {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc{} && res.ptr == e && std::isfinite(out);
}

// Minimal RFC-4180 reader: quoted fields, "" escapes, CRLF tolerant.
std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot read CSV file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += ch;
            }
            continue;
        }
        switch (ch) {
            case '"': quoted = true; any = true; break;
            case ',': row.push_back(cell); cell.clear(); any = true; break;
            case '\r': break;
            case '\n':
                if (any || !cell.empty() || !row.empty()) {
                    row.push_back(cell);
                    rows.push_back(std::move(row));
                }
                row.clear();
                cell.clear();
                any = false;
                break;
            default: cell += ch; any = true; break;
        }
    }
    if (quoted) fail("unterminated quote in CSV file: " + path);
    if (any || !cell.empty() || !row.empty()) {
        row.push_back(cell);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void FeatureSchema::validate() const {
    if (features.empty()) fail("schema has no features");
    if (label_column.empty()) fail("schema has no label column");
    std::set<std::string> names;
    for (const auto& f : features) {
        if (f.name.empty()) fail("schema has an unnamed feature");
        if (!names.insert(f.name).second) fail("duplicate feature name: " + f.name);
        if (f.name == label_column) fail("feature shares the label column name: " + f.name);
        std::set<std::string> vocab(f.vocabulary.begin(), f.vocabulary.end());
        if (vocab.size() != f.vocabulary.size())
            fail("duplicate vocabulary entry in feature: " + f.name);
        if (f.kind == FeatureKind::continuous && !f.vocabulary.empty())
            fail("continuous feature carries a vocabulary: " + f.name);
    }
}

void Dataset::append_row(std::span<const double> x, int label) {
    if (x.size() != n_features()) fail("append_row: width mismatch");
    values.insert(values.end(), x.begin(), x.end());
    labels.push_back(label);
}

std::size_t Dataset::count_label(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

void Dataset::validate() const {
    schema.validate();
    if (values.size() != n_rows() * n_features()) fail("dataset storage size mismatch");
    for (int y : labels)
        if (y != 1 && y != -1) fail("dataset label outside {+1,-1}");
    for (std::size_t i = 0; i < n_rows(); ++i) {
        for (std::size_t j = 0; j < n_features(); ++j) {
            double v = at(i, j);
            if (!std::isfinite(v)) fail("non-finite value in dataset");
            if (schema.features[j].kind == FeatureKind::categorical) {
                auto idx = static_cast<long long>(v);
                if (v != static_cast<double>(idx) || idx < 0 ||
                    idx >= static_cast<long long>(schema.features[j].vocabulary.size()))
                    fail("categorical index out of vocabulary range in feature: " +
                         schema.features[j].name);
            }
        }
    }
}

Dataset subset_rows(const Dataset& data, std::span<const std::size_t> rows) {
    Dataset out;
    out.schema = data.schema;
    out.values.reserve(rows.size() * data.n_features());
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) {
        auto x = data.row(r);
        out.values.insert(out.values.end(), x.begin(), x.end());
        out.labels.push_back(data.labels[r]);
    }
    return out;
}

WeightVector::WeightVector(std::vector<double> values) : v_(std::move(values)) {
    if (v_.empty()) fail("empty weight vector");
    double sum = 0;
    for (double w : v_) {
        if (!(w >= 0)) fail("negative or non-finite weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail("weights sum to " + format_double(sum) + ", expected 1");
}

WeightVector WeightVector::uniform(std::size_t n) {
    if (n == 0) fail("empty weight vector");
    return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

WeightVector WeightVector::renormalized(std::vector<double> raw) {
    double sum = 0;
    for (double w : raw) {
        if (!(w >= 0)) fail("negative or non-finite weight");
        sum += w;
    }
    if (sum <= 0) fail("weight vector has zero mass");
    for (double& w : raw) w /= sum;
    return WeightVector(std::move(raw));
}

FeatureSchema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot read schema file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail("invalid schema JSON in " + path + ": " + e.what());
    }
    return schema_from_json(j);
}

FeatureSchema schema_from_json(const nlohmann::json& j) {
    FeatureSchema schema;
    schema.label_column = j.value("label_column", std::string("label"));
    if (!j.contains("features") || !j["features"].is_array())
        fail("schema missing features array");
    for (const auto& jf : j["features"]) {
        FeatureSpec f;
        f.name = jf.at("name").get<std::string>();
        std::string kind = jf.value("kind", std::string("continuous"));
        if (kind == "continuous") {
            f.kind = FeatureKind::continuous;
        } else if (kind == "categorical") {
            f.kind = FeatureKind::categorical;
        } else {
            fail("unknown feature kind in schema: " + kind);
        }
        if (jf.contains("vocabulary")) {
            f.vocabulary = jf["vocabulary"].get<std::vector<std::string>>();
            f.closed_vocabulary = jf.value("closed", true);
        } else {
            f.closed_vocabulary = jf.value("closed", false);
        }
        schema.features.push_back(std::move(f));
    }
    schema.validate();
    return schema;
}

nlohmann::json schema_to_json(const FeatureSchema& schema) {
    nlohmann::json j;
    j["label_column"] = schema.label_column;
    j["features"] = nlohmann::json::array();
    for (const auto& f : schema.features) {
        nlohmann::json jf;
        jf["name"] = f.name;
        jf["kind"] = f.kind == FeatureKind::continuous ? "continuous" : "categorical";
        if (f.kind == FeatureKind::categorical) {
            jf["vocabulary"] = f.vocabulary;
            jf["closed"] = f.closed_vocabulary;
        }
        j["features"].push_back(std::move(jf));
    }
    return j;
}

void save_schema(const FeatureSchema& schema, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("cannot write schema file: " + path);
    out << schema_to_json(schema).dump(2) << "\n";
}

Dataset load_csv_dataset(const std::string& csv_path, const std::string& schema_path) {
    FeatureSchema schema = load_schema(schema_path);
    auto rows = read_csv(csv_path);
    if (rows.empty()) fail("empty CSV file: " + csv_path);

    const auto& header = rows.front();
    std::vector<std::size_t> col_of(schema.features.size());
    std::size_t label_col = header.size();
    for (std::size_t j = 0; j < schema.features.size(); ++j) {
        auto it = std::find(header.begin(), header.end(), schema.features[j].name);
        if (it == header.end())
            fail("CSV header missing schema column '" + schema.features[j].name + "': " + csv_path);
        col_of[j] = static_cast<std::size_t>(it - header.begin());
    }
    {
        auto it = std::find(header.begin(), header.end(), schema.label_column);
        if (it == header.end())
            fail("CSV header missing label column '" + schema.label_column + "': " + csv_path);
        label_col = static_cast<std::size_t>(it - header.begin());
    }

    const std::size_t n = rows.size() - 1;
    if (n == 0) fail("CSV has a header but no data rows: " + csv_path);
    const std::size_t m = schema.features.size();

    // Pass 1: parse cells (missing -> NaN), grow open vocabularies in
    // first-appearance order, collect label strings.
    std::vector<double> cells(n * m, kMissing);
    std::vector<std::string> raw_labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = rows[i + 1];
        if (r.size() != header.size())
            fail("CSV row " + std::to_string(i + 2) + " has " + std::to_string(r.size()) +
                 " cells, header has " + std::to_string(header.size()) + ": " + csv_path);
        for (std::size_t j = 0; j < m; ++j) {
            const std::string& cell = r[col_of[j]];
            if (cell.empty()) continue;  // missing
            auto& f = schema.features[j];
            if (f.kind == FeatureKind::continuous) {
                double v;
                if (!parse_double(cell, v))
                    fail("non-numeric value '" + cell + "' in continuous column '" + f.name +
                         "', row " + std::to_string(i + 2));
                cells[i * m + j] = v;
            } else {
                auto it = std::find(f.vocabulary.begin(), f.vocabulary.end(), cell);
                if (it == f.vocabulary.end()) {
                    if (f.closed_vocabulary)
                        fail("value '" + cell + "' not in closed vocabulary of '" + f.name +
                             "', row " + std::to_string(i + 2));
                    f.vocabulary.push_back(cell);
                    it = f.vocabulary.end() - 1;
                }
                cells[i * m + j] = static_cast<double>(it - f.vocabulary.begin());
            }
        }
        if (r[label_col].empty())
            fail("missing label in row " + std::to_string(i + 2) + ": " + csv_path);
        raw_labels[i] = r[label_col];
    }

    // Label mapping: two distinct values required; literal +1/-1 encodings
    // keep their sign, anything else maps the rarer value to +1.
    std::map<std::string, std::size_t> label_counts;
    for (const auto& s : raw_labels) ++label_counts[s];
    if (label_counts.size() != 2)
        fail("label column has " + std::to_string(label_counts.size()) +
             " distinct values, expected 2: " + csv_path);
    auto first = label_counts.begin();
    auto second = std::next(first);
    std::string positive_value;
    long long v1, v2;
    auto as_int = [](const std::string& s, long long& out) {
        const char* b = s.data();
        if (!s.empty() && s[0] == '+') ++b;
        auto res = std::from_chars(b, s.data() + s.size(), out);
        return res.ec == std::errc{} && res.ptr == s.data() + s.size();
    };
    if (as_int(first->first, v1) && as_int(second->first, v2) &&
        ((v1 == 1 && v2 == -1) || (v1 == -1 && v2 == 1))) {
        positive_value = v1 == 1 ? first->first : second->first;
    } else if (first->second != second->second) {
        positive_value = first->second < second->second ? first->first : second->first;
    } else {
        positive_value = first->first;  // tie: lexicographically smaller (map order)
    }

    // Missing handling: drop features with >30% missing, impute the rest.
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < m; ++j) {
        std::size_t missing = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (std::isnan(cells[i * m + j])) ++missing;
        if (static_cast<double>(missing) > 0.30 * static_cast<double>(n)) continue;
        kept.push_back(j);
        if (missing == 0) continue;
        const auto& f = schema.features[j];
        double fill;
        if (f.kind == FeatureKind::continuous) {
            std::vector<double> present;
            for (std::size_t i = 0; i < n; ++i)
                if (!std::isnan(cells[i * m + j])) present.push_back(cells[i * m + j]);
            if (present.empty()) fail("feature '" + f.name + "' has no present values");
            std::sort(present.begin(), present.end());
            std::size_t h = present.size() / 2;
            fill = present.size() % 2 ? present[h] : 0.5 * (present[h - 1] + present[h]);
        } else {
            std::vector<std::size_t> counts(f.vocabulary.size(), 0);
            for (std::size_t i = 0; i < n; ++i)
                if (!std::isnan(cells[i * m + j]))
                    ++counts[static_cast<std::size_t>(cells[i * m + j])];
            std::size_t best = 0;
            for (std::size_t v = 1; v < counts.size(); ++v)
                if (counts[v] > counts[best]) best = v;
            fill = static_cast<double>(best);
        }
        for (std::size_t i = 0; i < n; ++i)
            if (std::isnan(cells[i * m + j])) cells[i * m + j] = fill;
    }
    if (kept.empty()) fail("all features dropped by the missing-data rule: " + csv_path);

    Dataset data;
    for (std::size_t j : kept) data.schema.features.push_back(schema.features[j]);
    data.schema.label_column = schema.label_column;
    data.values.reserve(n * kept.size());
    data.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : kept) data.values.push_back(cells[i * m + j]);
        data.labels.push_back(raw_labels[i] == positive_value ? 1 : -1);
    }
    data.validate();
    return data;
}

void save_csv_dataset(const Dataset& data, const std::string& csv_path) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) fail("cannot write CSV file: " + csv_path);
    for (std::size_t j = 0; j < data.n_features(); ++j)
        out << csv_escape(data.schema.features[j].name) << ',';
    out << csv_escape(data.schema.label_column) << '\n';
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        for (std::size_t j = 0; j < data.n_features(); ++j) {
            const auto& f = data.schema.features[j];
            if (f.kind == FeatureKind::continuous)
                out << format_double(data.at(i, j));
            else
                out << csv_escape(f.vocabulary[static_cast<std::size_t>(data.at(i, j))]);
            out << ',';
        }
        out << (data.labels[i] > 0 ? "+1" : "-1") << '\n';
    }
}

NormalizeOutput minmax_normalize(const Dataset& train, const std::vector<Dataset>& others) {
    for (const auto& d : others)
        if (d.n_features() != train.n_features()) fail("minmax_normalize: schema mismatch");

    NormalizeOutput out;
    out.train = train;
    out.others = others;
    const std::size_t m = train.n_features();
    for (std::size_t j = 0; j < m; ++j) {
        if (train.schema.features[j].kind != FeatureKind::continuous) continue;
        double lo = train.at(0, j), hi = lo;
        for (std::size_t i = 1; i < train.n_rows(); ++i) {
            lo = std::min(lo, train.at(i, j));
            hi = std::max(hi, train.at(i, j));
        }
        auto apply = [&](Dataset& d) {
            for (std::size_t i = 0; i < d.n_rows(); ++i) {
                double& v = d.values[i * m + j];
                v = hi == lo ? 0.0 : (v - lo) / (hi - lo);
            }
        };
        if (hi == lo) out.constant_features.push_back(train.schema.features[j].name);
        apply(out.train);
        for (auto& d : out.others) apply(d);
    }
    return out;
}

Split stratified_split(const Dataset& data, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0 && train_fraction < 1))
        fail("train_fraction must lie in (0,1)");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < data.n_rows(); ++i)
        (data.labels[i] > 0 ? pos : neg).push_back(i);
    if (pos.size() < 2 || neg.size() < 2)
        fail("stratified_split needs at least 2 rows per class");

    Split split;
    split.seed = seed;
    Rng rng(seed);
    for (auto* cls : {&pos, &neg}) {
        rng.shuffle(*cls);
        auto n_train = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(cls->size())));
        n_train = std::min(n_train, cls->size());
        split.train_indices.insert(split.train_indices.end(), cls->begin(),
                                   cls->begin() + static_cast<std::ptrdiff_t>(n_train));
        split.test_indices.insert(split.test_indices.end(),
                                  cls->begin() + static_cast<std::ptrdiff_t>(n_train),
                                  cls->end());
    }
    std::sort(split.train_indices.begin(), split.train_indices.end());
    std::sort(split.test_indices.begin(), split.test_indices.end());
    return split;
}

ClassPartition partition_by_class(const Dataset& data) {
    ClassPartition part;
    for (std::size_t i = 0; i < data.n_rows(); ++i)
        (data.labels[i] > 0 ? part.minority_rows : part.majority_rows).push_back(i);
    if (part.minority_rows.empty() || part.majority_rows.empty())
        fail("partition_by_class: single-class dataset");
    part.minority = subset_rows(data, part.minority_rows);
    part.majority = subset_rows(data, part.majority_rows);
    return part;
}

}  // namespace whsboost

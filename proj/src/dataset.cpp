#include "qdt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qdt/errors.hpp"
#include "qdt/quantile.hpp"

namespace qdt {

using json = nlohmann::json;

const Column* RawTable::find(const std::string& name) const {
    for (const auto& c : columns)
        if (c.name == name) return &c;
    return nullptr;
}

void RawTable::validate() const {
    if (target.empty()) throw DataError("table has no rows");
    for (const auto& c : columns) {
        if (c.size() != target.size())
            throw DataError("column '" + c.name + "' has " + std::to_string(c.size()) + " rows, target has " +
                            std::to_string(target.size()));
    }
    for (std::size_t r = 0; r < target.size(); ++r)
        if (!std::isfinite(target[r])) throw DataError("target value missing or non-finite at row " + std::to_string(r));
}

std::string FeatureInfo::name() const {
    std::ostringstream os;
    switch (kind) {
        case FeatureKind::LeThreshold: os << source_column << "<=" << threshold; break;
        case FeatureKind::OneHot: os << source_column << "=" << value; break;
        case FeatureKind::Passthrough: os << source_column; break;
    }
    return os.str();
}

bool FeatureInfo::evaluate(const Column& column, std::size_t row) const {
    switch (kind) {
        case FeatureKind::LeThreshold: return column.numbers.at(row) <= threshold;
        case FeatureKind::OneHot:
            return column.kind == ColumnKind::Categorical ? column.labels.at(row) == value : false;
        case FeatureKind::Passthrough: return column.numbers.at(row) != 0.0;
    }
    return false;
}

Itemset::Itemset(std::vector<Literal> literals) : literals_(std::move(literals)) {
    std::sort(literals_.begin(), literals_.end());
    for (std::size_t i = 1; i < literals_.size(); ++i)
        if (literals_[i].feature == literals_[i - 1].feature)
            throw ConfigError("itemset repeats feature " + std::to_string(literals_[i].feature));
}

bool Itemset::contains_feature(std::uint32_t feature) const noexcept {
    return std::any_of(literals_.begin(), literals_.end(), [&](const Literal& l) { return l.feature == feature; });
}

void Itemset::push(Literal lit) { literals_.insert(std::upper_bound(literals_.begin(), literals_.end(), lit), lit); }

void Itemset::pop(Literal lit) {
    auto it = std::lower_bound(literals_.begin(), literals_.end(), lit);
    if (it != literals_.end() && *it == lit) literals_.erase(it);
}

Itemset Itemset::with(Literal lit) const {
    Itemset out = *this;
    if (out.contains_feature(lit.feature)) throw ConfigError("itemset already holds feature " + std::to_string(lit.feature));
    out.push(lit);
    return out;
}

std::size_t Itemset::hash() const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ literals_.size();
    for (const auto& l : literals_) {
        std::uint64_t x = static_cast<std::uint64_t>(l.key()) + 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        h ^= (x ^ (x >> 31)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

BinaryDataset BinaryDataset::from_rows(const std::vector<std::vector<std::uint8_t>>& rows,
                                       std::span<const double> targets, std::vector<FeatureInfo> features) {
    if (rows.size() != targets.size()) throw DataError("row count and target count differ");
    if (rows.empty()) throw DataError("dataset has no samples");
    const std::size_t n_features = rows.front().size();
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r].size() != n_features) throw DataError("row " + std::to_string(r) + " has the wrong feature count");
    if (!features.empty() && features.size() != n_features)
        throw DataError("feature map size does not match feature count");

    BinaryDataset ds;
    const std::size_t n = rows.size();
    ds.original_index_.resize(n);
    std::iota(ds.original_index_.begin(), ds.original_index_.end(), std::size_t{0});
    std::stable_sort(ds.original_index_.begin(), ds.original_index_.end(),
                     [&](std::size_t a, std::size_t b) { return targets[a] < targets[b]; });

    ds.targets_.resize(n);
    ds.covers_.assign(n_features, Bitset(n));
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = ds.original_index_[i];
        ds.targets_[i] = targets[src];
        for (std::size_t f = 0; f < n_features; ++f)
            if (rows[src][f]) ds.covers_[f].set(i);
    }
    ds.features_ = std::move(features);
    return ds;
}

std::vector<std::uint8_t> BinaryDataset::row(std::size_t i) const {
    std::vector<std::uint8_t> out(n_features());
    for (std::size_t f = 0; f < n_features(); ++f) out[f] = covers_[f].test(i) ? 1 : 0;
    return out;
}

Bitset BinaryDataset::cover(const Itemset& items) const {
    Bitset out = all();
    for (const auto& lit : items.literals()) {
        if (lit.positive)
            out &= covers_.at(lit.feature);
        else
            out.and_not(covers_.at(lit.feature));
    }
    return out;
}

std::vector<FeatureInfo> derive_features(const RawTable& raw, const BinarizeConfig& config) {
    raw.validate();
    if (config.bins < 1) throw ConfigError("bins per numeric column must be >= 1");
    std::vector<FeatureInfo> out;
    for (const auto& col : raw.columns) {
        switch (col.kind) {
            case ColumnKind::Binary:
                out.push_back({col.name, FeatureKind::Passthrough, 0.0, {}});
                break;
            case ColumnKind::Categorical: {
                const std::set<std::string> distinct(col.labels.begin(), col.labels.end());
                if (distinct.size() > static_cast<std::size_t>(config.max_categories))
                    throw DataError("categorical column '" + col.name + "' has " + std::to_string(distinct.size()) +
                                    " distinct values (max " + std::to_string(config.max_categories) + ")");
                for (const auto& v : distinct) out.push_back({col.name, FeatureKind::OneHot, 0.0, v});
                break;
            }
            case ColumnKind::Numeric: {
                std::vector<double> sorted = col.numbers;
                std::sort(sorted.begin(), sorted.end());
                std::vector<double> thresholds;
                for (int j = 1; j <= config.bins; ++j) {
                    const double t = empirical_quantile(sorted, static_cast<double>(j) / (config.bins + 1));
                    // A threshold at or above the maximum yields an all-ones feature.
                    if (t >= sorted.back()) continue;
                    if (!thresholds.empty() && thresholds.back() == t) continue;
                    thresholds.push_back(t);
                }
                for (double t : thresholds) out.push_back({col.name, FeatureKind::LeThreshold, t, {}});
                break;
            }
        }
    }
    return out;
}

std::vector<std::vector<std::uint8_t>> encode_rows(const RawTable& raw, const std::vector<FeatureInfo>& features) {
    std::vector<const Column*> sources;
    sources.reserve(features.size());
    for (const auto& f : features) {
        const Column* c = raw.find(f.source_column);
        if (c == nullptr) throw DataError("column '" + f.source_column + "' required by the feature map is missing");
        if (f.kind != FeatureKind::OneHot && c->kind == ColumnKind::Categorical)
            throw DataError("column '" + f.source_column + "' must be numeric");
        sources.push_back(c);
    }
    std::vector<std::vector<std::uint8_t>> rows(raw.n_rows(), std::vector<std::uint8_t>(features.size()));
    for (std::size_t r = 0; r < raw.n_rows(); ++r)
        for (std::size_t f = 0; f < features.size(); ++f) rows[r][f] = features[f].evaluate(*sources[f], r) ? 1 : 0;
    return rows;
}

BinaryDataset binarize(const RawTable& raw, const BinarizeConfig& config) {
    auto features = derive_features(raw, config);
    auto rows = encode_rows(raw, features);
    return BinaryDataset::from_rows(rows, raw.target, std::move(features));
}

namespace {

const char* kind_name(FeatureKind k) {
    switch (k) {
        case FeatureKind::LeThreshold: return "le_threshold";
        case FeatureKind::OneHot: return "one_hot";
        case FeatureKind::Passthrough: return "passthrough";
    }
    return "";
}

}  // namespace

std::string features_to_json(const std::vector<FeatureInfo>& features) {
    json arr = json::array();
    for (std::size_t k = 0; k < features.size(); ++k) {
        const auto& f = features[k];
        json e = {{"feature", k}, {"source_column", f.source_column}, {"kind", kind_name(f.kind)}};
        if (f.kind == FeatureKind::LeThreshold) e["threshold"] = f.threshold;
        if (f.kind == FeatureKind::OneHot) e["value"] = f.value;
        arr.push_back(std::move(e));
    }
    return arr.dump(2);
}

std::vector<FeatureInfo> features_from_json(const std::string& text) {
    std::vector<FeatureInfo> out;
    try {
        const json arr = json::parse(text);
        if (!arr.is_array()) throw ParseError("binarization map must be a JSON array");
        for (const auto& e : arr) {
            FeatureInfo f;
            f.source_column = e.at("source_column").get<std::string>();
            const auto kind = e.at("kind").get<std::string>();
            if (kind == "le_threshold") {
                f.kind = FeatureKind::LeThreshold;
                f.threshold = e.at("threshold").get<double>();
            } else if (kind == "one_hot") {
                f.kind = FeatureKind::OneHot;
                f.value = e.at("value").get<std::string>();
            } else if (kind == "passthrough") {
                f.kind = FeatureKind::Passthrough;
            } else {
                throw ParseError("unknown feature kind '" + kind + "'");
            }
            if (e.at("feature").get<std::size_t>() != out.size()) throw ParseError("binarization map is not in feature order");
            out.push_back(std::move(f));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed binarization map: ") + e.what());
    }
    return out;
}

}  // namespace qdt

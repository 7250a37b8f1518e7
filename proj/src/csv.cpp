#include "triage/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "triage/errors.hpp"

#include "json.hpp"

namespace triage {

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delimiter)) {
        // trim surrounding whitespace and stray carriage returns
        auto b = field.find_first_not_of(" \t\r");
        auto e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == delimiter) fields.push_back("");
    return fields;
}

double parse_number(const std::string& text, const std::string& column, std::size_t row) {
    try {
        std::size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw DataError("row " + std::to_string(row) + ": non-numeric value '" + text +
                        "' in column '" + column + "'");
    }
}

}  // namespace

Cohort parse_cohort(std::istream& in, const CsvSchema& schema) {
    std::string header_line;
    if (!std::getline(in, header_line)) throw DataError("empty file");
    auto header = split_line(header_line, schema.delimiter);

    auto column_index = [&](const std::string& name) -> std::optional<std::size_t> {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };

    std::optional<std::size_t> score_idx = column_index(schema.score_column);
    std::optional<std::size_t> status_idx = column_index(schema.status_column);
    std::optional<std::size_t> vl_idx = column_index(schema.vl_column);
    std::vector<std::size_t> marker_idx;
    for (const auto& name : schema.marker_columns) {
        auto idx = column_index(name);
        if (!idx) throw DataError("missing required column '" + name + "'");
        marker_idx.push_back(*idx);
    }
    if (!score_idx && marker_idx.empty())
        throw DataError("missing required column '" + schema.score_column + "'");
    const bool can_derive_status = vl_idx && schema.v_star;
    if (!status_idx && !can_derive_status)
        throw DataError("missing required column '" + schema.status_column + "'");

    Cohort cohort;
    std::string line;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        auto fields = split_line(line, schema.delimiter);
        if (fields.size() != header.size())
            throw DataError("row " + std::to_string(row) + ": expected " +
                            std::to_string(header.size()) + " fields, found " +
                            std::to_string(fields.size()));
        Observation o;
        if (score_idx) {
            double s = parse_number(fields[*score_idx], schema.score_column, row);
            o.score = schema.negate_score ? -s : s;
            if (!std::isfinite(o.score))
                throw DataError("row " + std::to_string(row) + ": non-finite score");
        }
        for (std::size_t m = 0; m < marker_idx.size(); ++m)
            o.markers[schema.marker_columns[m]] =
                parse_number(fields[marker_idx[m]], schema.marker_columns[m], row);

        std::optional<int> direct_status;
        if (status_idx) {
            double z = parse_number(fields[*status_idx], schema.status_column, row);
            if (z != 0.0 && z != 1.0)
                throw DataError("row " + std::to_string(row) + ": status not binary");
            direct_status = static_cast<int>(z);
        }
        std::optional<int> derived_status;
        if (vl_idx) {
            double vl = parse_number(fields[*vl_idx], schema.vl_column, row);
            if (!std::isfinite(vl) || vl < 0.0)
                throw DataError("row " + std::to_string(row) + ": negative viral load");
            o.raw_vl = vl;
            if (schema.v_star) derived_status = dichotomize(vl, VlThreshold{*schema.v_star});
        }
        if (direct_status && derived_status && *direct_status != *derived_status)
            throw DataError("row " + std::to_string(row) +
                            ": status column disagrees with the dichotomized viral load");
        if (direct_status)
            o.status = *direct_status;
        else if (derived_status)
            o.status = *derived_status;
        cohort.observations.push_back(std::move(o));
    }
    if (cohort.observations.empty()) throw DataError("empty file");
    return cohort;
}

Cohort parse_cohort_file(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open input file: " + path);
    return parse_cohort(in, schema);
}

void serialize_cohort(std::ostream& out, const Cohort& cohort, char delimiter) {
    // stable marker column order from the first observation
    std::vector<std::string> marker_names;
    if (!cohort.observations.empty())
        for (const auto& [name, value] : cohort.observations.front().markers)
            marker_names.push_back(name);

    const bool with_vl =
        !cohort.observations.empty() &&
        std::all_of(cohort.observations.begin(), cohort.observations.end(),
                    [](const Observation& o) { return o.raw_vl.has_value(); });
    out << "score" << delimiter << "z";
    if (with_vl) out << delimiter << "vl";
    for (const auto& name : marker_names) out << delimiter << name;
    out << '\n';
    out.precision(17);
    for (const auto& o : cohort.observations) {
        out << o.score << delimiter << o.status;
        if (with_vl) out << delimiter << *o.raw_vl;
        for (const auto& name : marker_names) out << delimiter << o.markers.at(name);
        out << '\n';
    }
}

std::string cohort_to_json(const Cohort& cohort) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& o : cohort.observations) {
        nlohmann::json row;
        row["score"] = o.score;
        row["z"] = o.status;
        if (o.raw_vl) row["vl"] = *o.raw_vl;
        if (!o.markers.empty()) row["markers"] = o.markers;
        rows.push_back(row);
    }
    nlohmann::json doc;
    doc["n"] = cohort.size();
    doc["observations"] = rows;
    return doc.dump(2);
}

}  // namespace triage

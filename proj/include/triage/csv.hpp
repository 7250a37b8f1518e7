#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "triage/cohort.hpp"

namespace triage {

// Column mapping for delimiter-separated input with a header row.
// Either `score_column` or `marker_columns` must be supplied; status comes
// from `status_column` and/or is derived from `vl_column` against v_star.
struct CsvSchema {
    std::string score_column = "score";
    std::string status_column = "z";
    std::string vl_column = "vl";
    std::vector<std::string> marker_columns;  // loaded into Observation::markers
    std::optional<double> v_star;             // enables VL dichotomization
    bool negate_score = false;                // for markers where low = high risk
    char delimiter = ',';
};

Cohort parse_cohort(std::istream& in, const CsvSchema& schema);
Cohort parse_cohort_file(const std::string& path, const CsvSchema& schema);

void serialize_cohort(std::ostream& out, const Cohort& cohort, char delimiter = ',');
std::string cohort_to_json(const Cohort& cohort);

}  // namespace triage

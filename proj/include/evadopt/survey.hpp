#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "evadopt/model.hpp"

namespace evadopt {

/// Binding of one semantic field to a raw survey column.
///  - `codes` maps raw answers to numbers (class ordinals for the age and
///    mileage bands, numeric codes for socio-demographic items).
///  - `positive` lists the raw answers that count as "yes"/"agree".
///  - `negative` lists explicit "no" answers; when empty, any answer that
///    is not positive counts as negative.
struct FieldBinding {
    std::string column;
    std::map<std::string, double> codes;
    std::vector<std::string> positive;
    std::vector<std::string> negative;
};

struct OpinionItemSpec {
    std::string column;
    bool reverse = false;  // higher raw value = less favourable
    double min = 1.0;
    double max = 5.0;
    std::vector<std::string> non_informative;  // recoded to the scale midpoint
};

/// Column mapping for a survey export. Loaded from a user-editable JSON file
/// so that dataset revisions only need a new mapping, not new code.
struct SurveySchema {
    std::string country_column;  // empty: no country filtering
    std::map<std::string, FieldBinding> fields;
    std::vector<OpinionItemSpec> opinion_items;
    std::vector<std::string> socio_demographic;  // semantic field names
    std::vector<std::string> missing_codes{"", "NA"};

    static SurveySchema from_json(const nlohmann::json& j);
    static SurveySchema load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    const FieldBinding& field(const std::string& name) const;
};

// Semantic field names understood by the pipeline.
namespace field {
inline constexpr const char* kAgeBand = "age_band";
inline constexpr const char* kAnnualKmBand = "annual_km_band";
inline constexpr const char* kEvInHousehold = "ev_in_household";
inline constexpr const char* kDroveEvBefore = "drove_ev_before";
inline constexpr const char* kWantsEvFuture = "wants_ev_future";
inline constexpr const char* kRewardStatement = "reward_statement";
}  // namespace field

/// Respondent records restricted to one country. Missing or declared-missing
/// answers are stored as std::nullopt.
class SurveyTable {
public:
    using Cell = std::optional<std::string>;

    SurveyTable(SurveySchema schema, std::vector<std::string> header,
                std::vector<std::vector<Cell>> records);

    const SurveySchema& schema() const { return schema_; }
    const std::vector<std::string>& header() const { return header_; }
    std::size_t size() const { return records_.size(); }

    const Cell& cell(std::size_t row, const std::string& column) const;
    const Cell& field_cell(std::size_t row, const std::string& semantic) const;

    /// Class ordinal of a banded field (1-based), nullopt when missing/unmapped.
    std::optional<int> band(std::size_t row, const std::string& semantic) const;
    /// Numeric value of a field via its code map or by parsing the raw text.
    std::optional<double> numeric(std::size_t row, const std::string& semantic) const;
    /// True when the raw answer is one of the field's positive answers.
    bool positive(std::size_t row, const std::string& semantic) const;
    /// True for an explicit negative answer (never for a missing one).
    bool negative(std::size_t row, const std::string& semantic) const;

    /// Community from the mileage and age bands, nullopt if either is missing.
    std::optional<CommunityIndex> community(std::size_t row) const;

private:
    std::size_t column_index(const std::string& column) const;

    SurveySchema schema_;
    std::vector<std::string> header_;
    std::map<std::string, std::size_t> columns_;
    std::vector<std::vector<Cell>> records_;
};

/// Reads a UTF-8 CSV with a header row, checks that every bound column
/// exists exactly once (SchemaMismatch otherwise, naming the columns), and
/// keeps the rows whose country matches `country` (all rows when empty).
/// Throws EmptySelection when no row matches.
SurveyTable ingest(const std::filesystem::path& csv_path, const SurveySchema& schema,
                   const std::string& country);
SurveyTable ingest(std::istream& csv, const SurveySchema& schema, const std::string& country);

}  // namespace evadopt

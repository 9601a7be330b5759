#include "evadopt/survey.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

#include "evadopt/errors.hpp"
#include "evadopt/io.hpp"

namespace evadopt {

namespace {

const std::vector<std::string>& required_fields() {
    static const std::vector<std::string> names{
        field::kAgeBand,        field::kAnnualKmBand,   field::kEvInHousehold,
        field::kDroveEvBefore,  field::kWantsEvFuture,  field::kRewardStatement};
    return names;
}

std::optional<double> parse_number(const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    while (first < last && *first == ' ') ++first;
    while (last > first && last[-1] == ' ') --last;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
    return v;
}

}  // namespace

SurveySchema SurveySchema::from_json(const nlohmann::json& j) {
    SurveySchema s;
    try {
        s.country_column = j.value("country_column", std::string{});
        if (j.contains("missing_codes"))
            s.missing_codes = j.at("missing_codes").get<std::vector<std::string>>();
        for (const auto& [name, spec] : j.at("fields").items()) {
            FieldBinding b;
            b.column = spec.at("column").get<std::string>();
            if (spec.contains("codes"))
                for (const auto& [raw, code] : spec.at("codes").items()) b.codes[raw] = code.get<double>();
            if (spec.contains("positive"))
                b.positive = spec.at("positive").get<std::vector<std::string>>();
            if (spec.contains("negative"))
                b.negative = spec.at("negative").get<std::vector<std::string>>();
            s.fields.emplace(name, std::move(b));
        }
        for (const auto& item : j.at("opinion_items")) {
            OpinionItemSpec o;
            o.column = item.at("column").get<std::string>();
            const std::string direction = item.value("direction", std::string{"direct"});
            if (direction != "direct" && direction != "reverse")
                throw SchemaMismatch("opinion item " + o.column + ": direction must be direct or reverse");
            o.reverse = direction == "reverse";
            o.min = item.value("min", 1.0);
            o.max = item.value("max", 5.0);
            if (item.contains("non_informative"))
                o.non_informative = item.at("non_informative").get<std::vector<std::string>>();
            if (!(o.min < o.max))
                throw SchemaMismatch("opinion item " + o.column + ": scale min must be below max");
            s.opinion_items.push_back(std::move(o));
        }
        if (j.contains("socio_demographic"))
            s.socio_demographic = j.at("socio_demographic").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaMismatch(std::string("malformed schema: ") + e.what());
    }

    std::vector<std::string> missing;
    for (const auto& name : required_fields())
        if (!s.fields.count(name)) missing.push_back(name);
    for (const auto& name : s.socio_demographic)
        if (!s.fields.count(name)) missing.push_back(name);
    if (!missing.empty()) {
        std::string msg = "schema does not bind required fields:";
        for (const auto& m : missing) msg += " " + m;
        throw SchemaMismatch(msg);
    }
    if (s.opinion_items.empty()) throw SchemaMismatch("schema declares no opinion items");
    return s;
}

SurveySchema SurveySchema::load(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path))
        throw SchemaMismatch("schema file not found: " + path.string());
    return from_json(io::read_json(path));
}

nlohmann::json SurveySchema::to_json() const {
    nlohmann::json j;
    j["country_column"] = country_column;
    j["missing_codes"] = missing_codes;
    for (const auto& [name, b] : fields) {
        nlohmann::json f{{"column", b.column}};
        if (!b.codes.empty()) f["codes"] = b.codes;
        if (!b.positive.empty()) f["positive"] = b.positive;
        if (!b.negative.empty()) f["negative"] = b.negative;
        j["fields"][name] = f;
    }
    j["opinion_items"] = nlohmann::json::array();
    for (const auto& o : opinion_items)
        j["opinion_items"].push_back({{"column", o.column},
                                      {"direction", o.reverse ? "reverse" : "direct"},
                                      {"min", o.min},
                                      {"max", o.max},
                                      {"non_informative", o.non_informative}});
    j["socio_demographic"] = socio_demographic;
    return j;
}

const FieldBinding& SurveySchema::field(const std::string& name) const {
    auto it = fields.find(name);
    if (it == fields.end()) throw SchemaMismatch("schema does not bind field " + name);
    return it->second;
}

SurveyTable::SurveyTable(SurveySchema schema, std::vector<std::string> header,
                         std::vector<std::vector<Cell>> records)
    : schema_(std::move(schema)), header_(std::move(header)), records_(std::move(records)) {
    for (std::size_t i = 0; i < header_.size(); ++i) columns_.emplace(header_[i], i);
}

std::size_t SurveyTable::column_index(const std::string& column) const {
    auto it = columns_.find(column);
    if (it == columns_.end()) throw SchemaMismatch("column not present: " + column);
    return it->second;
}

const SurveyTable::Cell& SurveyTable::cell(std::size_t row, const std::string& column) const {
    return records_.at(row).at(column_index(column));
}

const SurveyTable::Cell& SurveyTable::field_cell(std::size_t row, const std::string& semantic) const {
    return cell(row, schema_.field(semantic).column);
}

std::optional<double> SurveyTable::numeric(std::size_t row, const std::string& semantic) const {
    const FieldBinding& b = schema_.field(semantic);
    const Cell& c = cell(row, b.column);
    if (!c) return std::nullopt;
    if (!b.codes.empty()) {
        auto it = b.codes.find(*c);
        if (it == b.codes.end()) return std::nullopt;
        return it->second;
    }
    return parse_number(*c);
}

std::optional<int> SurveyTable::band(std::size_t row, const std::string& semantic) const {
    const auto v = numeric(row, semantic);
    if (!v) return std::nullopt;
    const int cls = static_cast<int>(*v);
    if (cls < 1 || cls > kAgeClasses || static_cast<double>(cls) != *v) return std::nullopt;
    return cls;
}

bool SurveyTable::positive(std::size_t row, const std::string& semantic) const {
    const FieldBinding& b = schema_.field(semantic);
    const Cell& c = cell(row, b.column);
    return c && std::find(b.positive.begin(), b.positive.end(), *c) != b.positive.end();
}

bool SurveyTable::negative(std::size_t row, const std::string& semantic) const {
    const FieldBinding& b = schema_.field(semantic);
    const Cell& c = cell(row, b.column);
    if (!c) return false;
    if (b.negative.empty()) return std::find(b.positive.begin(), b.positive.end(), *c) == b.positive.end();
    return std::find(b.negative.begin(), b.negative.end(), *c) != b.negative.end();
}

std::optional<CommunityIndex> SurveyTable::community(std::size_t row) const {
    const auto mobility = band(row, field::kAnnualKmBand);
    const auto age = band(row, field::kAgeBand);
    if (!mobility || !age) return std::nullopt;
    return CommunityIndex::from_classes(*mobility, *age);
}

SurveyTable ingest(std::istream& csv, const SurveySchema& schema, const std::string& country) {
    std::vector<io::Row> rows = io::read_csv(csv);
    if (rows.empty()) throw SchemaMismatch("survey CSV has no header row");
    std::vector<std::string> header = rows.front();

    std::map<std::string, int> seen;
    for (const auto& h : header) ++seen[h];
    std::set<std::string> needed;
    if (!schema.country_column.empty()) needed.insert(schema.country_column);
    for (const auto& [name, b] : schema.fields) needed.insert(b.column);
    for (const auto& o : schema.opinion_items) needed.insert(o.column);

    std::vector<std::string> problems;
    for (const auto& col : needed) {
        auto it = seen.find(col);
        if (it == seen.end()) problems.push_back("missing column '" + col + "'");
        else if (it->second > 1) problems.push_back("duplicated column '" + col + "'");
    }
    if (!problems.empty()) {
        std::string msg = "survey does not match schema:";
        for (const auto& p : problems) msg += " " + p + ";";
        throw SchemaMismatch(msg);
    }

    std::size_t country_col = header.size();
    if (!schema.country_column.empty())
        country_col = static_cast<std::size_t>(
            std::find(header.begin(), header.end(), schema.country_column) - header.begin());

    std::vector<std::vector<SurveyTable::Cell>> records;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        io::Row& raw = rows[r];
        if (raw.size() != header.size())
            throw SchemaMismatch("line " + std::to_string(r + 1) + " has " +
                                 std::to_string(raw.size()) + " fields, header has " +
                                 std::to_string(header.size()));
        if (!country.empty() && country_col < header.size() && raw[country_col] != country)
            continue;
        std::vector<SurveyTable::Cell> rec;
        rec.reserve(raw.size());
        for (auto& value : raw) {
            const bool is_missing = std::find(schema.missing_codes.begin(),
                                              schema.missing_codes.end(),
                                              value) != schema.missing_codes.end();
            rec.push_back(is_missing ? SurveyTable::Cell{} : SurveyTable::Cell{std::move(value)});
        }
        records.push_back(std::move(rec));
    }
    if (records.empty())
        throw EmptySelection(country.empty() ? "survey has no records"
                                             : "no survey records for country '" + country + "'");
    return SurveyTable(schema, std::move(header), std::move(records));
}

SurveyTable ingest(const std::filesystem::path& csv_path, const SurveySchema& schema,
                   const std::string& country) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw InputError("cannot open survey file " + csv_path.string());
    return ingest(in, schema, country);
}

}  // namespace evadopt

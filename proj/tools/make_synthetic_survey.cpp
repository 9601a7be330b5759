// Writes a synthetic survey export and the matching schema, for demos and
// fixtures when the public survey data is not available.
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

#include "evadopt/errors.hpp"
#include "evadopt/io.hpp"
#include "evadopt/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"synthetic EV survey generator"};
    std::uint64_t seed = 20240101;
    std::string out = "data/synthetic";
    evadopt::SyntheticSurveySpec spec;
    app.add_option("--seed", seed, "generator seed");
    app.add_option("--out", out, "output directory");
    app.add_option("--respondents", spec.respondents_per_country, "respondents per country")
        ->check(CLI::PositiveNumber);
    app.add_option("--countries", spec.countries, "country labels");
    CLI11_PARSE(app, argc, argv);

    try {
        const std::filesystem::path dir(out);
        evadopt::io::write_text(dir / "survey.csv", evadopt::synthetic_survey_csv(seed, spec));
        evadopt::io::write_json(dir / "schema.json", evadopt::default_schema().to_json());
        std::cout << "wrote " << (dir / "survey.csv").string() << " and " << (dir / "schema.json").string() << "\n";
    } catch (const evadopt::Error& e) {
        std::cerr << "make_synthetic_survey: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#pragma once

#include <istream>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace sqlgen::cli {

/// CLI11 config reader for JSON files. Nested objects name subcommands, so
/// {"gate": {"train": {"steps": 200}}} sets `gate train --steps 200`.
/// Command-line flags take precedence over file values.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                          std::string prefix) const override;
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

}  // namespace sqlgen::cli

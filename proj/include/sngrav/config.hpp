#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sngrav/params.hpp"

// Flat `key = value` configuration with '#' comments. Frequencies are given in Hz and angles in
// radians. `preset = table1` supplies every physical key; without it the physical keys are required.
namespace sngrav {

struct GridControls {
    double f_min_hz = 1e-4;
    double f_max_hz = 1.0;
    std::size_t n_points = 2000;
    bool log = true;
};

class RunConfig {
public:
    // Resolved values, every known key present, in canonical string form.
    const std::map<std::string, std::string>& values() const { return values_; }
    const std::string& get(const std::string& key) const;
    void set(const std::string& key, const std::string& value);  // validates key and value

    SystemParams params() const;
    GridControls grid() const;
    std::uint64_t seed() const;
    bool exclusion_window() const;
    bool approximation() const;
    MirrorMaterial material_A() const;
    MirrorMaterial material_B() const;

    // `key = value` lines that parse back to an identical config.
    std::string serialize(const std::string& line_prefix = "") const;

private:
    friend RunConfig parse_config(const std::string&, const std::vector<std::pair<std::string, std::string>>&);
    std::map<std::string, std::string> values_;
};

const std::vector<std::string>& config_keys();
// DomainError on unknown keys (listing the valid ones), malformed lines or values, and missing keys.
// Overrides replace (or add) keys before validation, as if they had been written in the text.
RunConfig parse_config(const std::string& text,
                       const std::vector<std::pair<std::string, std::string>>& overrides = {});
// Reads a config file. A file carrying `#cfg ` lines (the header of every CSV this tool writes) is
// read from those lines alone, so any output can serve as the config that regenerates it.
std::string read_config_text(const std::string& path);
RunConfig load_config(const std::string& path);

}  // namespace sngrav

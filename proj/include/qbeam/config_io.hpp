#pragma once

#include <string>
#include <vector>

#include "qbeam/core.hpp"

namespace qbeam {

struct ConfigError : std::runtime_error {
    ConfigError(const std::string& key_, int line_, const std::string& what_)
        : std::runtime_error(key_.empty() ? what_
                                          : key_ + (line_ > 0 ? " (line " + std::to_string(line_) + ")"
                                                              : "") + ": " + what_),
          key(key_), line(line_) {}
    std::string key;
    int line = 0;
};

// Flat key=value text, one pair per line, '#' starts a comment. Unknown keys
// and unparsable values throw ConfigError with the key and line number.
SimConfig parse_config_text(const std::string& text);
SimConfig parse_config_file(const std::string& path);

// Applies one "key=value" override on top of an existing config.
void apply_override(SimConfig& cfg, const std::string& assignment);

// Fully resolved config as sorted key=value lines; reparsing reproduces the
// config exactly.
std::string canonical_config_text(const SimConfig& cfg);

// FNV-1a over canonical_config_text.
std::uint64_t config_fingerprint(const SimConfig& cfg);

std::string adc_bits_label(int bits);

}  // namespace qbeam

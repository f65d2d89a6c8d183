#pragma once

#include <stdexcept>
#include <string>

#include "beliefcert/model.hpp"

namespace beliefcert {

/// Parse failure with the offending line number (1-based).
struct ParseError : std::runtime_error {
    std::size_t line;
    ParseError(std::size_t line_, const std::string& what_)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

/**
 * Loads a model from the sectioned text format documented in
 * docs/formats.md: `states` (labels with optional 1-d coordinates, or an
 * explicit `dist` matrix), `actions`, `observations` (+ optional `obs_dist`),
 * one `kernel <action>` matrix per action, `channel`, `cost`, `prior` and an
 * optional `discount`. Throws ParseError with a line number on bad input.
 * Structural validity beyond parsing is validate_model's job.
 */
PomdpModel load_model(const std::string& path);
PomdpModel parse_model(const std::string& text);

/// Canonical text form of a model; load(save(m)) == m up to float printing.
std::string format_model(const PomdpModel& model);
void save_model(const PomdpModel& model, const std::string& path);

} // namespace beliefcert

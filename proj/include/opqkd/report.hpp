#pragma once

// Transcript tables and file output for the command-line front end.

#include <string>

#include "opqkd/protocol.hpp"

namespace opqkd {

/// round_id,alice_index,bob_index,checked,mismatch  (booleans as 0/1)
std::string transcript_csv(const SessionResult& result);

/// round_id,variant,a_outcome,b_outcome,inferred_state,correct_inference
/// Missing outcomes are empty fields.
std::string eve_transcript_csv(const SessionResult& result);

/// Fraction of rounds where Eve's inferred label equals Alice's; 0 without Eve.
double eve_inference_accuracy(const SessionResult& result);

/// Writes to a sibling temporary file and renames it over `path`.
/// Throws std::runtime_error on I/O failure.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace opqkd

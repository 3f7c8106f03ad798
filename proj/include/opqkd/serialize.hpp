#pragma once

// StateSet <-> JSON document.
//
//   {"format": "opqkd-stateset", "version": 1, "n": 3,
//    "display_order": [1, 0, 2],
//    "states": [{"index": 0, "ket_a": [[re, im], ...], "ket_b": [...]}, ...],
//    "tiles":  [{"orientation": "row", "fixed_index": 1,
//                "cells": [[a, b], ...], "hosted": [0, 1],
//                "amplitudes": [[[re, im], ...], ...]}, ...]}
//
// Reading rebuilds the set from its tiles and rejects documents whose state
// records disagree with the tiles.

#include <iosfwd>
#include <string>

#include "opqkd/stateset.hpp"

namespace opqkd {

std::string stateset_to_json(const StateSet& set);
StateSet stateset_from_json(const std::string& text);

}  // namespace opqkd

// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0
//
// File formats. Datasets are JSON lines: a header object followed by one
// record per line, {"program": text, "attributes": [34 x 0/1],
// "examples": [{"inputs": [...], "output": ...}]}. Priors are CSV with a
// '#' header comment line.

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pbesynth/datagen.hpp"

namespace pbe {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kDatasetFormat = "pbesynth-dataset";
inline constexpr int kDatasetVersion = 1;

void write_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_dataset(const std::filesystem::path& path);

std::string header_comment(std::string_view kind, const DatasetHeader& header);

void write_prior(const std::filesystem::path& path, const DatasetHeader& header,
                 const AttributeScores& prior);

struct PriorFile {
  DatasetHeader header;
  AttributeScores prior{};
};
PriorFile read_prior(const std::filesystem::path& path);

// One example set as JSON: {"examples": [...]} or a bare array of examples.
ExampleSet parse_examples_json(std::string_view text);
std::string examples_to_json(const ExampleSet& set);

// Inline form "INPUT, INPUT -> OUTPUT", each value an integer or a bracketed
// list, e.g. "2, [3, 5, 4] -> 7".
Example parse_inline_example(std::string_view text);

}  // namespace pbe

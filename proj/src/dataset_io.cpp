// Copyright 2026 The pbesynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "pbesynth/dataset_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pbe {
namespace {

using json = nlohmann::json;

json value_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Null:
      return nullptr;
    case Value::Kind::Int:
      return v.as_int();
    case Value::Kind::Array:
      return json(std::vector<std::int64_t>(v.elements().begin(), v.elements().end()));
  }
  return nullptr;
}

Value value_from_json(const json& j) {
  if (j.is_null()) return Value::null();
  if (j.is_number_integer()) return Value::scalar(j.get<std::int64_t>());
  if (j.is_array()) {
    std::vector<std::int64_t> xs;
    for (const json& e : j) {
      if (!e.is_number_integer()) throw FormatError("array elements must be integers");
      xs.push_back(e.get<std::int64_t>());
    }
    return Value::array(std::move(xs));
  }
  throw FormatError("value must be an integer, an integer list or null");
}

json examples_json(const ExampleSet& set) {
  json arr = json::array();
  for (const Example& e : set.examples) {
    json inputs = json::array();
    for (const Value& v : e.inputs) inputs.push_back(value_json(v));
    arr.push_back({{"inputs", inputs}, {"output", value_json(e.output)}});
  }
  return arr;
}

ExampleSet examples_from_json(const json& arr) {
  if (!arr.is_array()) throw FormatError("examples must be a list");
  ExampleSet set;
  for (const json& e : arr) {
    if (!e.is_object() || !e.contains("inputs") || !e.contains("output")) {
      throw FormatError("example needs 'inputs' and 'output'");
    }
    Example ex;
    for (const json& v : e.at("inputs")) ex.inputs.push_back(value_from_json(v));
    ex.output = value_from_json(e.at("output"));
    set.examples.push_back(std::move(ex));
  }
  return set;
}

json header_json(const DatasetHeader& h) {
  return {{"format", kDatasetFormat},    {"version", h.version},   {"split", h.split},
          {"length", h.length},          {"count", h.count},       {"examples", h.examples},
          {"max_length", h.max_length},  {"seed", h.seed},         {"probe_seed", h.probe_seed}};
}

DatasetHeader header_from_json(const json& j) {
  if (!j.is_object() || j.value("format", "") != kDatasetFormat) {
    throw FormatError("not a pbesynth dataset header");
  }
  DatasetHeader h;
  h.version = j.at("version").get<int>();
  if (h.version != kDatasetVersion) {
    throw FormatError("unsupported dataset version " + std::to_string(h.version));
  }
  h.split = j.at("split").get<std::string>();
  h.length = j.at("length").get<int>();
  h.count = j.at("count").get<int>();
  h.examples = j.at("examples").get<int>();
  h.max_length = j.at("max_length").get<int>();
  h.seed = j.at("seed").get<std::uint64_t>();
  h.probe_seed = j.at("probe_seed").get<std::uint64_t>();
  return h;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  DatasetHeader h = dataset.header;
  h.count = static_cast<int>(dataset.records.size());
  out << header_json(h).dump() << '\n';
  for (const DatasetRecord& r : dataset.records) {
    json attrs = json::array();
    for (int a = 0; a < kNumAttributes; ++a) attrs.push_back(r.attributes[a] ? 1 : 0);
    json rec = {{"program", format_program(r.program)},
                {"attributes", attrs},
                {"examples", examples_json(r.examples)}};
    out << rec.dump() << '\n';
  }
  if (!out) throw FormatError("write failed: " + path.string());
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  Dataset ds;
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
  try {
    ds.header = header_from_json(json::parse(line));
    int line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const json j = json::parse(line);
      Program program = parse_program(j.at("program").get<std::string>());
      AttributeVector attrs;
      const json& bits = j.at("attributes");
      if (!bits.is_array() || bits.size() != kNumAttributes) {
        throw FormatError("line " + std::to_string(line_no) + ": attributes must have 34 entries");
      }
      for (int a = 0; a < kNumAttributes; ++a) attrs[a] = bits[a].get<int>() != 0;
      if (attrs != attribute_vector(program)) {
        throw FormatError("line " + std::to_string(line_no) + ": attributes disagree with program");
      }
      ds.records.push_back({std::move(program), attrs, examples_from_json(j.at("examples"))});
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (static_cast<int>(ds.records.size()) != ds.header.count) {
    throw FormatError(path.string() + ": header announces " + std::to_string(ds.header.count) +
                      " records, found " + std::to_string(ds.records.size()));
  }
  return ds;
}

std::string header_comment(std::string_view kind, const DatasetHeader& h) {
  std::ostringstream os;
  os << "# pbesynth-" << kind << " version=" << h.version << " length=" << h.length
     << " count=" << h.count << " examples=" << h.examples << " max_length=" << h.max_length
     << " seed=" << h.seed << " probe_seed=" << h.probe_seed;
  return os.str();
}

void write_prior(const std::filesystem::path& path, const DatasetHeader& header,
                 const AttributeScores& prior) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << header_comment("prior", header) << '\n' << "attribute,frequency\n";
  for (int a = 0; a < kNumAttributes; ++a) {
    out << attribute_name(a) << ',' << format_double(prior[a]) << '\n';
  }
}

PriorFile read_prior(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  PriorFile pf;
  std::string line;
  int row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream is(line.substr(1));
      std::string field;
      while (is >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        const std::string k = field.substr(0, eq);
        const std::string v = field.substr(eq + 1);
        if (k == "length") pf.header.length = std::stoi(v);
        else if (k == "count") pf.header.count = std::stoi(v);
        else if (k == "examples") pf.header.examples = std::stoi(v);
        else if (k == "seed") pf.header.seed = std::stoull(v);
        else if (k == "probe_seed") pf.header.probe_seed = std::stoull(v);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "attribute,frequency") throw FormatError(path.string() + ": missing column header");
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || row >= kNumAttributes) {
      throw FormatError(path.string() + ": malformed prior row '" + line + "'");
    }
    if (line.substr(0, comma) != attribute_name(row)) {
      throw FormatError(path.string() + ": expected attribute " + std::string(attribute_name(row)));
    }
    pf.prior[row++] = std::stod(line.substr(comma + 1));
  }
  if (row != kNumAttributes) throw FormatError(path.string() + ": expected 34 prior entries");
  return pf;
}

ExampleSet parse_examples_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.is_object()) return examples_from_json(j.at("examples"));
    return examples_from_json(j);
  } catch (const json::exception& e) {
    throw FormatError(std::string("examples: ") + e.what());
  }
}

std::string examples_to_json(const ExampleSet& set) {
  return json{{"examples", examples_json(set)}}.dump();
}

Example parse_inline_example(std::string_view text) {
  const auto arrow = text.find("->");
  if (arrow == std::string_view::npos) throw FormatError("inline example needs '->'");
  try {
    const json inputs = json::parse("[" + std::string(text.substr(0, arrow)) + "]");
    const json output = json::parse(std::string(text.substr(arrow + 2)));
    Example ex;
    for (const json& v : inputs) ex.inputs.push_back(value_from_json(v));
    ex.output = value_from_json(output);
    return ex;
  } catch (const json::exception& e) {
    throw FormatError(std::string("inline example: ") + e.what());
  }
}

}  // namespace pbe

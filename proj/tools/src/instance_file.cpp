#include "l12cli/instance_file.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"
#include "l12/reduction.hpp"

namespace l12::cli {

namespace {

using Json = nlohmann::ordered_json;

bool is_reduction_kind(ProblemKind kind) { return kind != ProblemKind::GENERIC; }

[[noreturn]] void fail(const std::string& what) { throw InstanceFormatError(what); }

double number_field(const Json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (!v.is_number()) fail(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

Vector vector_field(const Json& v, const std::string& what) {
  if (!v.is_array()) fail(what + " must be an array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(what + " must contain only numbers");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

}  // namespace

ProblemInstance InstanceFile::to_instance() const {
  if (is_reduction_kind(kind)) {
    if (!multiset) throw InstanceFormatError("reduction kinds need a multiset");
    if (A || b) throw InstanceFormatError("reduction kinds take no A or b");
    const ReductionParams params{kind, tau, lambda};
    params.validate();
    return build_instance(*multiset, params);
  }
  if (!A || !b) throw InstanceFormatError("generic instances need A and b");
  if (multiset) throw InstanceFormatError("generic instances take no multiset");
  return ProblemInstance::generic(*A, *b, tau, lambda, nonneg);
}

std::string serialize(const InstanceFile& file) {
  Json doc;
  doc["format_version"] = std::string(kFormatVersion);
  doc["kind"] = std::string(to_string(file.kind));
  if (file.multiset) doc["multiset"] = file.multiset->elements();
  if (file.A) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < file.A->rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < file.A->cols(); ++c) row.push_back((*file.A)(r, c));
      rows.push_back(std::move(row));
    }
    doc["A"] = std::move(rows);
  }
  if (file.b) doc["b"] = std::vector<double>(file.b->begin(), file.b->end());
  if (file.tau) doc["tau"] = *file.tau;
  if (file.lambda) doc["lambda"] = *file.lambda;
  if (!is_reduction_kind(file.kind)) doc["nonneg"] = file.nonneg;
  return doc.dump(2) + "\n";
}

InstanceFile parse_instance(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("instance must be a JSON object");
  static const std::array<std::string_view, 8> known = {"format_version", "kind", "multiset", "A",
                                                        "b",              "tau",  "lambda",   "nonneg"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) fail("unknown key '" + key + "'");
  }
  if (!doc.contains("format_version") || !doc["format_version"].is_string()) {
    fail("missing string 'format_version'");
  }
  if (doc["format_version"].get<std::string>() != kFormatVersion) {
    fail("unsupported format_version '" + doc["format_version"].get<std::string>() + "'");
  }
  if (!doc.contains("kind") || !doc["kind"].is_string()) fail("missing string 'kind'");

  InstanceFile file;
  try {
    file.kind = parse_problem_kind(doc["kind"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  const bool has_multiset = doc.contains("multiset");
  const bool has_matrix = doc.contains("A") || doc.contains("b");
  if (has_multiset == has_matrix) fail("exactly one of 'multiset' or ('A', 'b') is required");

  if (has_multiset) {
    const auto& ms = doc["multiset"];
    if (!ms.is_array()) fail("'multiset' must be an array of integers");
    std::vector<std::int64_t> elements;
    for (const auto& v : ms) {
      if (!v.is_number_integer()) fail("'multiset' must contain only integers");
      if (v.is_number_unsigned() && v.get<std::uint64_t>() > std::uint64_t{1} << 62) {
        fail("multiset element out of range");
      }
      elements.push_back(v.get<std::int64_t>());
    }
    try {
      file.multiset = PartitionInstance(std::move(elements));
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  } else {
    if (!doc.contains("A") || !doc.contains("b")) fail("generic instances need both 'A' and 'b'");
    const auto& rows = doc["A"];
    if (!rows.is_array() || rows.empty()) fail("'A' must be a non-empty array of rows");
    const Vector first = vector_field(rows[0], "'A' rows");
    Matrix A(static_cast<Eigen::Index>(rows.size()), first.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Vector row = vector_field(rows[r], "'A' rows");
      if (row.size() != first.size()) fail("'A' rows differ in length");
      A.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    file.A = std::move(A);
    file.b = vector_field(doc["b"], "'b'");
  }
  if (doc.contains("tau")) file.tau = number_field(doc, "tau");
  if (doc.contains("lambda")) file.lambda = number_field(doc, "lambda");
  if (doc.contains("nonneg")) {
    if (is_reduction_kind(file.kind)) fail("'nonneg' is only allowed for generic instances");
    if (!doc["nonneg"].is_boolean()) fail("'nonneg' must be a boolean");
    file.nonneg = doc["nonneg"].get<bool>();
  }
  try {
    (void)file.to_instance();
  } catch (const InstanceFormatError&) {
    throw;
  } catch (const std::exception& e) {
    fail(e.what());
  }
  return file;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw std::runtime_error("error reading '" + path + "'");
  return text;
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw std::runtime_error("error writing '" + path + "'");
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  constexpr char digits[] = "0123456789abcdef";
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(digits[digest[i] >> 4]);
    hex.push_back(digits[digest[i] & 0xF]);
  }
  return hex;
}

}  // namespace l12::cli

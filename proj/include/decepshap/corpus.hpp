#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace decepshap {

// Class labels: 0 is deceptive, 1 is truthful.
enum class Label : int { kDeceptive = 0, kTruthful = 1 };

// Provenance of a document. DIS is disinformation; the partners are fraud
// email (EN), scam posts (FB), favorable (POS) and unfavorable (NEG) fake
// reviews. SYN marks mixed or otherwise untagged data.
enum class Source { kDIS, kEN, kFB, kPOS, kNEG, kSYN };

std::string_view to_string(Source s);
std::optional<Source> parse_source(std::string_view s);

struct LabeledDocument {
  std::string text;
  Label label = Label::kDeceptive;
  Source source = Source::kSYN;
};

struct Corpus {
  std::string name;
  std::vector<LabeledDocument> documents;

  std::size_t size() const { return documents.size(); }
};

struct SplitRecipe {
  Source dis_source = Source::kDIS;
  Source partner_source = Source::kSYN;
  std::size_t train_size = 200;
  std::size_t test_size = 20;
};

struct HybridSplit {
  Corpus train;
  Corpus test;
  std::uint64_t seed = 0;
  SplitRecipe recipe;
  // Indices into the source corpora, in the order the documents were placed.
  std::vector<std::size_t> train_dis_indices;
  std::vector<std::size_t> train_partner_indices;
  std::vector<std::size_t> test_dis_indices;
};

// Throws DataError for blank text or an out-of-range label.
void validate_document(const LabeledDocument& doc);

// Parses UTF-8 JSONL with exactly the keys "text" and "label". Errors name
// the 1-based line number.
Corpus parse_corpus(std::string_view jsonl, Source source, std::string name);
Corpus load_corpus(const std::filesystem::path& path, Source source);

// Serializes documents back to the corpus JSONL format.
std::string to_jsonl(const Corpus& corpus);

// Unbiased draw in [0, n) from a 64-bit engine by rejection sampling.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n);

// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> seeded_permutation(std::mt19937_64& rng, std::size_t n);

// Builds the hybrid training set (floor(train_size/2) documents from `dis`,
// the rest from `partner`) and a disjoint disinformation-only test set.
HybridSplit make_hybrid_split(const Corpus& dis, const Corpus& partner,
                              std::size_t train_size, std::size_t test_size,
                              std::uint64_t seed);

}  // namespace decepshap

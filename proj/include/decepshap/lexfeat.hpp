#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "decepshap/corpus.hpp"
#include "decepshap/matrix.hpp"

namespace decepshap {

// The stylometric features in canonical column order.
enum class Feature : std::size_t {
  kNumVerbs,
  kNumModifiers,
  kAvSentLen,
  kAvWordLen,
  kNumModalVerbs,
  kLexicalDiversity,
  kNumChars,
  kNumPunctuation,
  kNumSentences,
  kNumAdjectives,
  kNumAdverbs,
  kNumNouns,
  kNumFunctionWords,
  kI,
  kAnalytic,
  kSixltr,
  kInsight,
};

inline constexpr std::size_t kNumFeatures = 17;

inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames{
    "num_verbs",      "num_modifiers",      "av_sent_len",     "av_word_len",
    "num_modal_verbs", "lexical_diversity", "num_chars",       "num_punctuation",
    "num_sentences",  "num_adjectives",     "num_adverbs",     "num_nouns",
    "num_function_words", "I",              "Analytic",        "Sixltr",
    "insight",
};

std::vector<std::string> feature_names();
std::optional<std::size_t> feature_index(std::string_view name);

struct FeatureVector {
  std::array<double, kNumFeatures> values{};

  double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
  double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
  std::span<const double> span() const { return values; }

  bool operator==(const FeatureVector&) const = default;
};

// Word tags as a bit set.
enum Tag : std::uint8_t {
  kTagVerb = 1u << 0,
  kTagModal = 1u << 1,
  kTagNoun = 1u << 2,
  kTagAdjective = 1u << 3,
  kTagAdverb = 1u << 4,
  kTagFunction = 1u << 5,
  kTagPronounI = 1u << 6,
};
using TagSet = std::uint8_t;

std::optional<TagSet> parse_tag(std::string_view name);

enum class TokenKind { kWord, kPunctuation };

struct Token {
  std::string text;
  std::size_t length = 0;  // in code points
  TokenKind kind = TokenKind::kWord;
  TagSet tags = 0;  // always 0 for punctuation

  bool is_word() const { return kind == TokenKind::kWord; }
  bool has(Tag t) const { return (tags & t) != 0; }
};

struct Sentence {
  std::vector<Token> tokens;
};

struct TokenizedDocument {
  std::vector<Sentence> sentences;
  std::size_t char_count = 0;  // code points of the raw text, whitespace included

  std::size_t word_count() const;
  std::size_t punctuation_count() const;
};

// Word lists backing the tagger and the psycholinguistic counts. Immutable
// after load; safe to share between threads.
struct LexiconSet {
  std::unordered_set<std::string> modal_verbs;
  std::unordered_set<std::string> function_words;
  std::unordered_set<std::string> analytic_words;
  std::unordered_set<std::string> insight_words;
  std::unordered_map<std::string, TagSet> pos_lexicon;
  std::vector<std::pair<std::string, Tag>> suffix_rules;

  // Reads modal_verbs.txt, function_words.txt, analytic.txt, insight.txt,
  // pos_lexicon.tsv and suffix_rules.tsv from `dir`.
  static LexiconSet load(const std::filesystem::path& dir);

  // Tags for one word surface form.
  TagSet tag(std::string_view word) const;
};

std::filesystem::path default_lexicon_dir();

class Featurizer {
 public:
  explicit Featurizer(LexiconSet lexicons) : lex_(std::move(lexicons)) {}

  const LexiconSet& lexicons() const { return lex_; }

  // Sentences end at . ! ? followed by whitespace or end of text. Throws
  // DataError for empty or whitespace-only text.
  TokenizedDocument tokenize(std::string_view text) const;

  // Throws DataError when the document has no words.
  FeatureVector extract(const TokenizedDocument& doc) const;

  FeatureVector featurize(std::string_view text) const { return extract(tokenize(text)); }

 private:
  LexiconSet lex_;
};

struct FeaturizedCorpus {
  FeatureMatrix features{kNumFeatures};
  std::vector<int> labels;
};

// Row i holds the features of corpus document i. Errors name the index.
FeaturizedCorpus featurize_corpus(const Corpus& corpus, const Featurizer& featurizer);

// CSV with the 17 canonical names plus `label` as header.
std::string features_to_csv(const FeaturizedCorpus& data);

}  // namespace decepshap

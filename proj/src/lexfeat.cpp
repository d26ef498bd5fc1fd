#include "decepshap/lexfeat.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "decepshap/error.hpp"
#include "decepshap/io.hpp"

namespace decepshap {

namespace {

// ---------------------------------------------------------------------------
// UTF-8 scanning

struct CodePoint {
  char32_t value;
  std::size_t offset;  // byte offset into the text
  std::size_t bytes;
};

// Malformed sequences decode one byte at a time as U+FFFD.
std::vector<CodePoint> decode_utf8(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    char32_t cp = b0;
    if (b0 >= 0x80) {
      if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
      } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
      } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
      } else {
        len = 0;
      }
      if (len == 0 || i + len > text.size()) {
        out.push_back({U'�', i, 1});
        ++i;
        continue;
      }
      bool ok = true;
      for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(text[i + k]);
        if ((b & 0xC0) != 0x80) {
          ok = false;
          break;
        }
        cp = (cp << 6) | (b & 0x3F);
      }
      if (!ok) {
        out.push_back({U'�', i, 1});
        ++i;
        continue;
      }
    }
    out.push_back({cp, i, len});
    i += len;
  }
  return out;
}

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' ||
         c == U'\f' || c == U' ';
}

// Apostrophes and hyphens: part of a word when inside one, punctuation when
// they stand alone or sit at a word's edge.
bool is_joiner(char32_t c) {
  return c == U'\'' || c == U'-' || c == U'‘' || c == U'’';
}

bool is_punctuation(char32_t c) {
  switch (c) {
    case U'.': case U',': case U';': case U':': case U'!': case U'?':
    case U'"': case U'(': case U')': case U'[': case U']': case U'{': case U'}':
    case U'“': case U'”': case U'–': case U'—': case U'…':
      return true;
    default:
      return is_joiner(c);
  }
}

bool is_word_core(char32_t c) {
  if (c < 0x80) {
    return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9');
  }
  return !is_space(c) && !is_punctuation(c);
}

bool is_terminal(char32_t c) { return c == U'.' || c == U'!' || c == U'?'; }

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

bool has_upper(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

std::size_t utf8_length(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> read_entries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file " + path.string());
  std::vector<std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    if (has_upper(entry)) {
      throw DataError(path.filename().string() + ":" + std::to_string(line_no) +
                      ": lexicon entries must be lowercase");
    }
    out.push_back(std::move(entry));
  }
  if (out.empty()) throw DataError("lexicon file " + path.string() + " is empty");
  return out;
}

std::unordered_set<std::string> read_set(const std::filesystem::path& path) {
  auto entries = read_entries(path);
  return {std::make_move_iterator(entries.begin()), std::make_move_iterator(entries.end())};
}

std::pair<std::string, std::string> split_tab(const std::filesystem::path& path,
                                              std::string_view line) {
  const auto tab = line.find('\t');
  if (tab == std::string_view::npos) {
    throw DataError(path.filename().string() + ": expected word<TAB>tag, got \"" +
                    std::string(line) + "\"");
  }
  return {trim(line.substr(0, tab)), trim(line.substr(tab + 1))};
}

}  // namespace

std::vector<std::string> feature_names() {
  return {kFeatureNames.begin(), kFeatureNames.end()};
}

std::optional<std::size_t> feature_index(std::string_view name) {
  const auto it = std::find(kFeatureNames.begin(), kFeatureNames.end(), name);
  if (it == kFeatureNames.end()) return std::nullopt;
  return static_cast<std::size_t>(it - kFeatureNames.begin());
}

std::optional<TagSet> parse_tag(std::string_view name) {
  if (name == "verb") return kTagVerb;
  if (name == "modal") return kTagModal;
  if (name == "noun") return kTagNoun;
  if (name == "adjective") return kTagAdjective;
  if (name == "adverb") return kTagAdverb;
  if (name == "function") return kTagFunction;
  if (name == "pronoun-I") return kTagPronounI;
  return std::nullopt;
}

std::size_t TokenizedDocument::word_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) {
    n += static_cast<std::size_t>(
        std::count_if(s.tokens.begin(), s.tokens.end(), [](const Token& t) { return t.is_word(); }));
  }
  return n;
}

std::size_t TokenizedDocument::punctuation_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) {
    n += static_cast<std::size_t>(std::count_if(
        s.tokens.begin(), s.tokens.end(), [](const Token& t) { return !t.is_word(); }));
  }
  return n;
}

LexiconSet LexiconSet::load(const std::filesystem::path& dir) {
  LexiconSet lex;
  lex.modal_verbs = read_set(dir / "modal_verbs.txt");
  lex.function_words = read_set(dir / "function_words.txt");
  lex.analytic_words = read_set(dir / "analytic.txt");
  lex.insight_words = read_set(dir / "insight.txt");

  const auto pos_path = dir / "pos_lexicon.tsv";
  for (const auto& line : read_entries(pos_path)) {
    auto [word, tag_list] = split_tab(pos_path, line);
    TagSet tags = 0;
    std::stringstream ss(tag_list);
    std::string name;
    while (std::getline(ss, name, ',')) {
      const auto tag = parse_tag(trim(name));
      if (!tag) throw DataError(pos_path.filename().string() + ": unknown tag \"" + name + "\"");
      tags |= *tag;
    }
    if (tags & kTagModal) tags |= kTagVerb;
    lex.pos_lexicon[word] |= tags;
  }

  const auto suffix_path = dir / "suffix_rules.tsv";
  for (const auto& line : read_entries(suffix_path)) {
    auto [suffix, tag_name] = split_tab(suffix_path, line);
    const auto tag = parse_tag(tag_name);
    if (!tag || suffix.empty()) {
      throw DataError(suffix_path.filename().string() + ": bad rule \"" + line + "\"");
    }
    lex.suffix_rules.emplace_back(std::move(suffix), static_cast<Tag>(*tag));
  }
  return lex;
}

TagSet LexiconSet::tag(std::string_view word) const {
  const std::string lower = ascii_lower(word);
  TagSet tags = 0;
  if (modal_verbs.contains(lower)) tags |= kTagVerb | kTagModal;
  if (function_words.contains(lower)) tags |= kTagFunction;
  if (word == "I" || word == "i") tags |= kTagPronounI;

  if (const auto it = pos_lexicon.find(lower); it != pos_lexicon.end()) {
    tags |= it->second;
  } else if ((tags & (kTagVerb | kTagModal | kTagFunction)) == 0) {
    const std::size_t len = utf8_length(lower);
    for (const auto& [suffix, tag] : suffix_rules) {
      if (lower.ends_with(suffix) && len >= utf8_length(suffix) + 3) {
        tags |= tag;
        break;
      }
    }
  }
  return tags;
}

std::filesystem::path default_lexicon_dir() {
  return std::filesystem::path(DECEPSHAP_DATA_DIR) / "lexicons";
}

TokenizedDocument Featurizer::tokenize(std::string_view text) const {
  const auto cps = decode_utf8(text);
  if (std::all_of(cps.begin(), cps.end(), [](const CodePoint& c) { return is_space(c.value); })) {
    throw DataError("text is empty");
  }

  TokenizedDocument doc;
  doc.char_count = cps.size();

  std::vector<Sentence> raw;
  Sentence current;
  auto punct = [&](std::size_t k) {
    current.tokens.push_back(
        {std::string(text.substr(cps[k].offset, cps[k].bytes)), 1, TokenKind::kPunctuation, 0});
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t c = cps[i].value;
    if (is_word_core(c) || is_joiner(c)) {
      std::size_t j = i;
      while (j < cps.size() && (is_word_core(cps[j].value) || is_joiner(cps[j].value))) ++j;
      std::size_t first = i;
      while (first < j && !is_word_core(cps[first].value)) ++first;
      if (first == j) {
        for (std::size_t k = i; k < j; ++k) punct(k);
      } else {
        std::size_t last = j;
        while (!is_word_core(cps[last - 1].value)) --last;
        for (std::size_t k = i; k < first; ++k) punct(k);
        const std::size_t begin = cps[first].offset;
        const std::size_t end = cps[last - 1].offset + cps[last - 1].bytes;
        Token word{std::string(text.substr(begin, end - begin)), last - first,
                   TokenKind::kWord, 0};
        word.tags = lex_.tag(word.text);
        current.tokens.push_back(std::move(word));
        for (std::size_t k = last; k < j; ++k) punct(k);
      }
      i = j;
      continue;
    }
    if (is_punctuation(c)) {
      punct(i);
      if (is_terminal(c) && (i + 1 == cps.size() || is_space(cps[i + 1].value))) {
        raw.push_back(std::move(current));
        current = {};
      }
    }
    ++i;
  }
  if (!current.tokens.empty()) raw.push_back(std::move(current));

  // Segments without words fold into the previous sentence, or the next one
  // when they open the document.
  std::vector<Token> pending;
  for (auto& s : raw) {
    const bool has_word = std::any_of(s.tokens.begin(), s.tokens.end(),
                                      [](const Token& t) { return t.is_word(); });
    if (has_word) {
      if (!pending.empty()) {
        s.tokens.insert(s.tokens.begin(), std::make_move_iterator(pending.begin()),
                        std::make_move_iterator(pending.end()));
        pending.clear();
      }
      doc.sentences.push_back(std::move(s));
    } else if (!doc.sentences.empty()) {
      auto& prev = doc.sentences.back().tokens;
      prev.insert(prev.end(), std::make_move_iterator(s.tokens.begin()),
                  std::make_move_iterator(s.tokens.end()));
    } else {
      pending.insert(pending.end(), std::make_move_iterator(s.tokens.begin()),
                     std::make_move_iterator(s.tokens.end()));
    }
  }
  if (!pending.empty()) {
    if (doc.sentences.empty()) {
      doc.sentences.push_back({std::move(pending)});
    } else {
      auto& prev = doc.sentences.back().tokens;
      prev.insert(prev.end(), pending.begin(), pending.end());
    }
  }
  return doc;
}

FeatureVector Featurizer::extract(const TokenizedDocument& doc) const {
  std::size_t words = 0, punctuation = 0, total_len = 0;
  std::size_t verbs = 0, modals = 0, nouns = 0, adjectives = 0, adverbs = 0, function = 0;
  std::size_t pronoun_i = 0, analytic = 0, insight = 0, sixltr = 0;
  std::unordered_set<std::string> distinct;

  for (const auto& sentence : doc.sentences) {
    for (const auto& tok : sentence.tokens) {
      if (!tok.is_word()) {
        ++punctuation;
        continue;
      }
      ++words;
      total_len += tok.length;
      if (tok.has(kTagVerb)) ++verbs;
      if (tok.has(kTagModal)) ++modals;
      if (tok.has(kTagNoun)) ++nouns;
      if (tok.has(kTagAdjective)) ++adjectives;
      if (tok.has(kTagAdverb)) ++adverbs;
      if (tok.has(kTagFunction)) ++function;
      if (tok.text == "I" || tok.text == "i") ++pronoun_i;
      if (tok.length > 6) ++sixltr;
      auto lower = ascii_lower(tok.text);
      if (lex_.analytic_words.contains(lower)) ++analytic;
      if (lex_.insight_words.contains(lower)) ++insight;
      distinct.insert(std::move(lower));
    }
  }
  if (words == 0 || doc.sentences.empty()) {
    throw DataError("document has no words");
  }

  const auto n_words = static_cast<double>(words);
  FeatureVector fv;
  fv[Feature::kNumVerbs] = static_cast<double>(verbs);
  fv[Feature::kNumModifiers] = static_cast<double>(adjectives + adverbs);
  fv[Feature::kAvSentLen] = n_words / static_cast<double>(doc.sentences.size());
  fv[Feature::kAvWordLen] = static_cast<double>(total_len) / n_words;
  fv[Feature::kNumModalVerbs] = static_cast<double>(modals);
  fv[Feature::kLexicalDiversity] = static_cast<double>(distinct.size()) / n_words;
  fv[Feature::kNumChars] = static_cast<double>(doc.char_count);
  fv[Feature::kNumPunctuation] = static_cast<double>(punctuation);
  fv[Feature::kNumSentences] = static_cast<double>(doc.sentences.size());
  fv[Feature::kNumAdjectives] = static_cast<double>(adjectives);
  fv[Feature::kNumAdverbs] = static_cast<double>(adverbs);
  fv[Feature::kNumNouns] = static_cast<double>(nouns);
  fv[Feature::kNumFunctionWords] = static_cast<double>(function);
  fv[Feature::kI] = static_cast<double>(pronoun_i);
  fv[Feature::kAnalytic] = static_cast<double>(analytic);
  fv[Feature::kSixltr] = static_cast<double>(sixltr);
  fv[Feature::kInsight] = static_cast<double>(insight);
  return fv;
}

FeaturizedCorpus featurize_corpus(const Corpus& corpus, const Featurizer& featurizer) {
  FeaturizedCorpus out;
  out.labels.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& doc = corpus.documents[i];
    try {
      validate_document(doc);
      out.features.append_row(featurizer.featurize(doc.text).span());
    } catch (const DataError& e) {
      throw DataError("document " + std::to_string(i) + ": " + e.what());
    }
    out.labels.push_back(static_cast<int>(doc.label));
  }
  return out;
}

std::string features_to_csv(const FeaturizedCorpus& data) {
  std::string out;
  for (const auto& name : kFeatureNames) {
    out += name;
    out += ',';
  }
  out += "label\n";
  for (std::size_t i = 0; i < data.features.rows(); ++i) {
    for (double v : data.features.row(i)) {
      out += format_double(v);
      out += ',';
    }
    out += std::to_string(data.labels[i]);
    out += '\n';
  }
  return out;
}

}  // namespace decepshap

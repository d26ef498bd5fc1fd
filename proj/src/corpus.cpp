#include "decepshap/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include "decepshap/error.hpp"
#include "json.hpp"

namespace decepshap {

namespace {

constexpr std::array<std::pair<Source, std::string_view>, 6> kSourceNames{{
    {Source::kDIS, "DIS"},
    {Source::kEN, "EN"},
    {Source::kFB, "FB"},
    {Source::kPOS, "POS"},
    {Source::kNEG, "NEG"},
    {Source::kSYN, "SYN"},
}};

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  });
}

std::string line_error(const std::string& name, std::size_t line,
                       const std::string& what) {
  std::ostringstream os;
  os << name << ":" << line << ": " << what;
  return os.str();
}

}  // namespace

std::string_view to_string(Source s) {
  for (const auto& [src, name] : kSourceNames) {
    if (src == s) return name;
  }
  return "SYN";
}

std::optional<Source> parse_source(std::string_view s) {
  for (const auto& [src, name] : kSourceNames) {
    if (name == s) return src;
  }
  return std::nullopt;
}

void validate_document(const LabeledDocument& doc) {
  const int label = static_cast<int>(doc.label);
  if (label != 0 && label != 1) {
    throw DataError("label must be 0 or 1, got " + std::to_string(label));
  }
  if (is_blank(doc.text)) {
    throw DataError("document text is empty");
  }
}

Corpus parse_corpus(std::string_view jsonl, Source source, std::string name) {
  Corpus corpus;
  corpus.name = std::move(name);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    const std::size_t end = std::min(jsonl.find('\n', pos), jsonl.size());
    std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    // A trailing newline at end of file is not an extra record.
    if (line.empty() && pos >= jsonl.size()) break;

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(line_error(corpus.name, line_no, "malformed JSON"));
    }
    if (!obj.is_object() || obj.size() != 2 || !obj.contains("text") ||
        !obj.contains("label")) {
      throw DataError(line_error(corpus.name, line_no,
                                 "expected exactly the keys \"text\" and \"label\""));
    }
    const auto& text = obj["text"];
    const auto& label = obj["label"];
    if (!text.is_string()) {
      throw DataError(line_error(corpus.name, line_no, "\"text\" must be a string"));
    }
    if (!label.is_number_integer()) {
      throw DataError(line_error(corpus.name, line_no, "\"label\" must be an integer"));
    }
    const auto value = label.get<long long>();
    if (value != 0 && value != 1) {
      throw DataError(line_error(corpus.name, line_no,
                                 "label must be 0 or 1, got " + std::to_string(value)));
    }
    LabeledDocument doc{text.get<std::string>(), static_cast<Label>(value), source};
    if (is_blank(doc.text)) {
      throw DataError(line_error(corpus.name, line_no, "empty text"));
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, Source source) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open corpus file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), source, path.filename().string());
}

std::string to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& doc : corpus.documents) {
    nlohmann::ordered_json obj;
    obj["text"] = doc.text;
    obj["label"] = static_cast<int>(doc.label);
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  // 2^64 mod n, computed without overflow.
  const std::uint64_t rem = (std::numeric_limits<std::uint64_t>::max() % n + 1) % n;
  for (;;) {
    const std::uint64_t v = rng();
    // Accept v < 2^64 - rem.
    if (rem == 0 || v < std::numeric_limits<std::uint64_t>::max() - rem + 1) {
      return v % n;
    }
  }
}

std::vector<std::size_t> seeded_permutation(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

HybridSplit make_hybrid_split(const Corpus& dis, const Corpus& partner,
                              std::size_t train_size, std::size_t test_size,
                              std::uint64_t seed) {
  if (train_size == 0 || test_size == 0) {
    throw DataError("train and test sizes must be positive");
  }
  const std::size_t half = train_size / 2;
  const std::size_t rest = train_size - half;
  if (dis.size() < half + test_size) {
    throw DataError("insufficient disinformation documents: need " +
                    std::to_string(half + test_size) + ", have " +
                    std::to_string(dis.size()));
  }
  if (partner.size() < rest) {
    throw DataError("insufficient partner documents: need " + std::to_string(rest) +
                    ", have " + std::to_string(partner.size()));
  }

  std::mt19937_64 rng(seed);
  const auto dis_order = seeded_permutation(rng, dis.size());
  const auto partner_order = seeded_permutation(rng, partner.size());

  HybridSplit split;
  split.seed = seed;
  split.recipe.dis_source =
      dis.documents.empty() ? Source::kDIS : dis.documents.front().source;
  split.recipe.partner_source =
      partner.documents.empty() ? Source::kSYN : partner.documents.front().source;
  split.recipe.train_size = train_size;
  split.recipe.test_size = test_size;
  split.train.name = dis.name + "+" + partner.name + ":train";
  split.test.name = dis.name + ":test";

  split.train_dis_indices.assign(dis_order.begin(), dis_order.begin() + half);
  split.test_dis_indices.assign(dis_order.begin() + half,
                                dis_order.begin() + half + test_size);
  split.train_partner_indices.assign(partner_order.begin(), partner_order.begin() + rest);

  split.train.documents.reserve(train_size);
  for (auto i : split.train_dis_indices) split.train.documents.push_back(dis.documents[i]);
  for (auto i : split.train_partner_indices) {
    split.train.documents.push_back(partner.documents[i]);
  }
  split.test.documents.reserve(test_size);
  for (auto i : split.test_dis_indices) split.test.documents.push_back(dis.documents[i]);
  return split;
}

}  // namespace decepshap

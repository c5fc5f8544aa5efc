#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace didots {

enum class Label { AD, CC };
enum class Split { TRAIN, VAL, TEST };
enum class Source { MANUAL, ASR, FIXTURE };

const char* label_name(Label l);
const char* split_name(Split s);
const char* source_name(Source s);
Label parse_label(const std::string& s);
Split parse_split(const std::string& s);
Source parse_source(const std::string& s);

// One sentence-level transcript unit. `text` always has at least three
// whitespace-delimited tokens once it lives inside a Corpus.
struct TranscriptSample {
  std::string id;
  std::string speaker;
  std::string text;
  Label label = Label::CC;
  Split split = Split::TRAIN;
  Source source = Source::MANUAL;
};

// Immutable after construction; samples are kept sorted by id and ids are
// pairwise distinct.
class Corpus {
 public:
  Corpus() = default;
  // Sorts by id and enforces uniqueness and the >=3-token rule.
  // Throws DUPLICATE_ID / MALFORMED_RECORD.
  Corpus(std::vector<TranscriptSample> samples, std::string provenance);

  const std::vector<TranscriptSample>& samples() const { return samples_; }
  const std::string& provenance() const { return provenance_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  const TranscriptSample* find(const std::string& id) const;
  Corpus filter_split(Split split) const;

 private:
  std::vector<TranscriptSample> samples_;
  std::string provenance_;
};

// Per-(split, label) sample counts.
struct SplitReport {
  std::map<std::pair<Split, Label>, std::size_t> counts;

  std::size_t total() const;
  std::size_t& cell(Split s, Label l) { return counts[{s, l}]; }
  std::size_t cell(Split s, Label l) const {
    auto it = counts.find({s, l});
    return it == counts.end() ? 0 : it->second;
  }
  bool operator==(const SplitReport&) const = default;
};

enum class CorpusFormat { JSONL, CSV };

struct LoadResult {
  Corpus corpus;
  std::size_t dropped = 0;  // records failing the >=3-word rule
};

// Reads one sample per JSONL line ({id, speaker?, text, label, split,
// source?}) or a headered CSV. Rows under three word tokens are dropped and
// counted. Throws MALFORMED_RECORD (with row index), DUPLICATE_ID,
// UNKNOWN_LABEL.
LoadResult load_corpus(const std::string& path, CorpusFormat format);

// Canonical JSONL serialization, one sample per line, UTF-8, sorted by id.
std::string to_jsonl(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::string& path);

// Sentence segmentation on {. ? !} with an abbreviation guard. Sentences
// under three word tokens are discarded. Ids are id_prefix + running index.
std::vector<TranscriptSample> segment_document(const std::string& document_text,
                                               const std::string& id_prefix);

SplitReport split_report(const Corpus& corpus);

// Returns the actual counts when they match `expected`; throws
// SPLIT_MISMATCH naming every differing cell otherwise.
SplitReport validate_splits(const Corpus& corpus, const SplitReport& expected);

// Deterministic synthetic corpus standing in for the restricted datasets.
// CC samples come from a clean sentence grammar; AD samples take the same
// grammar and inject fillers ("uh", "um"), immediate repetitions, and
// generic nouns. n_per_cell samples per (label x train/test) cell.
Corpus synth_fixture(std::uint64_t seed, std::size_t n_per_cell);

}  // namespace didots

#include "didots/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "didots/common.hpp"
#include "didots/text.hpp"

namespace didots {

using nlohmann::json;

const char* label_name(Label l) { return l == Label::AD ? "AD" : "CC"; }
const char* split_name(Split s) {
  switch (s) {
    case Split::TRAIN: return "train";
    case Split::VAL: return "val";
    case Split::TEST: return "test";
  }
  return "?";
}
const char* source_name(Source s) {
  switch (s) {
    case Source::MANUAL: return "manual";
    case Source::ASR: return "asr";
    case Source::FIXTURE: return "fixture";
  }
  return "?";
}

Label parse_label(const std::string& s) {
  std::string u = to_lower(s);
  if (u == "ad") return Label::AD;
  if (u == "cc") return Label::CC;
  throw Error(ErrorCode::UNKNOWN_LABEL, "'" + s + "' is not AD or CC");
}

Split parse_split(const std::string& s) {
  std::string u = to_lower(s);
  if (u == "train") return Split::TRAIN;
  if (u == "val" || u == "validation") return Split::VAL;
  if (u == "test") return Split::TEST;
  throw Error(ErrorCode::MALFORMED_RECORD, "unknown split '" + s + "'");
}

Source parse_source(const std::string& s) {
  std::string u = to_lower(s);
  if (u == "manual") return Source::MANUAL;
  if (u == "asr") return Source::ASR;
  if (u == "fixture") return Source::FIXTURE;
  throw Error(ErrorCode::MALFORMED_RECORD, "unknown source '" + s + "'");
}

Corpus::Corpus(std::vector<TranscriptSample> samples, std::string provenance)
    : samples_(std::move(samples)), provenance_(std::move(provenance)) {
  std::sort(samples_.begin(), samples_.end(),
            [](const TranscriptSample& a, const TranscriptSample& b) {
              return a.id < b.id;
            });
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (i > 0 && samples_[i].id == samples_[i - 1].id) {
      throw Error(ErrorCode::DUPLICATE_ID, "id '" + samples_[i].id + "'");
    }
    if (tokenize(samples_[i].text).size() < 3) {
      throw Error(ErrorCode::MALFORMED_RECORD,
                  "sample '" + samples_[i].id + "' has fewer than 3 word tokens");
    }
  }
}

const TranscriptSample* Corpus::find(const std::string& id) const {
  auto it = std::lower_bound(samples_.begin(), samples_.end(), id,
                             [](const TranscriptSample& s, const std::string& key) {
                               return s.id < key;
                             });
  if (it != samples_.end() && it->id == id) return &*it;
  return nullptr;
}

Corpus Corpus::filter_split(Split split) const {
  std::vector<TranscriptSample> kept;
  for (const auto& s : samples_) {
    if (s.split == split) kept.push_back(s);
  }
  return Corpus(std::move(kept), provenance_);
}

std::size_t SplitReport::total() const {
  std::size_t n = 0;
  for (const auto& [k, v] : counts) n += v;
  return n;
}

namespace {

// CHAT-style transcript annotations are flattened to plain text: bracketed
// operator groups are dropped, retrace angle brackets are unwrapped, event
// tokens (&=..., +...) are removed and partial-word parens are unwrapped.
std::string strip_transcript_markup(const std::string& text) {
  std::string pass1;
  int bracket_depth = 0;
  for (char c : text) {
    if (c == '[') { ++bracket_depth; continue; }
    if (c == ']') { if (bracket_depth > 0) --bracket_depth; continue; }
    if (bracket_depth > 0) continue;
    if (c == '<' || c == '>') continue;
    if (c == '(' || c == ')') continue;
    pass1.push_back(c);
  }
  std::vector<std::string> kept;
  for (auto& tok : tokenize(pass1)) {
    if (tok[0] == '&' || tok[0] == '+') continue;
    kept.push_back(tok);
  }
  return join(kept, " ");
}

TranscriptSample sample_from_json(const json& row, std::size_t row_index) {
  auto require = [&](const char* key) -> std::string {
    if (!row.contains(key) || !row[key].is_string()) {
      throw Error(ErrorCode::MALFORMED_RECORD,
                  "row " + std::to_string(row_index) + " missing field '" + key + "'");
    }
    return row[key].get<std::string>();
  };
  TranscriptSample s;
  s.id = require("id");
  s.text = strip_transcript_markup(require("text"));
  s.label = parse_label(require("label"));
  s.split = parse_split(require("split"));
  if (row.contains("speaker")) s.speaker = row["speaker"].get<std::string>();
  if (row.contains("source")) s.source = parse_source(row["source"].get<std::string>());
  return s;
}

// Minimal RFC-4180 style CSV row reader ("" escapes inside quoted fields).
std::vector<std::string> parse_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

LoadResult load_corpus(const std::string& path, CorpusFormat format) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IO_ERROR, "cannot open " + path);

  std::vector<TranscriptSample> rows;
  std::size_t dropped = 0;
  std::string line;
  std::size_t row_index = 0;

  if (format == CorpusFormat::JSONL) {
    while (std::getline(in, line)) {
      ++row_index;
      if (trim(line).empty()) continue;
      json row;
      try {
        row = json::parse(line);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::MALFORMED_RECORD,
                    "row " + std::to_string(row_index) + ": " + e.what());
      }
      TranscriptSample s = sample_from_json(row, row_index);
      if (tokenize(s.text).size() < 3) {
        ++dropped;
        continue;
      }
      rows.push_back(std::move(s));
    }
  } else {
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::MALFORMED_RECORD, "empty CSV file " + path);
    }
    std::vector<std::string> header = parse_csv_row(trim(line));
    auto column = [&](const std::string& name) -> int {
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (to_lower(trim(header[i])) == name) return static_cast<int>(i);
      }
      return -1;
    };
    int c_id = column("id"), c_text = column("text"), c_label = column("label"),
        c_split = column("split"), c_speaker = column("speaker"),
        c_source = column("source");
    if (c_id < 0 || c_text < 0 || c_label < 0 || c_split < 0) {
      throw Error(ErrorCode::MALFORMED_RECORD,
                  "CSV header must include id,text,label,split");
    }
    row_index = 1;
    while (std::getline(in, line)) {
      ++row_index;
      if (trim(line).empty()) continue;
      std::vector<std::string> f = parse_csv_row(line);
      auto get = [&](int c) -> std::string {
        if (c < 0 || c >= static_cast<int>(f.size())) {
          throw Error(ErrorCode::MALFORMED_RECORD,
                      "row " + std::to_string(row_index) + " is short");
        }
        return f[static_cast<std::size_t>(c)];
      };
      TranscriptSample s;
      s.id = trim(get(c_id));
      if (s.id.empty()) {
        throw Error(ErrorCode::MALFORMED_RECORD,
                    "row " + std::to_string(row_index) + " has empty id");
      }
      s.text = strip_transcript_markup(get(c_text));
      s.label = parse_label(trim(get(c_label)));
      s.split = parse_split(trim(get(c_split)));
      if (c_speaker >= 0 && c_speaker < static_cast<int>(f.size())) {
        s.speaker = f[static_cast<std::size_t>(c_speaker)];
      }
      if (c_source >= 0 && c_source < static_cast<int>(f.size()) &&
          !trim(f[static_cast<std::size_t>(c_source)]).empty()) {
        s.source = parse_source(trim(f[static_cast<std::size_t>(c_source)]));
      }
      if (tokenize(s.text).size() < 3) {
        ++dropped;
        continue;
      }
      rows.push_back(std::move(s));
    }
  }

  return LoadResult{Corpus(std::move(rows), path), dropped};
}

std::string to_jsonl(const Corpus& corpus) {
  std::ostringstream out;
  for (const auto& s : corpus.samples()) {
    json row;
    row["id"] = s.id;
    if (!s.speaker.empty()) row["speaker"] = s.speaker;
    row["text"] = s.text;
    row["label"] = label_name(s.label);
    row["split"] = split_name(s.split);
    row["source"] = source_name(s.source);
    out << row.dump() << "\n";
  }
  return out.str();
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IO_ERROR, "cannot write " + path);
  out << to_jsonl(corpus);
}

namespace {

const std::set<std::string>& abbreviation_whitelist() {
  static const std::set<std::string> kAbbrev = {
      "mr.", "mrs.", "ms.", "dr.", "st.", "jr.", "sr.",
      "e.g.", "i.e.", "etc.", "vs.", "no.", "approx.",
  };
  return kAbbrev;
}

}  // namespace

std::vector<TranscriptSample> segment_document(const std::string& document_text,
                                               const std::string& id_prefix) {
  std::vector<std::string> sentences;
  std::string cur;
  std::string plain = strip_transcript_markup(document_text);
  std::vector<std::string> toks = tokenize(plain);
  for (const auto& tok : toks) {
    if (!cur.empty()) cur += " ";
    cur += tok;
    char last = tok.empty() ? '\0' : tok.back();
    bool terminal = (last == '.' || last == '?' || last == '!');
    if (terminal && abbreviation_whitelist().count(to_lower(tok))) terminal = false;
    if (terminal) {
      sentences.push_back(cur);
      cur.clear();
    }
  }
  if (!trim(cur).empty()) sentences.push_back(cur);

  std::vector<TranscriptSample> out;
  std::size_t index = 0;
  for (const auto& sent : sentences) {
    if (tokenize(sent).size() < 3) continue;
    TranscriptSample s;
    s.id = id_prefix + std::to_string(index++);
    s.text = sent;
    out.push_back(std::move(s));
  }
  return out;
}

SplitReport split_report(const Corpus& corpus) {
  SplitReport report;
  for (const auto& s : corpus.samples()) report.cell(s.split, s.label) += 1;
  return report;
}

SplitReport validate_splits(const Corpus& corpus, const SplitReport& expected) {
  SplitReport actual = split_report(corpus);
  std::vector<std::string> mismatches;
  std::set<std::pair<Split, Label>> keys;
  for (const auto& [k, v] : actual.counts) keys.insert(k);
  for (const auto& [k, v] : expected.counts) keys.insert(k);
  for (const auto& [split, label] : keys) {
    std::size_t a = actual.cell(split, label);
    std::size_t e = expected.cell(split, label);
    if (a != e) {
      mismatches.push_back(std::string(split_name(split)) + "/" + label_name(label) +
                           ": expected " + std::to_string(e) + ", got " +
                           std::to_string(a));
    }
  }
  if (!mismatches.empty()) {
    throw Error(ErrorCode::SPLIT_MISMATCH, join(mismatches, "; "));
  }
  return actual;
}

namespace {

struct FixtureGrammar {
  std::vector<std::string> subjects = {
      "the boy", "the girl", "the mother", "the lady", "the dog", "the kid",
  };
  std::vector<std::string> verbs = {
      "takes", "washes", "drops", "watches", "climbs", "spills",
      "dries",  "opens",  "grabs", "reaches",
  };
  std::vector<std::string> objects = {
      "a cookie",   "the dishes", "the water", "the jar",  "the stool",
      "the plate",  "the curtain", "the sink", "the cup",  "the towel",
  };
  std::vector<std::string> tails = {
      "", "in the kitchen", "by the window", "on the counter", "near the sink",
  };
  std::vector<std::string> fillers = {"uh", "um"};
  std::vector<std::string> generic_objects = {"something", "the thing", "some stuff"};
};

std::vector<std::string> clean_sentence_tokens(const FixtureGrammar& g, Rng& rng) {
  std::vector<std::string> toks;
  auto push_phrase = [&](const std::string& phrase) {
    for (auto& t : tokenize(phrase)) toks.push_back(t);
  };
  push_phrase(g.subjects[rng.next_below(g.subjects.size())]);
  push_phrase(g.verbs[rng.next_below(g.verbs.size())]);
  push_phrase(g.objects[rng.next_below(g.objects.size())]);
  const std::string& tail = g.tails[rng.next_below(g.tails.size())];
  if (!tail.empty()) push_phrase(tail);
  return toks;
}

std::string finish_sentence(std::vector<std::string> toks) {
  std::string text = join(toks, " ");
  text += ".";
  return text;
}

std::string make_cc_text(const FixtureGrammar& g, Rng& rng) {
  return finish_sentence(clean_sentence_tokens(g, rng));
}

std::string make_ad_text(const FixtureGrammar& g, Rng& rng) {
  std::vector<std::string> toks;
  auto push_phrase = [&](const std::string& phrase) {
    for (auto& t : tokenize(phrase)) toks.push_back(t);
  };
  push_phrase(g.subjects[rng.next_below(g.subjects.size())]);
  push_phrase(g.verbs[rng.next_below(g.verbs.size())]);
  if (rng.next_double() < 0.5) {
    push_phrase(g.generic_objects[rng.next_below(g.generic_objects.size())]);
  } else {
    push_phrase(g.objects[rng.next_below(g.objects.size())]);
  }
  const std::string& tail = g.tails[rng.next_below(g.tails.size())];
  if (!tail.empty()) push_phrase(tail);

  // Immediate repetition of one token, half the time.
  if (rng.next_double() < 0.5) {
    std::size_t at = rng.next_below(toks.size());
    toks.insert(toks.begin() + static_cast<long>(at), toks[at]);
  }
  // Disfluency is the separating signal, so every AD sample gets several
  // fillers.
  std::size_t n_fillers = 2 + rng.next_below(2);
  for (std::size_t i = 0; i < n_fillers; ++i) {
    std::size_t at = rng.next_below(toks.size() + 1);
    toks.insert(toks.begin() + static_cast<long>(at),
                g.fillers[rng.next_below(g.fillers.size())]);
  }
  return finish_sentence(std::move(toks));
}

}  // namespace

Corpus synth_fixture(std::uint64_t seed, std::size_t n_per_cell) {
  if (n_per_cell < 1) {
    throw Error(ErrorCode::MALFORMED_RECORD, "n_per_cell must be >= 1");
  }
  FixtureGrammar grammar;
  Rng rng(seed);
  std::vector<TranscriptSample> samples;
  char id_buf[64];

  const Split splits[] = {Split::TRAIN, Split::TEST};
  const Label labels[] = {Label::AD, Label::CC};
  for (Split split : splits) {
    for (Label label : labels) {
      for (std::size_t i = 0; i < n_per_cell; ++i) {
        TranscriptSample s;
        std::snprintf(id_buf, sizeof(id_buf), "fx-%s-%s-%04zu", split_name(split),
                      to_lower(label_name(label)).c_str(), i);
        s.id = id_buf;
        s.label = label;
        s.split = split;
        s.source = Source::FIXTURE;
        s.speaker = label == Label::AD ? "par" : "ctl";
        s.text = label == Label::AD ? make_ad_text(grammar, rng)
                                    : make_cc_text(grammar, rng);
        samples.push_back(std::move(s));
      }
    }
  }
  return Corpus(std::move(samples),
                "fixture(seed=" + std::to_string(seed) +
                    ",n=" + std::to_string(n_per_cell) + ")");
}

}  // namespace didots

#include "didots/synthesis.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "didots/common.hpp"
#include "didots/text.hpp"

namespace didots {

using nlohmann::json;

const char* pair_flag_name(PairFlag f) {
  switch (f) {
    case PairFlag::REFUSAL: return "REFUSAL";
    case PairFlag::COPYING: return "COPYING";
    case PairFlag::INSTRUCTION_ECHO: return "INSTRUCTION_ECHO";
    case PairFlag::IDEM: return "IDEM";
    case PairFlag::EMPTY: return "EMPTY";
    case PairFlag::LOW_SEMANTIC: return "LOW_SEMANTIC";
    case PairFlag::ERRORED: return "ERRORED";
  }
  return "?";
}

PairFlag parse_pair_flag(const std::string& s) {
  for (PairFlag f : {PairFlag::REFUSAL, PairFlag::COPYING, PairFlag::INSTRUCTION_ECHO,
                     PairFlag::IDEM, PairFlag::EMPTY, PairFlag::LOW_SEMANTIC,
                     PairFlag::ERRORED}) {
    if (pair_flag_name(f) == s) return f;
  }
  throw Error(ErrorCode::MALFORMED_RECORD, "unknown flag '" + s + "'");
}

std::vector<const ObfuscationPair*> PairDataset::clean_pairs() const {
  std::vector<const ObfuscationPair*> out;
  for (const auto& p : pairs) {
    if (p.flags.empty()) out.push_back(&p);
  }
  return out;
}

void PairDataset::recompute_stats() {
  stats = PairStats{};
  stats.total = pairs.size();
  for (const auto& p : pairs) {
    if (p.flags.empty()) ++stats.clean;
    for (PairFlag f : p.flags) stats.flag_counts[f] += 1;
  }
}

// ---------------------------------------------------------------------------
// Cleaning

namespace {

const std::vector<std::string>& leading_labels() {
  static const std::vector<std::string> kLabels = {
      "paraphrase:", "output:",  "rewrite:",  "rewritten:", "answer:",
      "healthy:",    "sentence:", "result:",  "response:",
  };
  return kLabels;
}

std::string strip_quotes(std::string s) {
  auto is_quote = [](char c) { return c == '"' || c == '\''; };
  while (s.size() >= 2 && is_quote(s.front()) && s.back() == s.front()) {
    s = trim(s.substr(1, s.size() - 2));
  }
  return s;
}

}  // namespace

std::string clean_completion(const RawCompletion& raw, const RenderedPrompt& prompt) {
  // every line of the rendered prompt is scaffolding the model may echo
  std::set<std::string> scaffold;
  for (const auto& line : split_lines(prompt.text)) {
    std::string t = trim(line);
    if (!t.empty()) scaffold.insert(to_lower(t));
  }

  std::vector<std::string> kept;
  for (const auto& line : split_lines(raw.text)) {
    std::string t = trim(line);
    if (t.empty()) continue;
    if (scaffold.count(to_lower(t))) continue;
    kept.push_back(t);
  }
  std::string text = join(kept, " ");

  // delimiter markers never survive cleaning
  for (const std::string marker : {std::string(kMarkerOpen), std::string(kMarkerClose)}) {
    std::size_t at;
    while ((at = text.find(marker)) != std::string::npos) text.erase(at, marker.size());
  }

  text = trim(text);
  bool stripped = true;
  while (stripped) {
    stripped = false;
    for (const auto& label : leading_labels()) {
      if (to_lower(text).rfind(label, 0) == 0) {
        text = trim(text.substr(label.size()));
        stripped = true;
      }
    }
    std::string unquoted = strip_quotes(text);
    if (unquoted != text) {
      text = unquoted;
      stripped = true;
    }
  }
  return text;
}

// ---------------------------------------------------------------------------
// Failure triage

namespace {

const std::vector<std::string>& refusal_lexicon() {
  static const std::vector<std::string> kRefusals = {
      "i cannot",   "i can't",     "i am unable",  "i'm unable",
      "i won't",    "i will not",  "as an ai",     "cannot create",
      "can't create",
  };
  return kRefusals;
}

const std::vector<std::string>& idem_lexicon() {
  static const std::vector<std::string> kIdem = {
      "keep it the same", "no need to replace",  "no change needed",
      "already clear",    "remains the same",    "no rewrite needed",
      "leave it as is",
  };
  return kIdem;
}

double unigram_jaccard(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  if (sa.empty() || sb.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& w : sa) inter += sb.count(w);
  std::size_t uni = sa.size() + sb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

std::set<PairFlag> classify_failure(const std::string& original,
                                    const std::string& candidate,
                                    const PromptTemplate& tmpl,
                                    const FailureRules& rules) {
  std::set<PairFlag> flags;
  std::string trimmed = trim(candidate);
  if (trimmed.empty()) {
    flags.insert(PairFlag::EMPTY);
    return flags;
  }
  std::string low = to_lower(trimmed);
  for (const auto& phrase : refusal_lexicon()) {
    if (low.find(phrase) != std::string::npos) {
      flags.insert(PairFlag::REFUSAL);
      break;
    }
  }
  for (const auto& phrase : idem_lexicon()) {
    if (low.find(phrase) != std::string::npos) {
      flags.insert(PairFlag::IDEM);
      break;
    }
  }

  std::vector<std::string> cand_tokens = word_tokens(trimmed);
  std::string instruction_text = tmpl.instruction;
  for (const auto& s : tmpl.safeguards) instruction_text += "\n" + s;
  if (longest_common_run(cand_tokens, word_tokens(instruction_text)) >= 6) {
    flags.insert(PairFlag::INSTRUCTION_ECHO);
  }

  if (tmpl.strategy == Strategy::FS) {
    for (const auto& [text, label] : tmpl.exemplars) {
      if (unigram_jaccard(cand_tokens, word_tokens(text)) > rules.copying_threshold) {
        flags.insert(PairFlag::COPYING);
        break;
      }
    }
  }

  if (rules.semantic_scorer) {
    double score = rules.semantic_scorer(original, trimmed);
    if (score < rules.low_semantic_floor) flags.insert(PairFlag::LOW_SEMANTIC);
  }
  return flags;
}

// ---------------------------------------------------------------------------
// Pair building

PairDataset build_pairs(const Corpus& corpus, Strategy strategy, LlmClient& client,
                        const PromptTemplate& tmpl, const SynthesisOptions& options) {
  if (corpus.empty()) {
    throw Error(ErrorCode::EMPTY_TRAINSET, "corpus has no samples");
  }
  const auto& samples = corpus.samples();  // already ordered by id
  std::vector<ObfuscationPair> pairs(samples.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> errored{0};

  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= samples.size()) return;
      const TranscriptSample& sample = samples[i];
      ObfuscationPair pair;
      pair.original = sample;
      pair.strategy = strategy;
      pair.model_id = options.model_id;
      try {
        RenderedPrompt prompt = render(tmpl, sample);
        GenerationRequest request;
        request.model_id = options.model_id;
        request.prompt = prompt.text;
        request.max_tokens = options.max_tokens;
        request.temperature = options.temperature;
        request.seed = options.seed;
        RawCompletion raw = client.generate(request, sample.id);
        pair.obfuscated = clean_completion(raw, prompt);
        pair.flags = classify_failure(sample.text, pair.obfuscated, tmpl, options.rules);
      } catch (const Error&) {
        pair.flags.insert(PairFlag::ERRORED);
        errored.fetch_add(1);
      }
      pairs[i] = std::move(pair);
    }
  };

  int width = std::max(1, options.parallel);
  if (width == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(width));
    for (int t = 0; t < width; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  if (errored.load() * 2 > samples.size()) {
    throw Error(ErrorCode::ENDPOINT_UNREACHABLE,
                std::to_string(errored.load()) + "/" + std::to_string(samples.size()) +
                    " samples errored; aborting synthesis");
  }

  PairDataset dataset;
  dataset.pairs = std::move(pairs);
  dataset.recompute_stats();
  return dataset;
}

// ---------------------------------------------------------------------------
// Serialization

std::string pairs_to_jsonl(const PairDataset& dataset) {
  std::ostringstream out;
  for (const auto& p : dataset.pairs) {
    json row;
    row["id"] = p.original.id;
    row["original"] = p.original.text;
    row["obfuscated"] = p.obfuscated;
    row["strategy"] = strategy_name(p.strategy);
    row["model"] = p.model_id;
    json flags = json::array();
    for (PairFlag f : p.flags) flags.push_back(pair_flag_name(f));
    row["flags"] = flags;
    row["label"] = label_name(p.original.label);
    row["split"] = split_name(p.original.split);
    out << row.dump() << "\n";
  }
  return out.str();
}

void save_pairs(const PairDataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IO_ERROR, "cannot write " + path);
  out << pairs_to_jsonl(dataset);
}

PairDataset load_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IO_ERROR, "cannot open " + path);
  PairDataset dataset;
  std::string line;
  std::size_t row_index = 0;
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
    ObfuscationPair p;
    p.original.id = row.at("id").get<std::string>();
    p.original.text = row.at("original").get<std::string>();
    p.obfuscated = row.at("obfuscated").get<std::string>();
    p.strategy = parse_strategy(row.at("strategy").get<std::string>());
    p.model_id = row.value("model", "");
    if (row.contains("label")) p.original.label = parse_label(row["label"].get<std::string>());
    if (row.contains("split")) p.original.split = parse_split(row["split"].get<std::string>());
    for (const auto& f : row.at("flags")) {
      p.flags.insert(parse_pair_flag(f.get<std::string>()));
    }
    dataset.pairs.push_back(std::move(p));
  }
  std::sort(dataset.pairs.begin(), dataset.pairs.end(),
            [](const ObfuscationPair& a, const ObfuscationPair& b) {
              return a.original.id < b.original.id;
            });
  dataset.recompute_stats();
  return dataset;
}

}  // namespace didots

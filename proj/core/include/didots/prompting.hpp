#pragma once

#include <string>
#include <utility>
#include <vector>

#include "didots/corpus.hpp"

namespace didots {

enum class Strategy { ZS, FS, KB };

const char* strategy_name(Strategy s);
Strategy parse_strategy(const std::string& s);

// Marker pair wrapping the source sentence inside a rendered prompt. The
// markers never appear anywhere else in the prompt, so post-cleaning can
// recover the sentence exactly.
extern const char kMarkerOpen[];
extern const char kMarkerClose[];

struct PromptTemplate {
  std::string id;          // e.g. "kb-v1"
  Strategy strategy = Strategy::ZS;
  std::string instruction;
  std::vector<std::string> safeguards;
  // FS only: exactly 10 (text, label) pairs spanning both labels.
  std::vector<std::pair<std::string, Label>> exemplars;

  // Every line of the prompt scaffolding this template can emit; used by the
  // synthesis cleaner to drop echoed lines.
  std::vector<std::string> scaffold_lines() const;
};

struct RenderedPrompt {
  std::string template_id;
  std::string sentence_id;
  std::string text;
};

// The three instruction strategies shipped with the toolkit. FS carries ten
// exemplars of both classes; the KB instruction never mentions dementia.
PromptTemplate builtin_template(Strategy strategy);

// Deterministic prompt assembly with the sentence wrapped in the marker
// pair. Throws MARKER_COLLISION if the sentence contains either marker.
RenderedPrompt render(const PromptTemplate& tmpl, const TranscriptSample& sample);

// Plain-text template files with front-matter fields (strategy, safeguard,
// exemplar) separated from the instruction body by a "---" line.
PromptTemplate load_template(const std::string& path);
std::string template_to_string(const PromptTemplate& tmpl);
void save_template(const PromptTemplate& tmpl, const std::string& path);

// Extracts the marked sentence from a rendered prompt.
std::string extract_marked_sentence(const std::string& prompt_text);

}  // namespace didots

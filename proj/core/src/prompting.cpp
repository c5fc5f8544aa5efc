#include "didots/prompting.hpp"

#include <fstream>
#include <sstream>

#include "didots/common.hpp"
#include "didots/text.hpp"

namespace didots {

const char kMarkerOpen[] = "<<<";
const char kMarkerClose[] = ">>>";

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::ZS: return "zs";
    case Strategy::FS: return "fs";
    case Strategy::KB: return "kb";
  }
  return "?";
}

Strategy parse_strategy(const std::string& s) {
  std::string u = to_lower(s);
  if (u == "zs" || u == "zero-shot") return Strategy::ZS;
  if (u == "fs" || u == "few-shot") return Strategy::FS;
  if (u == "kb" || u == "knowledge-based") return Strategy::KB;
  throw Error(ErrorCode::CONFIG_INVALID, "unknown strategy '" + s + "'");
}

namespace {

std::vector<std::string> default_safeguards() {
  return {
      "Output only the rewritten sentence and nothing else.",
      "Do not add explanations, notes, labels, or quotation marks.",
      "Never refuse; always produce exactly one rewritten sentence.",
  };
}

std::vector<std::pair<std::string, Label>> builtin_exemplars() {
  return {
      {"and uh the boy he's taking taking a cookie.", Label::AD},
      {"the boy is taking a cookie from the jar.", Label::CC},
      {"um the water it's going all over the the place.", Label::AD},
      {"the water is overflowing from the sink.", Label::CC},
      {"she's uh doing something with the with the dishes.", Label::AD},
      {"she is washing the dishes at the sink.", Label::CC},
      {"and uh there's a thing um on the counter there.", Label::AD},
      {"there is a plate on the kitchen counter.", Label::CC},
      {"the uh the stool it's it's tipping I guess.", Label::AD},
      {"the stool is tipping over under the boy.", Label::CC},
  };
}

}  // namespace

std::vector<std::string> PromptTemplate::scaffold_lines() const {
  std::vector<std::string> lines;
  for (const auto& l : split_lines(instruction)) lines.push_back(trim(l));
  for (const auto& s : safeguards) lines.push_back(trim(s));
  if (strategy == Strategy::FS) {
    lines.push_back("Examples:");
    for (const auto& [text, label] : exemplars) {
      lines.push_back((label == Label::AD ? "dementia: " : "healthy: ") + text);
    }
  }
  lines.push_back("Rewrite:");
  return lines;
}

PromptTemplate builtin_template(Strategy strategy) {
  PromptTemplate t;
  t.strategy = strategy;
  t.safeguards = default_safeguards();
  switch (strategy) {
    case Strategy::ZS:
      t.id = "zs-v1";
      t.instruction =
          "The sentence given at the end was spoken by a person who may have "
          "dementia. Rewrite it so that any signs of dementia are hidden while "
          "the meaning stays the same.";
      break;
    case Strategy::FS:
      t.id = "fs-v1";
      t.instruction =
          "Here are ten examples of dementia and healthy samples. Follow the "
          "format to create both dementia and healthy samples: for the "
          "dementia sentence given at the end, write the matching healthy "
          "sentence.";
      t.exemplars = builtin_exemplars();
      break;
    case Strategy::KB:
      t.id = "kb-v1";
      t.instruction =
          "Clarify the sentence given at the end. Rewrite it so it is concise, "
          "fluent, and specific: remove filler words and repetitions, replace "
          "wordy or vague phrasing with precise wording, and prefer simple, "
          "clear vocabulary. Keep the original meaning.";
      break;
  }
  return t;
}

RenderedPrompt render(const PromptTemplate& tmpl, const TranscriptSample& sample) {
  if (sample.text.find(kMarkerOpen) != std::string::npos ||
      sample.text.find(kMarkerClose) != std::string::npos) {
    throw Error(ErrorCode::MARKER_COLLISION,
                "sentence '" + sample.id + "' contains a delimiter marker");
  }
  std::ostringstream out;
  out << tmpl.instruction << "\n";
  if (tmpl.strategy == Strategy::FS) {
    out << "\nExamples:\n";
    for (const auto& [text, label] : tmpl.exemplars) {
      out << (label == Label::AD ? "dementia: " : "healthy: ") << text << "\n";
    }
  }
  out << "\n";
  for (const auto& s : tmpl.safeguards) out << s << "\n";
  out << "\nSentence: " << kMarkerOpen << sample.text << kMarkerClose << "\n";
  out << "Rewrite:";

  RenderedPrompt p;
  p.template_id = tmpl.id;
  p.sentence_id = sample.id;
  p.text = out.str();
  while (!p.text.empty() &&
         std::isspace(static_cast<unsigned char>(p.text.back()))) {
    p.text.pop_back();
  }
  return p;
}

std::string extract_marked_sentence(const std::string& prompt_text) {
  std::size_t b = prompt_text.find(kMarkerOpen);
  if (b == std::string::npos) return "";
  b += std::string(kMarkerOpen).size();
  std::size_t e = prompt_text.find(kMarkerClose, b);
  if (e == std::string::npos) return "";
  return prompt_text.substr(b, e - b);
}

std::string template_to_string(const PromptTemplate& tmpl) {
  std::ostringstream out;
  out << "strategy: " << strategy_name(tmpl.strategy) << "\n";
  out << "id: " << tmpl.id << "\n";
  for (const auto& s : tmpl.safeguards) out << "safeguard: " << s << "\n";
  for (const auto& [text, label] : tmpl.exemplars) {
    out << "exemplar: " << label_name(label) << "|" << text << "\n";
  }
  out << "---\n" << tmpl.instruction << "\n";
  return out.str();
}

void save_template(const PromptTemplate& tmpl, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IO_ERROR, "cannot write " + path);
  out << template_to_string(tmpl);
}

PromptTemplate load_template(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IO_ERROR, "cannot open " + path);
  PromptTemplate t;
  std::string line;
  bool in_body = false;
  std::ostringstream body;
  bool body_started = false;
  while (std::getline(in, line)) {
    if (!in_body) {
      if (trim(line) == "---") {
        in_body = true;
        continue;
      }
      std::size_t colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = trim(line.substr(0, colon));
      std::string value = trim(line.substr(colon + 1));
      if (key == "strategy") {
        t.strategy = parse_strategy(value);
      } else if (key == "id") {
        t.id = value;
      } else if (key == "safeguard") {
        t.safeguards.push_back(value);
      } else if (key == "exemplar") {
        std::size_t bar = value.find('|');
        if (bar == std::string::npos) {
          throw Error(ErrorCode::CONFIG_INVALID,
                      "exemplar line needs LABEL|text in " + path);
        }
        t.exemplars.emplace_back(value.substr(bar + 1),
                                 parse_label(value.substr(0, bar)));
      }
    } else {
      if (body_started) body << "\n";
      body << line;
      body_started = true;
    }
  }
  t.instruction = trim(body.str());
  if (t.id.empty()) t.id = std::string(strategy_name(t.strategy)) + "-file";
  if (t.strategy == Strategy::FS && t.exemplars.size() != 10) {
    throw Error(ErrorCode::CONFIG_INVALID,
                "FS template must carry exactly 10 exemplars, got " +
                    std::to_string(t.exemplars.size()));
  }
  if (t.strategy == Strategy::KB && contains_ci(t.instruction, "dementia")) {
    throw Error(ErrorCode::CONFIG_INVALID,
                "KB instruction must not mention dementia");
  }
  return t;
}

}  // namespace didots

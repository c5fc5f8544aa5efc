#include "didots/lingfeat.hpp"

#include <cctype>
#include <set>

#include <nlohmann/json.hpp>

#include "didots/common.hpp"
#include "didots/text.hpp"

namespace didots {

using nlohmann::json;

const char* pos_tag_name(PosTag t) {
  switch (t) {
    case PosTag::INTJ: return "INTJ";
    case PosTag::ADV: return "ADV";
    case PosTag::NOUN: return "NOUN";
    case PosTag::VERB: return "VERB";
    case PosTag::MODAL: return "MODAL";
    case PosTag::DET: return "DET";
    case PosTag::PRON: return "PRON";
    case PosTag::ADP: return "ADP";
    case PosTag::ADJ: return "ADJ";
    case PosTag::CONJ: return "CONJ";
    case PosTag::NUM: return "NUM";
    case PosTag::OTHER: return "OTHER";
  }
  return "?";
}

namespace {

const std::set<std::string>& intj_lexicon() {
  static const std::set<std::string> kIntj = {
      "uh", "um", "er", "ah", "oh", "hm", "hmm", "huh", "eh",
      "yeah", "yep", "hey", "wow", "oops", "gee", "gosh",
  };
  return kIntj;
}

const std::set<std::string>& modal_lexicon() {
  static const std::set<std::string> kModal = {
      "can", "could", "may", "might", "must", "shall", "should",
      "will", "would", "can't", "cannot", "won't", "couldn't",
      "shouldn't", "wouldn't",
  };
  return kModal;
}

const std::set<std::string>& det_lexicon() {
  static const std::set<std::string> kDet = {
      "the", "a", "an", "this", "that", "these", "those", "some",
      "any", "each", "every", "no", "another", "both", "all",
  };
  return kDet;
}

const std::set<std::string>& pron_lexicon() {
  static const std::set<std::string> kPron = {
      "i", "you", "he", "she", "it", "we", "they", "me", "him", "her",
      "us", "them", "his", "hers", "its", "their", "theirs", "my",
      "mine", "your", "yours", "our", "ours", "himself", "herself",
      "itself", "themselves", "who", "whom", "someone", "anyone",
      "everyone", "nobody", "it's", "he's", "she's", "they're", "there's",
  };
  return kPron;
}

const std::set<std::string>& adp_lexicon() {
  static const std::set<std::string> kAdp = {
      "in", "on", "at", "by", "for", "with", "from", "to", "of",
      "near", "over", "under", "into", "onto", "out", "off", "up",
      "down", "about", "around", "through", "outside", "inside",
  };
  return kAdp;
}

const std::set<std::string>& conj_lexicon() {
  static const std::set<std::string> kConj = {
      "and", "or", "but", "so", "because", "if", "while", "when",
      "as", "than", "that",
  };
  return kConj;
}

const std::set<std::string>& adv_lexicon() {
  static const std::set<std::string> kAdv = {
      "very", "really", "quite", "just", "too", "also", "there", "here",
      "now", "then", "again", "always", "never", "often", "maybe",
      "perhaps", "almost", "away", "back", "still", "already", "somewhere",
      "anywhere", "everywhere", "not", "n't", "more", "most", "less",
  };
  return kAdv;
}

const std::set<std::string>& verb_lexicon() {
  static const std::set<std::string> kVerb = {
      "be", "is", "are", "was", "were", "am", "been", "being",
      "do", "does", "did", "doing", "done",
      "have", "has", "had", "having",
      "go", "goes", "went", "going", "gone",
      "get", "gets", "got", "getting",
      "make", "makes", "made", "making",
      "take", "takes", "took", "taking", "taken",
      "wash", "washes", "washed", "washing",
      "run", "runs", "ran", "running",
      "fall", "falls", "fell", "falling",
      "climb", "climbs", "climbed", "climbing",
      "spill", "spills", "spilled", "spilling",
      "dry", "dries", "dried", "drying",
      "open", "opens", "opened", "opening",
      "grab", "grabs", "grabbed", "grabbing",
      "reach", "reaches", "reached", "reaching",
      "watch", "watches", "watched", "watching",
      "drop", "drops", "dropped", "dropping",
      "see", "sees", "saw", "seen", "seeing",
      "say", "says", "said", "saying",
      "know", "knows", "knew", "knowing",
      "think", "thinks", "thought", "thinking",
      "look", "looks", "looked", "looking",
      "stand", "stands", "stood", "standing",
      "want", "wants", "wanted", "wanting",
      "try", "tries", "tried", "trying",
      "tip", "tips", "tipped", "tipping",
      "overflow", "overflows", "overflowing", "overflowed",
      "laugh", "laughs", "laughed", "laughing",
      "guess", "guesses", "guessed", "guessing",
  };
  return kVerb;
}

// nouns the -ing/-ed morphology rules would otherwise misread
const std::set<std::string>& noun_lexicon() {
  static const std::set<std::string> kNoun = {
      "thing", "things", "something", "anything", "everything", "nothing",
      "stuff", "morning", "evening", "ceiling", "building", "king", "ring",
      "spring", "string", "wing", "bed", "shed",
  };
  return kNoun;
}

const std::set<std::string>& number_lexicon() {
  static const std::set<std::string> kNum = {
      "one", "two", "three", "four", "five", "six", "seven", "eight",
      "nine", "ten", "zero",
  };
  return kNum;
}

bool all_digits(const std::string& w) {
  if (w.empty()) return false;
  for (char c : w) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

PosTag tag_word(const std::string& word, bool sentence_initial) {
  if (word == "well") return sentence_initial ? PosTag::INTJ : PosTag::ADV;
  if (intj_lexicon().count(word)) return PosTag::INTJ;
  if (modal_lexicon().count(word)) return PosTag::MODAL;
  if (det_lexicon().count(word)) return PosTag::DET;
  if (pron_lexicon().count(word)) return PosTag::PRON;
  if (noun_lexicon().count(word)) return PosTag::NOUN;
  if (verb_lexicon().count(word)) return PosTag::VERB;
  if (adp_lexicon().count(word)) return PosTag::ADP;
  if (conj_lexicon().count(word)) return PosTag::CONJ;
  if (adv_lexicon().count(word)) return PosTag::ADV;
  if (number_lexicon().count(word) || all_digits(word)) return PosTag::NUM;
  if (word.size() > 3 && word.compare(word.size() - 2, 2, "ly") == 0) return PosTag::ADV;
  if (word.size() > 4 && word.compare(word.size() - 3, 3, "ing") == 0) return PosTag::VERB;
  if (word.size() > 3 && word.compare(word.size() - 2, 2, "ed") == 0) return PosTag::VERB;
  return PosTag::NOUN;
}

}  // namespace

Tagger rule_tagger() {
  return [](const std::string& sentence) {
    std::vector<TaggedToken> out;
    bool first = true;
    for (const auto& w : word_tokens(sentence)) {
      out.push_back({w, tag_word(w, first)});
      first = false;
    }
    return out;
  };
}

namespace {

struct Tally {
  std::size_t total = 0, intj = 0, adv = 0, noun = 0, verb = 0, modal = 0;
  std::size_t generic_noun = 0, generic_verb = 0;
  std::size_t syllables = 0, words = 0;
};

void tally_sentence(const std::vector<TaggedToken>& tagged, const GenericLexicons& lex,
                    Tally& t) {
  std::set<std::string> generic_nouns(lex.nouns.begin(), lex.nouns.end());
  std::set<std::string> generic_verbs(lex.verbs.begin(), lex.verbs.end());
  for (const auto& [token, tag] : tagged) {
    ++t.total;
    int syl = syllable_count(token);
    if (syl > 0) {
      t.syllables += static_cast<std::size_t>(syl);
      ++t.words;
    }
    switch (tag) {
      case PosTag::INTJ: ++t.intj; break;
      case PosTag::ADV: ++t.adv; break;
      case PosTag::MODAL: ++t.modal; break;
      case PosTag::NOUN:
        ++t.noun;
        if (generic_nouns.count(token)) ++t.generic_noun;
        break;
      case PosTag::VERB:
        ++t.verb;
        if (generic_verbs.count(token)) ++t.generic_verb;
        break;
      default: break;
    }
  }
}

FeatureProfile profile_from_tally(const Tally& t) {
  FeatureProfile p;
  p.total_tokens = t.total;
  p.noun_count = t.noun;
  p.verb_count = t.verb;
  if (t.total == 0) return p;
  double total = static_cast<double>(t.total);
  p.prop_interjections = static_cast<double>(t.intj) / total;
  p.prop_adverbs = static_cast<double>(t.adv) / total;
  p.prop_nouns = static_cast<double>(t.noun) / total;
  p.prop_modals = static_cast<double>(t.modal) / total;
  p.prop_verbs = static_cast<double>(t.verb) / total;
  if (t.words > 0) {
    p.mean_syllables_per_word =
        static_cast<double>(t.syllables) / static_cast<double>(t.words);
  }
  if (t.noun > 0) {
    p.ratio_verbs_nouns = static_cast<double>(t.verb) / static_cast<double>(t.noun);
    p.ratio_adverbs_nouns = static_cast<double>(t.adv) / static_cast<double>(t.noun);
    p.generic_nouns = static_cast<double>(t.generic_noun) / static_cast<double>(t.noun);
  }
  if (t.verb > 0) {
    p.generic_verbs = static_cast<double>(t.generic_verb) / static_cast<double>(t.verb);
  }
  return p;
}

}  // namespace

FeatureProfile feature_profile(const std::vector<std::string>& texts,
                               const Tagger& tagger, const GenericLexicons& lexicons) {
  if (!tagger) throw Error(ErrorCode::TAGGER_FAILURE, "no tagger configured");
  Tally tally;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    std::vector<TaggedToken> tagged;
    try {
      tagged = tagger(texts[i]);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::TAGGER_FAILURE,
                  "sentence " + std::to_string(i) + ": " + e.what());
    }
    tally_sentence(tagged, lexicons, tally);
  }
  return profile_from_tally(tally);
}

FeatureProfile feature_profile(const Corpus& corpus, const Tagger& tagger,
                               const GenericLexicons& lexicons) {
  if (!tagger) throw Error(ErrorCode::TAGGER_FAILURE, "no tagger configured");
  Tally tally;
  for (const auto& sample : corpus.samples()) {
    std::vector<TaggedToken> tagged;
    try {
      tagged = tagger(sample.text);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::TAGGER_FAILURE, "sentence " + sample.id + ": " + e.what());
    }
    tally_sentence(tagged, lexicons, tally);
  }
  return profile_from_tally(tally);
}

namespace {

struct FeatureView {
  const char* name;
  const char* display;
  Direction desired;
  std::optional<double> base;
  std::optional<double> obf;
};

std::vector<FeatureView> feature_views(const FeatureProfile& base,
                                       const FeatureProfile& obf) {
  // Row order matches the reported feature table.
  return {
      {"prop_interjections", "Prop. Interjections", Direction::DOWN,
       base.prop_interjections, obf.prop_interjections},
      {"prop_adverbs", "Prop. Adverbs", Direction::DOWN, base.prop_adverbs,
       obf.prop_adverbs},
      {"mean_syllables_per_word", "Mean Syllables Per Word", Direction::UP,
       base.mean_syllables_per_word, obf.mean_syllables_per_word},
      {"prop_nouns", "Prop. Nouns", Direction::UP, base.prop_nouns, obf.prop_nouns},
      {"prop_modals", "Prop. Modals", Direction::UP, base.prop_modals, obf.prop_modals},
      {"prop_verbs", "Prop. Verbs", Direction::UP, base.prop_verbs, obf.prop_verbs},
      {"ratio_verbs_nouns", "Ratio Verbs/nouns", Direction::DOWN,
       base.ratio_verbs_nouns, obf.ratio_verbs_nouns},
      {"ratio_adverbs_nouns", "Ratio Adverbs/nouns", Direction::DOWN,
       base.ratio_adverbs_nouns, obf.ratio_adverbs_nouns},
      {"generic_nouns", "Generic. Nouns", Direction::DOWN, base.generic_nouns,
       obf.generic_nouns},
      {"generic_verbs", "Generic. Verbs", Direction::DOWN, base.generic_verbs,
       obf.generic_verbs},
  };
}

}  // namespace

ChangeReport percent_change(const FeatureProfile& base, const FeatureProfile& obfuscated) {
  ChangeReport report;
  for (const auto& view : feature_views(base, obfuscated)) {
    ChangeRow row;
    row.feature = view.name;
    row.display = view.display;
    row.desired = view.desired;
    if (!view.base.has_value() || !view.obf.has_value()) {
      row.note = "undefined (zero denominator)";
    } else if (*view.base == 0.0) {
      row.note = "zero baseline";
    } else {
      double change = 100.0 * (*view.obf - *view.base) / *view.base;
      row.pct_change = change;
      row.toward_control = view.desired == Direction::DOWN ? change < 0.0 : change > 0.0;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string feature_profile_to_json(const FeatureProfile& p) {
  json j;
  j["prop_interjections"] = p.prop_interjections;
  j["prop_adverbs"] = p.prop_adverbs;
  j["mean_syllables_per_word"] = p.mean_syllables_per_word;
  j["prop_nouns"] = p.prop_nouns;
  j["prop_modals"] = p.prop_modals;
  j["prop_verbs"] = p.prop_verbs;
  auto put_opt = [&](const char* key, const std::optional<double>& v) {
    if (v.has_value()) j[key] = *v;
    else j[key] = nullptr;
  };
  put_opt("ratio_verbs_nouns", p.ratio_verbs_nouns);
  put_opt("ratio_adverbs_nouns", p.ratio_adverbs_nouns);
  put_opt("generic_nouns", p.generic_nouns);
  put_opt("generic_verbs", p.generic_verbs);
  j["total_tokens"] = p.total_tokens;
  return j.dump(2);
}

std::string change_report_to_json(const ChangeReport& report, const FeatureProfile& base,
                                  const FeatureProfile& obfuscated) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    json r;
    r["feature"] = row.feature;
    r["display"] = row.display;
    r["desired"] = row.desired == Direction::DOWN ? "down" : "up";
    if (row.pct_change.has_value()) {
      r["pct_change"] = *row.pct_change;
      r["toward_control"] = row.toward_control;
    }
    if (!row.note.empty()) r["note"] = row.note;
    rows.push_back(std::move(r));
  }
  json j;
  j["rows"] = rows;
  j["base"] = json::parse(feature_profile_to_json(base));
  j["obfuscated"] = json::parse(feature_profile_to_json(obfuscated));
  j["schema_version"] = 1;
  return j.dump(2) + "\n";
}

}  // namespace didots

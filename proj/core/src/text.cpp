#include "didots/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "didots/common.hpp"

namespace didots {

double Rng::next_gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = next_double();
  } while (u1 <= 1e-300);
  double u2 = next_double();
  double mag = std::sqrt(-2.0 * std::log(u1));
  spare_ = mag * std::sin(2.0 * M_PI * u2);
  have_spare_ = true;
  return mag * std::cos(2.0 * M_PI * u2);
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MALFORMED_RECORD: return "MALFORMED_RECORD";
    case ErrorCode::DUPLICATE_ID: return "DUPLICATE_ID";
    case ErrorCode::UNKNOWN_LABEL: return "UNKNOWN_LABEL";
    case ErrorCode::SPLIT_MISMATCH: return "SPLIT_MISMATCH";
    case ErrorCode::MARKER_COLLISION: return "MARKER_COLLISION";
    case ErrorCode::ENDPOINT_UNREACHABLE: return "ENDPOINT_UNREACHABLE";
    case ErrorCode::BAD_RESPONSE: return "BAD_RESPONSE";
    case ErrorCode::TIMEOUT: return "TIMEOUT";
    case ErrorCode::UNKNOWN_TARGET: return "UNKNOWN_TARGET";
    case ErrorCode::RANK_TOO_LARGE: return "RANK_TOO_LARGE";
    case ErrorCode::EMPTY_TRAINSET: return "EMPTY_TRAINSET";
    case ErrorCode::NONFINITE_LOSS: return "NONFINITE_LOSS";
    case ErrorCode::UNSUPPORTED_KIND: return "UNSUPPORTED_KIND";
    case ErrorCode::NO_ADAPTER: return "NO_ADAPTER";
    case ErrorCode::EMPTY_VOCABULARY: return "EMPTY_VOCABULARY";
    case ErrorCode::SINGLE_CLASS_TRAINSET: return "SINGLE_CLASS_TRAINSET";
    case ErrorCode::SCORER_FAILURE: return "SCORER_FAILURE";
    case ErrorCode::ZERO_PROBABILITY: return "ZERO_PROBABILITY";
    case ErrorCode::TAGGER_FAILURE: return "TAGGER_FAILURE";
    case ErrorCode::ZERO_BASELINE: return "ZERO_BASELINE";
    case ErrorCode::MISSING_ARTIFACT: return "MISSING_ARTIFACT";
    case ErrorCode::CONFIG_INVALID: return "CONFIG_INVALID";
    case ErrorCode::RUN_LOCKED: return "RUN_LOCKED";
    case ErrorCode::IO_ERROR: return "IO_ERROR";
  }
  return "UNKNOWN";
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

static bool is_word_char(unsigned char c) {
  return std::isalnum(c) || c == '\'';
}

std::vector<std::string> word_tokens(const std::string& text) {
  std::vector<std::string> out;
  for (auto& raw : tokenize(text)) {
    std::size_t b = 0, e = raw.size();
    while (b < e && !is_word_char(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && !is_word_char(static_cast<unsigned char>(raw[e - 1]))) --e;
    if (e > b) out.push_back(to_lower(raw.substr(b, e - b)));
  }
  return out;
}

std::string to_lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool contains_ci(const std::string& haystack, const std::string& needle) {
  return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

static bool is_vowel(char c) {
  switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'a': case 'e': case 'i': case 'o': case 'u': case 'y':
      return true;
    default:
      return false;
  }
}

int syllable_count(const std::string& word) {
  int groups = 0;
  bool in_group = false;
  bool any_letter = false;
  for (char c : word) {
    if (std::isalpha(static_cast<unsigned char>(c))) any_letter = true;
    if (is_vowel(c)) {
      if (!in_group) ++groups;
      in_group = true;
    } else {
      in_group = false;
    }
  }
  if (!any_letter) return 0;
  return std::max(groups, 1);
}

std::size_t longest_common_run(const std::vector<std::string>& a,
                               const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = (a[i - 1] == b[j - 1]) ? prev[j - 1] + 1 : 0;
      best = std::max(best, cur[j]);
    }
    std::swap(prev, cur);
  }
  return best;
}

}  // namespace didots

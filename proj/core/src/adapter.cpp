#include "didots/adapter.hpp"

#include <algorithm>

#include "didots/common.hpp"
#include "didots/text.hpp"

namespace didots {

std::size_t registry_param_count(const ShapeRegistry& registry) {
  std::size_t total = 0;
  for (const auto& [name, shape] : registry) {
    total += static_cast<std::size_t>(shape.d) * static_cast<std::size_t>(shape.k);
  }
  return total;
}

const MatrixShape* registry_find(const ShapeRegistry& registry, const std::string& name) {
  for (const auto& [n, shape] : registry) {
    if (n == name) return &shape;
  }
  return nullptr;
}

std::vector<std::string> default_lora_targets(const ShapeRegistry& registry) {
  std::vector<std::string> out;
  auto ends_with = [](const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  for (const auto& [name, shape] : registry) {
    bool attention = name.find(".self.") != std::string::npos ||
                     name.find(".cross.") != std::string::npos;
    if (attention && (ends_with(name, ".q") || ends_with(name, ".v"))) {
      out.push_back(name);
    }
  }
  return out;
}

ShapeRegistry bart_base_shape_registry() {
  constexpr int kWidth = 768;
  constexpr int kFfn = 3072;
  constexpr int kVocab = 50265;
  constexpr int kPositions = 1026;
  constexpr int kLayers = 6;

  ShapeRegistry reg;
  reg.push_back({"embed.tok", {kVocab, kWidth}});
  reg.push_back({"enc.pos", {kPositions, kWidth}});
  reg.push_back({"dec.pos", {kPositions, kWidth}});
  auto add_attention = [&](const std::string& prefix) {
    for (const char* m : {"q", "k", "v", "o"}) {
      reg.push_back({prefix + "." + m, {kWidth, kWidth}});
    }
  };
  for (int i = 0; i < kLayers; ++i) {
    std::string p = "enc." + std::to_string(i);
    add_attention(p + ".self");
    reg.push_back({p + ".ffn.w1", {kWidth, kFfn}});
    reg.push_back({p + ".ffn.w2", {kFfn, kWidth}});
  }
  for (int i = 0; i < kLayers; ++i) {
    std::string p = "dec." + std::to_string(i);
    add_attention(p + ".self");
    add_attention(p + ".cross");
    reg.push_back({p + ".ffn.w1", {kWidth, kFfn}});
    reg.push_back({p + ".ffn.w2", {kFfn, kWidth}});
  }
  return reg;
}

const char* adapter_kind_name(AdapterKind k) {
  switch (k) {
    case AdapterKind::LORA: return "lora";
    case AdapterKind::IA3: return "ia3";
    case AdapterKind::BOTTLENECK: return "bottleneck";
  }
  return "?";
}

AdapterKind parse_adapter_kind(const std::string& s) {
  std::string u = to_lower(s);
  if (u == "lora") return AdapterKind::LORA;
  if (u == "ia3") return AdapterKind::IA3;
  if (u == "bottleneck" || u == "boft") return AdapterKind::BOTTLENECK;
  throw Error(ErrorCode::CONFIG_INVALID, "unknown adapter kind '" + s + "'");
}

std::size_t adapter_param_count(const AdapterSpec& spec, const ShapeRegistry& registry) {
  std::vector<std::string> targets =
      spec.targets.empty() ? default_lora_targets(registry) : spec.targets;
  std::size_t total = 0;
  for (const auto& name : targets) {
    const MatrixShape* shape = registry_find(registry, name);
    if (!shape) throw Error(ErrorCode::UNKNOWN_TARGET, "'" + name + "' not in registry");
    std::size_t d = static_cast<std::size_t>(shape->d);
    std::size_t k = static_cast<std::size_t>(shape->k);
    std::size_t r = static_cast<std::size_t>(spec.rank);
    switch (spec.kind) {
      case AdapterKind::LORA:
        if (spec.rank < 1 || r > std::min(d, k)) {
          throw Error(ErrorCode::RANK_TOO_LARGE,
                      "rank " + std::to_string(spec.rank) + " exceeds min(d,k) of '" +
                          name + "'");
        }
        total += r * (d + k);
        break;
      case AdapterKind::IA3:
        total += k;
        break;
      case AdapterKind::BOTTLENECK:
        if (spec.rank < 1 || r > k) {
          throw Error(ErrorCode::RANK_TOO_LARGE,
                      "bottleneck width " + std::to_string(spec.rank) +
                          " exceeds dim of '" + name + "'");
        }
        // down (k x r) + down bias (r) + up (r x k) + up bias (k)
        total += k * r + r + r * k + k;
        break;
    }
  }
  return total;
}

}  // namespace didots

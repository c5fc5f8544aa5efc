#pragma once

#include <string>
#include <utility>
#include <vector>

namespace didots {

struct MatrixShape {
  int d = 0;  // rows
  int k = 0;  // cols
};

// Enumerable set of named weight matrices with shapes; what adapters target.
using ShapeRegistry = std::vector<std::pair<std::string, MatrixShape>>;

std::size_t registry_param_count(const ShapeRegistry& registry);
const MatrixShape* registry_find(const ShapeRegistry& registry, const std::string& name);

// Query and value projections of every attention block (encoder self,
// decoder self, decoder cross).
std::vector<std::string> default_lora_targets(const ShapeRegistry& registry);

// Shape layout of a 140M-class 768-wide, 6+6-layer encoder-decoder: the
// reference registry for parameter-count checks at production scale.
ShapeRegistry bart_base_shape_registry();

enum class AdapterKind { LORA, IA3, BOTTLENECK };

const char* adapter_kind_name(AdapterKind k);
AdapterKind parse_adapter_kind(const std::string& s);

// Low-rank adaptation state attached to a frozen backend. For LORA each
// target (d, k) gains A (d x r) and B (r x k); the forward contribution is
// scaled by alpha / rank.
struct AdapterSpec {
  AdapterKind kind = AdapterKind::LORA;
  int rank = 16;
  double alpha = 32.0;
  std::vector<std::string> targets;  // empty selects default_lora_targets

  double scaling() const { return alpha / static_cast<double>(rank); }
};

// Trainable-parameter count:
//   LORA        sum over targets of r * (d + k)
//   IA3         sum of per-target scale-vector lengths (k)
//   BOTTLENECK  sum of k*r + r*k + biases (block input dim = target k)
// Throws UNKNOWN_TARGET / RANK_TOO_LARGE.
std::size_t adapter_param_count(const AdapterSpec& spec, const ShapeRegistry& registry);

}  // namespace didots

#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "sidl/tensor.hpp"
#include "sidl/toyworld.hpp"

namespace sidl {

// Embedding-space prior built from a corpus of reference embeddings:
// per-dimension mean, population std and extrema.
struct PriorSpace {
  Tensor C;                   // n x d
  std::vector<double> mu;     // d
  std::vector<double> sigma;  // d, all > 0
  std::vector<double> vmin;   // d
  std::vector<double> vmax;   // d
};

PriorSpace build_prior(const Tensor& rows);

// Standardize v_prime by its own scalar mean/std, then rescale into the
// prior's per-dimension statistics. Differentiable w.r.t. v_prime.
// eps_std guards the zero-spread singularity.
Tensor adain_land(const Tensor& v_prime, const PriorSpace& prior,
                  double eps_std = 1e-8);

using Tokenizer = std::function<std::vector<int>(const std::string&)>;

struct NameFilterResult {
  std::vector<std::string> accepted;           // two words, one token each
  std::array<std::size_t, 5> token_histogram;  // 2-word names by {2,3,4,5,6} tokens
};

// Keeps two-word names where each word maps to exactly one token, and
// reports the token-count histogram over all two-word names.
NameFilterResult filter_names(const std::vector<std::string>& names,
                              const Tokenizer& tokenizer);

// Deterministic greedy longest-match subword tokenizer over a fixed list.
Tokenizer toy_tokenizer();

enum class PriorMode { Shared, SlotSeparated };

// Prior rows from the frozen dictionary's identity-token embeddings:
// Shared pools first/last slots (2n rows), SlotSeparated returns one
// prior per slot.
std::vector<PriorSpace> dictionary_priors(const TokenDict& dict,
                                          PriorMode mode);

}  // namespace sidl

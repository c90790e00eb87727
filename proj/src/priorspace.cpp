#include "sidl/priorspace.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sidl {

PriorSpace build_prior(const Tensor& rows) {
  if (rows.shape().size() != 2)
    throw std::invalid_argument("build_prior: rows must be n x d");
  std::size_t n = rows.shape()[0], d = rows.shape()[1];
  if (n < 2) throw std::invalid_argument("build_prior: need n >= 2");
  PriorSpace p;
  p.C = rows.detach();
  p.mu.assign(d, 0.0);
  p.vmin.assign(d, 0.0);
  p.vmax.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double mn = rows.values()[j], mx = rows.values()[j], sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double v = rows.values()[i * d + j];
      sum += v;
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    p.mu[j] = sum / static_cast<double>(n);
    p.vmin[j] = mn;
    p.vmax[j] = mx;
  }
  p.sigma.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double dv = rows.values()[i * d + j] - p.mu[j];
      acc += dv * dv;
    }
    p.sigma[j] = std::sqrt(acc / static_cast<double>(n));
    if (p.sigma[j] == 0.0)
      throw std::invalid_argument("build_prior: degenerate dimension (sigma 0)");
  }
  return p;
}

Tensor adain_land(const Tensor& v_prime, const PriorSpace& prior,
                  double eps_std) {
  std::size_t d = prior.mu.size();
  if (v_prime.shape().size() != 1 || v_prime.size() != d)
    throw std::invalid_argument("adain_land: dimension mismatch");
  auto [m, s] = reduce_stats(v_prime, StatsAxis::All);
  if (s.value() <= eps_std)
    throw std::invalid_argument("adain_land: near-constant input (sigma ~ 0)");
  Tensor standardized = div(sub(v_prime, m), s);
  Tensor sigC = Tensor::from({d}, prior.sigma);
  Tensor muC = Tensor::from({d}, prior.mu);
  return add(mul(standardized, sigC), muC);
}

NameFilterResult filter_names(const std::vector<std::string>& names,
                              const Tokenizer& tokenizer) {
  NameFilterResult r;
  r.token_histogram.fill(0);
  for (const auto& name : names) {
    std::istringstream ss(name);
    std::vector<std::string> words;
    std::string w;
    while (ss >> w) words.push_back(w);
    if (words.size() != 2) continue;
    std::size_t total = 0;
    bool each_single = true;
    for (const auto& word : words) {
      auto toks = tokenizer(word);
      if (toks.empty())
        throw std::invalid_argument("filter_names: tokenizer produced no tokens");
      total += toks.size();
      if (toks.size() != 1) each_single = false;
    }
    if (total >= 2 && total <= 6) r.token_histogram[total - 2]++;
    if (each_single) r.accepted.push_back(name);
  }
  return r;
}

Tokenizer toy_tokenizer() {
  // Fixed subword list; longest match wins, unmatched characters fall
  // back to single-character tokens.
  static const std::vector<std::string> subwords = {
      "tom",  "cruise", "ann",  "lee",  "kim", "chan", "el",  "an",
      "ia",   "son",    "ton",  "der",  "ley", "mar",  "tin", "ro",
      "bert", "jo",     "hn",   "ha",   "ck",  "man",  "de",  "la",
      "ne",   "sch",    "berg", "ste",  "ven", "al",   "ex",  "ra",
      "li",   "na",     "sa",   "mi",   "th",  "wil",  "liam"};
  return [](const std::string& word) {
    std::string w;
    for (char c : word) w += static_cast<char>(std::tolower(c));
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos < w.size()) {
      std::size_t best_len = 0;
      int best_id = -1;
      for (std::size_t k = 0; k < subwords.size(); ++k) {
        const auto& sw = subwords[k];
        if (sw.size() > best_len && w.compare(pos, sw.size(), sw) == 0) {
          best_len = sw.size();
          best_id = static_cast<int>(k);
        }
      }
      if (best_id >= 0) {
        out.push_back(best_id);
        pos += best_len;
      } else {
        out.push_back(1000 + static_cast<unsigned char>(w[pos]));
        ++pos;
      }
    }
    return out;
  };
}

std::vector<PriorSpace> dictionary_priors(const TokenDict& dict,
                                          PriorMode mode) {
  std::size_t d = dict.embeddings.shape()[1];
  std::size_t n = static_cast<std::size_t>(dict.num_identities);
  const auto& emb = dict.embeddings.values();
  auto row_of = [&](int token, std::vector<double>& out) {
    for (std::size_t j = 0; j < d; ++j)
      out.push_back(emb[static_cast<std::size_t>(token) * d + j]);
  };
  if (mode == PriorMode::Shared) {
    std::vector<double> rows;
    rows.reserve(2 * n * d);
    for (std::size_t i = 0; i < n; ++i) {
      row_of(dict.id_token_first(static_cast<int>(i)), rows);
      row_of(dict.id_token_last(static_cast<int>(i)), rows);
    }
    return {build_prior(Tensor::from({2 * n, d}, std::move(rows)))};
  }
  std::vector<double> first_rows, last_rows;
  for (std::size_t i = 0; i < n; ++i) {
    row_of(dict.id_token_first(static_cast<int>(i)), first_rows);
    row_of(dict.id_token_last(static_cast<int>(i)), last_rows);
  }
  return {build_prior(Tensor::from({n, d}, std::move(first_rows))),
          build_prior(Tensor::from({n, d}, std::move(last_rows)))};
}

}  // namespace sidl

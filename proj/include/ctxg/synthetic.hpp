#ifndef CTXG_SYNTHETIC_HPP
#define CTXG_SYNTHETIC_HPP

#include <cstdint>

#include "ctxg/corpus.hpp"

namespace ctxg::data {

// Planted-signal corpus: the bias label is a pure function of the sensitive
// attributes (visible only through the context channel), while sentences and
// hypotheses are label-independent filler. A grounded model can separate the
// classes; a non-contextual one cannot do better than the base rate.
Corpus make_synthetic_corpus(std::size_t n, std::uint64_t seed);

}  // namespace ctxg::data

#endif  // CTXG_SYNTHETIC_HPP

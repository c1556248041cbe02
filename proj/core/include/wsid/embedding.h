// wsid/embedding.h

// Copyright 2026  The wsid Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef WSID_EMBEDDING_H_
#define WSID_EMBEDDING_H_

#include <span>

#include "wsid/corpus.h"

namespace wsid {

/// Returns v / ||v||.  Throws DataError for a zero (or non-finite) vector.
Embedding LengthNormalize(const Embedding &v);

/**
   Speaker-level embedding from utterance embeddings: each utterance is
   length-normalized, the normalized vectors are averaged, and the average is
   length-normalized again.  The result is invariant to utterance order and to
   positive rescaling of any single utterance.

   Throws DataError for an empty list, mismatched dimensions, a zero
   utterance, or a mean whose norm falls below 1e-12 (opposing utterances
   cancelling out).
*/
Embedding AggregateSpeakerEmbedding(std::span<const Embedding> utterances);

}  // namespace wsid

#endif  // WSID_EMBEDDING_H_

// Copyright 2026 The simuldec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SIMULDEC_CORPUS_HPP
#define SIMULDEC_CORPUS_HPP

#include <string>
#include <vector>

#include "core.hpp"

namespace simuldec {

// A parallel evaluation set: one source sentence per line plus one or more
// reference translations of it. Every sentence has the same number of
// references.
struct Corpus {
  std::vector<Sentence> sources;
  std::vector<std::vector<Sentence>> reference_sets;

  size_t size() const { return sources.size(); }
};

// Loads whitespace-tokenized UTF-8 text, one sentence per line. All files
// must have the same line count; a mismatch error names both files. Empty
// lines become empty sentences (decoders treat them as an immediate end).
// No markers are inserted. `reference_paths` may be empty when only
// decoding is wanted.
Corpus load_corpus(const std::string& source_path,
                   const std::vector<std::string>& reference_paths);

}  // namespace simuldec

#endif  // SIMULDEC_CORPUS_HPP

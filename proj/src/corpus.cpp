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

#include "corpus.hpp"

#include <fstream>

namespace simuldec {

namespace {

std::vector<Sentence> load_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  std::vector<Sentence> sentences;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    try {
      sentences.push_back(Sentence::from_line(line));
    } catch (const Error& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return sentences;
}

}  // namespace

Corpus load_corpus(const std::string& source_path,
                   const std::vector<std::string>& reference_paths) {
  Corpus corpus;
  corpus.sources = load_lines(source_path);
  corpus.reference_sets.resize(corpus.sources.size());
  for (const std::string& ref_path : reference_paths) {
    auto references = load_lines(ref_path);
    if (references.size() != corpus.sources.size()) {
      throw DataError("line count mismatch: " + source_path + " has " +
                      std::to_string(corpus.sources.size()) + " lines, " + ref_path + " has " +
                      std::to_string(references.size()));
    }
    for (size_t i = 0; i < references.size(); ++i) {
      corpus.reference_sets[i].push_back(std::move(references[i]));
    }
  }
  return corpus;
}

}  // namespace simuldec

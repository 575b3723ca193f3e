// Copyright 2026 The redmask Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <istream>

#include "redmask/error.hpp"
#include "redmask/io.hpp"

namespace redmask {

WordPieceVocab::WordPieceVocab(std::span<const std::string> pieces) {
  for (const std::string& p : pieces) {
    if (p.empty()) throw DataError("vocab: empty piece");
    if (!pieces_.insert(p).second) {
      throw DataError("vocab: duplicate piece '" + p + "'");
    }
    max_bytes_ = std::max(max_bytes_, p.size());
  }
}

namespace io {

WordPieceVocab read_vocab(std::istream& in) {
  std::vector<std::string> pieces;
  std::string line;
  std::size_t line_no = 0;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!seen.insert(line).second) {
      throw FormatError("vocab: duplicate piece '" + line + "'", line_no);
    }
    pieces.push_back(line);
  }
  return WordPieceVocab(pieces);
}

WordPieceVocab read_vocab(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("vocab: cannot open " + path.string());
  return read_vocab(in);
}

}  // namespace io
}  // namespace redmask

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

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <unistd.h>

#include "redmask/error.hpp"
#include "redmask/io.hpp"

namespace redmask {

void FeatureArchive::add(FeatureMatrix features) {
  const std::string& id = features.utt_id;
  if (id.empty()) throw DataError("feature archive: empty utt_id");
  for (unsigned char c : id) {
    if (std::isspace(c)) {
      throw DataError("feature archive: utt_id '" + id + "' contains whitespace");
    }
  }
  if (index_.contains(id)) {
    throw DataError("feature archive: duplicate utt_id '" + id + "'");
  }
  index_.emplace(id, entries_.size());
  entries_.push_back(std::move(features));
}

const FeatureMatrix* FeatureArchive::find(std::string_view utt_id) const {
  auto it = index_.find(std::string(utt_id));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

namespace io {

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError("cannot rename " + tmp.string() + " to " + path.string() +
                    ": " + ec.message());
  }
}

void write_feature_archive(const FeatureArchive& archive, std::ostream& out) {
  char buf[32];
  for (const FeatureMatrix& f : archive) {
    if (f.dim() == 0 && f.num_frames() > 0) {
      throw DataError("feature archive: '" + f.utt_id + "' has zero dims");
    }
    out << f.utt_id << "  [";
    if (f.num_frames() == 0) {
      out << " ]\n";
      continue;
    }
    out << '\n';
    for (std::size_t t = 0; t < f.num_frames(); ++t) {
      out << ' ';
      for (double v : f.data.row(t)) {
        std::snprintf(buf, sizeof(buf), " %.17g", v);
        out << buf;
      }
      out << (t + 1 == f.num_frames() ? " ]\n" : "\n");
    }
  }
}

void write_feature_archive(const FeatureArchive& archive,
                           const std::filesystem::path& path) {
  std::ostringstream ss;
  write_feature_archive(archive, ss);
  write_file_atomic(path, ss.str());
}

namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw FormatError("feature archive: bad number '" + std::string(tok) + "'",
                      line);
  }
  return v;
}

}  // namespace

FeatureArchive read_feature_archive(std::istream& in) {
  FeatureArchive archive;
  std::string line;
  std::size_t line_no = 0;

  bool in_matrix = false;
  FeatureMatrix current;
  std::vector<double> values;
  std::size_t cols = 0, rows = 0;

  auto finish = [&](std::size_t at_line) {
    current.data = Matrix(rows, cols, std::move(values));
    try {
      archive.add(std::move(current));
    } catch (const DataError& e) {
      throw FormatError(e.what(), at_line);
    }
    current = FeatureMatrix{};
    values.clear();
    cols = rows = 0;
    in_matrix = false;
  };

  // Consumes numeric tokens of one row, stopping at a closing bracket.
  auto take_row = [&](std::span<const std::string_view> toks) {
    bool closed = false;
    std::size_t n = 0;
    for (std::size_t k = 0; k < toks.size(); ++k) {
      if (toks[k] == "]") {
        if (k + 1 != toks.size()) {
          throw FormatError("feature archive: text after ']'", line_no);
        }
        closed = true;
        break;
      }
      if (toks[k] == "[") {
        throw FormatError("feature archive: unexpected '['", line_no);
      }
      values.push_back(parse_double(toks[k], line_no));
      ++n;
    }
    if (n > 0) {
      if (rows == 0) {
        cols = n;
      } else if (n != cols) {
        throw FormatError("feature archive: ragged row (" + std::to_string(n) +
                              " values, expected " + std::to_string(cols) + ")",
                          line_no);
      }
      ++rows;
    }
    if (closed) finish(line_no);
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (!in_matrix) {
      if (toks.size() < 2 || toks[1] != "[") {
        throw FormatError("feature archive: expected 'utt_id  ['", line_no);
      }
      current.utt_id = std::string(toks[0]);
      in_matrix = true;
      take_row(std::span(toks).subspan(2));
    } else {
      take_row(toks);
    }
  }
  if (in_matrix) {
    throw FormatError("feature archive: unterminated matrix '" +
                          current.utt_id + "'",
                      line_no);
  }
  return archive;
}

FeatureArchive read_feature_archive(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("feature archive: cannot open " + path.string());
  return read_feature_archive(in);
}

}  // namespace io
}  // namespace redmask

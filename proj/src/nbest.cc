// src/nbest.cc
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
//
// Copyright 2026 The Cascade Authors.
//
// N-best TSV and transcript file readers/writers.

#include "cascade/nbest.h"

#include <charconv>
#include <cmath>
#include <unordered_set>

#include "cascade/errors.h"

namespace cascade {
namespace {

std::vector<std::string_view> SplitTabs(std::string_view line,
                                        std::size_t max_fields) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (fields.size() + 1 < max_fields) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) break;
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  fields.push_back(line.substr(start));
  return fields;
}

std::string Chomp(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::optional<double> ParseDouble(std::string_view field) {
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    return std::nullopt;
  }
  return value;
}

void ValidateNBest(const NBestList &list) {
  if (list.hypotheses.empty()) {
    throw StructuralError("empty N-best list for utterance " + list.utt_id);
  }
  for (std::size_t i = 0; i < list.hypotheses.size(); ++i) {
    const Hypothesis &h = list.hypotheses[i];
    if (h.utt_id != list.utt_id) {
      throw StructuralError("utterance " + list.utt_id +
                            " contains a row for " + h.utt_id);
    }
    if (h.rank != static_cast<int>(i) + 1) {
      throw StructuralError("utterance " + list.utt_id + ": expected rank " +
                            std::to_string(i + 1) + ", found " +
                            std::to_string(h.rank));
    }
    if (i > 0 && h.total > list.hypotheses[i - 1].total) {
      throw StructuralError("utterance " + list.utt_id + ": total score of rank " +
                            std::to_string(h.rank) + " exceeds rank " +
                            std::to_string(h.rank - 1));
    }
  }
}

NBestReader::NBestReader(const std::string &path)
    : file_(std::make_unique<std::ifstream>(path, std::ios::binary)),
      in_(file_.get()),
      source_(path) {
  if (!*file_) throw DataError("cannot open " + path);
  ReadHeader();
}

NBestReader::NBestReader(std::istream &in, std::string source_name)
    : in_(&in), source_(std::move(source_name)) {
  ReadHeader();
}

void NBestReader::ReadHeader() {
  std::string line;
  if (!std::getline(*in_, line)) return;  // empty file, no lists
  ++line_;
  if (Chomp(line) != kNBestHeader) {
    throw ParseError(source_, line_, "expected N-best header '" +
                                         std::string(kNBestHeader) + "'");
  }
}

bool NBestReader::ReadRow(Hypothesis *row) {
  std::string raw;
  while (std::getline(*in_, raw)) {
    ++line_;
    std::string line = Chomp(std::move(raw));
    if (line.empty()) continue;
    auto fields = SplitTabs(line, 7);
    if (fields.size() != 7) {
      throw ParseError(source_, line_, "expected 7 tab-separated fields");
    }
    if (fields[0].empty()) throw ParseError(source_, line_, "empty utterance id");
    row->utt_id = std::string(fields[0]);
    int rank = 0;
    auto rr = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), rank);
    if (rr.ec != std::errc() || rr.ptr != fields[1].data() + fields[1].size() ||
        rank < 1) {
      throw ParseError(source_, line_, "bad rank '" + std::string(fields[1]) + "'");
    }
    row->rank = rank;
    const char *names[] = {"acoustic", "lm", "total", "confidence"};
    double *targets[] = {&row->acoustic, &row->lm, &row->total, &row->confidence};
    for (int k = 0; k < 4; ++k) {
      auto v = ParseDouble(fields[2 + k]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError(source_, line_, std::string("bad ") + names[k] +
                                             " score '" +
                                             std::string(fields[2 + k]) + "'");
      }
      *targets[k] = *v;
    }
    if (row->confidence < 0.0 || row->confidence > 1.0) {
      throw ParseError(source_, line_, "confidence outside [0, 1]");
    }
    try {
      row->tokens = Tokenize(NormalizeUtf8(fields[6]));
    } catch (const std::invalid_argument &e) {
      throw ParseError(source_, line_, e.what());
    }
    return true;
  }
  return false;
}

std::optional<NBestList> NBestReader::Next() {
  NBestList list;
  if (!pending_) {
    Hypothesis row;
    if (!ReadRow(&row)) return std::nullopt;
    pending_ = std::move(row);
  }
  list.utt_id = pending_->utt_id;
  for (const auto &done : finished_) {
    if (done == list.utt_id) {
      throw StructuralError(source_ + ": rows of utterance " + list.utt_id +
                            " are not consecutive");
    }
  }
  list.hypotheses.push_back(std::move(*pending_));
  pending_.reset();
  Hypothesis row;
  while (ReadRow(&row)) {
    if (row.utt_id != list.utt_id) {
      pending_ = std::move(row);
      break;
    }
    list.hypotheses.push_back(std::move(row));
  }
  ValidateNBest(list);
  finished_.push_back(list.utt_id);
  return list;
}

std::vector<NBestList> ReadNBest(const std::string &path) {
  NBestReader reader(path);
  std::vector<NBestList> lists;
  while (auto l = reader.Next()) lists.push_back(std::move(*l));
  return lists;
}

std::vector<NBestList> ReadNBest(std::istream &in,
                                 const std::string &source_name) {
  NBestReader reader(in, source_name);
  std::vector<NBestList> lists;
  while (auto l = reader.Next()) lists.push_back(std::move(*l));
  return lists;
}

void WriteNBest(const std::vector<NBestList> &lists, std::ostream &out) {
  out << kNBestHeader << '\n';
  for (const auto &list : lists) {
    for (const auto &h : list.hypotheses) {
      out << h.utt_id << '\t' << h.rank << '\t' << FormatDouble(h.acoustic)
          << '\t' << FormatDouble(h.lm) << '\t' << FormatDouble(h.total)
          << '\t' << FormatDouble(h.confidence) << '\t' << Join(h.tokens)
          << '\n';
    }
  }
}

std::vector<Transcript> ReadTranscripts(std::istream &in,
                                        const std::string &source_name) {
  std::vector<Transcript> out;
  std::unordered_set<std::string> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = Chomp(std::move(raw));
    if (line.empty()) continue;
    auto fields = SplitTabs(line, 2);
    if (fields[0].empty()) throw ParseError(source_name, line_no, "empty utterance id");
    Transcript t;
    t.utt_id = std::string(fields[0]);
    if (!seen.insert(t.utt_id).second) {
      throw ParseError(source_name, line_no, "duplicate utterance " + t.utt_id);
    }
    Sentence items;
    try {
      items = Tokenize(NormalizeUtf8(fields.size() > 1 ? fields[1] : ""));
    } catch (const std::invalid_argument &e) {
      throw ParseError(source_name, line_no, e.what());
    }
    std::size_t with_conf = 0;
    for (auto &item : items) {
      const std::size_t colon = item.rfind(':');
      std::optional<double> conf;
      if (colon != std::string::npos && colon > 0) {
        conf = ParseDouble(std::string_view(item).substr(colon + 1));
        if (conf && (*conf < 0.0 || *conf > 1.0)) conf.reset();
      }
      if (conf) {
        ++with_conf;
        t.tokens.push_back(item.substr(0, colon));
        t.confidences.push_back(*conf);
      } else {
        t.tokens.push_back(item);
      }
    }
    if (with_conf != 0 && with_conf != items.size()) {
      throw ParseError(source_name, line_no,
                       "confidences must be given for all tokens or none");
    }
    if (with_conf == 0) t.confidences.clear();
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Transcript> ReadTranscripts(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return ReadTranscripts(in, path);
}

void WriteTranscripts(const std::vector<Transcript> &transcripts,
                      std::ostream &out) {
  for (const auto &t : transcripts) {
    out << t.utt_id << '\t';
    for (std::size_t i = 0; i < t.tokens.size(); ++i) {
      if (i) out << ' ';
      out << t.tokens[i];
      if (!t.confidences.empty()) out << ':' << FormatDouble(t.confidences[i]);
    }
    out << '\n';
  }
}

}  // namespace cascade

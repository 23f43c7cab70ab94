// tests/test_util.h
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
// Shared helpers for the unit tests.

#ifndef CASCADE_TESTS_TEST_UTIL_H_
#define CASCADE_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cascade/corpus.h"

namespace cascade::testing {

// Random corpus over words w0..w{vocab-1} with a skewed word distribution so
// counts-of-counts are populated.
inline std::vector<Sentence> RandomCorpus(std::mt19937_64 &rng, std::size_t sentences,
                                          int vocab, int max_length,
                                          const std::string &prefix = "w") {
  std::vector<double> weights;
  for (int i = 0; i < vocab; ++i) weights.push_back(1.0 / (1.0 + i));
  std::discrete_distribution<int> word(weights.begin(), weights.end());
  std::uniform_int_distribution<int> length(0, max_length);
  std::vector<Sentence> corpus(sentences);
  for (auto &s : corpus) {
    const int n = length(rng);
    for (int i = 0; i < n; ++i) s.push_back(prefix + std::to_string(word(rng)));
  }
  return corpus;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("cascade_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  std::string File(const std::string &name) const { return (path_ / name).string(); }

  std::string Write(const std::string &name, const std::string &content) const {
    std::ofstream(File(name), std::ios::binary) << content;
    return File(name);
  }

 private:
  std::filesystem::path path_;
};

inline std::string Slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Sentence S(const std::string &text) { return Tokenize(text); }

}  // namespace cascade::testing

#endif  // CASCADE_TESTS_TEST_UTIL_H_

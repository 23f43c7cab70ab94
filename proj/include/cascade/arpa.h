// include/cascade/arpa.h
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
// ARPA back-off model format. Values are written as log10 with nine
// significant digits; <s> gets the conventional -99 probability.

#ifndef CASCADE_ARPA_H_
#define CASCADE_ARPA_H_

#include <istream>
#include <ostream>
#include <string>

#include "cascade/ngram.h"

namespace cascade {

void WriteArpa(const NGramModel &model, std::ostream &out);
void WriteArpa(const NGramModel &model, const std::string &path);

// Throws ParseError (with line number) on a missing \data\ header, counts
// that disagree with section lengths, malformed or non-numeric fields, and
// higher-order n-grams over words missing from the unigram section.
NGramModel ReadArpa(std::istream &in, const std::string &source_name = "<stream>");
NGramModel ReadArpa(const std::string &path);

}  // namespace cascade

#endif  // CASCADE_ARPA_H_

// Copyright 2026 The metricfair Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef METRICFAIR_METRICFAIR_HPP_
#define METRICFAIR_METRICFAIR_HPP_

#include "metricfair/cda.hpp"
#include "metricfair/core.hpp"
#include "metricfair/correlation.hpp"
#include "metricfair/fairness.hpp"
#include "metricfair/generation.hpp"
#include "metricfair/http_provider.hpp"
#include "metricfair/matching.hpp"
#include "metricfair/ngram.hpp"
#include "metricfair/porter_stemmer.hpp"
#include "metricfair/provider.hpp"
#include "metricfair/scoring.hpp"
#include "metricfair/transport.hpp"
#include "metricfair/unicode.hpp"

#endif  // METRICFAIR_METRICFAIR_HPP_

// Copyright 2026 The Sentinel Authors.
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

#include <gtest/gtest.h>

#include "properties.hpp"

namespace sentinel {
namespace {

constexpr std::size_t kCases = 1000;

TEST(PropertyTest, NormalizeIsIdempotent) {
  const auto r = testing::normalize_idempotence(kCases, 11);
  EXPECT_TRUE(r.ok()) << r.failure;
  EXPECT_GE(r.cases, kCases);
}

TEST(PropertyTest, ProvenanceChainsAreAcyclic) {
  const auto r = testing::provenance_acyclicity(kCases, 12);
  EXPECT_TRUE(r.ok()) << r.failure;
  EXPECT_GE(r.cases, kCases);
}

TEST(PropertyTest, RobustAccuracyComplementsAsrAtFullCleanAccuracy) {
  const auto r = testing::ra_complements_asr(kCases, 13);
  EXPECT_TRUE(r.ok()) << r.failure;
  EXPECT_GE(r.cases, kCases);
}

TEST(PropertyTest, MetricsArePermutationInvariant) {
  const auto r = testing::metric_permutation_invariance(kCases, 14);
  EXPECT_TRUE(r.ok()) << r.failure;
  EXPECT_GE(r.cases, kCases);
}

TEST(PropertyTest, InFlightRequestsStayBounded) {
  const auto r = testing::bounded_in_flight(kCases, 15);
  EXPECT_TRUE(r.ok()) << r.failure;
  EXPECT_GE(r.cases, kCases);
}

}  // namespace
}  // namespace sentinel

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

#include "sentinel/core_model.hpp"
#include "sentinel/error.hpp"
#include "sentinel/task_catalog.hpp"

namespace sentinel {
namespace {

TEST(TaskIdTest, RoundTripsAllNames) {
  for (TaskId id : {TaskId::SST2, TaskId::RTE, TaskId::QQP, TaskId::QNLI, TaskId::MNLI_MM,
                    TaskId::MNLI_M}) {
    EXPECT_EQ(parse_task_id(task_name(id)), id);
  }
  EXPECT_EQ(task_name(TaskId::MNLI_MM), "mnli-mm");
  EXPECT_THROW(parse_task_id("cola"), ContractError);
}

TEST(TaskSpecTest, ValidateRejectsBadSpecs) {
  TaskSpec spec = builtin_task(TaskId::SST2);
  EXPECT_NO_THROW(spec.validate());
  TaskSpec empty_labels = spec;
  empty_labels.label_list.clear();
  EXPECT_THROW(empty_labels.validate(), ContractError);
  TaskSpec duplicate = spec;
  duplicate.label_list = {"positive", "positive"};
  EXPECT_THROW(duplicate.validate(), ContractError);
  TaskSpec no_fields = spec;
  no_fields.field_names.clear();
  EXPECT_THROW(no_fields.validate(), ContractError);
}

TEST(PerturbationTest, NineInstructionsInCanonicalOrder) {
  const auto& all = builtin_instructions();
  const char* names[] = {"C1", "C2", "C3", "W1", "W2", "W3", "S1", "S2", "S3"};
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_EQ(perturbation_name(all[i].id), names[i]);
    EXPECT_EQ(parse_perturbation(names[i]), all[i].id);
  }
  EXPECT_EQ(all[0].level, PerturbationLevel::Character);
  EXPECT_EQ(all[4].level, PerturbationLevel::Word);
  EXPECT_EQ(all[8].level, PerturbationLevel::Sentence);
  EXPECT_EQ(builtin_instruction(PerturbationId::C3).text,
            "Add at most two extraneous characters to the end of the sentence.");
  EXPECT_EQ(builtin_instruction(PerturbationId::S2).text, "Paraphrase the sentence.");
  EXPECT_THROW(parse_perturbation("X9"), ContractError);
}

TEST(ExampleTest, DeriveLinksChildToParent) {
  const Example clean = make_clean_example("sst2-0", {{"sentence", "good film"}}, "positive");
  const Example adv = derive_example(clean, {{"sentence", "good film :("}}, Stage::Adversarial,
                                     PerturbationId::C3);
  EXPECT_EQ(adv.id, "sst2-0/adv-C3");
  EXPECT_EQ(adv.parent_id, "sst2-0");
  EXPECT_EQ(adv.gold_label, "positive");
  EXPECT_EQ(adv.field("sentence"), "good film :(");
  EXPECT_EQ(clean.field("sentence"), "good film");

  const Example pur = derive_example(adv, {{"sentence", "good film"}}, Stage::Purified);
  EXPECT_EQ(pur.id, "sst2-0/adv-C3/pur");
  EXPECT_EQ(pur.stage, Stage::Purified);

  const Example agent = derive_example(pur, {{"sentence", "bad film"}}, Stage::Adversarial,
                                       std::nullopt, true);
  EXPECT_EQ(agent.id, "sst2-0/adv-C3/pur/adv-agent");
  EXPECT_TRUE(agent.from_attack_agent);
}

TEST(ExampleTest, DeriveRejectsUnknownFieldAndBadStage) {
  const Example clean = make_clean_example("rte-0", {{"sentence1", "a"}, {"sentence2", "b"}},
                                           "entailment");
  EXPECT_THROW(derive_example(clean, {{"sentence3", "c"}}, Stage::Purified), DataError);
  EXPECT_THROW(derive_example(clean, {{"sentence2", "c"}}, Stage::Clean), ContractError);
  EXPECT_THROW(derive_example(clean, {{"sentence2", "c"}}, Stage::Adversarial), ContractError);
  const Example partial = derive_example(clean, {{"sentence2", "c"}}, Stage::Purified);
  EXPECT_EQ(partial.field("sentence1"), "a");
  EXPECT_EQ(partial.field("sentence2"), "c");
}

TEST(ExampleTest, CheckFieldsNamesOffendingKey) {
  const TaskSpec spec = builtin_task(TaskId::RTE);
  const Example ok = make_clean_example("rte-0", {{"sentence1", "a"}, {"sentence2", "b"}}, "entailment");
  EXPECT_NO_THROW(check_fields(ok, spec));
  const Example missing = make_clean_example("rte-1", {{"sentence1", "a"}}, "entailment");
  try {
    check_fields(missing, spec);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("sentence2"), std::string::npos);
  }
}

TEST(NormalizeLabelTest, SpecExamples) {
  const TaskSpec sst2 = builtin_task(TaskId::SST2);
  const TaskSpec rte = builtin_task(TaskId::RTE);
  const TaskSpec mnli = builtin_task(TaskId::MNLI_M);
  EXPECT_EQ(normalize_label("Positive.", sst2), "positive");
  EXPECT_EQ(normalize_label("  NEGATIVE  ", sst2), "negative");
  EXPECT_EQ(normalize_label("The sentiment is positive.", sst2), "positive");
  EXPECT_EQ(normalize_label("not entailment", rte), "not_entailment");
  EXPECT_EQ(normalize_label("Not_entailment", rte), "not_entailment");
  EXPECT_EQ(normalize_label("entailment", rte), "entailment");
  EXPECT_EQ(normalize_label("`contradiction'", mnli), "contradiction");
  EXPECT_EQ(normalize_label("positive or negative", sst2), std::nullopt);
  EXPECT_EQ(normalize_label("I cannot tell", sst2), std::nullopt);
  EXPECT_EQ(normalize_label("", sst2), std::nullopt);
  EXPECT_EQ(normalize_label("positively", sst2), std::nullopt);
}

TEST(ProvenanceTest, ChainWalksToCleanRoot) {
  ProvenanceIndex index;
  const Example clean = make_clean_example("sst2-0", {{"sentence", "x"}}, "positive");
  const Example adv = derive_example(clean, {{"sentence", "y"}}, Stage::Adversarial,
                                     PerturbationId::C1);
  const Example pur = derive_example(adv, {{"sentence", "x"}}, Stage::Purified);
  index.add(clean);
  index.add(adv);
  index.add(pur);
  const auto chain = index.chain(pur.id);
  ASSERT_EQ(chain.size(), 3u);
  EXPECT_EQ(chain.front()->id, pur.id);
  EXPECT_EQ(chain.back()->id, clean.id);
}

TEST(ProvenanceTest, MissingParentAndCycleAreErrors) {
  const Example clean = make_clean_example("sst2-0", {{"sentence", "x"}}, "positive");
  const Example adv = derive_example(clean, {{"sentence", "y"}}, Stage::Adversarial,
                                     PerturbationId::C1);
  ProvenanceIndex orphan;
  orphan.add(adv);
  EXPECT_THROW(orphan.chain(adv.id), DataError);

  Example a = adv;
  a.id = "a";
  a.parent_id = "b";
  Example b = adv;
  b.id = "b";
  b.parent_id = "a";
  ProvenanceIndex cyclic;
  cyclic.add(a);
  cyclic.add(b);
  EXPECT_THROW(cyclic.chain("a"), DataError);
  EXPECT_THROW(cyclic.chain("nope"), DataError);
}

}  // namespace
}  // namespace sentinel

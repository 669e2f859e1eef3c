#include <gtest/gtest.h>

#include <algorithm>
#include <nlohmann/json.hpp>

#include "anycap/error.hpp"
#include "anycap/prompt_template.hpp"
#include "test_support.hpp"

namespace anycap {
namespace {

std::string words(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " w" : "w") + std::to_string(i);
  return s;
}

TEST(Templates, BuiltinRegistryContents) {
  const auto& reg = TemplateRegistry::builtin();
  auto ids = reg.ids();
  for (const char* id : {"shortprompt.multi_id", "shortprompt.depth", "ir.extract_intent", "ir.build_qa", "ir.answer",
                         "ir.grade"})
    EXPECT_NE(std::find(ids.begin(), ids.end(), id), ids.end()) << id;
  EXPECT_EQ(reg.latest("shortprompt.depth").condition_kind(), "depth");
  EXPECT_THROW(reg.latest("nope"), InvalidArgument);
}

TEST(Templates, MultiIdRender) {
  const auto& t = TemplateRegistry::builtin().latest("shortprompt.multi_id");
  auto out = t.render({{"caption", "CAPTION-TEXT"}, {"examples", "EX-1"}, {"identity_attributes", "red scarf"}});
  EXPECT_NE(out.find("Avoid repeating information that can be inferred from the reference images"), std::string::npos);
  EXPECT_NE(out.find("CAPTION-TEXT"), std::string::npos);
  EXPECT_EQ(out.find("{{"), std::string::npos);
  try {
    t.render({{"caption", "x"}, {"examples", "y"}});
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("identity_attributes"), std::string::npos);
  }
}

TEST(Templates, DepthRenderAndWordLimit) {
  const auto& t = TemplateRegistry::builtin().latest("shortprompt.depth");
  auto out = t.render({{"caption", "c"}, {"examples", "e"}});
  EXPECT_NE(out.find("not exceeding 100"), std::string::npos);
  EXPECT_EQ(t.constraints().max_words, 100u);
  EXPECT_TRUE(check_prompt_constraints(words(80), t).empty());
  EXPECT_TRUE(check_prompt_constraints(words(100), t).empty());
  auto v = check_prompt_constraints(words(120), t);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, "max_words");
}

TEST(Templates, RepeatsIdentityTerms) {
  auto fx = nlohmann::json::parse(testing::read_file(testing::data_path("templates/repeats_identity.json")));
  const auto& t = TemplateRegistry::builtin().latest("shortprompt.multi_id");
  SlotValues in{{"identity_attributes", fx["identity_attributes"].get<std::string>()}};
  EXPECT_TRUE(check_prompt_constraints(fx["clean"].get<std::string>(), t, in).empty());
  auto v = check_prompt_constraints(fx["leaky"].get<std::string>(), t, in);
  ASSERT_EQ(v.size(), 2u);
  for (const auto& x : v) EXPECT_EQ(x.rule, "repeats_input");
}

TEST(Templates, ForbiddenWholeWords) {
  auto t = PromptTemplate::parse("id: x\nversion: 2\nslots: a\nforbid: camera pans\nforbid: red\n---\n{{a}}\n");
  EXPECT_EQ(t.version(), 2);
  EXPECT_TRUE(check_prompt_constraints("A reddish camera that pans.", t).empty());
  auto v = check_prompt_constraints("The Camera pans over a RED car.", t);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].rule, "forbidden_term");
}

TEST(Templates, ParseErrors) {
  EXPECT_THROW(PromptTemplate::parse("id: x\nversion: 1\nslots: a\n---\n{{a}} {{b}}"), ParseError);
  EXPECT_THROW(PromptTemplate::parse("id: x\nversion: 1\nbogus: 1\n---\nbody"), ParseError);
  EXPECT_THROW(PromptTemplate::parse("version: 1\n---\nbody"), ParseError);
  EXPECT_THROW(PromptTemplate::parse("id: x\nversion: 0\n---\nbody"), ParseError);
  EXPECT_THROW(PromptTemplate::parse("id: x\nversion: 1\nslots: a\navoid_terms_from: b\n---\n{{a}}"), ParseError);
  EXPECT_THROW(PromptTemplate::parse("id: x\nversion: 1\n"), ParseError);
}

TEST(Templates, SlotNamesAndLiteralValues) {
  EXPECT_EQ(template_slot_names("{{b}} and {{a}} then {{b}}"), (std::vector<std::string>{"b", "a"}));
  auto t = PromptTemplate::parse("id: x\nversion: 1\nslots: a, b\n---\n[{{a}}|{{b}}]");
  EXPECT_EQ(t.render({{"a", "{{b}}"}, {"b", "$1\\n"}}), "[{{b}}|$1\\n]");
}

TEST(Templates, RegistryVersionsIncrease) {
  TemplateRegistry reg;
  reg.add(PromptTemplate::parse("id: x\nversion: 1\n---\none"));
  reg.add(PromptTemplate::parse("id: x\nversion: 3\n---\nthree"));
  EXPECT_THROW(reg.add(PromptTemplate::parse("id: x\nversion: 2\n---\ntwo")), InvalidArgument);
  EXPECT_THROW(reg.add(PromptTemplate::parse("id: x\nversion: 3\n---\nagain")), InvalidArgument);
  EXPECT_EQ(reg.latest("x").version(), 3);
  EXPECT_EQ(reg.get("x", 1).body(), "one");
  EXPECT_THROW(reg.get("x", 2), InvalidArgument);
}

TEST(Templates, LoadFromFile) {
  testing::TempDir dir;
  testing::write_text(dir / "t.tmpl", "id: f\nversion: 1\nslots: q\n---\nask {{q}}\n");
  EXPECT_EQ(PromptTemplate::load(dir / "t.tmpl").render({{"q", "why"}}), "ask why");
  EXPECT_THROW(PromptTemplate::load(dir / "missing.tmpl"), IoError);
}

}  // namespace
}  // namespace anycap

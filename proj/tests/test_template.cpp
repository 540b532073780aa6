#include <doctest.h>

#include "framecl/texttmpl.hpp"
#include "helpers.hpp"

using namespace framecl;
using nlohmann::ordered_json;

TEST_SUITE("template") {

TEST_CASE("substitution resolves dotted paths") {
  tmpl::TemplateSet set;
  set.add("t", "Hello {{ user.name }}, you have {{ count }} items.");
  ordered_json ctx{{"user", {{"name", "Ada"}}}, {"count", 3}};
  CHECK(set.render("t", ctx) == "Hello Ada, you have 3 items.");
}

TEST_CASE("loops bind the loop variable and index") {
  tmpl::TemplateSet set;
  set.add("t", "{% for x in xs %}{{ loop.index }}:{{ x }} {% endfor %}");
  ordered_json ctx{{"xs", {"a", "b", "c"}}};
  CHECK(set.render("t", ctx) == "1:a 2:b 3:c ");
}

TEST_CASE("conditionals honor truthiness, with else") {
  tmpl::TemplateSet set;
  set.add("t", "{% if flag %}on{% else %}off{% endif %}");
  CHECK(set.render("t", ordered_json{{"flag", true}}) == "on");
  CHECK(set.render("t", ordered_json{{"flag", false}}) == "off");
  CHECK(set.render("t", ordered_json{{"flag", ""}}) == "off");
  CHECK(set.render("t", ordered_json{{"flag", ordered_json::array()}}) == "off");
  CHECK(set.render("t", ordered_json{{"flag", "x"}}) == "on");
}

TEST_CASE("tags alone on a line swallow the line break") {
  tmpl::TemplateSet set;
  set.add("t", "a\n{% if flag %}\nb\n{% endif %}\nc\n");
  CHECK(set.render("t", ordered_json{{"flag", true}}) == "a\nb\nc\n");
  CHECK(set.render("t", ordered_json{{"flag", false}}) == "a\nc\n");
}

TEST_CASE("includes splice another template") {
  tmpl::TemplateSet set;
  set.add("inner", "[{{ v }}]");
  set.add("outer", "x{% include \"inner\" %}y");
  CHECK(set.render("outer", ordered_json{{"v", 7}}) == "x[7]y");
}

TEST_CASE("sections render in order and empty ones vanish") {
  tmpl::TemplateSet set;
  set.add("t",
          "{% section A %}\nalpha\n{% endsection %}\n"
          "{% section B %}\n{% if flag %}\nbeta\n{% endif %}\n{% endsection %}\n"
          "{% section C %}\ngamma\n{% endsection %}\n");
  auto with = set.render_sections("t", ordered_json{{"flag", true}});
  REQUIRE(with.size() == 3);
  CHECK(with[1].first == "B");
  auto without = set.render_sections("t", ordered_json{{"flag", false}});
  REQUIRE(without.size() == 2);
  CHECK(without[0].first == "A");
  CHECK(without[1].first == "C");
}

TEST_CASE("unknown values and malformed tags are errors") {
  tmpl::TemplateSet set;
  set.add("t", "{{ missing }}");
  CHECK_THROWS_AS((void)set.render("t", ordered_json::object()), Error);
  set.add("u", "{% for x %}{% endfor %}");
  CHECK_THROWS_AS((void)set.render("u", ordered_json::object()), Error);
  set.add("v", "{% if a %}no close");
  CHECK_THROWS_AS((void)set.render("v", ordered_json{{"a", true}}), Error);
}

TEST_CASE("directory loading matches the embedded copies") {
  auto from_dir = tmpl::TemplateSet::from_directory(FRAMECL_TEMPLATES_DIR);
  CHECK(from_dir.contains("fi.tmpl"));
  CHECK(from_dir.contains("fsp.tmpl"));
  CHECK(from_dir.contains("fsrl.tmpl"));
  CHECK(from_dir.contains("partials/events.tmpl"));
  CHECK(from_dir.contains("partials/examples.tmpl"));
}

}  // TEST_SUITE

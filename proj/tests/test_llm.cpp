#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "test_support.hpp"

using namespace attrlens;
using namespace attrlens::testing;

TEST_CASE("build_q1 renders the category prompt") {
    DomainSpec d = test_domain(10, 5);
    d.caption = "a photo of a bird";
    d.noun = "bird";
    CHECK(build_q1(d) ==
          "What are 10 attribute categories that can be used to visually distinguish images "
          "described by the caption \"a photo of a bird\"? Output the categories in one Python list");

    d.caption = "a photo of a living room";
    CHECK(build_q1(d) ==
          "What are 10 attribute categories that can be used to visually distinguish images "
          "described by the caption \"a photo of a living room\"? Output the categories in one "
          "Python list");

    d.n_categories = 1;
    CHECK(build_q1(d).find("What are 1 attribute categories") == 0);
}

TEST_CASE("build_q2 renders the attribute prompt") {
    DomainSpec d = test_domain(10, 5);
    d.caption = "a photo of a car";
    d.noun = "car";
    std::string q2 = build_q2(d, "color");
    CHECK(q2 ==
          "What are 5 different examples of the category color that can be used to distinguish "
          "images described by the caption \"a photo of a car\"? Output the examples in one "
          "Python list");

    d.m_attributes = 3;
    CHECK(build_q2(d, "habitat").find("3 different examples of the category habitat") !=
          std::string::npos);

    CHECK_THROWS_AS(build_q2(d, "  "), EmptyInput);
}

TEST_CASE("build_q3 renders the object-vs-image prompt") {
    CHECK(build_q3({"couch", "coffee table"}) ==
          "Are couch, coffee table examples of objects or items? Answer with a yes or no. "
          "Explain your answer.");
    CHECK(build_q3({"sofa"}) ==
          "Are sofa examples of objects or items? Answer with a yes or no. Explain your answer.");
    CHECK_THROWS_AS(build_q3({}), EmptyInput);
}

TEST_CASE("parse_list_response handles fences, prose and quote styles") {
    CHECK(parse_list_response("```python\n['Silk', 'leather', 'silk']\n```") ==
          std::vector<std::string>{"silk", "leather"});
    CHECK(parse_list_response("Sure! [\"forest habitat\", \"wetland habitat\"]") ==
          std::vector<std::string>{"forest habitat", "wetland habitat"});
    CHECK_THROWS_AS(parse_list_response("I cannot answer that."), ParseError);
}

TEST_CASE("parse_list_response skips non-string lists and handles escapes") {
    CHECK(parse_list_response("ranked [1, 2] then ['a', 'b']") ==
          std::vector<std::string>{"a", "b"});
    CHECK(parse_list_response("['levi\\'s logo', \"quote \\\" inside\"]") ==
          std::vector<std::string>{"levi's logo", "quote \" inside"});
    CHECK(parse_list_response("[ 'One',\n  'Two', ]") == std::vector<std::string>{"one", "two"});
    CHECK(parse_list_response("[['nested','list']]") ==
          std::vector<std::string>{"nested", "list"});
    CHECK_THROWS_AS(parse_list_response("[unquoted, items]"), ParseError);
    CHECK_THROWS_AS(parse_list_response("[]"), ParseError);
    CHECK_THROWS_AS(parse_list_response("['...']"), ParseError);  // normalizes to nothing
}

TEST_CASE("parse_yes_no classifies by the first alphabetic token") {
    CHECK(parse_yes_no("Yes. These are all physical items...") == YesNo::Yes);
    CHECK(parse_yes_no("no, these describe holistic qualities") == YesNo::No);
    CHECK(parse_yes_no("They are items.") == YesNo::Ambiguous);
    CHECK(parse_yes_no("  YES!") == YesNo::Yes);
    CHECK(parse_yes_no("1. No") == YesNo::No);
    CHECK(parse_yes_no("") == YesNo::Ambiguous);
    CHECK(parse_yes_no("yesterday was fine") == YesNo::Ambiguous);
}

TEST_CASE("aggregate_top_k counts across runs with the documented tie-break") {
    RunSet runs{{{"a", "b"}, {"a", "c"}, {"a", "b"}}};
    CHECK(aggregate_top_k(runs, 2) == std::vector<std::string>{"a", "b"});

    RunSet tie{{{"a"}, {"b"}}};
    CHECK(aggregate_top_k(tie, 1) == std::vector<std::string>{"a"});

    RunSet small{{{"a"}}};
    CHECK(aggregate_top_k(small, 5) == std::vector<std::string>{"a"});

    RunSet positional{{{"x", "y"}, {"y", "x"}}};  // both count 2; x first-appears earlier
    CHECK(aggregate_top_k(positional, 1) == std::vector<std::string>{"x"});

    CHECK_THROWS_AS(aggregate_top_k(RunSet{}, 1), EmptyInput);
    CHECK_THROWS_AS(aggregate_top_k(runs, 0), EmptyInput);
}

TEST_CASE("aggregate_top_k is permutation-invariant within runs when counts differ") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        // Distinct counts by construction: item i appears i+1 times across runs.
        RunSet base;
        base.runs.resize(5);
        for (int i = 0; i < 5; ++i)
            for (int r = 0; r <= i; ++r) base.runs[r].push_back("item" + std::to_string(i));
        RunSet shuffled = base;
        for (auto& run : shuffled.runs) std::shuffle(run.begin(), run.end(), rng);
        CHECK(aggregate_top_k(base, 3) == aggregate_top_k(shuffled, 3));
    }
}

namespace {

// Scripted responses replaying the published bird-domain generation.
FixtureSet cub_fixtures(const DomainSpec& d, const std::string& model) {
    FixtureSet fx;
    add_chat_fixture(fx, model, build_q1(d),
                     "['Habitat', 'Plumage pattern', 'Color', 'Size', 'Wing shape', 'Species', "
                     "'Perching behavior', 'Background scenery', 'Shape', 'Eye color']");
    auto q2 = [&](const std::string& cat, const std::string& list) {
        add_chat_fixture(fx, model, build_q2(d, cat), list);
    };
    q2("habitat", "['forest habitat', 'wetland habitat', 'desert habitat', 'coastal habitat', 'urban habitat']");
    q2("plumage pattern", "['solid-colored', 'striped', 'spotted', 'mottled', 'barred']");
    q2("color", "['yellow', 'blue', 'orange', 'green', 'red']");
    q2("size", "['small', 'medium-sized', 'large', 'tiny', 'gigantic']");
    q2("wing shape", "['rounded wings', 'pointed wings', 'broad wings', 'slender wings', 'elongated wings']");
    q2("species", "['american robin', 'great horned owl', 'bald eagle', 'blue jay', 'sparrow']");
    q2("perching behavior",
       "['bird perched on a statue', 'bird perched on a fence', 'bird perched on a rooftop', "
       "'bird perched on a tree branch', 'bird perched on a power line']");
    q2("background scenery",
       "['a photo of a bird with a clear blue sky as the background scenery', "
       "'a photo of a bird perched on a tree branch with lush green foliage as the background scenery', "
       "'a photo of a bird flying above a field of colorful wildflowers as the background scenery', "
       "'a photo of a bird standing on a rock with a serene lake as the background scenery', "
       "'a photo of a bird standing on a rocky cliff with a vast ocean as the background scenery']");
    q2("shape", "['square', 'circle', 'triangle', 'pentagon', 'diamond']");
    q2("eye color", "['yellow eyes', 'red eyes', 'blue eyes', 'green eyes', 'brown eyes']");

    auto q3 = [&](const std::vector<std::string>& attrs, const std::string& answer) {
        add_chat_fixture(fx, model, build_q3(attrs), answer);
    };
    q3({"forest habitat", "wetland habitat", "desert habitat", "coastal habitat", "urban habitat"},
       "No, habitats describe environments rather than objects.");
    q3({"solid-colored", "striped", "spotted", "mottled", "barred"}, "No, these are patterns.");
    q3({"yellow", "blue", "orange", "green", "red"}, "No, colors are not objects.");
    q3({"small", "medium-sized", "large", "tiny", "gigantic"}, "No, sizes are not objects.");
    q3({"rounded wings", "pointed wings", "broad wings", "slender wings", "elongated wings"},
       "No, wing shapes describe form.");
    q3({"american robin", "great horned owl", "bald eagle", "blue jay", "sparrow"},
       "No, these are species names.");
    q3({"bird perched on a statue", "bird perched on a fence", "bird perched on a rooftop",
        "bird perched on a tree branch", "bird perched on a power line"},
       "Yes, these describe a bird object on concrete items.");
    q3({"a photo of a bird with a clear blue sky as the background scenery",
        "a photo of a bird perched on a tree branch with lush green foliage as the background scenery",
        "a photo of a bird flying above a field of colorful wildflowers as the background scenery",
        "a photo of a bird standing on a rock with a serene lake as the background scenery",
        "a photo of a bird standing on a rocky cliff with a vast ocean as the background scenery"},
       "No, these are whole-scene descriptions.");
    q3({"square", "circle", "triangle", "pentagon", "diamond"}, "No, shapes are abstract.");
    q3({"yellow eyes", "red eyes", "blue eyes", "green eyes", "brown eyes"},
       "No, eye colors are properties.");
    return fx;
}

}  // namespace

TEST_CASE("generate_schema replays the bird-domain fixture") {
    DomainSpec d;
    d.caption = "a photo of a bird";
    d.noun = "bird";
    d.n_categories = 10;
    d.m_attributes = 5;
    d.reps_categories = 3;
    d.reps_attributes = 3;
    d.reps_kind = 3;

    GenerateOptions opts;
    opts.model_id = "chat-mock";
    opts.timestamp = "1970-01-01T00:00:00Z";

    FixtureSet fx = cub_fixtures(d, opts.model_id);
    ScriptedChatBackend chat(fx);
    AttributeSchema schema = generate_schema(d, chat, opts);

    REQUIRE(schema.categories.size() == 10);
    CHECK(schema.categories[0].name == "habitat");
    CHECK(schema.categories[1].name == "plumage pattern");
    CHECK(schema.categories[6].name == "perching behavior");
    CHECK(schema.categories[6].kind == CategoryKind::ObjectLevel);
    CHECK_FALSE(schema.categories[6].needs_review);
    CHECK(schema.categories[0].kind == CategoryKind::ImageLevel);
    CHECK(schema.categories[0].needs_review);
    CHECK(schema.categories[0].attributes ==
          std::vector<std::string>{"forest habitat", "wetland habitat", "desert habitat",
                                   "coastal habitat", "urban habitat"});
    for (const auto& cat : schema.categories) {
        CHECK(cat.caption_template == CaptionTemplate::Identity);
        CHECK(cat.attributes.size() <= 5);
    }
    CHECK(validate_schema(schema).empty());

    // Identical fixture and domain give a byte-identical schema.
    ScriptedChatBackend chat2(fx);
    AttributeSchema again = generate_schema(d, chat2, opts);
    CHECK(serialize_schema(schema) == serialize_schema(again));
}

TEST_CASE("generate_schema with reps=1 equals the single-run parse") {
    DomainSpec d = test_domain(2, 2, 1);
    GenerateOptions opts;
    opts.model_id = "chat-mock";
    opts.timestamp = "1970-01-01T00:00:00Z";

    FixtureSet fx;
    add_chat_fixture(fx, opts.model_id, build_q1(d), "['color', 'shape']");
    add_chat_fixture(fx, opts.model_id, build_q2(d, "color"), "['red', 'blue']");
    add_chat_fixture(fx, opts.model_id, build_q2(d, "shape"), "['round', 'square']");
    add_chat_fixture(fx, opts.model_id, build_q3({"red", "blue"}), "No.");
    add_chat_fixture(fx, opts.model_id, build_q3({"round", "square"}), "No.");

    ScriptedChatBackend chat(fx);
    AttributeSchema schema = generate_schema(d, chat, opts);
    REQUIRE(schema.categories.size() == 2);
    CHECK(schema.categories[0].attributes == std::vector<std::string>{"red", "blue"});
    CHECK(schema.categories[1].attributes == std::vector<std::string>{"round", "square"});
}

TEST_CASE("kind vote: one yes, one no, one ambiguous lands image-level") {
    DomainSpec d = test_domain(1, 1, 1);
    d.reps_kind = 3;
    GenerateOptions opts;
    opts.model_id = "chat-mock";

    FixtureSet fx;
    add_chat_fixture(fx, opts.model_id, build_q1(d), "['ornament']");
    add_chat_fixture(fx, opts.model_id, build_q2(d, "ornament"), "['ribbon']");
    add_chat_fixture(fx, opts.model_id, build_q3({"ribbon"}), "Yes, a ribbon is an item.", "rep:0");
    add_chat_fixture(fx, opts.model_id, build_q3({"ribbon"}), "no, not really", "rep:1");
    add_chat_fixture(fx, opts.model_id, build_q3({"ribbon"}), "It depends.", "rep:2");

    ScriptedChatBackend chat(fx);
    AttributeSchema schema = generate_schema(d, chat, opts);
    REQUIRE(schema.categories.size() == 1);
    CHECK(schema.categories[0].kind == CategoryKind::ImageLevel);
}

TEST_CASE("a malformed response is re-issued and can recover") {
    DomainSpec d = test_domain(1, 1, 1);
    GenerateOptions opts;
    opts.model_id = "chat-mock";

    FixtureSet fx;
    add_chat_fixture(fx, opts.model_id, build_q1(d), "Sorry, no list here.", "rep:0");
    add_chat_fixture(fx, opts.model_id, build_q1(d), "['color']", "rep:0;retry:1");
    add_chat_fixture(fx, opts.model_id, build_q2(d, "color"), "['red']");
    add_chat_fixture(fx, opts.model_id, build_q3({"red"}), "No.");

    ScriptedChatBackend chat(fx);
    AttributeSchema schema = generate_schema(d, chat, opts);
    REQUIRE(schema.categories.size() == 1);
    CHECK(schema.categories[0].name == "color");
    CHECK(chat.calls() == 4);  // bad run, retry, q2, q3
}

TEST_CASE("parse failures exhaust after max_parse_retries") {
    DomainSpec d = test_domain(1, 1, 1);
    GenerateOptions opts;
    opts.model_id = "chat-mock";
    opts.max_parse_retries = 3;

    FixtureSet fx;
    add_chat_fixture(fx, opts.model_id, build_q1(d), "I will not produce a list.");
    ScriptedChatBackend chat(fx);
    CHECK_THROWS_AS(generate_schema(d, chat, opts), ParseError);
    CHECK(chat.calls() == 3);
}

TEST_CASE("backend errors propagate out of generation") {
    DomainSpec d = test_domain(1, 1, 1);
    GenerateOptions opts;
    opts.model_id = "chat-mock";
    FixtureSet fx;  // empty: every request is unscripted
    ScriptedChatBackend chat(fx);
    CHECK_THROWS_AS(generate_schema(d, chat, opts), BackendError);
}

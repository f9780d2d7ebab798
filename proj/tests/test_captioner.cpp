#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "test_support.hpp"

using namespace attrlens;
using namespace attrlens::testing;

TEST_CASE("each template row renders its phrase") {
    CHECK(render_caption(CaptionTemplate::Is, "clothing item", "red", "color").text ==
          "a red clothing item");
    CHECK(render_caption(CaptionTemplate::With, "clothing item", "loose fit", "fit").text ==
          "a clothing item with loose fit");
    CHECK(render_caption(CaptionTemplate::In, "bird", "forest habitat", "habitat").text ==
          "a bird in forest habitat");
    CHECK(render_caption(CaptionTemplate::From, "car", "1965", "year").text == "a car from 1965");
    CHECK(render_caption(CaptionTemplate::Has, "bird", "solid-colored", "plumage pattern").text ==
          "a bird has solid-colored plumage pattern");
}

TEST_CASE("identity rendering never mutates the attribute") {
    std::string attr = "bird perched on a fence";
    RenderedCaption c = render_caption(CaptionTemplate::Identity, "bird", attr, "perching behavior");
    CHECK(c.text == attr);
    CHECK(c.attribute == attr);
    CHECK(c.category_name == "perching behavior");

    // Identity needs no noun at all.
    CHECK(render_caption(CaptionTemplate::Identity, "", "curtains", "window treatments").text ==
          "curtains");
}

TEST_CASE("the has template drops a category suffix the attribute already carries") {
    CHECK(render_caption(CaptionTemplate::Has, "bird", "yellow eyes", "eye color").text ==
          "a bird has yellow eyes");
    CHECK(render_caption(CaptionTemplate::Has, "bird", "rounded wings", "wing shape").text ==
          "a bird has rounded wings");
    CHECK(render_caption(CaptionTemplate::Has, "dog", "straight tail", "tail shape").text ==
          "a dog has straight tail");
    // No overlap: suffix stays.
    CHECK(render_caption(CaptionTemplate::Has, "person", "smiling", "facial expression").text ==
          "a person has smiling facial expression");
}

TEST_CASE("rendering is total over non-empty inputs") {
    std::mt19937 rng(9);
    const std::vector<CaptionTemplate> templates = {CaptionTemplate::Is,   CaptionTemplate::Has,
                                                    CaptionTemplate::With, CaptionTemplate::In,
                                                    CaptionTemplate::From, CaptionTemplate::Identity};
    const std::vector<std::string> nouns = {"bird", "clothing item", "living room"};
    const std::vector<std::string> attrs = {"red", "forest habitat", "solid-colored", "x"};
    for (const auto& tmpl : templates)
        for (const auto& noun : nouns)
            for (const auto& attr : attrs) {
                RenderedCaption c = render_caption(tmpl, noun, attr, "category");
                CHECK_FALSE(c.text.empty());
            }
}

TEST_CASE("rendering rejects empty noun or attribute") {
    CHECK_THROWS_AS(render_caption(CaptionTemplate::Is, "bird", "  ", "color"), EmptyInput);
    CHECK_THROWS_AS(render_caption(CaptionTemplate::Is, " ", "red", "color"), EmptyInput);
}

TEST_CASE("base caption is the domain caption") {
    DomainSpec d = test_domain();
    d.caption = "a photo of a bird";
    CHECK(base_caption(d) == "a photo of a bird");

    d.caption = "a photo of a living room";
    CHECK(base_caption(d) == "a photo of a living room");

    d.caption = "  padded  ";
    CHECK(base_caption(d) == "padded");
}

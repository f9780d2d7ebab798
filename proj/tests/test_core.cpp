#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "test_support.hpp"

using namespace attrlens;
using namespace attrlens::testing;

namespace {

// The ten DeepFashion categories with their generated attributes and
// reviewed templates, used as a known-good schema fixture.
AttributeSchema deepfashion_schema() {
    AttributeSchema s;
    s.domain.caption = "a photo of a clothing item";
    s.domain.noun = "clothing item";
    s.domain.n_categories = 10;
    s.domain.m_attributes = 5;
    auto img = CategoryKind::ImageLevel;
    auto obj = CategoryKind::ObjectLevel;
    s.categories = {
        make_category("material", {"silk", "leather", "cotton", "denim", "wool"}, img, CaptionTemplate::Is),
        make_category("fit", {"loose fit", "oversized fit", "slim fit", "tailored fit", "athletic fit"}, img, CaptionTemplate::With),
        make_category("style", {"bohemian style", "vintage style", "streetwear style", "formal style", "minimalist style"}, img, CaptionTemplate::With),
        make_category("pattern", {"striped pattern", "floral pattern", "polka dot pattern", "animal print pattern", "plaid pattern"}, img, CaptionTemplate::With),
        make_category("sleeve length", {"sleeveless", "short sleeve", "long sleeve", "cap sleeve", "three-quarter sleeve"}, img, CaptionTemplate::With),
        make_category("color", {"red", "yellow", "blue", "black", "white"}, img, CaptionTemplate::Is),
        make_category("embellishments", {"embroidery", "sequins", "beads", "lace", "applique"}, obj),
        make_category("neckline", {"v-neckline", "halter neckline", "boat neckline", "off-the-shoulder neckline", "crew neckline"}, img, CaptionTemplate::With),
        make_category("brand/logo", {"gucci logo", "adidas logo", "nike logo", "polo ralph lauren logo", "levi's logo"}, img, CaptionTemplate::With),
        make_category("type of clothing item", {"skirt", "jacket", "pants", "dress", "t-shirt"}, obj),
    };
    s.provenance = {{"model_id", "mock"}, {"generated_at", "1970-01-01T00:00:00Z"}};
    return s;
}

}  // namespace

TEST_CASE("normalize_name canonicalizes model output") {
    CHECK(normalize_name("  Forest   Habitat ") == "forest habitat");
    CHECK(normalize_name("Silk.") == "silk");
    CHECK(normalize_name("SUV") == "suv");
    CHECK(normalize_name("a.\tb..") == "a. b");
    CHECK(normalize_name("...") == "");
    CHECK(normalize_name("") == "");
}

TEST_CASE("validate_schema accepts the DeepFashion fixture") {
    CHECK(validate_schema(deepfashion_schema()).empty());
}

TEST_CASE("validate_schema flags duplicate category names") {
    AttributeSchema s;
    s.domain = test_domain(5, 5);
    s.categories = {make_category("color", {"red"}), make_category("color", {"blue"})};
    auto violations = validate_schema(s);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "duplicate category name: color");
}

TEST_CASE("validate_schema flags non-identity templates on object-level categories") {
    AttributeSchema s;
    s.domain = test_domain(5, 5);
    s.categories = {
        make_category("furniture", {"couch"}, CategoryKind::ObjectLevel, CaptionTemplate::With)};
    auto violations = validate_schema(s);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("object-level category must use identity template") == 0);
    CHECK(violations[0].find("furniture") != std::string::npos);
}

TEST_CASE("validate_schema flags size overruns, duplicates and reserved names") {
    AttributeSchema s;
    s.domain = test_domain(1, 2);
    s.categories = {make_category("a", {"x", "y", "z"}), make_category("b", {"x", "x"}),
                    make_category("c", {"__base__"}), make_category("d", {})};
    auto violations = validate_schema(s);
    auto has = [&](std::string_view needle) {
        for (const auto& v : violations)
            if (v.find(needle) != std::string::npos) return true;
        return false;
    };
    CHECK(has("schema has 4 categories, domain allows 1"));
    CHECK(has("category a has 3 attributes, domain allows 2"));
    CHECK(has("duplicate attribute x (category: b)"));
    CHECK(has("reserved attribute name __base__"));
    CHECK(has("category has no attributes: d"));
}

TEST_CASE("validate_schema is pure") {
    AttributeSchema s = deepfashion_schema();
    s.categories[0].attributes.push_back(s.categories[0].attributes[0]);
    auto first = validate_schema(s);
    auto second = validate_schema(s);
    CHECK(first == second);
    CHECK_FALSE(first.empty());
}

TEST_CASE("schema files round-trip byte-identically") {
    AttributeSchema s = deepfashion_schema();
    std::string once = serialize_schema(s);
    std::string twice = serialize_schema(parse_schema(once));
    CHECK(once == twice);
}

TEST_CASE("store files round-trip byte-identically") {
    std::mt19937 rng(42);
    AttributeSchema schema;
    schema.domain = test_domain(3, 3);
    schema.categories = {
        make_category("color", {"red", "blue"}, CategoryKind::ImageLevel, CaptionTemplate::Is),
        make_category("objects", {"couch", "rug"}, CategoryKind::ObjectLevel),
    };
    AnnotationStore store = random_store(schema, 7, rng);
    std::string once = serialize_store(store);
    std::string twice = serialize_store(parse_store(once));
    CHECK(once == twice);

    AnnotationStore reparsed = parse_store(once);
    CHECK(reparsed.records.size() == store.records.size());
    CHECK(reparsed.alpha == store.alpha);
    CHECK(same_schema(reparsed.schema, store.schema));
}

TEST_CASE("manifest parsing enforces unique ids") {
    std::string text =
        R"({"id":"a","uri":"a.png","class_label":"cat"})" "\n"
        R"({"id":"b","uri":"b.png"})" "\n";
    auto refs = parse_manifest(text);
    REQUIRE(refs.size() == 2);
    CHECK(refs[0].class_label.value() == "cat");
    CHECK_FALSE(refs[1].class_label.has_value());

    std::string dup = text + R"({"id":"a","uri":"c.png"})" "\n";
    CHECK_THROWS_AS(parse_manifest(dup), IoError);
}

TEST_CASE("domain validation trims and rejects bad values") {
    DomainSpec d = test_domain();
    d.caption = "  a photo of a bird  ";
    validate_domain(d);
    CHECK(d.caption == "a photo of a bird");

    DomainSpec empty = test_domain();
    empty.caption = "   ";
    CHECK_THROWS_AS(validate_domain(empty), ConfigError);

    DomainSpec bad_n = test_domain();
    bad_n.n_categories = 0;
    CHECK_THROWS_AS(validate_domain(bad_n), ConfigError);
}

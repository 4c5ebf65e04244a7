#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cgain/codec.hpp"
#include "cgain/error.hpp"

using namespace cgain;

namespace {

FeatureSchema toy_schema() {
    return FeatureSchema({{"colour", FeatureKind::multiclass, 3, {"red", "green", "blue"}},
                          {"tags", FeatureKind::multilabel, 3, {}},
                          {"age", FeatureKind::numeric, 1, {}},
                          {"flag", FeatureKind::multiclass, 2, {}}});
}

VectorXd vec(std::initializer_list<double> xs) {
    VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

// Argmax written out independently of the library, lowest index on ties.
std::size_t first_max(const VectorXd& x) {
    std::size_t best = 0;
    for (Eigen::Index k = 1; k < x.size(); ++k) {
        if (x(k) > x(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(k);
    }
    return best;
}

}  // namespace

TEST_CASE("schema validation") {
    CHECK_NOTHROW(toy_schema());
    CHECK_THROWS_AS(FeatureSchema({{"a", FeatureKind::multiclass, 1, {}}}), SchemaError);
    CHECK_THROWS_AS(FeatureSchema({{"a", FeatureKind::multilabel, 0, {}}}), SchemaError);
    CHECK_THROWS_AS(FeatureSchema({{"a", FeatureKind::numeric, 2, {}}}), SchemaError);
    CHECK_THROWS_AS(FeatureSchema({{"a", FeatureKind::multiclass, 2, {}}, {"a", FeatureKind::multiclass, 2, {}}}),
                    SchemaError);
    CHECK_THROWS_AS(FeatureSchema({{"a", FeatureKind::multiclass, 3, {"x", "y"}}}), SchemaError);
    CHECK_THROWS_AS(FeatureSchema({{"a", FeatureKind::multiclass, 2, {"x", "x"}}}), SchemaError);

    const auto s = toy_schema();
    CHECK(s.feature_count() == 4);
    CHECK(s.total_width() == 9);
    CHECK(s.offset(0) == 0);
    CHECK(s.offset(1) == 3);
    CHECK(s.offset(2) == 6);
    CHECK(s.offset(3) == 7);
    CHECK(s.find("age") == 2);
    CHECK_FALSE(s.find("nope").has_value());
    CHECK(s.feature(0).category_of("blue") == 2);
    CHECK_FALSE(s.feature(0).category_of("pink").has_value());
}

TEST_CASE("schema text round trip and parse errors") {
    const auto s = toy_schema();
    const auto back = FeatureSchema::parse(s.to_text());
    CHECK(back == s);
    CHECK(back.hash() == s.hash());

    const auto other = FeatureSchema({{"colour", FeatureKind::multiclass, 4, {}}});
    CHECK(other.hash() != s.hash());

    const auto commented = FeatureSchema::parse("# header\n\na multiclass 2  # trailing\nb multilabel 3\n");
    CHECK(commented.feature_count() == 2);

    try {
        FeatureSchema::parse("a multiclass 2\nb bogus 3\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row() == 2);
    }
    CHECK_THROWS_AS(FeatureSchema::parse("a multiclass two\n"), ParseError);
    CHECK_THROWS_AS(FeatureSchema::parse("a multiclass\n"), ParseError);
    CHECK_THROWS_AS(FeatureSchema::parse("a multiclass 1\n"), ParseError);
    CHECK_THROWS_AS(FeatureSchema::load("/nonexistent/schema.txt"), ParseError);
}

TEST_CASE("binary encoding") {
    const auto s = toy_schema();
    const RawRecord r{std::size_t{1}, std::vector<std::size_t>{0, 2}, 0.25, Missing{}};
    const auto row = encode_binary(r, s);
    CHECK(row.codes == vec({0, 1, 0, 1, 0, 1, 0.25, 0, 0}));
    CHECK(row.feature_mask == vec({1, 1, 1, 0}));

    CHECK_THROWS_AS(encode_binary({std::size_t{3}, Missing{}, Missing{}, Missing{}}, s), SchemaError);
    CHECK_THROWS_AS(encode_binary({Missing{}, std::vector<std::size_t>{3}, Missing{}, Missing{}}, s), SchemaError);
    CHECK_THROWS_AS(encode_binary({Missing{}, Missing{}, 1.5, Missing{}}, s), SchemaError);
    CHECK_THROWS_AS(encode_binary({Missing{}, Missing{}, Missing{}}, s), SchemaError);
    CHECK_THROWS_AS(encode_binary({0.5, Missing{}, Missing{}, Missing{}}, s), SchemaError);
}

TEST_CASE("fuzzy multiclass keeps the category") {
    Rng rng(11);
    CHECK(fuzzify_multiclass(vec({1}), rng) == vec({1}));

    const auto fig = fuzzify_multiclass(vec({0, 1, 0}), rng);
    CHECK(fig(0) >= 0.0);
    CHECK(fig(0) < 1.0 / 3.0);
    CHECK(fig(2) < 1.0 / 3.0);
    CHECK(fig(1) == doctest::Approx(1.0 - fig(0) - fig(2)).epsilon(1e-15));

    for (int q = 2; q <= 6; ++q) {
        for (int active = 0; active < q; ++active) {
            VectorXd z = VectorXd::Zero(q);
            z(active) = 1.0;
            for (int draw = 0; draw < 1000; ++draw) {
                const VectorXd x = fuzzify_multiclass(z, rng);
                REQUIRE(first_max(x) == static_cast<std::size_t>(active));
                REQUIRE(std::abs(x.sum() - 1.0) <= 1e-12);
                REQUIRE(x(active) > 1.0 / q);
                for (int k = 0; k < q; ++k) {
                    if (k == active) continue;
                    REQUIRE(x(k) >= 0.0);
                    REQUIRE(x(k) < 1.0 / q);
                    REQUIRE(x(active) > x(k));
                }
            }
        }
    }
    CHECK_THROWS_AS(fuzzify_multiclass(vec({1, 1, 0}), rng), EncodingError);
    CHECK_THROWS_AS(fuzzify_multiclass(vec({0, 0.5, 0.5}), rng), EncodingError);
}

TEST_CASE("fuzzy multilabel keeps the label set") {
    Rng rng(12);
    const auto x = fuzzify_multilabel(vec({1, 0, 1}), rng);
    CHECK(x(0) >= 0.5);
    CHECK(x(1) < 0.5);
    CHECK(x(2) >= 0.5);
    CHECK((fuzzify_multilabel(vec({0, 0, 0, 0}), rng).array() < 0.5).all());

    for (int q = 1; q <= 4; ++q) {
        for (int pattern = 0; pattern < (1 << q); ++pattern) {
            VectorXd z(q);
            for (int k = 0; k < q; ++k) z(k) = (pattern >> k) & 1;
            for (int draw = 0; draw < 1000; ++draw) {
                const VectorXd f = fuzzify_multilabel(z, rng);
                for (int k = 0; k < q; ++k) {
                    REQUIRE(f(k) >= 0.0);
                    REQUIRE(f(k) <= 1.0);
                    REQUIRE((f(k) >= 0.5 ? 1.0 : 0.0) == z(k));
                }
            }
        }
    }
    CHECK_THROWS_AS(fuzzify_multilabel(vec({1, 2}), rng), EncodingError);
}

TEST_CASE("decode") {
    const FeatureSpec mc{"a", FeatureKind::multiclass, 3, {}};
    const FeatureSpec ml{"b", FeatureKind::multilabel, 3, {}};
    const FeatureSpec num{"c", FeatureKind::numeric, 1, {}};
    CHECK(std::get<std::size_t>(decode(vec({0.1, 0.8, 0.1}), mc)) == 1);
    CHECK(std::get<std::size_t>(decode(vec({0.4, 0.4, 0.2}), mc)) == 0);
    CHECK(std::get<std::size_t>(decode(vec({0.2, 0.4, 0.4}), mc)) == 1);
    CHECK(std::get<std::vector<std::size_t>>(decode(vec({0.5, 0.49, 1.0}), ml)) == std::vector<std::size_t>{0, 2});
    CHECK(std::get<std::vector<std::size_t>>(decode(vec({0.1, 0.2, 0.3}), ml)).empty());
    CHECK(std::get<double>(decode(vec({0.375}), num)) == 0.375);

    CHECK(binarize_block(vec({0.2, 0.5, 0.3}), mc) == vec({0, 1, 0}));
    CHECK(binarize_block(vec({0.7, 0.2, 0.5}), ml) == vec({1, 0, 1}));
}

TEST_CASE("mask expansion") {
    const FeatureSchema s({{"a", FeatureKind::multiclass, 3, {}}, {"b", FeatureKind::multiclass, 2, {}}});
    CHECK(build_masks(vec({1, 0}), s) == vec({1, 1, 1, 0, 0}));
    CHECK(build_masks(vec({1, 1}), s) == VectorXd::Ones(5));
    CHECK(build_masks(vec({0, 0}), s) == VectorXd::Zero(5));
    CHECK_THROWS_AS(build_masks(vec({1}), s), DimensionError);

    // Collapsing each block back with "any entry set" recovers mu.
    const auto t = toy_schema();
    for (int pattern = 0; pattern < 16; ++pattern) {
        VectorXd mu(4);
        for (int j = 0; j < 4; ++j) mu(j) = (pattern >> j) & 1;
        const VectorXd m = build_masks(mu, t);
        for (std::size_t j = 0; j < 4; ++j) {
            const auto block = m.segment(static_cast<Eigen::Index>(t.offset(j)), static_cast<Eigen::Index>(t.width(j)));
            CHECK((block.maxCoeff() > 0.0 ? 1.0 : 0.0) == mu(static_cast<Eigen::Index>(j)));
            CHECK(block.minCoeff() == block.maxCoeff());
        }
    }
}

TEST_CASE("dataset encoding") {
    const FeatureSchema one({{"a", FeatureKind::multiclass, 3, {}}});
    const std::vector<RawRecord> single{{std::size_t{2}}};
    const auto d = encode_dataset(single, one, 5);
    CHECK(d.values.rows() == 1);
    CHECK(d.values.row(0).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.feature_mask(0, 0) == 1.0);
    CHECK(d.mask.row(0) == Eigen::RowVector3d(1, 1, 1));

    const std::vector<RawRecord> missing{{Missing{}}};
    const auto m = encode_dataset(missing, one, 5);
    CHECK(m.values.isZero());
    CHECK(m.feature_mask.isZero());
    CHECK(m.mask.isZero());

    // Random corpus over the toy schema: round trip and invariants.
    const auto s = toy_schema();
    Rng rng(99);
    std::vector<RawRecord> corpus;
    for (int i = 0; i < 50; ++i) {
        std::vector<std::size_t> tags;
        for (std::size_t k = 0; k < 3; ++k) {
            if (rng.uniform() < 0.5) tags.push_back(k);
        }
        const double age = std::floor(rng.uniform() * 64.0) / 64.0;
        corpus.push_back({static_cast<std::size_t>(rng.next() % 3), tags, age, static_cast<std::size_t>(rng.next() % 2)});
    }
    const auto fd = encode_dataset(corpus, s, 17);
    CHECK(decode_dataset(fd) == corpus);
    for (Eigen::Index i = 0; i < 50; ++i) {
        CHECK(std::abs(fd.values.row(i).segment(0, 3).sum() - 1.0) <= 1e-12);
        CHECK(std::abs(fd.values.row(i).segment(7, 2).sum() - 1.0) <= 1e-12);
        CHECK(fd.values.row(i).segment(0, 3).maxCoeff() > 1.0 / 3.0);
    }
    CHECK((fd.values.array() != fd.binary.array()).any());

    // Same seed, same codes; different seed, different codes.
    CHECK(encode_dataset(corpus, s, 17).values == fd.values);
    CHECK(encode_dataset(corpus, s, 18).values != fd.values);

    const auto hard = encode_dataset(corpus, s, 17, Coding::hard);
    CHECK(hard.values == hard.binary);
    CHECK(hard.binary == fd.binary);

    // Errors are aggregated with 1-based row numbers.
    auto bad = corpus;
    bad[3][0] = std::size_t{7};
    bad[10][2] = 2.0;
    try {
        encode_dataset(bad, s, 1);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        const std::string what = e.what();
        CHECK(what.find("2 record(s)") != std::string::npos);
        CHECK(what.find("row 4") != std::string::npos);
        CHECK(what.find("row 11") != std::string::npos);
    }
}

TEST_CASE("masking, resampling and row selection") {
    const auto s = toy_schema();
    const std::vector<RawRecord> corpus{
        {std::size_t{0}, std::vector<std::size_t>{1}, 0.5, std::size_t{1}},
        {std::size_t{2}, std::vector<std::size_t>{}, 1.0, Missing{}},
    };
    auto d = encode_dataset(corpus, s, 3);
    const auto before = d.values;

    MatrixXd mu = d.feature_mask;
    mu(0, 1) = 0.0;
    mu(1, 3) = 0.0;  // already missing
    apply_feature_mask(d, mu);
    CHECK(d.feature_mask == mu);
    CHECK(d.values.row(0).segment(3, 3).isZero());
    CHECK(d.binary.row(0).segment(3, 3).isZero());
    CHECK(d.mask.row(0).segment(3, 3).isZero());
    CHECK(d.values.row(0).segment(0, 3) == before.row(0).segment(0, 3));
    CHECK_THROWS_AS(apply_feature_mask(d, MatrixXd::Ones(2, 3)), DimensionError);

    refuzzify(d, 4);
    CHECK(d.values.row(0).segment(3, 3).isZero());
    CHECK(decode_dataset(d)[1] == corpus[1]);
    CHECK(std::get<std::size_t>(decode_dataset(d)[0][0]) == 0);

    const std::vector<std::size_t> pick{1, 1, 0};
    const auto sel = select_rows(d, pick);
    CHECK(sel.rows() == 3);
    CHECK(sel.values.row(0) == d.values.row(1));
    CHECK(sel.values.row(2) == d.values.row(0));
    const std::vector<std::size_t> out_of_range{2};
    CHECK_THROWS_AS(select_rows(d, out_of_range), DimensionError);
}

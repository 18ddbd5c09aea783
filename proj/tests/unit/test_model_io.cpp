#include "mdqda/error.hpp"
#include "mdqda/model_io.hpp"
#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>

using namespace mdqda;
using namespace mdqda::testing;

TEST_CASE("save/load round trip scores identically") {
    Rng rng(21);
    for (Variant v : {Variant::sample, Variant::generalized}) {
        const FittedQda m = fit(gaussian_sample(6, 30, rng), gaussian_sample(6, 40, rng, 2.0, 1.0), v);
        const FittedQda back = load_model(save_model(m));
        CHECK(back.variant() == v);
        CHECK(back.dim() == 6);
        CHECK(back.class1().n == 30);
        CHECK(back.class2().n == 40);
        for (int i = 0; i < 20; ++i) {
            const Vector z = random_vector(6, rng);
            CHECK(std::abs(back.discriminant(z) - m.discriminant(z)) <= 1e-12 * std::max(1.0, std::abs(m.discriminant(z))));
        }
    }
}

TEST_CASE("file round trip") {
    Rng rng(22);
    const FittedQda m = fit(gaussian_sample(3, 20, rng), gaussian_sample(3, 20, rng, 3.0), Variant::generalized);
    const auto path = std::filesystem::temp_directory_path() / "mdqda_model_io_test.json";
    save_model_file(m, path);
    const FittedQda back = load_model_file(path);
    std::filesystem::remove(path);
    const Vector z = random_vector(3, rng);
    CHECK(back.discriminant(z) == doctest::Approx(m.discriminant(z)).epsilon(1e-12));
}

TEST_CASE("stored constants are used instead of recomputed ones") {
    Rng rng(23);
    const FittedQda m = fit(gaussian_sample(4, 20, rng), gaussian_sample(4, 30, rng), Variant::generalized);
    auto doc = nlohmann::json::parse(save_model(m));
    CHECK(doc["format_version"] == kModelFormatVersion);
    CHECK(doc["variant"] == "generalized");
    doc["s0n"] = 10.0;
    const FittedQda edited = load_model(doc.dump());
    CHECK(edited.constants().s0n == 10.0);
}

TEST_CASE("malformed documents are rejected") {
    Rng rng(24);
    const FittedQda m = fit(gaussian_sample(3, 20, rng), gaussian_sample(3, 20, rng), Variant::sample);
    CHECK_THROWS_AS(load_model("not json"), ValidationError);
    CHECK_THROWS_AS(load_model("{}"), ValidationError);

    auto doc = nlohmann::json::parse(save_model(m));
    auto wrong_version = doc;
    wrong_version["format_version"] = 99;
    CHECK_THROWS_AS(load_model(wrong_version.dump()), ValidationError);

    auto short_mean = doc;
    short_mean["mean1"] = {1.0, 2.0};
    CHECK_THROWS_AS(load_model(short_mean.dump()), ValidationError);

    auto short_chol = doc;
    short_chol["chol2"] = {1.0};
    CHECK_THROWS_AS(load_model(short_chol.dump()), ValidationError);

    CHECK_THROWS_AS(load_model_file("/nonexistent/model.json"), ValidationError);
}

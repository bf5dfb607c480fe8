#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "courtcast/checkpoint.hpp"
#include "courtcast/optim.hpp"
#include "courtcast/rng.hpp"

using namespace courtcast;
using namespace courtcast::ad;

namespace {

std::string temp_path(const char* name) {
    return std::string("optim_test_") + name + ".bin";
}

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("first Adam step with unit-scale gradient moves by the learning rate") {
    AdamConfig config;
    config.lr = 1e-3;
    std::vector<Parameter> params;
    params.emplace_back("w", Tensor::scalar(5.0));
    params[0].grad.at(0) = 10.0;
    adam_step(params, config);
    // Bias correction makes the first normalized step have unit magnitude.
    CHECK(std::abs(std::abs(params[0].value.at(0) - 5.0) - config.lr) < 1e-6);
    CHECK(params[0].value.at(0) < 5.0);
    CHECK(params[0].step == 1);
}

TEST_CASE("zero gradient and zero decay leave the parameter unchanged") {
    AdamConfig config;
    std::vector<Parameter> params;
    params.emplace_back("w", Tensor::of({2}, {1.5, -2.5}));
    for (int i = 0; i < 5; ++i) adam_step(params, config);
    CHECK(params[0].value(0) == 1.5);
    CHECK(params[0].value(1) == -2.5);
    CHECK(params[0].step == 5);
}

TEST_CASE("weight decay alone acts as the gradient") {
    AdamConfig config;
    config.lr = 1e-3;
    config.weight_decay = 1e-3;
    std::vector<Parameter> params;
    params.emplace_back("w", Tensor::scalar(1.0));
    adam_step(params, config);
    // Decay term 0.001*1.0 becomes the whole gradient; the normalized first
    // step is again ~lr, pointed toward zero.
    CHECK(params[0].value.at(0) == doctest::Approx(1.0 - config.lr).epsilon(1e-4));
}

TEST_CASE("adam_step with lr = 0 is the identity") {
    AdamConfig config;
    config.lr = 0.0;
    config.weight_decay = 0.5;
    std::vector<Parameter> params;
    params.emplace_back("w", Tensor::of({3}, {1, 2, 3}));
    params[0].grad = Tensor::of({3}, {9, -9, 4});
    adam_step(params, config);
    CHECK(params[0].value(0) == 1);
    CHECK(params[0].value(1) == 2);
    CHECK(params[0].value(2) == 3);
}

TEST_CASE("adam trajectory descends a quadratic") {
    AdamConfig config;
    config.lr = 0.05;
    std::vector<Parameter> params;
    params.emplace_back("w", Tensor::scalar(3.0));
    for (int i = 0; i < 200; ++i) {
        params[0].zero_grad();
        params[0].grad.at(0) = 2.0 * params[0].value.at(0);  // d/dw of w^2
        adam_step(params, config);
    }
    CHECK(std::abs(params[0].value.at(0)) < 0.1);
}

TEST_CASE("adam_step rejects mismatched gradient shapes") {
    std::vector<Parameter> params;
    params.emplace_back("w", Tensor::of({2}, {1, 2}));
    params[0].grad = Tensor({3});
    CHECK_THROWS_AS(adam_step(params, AdamConfig{}), ShapeError);
}

TEST_CASE("xavier_uniform stays within the fan limit and is seed-deterministic") {
    const int fan_in = 8, fan_out = 4;
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));

    Rng rng_a(123), rng_b(123), rng_c(124);
    Tensor a({fan_in, fan_out}), b({fan_in, fan_out}), c({fan_in, fan_out});
    xavier_uniform(a, fan_in, fan_out, rng_a);
    xavier_uniform(b, fan_in, fan_out, rng_b);
    xavier_uniform(c, fan_in, fan_out, rng_c);

    bool all_same_ab = true, any_diff_ac = false, nonzero = false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        CHECK(std::abs(a.at(i)) <= limit);
        all_same_ab = all_same_ab && a.at(i) == b.at(i);
        any_diff_ac = any_diff_ac || a.at(i) != c.at(i);
        nonzero = nonzero || a.at(i) != 0.0;
    }
    CHECK(all_same_ab);
    CHECK(any_diff_ac);
    CHECK(nonzero);
    CHECK_THROWS_AS(xavier_uniform(a, 0, 4, rng_a), Error);
}

TEST_CASE("splitmix rng reproduces its stream and respects ranges") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng r(7);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const int k = r.uniform_int(3, 9);
        CHECK(k >= 3);
        CHECK(k < 9);
    }

    // Box-Muller normals: sane first two moments over a modest sample.
    Rng g(11);
    double sum = 0, sum2 = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double z = g.normal();
        sum += z;
        sum2 += z * z;
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(std::abs(sum2 / n - 1.0) < 0.05);
}

TEST_CASE("checkpoint round-trips values bit for bit") {
    Checkpoint cp;
    cp.seed = 0xDEADBEEFCAFEF00DULL;
    Tensor weights = Tensor::of({2, 3}, {1.5, -0.0, 1e-308, 3.141592653589793, -2.5, 1e300});
    Tensor bias = Tensor::of({3}, {0.1, 0.2, 0.3});
    cp.entries.emplace_back("layer.w", weights);
    cp.entries.emplace_back("layer.b", bias);

    const std::string path = temp_path("roundtrip");
    save_checkpoint(cp, path);
    const Checkpoint loaded = load_checkpoint(path);

    CHECK(loaded.version == 1);
    CHECK(loaded.seed == cp.seed);
    REQUIRE(loaded.entries.size() == 2);
    CHECK(loaded.entries[0].first == "layer.w");
    CHECK(loaded.entries[0].second.shape() == std::vector<int>{2, 3});
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        const std::uint64_t want = std::bit_cast<std::uint64_t>(weights.at(i));
        const std::uint64_t got = std::bit_cast<std::uint64_t>(loaded.entries[0].second.at(i));
        CHECK(want == got);
    }

    // Saving the loaded checkpoint reproduces the file byte for byte.
    const std::string path2 = temp_path("roundtrip2");
    save_checkpoint(loaded, path2);
    CHECK(read_all(path) == read_all(path2));

    CHECK(loaded.find("layer.b") != nullptr);
    CHECK(loaded.find("layer.b")->at(2) == 0.3);
    CHECK(loaded.find("missing") == nullptr);

    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("checkpoint loader rejects damaged files") {
    const std::string path = temp_path("damaged");

    {
        std::ofstream out(path, std::ios::binary);
        out << "NOPE";
    }
    CHECK_THROWS_AS(load_checkpoint(path), Error);

    Checkpoint cp;
    cp.entries.emplace_back("w", Tensor::of({2}, {1, 2}));
    save_checkpoint(cp, path);
    const std::string whole = read_all(path);
    {
        std::ofstream out(path, std::ios::binary);
        out.write(whole.data(), static_cast<std::streamsize>(whole.size() - 3));
    }
    CHECK_THROWS_AS(load_checkpoint(path), Error);

    {
        std::ofstream out(path, std::ios::binary);
        out.write(whole.data(), static_cast<std::streamsize>(whole.size()));
        out << "junk";
    }
    CHECK_THROWS_AS(load_checkpoint(path), Error);

    CHECK_THROWS_AS(load_checkpoint("no_such_file.ckpt"), Error);
    std::remove(path.c_str());
}

TEST_CASE("checkpoint header stores the seed even with no entries") {
    Checkpoint cp;
    cp.seed = 7;
    const std::string path = temp_path("empty");
    save_checkpoint(cp, path);
    const Checkpoint loaded = load_checkpoint(path);
    CHECK(loaded.seed == 7);
    CHECK(loaded.entries.empty());
    std::remove(path.c_str());
}
